// Compiled with -mavx2 (no FMA) so each vector lane performs exactly the
// scalar operation sequence from kernels_impl.hpp.

#include <immintrin.h>

#include "gwc/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace gwc::simd {

namespace {

constexpr std::size_t width = 4;

void compose_poly_avx2(std::span<const double> poly, const double* in, double* out, int order,
                       std::size_t lanes)
{
    const std::size_t degree = poly.size() - 1;
    const std::size_t vector_lanes = lanes - lanes % width;
    for (std::size_t lane = 0; lane < vector_lanes; lane += width) {
        __m256d y[max_jet_order + 1];
        __m256d x[max_jet_order + 1];
        for (int j = 0; j <= order; ++j) {
            x[j] = _mm256_loadu_pd(in + j * lanes + lane);
            y[j] = _mm256_setzero_pd();
        }
        y[0] = _mm256_set1_pd(poly[degree]);
        for (std::size_t k = degree; k-- > 0;) {
            for (int j = order; j >= 0; --j) {
                __m256d acc = _mm256_mul_pd(y[0], x[j]);
                for (int a = 1; a <= j; ++a) {
                    acc = _mm256_add_pd(acc, _mm256_mul_pd(y[a], x[j - a]));
                }
                y[j] = acc;
            }
            y[0] = _mm256_add_pd(y[0], _mm256_set1_pd(poly[k]));
        }
        for (int j = 0; j <= order; ++j) {
            _mm256_storeu_pd(out + j * lanes + lane, y[j]);
        }
    }
    for (std::size_t lane = vector_lanes; lane < lanes; ++lane) {
        detail::compose_poly_lane(poly, in, out, order, lanes, lane);
    }
}

void jet_mul_avx2(const double* a, const double* b, double* out, int order, std::size_t lanes)
{
    const std::size_t vector_lanes = lanes - lanes % width;
    for (std::size_t lane = 0; lane < vector_lanes; lane += width) {
        for (int j = 0; j <= order; ++j) {
            __m256d acc = _mm256_mul_pd(_mm256_loadu_pd(a + lane), _mm256_loadu_pd(b + j * lanes + lane));
            for (int s = 1; s <= j; ++s) {
                acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + s * lanes + lane),
                                                       _mm256_loadu_pd(b + (j - s) * lanes + lane)));
            }
            _mm256_storeu_pd(out + j * lanes + lane, acc);
        }
    }
    for (std::size_t lane = vector_lanes; lane < lanes; ++lane) {
        detail::jet_mul_lane(a, b, out, order, lanes, lane);
    }
}

double falling_factorial_sum_avx2(const double* counts, std::size_t size, int i)
{
    __m256d acc = _mm256_setzero_pd();
    const std::size_t blocks = size - size % width;
    for (std::size_t idx = 0; idx < blocks; idx += width) {
        const __m256d c = _mm256_loadu_pd(counts + idx);
        __m256d term = c;
        for (int r = 1; r < i; ++r) {
            term = _mm256_mul_pd(term, _mm256_sub_pd(c, _mm256_set1_pd(static_cast<double>(r))));
        }
        acc = _mm256_add_pd(acc, term);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, acc);
    for (std::size_t idx = blocks; idx < size; ++idx) {
        lanes[idx & 3] += detail::falling_factorial(counts[idx], i);
    }
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

sum_pair power_sums_avx2(const double* counts, std::size_t size)
{
    __m256d s1 = _mm256_setzero_pd();
    __m256d s2 = _mm256_setzero_pd();
    const std::size_t blocks = size - size % width;
    for (std::size_t idx = 0; idx < blocks; idx += width) {
        const __m256d c = _mm256_loadu_pd(counts + idx);
        s1 = _mm256_add_pd(s1, c);
        s2 = _mm256_add_pd(s2, _mm256_mul_pd(c, c));
    }
    alignas(32) double a[4];
    alignas(32) double b[4];
    _mm256_store_pd(a, s1);
    _mm256_store_pd(b, s2);
    for (std::size_t idx = blocks; idx < size; ++idx) {
        const double c = counts[idx];
        a[idx & 3] += c;
        b[idx & 3] += c * c;
    }
    return {(a[0] + a[1]) + (a[2] + a[3]), (b[0] + b[1]) + (b[2] + b[3])};
}

} // namespace

namespace detail {

const kernel_table& avx2_table() noexcept
{
    static const kernel_table table{"avx2", compose_poly_avx2, jet_mul_avx2, falling_factorial_sum_avx2,
                                    power_sums_avx2};
    return table;
}

} // namespace detail

} // namespace gwc::simd
