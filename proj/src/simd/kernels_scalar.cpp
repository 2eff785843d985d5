#include "gwc/simd/kernels.hpp"
#include "kernels_impl.hpp"

namespace gwc::simd {

namespace {

void compose_poly_scalar(std::span<const double> poly, const double* in, double* out, int order,
                         std::size_t lanes)
{
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        detail::compose_poly_lane(poly, in, out, order, lanes, lane);
    }
}

void jet_mul_scalar(const double* a, const double* b, double* out, int order, std::size_t lanes)
{
    for (std::size_t lane = 0; lane < lanes; ++lane) {
        detail::jet_mul_lane(a, b, out, order, lanes, lane);
    }
}

double falling_factorial_sum_scalar(const double* counts, std::size_t size, int i)
{
    double acc[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t idx = 0; idx < size; ++idx) {
        acc[idx & 3] += detail::falling_factorial(counts[idx], i);
    }
    return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

sum_pair power_sums_scalar(const double* counts, std::size_t size)
{
    double s1[4] = {0.0, 0.0, 0.0, 0.0};
    double s2[4] = {0.0, 0.0, 0.0, 0.0};
    for (std::size_t idx = 0; idx < size; ++idx) {
        const double c = counts[idx];
        s1[idx & 3] += c;
        s2[idx & 3] += c * c;
    }
    return {(s1[0] + s1[1]) + (s1[2] + s1[3]), (s2[0] + s2[1]) + (s2[2] + s2[3])};
}

} // namespace

const kernel_table& scalar_kernels() noexcept
{
    static const kernel_table table{"scalar", compose_poly_scalar, jet_mul_scalar,
                                    falling_factorial_sum_scalar, power_sums_scalar};
    return table;
}

} // namespace gwc::simd
