#pragma once

#include <cstddef>
#include <span>

namespace gwc::simd {

/// Highest jet order the batch kernels accept.
inline constexpr int max_jet_order = 15;

struct sum_pair {
    double sum;
    double sum_squares;
};

/// Data-parallel inner loops. Jets are stored lane-interleaved: coefficient j
/// of lane L lives at [j * lanes + L]. Every variant performs the same IEEE
/// operations in the same order as the scalar table, so results are
/// bit-identical whichever table is active.
struct kernel_table {
    const char* name;

    /// out = poly(in) in truncated Taylor arithmetic (Horner). in and out may
    /// not alias.
    void (*compose_poly)(std::span<const double> poly, const double* in, double* out, int order,
                         std::size_t lanes);

    /// out = a * b (Cauchy product truncated at order). out may alias neither input.
    void (*jet_mul)(const double* a, const double* b, double* out, int order, std::size_t lanes);

    /// Sum over entries of the falling factorial (c)_i, accumulated in four
    /// interleaved partial sums combined pairwise.
    double (*falling_factorial_sum)(const double* counts, std::size_t size, int i);

    /// Sum of c and of c^2 with the same four-way accumulation.
    sum_pair (*power_sums)(const double* counts, std::size_t size);
};

const kernel_table& scalar_kernels() noexcept;

/// Null when the build has no AVX2 variant or the CPU does not report AVX2.
const kernel_table* avx2_kernels() noexcept;

/// Selected once per process. GWC_SIMD=scalar forces the reference kernels,
/// GWC_SIMD=avx2 requests AVX2 (falls back to scalar if unavailable).
const kernel_table& active_kernels() noexcept;

} // namespace gwc::simd
