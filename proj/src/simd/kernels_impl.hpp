#pragma once

// Per-lane reference routines shared by every kernel table. Vector variants
// must reproduce these operation sequences exactly.

#include <cstddef>
#include <span>

#include "gwc/simd/kernels.hpp"

namespace gwc::simd::detail {

inline double falling_factorial(double c, int i)
{
    double term = c;
    for (int r = 1; r < i; ++r) {
        term *= (c - static_cast<double>(r));
    }
    return term;
}

inline void compose_poly_lane(std::span<const double> poly, const double* in, double* out, int order,
                              std::size_t lanes, std::size_t lane)
{
    double y[max_jet_order + 1];
    double x[max_jet_order + 1];
    for (int j = 0; j <= order; ++j) {
        x[j] = in[j * lanes + lane];
        y[j] = 0.0;
    }
    const std::size_t degree = poly.size() - 1;
    y[0] = poly[degree];
    for (std::size_t k = degree; k-- > 0;) {
        for (int j = order; j >= 0; --j) {
            double acc = y[0] * x[j];
            for (int a = 1; a <= j; ++a) {
                acc = acc + y[a] * x[j - a];
            }
            y[j] = acc;
        }
        y[0] = y[0] + poly[k];
    }
    for (int j = 0; j <= order; ++j) {
        out[j * lanes + lane] = y[j];
    }
}

inline void jet_mul_lane(const double* a, const double* b, double* out, int order, std::size_t lanes,
                         std::size_t lane)
{
    for (int j = 0; j <= order; ++j) {
        double acc = a[lane] * b[j * lanes + lane];
        for (int s = 1; s <= j; ++s) {
            acc = acc + a[s * lanes + lane] * b[(j - s) * lanes + lane];
        }
        out[j * lanes + lane] = acc;
    }
}

} // namespace gwc::simd::detail
