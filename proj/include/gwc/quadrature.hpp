#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gwc {

struct quadrature_options {
    double abs_tol = 1e-12;
    int max_intervals = 50000;
    /// [0,1/2] followed by panels [1-2^-j, 1-2^-(j+1)] for j < graded_panels and
    /// a final panel ending at 1. Integrands built from f_l(z) steepen near 1.
    int graded_panels = 52;
};

struct quadrature_result {
    std::vector<double> values;
    /// Sum over intervals of the largest per-component |coarse - fine| estimate.
    double error;
    int intervals;
};

/// Fills out[c * z.size() + p] with component c evaluated at z[p].
using batch_integrand = std::function<void(std::span<const double> z, std::span<double> out)>;

/// Globally adaptive Gauss-Legendre on [0,1] for a vector of integrands that
/// share evaluation points. Throws QuadratureFailure when the tolerance is not
/// met within max_intervals.
quadrature_result integrate_unit_interval(int components, const batch_integrand& integrand,
                                          const quadrature_options& options = {});

/// Nodes and weights of the fixed Gauss-Legendre rule on [-1,1].
std::span<const double> gauss_legendre_nodes();
std::span<const double> gauss_legendre_weights();

} // namespace gwc
