#pragma once

#include <span>
#include <vector>

#include "gwc/dist_model.hpp"

namespace gwc {

/// Truncated Taylor expansion h(base + t) = sum_j coeffs[j] t^j, j = 0..order.
class jet {
public:
    jet(double base_point, std::vector<double> coeffs);

    /// The identity function at z: [z, 1, 0, ..., 0].
    static jet variable(double z, int order);

    double base_point() const noexcept { return base_; }
    int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
    std::span<const double> coeffs() const noexcept { return coeffs_; }
    double value() const noexcept { return coeffs_.front(); }

private:
    double base_;
    std::vector<double> coeffs_;
};

/// Both throw BasePointMismatch when base points or orders differ.
jet jet_add(const jet& a, const jet& b);
jet jet_mul(const jet& a, const jet& b);

/// p(x) for polynomial coefficients p[0..d] via Horner in jet arithmetic.
jet apply_poly(std::span<const double> poly, const jet& x);

/// Jet of the n-fold composition f_n at z; n = 0 gives the identity jet.
jet iterate_pgf(const dist_spec& f, int n, double z, int order);

/// j-th derivative coeffs[j] * j!. Throws OrderExceeded for j > order.
double derivative(const jet& x, int j);

double factorial(int j);

} // namespace gwc
