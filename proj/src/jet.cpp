#include "gwc/jet.hpp"

#include <string>

#include "gwc/errors.hpp"
#include "gwc/simd/kernels.hpp"

namespace gwc {

namespace {

void require_compatible(const jet& a, const jet& b)
{
    if (a.base_point() != b.base_point() || a.order() != b.order()) {
        throw error(error_kind::base_point_mismatch,
                    "jets at " + std::to_string(a.base_point()) + " (order " + std::to_string(a.order()) +
                        ") and " + std::to_string(b.base_point()) + " (order " + std::to_string(b.order()) + ")");
    }
}

void require_order(int order)
{
    if (order < 0 || order > simd::max_jet_order) {
        throw error(error_kind::order_exceeded,
                    "jet order must be in [0, " + std::to_string(simd::max_jet_order) + "]");
    }
}

} // namespace

jet::jet(double base_point, std::vector<double> coeffs) : base_(base_point), coeffs_(std::move(coeffs))
{
    if (coeffs_.empty()) {
        throw error(error_kind::invalid_argument, "jet needs at least one coefficient");
    }
    require_order(order());
}

jet jet::variable(double z, int order)
{
    require_order(order);
    std::vector<double> c(order + 1, 0.0);
    c[0] = z;
    if (order >= 1) {
        c[1] = 1.0;
    }
    return jet(z, std::move(c));
}

jet jet_add(const jet& a, const jet& b)
{
    require_compatible(a, b);
    std::vector<double> c(a.coeffs().begin(), a.coeffs().end());
    for (std::size_t j = 0; j < c.size(); ++j) {
        c[j] += b.coeffs()[j];
    }
    return jet(a.base_point(), std::move(c));
}

jet jet_mul(const jet& a, const jet& b)
{
    require_compatible(a, b);
    std::vector<double> c(a.coeffs().size());
    simd::scalar_kernels().jet_mul(a.coeffs().data(), b.coeffs().data(), c.data(), a.order(), 1);
    return jet(a.base_point(), std::move(c));
}

jet apply_poly(std::span<const double> poly, const jet& x)
{
    if (poly.empty()) {
        return jet(x.base_point(), std::vector<double>(x.coeffs().size(), 0.0));
    }
    std::vector<double> c(x.coeffs().size());
    simd::scalar_kernels().compose_poly(poly, x.coeffs().data(), c.data(), x.order(), 1);
    return jet(x.base_point(), std::move(c));
}

jet iterate_pgf(const dist_spec& f, int n, double z, int order)
{
    if (n < 0) {
        throw error(error_kind::invalid_argument, "iteration count must be >= 0");
    }
    if (!(z >= 0.0 && z <= 1.0)) {
        throw error(error_kind::domain_error, "pgf argument outside [0,1]");
    }
    jet x = jet::variable(z, order);
    for (int step = 0; step < n; ++step) {
        x = apply_poly(f.coefficients(), x);
    }
    return x;
}

double factorial(int j)
{
    double r = 1.0;
    for (int k = 2; k <= j; ++k) {
        r *= k;
    }
    return r;
}

double derivative(const jet& x, int j)
{
    if (j < 0 || j > x.order()) {
        throw error(error_kind::order_exceeded,
                    "derivative " + std::to_string(j) + " of an order-" + std::to_string(x.order()) + " jet");
    }
    return x.coeffs()[j] * factorial(j);
}

} // namespace gwc
