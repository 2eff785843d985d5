#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "gwc/dist_model.hpp"
#include "gwc/errors.hpp"
#include "gwc/jet.hpp"

using namespace gwc;

namespace {

std::vector<double> coeffs_of(const jet& x) { return {x.coeffs().begin(), x.coeffs().end()}; }

double poly_eval(const std::vector<double>& p, double z)
{
    double acc = 0.0;
    for (auto it = p.rbegin(); it != p.rend(); ++it) {
        acc = acc * z + *it;
    }
    return acc;
}

std::vector<double> poly_derivative(std::vector<double> p, int times)
{
    for (int t = 0; t < times; ++t) {
        if (p.size() <= 1) {
            return {0.0};
        }
        std::vector<double> d(p.size() - 1);
        for (std::size_t k = 1; k < p.size(); ++k) {
            d[k - 1] = static_cast<double>(k) * p[k];
        }
        p = d;
    }
    return p;
}

} // namespace

TEST_CASE("variable jets")
{
    CHECK(coeffs_of(jet::variable(0.5, 2)) == std::vector<double>{0.5, 1.0, 0.0});
    CHECK(coeffs_of(jet::variable(0.0, 0)) == std::vector<double>{0.0});
    CHECK(coeffs_of(jet::variable(1.0, 3)) == std::vector<double>{1.0, 1.0, 0.0, 0.0});
    CHECK_THROWS_AS(jet::variable(0.5, -1), error);
}

TEST_CASE("jet arithmetic")
{
    CHECK(coeffs_of(jet_mul(jet(0.0, {0, 1, 0}), jet(0.0, {0, 1, 0}))) == std::vector<double>{0, 0, 1});
    CHECK(coeffs_of(jet_add(jet(0.0, {1, 2, 3}), jet(0.0, {4, 5, 6}))) == std::vector<double>{5, 7, 9});
    CHECK(coeffs_of(jet_mul(jet(0.0, {1, 1}), jet(0.0, {1, -1}))) == std::vector<double>{1, 0});
    try {
        jet_mul(jet(0.0, {1, 1}), jet(0.5, {1, 1}));
        FAIL("expected mismatch");
    } catch (const error& e) {
        CHECK(e.kind() == error_kind::base_point_mismatch);
    }
    CHECK_THROWS_AS(jet_add(jet(0.0, {1, 1}), jet(0.0, {1, 1, 1})), error);
}

TEST_CASE("polynomial application")
{
    CHECK(coeffs_of(apply_poly(std::vector<double>{0, 0, 1}, jet::variable(0.5, 2))) ==
          std::vector<double>{0.25, 1.0, 1.0});
    const jet x(0.3, {0.3, 0.7, -0.2});
    CHECK(coeffs_of(apply_poly(std::vector<double>{0, 1}, x)) == coeffs_of(x));
    const auto z4 = apply_poly(std::vector<double>{0, 0, 0, 0, 1}, jet::variable(0.5, 2));
    CHECK(coeffs_of(z4) == std::vector<double>{0.0625, 0.5, 1.5});
}

TEST_CASE("iterated pgf")
{
    const auto sq = dist_spec::from_pmf({{2, 1.0}});
    const auto f2 = iterate_pgf(sq, 2, 0.5, 2);
    CHECK(f2.value() == 0.0625);
    CHECK(derivative(f2, 1) == 0.5);
    CHECK(derivative(f2, 2) == 3.0);
    CHECK(coeffs_of(iterate_pgf(sq, 0, 0.4, 3)) == coeffs_of(jet::variable(0.4, 3)));
    const auto f3 = iterate_pgf(sq, 3, 1.0, 1);
    CHECK(f3.value() == 1.0);
    CHECK(derivative(f3, 1) == 8.0);
}

TEST_CASE("derivative extraction")
{
    const auto z4 = apply_poly(std::vector<double>{0, 0, 0, 0, 1}, jet::variable(0.5, 4));
    CHECK(derivative(z4, 4) == 24.0);
    CHECK(derivative(z4, 0) == 0.0625);
    CHECK(derivative(apply_poly(std::vector<double>{0, 0, 1}, jet::variable(1.0, 1)), 1) == 2.0);
    try {
        derivative(z4, 5);
        FAIL("expected OrderExceeded");
    } catch (const error& e) {
        CHECK(e.kind() == error_kind::order_exceeded);
    }
}

TEST_CASE("jet derivatives match analytic and finite-difference derivatives")
{
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> coef(-1.0, 1.0), point(0.05, 0.95);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p(7);
        for (auto& c : p) {
            c = coef(rng);
        }
        const double z = point(rng);
        for (int j = 0; j <= 4; ++j) {
            const double got = derivative(apply_poly(p, jet::variable(z, j)), j);
            const auto dp = poly_derivative(p, j);
            const double exact = poly_eval(dp, z);
            CHECK(std::abs(got - exact) <= 1e-12 * std::max(1.0, std::abs(exact)));
            if (j >= 1) {
                const auto lower = poly_derivative(p, j - 1);
                const double h = 1e-5;
                const double fd = (poly_eval(lower, z + h) - poly_eval(lower, z - h)) / (2.0 * h);
                CHECK(std::abs(got - fd) <= 1e-6 * std::max(1.0, std::abs(exact)));
            }
        }
    }
}

TEST_CASE("iterate_pgf chain rule and composition consistency")
{
    const std::vector<raw_pmf> laws = {{{2, 1.0}}, {{1, 0.5}, {2, 0.5}}, {{1, 0.2}, {2, 0.3}, {4, 0.5}}};
    for (const auto& raw : laws) {
        const auto f = dist_spec::from_pmf(raw);
        const double mu = moments(f).mean;
        for (int n = 0; n <= 6; ++n) {
            const double d1 = derivative(iterate_pgf(f, n, 1.0, 1), 1);
            CHECK(std::abs(d1 - std::pow(mu, n)) <= 1e-9 * std::pow(mu, n));
        }
        for (double z : {0.1, 0.5, 0.9}) {
            for (int a = 0; a <= 3; ++a) {
                for (int b = 0; b <= 3; ++b) {
                    const auto whole = iterate_pgf(f, a + b, z, 4);
                    jet staged = iterate_pgf(f, b, z, 4);
                    for (int s = 0; s < a; ++s) {
                        staged = apply_poly(f.coefficients(), staged);
                    }
                    for (int j = 0; j <= 4; ++j) {
                        CHECK(std::abs(whole.coeffs()[j] - staged.coeffs()[j]) <=
                              1e-12 * std::max(1.0, std::abs(whole.coeffs()[j])));
                    }
                    double direct = z;
                    for (int s = 0; s < a + b; ++s) {
                        direct = pgf_eval(f, direct);
                    }
                    CHECK(std::abs(iterate_pgf(f, a + b, z, 0).value() - direct) <= 1e-15);
                }
            }
        }
    }
}
