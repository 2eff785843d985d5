#include "gwc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>

#include "gwc/errors.hpp"

namespace gwc {

namespace {

constexpr int rule_points = 16;

struct gl_rule {
    std::array<double, rule_points> nodes;
    std::array<double, rule_points> weights;
};

// Newton iteration on P_N from the Chebyshev-like initial guesses.
gl_rule make_rule()
{
    gl_rule rule{};
    const int n = rule_points;
    for (int k = 0; k < n; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        rule.nodes[k] = x;
        rule.weights[k] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const gl_rule& rule()
{
    static const gl_rule r = make_rule();
    return r;
}

struct interval {
    double a;
    double b;
    std::vector<double> fine;
    double error;
};

struct by_error {
    bool operator()(const interval& x, const interval& y) const
    {
        if (x.error != y.error) {
            return x.error < y.error;
        }
        return x.a > y.a;
    }
};

class evaluator {
public:
    evaluator(int components, const batch_integrand& integrand)
        : components_(components), integrand_(integrand), points_(3 * rule_points),
          values_(static_cast<std::size_t>(components) * 3 * rule_points)
    {
    }

    // Coarse rule on [a,b] against the rule on both halves.
    interval assess(double a, double b)
    {
        const auto& r = rule();
        const double m = 0.5 * (a + b);
        const double spans[3][2] = {{a, b}, {a, m}, {m, b}};
        for (int s = 0; s < 3; ++s) {
            const double c = 0.5 * (spans[s][0] + spans[s][1]);
            const double h = 0.5 * (spans[s][1] - spans[s][0]);
            for (int k = 0; k < rule_points; ++k) {
                points_[s * rule_points + k] = c + h * r.nodes[k];
            }
        }
        std::fill(values_.begin(), values_.end(), 0.0);
        integrand_(points_, values_);

        interval out{a, b, std::vector<double>(components_, 0.0), 0.0};
        const std::size_t stride = points_.size();
        for (int comp = 0; comp < components_; ++comp) {
            const double* v = values_.data() + comp * stride;
            double sums[3] = {0.0, 0.0, 0.0};
            for (int s = 0; s < 3; ++s) {
                for (int k = 0; k < rule_points; ++k) {
                    sums[s] += r.weights[k] * v[s * rule_points + k];
                }
            }
            const double coarse = 0.5 * (b - a) * sums[0];
            const double fine = 0.5 * (m - a) * sums[1] + 0.5 * (b - m) * sums[2];
            if (!std::isfinite(coarse) || !std::isfinite(fine)) {
                throw error(error_kind::quadrature_failure,
                            "non-finite integrand on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
            }
            // Differences at the rounding level of the fine estimate are noise.
            const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(fine);
            out.fine[comp] = fine;
            out.error = std::max(out.error, std::max(std::abs(coarse - fine), noise));
        }
        return out;
    }

private:
    int components_;
    const batch_integrand& integrand_;
    std::vector<double> points_;
    std::vector<double> values_;
};

} // namespace

std::span<const double> gauss_legendre_nodes() { return rule().nodes; }
std::span<const double> gauss_legendre_weights() { return rule().weights; }

quadrature_result integrate_unit_interval(int components, const batch_integrand& integrand,
                                          const quadrature_options& options)
{
    if (components < 1) {
        throw error(error_kind::invalid_argument, "need at least one integrand component");
    }
    evaluator eval(components, integrand);

    std::vector<double> breaks{0.0, 0.5};
    for (int j = 1; j < options.graded_panels; ++j) {
        breaks.push_back(1.0 - std::ldexp(1.0, -(j + 1)));
    }
    breaks.push_back(1.0);

    std::priority_queue<interval, std::vector<interval>, by_error> queue;
    double total_error = 0.0;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        auto iv = eval.assess(breaks[p], breaks[p + 1]);
        total_error += iv.error;
        queue.push(std::move(iv));
    }

    int count = static_cast<int>(queue.size());
    while (total_error > options.abs_tol) {
        if (count >= options.max_intervals) {
            throw error(error_kind::quadrature_failure,
                        "error estimate " + std::to_string(total_error) + " above tolerance after " +
                            std::to_string(count) + " intervals");
        }
        interval worst = queue.top();
        queue.pop();
        const double m = 0.5 * (worst.a + worst.b);
        if (!(m > worst.a && m < worst.b)) {
            throw error(error_kind::quadrature_failure, "interval cannot be bisected further");
        }
        auto left = eval.assess(worst.a, m);
        auto right = eval.assess(m, worst.b);
        total_error += left.error + right.error - worst.error;
        queue.push(std::move(left));
        queue.push(std::move(right));
        ++count;
    }

    // Sum in interval order so results do not depend on refinement history.
    std::vector<interval> done;
    done.reserve(queue.size());
    while (!queue.empty()) {
        done.push_back(queue.top());
        queue.pop();
    }
    std::sort(done.begin(), done.end(), [](const interval& x, const interval& y) { return x.a < y.a; });
    quadrature_result result{std::vector<double>(components, 0.0), 0.0, count};
    for (const auto& iv : done) {
        for (int comp = 0; comp < components; ++comp) {
            result.values[comp] += iv.fine[comp];
        }
        result.error += iv.error;
    }
    return result;
}

} // namespace gwc
