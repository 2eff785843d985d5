#include "gwc/exact_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gwc/errors.hpp"
#include "gwc/jet.hpp"
#include "gwc/simd/kernels.hpp"

namespace gwc {

namespace {

constexpr double probability_slack = 1e-9;
constexpr double pmf_clamp_floor = -1e-10;

void require_unit_interval(double z)
{
    if (!(z >= 0.0 && z <= 1.0)) {
        throw error(error_kind::domain_error, "integration variable outside [0,1]");
    }
}

// Evaluates, at a batch of points, the immigrant-term integrands k = 1..immigrant_terms
// followed by the first-term integrands for each requested m. Products are
// accumulated as sums of logarithms; every factor is nonnegative.
class integrand_bundle {
public:
    integrand_bundle(const model_spec& model, int n, int i, int immigrant_terms, std::vector<int> first_terms)
        : model_(model), n_(n), i_(i), immigrant_terms_(immigrant_terms), first_terms_(std::move(first_terms)),
          kernels_(simd::active_kernels()), i_factorial_(factorial(i))
    {
        if (n < 1 || i < 1 || i > simd::max_jet_order) {
            throw error(error_kind::invalid_argument, "integrand needs n >= 1 and 1 <= i <= " +
                                                          std::to_string(simd::max_jet_order));
        }
        if (immigrant_terms < 0 || immigrant_terms > n) {
            throw error(error_kind::invalid_argument, "immigrant term index out of range");
        }
        for (int m : first_terms_) {
            if (m < 1 || m >= n) {
                throw error(error_kind::invalid_argument, "first-term index m must satisfy 1 <= m < n");
            }
        }
    }

    int components() const { return immigrant_terms_ + static_cast<int>(first_terms_.size()); }

    void operator()(std::span<const double> z, std::span<double> out) const
    {
        const std::size_t lanes = z.size();
        const int order = i_;
        const auto f = model_.offspring.coefficients();
        const auto g = model_.immigration.coefficients();

        // value[t], top derivative[t], log g[t], log g'[t] for t = 1..n (index t-1)
        std::vector<double> value(n_ * lanes), top(n_ * lanes), log_g(n_ * lanes), log_gp(n_ * lanes);
        std::vector<double> cur((order + 1) * lanes, 0.0), next((order + 1) * lanes);
        for (std::size_t p = 0; p < lanes; ++p) {
            cur[p] = z[p];
            if (order >= 1) {
                cur[lanes + p] = 1.0;
            }
        }
        std::vector<double> lin(2 * lanes), gout(2 * lanes);
        for (int t = 0; t < n_; ++t) {
            kernels_.compose_poly(f, cur.data(), next.data(), order, lanes);
            std::swap(cur, next);
            for (std::size_t p = 0; p < lanes; ++p) {
                value[t * lanes + p] = cur[p];
                top[t * lanes + p] = cur[order * lanes + p] * i_factorial_;
                lin[p] = cur[p];
                lin[lanes + p] = 1.0;
            }
            kernels_.compose_poly(g, lin.data(), gout.data(), 1, lanes);
            for (std::size_t p = 0; p < lanes; ++p) {
                log_g[t * lanes + p] = std::log(gout[p]);
                log_gp[t * lanes + p] = std::log(gout[lanes + p]);
            }
        }

        // prefix[t] = sum_{l<=t} log g(f_l), suffix[t] = sum_{l>=t} log g(f_l), t = 0..n+1
        std::vector<double> prefix((n_ + 2) * lanes, 0.0), suffix((n_ + 2) * lanes, 0.0);
        for (int t = 1; t <= n_; ++t) {
            for (std::size_t p = 0; p < lanes; ++p) {
                prefix[t * lanes + p] = prefix[(t - 1) * lanes + p] + log_g[(t - 1) * lanes + p];
            }
        }
        for (int t = n_; t >= 1; --t) {
            for (std::size_t p = 0; p < lanes; ++p) {
                suffix[t * lanes + p] = suffix[(t + 1) * lanes + p] + log_g[(t - 1) * lanes + p];
            }
        }

        std::vector<double> base(lanes);
        for (std::size_t p = 0; p < lanes; ++p) {
            base[p] = i_ == 1 ? 0.0 : (i_ - 1) * std::log1p(-z[p]);
        }

        for (int k = 1; k <= immigrant_terms_; ++k) {
            double* row = out.data() + (k - 1) * lanes;
            for (std::size_t p = 0; p < lanes; ++p) {
                const double log_value = base[p] + std::log(top[(k - 1) * lanes + p]) +
                                         log_gp[(k - 1) * lanes + p] + prefix[(k - 1) * lanes + p] +
                                         suffix[(k + 1) * lanes + p];
                row[p] = std::exp(log_value);
            }
        }

        // phi_m'(y) at y = f_{n-m}(z) by an order-1 jet through phi_m = prod g(f_s(y)).
        std::vector<double> x(2 * lanes), fx(2 * lanes), gx(2 * lanes), acc(2 * lanes), prod(2 * lanes);
        for (std::size_t c = 0; c < first_terms_.size(); ++c) {
            const int m = first_terms_[c];
            const int outer = n_ - m;
            for (std::size_t p = 0; p < lanes; ++p) {
                x[p] = value[(outer - 1) * lanes + p];
                x[lanes + p] = 1.0;
                acc[p] = 1.0;
                acc[lanes + p] = 0.0;
            }
            for (int s = 1; s <= m; ++s) {
                kernels_.compose_poly(f, x.data(), fx.data(), 1, lanes);
                std::swap(x, fx);
                kernels_.compose_poly(g, x.data(), gx.data(), 1, lanes);
                kernels_.jet_mul(acc.data(), gx.data(), prod.data(), 1, lanes);
                std::swap(acc, prod);
            }
            double* row = out.data() + (immigrant_terms_ + c) * lanes;
            for (std::size_t p = 0; p < lanes; ++p) {
                const double log_value = base[p] + std::log(top[(outer - 1) * lanes + p]) +
                                         std::log(acc[lanes + p]) + prefix[outer * lanes + p];
                row[p] = std::exp(log_value);
            }
        }
    }

private:
    const model_spec& model_;
    int n_;
    int i_;
    int immigrant_terms_;
    std::vector<int> first_terms_;
    const simd::kernel_table& kernels_;
    double i_factorial_;
};

quadrature_result integrate(const integrand_bundle& bundle, const quadrature_options& options)
{
    return integrate_unit_interval(
        bundle.components(), [&](std::span<const double> z, std::span<double> out) { bundle(z, out); }, options);
}

double evaluate_single(const integrand_bundle& bundle, int component, double z)
{
    const double point[1] = {z};
    std::vector<double> out(bundle.components());
    bundle(point, out);
    return out[component];
}

// Pulls a probability computed by quadrature back into [0,1].
double clamp_probability(double p, int& clamped)
{
    if (p < -probability_slack || p > 1.0 + probability_slack || !std::isfinite(p)) {
        throw error(error_kind::quadrature_failure, "probability " + std::to_string(p) + " outside [0,1]");
    }
    if (p < 0.0 || p > 1.0) {
        ++clamped;
        return std::clamp(p, 0.0, 1.0);
    }
    return p;
}

} // namespace

coalescence_query make_query(model_spec model, int n, int i)
{
    if (i < 2 || n < i) {
        throw error(error_kind::invalid_argument,
                    "need n >= i >= 2, got n=" + std::to_string(n) + " i=" + std::to_string(i));
    }
    if (i > simd::max_jet_order) {
        throw error(error_kind::invalid_argument, "sample size above " + std::to_string(simd::max_jet_order));
    }
    return {std::move(model), n, i};
}

double integrand_tail(const model_spec& model, int n, int i, int m, double z)
{
    require_unit_interval(z);
    if (m < 0 || m >= n) {
        throw error(error_kind::invalid_argument, "need 0 <= m < n");
    }
    if (m == 0) {
        return 0.0;
    }
    const integrand_bundle bundle(model, n, i, 0, {m});
    return evaluate_single(bundle, 0, z);
}

double integrand_immigrant_term(const model_spec& model, int n, int i, int k, double z)
{
    require_unit_interval(z);
    if (k < 1 || k > n) {
        throw error(error_kind::invalid_argument, "need 1 <= k <= n");
    }
    const integrand_bundle bundle(model, n, i, k, {});
    return evaluate_single(bundle, k - 1, z);
}

double prob_infinity(const coalescence_query& q, const quadrature_options& options)
{
    const integrand_bundle bundle(q.model, q.n, q.i, q.n, {});
    const auto res = integrate(bundle, options);
    double sum = 0.0;
    for (double v : res.values) {
        sum += v;
    }
    int clamped = 0;
    return clamp_probability(1.0 - sum / factorial(q.i - 1), clamped);
}

double prob_tail(const coalescence_query& q, int m, const quadrature_options& options)
{
    if (m < 0 || m >= q.n) {
        throw error(error_kind::invalid_argument, "need 0 <= m < n");
    }
    std::vector<int> first;
    if (m > 0) {
        first.push_back(m);
    }
    const integrand_bundle bundle(q.model, q.n, q.i, q.n - m, first);
    const auto res = integrate(bundle, options);
    double sum = 0.0;
    for (int k = 0; k < q.n - m; ++k) {
        sum += res.values[k];
    }
    if (m > 0) {
        sum += res.values[q.n - m];
    }
    int clamped = 0;
    return clamp_probability(sum / factorial(q.i - 1), clamped);
}

coalescence_distribution full_distribution(const coalescence_query& q, const quadrature_options& options)
{
    const int n = q.n;
    std::vector<int> first;
    for (int m = 1; m < n; ++m) {
        first.push_back(m);
    }
    const integrand_bundle bundle(q.model, n, q.i, n, first);
    const auto res = integrate(bundle, options);
    const double gamma_i = factorial(q.i - 1);

    // cumulative[k] = sum of immigrant integrals 1..k
    std::vector<double> cumulative(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
        cumulative[k] = cumulative[k - 1] + res.values[k - 1];
    }

    coalescence_distribution out{n, q.i, std::vector<double>(n), std::vector<double>(n), 0.0, res.error, 0};
    for (int m = 0; m < n; ++m) {
        const double first_term = m == 0 ? 0.0 : res.values[n + m - 1];
        out.tail[m] = clamp_probability((first_term + cumulative[n - m]) / gamma_i, out.clamped_entries);
    }
    out.p_infinity = clamp_probability(1.0 - cumulative[n] / gamma_i, out.clamped_entries);
    for (int m = 0; m < n; ++m) {
        double p = out.tail[m] - (m + 1 < n ? out.tail[m + 1] : 0.0);
        if (p < 0.0) {
            if (p < pmf_clamp_floor) {
                throw error(error_kind::quadrature_failure,
                            "tail not monotone at m=" + std::to_string(m) + " (pmf " + std::to_string(p) + ")");
            }
            p = 0.0;
            ++out.clamped_entries;
        }
        out.pmf[m] = p;
    }
    return out;
}

double falling_factorial_expectation(std::span<const double> phi, std::span<const double> h, int n,
                                     std::span<const int> partition, const quadrature_options& options)
{
    const int j = static_cast<int>(partition.size());
    if (phi.empty() || h.empty() || j < 1 || j > n) {
        throw error(error_kind::invalid_argument, "need nonempty pgfs and 1 <= j <= n");
    }
    int i = 0;
    int order = 0;
    for (int part : partition) {
        if (part < 1) {
            throw error(error_kind::invalid_argument, "partition entries must be >= 1");
        }
        i += part;
        order = std::max(order, part);
    }
    if (order > simd::max_jet_order) {
        throw error(error_kind::invalid_argument, "partition entry above jet order limit");
    }
    for (double c : phi) {
        if (!(c >= 0.0)) {
            throw error(error_kind::bad_pmf, "pgf coefficients must be nonnegative");
        }
    }
    for (double c : h) {
        if (!(c >= 0.0)) {
            throw error(error_kind::bad_pmf, "pgf coefficients must be nonnegative");
        }
    }
    const auto& kernels = simd::active_kernels();
    const double gamma_i = factorial(i - 1);

    auto integrand = [&](std::span<const double> z, std::span<double> out) {
        const std::size_t lanes = z.size();
        std::vector<double> in((order + 1) * lanes, 0.0), jet_out((order + 1) * lanes);
        std::vector<double> hin(lanes), hout(lanes);
        for (std::size_t p = 0; p < lanes; ++p) {
            in[p] = z[p];
            if (order >= 1) {
                in[lanes + p] = 1.0;
            }
            hin[p] = z[p];
        }
        kernels.compose_poly(phi, in.data(), jet_out.data(), order, lanes);
        kernels.compose_poly(h, hin.data(), hout.data(), 0, lanes);
        for (std::size_t p = 0; p < lanes; ++p) {
            double v = std::pow(1.0 - z[p], i - 1) * std::pow(jet_out[p], n - j) * hout[p];
            for (int part : partition) {
                v *= jet_out[part * lanes + p] * factorial(part);
            }
            out[p] = v / gamma_i;
        }
    };
    return integrate_unit_interval(1, integrand, options).values[0];
}

} // namespace gwc
