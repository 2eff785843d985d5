#include "gwc/oracles.hpp"

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "gwc/errors.hpp"

namespace gwc::oracles {

namespace {

constexpr int binary_random_max_n = 20;
constexpr std::uint64_t wide_sum_budget = std::uint64_t{1} << 34;

void require_lnary(const lnary_params& p)
{
    if (p.l < 2 || p.k < 1) {
        throw error(error_kind::invalid_argument, "l-ary oracle needs l >= 2 and k >= 1");
    }
}

void require_sample(int n, int m, int i)
{
    if (i < 2 || n < i || m < 0 || m >= n) {
        throw error(error_kind::invalid_argument, "need n >= i >= 2 and 0 <= m < n");
    }
}

mpz_class power(long base, unsigned long exponent)
{
    mpz_class r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base), exponent);
    return r;
}

mpz_class falling(const mpz_class& x, int i)
{
    mpz_class r = 1;
    for (int k = 0; k < i; ++k) {
        r *= x - k;
    }
    return r;
}

mpz_class binomial(int n, int k)
{
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

mpz_class factorial(int n)
{
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

// sum_{s=0}^{i-1} (-1)^(i-s-1) C(i-1,s) * top / ((i-1)! (k l (1-l^n) - s (1-l)))
mpq_class alternating_sum(const lnary_params& p, int n, int i, const mpz_class& top)
{
    const mpz_class l = p.l;
    const mpz_class base = p.k * l * (1 - power(p.l, n));
    const mpz_class fact = factorial(i - 1);
    mpq_class total = 0;
    for (int s = 0; s < i; ++s) {
        const int sign = ((i - s - 1) % 2 == 0) ? 1 : -1;
        mpq_class term(sign * binomial(i - 1, s) * top, fact * (base - s * (1 - l)));
        term.canonicalize();
        total += term;
    }
    return total;
}

// Neumaier compensated accumulator.
class compensated_sum {
public:
    void add(long double x)
    {
        const long double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    long double value() const { return sum_ + carry_; }

private:
    long double sum_ = 0.0L;
    long double carry_ = 0.0L;
};

long double falling_ld(long double x, int i)
{
    long double r = 1.0L;
    for (int k = 0; k < i; ++k) {
        r *= x - k;
    }
    return r;
}

long double binomial_ld(int n, int k)
{
    long double r = 1.0L;
    for (int j = 1; j <= k; ++j) {
        r = r * (n - k + j) / j;
    }
    return r;
}

double binary_random_sum(int n, int m, int i, bool wide_range)
{
    require_sample(n, m, i);
    if (n > binary_random_max_n) {
        throw error(error_kind::resource_limit, "binary random oracle supports n <= 20");
    }
    if (wide_range) {
        std::uint64_t work = 0;
        for (int l = 1; l <= m; ++l) {
            work += (std::uint64_t{1} << (n - m)) * (std::uint64_t{1} << (l - 1)) * (std::uint64_t{1} << (n - l));
        }
        if (work * i > wide_sum_budget) {
            throw error(error_kind::resource_limit, "wide-range sums exceed the summation budget");
        }
    }
    using i64 = std::int64_t;
    const auto pow2 = [](int e) { return i64{1} << e; };
    const long double fact = std::tgamma(static_cast<long double>(i));
    std::vector<long double> sign_binom(i);
    for (int s = 0; s < i; ++s) {
        sign_binom[s] = binomial_ld(i - 1, s) * (((i - 1 - s) % 2 == 0) ? 1.0L : -1.0L) / fact;
    }

    compensated_sum total;
    const long double ff_outer = falling_ld(std::ldexp(1.0L, n - m), i);
    for (int l = 1; l <= m; ++l) {
        const i64 inner = wide_range ? pow2(n - l) : pow2(m - l);
        const long double w1 = std::ldexp(1.0L, -n + l + 1);
        const long double w2 = std::ldexp(1.0L, -n + l);
        const i64 shift = pow2(n - m + l);
        for (i64 j = 0; j < pow2(n - m); ++j) {
            for (i64 h = 0; h < pow2(l - 1); ++h) {
                for (i64 kk = 0; kk < inner; ++kk) {
                    long double group = 0.0L;
                    for (int s = 0; s < i; ++s) {
                        const i64 a = pow2(n + 1) - 2 - s + 2 * j + h * pow2(n - m + 1) + kk * pow2(n - m + l + 1);
                        const long double c = sign_binom[s] * ff_outer;
                        group += c * w1 / static_cast<long double>(a + shift) + c * w2 / static_cast<long double>(a);
                    }
                    total.add(group);
                }
            }
        }
    }
    for (int k = 1; k <= n - m; ++k) {
        const long double ff = falling_ld(std::ldexp(1.0L, k), i);
        const long double w3 = std::ldexp(1.0L, -n + 1);
        const long double w4 = std::ldexp(1.0L, -n);
        for (i64 j = 0; j < pow2(k - 1); ++j) {
            for (i64 l = 0; l < pow2(n - k); ++l) {
                long double group = 0.0L;
                for (int s = 0; s < i; ++s) {
                    const i64 b = pow2(n + 1) + l * pow2(k + 1) + 2 * j - 2 - s;
                    const long double c = sign_binom[s] * ff;
                    group += c * w3 / static_cast<long double>(b + pow2(k)) + c * w4 / static_cast<long double>(b);
                }
                total.add(group);
            }
        }
    }
    return static_cast<double>(total.value());
}

class tree_enumerator {
public:
    tree_enumerator(const model_spec& model, int n, int i, int m, std::uint64_t budget)
        : model_(model), n_(n), i_(i), m_(m), budget_(budget)
    {
    }

    long double run()
    {
        visit(0, {}, 1.0L, 0);
        return total_;
    }

private:
    // natives: founder label of each native individual of generation t (-1 before level m).
    void visit(int t, std::vector<long> natives, long double prob, long next_label)
    {
        charge(1);
        if (t == n_) {
            total_ += prob * quenched(natives);
            return;
        }
        if (t == m_) {
            for (std::size_t j = 0; j < natives.size(); ++j) {
                natives[j] = next_label++;
            }
        }
        for (const auto& arrival : model_.immigration.pmf()) {
            std::vector<long> reproducers = natives;
            long label = next_label;
            for (std::uint32_t a = 0; a < arrival.value; ++a) {
                reproducers.push_back(t >= m_ ? label++ : -1);
            }
            reproduce(t, reproducers, prob * arrival.prob, label);
        }
    }

    // Enumerates every offspring-count vector of the reproducers (odometer order).
    void reproduce(int t, const std::vector<long>& reproducers, long double prob, long next_label)
    {
        const auto support = model_.offspring.pmf();
        const std::size_t r = reproducers.size();
        std::vector<std::size_t> digit(r, 0);
        while (true) {
            long double p = prob;
            std::vector<long> children;
            for (std::size_t j = 0; j < r; ++j) {
                p *= support[digit[j]].prob;
                children.insert(children.end(), support[digit[j]].value, reproducers[j]);
            }
            visit(t + 1, std::move(children), p, next_label);
            std::size_t pos = 0;
            while (pos < r && ++digit[pos] == support.size()) {
                digit[pos++] = 0;
            }
            if (pos == r) {
                break;
            }
        }
    }

    long double quenched(const std::vector<long>& labels) const
    {
        const auto total = static_cast<long double>(labels.size());
        if (labels.size() < static_cast<std::size_t>(i_)) {
            throw error(error_kind::sample_too_large, "generation smaller than the sample");
        }
        std::map<long, long> counts;
        for (long label : labels) {
            ++counts[label];
        }
        long double numerator = 0.0L;
        for (const auto& [label, c] : counts) {
            numerator += falling_ld(static_cast<long double>(c), i_);
        }
        return numerator / falling_ld(total, i_);
    }

    void charge(std::uint64_t nodes)
    {
        visited_ += nodes;
        if (visited_ > budget_) {
            throw error(error_kind::resource_limit,
                        "tree enumeration exceeds the budget of " + std::to_string(budget_) + " nodes");
        }
    }

    const model_spec& model_;
    int n_;
    int i_;
    int m_;
    std::uint64_t budget_;
    std::uint64_t visited_ = 0;
    long double total_ = 0.0L;
};

} // namespace

model_spec lnary_model(const lnary_params& p)
{
    require_lnary(p);
    return validate({{p.l, 1.0}}, {{p.k, 1.0}});
}

double lnary_p_infinity(const lnary_params& p, int n, int i)
{
    require_lnary(p);
    require_sample(n, 0, i);
    mpq_class sum = 0;
    for (int t = 1; t <= n; ++t) {
        sum += alternating_sum(p, n, i, falling(power(p.l, t), i) * p.k * (1 - p.l));
    }
    return mpq_class(1 - sum).get_d();
}

double lnary_tail(const lnary_params& p, int n, int m, int i)
{
    require_lnary(p);
    require_sample(n, m, i);
    const mpz_class l = p.l;
    mpq_class sum = alternating_sum(p, n, i, falling(power(p.l, n - m), i) * p.k * l * (1 - power(p.l, m)));
    for (int t = 1; t <= n - m; ++t) {
        sum += alternating_sum(p, n, i, falling(power(p.l, t), i) * p.k * (1 - l));
    }
    return sum.get_d();
}

double lnary_pair_p_infinity(const lnary_params& p, int n)
{
    require_lnary(p);
    require_sample(n, 0, 2);
    const mpz_class l = p.l;
    const mpz_class k = p.k;
    const mpz_class ln = power(p.l, n);
    const mpz_class kl = k * l * (1 - ln);
    const mpq_class frac(k * (1 - l) * (l * l * (1 - ln * ln) - l * (l + 1) * (1 - ln)),
                         (1 + l) * (kl - (1 - l)) * kl);
    return mpq_class(1 - frac).get_d();
}

double lnary_pair_tail(const lnary_params& p, int n, int m)
{
    require_lnary(p);
    require_sample(n, m, 2);
    const mpz_class l = p.l;
    const mpz_class k = p.k;
    const mpz_class ln = power(p.l, n);
    const mpz_class lnm = power(p.l, n - m);
    const mpz_class kl = k * l * (1 - ln);
    mpq_class first(lnm * (lnm - 1) * (1 - power(p.l, m)) * (1 - l),
                    (k * l - k * power(p.l, n + 1) - (1 - l)) * (1 - ln));
    mpq_class second(k * (1 - l) * (l * l * (1 - lnm * lnm) - l * (l + 1) * (1 - lnm)),
                     (1 + l) * (kl - (1 - l)) * kl);
    first.canonicalize();
    second.canonicalize();
    return mpq_class(first + second).get_d();
}

double lnary_limit_p_infinity(const lnary_params& p)
{
    require_lnary(p);
    mpq_class r((1 + p.l) * p.k - (p.l - 1), (1 + p.l) * p.k);
    r.canonicalize();
    return r.get_d();
}

double lnary_limit_tail(const lnary_params& p, int m)
{
    require_lnary(p);
    if (m < 0) {
        throw error(error_kind::invalid_argument, "need m >= 0");
    }
    const mpz_class lm = power(p.l, m);
    const mpq_class inner = mpq_class(mpz_class(lm - 1), mpz_class(p.l)) + mpq_class(1, 1 + p.l);
    mpq_class r = mpq_class(mpz_class(p.l - 1), mpz_class(lm * lm * p.k)) * inner;
    r.canonicalize();
    return r.get_d();
}

model_spec binary_random_model()
{
    return validate({{2, 1.0}}, {{1, 0.5}, {2, 0.5}});
}

double binary_random_tail(int n, int m, int i)
{
    return binary_random_sum(n, m, i, false);
}

double binary_random_tail_wide_range(int n, int m, int i)
{
    return binary_random_sum(n, m, i, true);
}

double enumerate_exact(const model_spec& model, int n, int i, int m, std::uint64_t budget)
{
    require_sample(n, m, i);
    // Upper bound on the number of outcome histories, taken along the largest population path.
    const double offspring_choices = static_cast<double>(model.offspring.pmf().size());
    const double arrival_choices = static_cast<double>(model.immigration.pmf().size());
    double log_histories = 0.0;
    double largest = 0.0;
    for (int t = 0; t < n; ++t) {
        const double reproducers = largest + model.immigration.max_support();
        log_histories += std::log(arrival_choices) + reproducers * std::log(offspring_choices);
        largest = reproducers * model.offspring.max_support();
        if (log_histories > std::log(static_cast<double>(budget))) {
            throw error(error_kind::resource_limit,
                        "tree enumeration would visit more than " + std::to_string(budget) + " histories");
        }
    }
    tree_enumerator walker(model, n, i, m, budget);
    return static_cast<double>(walker.run());
}

} // namespace gwc::oracles
