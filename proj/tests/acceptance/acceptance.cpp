// Prints one PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "gwc/errors.hpp"
#include "gwc/exact_engine.hpp"
#include "gwc/genealogy.hpp"
#include "gwc/oracles.hpp"

using namespace gwc;

namespace {

struct cell {
    std::string label;
    coalescence_distribution dist;
};

struct verdict {
    bool pass = true;
    std::string detail;
};

// Grid cells from criteria 1-3, kept for the normalization check.
std::vector<cell> checked_cells;

std::string fmt(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

verdict lnary_grid()
{
    double worst = 0.0;
    int cells = 0;
    for (int l : {2, 3}) {
        for (int k : {1, 2}) {
            const oracles::lnary_params p{l, k};
            const auto model = oracles::lnary_model(p);
            for (int n = 2; n <= 8; ++n) {
                for (int i : {2, 3}) {
                    if (i > n) {
                        continue;
                    }
                    const auto d = full_distribution(make_query(model, n, i));
                    for (int m = 0; m < n; ++m) {
                        worst = std::max(worst, std::abs(d.tail[m] - oracles::lnary_tail(p, n, m, i)));
                        ++cells;
                    }
                    worst = std::max(worst, std::abs(d.p_infinity - oracles::lnary_p_infinity(p, n, i)));
                    checked_cells.push_back({"lnary", d});
                }
            }
        }
    }
    return {worst <= 1e-9, std::to_string(cells) + " cells, max |exact - closed form| = " + fmt(worst)};
}

verdict binary_random_grid()
{
    const auto model = oracles::binary_random_model();
    double worst = 0.0;
    int cells = 0;
    for (int n = 2; n <= 10; ++n) {
        for (int i : {2, 3}) {
            if (i > n) {
                continue;
            }
            const auto d = full_distribution(make_query(model, n, i));
            for (int m = 0; m < n; ++m) {
                worst = std::max(worst, std::abs(d.tail[m] - oracles::binary_random_tail(n, m, i)));
                ++cells;
            }
            checked_cells.push_back({"binary-random", d});
        }
    }
    return {worst <= 1e-9, std::to_string(cells) + " cells, max |exact - nested sum| = " + fmt(worst)};
}

verdict enumeration_bridge()
{
    const auto model = validate({{1, 0.5}, {2, 0.5}}, {{1, 1.0}});
    double worst = 0.0;
    for (int n : {2, 3}) {
        const auto d = full_distribution(make_query(model, n, 2));
        for (int m : {0, 1}) {
            worst = std::max(worst, std::abs(d.tail[m] - oracles::enumerate_exact(model, n, 2, m)));
        }
        checked_cells.push_back({"enumeration", d});
    }
    return {worst <= 1e-10, "4 cells, max |exact - enumeration| = " + fmt(worst)};
}

verdict hand_constants()
{
    const auto q = make_query(oracles::lnary_model({2, 1}), 2, 2);
    const double p_inf = prob_infinity(q);
    const double tail1 = prob_tail(q, 1);
    const double e1 = std::abs(p_inf - 8.0 / 15.0);
    const double e2 = std::abs(tail1 - 0.2);
    return {e1 <= 1e-12 && e2 <= 1e-12,
            "p_infinity error " + fmt(e1) + ", tail(1) error " + fmt(e2)};
}

verdict normalization()
{
    double worst_sum = 0.0;
    bool monotone = true;
    for (const auto& c : checked_cells) {
        worst_sum = std::max(worst_sum, std::abs(c.dist.tail[0] + c.dist.p_infinity - 1.0));
        for (std::size_t m = 1; m < c.dist.tail.size(); ++m) {
            monotone = monotone && c.dist.tail[m] <= c.dist.tail[m - 1];
        }
    }
    return {worst_sum <= 1e-9 && monotone && !checked_cells.empty(),
            std::to_string(checked_cells.size()) + " distributions, max |tail(0) + p_inf - 1| = " + fmt(worst_sum) +
                (monotone ? ", tails nonincreasing" : ", tail increases somewhere")};
}

verdict monte_carlo()
{
    const auto model = validate({{1, 0.5}, {2, 0.5}}, {{1, 0.5}, {2, 0.5}});
    const auto limits = sim_limits::from_environment();
    bool pass = true;
    std::string detail;
    for (int m : {0, 2}) {
        const double exact = prob_tail(make_query(model, 8, 2), m);
        const auto quenched = annealed_estimate(model, 8, 2, m, 100000, 20240 + m, limits);
        const auto direct = direct_sample_estimate(model, 8, 2, m, 100000, 40480 + m, limits);
        const double z_exact = std::abs(quenched.mean - exact) / quenched.std_error;
        const double combined = std::hypot(quenched.std_error, direct.std_error);
        const double z_direct = std::abs(direct.mean - quenched.mean) / combined;
        pass = pass && z_exact <= 3.0 && z_direct <= 3.0;
        detail += "m=" + std::to_string(m) + ": exact " + fmt(exact) + ", quenched " + fmt(quenched.mean) + " (" +
                  fmt(z_exact) + " SE), direct " + fmt(direct.mean) + " (" + fmt(z_direct) + " SE); ";
    }
    return {pass, detail};
}

verdict martingale_means()
{
    const auto limits = sim_limits::from_environment();
    const std::vector<std::pair<std::string, model_spec>> models = {
        {"unit immigration", validate({{1, 0.5}, {2, 0.5}}, {{1, 1.0}})},
        {"random immigration", validate({{1, 0.5}, {2, 0.5}}, {{1, 0.5}, {2, 0.5}})}};
    const int n = 10;
    const std::uint64_t replicates = 100000;
    bool pass = true;
    std::string detail;
    for (std::size_t which = 0; which < models.size(); ++which) {
        const auto& [name, model] = models[which];
        const std::uint64_t seed = 777 + which;
        std::vector<double> xs(replicates), vs(replicates);
        std::vector<char> strict(replicates);
        run_replicates(replicates, limits, [&](std::uint64_t r) {
            philox4x32 rng(seed, r);
            const auto s = sample_martingales(model, n, rng, limits);
            xs[r] = s.x;
            vs[r] = s.v;
            strict[r] = s.v < s.x * s.x;
            return 0.0;
        });
        const auto x = summarize(xs, seed);
        const auto v = summarize(vs, seed);
        std::uint64_t holds = 0;
        for (char c : strict) {
            holds += c != 0;
        }
        const double zx = std::abs(x.mean - expected_x(model, n)) / x.std_error;
        const double zv = std::abs(v.mean - expected_v(model, n)) / v.std_error;
        pass = pass && zx <= 3.0 && zv <= 3.0 && holds == replicates;
        detail += name + ": X " + fmt(x.mean) + " vs " + fmt(expected_x(model, n)) + " (" + fmt(zx) + " SE), V " +
                  fmt(v.mean) + " vs " + fmt(expected_v(model, n)) + " (" + fmt(zv) + " SE), V<X^2 on " +
                  std::to_string(holds) + "/" + std::to_string(replicates) + "; ";
    }
    return {pass, detail};
}

verdict limit_law()
{
    const auto limits = sim_limits::from_environment();
    bool pass = true;
    std::string detail;
    for (const oracles::lnary_params p : {oracles::lnary_params{2, 1}, oracles::lnary_params{3, 2}}) {
        const auto model = oracles::lnary_model(p);
        for (int m : {0, 1}) {
            const double target = oracles::lnary_limit_tail(p, m);
            const auto r = limit_law_estimate(model, m, 20, 100000, 99 + m, limits);
            const double gap = std::abs(r.estimate.mean - target);
            pass = pass && gap <= std::max(3.0 * r.estimate.std_error, 5e-3);
            detail += "(" + std::to_string(p.l) + "," + std::to_string(p.k) + ") m=" + std::to_string(m) +
                      ": estimate " + fmt(r.estimate.mean) + " vs " + fmt(target) + "; ";
        }
        const double finite = 1.0 - prob_infinity(make_query(model, 12, 2));
        const double gap = std::abs(finite - oracles::lnary_limit_tail(p, 0));
        pass = pass && gap <= 1e-3;
        detail += "n=12 exact 1 - p_inf off by " + fmt(gap) + "; ";
    }
    return {pass, detail};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<verdict()>>> criteria = {
        {"exact vs l-nary closed form", lnary_grid},
        {"exact vs binary random-immigration nested sums", binary_random_grid},
        {"exact vs tree enumeration", enumeration_bridge},
        {"hand-counted constants 8/15 and 1/5", hand_constants},
        {"normalization and monotonicity", normalization},
        {"Monte Carlo consistency", monte_carlo},
        {"martingale means and V < X^2", martingale_means},
        {"limit law and convergence in n", limit_law},
    };
    int failures = 0;
    for (std::size_t c = 0; c < criteria.size(); ++c) {
        const auto start = std::chrono::steady_clock::now();
        verdict v;
        try {
            v = criteria[c].second();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        failures += !v.pass;
        std::printf("criterion %zu: %s  %s [%s] (%.1fs)\n", c + 1, v.pass ? "PASS" : "FAIL", criteria[c].first.c_str(),
                    v.detail.c_str(), secs);
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
