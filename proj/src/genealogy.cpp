#include "gwc/genealogy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>

#include "gwc/errors.hpp"
#include "gwc/simd/kernels.hpp"

namespace gwc {

namespace {

constexpr std::uint64_t count_ceiling = std::uint64_t{1} << 62;
// Below this many draws a sum of offspring counts is sampled term by term.
constexpr std::uint64_t direct_draw_limit = 32;

std::uint32_t draw_one(const dist_spec& d, philox4x32& rng)
{
    const auto pmf = d.pmf();
    if (pmf.size() == 1) {
        return pmf.front().value;
    }
    const double u = rng.uniform01();
    double cdf = 0.0;
    for (std::size_t j = 0; j + 1 < pmf.size(); ++j) {
        cdf += pmf[j].prob;
        if (u < cdf) {
            return pmf[j].value;
        }
    }
    return pmf.back().value;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b)
{
    if (a > count_ceiling - b) {
        throw error(error_kind::resource_limit, "population count exceeds 2^62");
    }
    return a + b;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b)
{
    if (b != 0 && a > count_ceiling / b) {
        throw error(error_kind::resource_limit, "population count exceeds 2^62");
    }
    return a * b;
}

// Total offspring of `count` independent parents: multinomial split of the
// parents over support values by successive conditional binomials.
std::uint64_t sum_of_offspring(const dist_spec& d, std::uint64_t count, philox4x32& rng)
{
    const auto pmf = d.pmf();
    if (pmf.size() == 1) {
        return checked_mul(count, pmf.front().value);
    }
    std::uint64_t total = 0;
    if (count <= direct_draw_limit) {
        for (std::uint64_t r = 0; r < count; ++r) {
            total += draw_one(d, rng);
        }
        return total;
    }
    std::uint64_t remaining = count;
    double remaining_mass = 1.0;
    for (std::size_t j = 0; j + 1 < pmf.size() && remaining > 0; ++j) {
        const double p = std::clamp(pmf[j].prob / remaining_mass, 0.0, 1.0);
        std::binomial_distribution<std::uint64_t> binom(remaining, p);
        const std::uint64_t hits = binom(rng);
        total = checked_add(total, checked_mul(hits, pmf[j].value));
        remaining -= hits;
        remaining_mass -= pmf[j].prob;
    }
    return checked_add(total, checked_mul(remaining, pmf.back().value));
}

std::uint64_t native_total(const model_spec& model, int generations, philox4x32& rng,
                           std::vector<std::uint64_t>* log)
{
    std::uint64_t natives = 0;
    for (int t = 0; t < generations; ++t) {
        const std::uint64_t arrivals = draw_one(model.immigration, rng);
        if (log) {
            log->push_back(arrivals);
        }
        natives = sum_of_offspring(model.offspring, checked_add(natives, arrivals), rng);
    }
    return natives;
}

void require_cap(std::uint64_t entities, const sim_limits& limits)
{
    if (entities > limits.population_cap) {
        throw error(error_kind::resource_limit,
                    std::to_string(entities) + " entities exceed the cap of " + std::to_string(limits.population_cap));
    }
}

double pairwise_sum(std::span<const double> x)
{
    if (x.size() <= 8) {
        double s = 0.0;
        for (double v : x) {
            s += v;
        }
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double falling_factorial_double(double c, int i)
{
    double r = 1.0;
    for (int k = 0; k < i; ++k) {
        r *= c - k;
    }
    return r;
}

std::uint64_t parse_env(const char* name, std::uint64_t fallback)
{
    const char* raw = std::getenv(name);
    if (!raw || !*raw) {
        return fallback;
    }
    try {
        std::size_t used = 0;
        const auto value = std::stoull(raw, &used);
        if (used != std::string(raw).size()) {
            throw std::invalid_argument(raw);
        }
        return value;
    } catch (const std::exception&) {
        throw error(error_kind::invalid_argument, std::string(name) + " must be a nonnegative integer");
    }
}

} // namespace

sim_limits sim_limits::from_environment()
{
    sim_limits limits;
    limits.population_cap = parse_env("GWC_POP_CAP", limits.population_cap);
    limits.threads = static_cast<unsigned>(parse_env("GWC_THREADS", limits.threads));
    return limits;
}

std::uint64_t genealogy_state::population() const
{
    std::uint64_t total = 0;
    for (const auto& f : founders) {
        total += f.count;
    }
    return total;
}

genealogy_state simulate(const model_spec& model, int n, int track_from, philox4x32& rng,
                         const sim_limits& limits)
{
    if (n < 1 || track_from < 0 || track_from >= n) {
        throw error(error_kind::invalid_argument, "need 0 <= m < n");
    }
    genealogy_state state;
    state.generation = n;
    state.tracked_from = track_from;
    state.tracked_natives = native_total(model, track_from, rng, &state.immigration_log);
    require_cap(state.tracked_natives, limits);

    state.founders.reserve(state.tracked_natives);
    for (std::uint64_t l = 0; l < state.tracked_natives; ++l) {
        state.founders.push_back({{founder_kind::native, track_from, l}, 1});
    }
    for (int t = track_from; t < n; ++t) {
        const std::uint64_t arrivals = draw_one(model.immigration, rng);
        state.immigration_log.push_back(arrivals);
        require_cap(state.founders.size() + arrivals, limits);
        for (std::uint64_t l = 0; l < arrivals; ++l) {
            state.founders.push_back({{founder_kind::immigrant, t, l}, 1});
        }
        for (auto& f : state.founders) {
            f.count = sum_of_offspring(model.offspring, f.count, rng);
        }
    }
    return state;
}

genealogy_state simulate(const model_spec& model, int n, int track_from, std::uint64_t seed,
                         const sim_limits& limits)
{
    philox4x32 rng(seed, 0);
    return simulate(model, n, track_from, rng, limits);
}

full_genealogy simulate_full(const model_spec& model, int n, philox4x32& rng, const sim_limits& limits)
{
    if (n < 1) {
        throw error(error_kind::invalid_argument, "need n >= 1");
    }
    full_genealogy tree;
    tree.natives_.push_back(0);
    tree.parents_.emplace_back();
    std::uint64_t stored = 0;
    for (int t = 0; t < n; ++t) {
        const std::uint64_t arrivals = draw_one(model.immigration, rng);
        tree.immigrants_.push_back(arrivals);
        const std::uint64_t reproducers = tree.natives_.back() + arrivals;
        require_cap(reproducers, limits);
        std::vector<std::uint32_t> parents;
        for (std::uint64_t r = 0; r < reproducers; ++r) {
            const std::uint32_t kids = draw_one(model.offspring, rng);
            stored += kids;
            require_cap(stored, limits);
            parents.insert(parents.end(), kids, static_cast<std::uint32_t>(r));
        }
        tree.natives_.push_back(parents.size());
        tree.parents_.push_back(std::move(parents));
    }
    return tree;
}

full_genealogy simulate_full(const model_spec& model, int n, std::uint64_t seed, const sim_limits& limits)
{
    philox4x32 rng(seed, 0);
    return simulate_full(model, n, rng, limits);
}

genealogy_state full_genealogy::founder_state(int m) const
{
    const int n = generations();
    if (m < 0 || m >= n) {
        throw error(error_kind::invalid_argument, "need 0 <= m < n");
    }
    genealogy_state state;
    state.generation = n;
    state.tracked_from = m;
    state.immigration_log = immigrants_;
    state.tracked_natives = natives_[m];

    // label[j] = founder index of reproducer j of the current generation
    std::vector<std::uint64_t> label;
    for (std::uint64_t j = 0; j < natives_[m]; ++j) {
        state.founders.push_back({{founder_kind::native, m, j}, 0});
        label.push_back(j);
    }
    for (int t = m; t < n; ++t) {
        for (std::uint64_t l = 0; l < immigrants_[t]; ++l) {
            label.push_back(state.founders.size());
            state.founders.push_back({{founder_kind::immigrant, t, l}, 0});
        }
        std::vector<std::uint64_t> next(natives_[t + 1]);
        for (std::uint64_t j = 0; j < next.size(); ++j) {
            next[j] = label[parents_[t + 1][j]];
        }
        label = std::move(next);
    }
    for (auto founder : label) {
        ++state.founders[founder].count;
    }
    return state;
}

double quenched_prob(const genealogy_state& state, int i)
{
    if (i < 1) {
        throw error(error_kind::invalid_argument, "sample size must be >= 1");
    }
    const std::uint64_t total = state.population();
    if (static_cast<std::uint64_t>(i) > total) {
        throw error(error_kind::sample_too_large,
                    "sample of " + std::to_string(i) + " from " + std::to_string(total) + " individuals");
    }
    std::vector<double> counts;
    counts.reserve(state.founders.size());
    for (const auto& f : state.founders) {
        counts.push_back(static_cast<double>(f.count));
    }
    const double numerator = simd::active_kernels().falling_factorial_sum(counts.data(), counts.size(), i);
    const double denominator = falling_factorial_double(static_cast<double>(total), i);
    return std::min(1.0, numerator / denominator);
}

double quenched_prob(const full_genealogy& tree, int i, int m)
{
    return quenched_prob(tree.founder_state(m), i);
}

std::optional<int> sample_coalescence(const full_genealogy& tree, int i, philox4x32& rng)
{
    const int n = tree.generations();
    const std::uint64_t population = tree.natives(n);
    if (i < 2) {
        throw error(error_kind::invalid_argument, "coalescence needs at least two individuals");
    }
    if (static_cast<std::uint64_t>(i) > population) {
        throw error(error_kind::sample_too_large,
                    "sample of " + std::to_string(i) + " from " + std::to_string(population) + " individuals");
    }
    // Floyd's algorithm for i distinct indices out of population.
    std::vector<std::uint64_t> lines;
    std::unordered_set<std::uint64_t> chosen;
    for (std::uint64_t j = population - i; j < population; ++j) {
        std::uniform_int_distribution<std::uint64_t> pick(0, j);
        const std::uint64_t candidate = pick(rng);
        const std::uint64_t taken = chosen.insert(candidate).second ? candidate : j;
        if (taken == j) {
            chosen.insert(j);
        }
        lines.push_back(taken);
    }

    for (int t = n; t >= 1; --t) {
        bool all_same = true;
        bool hit_immigrant = false;
        for (auto& line : lines) {
            line = tree.parent(t, line);
            all_same = all_same && line == lines.front();
            hit_immigrant = hit_immigrant || line >= tree.natives(t - 1);
        }
        if (all_same) {
            return t - 1;
        }
        if (hit_immigrant) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

mc_estimate summarize(const std::vector<double>& values, std::uint64_t seed)
{
    if (values.empty()) {
        throw error(error_kind::invalid_argument, "need at least one replicate");
    }
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const auto r = static_cast<double>(values.size());
    if (*lo == *hi) {
        return {*lo, 0.0, values.size(), seed};
    }
    const double mean = pairwise_sum(values) / r;
    std::vector<double> sq(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
        sq[j] = (values[j] - mean) * (values[j] - mean);
    }
    const double var = values.size() > 1 ? pairwise_sum(sq) / (r - 1.0) : 0.0;
    return {mean, std::sqrt(var / r), values.size(), seed};
}

std::vector<double> run_replicates(std::uint64_t replicates, const sim_limits& limits,
                                   const std::function<double(std::uint64_t)>& body)
{
    std::vector<double> values(replicates);
    unsigned workers = limits.threads ? limits.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(replicates, 1)));
    if (workers <= 1) {
        for (std::uint64_t r = 0; r < replicates; ++r) {
            values[r] = body(r);
        }
        return values;
    }
    std::vector<std::exception_ptr> failures(workers);
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (replicates + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                const std::uint64_t begin = w * chunk;
                const std::uint64_t end = std::min(replicates, begin + chunk);
                for (std::uint64_t r = begin; r < end; ++r) {
                    values[r] = body(r);
                }
            } catch (...) {
                failures[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }
    return values;
}

mc_estimate annealed_estimate(const model_spec& model, int n, int i, int m, std::uint64_t replicates,
                              std::uint64_t seed, const sim_limits& limits)
{
    const auto values = run_replicates(replicates, limits, [&](std::uint64_t r) {
        philox4x32 rng(seed, r);
        return quenched_prob(simulate(model, n, m, rng, limits), i);
    });
    return summarize(values, seed);
}

mc_estimate direct_sample_estimate(const model_spec& model, int n, int i, int m, std::uint64_t replicates,
                                   std::uint64_t seed, const sim_limits& limits)
{
    if (m < 0 || m >= n) {
        throw error(error_kind::invalid_argument, "need 0 <= m < n");
    }
    const auto values = run_replicates(replicates, limits, [&](std::uint64_t r) {
        philox4x32 rng(seed, r);
        const auto tree = simulate_full(model, n, rng, limits);
        const auto x = sample_coalescence(tree, i, rng);
        return x && *x >= m ? 1.0 : 0.0;
    });
    return summarize(values, seed);
}

martingale_sample sample_martingales(const model_spec& model, int n, philox4x32& rng, const sim_limits& limits)
{
    const auto state = simulate(model, n, 0, rng, limits);
    std::vector<double> counts;
    counts.reserve(state.founders.size());
    double first_line = 0.0;
    for (const auto& f : state.founders) {
        counts.push_back(static_cast<double>(f.count));
        if (f.id == founder_id{founder_kind::immigrant, 0, 0}) {
            first_line = static_cast<double>(f.count);
        }
    }
    const auto sums = simd::active_kernels().power_sums(counts.data(), counts.size());
    const double scale = std::pow(model.mu, n);
    return {first_line / scale, sums.sum / scale, sums.sum_squares / (scale * scale), n};
}

martingale_sample sample_martingales(const model_spec& model, int n, std::uint64_t seed, const sim_limits& limits)
{
    philox4x32 rng(seed, 0);
    return sample_martingales(model, n, rng, limits);
}

double expected_x(const model_spec& model, int n)
{
    const double mu = model.mu;
    const double mun = std::pow(mu, n);
    return model.lambda * mu * (mun - 1.0) / (mun * (mu - 1.0));
}

double expected_v(const model_spec& model, int n)
{
    const double mu = model.mu;
    const double mun = std::pow(mu, n);
    const double mu2n = mun * mun;
    const double geometric_sq = (mu2n - 1.0) / (mu * mu - 1.0);
    return model.lambda / mu2n *
           (model.sigma2 / (mu - 1.0) * (mu * geometric_sq - (mun - 1.0) / (mu - 1.0)) + mu * mu * geometric_sq);
}

limit_estimate limit_law_estimate(const model_spec& model, int m, int horizon_n, std::uint64_t replicates,
                                  std::uint64_t seed, const sim_limits& limits)
{
    if (m < 0 || horizon_n < 1) {
        throw error(error_kind::invalid_argument, "need m >= 0 and horizon n >= 1");
    }
    const double scale = std::pow(model.mu, horizon_n);
    const auto values = run_replicates(replicates, limits, [&](std::uint64_t r) {
        philox4x32 rng(seed, r);
        const std::uint64_t natives = native_total(model, m, rng, nullptr);
        require_cap(natives, limits);
        double sum_w = 0.0;
        double sum_w2 = 0.0;
        for (std::uint64_t l = 0; l < natives; ++l) {
            std::uint64_t line = 1;
            for (int t = 0; t < horizon_n; ++t) {
                line = sum_of_offspring(model.offspring, line, rng);
            }
            const double w = static_cast<double>(line) / scale;
            sum_w += w;
            sum_w2 += w * w;
        }
        const auto mart = sample_martingales(model, horizon_n, rng, limits);
        const double denom = sum_w + mart.x;
        return (sum_w2 + mart.v) / (denom * denom);
    });
    return {summarize(values, seed), horizon_n, 1.0 / scale};
}

} // namespace gwc
