#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "gwc/dist_model.hpp"
#include "gwc/rng.hpp"

namespace gwc {

struct sim_limits {
    /// Bound on materialized entities per replicate: individuals when the full
    /// ancestry is kept, founder lines in founder-count mode.
    std::uint64_t population_cap = 100'000'000;
    /// Worker threads for replicate loops; 0 means hardware concurrency.
    unsigned threads = 0;

    /// Defaults overridden by GWC_POP_CAP and GWC_THREADS when set.
    static sim_limits from_environment();
};

enum class founder_kind : std::uint8_t { native, immigrant };

/// A native founder is individual `index` of the tracked generation; an
/// immigrant founder is immigrant `index` arriving at `generation`.
struct founder_id {
    founder_kind kind;
    int generation;
    std::uint64_t index;

    bool operator==(const founder_id&) const = default;
};

struct founder_count {
    founder_id id;
    std::uint64_t count;
};

/// Generation-n population partitioned by founder line: the N_m individuals of
/// generation m plus every immigrant arriving at generations m..n-1.
struct genealogy_state {
    int generation = 0;
    int tracked_from = 0;
    std::vector<founder_count> founders;
    /// I_k for k = 0..n-1.
    std::vector<std::uint64_t> immigration_log;
    /// N_m, the native population of the tracked generation.
    std::uint64_t tracked_natives = 0;

    std::uint64_t population() const;
};

/// Founder-count simulation of generations 0..n tracked from level m.
genealogy_state simulate(const model_spec& model, int n, int track_from, std::uint64_t seed,
                         const sim_limits& limits = {});
genealogy_state simulate(const model_spec& model, int n, int track_from, philox4x32& rng,
                         const sim_limits& limits = {});

/// Individual-level realization keeping every parent link.
class full_genealogy {
public:
    int generations() const noexcept { return static_cast<int>(natives_.size()) - 1; }
    /// N_t, t = 0..n.
    std::uint64_t natives(int t) const { return natives_.at(t); }
    /// I_t, t = 0..n-1.
    std::uint64_t immigrants(int t) const { return immigrants_.at(t); }
    /// Parent of individual j of generation t >= 1, as an index into the
    /// reproducers of generation t-1 (natives first, then that generation's immigrants).
    std::uint32_t parent(int t, std::uint64_t j) const { return parents_.at(t)[j]; }

    /// Founder counts at generation n for tracking level m.
    genealogy_state founder_state(int m) const;

private:
    friend full_genealogy simulate_full(const model_spec&, int, philox4x32&, const sim_limits&);

    std::vector<std::uint64_t> natives_;
    std::vector<std::uint64_t> immigrants_;
    std::vector<std::vector<std::uint32_t>> parents_;
};

full_genealogy simulate_full(const model_spec& model, int n, philox4x32& rng, const sim_limits& limits = {});
full_genealogy simulate_full(const model_spec& model, int n, std::uint64_t seed, const sim_limits& limits = {});

/// [sum of (count)_i over founder lines] / (N_n)_i for the state's tracking level.
double quenched_prob(const genealogy_state& state, int i);
/// Same quantity for level m on a full realization.
double quenched_prob(const full_genealogy& tree, int i, int m);

/// Draws i distinct generation-n individuals and returns the latest generation
/// holding a common ancestor (an individual or an immigrant arriving there),
/// or nullopt when their lines end at distinct immigrants.
std::optional<int> sample_coalescence(const full_genealogy& tree, int i, philox4x32& rng);

struct mc_estimate {
    double mean;
    double std_error;
    std::uint64_t replicates;
    std::uint64_t seed;
};

/// Mean and standard error of per-replicate values, summed pairwise in index order.
mc_estimate summarize(const std::vector<double>& values, std::uint64_t seed);

/// Runs body(r) for r = 0..replicates-1 on up to limits.threads workers and
/// returns the values in replicate order.
std::vector<double> run_replicates(std::uint64_t replicates, const sim_limits& limits,
                                   const std::function<double(std::uint64_t)>& body);

/// Average of quenched_prob over independent trees tracked from m.
mc_estimate annealed_estimate(const model_spec& model, int n, int i, int m, std::uint64_t replicates,
                              std::uint64_t seed, const sim_limits& limits = {});

/// Fraction of independent trees where one uniform i-sample has m <= X < inf.
mc_estimate direct_sample_estimate(const model_spec& model, int n, int i, int m, std::uint64_t replicates,
                                   std::uint64_t seed, const sim_limits& limits = {});

struct martingale_sample {
    double w;
    double x;
    double v;
    int n;
};

/// W_n = (line of the first generation-0 immigrant)/mu^n, X_n = N_n/mu^n and
/// V_n = sum over immigrant lines of size^2 / mu^(2n).
martingale_sample sample_martingales(const model_spec& model, int n, philox4x32& rng,
                                     const sim_limits& limits = {});
martingale_sample sample_martingales(const model_spec& model, int n, std::uint64_t seed,
                                     const sim_limits& limits = {});

/// E(X_n) = lambda mu (mu^n - 1) / (mu^n (mu - 1)).
double expected_x(const model_spec& model, int n);
/// E(V_n) = (lambda/mu^(2n)) (sigma^2/(mu-1) (mu(mu^(2n)-1)/(mu^2-1) - (mu^n-1)/(mu-1))
///          + mu^2 (mu^(2n)-1)/(mu^2-1)).
double expected_v(const model_spec& model, int n);

struct limit_estimate {
    mc_estimate estimate;
    int horizon_n;
    /// mu^-n, the order of the distance between horizon-n functionals and their limits.
    double horizon_remainder;
};

/// Monte Carlo value of E[(sum_{l<=N_m} W_l^2 + V) / (sum_{l<=N_m} W_l + X)^2]
/// with W_l, (X, V) independent horizon-n martingale samples and N_m drawn
/// from the process. For m = 0 this is E(V/X^2).
limit_estimate limit_law_estimate(const model_spec& model, int m, int horizon_n, std::uint64_t replicates,
                                  std::uint64_t seed, const sim_limits& limits = {});

} // namespace gwc
