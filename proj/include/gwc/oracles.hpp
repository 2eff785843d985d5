#pragma once

#include <cstdint>

#include "gwc/dist_model.hpp"

namespace gwc::oracles {

/// Deterministic l-ary offspring (f = z^l) with k immigrants per generation (g = z^k).
struct lnary_params {
    int l;
    int k;
};

/// Returns the validated model for f = z^l, g = z^k.
model_spec lnary_model(const lnary_params& p);

/// Closed-form P(X = inf) for general i, evaluated in exact rational arithmetic.
double lnary_p_infinity(const lnary_params& p, int n, int i);
/// Closed-form P(m <= X < inf) for general i, exact rational arithmetic.
double lnary_tail(const lnary_params& p, int n, int m, int i);

/// The i = 2 specializations and their n -> inf limits.
double lnary_pair_p_infinity(const lnary_params& p, int n);
double lnary_pair_tail(const lnary_params& p, int n, int m);
double lnary_limit_p_infinity(const lnary_params& p);
double lnary_limit_tail(const lnary_params& p, int m);

/// f = z^2, g = (z^2 + z)/2.
model_spec binary_random_model();

/// Nested-sum closed form for P(m <= X < inf) under binary_random_model(). The
/// first two blocks range over subsets of generations l+1..m, i.e. 2^(m-l)
/// values of the innermost index. Throws ResourceLimit for n > 20.
double binary_random_tail(int n, int m, int i);

/// Same sums with the innermost index running over 2^(n-l) values instead.
/// Disagrees with the exact distribution whenever m >= 1; kept for the
/// regression test that documents the difference.
double binary_random_tail_wide_range(int n, int m, int i);

/// Exact annealed P(m <= X < inf): enumerates every immigration count and
/// every individual's offspring count through generation n, weights each tree
/// by its probability and averages the quenched falling-factorial ratio.
/// Throws ResourceLimit when more than `budget` tree nodes would be visited.
double enumerate_exact(const model_spec& model, int n, int i, int m, std::uint64_t budget = 50'000'000);

} // namespace gwc::oracles
