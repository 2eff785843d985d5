#pragma once

#include <span>
#include <vector>

#include "gwc/dist_model.hpp"
#include "gwc/quadrature.hpp"

namespace gwc {

/// Coalescence time of i individuals sampled from generation n.
struct coalescence_query {
    model_spec model;
    int n;
    int i;
};

/// Throws InvalidArgument unless n >= i >= 2 (and i within the jet order limit).
coalescence_query make_query(model_spec model, int n, int i);

struct coalescence_distribution {
    int n;
    int i;
    /// pmf[m] = P(X = m), m = 0..n-1.
    std::vector<double> pmf;
    /// tail[m] = P(m <= X < inf), m = 0..n-1.
    std::vector<double> tail;
    double p_infinity;
    double quadrature_error;
    /// Entries pulled back into [0,1] or up to 0 after differencing.
    int clamped_entries;
};

// Integrand values exclude the 1/Gamma(i) factor. Both accept any n >= 1 and
// i >= 1 so they can be probed outside the query preconditions.

/// (1-z)^(i-1) f_{n-m}^(i)(z) phi_m'(f_{n-m}(z)) prod_{l=1}^{n-m} g(f_l(z)), where
/// phi_m(y) = prod_{l=1}^{m} g(f_l(y)). Identically zero for m = 0.
double integrand_tail(const model_spec& model, int n, int i, int m, double z);

/// (1-z)^(i-1) f_k^(i)(z) g'(f_k(z)) prod_{l != k, l <= n} g(f_l(z)).
double integrand_immigrant_term(const model_spec& model, int n, int i, int k, double z);

double prob_infinity(const coalescence_query& q, const quadrature_options& options = {});
double prob_tail(const coalescence_query& q, int m, const quadrature_options& options = {});
coalescence_distribution full_distribution(const coalescence_query& q, const quadrature_options& options = {});

/// E[(Y_1)_{i_1} ... (Y_j)_{i_j} / (Y_1 + ... + Y_n + Z)_i] for independent Y_l
/// with pgf phi and Z with pgf h, computed as
/// (1/Gamma(i)) int_0^1 (1-z)^(i-1) phi^(n-j) prod_l phi^(i_l) h dz.
/// phi and h are dense pgf coefficient vectors (mass at 0 allowed).
double falling_factorial_expectation(std::span<const double> phi, std::span<const double> h, int n,
                                     std::span<const int> partition, const quadrature_options& options = {});

} // namespace gwc
