#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace gwc {

/// Unvalidated (value, probability) pairs as they come from a model file.
using raw_pmf = std::vector<std::pair<std::int64_t, double>>;

struct pmf_entry {
    std::uint32_t value;
    double prob;
};

/// Finite-support law on {1, 2, ...} with no mass at zero. The probability
/// generating function is a polynomial whose dense coefficients are cached.
class dist_spec {
public:
    /// Validates and renormalizes. Throws BadPmf or MassAtZero.
    static dist_spec from_pmf(const raw_pmf& pmf);

    std::span<const pmf_entry> pmf() const noexcept { return entries_; }
    std::uint32_t max_support() const noexcept { return entries_.back().value; }
    std::uint32_t min_support() const noexcept { return entries_.front().value; }
    bool is_degenerate() const noexcept { return entries_.size() == 1; }

    /// Dense coefficients c[k] = P(value = k), k = 0..max_support.
    std::span<const double> coefficients() const noexcept { return coeffs_; }

private:
    dist_spec() = default;

    std::vector<pmf_entry> entries_;
    std::vector<double> coeffs_;
};

struct dist_moments {
    double mean;
    double variance;
};

/// Offspring law f (mean mu, variance sigma^2) and immigration law g (mean lambda).
struct model_spec {
    dist_spec offspring;
    dist_spec immigration;
    double mu;
    double sigma2;
    double lambda;
};

/// Builds both laws and checks supercriticality. Throws BadPmf, MassAtZero or
/// NotSupercritical.
model_spec validate(const raw_pmf& offspring, const raw_pmf& immigration);

/// Sum p_k z^k. Throws DomainError for z outside [0, 1].
double pgf_eval(const dist_spec& d, double z);

/// mean = f'(1), variance = f''(1) + f'(1) - f'(1)^2.
dist_moments moments(const dist_spec& d);

/// Model file: {"offspring": {"pmf": [[k, p], ...]}, "immigration": {"pmf": [[k, p], ...]}}.
model_spec model_from_json(const nlohmann::json& doc);
nlohmann::json model_to_json(const model_spec& model);
model_spec load_model(const std::string& path);

} // namespace gwc
