#include "gwc/dist_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "gwc/errors.hpp"

namespace gwc {

namespace {

constexpr double normalization_tolerance = 1e-12;
constexpr double min_entry_mass = 1e-15;
// Dense coefficient vectors are allocated up to this degree.
constexpr std::int64_t max_support_value = 1 << 16;

raw_pmf pmf_from_json(const nlohmann::json& law, const char* name)
{
    if (!law.is_object() || !law.contains("pmf") || !law.at("pmf").is_array()) {
        throw error(error_kind::bad_pmf, std::string(name) + ": expected object with array \"pmf\"");
    }
    raw_pmf out;
    for (const auto& row : law.at("pmf")) {
        if (!row.is_array() || row.size() != 2 || !row[0].is_number_integer() || !row[1].is_number()) {
            throw error(error_kind::bad_pmf, std::string(name) + ": pmf rows must be [integer, number]");
        }
        out.emplace_back(row[0].get<std::int64_t>(), row[1].get<double>());
    }
    return out;
}

} // namespace

dist_spec dist_spec::from_pmf(const raw_pmf& pmf)
{
    if (pmf.empty()) {
        throw error(error_kind::bad_pmf, "empty pmf");
    }
    raw_pmf sorted = pmf;
    std::sort(sorted.begin(), sorted.end());

    double total = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        const auto [value, prob] = sorted[j];
        if (!std::isfinite(prob) || prob < 0.0 || prob > 1.0 + normalization_tolerance) {
            throw error(error_kind::bad_pmf, "probability out of range for value " + std::to_string(value));
        }
        if (value < 0) {
            throw error(error_kind::bad_pmf, "negative support value " + std::to_string(value));
        }
        if (value == 0 && prob > 0.0) {
            throw error(error_kind::mass_at_zero, "positive probability at 0");
        }
        if (prob < min_entry_mass) {
            throw error(error_kind::bad_pmf, "entry for value " + std::to_string(value) + " is below 1e-15");
        }
        if (value > max_support_value) {
            throw error(error_kind::bad_pmf, "support value " + std::to_string(value) + " too large");
        }
        if (j > 0 && sorted[j - 1].first == value) {
            throw error(error_kind::bad_pmf, "duplicate support value " + std::to_string(value));
        }
        total += prob;
    }
    if (std::abs(total - 1.0) > normalization_tolerance) {
        throw error(error_kind::bad_pmf, "probabilities sum to " + std::to_string(total));
    }

    dist_spec d;
    for (const auto& [value, prob] : sorted) {
        d.entries_.push_back({static_cast<std::uint32_t>(value), prob / total});
    }
    d.coeffs_.assign(d.entries_.back().value + 1, 0.0);
    for (const auto& e : d.entries_) {
        d.coeffs_[e.value] = e.prob;
    }
    return d;
}

model_spec validate(const raw_pmf& offspring, const raw_pmf& immigration)
{
    auto f = dist_spec::from_pmf(offspring);
    auto g = dist_spec::from_pmf(immigration);
    const auto fm = moments(f);
    const auto gm = moments(g);
    if (!(fm.mean > 1.0)) {
        throw error(error_kind::not_supercritical, "offspring mean " + std::to_string(fm.mean) + " <= 1");
    }
    return model_spec{std::move(f), std::move(g), fm.mean, fm.variance, gm.mean};
}

double pgf_eval(const dist_spec& d, double z)
{
    if (!(z >= 0.0 && z <= 1.0)) {
        throw error(error_kind::domain_error, "pgf argument outside [0,1]");
    }
    const auto c = d.coefficients();
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
        acc = acc * z + c[k];
    }
    return acc;
}

dist_moments moments(const dist_spec& d)
{
    // f'(1) = sum k p_k, f''(1) = sum k(k-1) p_k
    double d1 = 0.0;
    double d2 = 0.0;
    for (const auto& e : d.pmf()) {
        const double k = e.value;
        d1 += k * e.prob;
        d2 += k * (k - 1.0) * e.prob;
    }
    return {d1, std::max(0.0, d2 + d1 - d1 * d1)};
}

model_spec model_from_json(const nlohmann::json& doc)
{
    if (!doc.is_object() || !doc.contains("offspring") || !doc.contains("immigration")) {
        throw error(error_kind::bad_pmf, "model must have \"offspring\" and \"immigration\"");
    }
    return validate(pmf_from_json(doc.at("offspring"), "offspring"),
                    pmf_from_json(doc.at("immigration"), "immigration"));
}

nlohmann::json model_to_json(const model_spec& model)
{
    auto law = [](const dist_spec& d) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& e : d.pmf()) {
            rows.push_back({e.value, e.prob});
        }
        return nlohmann::json{{"pmf", rows}};
    };
    return {{"offspring", law(model.offspring)}, {"immigration", law(model.immigration)}};
}

model_spec load_model(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw error(error_kind::invalid_argument, "cannot open model file " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw error(error_kind::bad_pmf, std::string("model file is not valid JSON: ") + e.what());
    }
    return model_from_json(doc);
}

} // namespace gwc
