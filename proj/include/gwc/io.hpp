#pragma once

#include <chrono>
#include <cstdint>
#include <ostream>
#include <string>

#include <json.hpp>

#include "gwc/exact_engine.hpp"
#include "gwc/genealogy.hpp"

namespace gwc::io {

inline constexpr const char* tool_version = "1.0.0";

/// Decimal text with 17 significant digits, so values round-trip exactly.
std::string format_double(double x);

nlohmann::json to_json(const coalescence_distribution& dist);
/// Rows "m,pmf,tail" for m = 0..n-1 followed by "inf,<p_infinity>,".
void write_csv(std::ostream& out, const coalescence_distribution& dist);

nlohmann::json to_json(const mc_estimate& est, int horizon_n);

/// Reproducibility record written next to every command's output.
struct run_manifest {
    std::string command;
    std::string model_digest;
    nlohmann::json parameters = nlohmann::json::object();
    std::uint64_t seed = 0;
    std::string tool_version = io::tool_version;
    double wall_time = 0.0;
};

nlohmann::json to_json(const run_manifest& manifest);

/// FNV-1a (64-bit) of the canonical dump of a parsed model document, as 16 hex
/// digits. Whitespace and key order in the file do not affect it.
std::string model_digest(const nlohmann::json& model_doc);
std::string model_file_digest(const std::string& path);

} // namespace gwc::io
