#include "gwc/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>

#include "gwc/errors.hpp"

namespace gwc::io {

std::string format_double(double x)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

nlohmann::json to_json(const coalescence_distribution& dist)
{
    return {{"n", dist.n},
            {"i", dist.i},
            {"pmf", dist.pmf},
            {"tail", dist.tail},
            {"p_infinity", dist.p_infinity},
            {"quadrature_error", dist.quadrature_error}};
}

void write_csv(std::ostream& out, const coalescence_distribution& dist)
{
    out << "m,pmf,tail\n";
    for (int m = 0; m < dist.n; ++m) {
        out << m << ',' << format_double(dist.pmf[m]) << ',' << format_double(dist.tail[m]) << '\n';
    }
    out << "inf," << format_double(dist.p_infinity) << ",\n";
}

nlohmann::json to_json(const mc_estimate& est, int horizon_n)
{
    return {{"estimate", est.mean},
            {"std_error", est.std_error},
            {"replicates", est.replicates},
            {"seed", est.seed},
            {"horizon_n", horizon_n}};
}

nlohmann::json to_json(const run_manifest& manifest)
{
    return {{"command", manifest.command},
            {"model_digest", manifest.model_digest},
            {"parameters", manifest.parameters},
            {"seed", manifest.seed},
            {"tool_version", manifest.tool_version},
            {"wall_time", manifest.wall_time}};
}

std::string model_digest(const nlohmann::json& model_doc)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : model_doc.dump()) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string model_file_digest(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw error(error_kind::invalid_argument, "cannot open model file " + path);
    }
    try {
        return model_digest(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw error(error_kind::bad_pmf, std::string("model file is not valid JSON: ") + e.what());
    }
}

} // namespace gwc::io
