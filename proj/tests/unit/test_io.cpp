#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "gwc/exact_engine.hpp"
#include "gwc/io.hpp"

using namespace gwc;
using nlohmann::json;

TEST_CASE("format_double round-trips")
{
    for (double x : {0.0, 1.0, 0.1, 8.0 / 15.0, 1e-300, 123456.789, 5e-324}) {
        CHECK(std::strtod(io::format_double(x).c_str(), nullptr) == x);
    }
}

TEST_CASE("distribution json and csv carry the same numbers")
{
    const auto model = validate({{1, 0.5}, {2, 0.5}}, {{1, 0.5}, {2, 0.5}});
    const auto dist = full_distribution(make_query(model, 5, 2));
    const json doc = io::to_json(dist);
    CHECK(doc.at("n") == 5);
    CHECK(doc.at("i") == 2);
    CHECK(doc.contains("quadrature_error"));

    std::ostringstream csv;
    io::write_csv(csv, dist);
    std::istringstream lines(csv.str());
    std::string line;
    std::getline(lines, line);
    CHECK(line == "m,pmf,tail");
    for (int m = 0; m < 5; ++m) {
        std::getline(lines, line);
        std::istringstream row(line);
        std::string a, b, c;
        std::getline(row, a, ',');
        std::getline(row, b, ',');
        std::getline(row, c, ',');
        CHECK(std::stoi(a) == m);
        CHECK(std::stod(b) == doc.at("pmf")[m].get<double>());
        CHECK(std::stod(c) == doc.at("tail")[m].get<double>());
    }
    std::getline(lines, line);
    CHECK(line.rfind("inf,", 0) == 0);
    CHECK(std::stod(line.substr(4)) == doc.at("p_infinity").get<double>());
}

TEST_CASE("model digest ignores formatting")
{
    const auto a = json::parse(R"({"offspring":{"pmf":[[2,1.0]]},"immigration":{"pmf":[[1,1.0]]}})");
    const auto b = json::parse("{\n  \"immigration\": {\"pmf\": [[1, 1.0]]},\n  \"offspring\": {\"pmf\": [[2, 1.0]]}\n}");
    const auto c = json::parse(R"({"offspring":{"pmf":[[3,1.0]]},"immigration":{"pmf":[[1,1.0]]}})");
    CHECK(io::model_digest(a) == io::model_digest(b));
    CHECK(io::model_digest(a) != io::model_digest(c));
    CHECK(io::model_digest(a).size() == 16);
}

TEST_CASE("manifest fields")
{
    io::run_manifest m{"exact", "abc", {{"n", 3}}, 42};
    const json doc = io::to_json(m);
    for (const char* key : {"command", "model_digest", "parameters", "seed", "tool_version", "wall_time"}) {
        CHECK(doc.contains(key));
    }
    CHECK(doc.at("seed") == 42);
}

TEST_CASE("estimate json")
{
    const json doc = io::to_json(mc_estimate{0.25, 0.01, 1000, 7}, 8);
    CHECK(doc.at("estimate") == 0.25);
    CHECK(doc.at("std_error") == 0.01);
    CHECK(doc.at("replicates") == 1000);
    CHECK(doc.at("seed") == 7);
    CHECK(doc.at("horizon_n") == 8);
}
