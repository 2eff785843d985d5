// gwc: coalescence times in supercritical Galton-Watson processes with immigration.
//
//   gwc exact      --model M --n N --i I [--format json|csv]
//   gwc simulate   --model M --n N --i I --m K --replicates R --seed S [--mode quenched-average|direct-sample]
//   gwc limit      --model M --m K [--horizon N] --replicates R --seed S
//   gwc oracle     --example lnary|binary-random|enumerate ...
//   gwc crosscheck --model M [--grid G]
//
// Exit codes: 0 ok, 2 bad input, 3 numerical failure, 4 resource limit, 5 tolerance violation.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gwc/errors.hpp"
#include "gwc/exact_engine.hpp"
#include "gwc/genealogy.hpp"
#include "gwc/io.hpp"
#include "gwc/oracles.hpp"

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 2;
constexpr int exit_numeric = 3;
constexpr int exit_resource = 4;
constexpr int exit_tolerance = 5;

int exit_code_for(gwc::error_kind kind)
{
    switch (kind) {
    case gwc::error_kind::quadrature_failure: return exit_numeric;
    case gwc::error_kind::resource_limit: return exit_resource;
    default: return exit_input;
    }
}

struct output_options {
    std::string output;
    std::string manifest;
    std::string format = "json";
};

void add_output_options(CLI::App* cmd, output_options& out)
{
    cmd->add_option("--output", out.output, "Result file (default: standard output)");
    cmd->add_option("--manifest", out.manifest, "Run manifest file (default: <output>.manifest.json, or stderr)");
    cmd->add_option("--format", out.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

class run_clock {
public:
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void emit(const output_options& opts, const std::string& body, gwc::io::run_manifest manifest, const run_clock& clock)
{
    manifest.wall_time = clock.seconds();
    const std::string manifest_text = gwc::io::to_json(manifest).dump(2) + "\n";
    if (opts.output.empty()) {
        std::cout << body << std::flush;
    } else {
        std::ofstream out(opts.output);
        if (!out) {
            throw gwc::error(gwc::error_kind::invalid_argument, "cannot write " + opts.output);
        }
        out << body;
    }
    std::string manifest_path = opts.manifest;
    if (manifest_path.empty() && !opts.output.empty()) {
        manifest_path = opts.output + ".manifest.json";
    }
    if (manifest_path.empty()) {
        std::cerr << gwc::io::to_json(manifest).dump() << "\n";
    } else {
        std::ofstream out(manifest_path);
        if (!out) {
            throw gwc::error(gwc::error_kind::invalid_argument, "cannot write " + manifest_path);
        }
        out << manifest_text;
    }
}

std::string json_text(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

struct exact_args {
    std::string model;
    int n = 0;
    int i = 2;
    double tolerance = 1e-12;
    output_options out;
};

int cmd_exact(const exact_args& a)
{
    run_clock clock;
    const auto model = gwc::load_model(a.model);
    gwc::quadrature_options q;
    q.abs_tol = a.tolerance;
    const auto dist = gwc::full_distribution(gwc::make_query(model, a.n, a.i), q);
    if (dist.clamped_entries > 0) {
        std::cerr << "warning: " << dist.clamped_entries << " probabilities clamped into [0,1]\n";
    }
    std::string body;
    if (a.out.format == "csv") {
        std::ostringstream s;
        gwc::io::write_csv(s, dist);
        body = s.str();
    } else {
        body = json_text(gwc::io::to_json(dist));
    }
    gwc::io::run_manifest manifest{"exact", gwc::io::model_file_digest(a.model),
                                   {{"n", a.n}, {"i", a.i}, {"tolerance", a.tolerance}, {"format", a.out.format}}};
    emit(a.out, body, manifest, clock);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct simulate_args {
    std::string model;
    int n = 0;
    int i = 2;
    int m = 0;
    std::uint64_t replicates = 10000;
    std::uint64_t seed = 1;
    std::string mode = "quenched-average";
    output_options out;
};

int cmd_simulate(const simulate_args& a)
{
    run_clock clock;
    const auto model = gwc::load_model(a.model);
    if (a.i < 2 || a.n < a.i || a.m < 0 || a.m >= a.n || a.replicates < 1) {
        throw gwc::error(gwc::error_kind::invalid_argument, "need n >= i >= 2, 0 <= m < n and replicates >= 1");
    }
    const auto limits = gwc::sim_limits::from_environment();
    const auto est = a.mode == "direct-sample"
                         ? gwc::direct_sample_estimate(model, a.n, a.i, a.m, a.replicates, a.seed, limits)
                         : gwc::annealed_estimate(model, a.n, a.i, a.m, a.replicates, a.seed, limits);
    json doc = gwc::io::to_json(est, a.n);
    doc["mode"] = a.mode;
    doc["i"] = a.i;
    doc["m"] = a.m;
    gwc::io::run_manifest manifest{"simulate", gwc::io::model_file_digest(a.model),
                                   {{"n", a.n}, {"i", a.i}, {"m", a.m}, {"replicates", a.replicates},
                                    {"mode", a.mode}},
                                   a.seed};
    emit(a.out, json_text(doc), manifest, clock);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct limit_args {
    std::string model;
    int m = 0;
    int horizon = 25;
    std::uint64_t replicates = 10000;
    std::uint64_t seed = 1;
    output_options out;
};

int cmd_limit(const limit_args& a)
{
    run_clock clock;
    const auto model = gwc::load_model(a.model);
    if (a.replicates < 1) {
        throw gwc::error(gwc::error_kind::invalid_argument, "replicates must be >= 1");
    }
    const auto res = gwc::limit_law_estimate(model, a.m, a.horizon, a.replicates, a.seed,
                                             gwc::sim_limits::from_environment());
    json doc = gwc::io::to_json(res.estimate, res.horizon_n);
    doc["m"] = a.m;
    doc["horizon_remainder"] = res.horizon_remainder;
    doc["e_v_over_x2_lt_1"] = res.estimate.mean < 1.0;
    if (model.offspring.is_degenerate() && model.immigration.is_degenerate()) {
        const gwc::oracles::lnary_params p{static_cast<int>(model.offspring.min_support()),
                                           static_cast<int>(model.immigration.min_support())};
        doc["closed_form"] = gwc::oracles::lnary_limit_tail(p, a.m);
    }
    gwc::io::run_manifest manifest{"limit", gwc::io::model_file_digest(a.model),
                                   {{"m", a.m}, {"horizon_n", a.horizon}, {"replicates", a.replicates}},
                                   a.seed};
    emit(a.out, json_text(doc), manifest, clock);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct oracle_args {
    std::string example;
    std::string model;
    int l = 2;
    int k = 1;
    int n = 0;
    int i = 2;
    std::optional<int> m;
    std::string what;
    output_options out;
};

int cmd_oracle(const oracle_args& a)
{
    run_clock clock;
    std::string what = a.what.empty() ? (a.m ? "tail" : "distribution") : a.what;
    json doc{{"example", a.example}, {"n", a.n}, {"i", a.i}, {"what", what}};
    if (a.m) {
        doc["m"] = *a.m;
    }
    std::string digest;

    std::function<double(int)> tail;
    std::function<double()> p_infinity;
    if (a.example == "lnary") {
        const gwc::oracles::lnary_params p{a.l, a.k};
        doc["l"] = a.l;
        doc["k"] = a.k;
        digest = gwc::io::model_digest(gwc::model_to_json(gwc::oracles::lnary_model(p)));
        if (what == "limit") {
            doc["limit_p_infinity"] = gwc::oracles::lnary_limit_p_infinity(p);
            if (a.m) {
                doc["limit_tail"] = gwc::oracles::lnary_limit_tail(p, *a.m);
            }
        }
        tail = [&, p](int m) { return gwc::oracles::lnary_tail(p, a.n, m, a.i); };
        p_infinity = [&, p] { return gwc::oracles::lnary_p_infinity(p, a.n, a.i); };
    } else if (a.example == "binary-random") {
        digest = gwc::io::model_digest(gwc::model_to_json(gwc::oracles::binary_random_model()));
        tail = [&](int m) { return gwc::oracles::binary_random_tail(a.n, m, a.i); };
        p_infinity = [&] { return 1.0 - gwc::oracles::binary_random_tail(a.n, 0, a.i); };
    } else if (a.example == "enumerate") {
        if (a.model.empty()) {
            throw gwc::error(gwc::error_kind::invalid_argument, "--example enumerate needs --model");
        }
        auto model = std::make_shared<gwc::model_spec>(gwc::load_model(a.model));
        digest = gwc::io::model_file_digest(a.model);
        tail = [&, model](int m) { return gwc::oracles::enumerate_exact(*model, a.n, a.i, m); };
        p_infinity = [&, model] { return 1.0 - gwc::oracles::enumerate_exact(*model, a.n, a.i, 0); };
    } else {
        throw gwc::error(gwc::error_kind::invalid_argument, "unknown oracle example " + a.example);
    }

    std::ostringstream csv;
    csv << "quantity,m,value\n";
    if (what == "tail") {
        if (!a.m) {
            throw gwc::error(gwc::error_kind::invalid_argument, "--what tail needs --m");
        }
        doc["value"] = tail(*a.m);
        csv << "tail," << *a.m << ',' << gwc::io::format_double(doc["value"].get<double>()) << '\n';
    } else if (what == "p_infinity") {
        doc["value"] = p_infinity();
        csv << "p_infinity,," << gwc::io::format_double(doc["value"].get<double>()) << '\n';
    } else if (what == "distribution") {
        std::vector<double> tails;
        for (int m = 0; m < a.n; ++m) {
            tails.push_back(tail(m));
            csv << "tail," << m << ',' << gwc::io::format_double(tails.back()) << '\n';
        }
        doc["tail"] = tails;
        doc["p_infinity"] = p_infinity();
        csv << "p_infinity,," << gwc::io::format_double(doc["p_infinity"].get<double>()) << '\n';
    } else if (what == "limit") {
        if (a.example != "lnary") {
            throw gwc::error(gwc::error_kind::invalid_argument, "limits are available for --example lnary only");
        }
        csv << "limit_p_infinity,," << gwc::io::format_double(doc["limit_p_infinity"].get<double>()) << '\n';
        if (a.m) {
            csv << "limit_tail," << *a.m << ',' << gwc::io::format_double(doc["limit_tail"].get<double>()) << '\n';
        }
    } else {
        throw gwc::error(gwc::error_kind::invalid_argument, "unknown --what " + what);
    }

    json params{{"example", a.example}, {"n", a.n}, {"i", a.i}, {"what", what}};
    if (a.example == "lnary") {
        params["l"] = a.l;
        params["k"] = a.k;
    }
    if (a.m) {
        params["m"] = *a.m;
    }
    gwc::io::run_manifest manifest{"oracle", digest, params};
    emit(a.out, a.out.format == "csv" ? csv.str() : json_text(doc), manifest, clock);
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct crosscheck_args {
    std::string model;
    std::string grid;
    output_options out;
};

struct expected_constant {
    int n;
    int i;
    std::optional<int> m;
    double value;
};

struct grid_spec {
    std::vector<int> n_values;
    std::vector<int> i_values;
    std::optional<std::vector<int>> m_values;
    double tolerance = 1e-9;
    std::uint64_t mc_replicates = 0;
    std::uint64_t seed = 1;
    double mc_sigma = 3.0;
    std::vector<expected_constant> expected;
};

grid_spec default_grid()
{
    grid_spec g;
    g.n_values = {2, 3, 4, 5, 6};
    g.i_values = {2, 3};
    return g;
}

grid_spec load_grid(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw gwc::error(gwc::error_kind::invalid_argument, "cannot open grid file " + path);
    }
    grid_spec g;
    try {
        const json doc = json::parse(in);
        g.n_values = doc.value("n", std::vector<int>{});
        g.i_values = doc.value("i", std::vector<int>{2});
        if (doc.contains("m")) {
            g.m_values = doc.at("m").get<std::vector<int>>();
        }
        g.tolerance = doc.value("tolerance", g.tolerance);
        g.mc_replicates = doc.value("mc_replicates", g.mc_replicates);
        g.seed = doc.value("seed", g.seed);
        g.mc_sigma = doc.value("mc_sigma", g.mc_sigma);
        for (const auto& e : doc.value("expected", json::array())) {
            expected_constant c{e.at("n").get<int>(), e.at("i").get<int>(), std::nullopt, e.at("value").get<double>()};
            if (e.contains("m")) {
                c.m = e.at("m").get<int>();
            }
            g.expected.push_back(c);
        }
    } catch (const json::exception& e) {
        throw gwc::error(gwc::error_kind::invalid_argument, std::string("bad grid file: ") + e.what());
    }
    return g;
}

bool same_law(const gwc::dist_spec& a, const gwc::dist_spec& b)
{
    if (a.pmf().size() != b.pmf().size()) {
        return false;
    }
    for (std::size_t j = 0; j < a.pmf().size(); ++j) {
        if (a.pmf()[j].value != b.pmf()[j].value || std::abs(a.pmf()[j].prob - b.pmf()[j].prob) > 1e-12) {
            return false;
        }
    }
    return true;
}

int cmd_crosscheck(const crosscheck_args& a)
{
    run_clock clock;
    const auto model = gwc::load_model(a.model);
    const grid_spec grid = a.grid.empty() ? default_grid() : load_grid(a.grid);
    const auto limits = gwc::sim_limits::from_environment();

    std::string oracle_kind = "enumerate";
    std::function<double(int, int, int)> oracle;
    if (model.offspring.is_degenerate() && model.immigration.is_degenerate()) {
        const gwc::oracles::lnary_params p{static_cast<int>(model.offspring.min_support()),
                                           static_cast<int>(model.immigration.min_support())};
        oracle_kind = "lnary";
        oracle = [p](int n, int m, int i) { return gwc::oracles::lnary_tail(p, n, m, i); };
    } else if (const auto br = gwc::oracles::binary_random_model();
               same_law(model.offspring, br.offspring) && same_law(model.immigration, br.immigration)) {
        oracle_kind = "binary-random";
        oracle = [](int n, int m, int i) { return gwc::oracles::binary_random_tail(n, m, i); };
    } else {
        oracle = [&model](int n, int m, int i) { return gwc::oracles::enumerate_exact(model, n, i, m); };
    }

    std::map<std::pair<int, int>, gwc::coalescence_distribution> exact;
    auto exact_for = [&](int n, int i) -> const gwc::coalescence_distribution& {
        auto it = exact.find({n, i});
        if (it == exact.end()) {
            it = exact.emplace(std::make_pair(n, i), gwc::full_distribution(gwc::make_query(model, n, i))).first;
        }
        return it->second;
    };

    json cells = json::array();
    std::vector<std::string> violations;
    std::ostringstream csv;
    csv << "n,i,m,exact,oracle,abs_diff,mc_mean,mc_se,mc_z,pass\n";
    for (int n : grid.n_values) {
        for (int i : grid.i_values) {
            if (i < 2 || n < i) {
                continue;
            }
            std::vector<int> ms;
            if (grid.m_values) {
                for (int m : *grid.m_values) {
                    if (m >= 0 && m < n) {
                        ms.push_back(m);
                    }
                }
            } else {
                for (int m = 0; m < n; ++m) {
                    ms.push_back(m);
                }
            }
            const auto& dist = exact_for(n, i);
            for (int m : ms) {
                json cell{{"n", n}, {"i", i}, {"m", m}, {"exact", dist.tail[m]}};
                bool pass = true;
                std::optional<double> oracle_value;
                try {
                    oracle_value = oracle(n, m, i);
                } catch (const gwc::error& e) {
                    if (e.kind() != gwc::error_kind::resource_limit) {
                        throw;
                    }
                    cell["oracle_skipped"] = e.what();
                }
                double diff = 0.0;
                if (oracle_value) {
                    diff = std::abs(dist.tail[m] - *oracle_value);
                    cell["oracle"] = *oracle_value;
                    cell["oracle_kind"] = oracle_kind;
                    cell["abs_diff"] = diff;
                    pass = pass && diff <= grid.tolerance;
                }
                std::string mc_cols = ",,";
                if (grid.mc_replicates > 0) {
                    const auto est = gwc::annealed_estimate(model, n, i, m, grid.mc_replicates, grid.seed, limits);
                    const double gap = std::abs(dist.tail[m] - est.mean);
                    const double z = est.std_error > 0.0 ? gap / est.std_error : (gap <= grid.tolerance ? 0.0 : INFINITY);
                    cell["mc_mean"] = est.mean;
                    cell["mc_std_error"] = est.std_error;
                    cell["mc_z"] = std::isfinite(z) ? json(z) : json("inf");
                    pass = pass && z <= grid.mc_sigma;
                    mc_cols = gwc::io::format_double(est.mean) + "," + gwc::io::format_double(est.std_error) + "," +
                              gwc::io::format_double(z);
                }
                cell["pass"] = pass;
                if (!pass) {
                    violations.push_back(cell.dump());
                }
                csv << n << ',' << i << ',' << m << ',' << gwc::io::format_double(dist.tail[m]) << ','
                    << (oracle_value ? gwc::io::format_double(*oracle_value) : "") << ','
                    << (oracle_value ? gwc::io::format_double(diff) : "") << ',' << mc_cols << ','
                    << (pass ? "true" : "false") << '\n';
                cells.push_back(std::move(cell));
            }
        }
    }

    json constants = json::array();
    for (const auto& c : grid.expected) {
        const auto& dist = exact_for(c.n, c.i);
        const double value = c.m ? dist.tail.at(*c.m) : dist.p_infinity;
        const double diff = std::abs(value - c.value);
        json row{{"n", c.n}, {"i", c.i}, {"expected", c.value}, {"exact", value}, {"abs_diff", diff},
                 {"pass", diff <= grid.tolerance}};
        if (c.m) {
            row["m"] = *c.m;
        } else {
            row["what"] = "p_infinity";
        }
        if (diff > grid.tolerance) {
            violations.push_back(row.dump());
        }
        constants.push_back(std::move(row));
    }

    if (cells.empty() && constants.empty()) {
        std::cerr << "warning: crosscheck grid is empty; nothing was checked\n";
    }
    for (const auto& v : violations) {
        std::cerr << "violation: " << v << "\n";
    }

    json doc{{"oracle_kind", oracle_kind},
             {"tolerance", grid.tolerance},
             {"cells", cells},
             {"expected", constants},
             {"violations", violations.size()}};
    gwc::io::run_manifest manifest{"crosscheck", gwc::io::model_file_digest(a.model),
                                   {{"grid", a.grid.empty() ? json("default") : json(a.grid)},
                                    {"tolerance", grid.tolerance},
                                    {"mc_replicates", grid.mc_replicates}},
                                   grid.seed};
    emit(a.out, a.out.format == "csv" ? csv.str() : json_text(doc), manifest, clock);
    return violations.empty() ? exit_ok : exit_tolerance;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coalescence times of supercritical Galton-Watson processes with immigration"};
    app.require_subcommand(1);
    app.set_version_flag("--version", gwc::io::tool_version);

    exact_args ex;
    auto* exact_cmd = app.add_subcommand("exact", "Exact distribution of the coalescence time by quadrature");
    exact_cmd->add_option("--model", ex.model, "Model JSON file")->required();
    exact_cmd->add_option("--n", ex.n, "Observation generation")->required();
    exact_cmd->add_option("--i", ex.i, "Sample size")->required();
    exact_cmd->add_option("--tolerance", ex.tolerance, "Absolute quadrature tolerance");
    add_output_options(exact_cmd, ex.out);

    simulate_args sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimate of P(m <= X < inf)");
    sim_cmd->add_option("--model", sim.model, "Model JSON file")->required();
    sim_cmd->add_option("--n", sim.n, "Observation generation")->required();
    sim_cmd->add_option("--i", sim.i, "Sample size");
    sim_cmd->add_option("--m", sim.m, "Lower bound on the coalescence generation");
    sim_cmd->add_option("--replicates", sim.replicates, "Independent trees");
    sim_cmd->add_option("--seed", sim.seed, "Master seed");
    sim_cmd->add_option("--mode", sim.mode, "quenched-average or direct-sample")
        ->check(CLI::IsMember({"quenched-average", "direct-sample"}));
    add_output_options(sim_cmd, sim.out);

    limit_args lim;
    auto* limit_cmd = app.add_subcommand("limit", "Monte Carlo estimate of lim_n P(m <= X_2 < inf)");
    limit_cmd->add_option("--model", lim.model, "Model JSON file")->required();
    limit_cmd->add_option("--m", lim.m, "Lower bound on the coalescence generation");
    limit_cmd->add_option("--horizon", lim.horizon, "Generation used in place of n = infinity");
    limit_cmd->add_option("--replicates", lim.replicates, "Independent replicates");
    limit_cmd->add_option("--seed", lim.seed, "Master seed");
    add_output_options(limit_cmd, lim.out);

    oracle_args orc;
    auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form and enumeration reference values");
    oracle_cmd->add_option("--example", orc.example, "lnary, binary-random or enumerate")
        ->required()
        ->check(CLI::IsMember({"lnary", "binary-random", "enumerate"}));
    oracle_cmd->add_option("--model", orc.model, "Model JSON file (enumerate)");
    oracle_cmd->add_option("--l", orc.l, "Offspring per individual (lnary)");
    oracle_cmd->add_option("--k", orc.k, "Immigrants per generation (lnary)");
    oracle_cmd->add_option("--n", orc.n, "Observation generation")->required();
    oracle_cmd->add_option("--i", orc.i, "Sample size");
    oracle_cmd->add_option("--m", orc.m, "Lower bound on the coalescence generation");
    oracle_cmd->add_option("--what", orc.what, "tail, p_infinity, distribution or limit");
    add_output_options(oracle_cmd, orc.out);

    crosscheck_args cc;
    auto* cc_cmd = app.add_subcommand("crosscheck", "Compare exact values with oracles and Monte Carlo");
    cc_cmd->add_option("--model", cc.model, "Model JSON file")->required();
    cc_cmd->add_option("--grid", cc.grid, "Grid JSON file (default: n=2..6, i=2,3, every m)");
    add_output_options(cc_cmd, cc.out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    try {
        if (*exact_cmd) {
            return cmd_exact(ex);
        }
        if (*sim_cmd) {
            return cmd_simulate(sim);
        }
        if (*limit_cmd) {
            return cmd_limit(lim);
        }
        if (*oracle_cmd) {
            return cmd_oracle(orc);
        }
        if (*cc_cmd) {
            return cmd_crosscheck(cc);
        }
    } catch (const gwc::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_input;
    }
    return exit_input;
}
