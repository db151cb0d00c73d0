/*
   Copyright 2026 The mmtail developers

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

// Command-line front end. Everything numeric happens behind the C API in
// libmmtail; this file only wires files, flags and manifests together.

#include <mmtail/mmtail.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitInvalidModel = 2;
constexpr int kExitAssumption = 3;
constexpr int kExitRuntime = 4;

struct Config {
    std::string command;
    std::string model_path;
    std::string out_dir = ".";
    std::uint64_t seed = 1;
    int workers = 1;
    bool quiet = false;
    json options = json::object();
};

struct CliError {
    int exit_code;
    std::string message;
};

[[noreturn]] void bail(int code, const std::string& msg) { throw CliError{code, msg}; }

int status_to_exit(mmt_status st) {
    switch (st) {
        case MMT_OK:
            return 0;
        case MMT_ERR_PARSE:
        case MMT_ERR_INVALID_MODEL:
            return kExitInvalidModel;
        case MMT_ERR_ASSUMPTION:
            return kExitAssumption;
        default:
            return kExitRuntime;
    }
}

void check_status(mmt_status st) {
    if (st != MMT_OK) bail(status_to_exit(st), mmt_last_error());
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) bail(kExitRuntime, "cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream os(path, std::ios::binary);
    if (!os) bail(kExitRuntime, "cannot write " + path.string());
    os << content;
}

std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[19];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// "lo:hi:points" geometric, or a comma-separated explicit list
std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> out;
    if (spec.empty() || spec == "auto") return out;
    if (spec.find(':') != std::string::npos) {
        double lo, hi;
        int pts;
        if (std::sscanf(spec.c_str(), "%lg:%lg:%d", &lo, &hi, &pts) != 3 || pts < 2 ||
            !(hi > lo) || !(lo > 0))
            bail(kExitRuntime, "bad grid spec: " + spec);
        for (int i = 0; i < pts; ++i)
            out.push_back(lo * std::exp(std::log(hi / lo) * i / (pts - 1)));
        return out;
    }
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

struct ModelHandle {
    mmt_model* ptr = nullptr;
    ~ModelHandle() { mmt_model_free(ptr); }
};

struct BatchHandle {
    mmt_batch* ptr = nullptr;
    ~BatchHandle() { mmt_batch_free(ptr); }
};

struct StringOut {
    char* ptr = nullptr;
    ~StringOut() { mmt_string_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

// parse + validate; exits 2 with the report on stdout when invalid
void load_model(const Config& cfg, ModelHandle& model) {
    const std::string text = read_file(cfg.model_path);
    const mmt_status pst = mmt_model_from_json(text.c_str(), &model.ptr);
    if (pst != MMT_OK) bail(kExitInvalidModel, mmt_last_error());
    StringOut report;
    const mmt_status vst = mmt_model_validate(model.ptr, &report.ptr);
    if (vst != MMT_OK) {
        std::cerr << report.str();
        bail(kExitInvalidModel, mmt_last_error());
    }
}

void write_manifest(const Config& cfg, const std::string& model_text,
                    const std::vector<std::string>& outputs) {
    json m;
    m["command"] = cfg.command;
    m["model"] = cfg.model_path;
    m["model_hash"] = "fnv1a64:" + fnv1a64_hex(model_text);
    m["artifact_version"] = mmt_version();
    m["seed"] = cfg.seed;
    m["workers"] = cfg.workers;
    m["out_dir"] = cfg.out_dir;
    m["options"] = cfg.options;
    m["outputs"] = outputs;
    write_file(fs::path(cfg.out_dir) / "manifest.json", m.dump(2) + "\n");
}

void say(const Config& cfg, const std::string& line) {
    if (!cfg.quiet) std::cout << line << "\n";
}

double opt_num(const Config& cfg, const char* key, double fallback) {
    return cfg.options.contains(key) ? cfg.options.at(key).get<double>() : fallback;
}

std::string opt_str(const Config& cfg, const char* key, const std::string& fallback) {
    return cfg.options.contains(key) ? cfg.options.at(key).get<std::string>() : fallback;
}

json run_analyze_step(const Config& cfg, ModelHandle& model) {
    mmt_analyze_opts opts{};
    opts.spectral_tol = opt_num(cfg, "spectral_tol", 1e-12);
    opts.kappa_tol = opt_num(cfg, "kappa_tol", 1e-10);
    opts.beta_max = opt_num(cfg, "beta_max", 64.0);
    opts.grid_points = static_cast<int>(opt_num(cfg, "grid_points", 33));
    StringOut out;
    check_status(mmt_analyze(model.ptr, &opts, &out.ptr));
    return json::parse(out.str());
}

json run_check_step(const Config& cfg, ModelHandle& model) {
    StringOut out;
    check_status(mmt_check(model.ptr, opt_num(cfg, "tol", 1e-9), &out.ptr));
    return json::parse(out.str());
}

void run_simulate_step(const Config& cfg, ModelHandle& model, BatchHandle& batch) {
    mmt_sim_opts opts{};
    opts.seed = cfg.seed;
    opts.n_per_state = static_cast<long long>(opt_num(cfg, "n", 100000));
    opts.eps_trunc = opt_num(cfg, "eps", 1e-12);
    opts.min_terms = static_cast<int>(opt_num(cfg, "min_terms", 64));
    opts.max_terms = static_cast<int>(opt_num(cfg, "max_terms", 10000));
    opts.workers = cfg.workers;
    check_status(mmt_simulate(model.ptr, &opts, &batch.ptr));
}

json run_tails_step(const Config& cfg, ModelHandle& model, BatchHandle& batch) {
    mmt_tails_opts opts{};
    const std::string kappa_spec = opt_str(cfg, "kappa", "auto");
    opts.kappa = kappa_spec == "auto" ? 0.0 : std::stod(kappa_spec);
    opts.hill_k = static_cast<int>(opt_num(cfg, "hill_k", 0));
    const std::vector<double> grid = parse_grid(opt_str(cfg, "t_grid", "auto"));
    if (!grid.empty()) {
        opts.t_grid = grid.data();
        opts.t_grid_len = grid.size();
    }
    opts.grid_points = static_cast<int>(opt_num(cfg, "grid_points", 12));
    opts.sym_paths = static_cast<long long>(opt_num(cfg, "sym_n", 100000));
    opts.sym_seed = cfg.seed;
    const std::vector<double> sym_grid = parse_grid(opt_str(cfg, "sym_t_grid", "auto"));
    if (!sym_grid.empty()) {
        opts.sym_t_grid = sym_grid.data();
        opts.sym_t_grid_len = sym_grid.size();
    }
    StringOut out;
    check_status(mmt_tails(model.ptr, batch.ptr, &opts, &out.ptr));
    return json::parse(out.str());
}

std::string curves_to_csv(const json& tails) {
    std::ostringstream os;
    os << "state,sign,t,t_kappa_surv,band_lo,band_hi\n";
    char buf[160];
    for (const auto& c : tails.at("curves")) {
        std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g,%.17g,%.17g\n",
                      c.at("state").get<int>(), c.at("sign").get<int>(),
                      c.at("t").get<double>(), c.at("value").get<double>(),
                      c.at("band_lo").get<double>(), c.at("band_hi").get<double>());
        os << buf;
    }
    return os.str();
}

std::string lambda_to_csv(const json& analysis) {
    std::ostringstream os;
    os << "beta,lambda\n";
    char buf[96];
    for (const auto& p : analysis.at("beta_grid")) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.at(0).get<double>(),
                      p.at(1).get<double>());
        os << buf;
    }
    return os.str();
}

json summarize(const json& analysis, const json& structure, const json& tails) {
    json s;
    s["kappa_spectral"] = analysis.at("kappa");
    s["hill"] = tails.at("hill");
    s["degenerate"] = structure.at("degeneracy").at("degenerate");
    s["condition_g"] = structure.at("condition_g").at("holds");
    s["arithmetic"] = structure.at("arithmetic").at("arithmetic");
    if (structure.at("degeneracy").at("degenerate").get<bool>()) {
        s["constants"] = nullptr; // tail constants are meaningless when R is deterministic
        return s;
    }
    json rows = json::array();
    bool all_agree = true;
    const auto& constants = tails.at("constants");
    const auto& per_state = tails.at("per_state");
    for (std::size_t x = 0; x < per_state.size(); ++x) {
        for (int sign : {+1, -1}) {
            const char* kkey = sign > 0 ? "K1" : "Kneg1";
            const char* skey = sign > 0 ? "K1_se" : "Kneg1_se";
            const char* pkey = sign > 0 ? "plateau_pos" : "plateau_neg";
            if (per_state[x].at(pkey).is_null()) continue;
            const double theory = constants.at(kkey)[x].get<double>();
            const double theory_se = constants.at(skey)[x].get<double>();
            const double plateau = per_state[x].at(pkey).at("value").get<double>();
            const double plateau_se = per_state[x].at(pkey).at("se").get<double>();
            const double combined = std::sqrt(theory_se * theory_se + plateau_se * plateau_se);
            const bool agree = std::abs(theory - plateau) <= 3.0 * combined;
            all_agree = all_agree && agree;
            rows.push_back({{"state", x},
                            {"sign", sign},
                            {"theory", theory},
                            {"plateau", plateau},
                            {"combined_se", combined},
                            {"agree_3se", agree}});
        }
    }
    s["constants"] = {{"branch", constants.at("branch")}, {"rows", rows},
                      {"all_agree_3se", all_agree}};
    return s;
}

int dispatch(const Config& cfg) {
    fs::create_directories(cfg.out_dir);
    const std::string model_text = read_file(cfg.model_path);
    std::vector<std::string> outputs;

    ModelHandle model;
    if (cfg.command == "validate") {
        mmt_model* raw = nullptr;
        const mmt_status pst = mmt_model_from_json(model_text.c_str(), &raw);
        model.ptr = raw;
        if (pst != MMT_OK) bail(kExitInvalidModel, mmt_last_error());
        StringOut report;
        const mmt_status vst = mmt_model_validate(model.ptr, &report.ptr);
        write_file(fs::path(cfg.out_dir) / "validation.json", report.str());
        outputs.push_back("validation.json");
        write_manifest(cfg, model_text, outputs);
        if (vst != MMT_OK) {
            std::cout << report.str();
            return kExitInvalidModel;
        }
        say(cfg, "ok");
        return 0;
    }

    load_model(cfg, model);

    if (cfg.command == "analyze") {
        const json analysis = run_analyze_step(cfg, model);
        write_file(fs::path(cfg.out_dir) / "analysis.json", analysis.dump(2) + "\n");
        write_file(fs::path(cfg.out_dir) / "lambda.csv", lambda_to_csv(analysis));
        outputs = {"analysis.json", "lambda.csv"};
        write_manifest(cfg, model_text, outputs);
        say(cfg, "kappa = " + analysis.at("kappa").dump() +
                     ", drift = " + analysis.at("drift").dump());
        return 0;
    }

    if (cfg.command == "check") {
        const json st = run_check_step(cfg, model);
        write_file(fs::path(cfg.out_dir) / "structure.json", st.dump(2) + "\n");
        outputs = {"structure.json"};
        write_manifest(cfg, model_text, outputs);
        say(cfg, "period: " + st.at("period").dump());
        const bool g = st.at("condition_g").at("holds").get<bool>();
        say(cfg, std::string("condition G: ") + (g ? "holds" : "fails") +
                     (g ? "" : " (A1=" + st.at("condition_g").at("a1").dump() + ", A-1=" +
                                  st.at("condition_g").at("a_neg1").dump() + ")"));
        const bool deg = st.at("degeneracy").at("degenerate").get<bool>();
        say(cfg, std::string("degenerate: ") +
                     (deg ? "yes (Gamma=" + st.at("degeneracy").at("gamma").dump() + ")" : "no"));
        const auto& ar = st.at("arithmetic");
        std::string line = std::string("arithmetic: ") +
                           (ar.at("arithmetic").get<bool>() ? "yes (alpha=" + ar.at("alpha").dump() + ")"
                                                            : "no");
        if (ar.at("degenerate_lattice").get<bool>()) line += " [degenerate-lattice]";
        if (ar.at("fragile").get<bool>()) line += " [fragile]";
        say(cfg, line);
        return 0;
    }

    if (cfg.command == "simulate") {
        BatchHandle batch;
        run_simulate_step(cfg, model, batch);
        check_status(
            mmt_batch_to_csv_file(batch.ptr, (fs::path(cfg.out_dir) / "samples.csv").c_str()));
        outputs = {"samples.csv"};
        write_manifest(cfg, model_text, outputs);
        say(cfg, "wrote " + std::to_string(mmt_batch_states(batch.ptr) *
                                           mmt_batch_rows_per_state(batch.ptr)) +
                     " samples");
        return 0;
    }

    if (cfg.command == "tails") {
        BatchHandle batch;
        const std::string samples = opt_str(cfg, "samples", "");
        if (!samples.empty()) {
            // a broken samples table is a runtime problem, not a model problem
            if (mmt_batch_from_csv_file(samples.c_str(), &batch.ptr) != MMT_OK)
                bail(kExitRuntime, mmt_last_error());
        } else {
            run_simulate_step(cfg, model, batch);
        }
        const json tails = run_tails_step(cfg, model, batch);
        write_file(fs::path(cfg.out_dir) / "tails.csv", curves_to_csv(tails));
        json constants = tails;
        constants.erase("curves");
        write_file(fs::path(cfg.out_dir) / "constants.json", constants.dump(2) + "\n");
        outputs = {"tails.csv", "constants.json"};
        write_manifest(cfg, model_text, outputs);
        say(cfg, "hill: " + tails.at("hill").dump());
        return 0;
    }

    if (cfg.command == "report") {
        const json analysis = run_analyze_step(cfg, model);
        write_file(fs::path(cfg.out_dir) / "analysis.json", analysis.dump(2) + "\n");
        write_file(fs::path(cfg.out_dir) / "lambda.csv", lambda_to_csv(analysis));
        const json structure = run_check_step(cfg, model);
        write_file(fs::path(cfg.out_dir) / "structure.json", structure.dump(2) + "\n");
        BatchHandle batch;
        run_simulate_step(cfg, model, batch);
        check_status(
            mmt_batch_to_csv_file(batch.ptr, (fs::path(cfg.out_dir) / "samples.csv").c_str()));
        const json tails = run_tails_step(cfg, model, batch);
        write_file(fs::path(cfg.out_dir) / "tails.csv", curves_to_csv(tails));
        json constants = tails;
        constants.erase("curves");
        write_file(fs::path(cfg.out_dir) / "constants.json", constants.dump(2) + "\n");
        const json summary = summarize(analysis, structure, tails);
        write_file(fs::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
        outputs = {"analysis.json", "lambda.csv",    "structure.json", "samples.csv",
                   "tails.csv",     "constants.json", "summary.json"};
        write_manifest(cfg, model_text, outputs);
        say(cfg, summary.dump(2));
        return 0;
    }

    bail(kExitRuntime, "unknown command " + cfg.command);
}

Config config_from_manifest(const std::string& path) {
    const json m = json::parse(read_file(path));
    Config cfg;
    cfg.command = m.at("command").get<std::string>();
    cfg.model_path = m.at("model").get<std::string>();
    cfg.out_dir = m.at("out_dir").get<std::string>();
    cfg.seed = m.at("seed").get<std::uint64_t>();
    cfg.workers = m.at("workers").get<int>();
    cfg.options = m.at("options");
    cfg.quiet = true;
    return cfg;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tail analysis of Markov-modulated random linear recursions"};
    app.require_subcommand(0, 1);

    Config cfg;
    std::string from_manifest;
    app.add_option("--from-manifest", from_manifest,
                   "re-run a previous invocation from its manifest.json");
    app.add_option("--model", cfg.model_path, "model JSON file");
    app.add_option("--out-dir", cfg.out_dir, "output directory (default .)");
    app.add_option("--seed", cfg.seed, "master seed (default 1)");
    app.add_option("--workers", cfg.workers, "worker threads (default 1)");
    app.add_flag("--quiet", cfg.quiet, "suppress progress output");

    double spectral_tol = 1e-12, kappa_tol = 1e-10, beta_max = 64.0, tol = 1e-9, eps = 1e-12;
    int grid_points = 33, min_terms = 64, max_terms = 10000, hill_k = 0, tails_grid_points = 12;
    long long n = 100000, sym_n = 100000;
    std::string kappa_spec = "auto", t_grid = "auto", sym_t_grid = "auto", samples;

    auto* c_validate = app.add_subcommand("validate", "validate a model file");
    auto* c_analyze = app.add_subcommand("analyze", "Lambda grid, kappa, tilt");
    c_analyze->add_option("--spectral-tol", spectral_tol);
    c_analyze->add_option("--kappa-tol", kappa_tol);
    c_analyze->add_option("--beta-max", beta_max);
    c_analyze->add_option("--grid-points", grid_points);
    auto* c_check = app.add_subcommand("check", "structural checks");
    c_check->add_option("--tol", tol);
    auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo sampling of R");
    c_simulate->add_option("--n", n, "samples per initial state");
    c_simulate->add_option("--eps", eps, "series truncation threshold");
    c_simulate->add_option("--min-terms", min_terms);
    c_simulate->add_option("--max-terms", max_terms);
    auto* c_tails = app.add_subcommand("tails", "tail estimation from samples");
    c_tails->add_option("--samples", samples, "sample CSV (default: simulate in process)");
    c_tails->add_option("--kappa", kappa_spec, "tail index or 'auto'");
    c_tails->add_option("--t-grid", t_grid, "lo:hi:points or comma list or 'auto'");
    c_tails->add_option("--hill-k", hill_k);
    c_tails->add_option("--sym-n", sym_n, "paths for the symmetrization check");
    c_tails->add_option("--sym-t-grid", sym_t_grid);
    c_tails->add_option("--n", n, "samples per state when simulating in process");
    c_tails->add_option("--eps", eps);
    c_tails->add_option("--grid-points", tails_grid_points);
    auto* c_report = app.add_subcommand("report", "analyze + check + simulate + tails");
    c_report->add_option("--n", n, "samples per initial state");
    c_report->add_option("--eps", eps);
    c_report->add_option("--sym-n", sym_n);
    c_report->add_option("--hill-k", hill_k);
    c_report->add_option("--t-grid", t_grid);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!from_manifest.empty()) return dispatch(config_from_manifest(from_manifest));

        if (c_validate->parsed()) cfg.command = "validate";
        if (c_analyze->parsed()) {
            cfg.command = "analyze";
            cfg.options = {{"spectral_tol", spectral_tol},
                           {"kappa_tol", kappa_tol},
                           {"beta_max", beta_max},
                           {"grid_points", grid_points}};
        }
        if (c_check->parsed()) {
            cfg.command = "check";
            cfg.options = {{"tol", tol}};
        }
        if (c_simulate->parsed()) {
            cfg.command = "simulate";
            cfg.options = {{"n", static_cast<double>(n)},
                           {"eps", eps},
                           {"min_terms", min_terms},
                           {"max_terms", max_terms}};
        }
        if (c_tails->parsed()) {
            cfg.command = "tails";
            cfg.options = {{"samples", samples}, {"kappa", kappa_spec},
                           {"t_grid", t_grid},   {"hill_k", static_cast<double>(hill_k)},
                           {"sym_n", static_cast<double>(sym_n)}, {"sym_t_grid", sym_t_grid},
                           {"n", static_cast<double>(n)}, {"eps", eps},
                           {"grid_points", tails_grid_points}};
        }
        if (c_report->parsed()) {
            cfg.command = "report";
            cfg.options = {{"n", static_cast<double>(n)},
                           {"eps", eps},
                           {"sym_n", static_cast<double>(sym_n)},
                           {"hill_k", static_cast<double>(hill_k)},
                           {"t_grid", t_grid},
                           {"kappa", "auto"}};
        }
        if (cfg.command.empty()) {
            std::cerr << app.help();
            return 1;
        }
        if (cfg.model_path.empty()) bail(kExitRuntime, "--model is required");
        return dispatch(cfg);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.message << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
