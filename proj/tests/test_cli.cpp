// End-to-end CLI contract: exit codes, artifact layout, manifest replay.
// The binary path arrives as the test's command-line argument.
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g_cli;

int run_cli(const std::string& args) {
    const std::string cmd = g_cli + " " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

const char* kModelA = R"({
  "states": ["s0"],
  "c_xi": 2.0,
  "c_rho": 4.0,
  "transitions": [
    {"from": 0, "to": 0, "prob": 1.0,
     "atoms": [{"xi": 1.0, "rho": 2.0, "w": 0.3333333333333333},
               {"xi": 1.0, "rho": 0.5, "w": 0.6666666666666667}]}
  ]
})";

const char* kModelD = R"({
  "states": ["s0"],
  "c_xi": 4.0,
  "c_rho": 4.0,
  "transitions": [
    {"from": 0, "to": 0, "prob": 1.0,
     "atoms": [{"xi": -3.0, "rho": 2.0, "w": 0.3333333333333333},
               {"xi": 1.5, "rho": 0.5, "w": 0.6666666666666667}]}
  ]
})";

const char* kContractive = R"({
  "states": ["s0"], "c_xi": 2.0, "c_rho": 4.0,
  "transitions": [{"from": 0, "to": 0, "prob": 1.0,
                   "atoms": [{"xi": 1.0, "rho": 0.5, "w": 1.0}]}]
})";

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("validate: exit 0 on a good model, 2 on a bad one") {
    TempDir dir("mmtail_cli_validate");
    spit(dir.path / "a.json", kModelA);
    CHECK(run_cli("--model " + (dir.path / "a.json").string() + " --out-dir " +
                  (dir.path / "out").string() + " validate") == 0);

    std::string bad = kModelA;
    const auto pos = bad.find("\"prob\": 1.0");
    bad.replace(pos, 11, "\"prob\": 0.9");
    spit(dir.path / "bad.json", bad);
    CHECK(run_cli("--model " + (dir.path / "bad.json").string() + " --out-dir " +
                  (dir.path / "out2").string() + " validate") == 2);
    // the validation report names the violated rule
    const json rep = json::parse(slurp(dir.path / "out2" / "validation.json"));
    CHECK(!rep.at("violations").empty());
}

TEST_CASE("analyze: artifacts exist; assumption failures exit 3") {
    TempDir dir("mmtail_cli_analyze");
    spit(dir.path / "a.json", kModelA);
    const std::string out = (dir.path / "out").string();
    CHECK(run_cli("--model " + (dir.path / "a.json").string() + " --out-dir " + out +
                  " analyze") == 0);
    const json analysis = json::parse(slurp(fs::path(out) / "analysis.json"));
    CHECK(std::abs(analysis.at("kappa").get<double>() - 1.0) <= 1e-9);
    CHECK(slurp(fs::path(out) / "lambda.csv").rfind("beta,lambda", 0) == 0);
    const json manifest = json::parse(slurp(fs::path(out) / "manifest.json"));
    CHECK(manifest.at("command") == "analyze");
    CHECK(manifest.at("model_hash").get<std::string>().rfind("fnv1a64:", 0) == 0);

    spit(dir.path / "c.json", kContractive);
    CHECK(run_cli("--model " + (dir.path / "c.json").string() + " --out-dir " +
                  (dir.path / "out3").string() + " analyze") == 3);
}

TEST_CASE("simulate twice: byte-identical CSV; manifest replay reproduces bytes") {
    TempDir dir("mmtail_cli_sim");
    spit(dir.path / "a.json", kModelA);
    const std::string base = "--model " + (dir.path / "a.json").string() + " --seed 42 ";
    CHECK(run_cli(base + "--out-dir " + (dir.path / "r1").string() + " simulate --n 2000") == 0);
    CHECK(run_cli(base + "--out-dir " + (dir.path / "r2").string() +
                  " --workers 8 simulate --n 2000") == 0);
    CHECK(slurp(dir.path / "r1" / "samples.csv") == slurp(dir.path / "r2" / "samples.csv"));

    // replay from the manifest into the same out-dir and compare bytes
    const std::string csv_before = slurp(dir.path / "r1" / "samples.csv");
    const std::string manifest_before = slurp(dir.path / "r1" / "manifest.json");
    CHECK(run_cli("--from-manifest " + (dir.path / "r1" / "manifest.json").string()) == 0);
    CHECK(slurp(dir.path / "r1" / "samples.csv") == csv_before);
    CHECK(slurp(dir.path / "r1" / "manifest.json") == manifest_before);
}

TEST_CASE("tails consumes simulate's CSV") {
    TempDir dir("mmtail_cli_tails");
    spit(dir.path / "a.json", kModelA);
    const std::string base = "--model " + (dir.path / "a.json").string();
    CHECK(run_cli(base + " --seed 9 --out-dir " + (dir.path / "sim").string() +
                  " simulate --n 20000") == 0);
    CHECK(run_cli(base + " --seed 9 --out-dir " + (dir.path / "t").string() + " tails --samples " +
                  (dir.path / "sim" / "samples.csv").string() +
                  " --t-grid 10:200:6 --sym-n 2000") == 0);
    const json constants = json::parse(slurp(dir.path / "t" / "constants.json"));
    CHECK(constants.at("constants").at("branch") == "positive");
    const std::string curves = slurp(dir.path / "t" / "tails.csv");
    CHECK(curves.rfind("state,sign,t,t_kappa_surv,band_lo,band_hi", 0) == 0);
}

TEST_CASE("report on the degenerate fixture: flags set, constants skipped, exit 0") {
    TempDir dir("mmtail_cli_report");
    spit(dir.path / "d.json", kModelD);
    const std::string out = (dir.path / "out").string();
    CHECK(run_cli("--model " + (dir.path / "d.json").string() + " --out-dir " + out +
                  " --quiet report --n 5000 --sym-n 1000") == 0);
    const json summary = json::parse(slurp(fs::path(out) / "summary.json"));
    CHECK(summary.at("degenerate").get<bool>());
    CHECK(summary.at("constants").is_null());
    CHECK(json::parse(slurp(fs::path(out) / "structure.json"))
              .at("degeneracy")
              .at("gamma")[0]
              .get<double>() == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("runtime failures exit 4") {
    // valid model (|rho| < c_rho) whose products diverge: the simulate
    // divergence guard must trip and map to the runtime exit code
    const char* diverging = R"({
      "states": ["s0"], "c_xi": 2.0, "c_rho": 4.0,
      "transitions": [{"from": 0, "to": 0, "prob": 1.0,
                       "atoms": [{"xi": 1.0, "rho": 3.9, "w": 1.0}]}]
    })";
    TempDir dir("mmtail_cli_exit4");
    spit(dir.path / "div.json", diverging);
    CHECK(run_cli("--model " + (dir.path / "div.json").string() + " --out-dir " +
                  (dir.path / "out").string() + " simulate --n 500 --max-terms 300") == 4);
}

TEST_CASE("report on model_a: summary compares spectral vs hill and formula vs plateau") {
    TempDir dir("mmtail_cli_report_a");
    spit(dir.path / "a.json", kModelA);
    const std::string out = (dir.path / "out").string();
    CHECK(run_cli("--model " + (dir.path / "a.json").string() + " --out-dir " + out +
                  " --seed 4 --workers 2 --quiet report --n 200000 --sym-n 5000") == 0);
    const json summary = json::parse(slurp(fs::path(out) / "summary.json"));
    CHECK(std::abs(summary.at("kappa_spectral").get<double>() - 1.0) <= 1e-9);
    CHECK(!summary.at("hill").is_null());
    CHECK(summary.at("constants").at("branch") == "positive");
}

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: test_cli [doctest args] <mmtail binary>\n");
        return 1;
    }
    g_cli = argv[argc - 1];
    doctest::Context ctx;
    ctx.applyCommandLine(argc - 1, argv);
    return ctx.run();
}
