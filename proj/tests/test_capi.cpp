#include <doctest.h>

#include <mmtail/mmtail.h>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <string>

using nlohmann::json;

namespace {

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

const char* kBadRowSum = R"({
  "states": ["s0"],
  "c_xi": 2.0,
  "c_rho": 4.0,
  "transitions": [
    {"from": 0, "to": 0, "prob": 0.9,
     "atoms": [{"xi": 1.0, "rho": 0.5, "w": 1.0}]}
  ]
})";

struct Model {
    mmt_model* ptr = nullptr;
    ~Model() { mmt_model_free(ptr); }
};

struct Batch {
    mmt_batch* ptr = nullptr;
    ~Batch() { mmt_batch_free(ptr); }
};

struct Str {
    char* ptr = nullptr;
    ~Str() { mmt_string_free(ptr); }
    std::string s() const { return ptr ? ptr : ""; }
};

} // namespace

TEST_CASE("parse, validate, stationary through the C surface") {
    Model m;
    REQUIRE(mmt_model_from_json(kModelA, &m.ptr) == MMT_OK);
    CHECK(mmt_model_state_count(m.ptr) == 1);
    Str report;
    CHECK(mmt_model_validate(m.ptr, &report.ptr) == MMT_OK);
    CHECK(json::parse(report.s()).at("violations").empty());
    double pi[1] = {0.0};
    CHECK(mmt_model_stationary(m.ptr, pi, 1) == MMT_OK);
    CHECK(pi[0] == doctest::Approx(1.0));
}

TEST_CASE("malformed JSON and invalid models map to distinct statuses") {
    mmt_model* raw = nullptr;
    CHECK(mmt_model_from_json("{ not json", &raw) == MMT_ERR_PARSE);
    CHECK(raw == nullptr);
    CHECK(std::string(mmt_last_error()).find("parse") != std::string::npos);

    Model m;
    REQUIRE(mmt_model_from_json(kBadRowSum, &m.ptr) == MMT_OK);
    Str report;
    CHECK(mmt_model_validate(m.ptr, &report.ptr) == MMT_ERR_INVALID_MODEL);
    CHECK(!json::parse(report.s()).at("violations").empty());
}

TEST_CASE("null arguments are rejected") {
    CHECK(mmt_model_from_json(nullptr, nullptr) == MMT_ERR_ARGUMENT);
    CHECK(mmt_model_validate(nullptr, nullptr) == MMT_ERR_ARGUMENT);
    CHECK(mmt_tails(nullptr, nullptr, nullptr, nullptr) == MMT_ERR_ARGUMENT);
}

TEST_CASE("analyze returns the spectral summary") {
    Model m;
    REQUIRE(mmt_model_from_json(kModelA, &m.ptr) == MMT_OK);
    Str out;
    REQUIRE(mmt_analyze(m.ptr, nullptr, &out.ptr) == MMT_OK);
    const json j = json::parse(out.s());
    CHECK(j.at("kappa").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.at("drift").get<double>() > 0.0);
    CHECK(j.at("beta_grid").size() >= 3);
}

TEST_CASE("assumption violations surface as MMT_ERR_ASSUMPTION") {
    const char* contractive = R"({
      "states": ["s0"], "c_xi": 2.0, "c_rho": 4.0,
      "transitions": [{"from": 0, "to": 0, "prob": 1.0,
                       "atoms": [{"xi": 1.0, "rho": 0.5, "w": 1.0}]}]
    })";
    Model m;
    REQUIRE(mmt_model_from_json(contractive, &m.ptr) == MMT_OK);
    Str out;
    CHECK(mmt_analyze(m.ptr, nullptr, &out.ptr) == MMT_ERR_ASSUMPTION);
    CHECK(std::string(mmt_last_error()).find("no sign change") != std::string::npos);
}

TEST_CASE("check reports the structural verdicts") {
    Model m;
    REQUIRE(mmt_model_from_json(kModelA, &m.ptr) == MMT_OK);
    Str out;
    REQUIRE(mmt_check(m.ptr, 0.0, &out.ptr) == MMT_OK);
    const json j = json::parse(out.s());
    CHECK(j.at("period").get<int>() == 1);
    CHECK(!j.at("condition_g").at("holds").get<bool>());
    CHECK(!j.at("degeneracy").at("degenerate").get<bool>());
    CHECK(j.at("arithmetic").at("arithmetic").get<bool>());
}

TEST_CASE("simulate + record access + CSV round trip") {
    Model m;
    REQUIRE(mmt_model_from_json(kModelA, &m.ptr) == MMT_OK);
    mmt_sim_opts opts{};
    opts.seed = 42;
    opts.n_per_state = 500;
    opts.workers = 2;
    Batch b;
    REQUIRE(mmt_simulate(m.ptr, &opts, &b.ptr) == MMT_OK);
    CHECK(mmt_batch_states(b.ptr) == 1);
    CHECK(mmt_batch_rows_per_state(b.ptr) == 500);
    double r = 0, xi0 = 0, rho0 = 0;
    int terms = 0;
    REQUIRE(mmt_batch_record(b.ptr, 0, 0, &r, &xi0, &rho0, &terms) == MMT_OK);
    CHECK(xi0 == 1.0);
    CHECK(terms >= 64);
    CHECK(mmt_batch_record(b.ptr, 0, 500, &r, &xi0, &rho0, &terms) == MMT_ERR_ARGUMENT);

    const char* path = "capi_batch_roundtrip.csv";
    REQUIRE(mmt_batch_to_csv_file(b.ptr, path) == MMT_OK);
    Batch b2;
    REQUIRE(mmt_batch_from_csv_file(path, &b2.ptr) == MMT_OK);
    REQUIRE(mmt_batch_rows_per_state(b2.ptr) == 500);
    for (size_t i = 0; i < 500; ++i) {
        double r1, r2;
        REQUIRE(mmt_batch_record(b.ptr, 0, i, &r1, nullptr, nullptr, nullptr) == MMT_OK);
        REQUIRE(mmt_batch_record(b2.ptr, 0, i, &r2, nullptr, nullptr, nullptr) == MMT_OK);
        CHECK(r1 == r2); // %.17g round-trips doubles exactly
    }
    std::remove(path);
}

TEST_CASE("tails through the C surface") {
    Model m;
    REQUIRE(mmt_model_from_json(kModelA, &m.ptr) == MMT_OK);
    mmt_sim_opts sopts{};
    sopts.seed = 7;
    sopts.n_per_state = 50000;
    sopts.workers = 2;
    Batch b;
    REQUIRE(mmt_simulate(m.ptr, &sopts, &b.ptr) == MMT_OK);
    mmt_tails_opts topts{};
    topts.sym_paths = 2000;
    topts.sym_seed = 3;
    Str out;
    REQUIRE(mmt_tails(m.ptr, b.ptr, &topts, &out.ptr) == MMT_OK);
    const json j = json::parse(out.s());
    CHECK(j.at("kappa").get<double>() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(j.at("constants").at("branch").get<std::string>() == "positive");
    CHECK(j.at("constants").at("K1")[0].get<double>() ==
          doctest::Approx(3.0 / std::log(2.0)).epsilon(1e-9));
    CHECK(!j.at("curves").empty());
    CHECK(!j.at("symmetrization").empty());
}
