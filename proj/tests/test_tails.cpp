#include <doctest.h>

#include "fixtures.hpp"
#include "oracles.hpp"

#include "errors.hpp"
#include "montecarlo.hpp"
#include "spectral.hpp"
#include "structure.hpp"
#include "tails.hpp"

#include <algorithm>
#include <cmath>

using namespace mmtail;

TEST_CASE("hill estimator recovers an exact Pareto index") {
    const long n = 1000000;
    std::vector<double> x;
    x.reserve(n);
    Rng rng = stream_for(1234, 0, 0);
    for (long i = 0; i < n; ++i) x.push_back(oracles::pareto_draw(2.0, rng.uniform()));
    const HillEstimate h = hill_estimator(x, 10000);
    CHECK(h.kappa_hat >= 1.9);
    CHECK(h.kappa_hat <= 2.1);
    CHECK(h.ci_lo <= 2.0);
    CHECK(h.ci_hi >= 2.0);
}

TEST_CASE("hill estimator rejects tied samples") {
    const std::vector<double> x(100, 5.0);
    CHECK_THROWS_WITH_AS(hill_estimator(x, 10), doctest::Contains("degenerate"),
                         ComputationError);
}

TEST_CASE("hill estimator argument contract") {
    const std::vector<double> x{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(hill_estimator(x, 1), ComputationError);
    CHECK_THROWS_AS(hill_estimator(x, 3), ComputationError);
}

TEST_CASE("hill on model_a samples brackets the spectral kappa") {
    const SampleBatch b = simulate_batch(fixtures::model_a(), 1000000, 321, 2);
    std::vector<double> abs_r;
    abs_r.reserve(b.by_state[0].size());
    for (const auto& r : b.by_state[0]) abs_r.push_back(std::abs(r.r));
    const HillEstimate h = hill_estimator(abs_r, 1000);
    CHECK(h.kappa_hat >= 0.85);
    CHECK(h.kappa_hat <= 1.15);
    CHECK(h.ci_lo <= 1.0);
    CHECK(h.ci_hi >= 1.0);
}

TEST_CASE("tail curves: model_d vanishes beyond |Gamma| = 3") {
    const SampleBatch b = simulate_batch(fixtures::model_d(), 50000, 2, 2);
    const auto curves = tail_curves(b, 1.0, {3.5, 5.0, 10.0});
    for (const auto& p : curves[0].pos) {
        CHECK(p.value == 0.0);
        CHECK(p.exceedances == 0);
    }
    for (const auto& p : curves[0].neg) CHECK(p.value == 0.0);
}

TEST_CASE("tail curves: survival is nonincreasing in t before weighting") {
    const SampleBatch b = simulate_batch(fixtures::model_a(), 100000, 9, 2);
    std::vector<double> grid;
    for (double t = 1.0; t <= 512.0; t *= 2.0) grid.push_back(t);
    const auto curves = tail_curves(b, 1.0, grid);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(curves[0].pos[i].survival <= curves[0].pos[i - 1].survival);
        CHECK(curves[0].neg[i].survival <= curves[0].neg[i - 1].survival);
    }
}

TEST_CASE("plateau estimator is unbiased on an exact Pareto tail") {
    // P(X > t) = t^-2 exactly: the weighted curve is identically 1
    const long n = 2000000;
    std::vector<double> x;
    x.reserve(n);
    Rng rng = stream_for(777, 0, 0);
    for (long i = 0; i < n; ++i) x.push_back(oracles::pareto_draw(2.0, rng.uniform()));
    std::vector<double> sorted(x);
    std::sort(sorted.begin(), sorted.end());
    const std::vector<double> grid = plateau_grid(sorted, 12);
    REQUIRE(!grid.empty());
    const PlateauEstimate pe = plateau_estimate(x, 2.0, grid);
    REQUIRE(pe.valid);
    CHECK(std::abs(pe.value - 1.0) <= 3.0 * pe.se);
    CHECK(pe.se > 0.0);
    CHECK(pe.max_point / pe.min_point < 1.5);
}

TEST_CASE("goldie constant, positive branch: model_a is exact") {
    // R - (R - xi0) = xi0 = 1 with zero variance, so the estimator must hit
    // K = 1/(drift * kappa) = 3/log 2 up to roundoff
    const SampleBatch b = simulate_batch(fixtures::model_a(), 1000, 4, 1);
    const SpectralAnalysis sp = analyze_spectral(fixtures::model_a());
    const ConstantEstimates ce = goldie_constant_positive(fixtures::model_a(), sp, b);
    CHECK(ce.branch == "positive");
    CHECK(ce.k1[0] == doctest::Approx(3.0 / std::log(2.0)).epsilon(1e-9));
    CHECK(ce.k1_se[0] <= 1e-12);
    CHECK(ce.kneg1[0] == 0.0);
}

TEST_CASE("goldie constant: regime violation on signed atoms") {
    const SampleBatch b = simulate_batch(fixtures::model_d(), 100, 4, 1);
    SpectralAnalysis sp = analyze_spectral(fixtures::model_d());
    CHECK_THROWS_WITH_AS(goldie_constant_positive(fixtures::model_d(), sp, b),
                         doctest::Contains("regime violation"), ComputationError);
}

TEST_CASE("goldie constant, mixed branch: Condition G forces K1 == K-1") {
    const SampleBatch b = simulate_batch(fixtures::model_a_prime(), 20000, 6, 2);
    const SpectralAnalysis sp = analyze_spectral(fixtures::model_a_prime());
    const ConditionG g = check_condition_g(fixtures::model_a_prime());
    REQUIRE(g.holds);
    const ConstantEstimates ce = goldie_constant_mixed(fixtures::model_a_prime(), sp, g, b);
    CHECK(ce.branch == "mixed-conditionG");
    CHECK(ce.k1[0] == ce.kneg1[0]);
    CHECK(ce.k1[0] > 0.0);
}

TEST_CASE("goldie constant, mixed partition branch reduces to the positive formula") {
    // all-positive model routed through the partition branch must reproduce
    // the positive-branch K1 and report a zero negative constant
    const MmpModel m = fixtures::model_a();
    const SampleBatch b = simulate_batch(m, 20000, 8, 2);
    const SpectralAnalysis sp = analyze_spectral(m);
    const ConditionG g = check_condition_g(m);
    REQUIRE(!g.holds);
    REQUIRE(g.a_neg1.empty());
    const ConstantEstimates mixed = goldie_constant_mixed(m, sp, g, b);
    const ConstantEstimates positive = goldie_constant_positive(m, sp, b);
    CHECK(mixed.branch == "mixed-partition");
    CHECK(mixed.k1[0] == doctest::Approx(positive.k1[0]).epsilon(1e-12));
    CHECK(mixed.kneg1[0] == 0.0);
}

TEST_CASE("median gamma: degenerate fixture hits Gamma exactly") {
    const SampleBatch b = simulate_batch(fixtures::model_d(), 10001, 5, 2);
    const Vec med = median_gamma(b);
    CHECK(med[0] == doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("median gamma: symmetric law centers at zero") {
    // xi = +-1 with equal weight, rho > 0 as in model_a: R is symmetric
    Mat h(1);
    h.at(0, 0) = 1.0;
    std::vector<Edge> edges{{0,
                             0,
                             1.0,
                             {{1.0, 2.0, 1.0 / 6.0},
                              {-1.0, 2.0, 1.0 / 6.0},
                              {1.0, 0.5, 1.0 / 3.0},
                              {-1.0, 0.5, 1.0 / 3.0}}}};
    const MmpModel m = make_model({"s0"}, h, edges, 2.0, 4.0);
    const SampleBatch b = simulate_batch(m, 200000, 12, 2);
    const Vec med = median_gamma(b);
    std::vector<double> r;
    for (const auto& rec : b.by_state[0]) r.push_back(rec.r);
    std::sort(r.begin(), r.end());
    const double iqr = r[static_cast<std::size_t>(0.75 * r.size())] -
                       r[static_cast<std::size_t>(0.25 * r.size())];
    const double se = 1.36 * iqr / std::sqrt(static_cast<double>(r.size()));
    CHECK(std::abs(med[0]) <= 4.0 * se);
}

TEST_CASE("median gamma: single sample per state returns that sample") {
    const SampleBatch b = simulate_batch(fixtures::model_b(), 1, 3, 1);
    const Vec med = median_gamma(b);
    CHECK(med[0] == b.by_state[0][0].r);
    CHECK(med[1] == b.by_state[1][0].r);
}

TEST_CASE("symmetrization check: model_d is flat at Gamma") {
    const Vec gamma{3.0};
    const auto rows = symmetrization_check(fixtures::model_d(), gamma, {2.0, 4.0, 10.0}, 20000, 9);
    for (const auto& row : rows) {
        CHECK(row.pass);
        if (row.t > 3.0) {
            CHECK(row.lhs == 0.0);
            CHECK(row.rhs_half == 0.0);
        } else {
            CHECK(row.lhs == 1.0); // t below the support: everything exceeds
        }
    }
}

TEST_CASE("symmetrization check: model_a passes on the spec grid") {
    const SampleBatch b = simulate_batch(fixtures::model_a(), 100000, 14, 2);
    const Vec med = median_gamma(b);
    const auto rows =
        symmetrization_check(fixtures::model_a(), med, {10.0, 50.0, 100.0}, 100000, 15);
    REQUIRE(rows.size() == 3);
    for (const auto& row : rows) CHECK(row.pass);
}

TEST_CASE("analyze_tails: full report on model_a") {
    const MmpModel m = fixtures::model_a();
    const SampleBatch b = simulate_batch(m, 200000, 100, 2);
    const SpectralAnalysis sp = analyze_spectral(m);
    const StructureReport st = analyze_structure(m);
    TailsOptions opts;
    opts.sym_paths = 20000;
    const TailReport tr = analyze_tails(m, b, sp, st, opts);
    CHECK(tr.kappa == doctest::Approx(1.0).epsilon(1e-9));
    REQUIRE(tr.hill.has_value());
    CHECK(tr.hill->kappa_hat > 0.5);
    CHECK(tr.constants.branch == "positive");
    REQUIRE(!tr.t_grid.empty());
    REQUIRE(tr.plateau_pos[0].valid);
    // formula vs plateau at modest n: same limit within 4 combined SE
    const double combined = std::sqrt(tr.plateau_pos[0].se * tr.plateau_pos[0].se +
                                      tr.constants.k1_se[0] * tr.constants.k1_se[0]);
    CHECK(std::abs(tr.constants.k1[0] - tr.plateau_pos[0].value) <= 4.0 * combined);
    for (const auto& row : tr.symmetrization) CHECK(row.pass);
}

TEST_CASE("hill CI brackets the spectral kappa on every non-degenerate fixture") {
    struct Case {
        MmpModel model;
        TruncationPolicy policy;
    };
    // eps matched to the tail: at kappa ~ 0.11 the default 1e-12 leaves a
    // visible eps^kappa mass deficit in the extreme order statistics
    const std::vector<Case> cases{{fixtures::model_a(), {}},
                                  {fixtures::model_a_prime(), {}},
                                  {fixtures::model_b(), {1e-30, 64, 10000}}};
    for (const auto& c : cases) {
        const double kappa = solve_kappa(c.model);
        const long per_state = 1000000 / c.model.size();
        const SampleBatch b = simulate_batch(c.model, per_state, 2718, 2, c.policy);
        std::vector<double> abs_r;
        for (const auto& recs : b.by_state)
            for (const auto& r : recs) abs_r.push_back(std::abs(r.r));
        const HillEstimate h = hill_estimator(abs_r, 1000);
        CHECK(h.ci_lo <= kappa);
        CHECK(h.ci_hi >= kappa);
    }
}

TEST_CASE("plateau boundedness is stable from n = 10^6 to 4x10^6") {
    const MmpModel m = fixtures::model_a();
    const SampleBatch b4 = simulate_batch(m, 4000000, 31415, 2);
    SampleBatch b1;
    b1.by_state.resize(1);
    b1.by_state[0].assign(b4.by_state[0].begin(), b4.by_state[0].begin() + 1000000);
    auto plateau_abs = [](const SampleBatch& b) {
        std::vector<double> abs_v;
        for (const auto& r : b.by_state[0]) abs_v.push_back(std::abs(r.r));
        std::vector<double> sorted(abs_v);
        std::sort(sorted.begin(), sorted.end());
        return plateau_estimate(abs_v, 1.0, plateau_grid(sorted, 12));
    };
    const PlateauEstimate p1 = plateau_abs(b1);
    const PlateauEstimate p4 = plateau_abs(b4);
    REQUIRE(p1.valid);
    REQUIRE(p4.valid);
    CHECK(std::isfinite(p1.max_point));
    CHECK(std::abs(p4.value - p1.value) / p1.value < 0.10);
}

TEST_CASE("analyze_tails: degenerate branch skips constants and hill") {
    const MmpModel m = fixtures::model_d();
    const SampleBatch b = simulate_batch(m, 10000, 6, 2);
    const SpectralAnalysis sp = analyze_spectral(m);
    const StructureReport st = analyze_structure(m);
    TailsOptions opts;
    opts.sym_paths = 1000;
    opts.t_grid = {3.5, 5.0, 10.0};
    const TailReport tr = analyze_tails(m, b, sp, st, opts);
    CHECK(tr.constants.branch == "degenerate");
    CHECK(!tr.hill.has_value()); // every |R| equals 3
    CHECK(tr.constants.k1[0] == 0.0);
    CHECK(tr.medians[0] == doctest::Approx(3.0));
}
