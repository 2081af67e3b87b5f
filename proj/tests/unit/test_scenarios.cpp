#include "doctest.h"

#include <cmath>
#include <sstream>

#include "frontlab/errors.hpp"
#include "frontlab/scenarios.hpp"

using namespace frontlab;

namespace {

// Closed-form cubic primitives, independent of the library's quadrature.
double cubic_F(double a, double s) { return s * s * (-a / 2 + (1 + a) * s / 3 - s * s / 4); }
double cubic_margin(double a, int n) {
    const double R = n - 1;
    return cubic_F(a, 1.0) + (R * R - 1) * cubic_F(a, a);
}

// Root of a decreasing function by bisection.
double bisect(double lo, double hi, const std::function<double(double)>& g) {
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

const Verdict P = Verdict::Propagate, B = Verdict::Block, S = Verdict::Source, M = Verdict::Marginal;

}  // namespace

TEST_CASE("transitivity audit on hand-made rows") {
    int checked = 0;
    CHECK(transitivity_audit({{S, P, P}, {P, S, P}, {P, P, S}}, &checked).empty());
    CHECK(checked == 6);
    const auto bad = transitivity_audit({{S, P, B}, {B, S, P}, {B, B, S}}, &checked);
    REQUIRE(bad.size() == 1);
    CHECK(bad[0].i == 1);
    CHECK(bad[0].j == 2);
    CHECK(bad[0].k == 3);
    CHECK(transitivity_audit({{S, P, M}, {B, S, P}, {B, B, S}}, &checked).empty());
    CHECK(checked == 0);
    CHECK(row_string({S, P, B, M}) == "-10?");
}

TEST_CASE("propagation matrices of equal stars") {
    const auto b = make_cubic(0.25);
    const auto five = propagation_matrix(star_graph(5), b);
    const auto six = propagation_matrix(star_graph(6), b);
    for (int i = 1; i <= 5; ++i) {
        for (int j = 1; j <= 5; ++j) CHECK(five.at(i, j) == (i == j ? S : P));
    }
    for (int i = 1; i <= 6; ++i) {
        for (int j = 1; j <= 6; ++j) CHECK(six.at(i, j) == (i == j ? S : B));
    }
    CHECK(five.violations.empty());
    CHECK(five.triples_checked == 5 * 4 * 3);
    CHECK(six.triples_checked == 0);
    CHECK(five.symmetric());
    for (const auto& p : six.profiles) {
        const auto d = dichotomy_audit(p);
        CHECK(d.far_ok);
        CHECK(d.traces_monotone);
        const auto r = classify_invasion(p);
        CHECK(r.kind == InvasionKind::Blocked);
        CHECK(classify_invasion(p).sup_deficit == r.sup_deficit);
    }
    const auto c = classify_invasion(five.profiles[0]);
    CHECK(c.kind == InvasionKind::Complete);
    CHECK(c.sup_deficit < kCompleteDeficit);
}

TEST_CASE("cubic parameter scans") {
    const auto partial = scan_cubic_a(3, 4);
    CHECK(cubic_margin(partial.a, 3) > 0.0);
    CHECK(cubic_margin(partial.a, 4) < 0.0);
    CHECK(partial.margin_propagate == doctest::Approx(cubic_margin(partial.a, 3)).epsilon(1e-6));
    // Both margins decrease in a, so the balanced point solves m3 + m4 = 0.
    const double balanced = bisect(0.2, 0.45, [](double a) { return cubic_margin(a, 3) + cubic_margin(a, 4); });
    CHECK(partial.a == doctest::Approx(balanced).epsilon(1e-6));
    const double lo = bisect(0.01, 0.49, [](double a) { return cubic_margin(a, 4); });
    const double hi = bisect(0.01, 0.49, [](double a) { return cubic_margin(a, 3); });
    CHECK(partial.lo >= lo);
    CHECK(partial.lo - lo < 1e-3);
    CHECK(partial.hi <= hi);
    CHECK(hi - partial.hi < 1e-3);

    const auto oneway = scan_cubic_a(3, 5);
    CHECK(cubic_margin(oneway.a, 3) > 0.0);
    CHECK(cubic_margin(oneway.a, 5) < 0.0);
    // The default a = 1/4 fails the one-way condition.
    CHECK(cubic_margin(0.25, 5) > 0.0);

    try {
        scan_cubic_a(3, 3);
        FAIL("expected ConditionUnsatisfiable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConditionUnsatisfiable);
    }
}

TEST_CASE("partial propagation") {
    const auto s = scenario_partial();
    CHECK(s.study.stabilized);
    CHECK(s.expected);
    const Row& r = s.study.rows.at(0);
    CHECK(r[4] == P);
    CHECK(r[1] == B);
    CHECK(r[2] == B);
    CHECK(r[3] == B);
    CHECK(s.reports.at(0).kind == InvasionKind::Blocked);
    CHECK_THROWS_AS(scenario_partial(0.25), Error);
}

TEST_CASE("one-way propagation gives an asymmetric matrix") {
    const auto s = scenario_oneway();
    CHECK(s.study.stabilized);
    CHECK(s.expected);
    CHECK(s.study.rows.at(0)[1] == P);
    CHECK(s.study.rows.at(1)[0] == B);
    int checked = -1;
    CHECK(transitivity_audit(s.study.rows, &checked).empty());
    CHECK(checked == 0);
    for (const auto& p : s.study.profiles) CHECK(dichotomy_audit(p).far_ok);
}

TEST_CASE("reservoir forces incomplete invasion") {
    const auto b = make_cubic(0.25);
    const auto r = scenario_reservoir(b);
    const auto& h = r.hypothesis;
    CHECK(h.delta == doctest::Approx(0.125));
    CHECK(h.mu1 == doctest::Approx(M_PI * M_PI).epsilon(1e-3));
    // σ by dense sampling of the closed-form expression.
    double sigma = 1e300;
    for (int k = 0; k <= 200000; ++k) {
        const double s = k / 200000.0;
        sigma = std::min(sigma, 0.5 * h.mu_star * (s - h.delta) * (s - h.delta) - cubic_F(0.25, s));
    }
    CHECK(h.sigma == doctest::Approx(sigma).epsilon(1e-6));
    CHECK(h.branch == 'b');
    CHECK(h.lhs == doctest::Approx(std::sqrt(2 * (cubic_F(0.25, 1) - cubic_F(0.25, 0.25)))));
    CHECK(h.holds());
    CHECK(r.asserted);
    CHECK(r.pass);
    CHECK(r.mean <= h.delta + 1e-2);
    CHECK(r.invasion.kind == InvasionKind::Incomplete);
    CHECK(r.invasion.row[1] == P);
    CHECK(r.invasion.reservoir_mean.value() == r.mean);
    require_hypothesis(r);

    ReservoirParams small;
    small.m = 20;
    const auto weak = scenario_reservoir(b, small);
    CHECK_FALSE(weak.asserted);
    CHECK(h.lhs > weak.hypothesis.rhs);
    try {
        require_hypothesis(weak);
        FAIL("expected HypothesisUnmet");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HypothesisUnmet);
    }

    const auto short_stem = reservoir_hypothesis(b, 0.125, 249, 1.0, 1.0);
    CHECK(short_stem.branch == 'a');
    CHECK(short_stem.lhs == doctest::Approx(0.5 + (b.F1() - b.Fa())));
}

TEST_CASE("plain propagating star is a complete invasion") {
    const auto lp = limit_profile(star_graph(3), make_cubic(0.25), 1);
    const auto r = classify_invasion(lp);
    CHECK(r.kind == InvasionKind::Complete);
    CHECK(r.sup_deficit < 1e-3);
}

TEST_CASE("perturbed stars keep the base verdict") {
    const auto b = make_cubic(0.25);
    const auto five = scenario_perturbed_star(b, 5, {0.05, 0.025});
    CHECK(five.base == P);
    CHECK(five.runs.size() == 3);
    for (const auto& run : five.runs) CHECK(run.match);
    CHECK(five.complete_ok);
    CHECK(five.threshold == doctest::Approx(0.05));

    const auto six = scenario_perturbed_star(b, 6, {0.05, 0.025});
    CHECK(six.base == B);
    for (const auto& run : six.runs) {
        CHECK(run.match);
        CHECK(run.invasion.kind == InvasionKind::Blocked);
    }
}

TEST_CASE("blocking beyond a far junction") {
    const auto b = make_cubic(0.25);
    const auto front = scenario_faraway(b, FarawayGeometry::Front, 6, 2, 7.5, 30.0);
    CHECK(front.study.stabilized);
    CHECK(front.blocked);
    CHECK(front.far_paths.size() == 5);
    const auto behind = scenario_faraway(b, FarawayGeometry::Behind, 6, 2, 7.5, 30.0);
    CHECK(behind.blocked);
    CHECK(behind.far_paths.size() == 5);
    try {
        scenario_faraway(b, FarawayGeometry::Front, 5);
        FAIL("expected HypothesisUnmet");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::HypothesisUnmet);
    }
}

TEST_CASE("two-star thickness sweep") {
    SweepSpec spec;
    spec.values = {3.5, 4.0, 4.392, 4.5, 5.0};
    const auto rows = sweep(spec);
    REQUIRE(rows.size() == 5);
    for (std::size_t k = 0; k < rows.size(); ++k) CHECK(rows[k].value == spec.values[k]);
    CHECK(rows[1].reported == "propagate");
    CHECK(rows[2].reported == "marginal");
    CHECK(rows[3].reported == "block");
    CHECK(rows[4].reported == "block");
    CHECK(rows[1].margin == doctest::Approx(cubic_margin(0.25, 5)));
    CHECK(rows[4].margin == doctest::Approx(cubic_margin(0.25, 6)));
    const double r_star = std::sqrt(1 - cubic_F(0.25, 1) / cubic_F(0.25, 0.25));
    CHECK(r_star == doctest::Approx(4.3916).epsilon(1e-4));

    std::ostringstream csv;
    write_sweep_csv(csv, rows, {"a=0.25"});
    const std::string text = csv.str();
    CHECK(text.rfind("# a=0.25\nfamily,value,a,margin", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 7);

    SweepSpec bad;
    bad.family = SweepFamily::StarDegree;
    bad.values = {1.0};
    const auto err = sweep(bad);
    CHECK(err[0].reported == "error");
    CHECK_FALSE(err[0].error.empty());
    CHECK_THROWS_AS(sweep_family_from_string("nope"), Error);
}

TEST_CASE("scenario documents") {
    const auto doc = nlohmann::json::parse(R"({
        "graph": {"name": "star5"},
        "vertex": [{"id": "P"}],
        "edge": [],
        "outer": [{"index": 1, "exit": "P"}, {"index": 2, "exit": "P"}, {"index": 3, "exit": "P"}],
        "nonlinearity": {"kind": "cubic", "a": 0.25},
        "solver": {"h": 0.04},
        "scenario": {"kind": "matrix", "expect": ["-11", "1-1", "11-"]}
    })");
    const auto out = run_scenario(doc);
    CHECK(out.status == 0);
    CHECK(out.csv.find("source,PR_1,PR_2,PR_3") != std::string::npos);

    auto wrong = doc;
    wrong["scenario"]["expect"] = {"-00", "1-1", "11-"};
    CHECK(run_scenario(wrong).status == 1);

    auto warn = doc;
    warn["scenario"] = {{"kind", "faraway"}, {"junction_degree", 4}};
    CHECK(run_scenario(warn).status == 2);

    auto unknown = doc;
    unknown["scenario"]["kind"] = "nope";
    CHECK_THROWS_AS(run_scenario(unknown), Error);

    CHECK_THROWS_AS(solver_params_from_json(nlohmann::json{{"hh", 1}}), Error);
    CHECK(solver_params_from_json(nlohmann::json{{"tol", 1e-9}}).tol == 1e-9);
    CHECK(bistable_from_json(nlohmann::json{{"kind", "cubic"}, {"a", 0.3}}).a() == doctest::Approx(0.3));
    CHECK_THROWS_AS(bistable_from_json(nlohmann::json{{"kind", "quintic"}}), Error);
}
