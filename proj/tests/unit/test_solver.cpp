#include "doctest.h"

#include <random>

#include "frontlab/errors.hpp"
#include "frontlab/solver.hpp"

using namespace frontlab;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::InvalidDocument;
}

// Star criterion F(1) + (R² - 1) F(a), where R is the total thickness of
// the target paths over the source thickness.
double star_margin(double a, double r2) {
    auto F = [a](double s) { return s * s * (-a / 2 + (1 + a) * s / 3 - s * s / 4); };
    return F(1.0) + (r2 - 1.0) * F(a);
}

void check_dichotomy(const LimitProfile& lp) {
    for (std::size_t j = 0; j < lp.far_values.size(); ++j) {
        const double far = lp.far_values[j];
        CHECK((far < 1e-2 || far > 1.0 - 1e-2));
    }
}

}  // namespace

TEST_CASE("equilibria are preserved by a step") {
    const auto b = make_cubic(0.25);
    const auto grid = discretize(two_stars_graph(3, 2.0, 5.0), 0.05);
    for (double c : {0.0, 0.25, 1.0}) {
        const auto u = step(GridField::constant(grid, c), b, 0.5);
        CHECK((u.values.array() - c).abs().maxCoeff() < 1e-13);
    }
}

TEST_CASE("pure diffusion conserves mass") {
    const auto grid = discretize(perturbed_star(4, 3.0, 6.0), 0.05);
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(grid->size()));
    for (auto& x : u) x = dist(rng);
    const double m0 = grid->mass().dot(u);
    for (double theta : {1.0, 0.5}) {
        Evolver ev(grid, nullptr, 0.3, theta);
        Eigen::VectorXd v = u;
        for (int k = 0; k < 50; ++k) {
            ev.step(v);
            CHECK(std::abs(grid->mass().dot(v) - m0) < 1e-12 * m0);
        }
    }
}

TEST_CASE("energy decreases along a fixed-boundary evolution") {
    const auto b = make_cubic(0.25);
    const auto grid = discretize(melon_graph(3, 4.0), 0.05);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    GridField u = GridField::constant(grid, 0.0);
    for (auto& x : u.values) x = dist(rng);
    const auto A = grid->vertex_dof("A"), B = grid->vertex_dof("B");
    u.values[static_cast<Eigen::Index>(A)] = 0.0;
    u.values[static_cast<Eigen::Index>(B)] = 1.0;
    Evolver ev(grid, &b, SolverParams{}.time_step(b), 1.0, {A, B});
    double J = local_energy(u, b);
    for (int k = 0; k < 300; ++k) {
        ev.step(u.values);
        const double next = local_energy(u, b);
        CHECK(next <= J + 1e-12);
        J = next;
    }
    CHECK(u.values[static_cast<Eigen::Index>(A)] == 0.0);
    CHECK(u.values[static_cast<Eigen::Index>(B)] == 1.0);
}

TEST_CASE("comparison principle") {
    const auto b = make_cubic(0.3);
    const auto grid = discretize(partial_propagation_graph(2.0, 20.0), 0.05);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Eigen::VectorXd lo(static_cast<Eigen::Index>(grid->size())), hi = lo;
    for (Eigen::Index k = 0; k < lo.size(); ++k) {
        const double x = dist(rng), y = dist(rng);
        lo[k] = std::min(x, y);
        hi[k] = std::max(x, y);
    }
    Evolver ev(grid, &b, SolverParams{}.time_step(b));
    for (int k = 0; k < 200; ++k) {
        ev.step(lo);
        ev.step(hi);
        CHECK((lo - hi).maxCoeff() <= 1e-9);
    }
}

TEST_CASE("local energy of constant fields") {
    const auto b = make_cubic(0.25);
    const auto grid = discretize(reservoir_graph(3, 1.0, 3, 2.0, 20.0), 0.05);
    CHECK(local_energy(GridField::constant(grid, 0.0), b) == 0.0);
    const std::vector<std::string> melon{"r1", "r2", "r3"};
    CHECK(local_energy(GridField::constant(grid, 1.0), b, melon) == doctest::Approx(-6.0 * b.F1()).epsilon(1e-12));
    CHECK(code_of([&] { local_energy(GridField::constant(grid, 1.0), b, {"r9"}); }) == ErrorCode::UnknownEdge);
}

TEST_CASE("front initial data") {
    const auto b = make_cubic(0.25);
    const auto grid = discretize(star_graph(3), 0.02);
    const auto wave = traveling_wave(b);
    const auto u = front_initial_data(grid, wave, 1, 24.0);
    CHECK(u.at("outer1", 1200) == doctest::Approx(0.25).epsilon(1e-9));
    const double at_p = u.values[static_cast<Eigen::Index>(grid->vertex_dof("P"))];
    CHECK(at_p <= wave.value(24.0));
    CHECK(at_p < 1e-6);
    for (const char* id : {"outer2", "outer3"}) {
        const auto tr = u.trace(id);
        for (std::size_t k = 1; k < tr.size(); ++k) CHECK(tr[k] == 0.0);
    }
    CHECK(code_of([&] { front_initial_data(grid, wave, 1, 40.0); }) == ErrorCode::OffsetOutOfRange);
    CHECK(code_of([&] { front_initial_data(grid, wave, 1, 0.0); }) == ErrorCode::OffsetOutOfRange);
}

TEST_CASE("zero data stays zero") {
    const auto b = make_cubic(0.25);
    const auto grid = discretize(star_graph(3), 0.05);
    const auto lp = evolve_to_steady(GridField::constant(grid, 0.0), b, 0, {});
    CHECK(lp.max_value == 0.0);
    for (double v : lp.junction_values) CHECK(v == 0.0);
    for (auto v : lp.verdicts) CHECK(v == Verdict::Block);
}

TEST_CASE("verdict bands") {
    CHECK(classify_value(0.5, 0.39, 0.02) == Verdict::Propagate);
    CHECK(classify_value(0.38, 0.39, 0.02) == Verdict::Marginal);
    CHECK(classify_value(0.3, 0.39, 0.02) == Verdict::Block);
    CHECK(matrix_symbol(Verdict::Marginal) == '?');
}

TEST_CASE("star graphs follow the thickness criterion") {
    const auto b = make_cubic(0.25);
    REQUIRE(star_margin(0.25, 4.0) > 0.0);
    REQUIRE(star_margin(0.25, 25.0) < 0.0);

    const auto three = limit_profile(star_graph(3), b, 1);
    CHECK(three.verdict(2) == Verdict::Propagate);
    CHECK(three.verdict(3) == Verdict::Propagate);
    CHECK(three.verdict(1) == Verdict::Source);
    CHECK(three.monotone);
    CHECK(three.min_value >= 0.0);
    CHECK(three.max_value <= 1.0 + 1e-8);
    check_dichotomy(three);

    const auto six = limit_profile(star_graph(6), b, 1);
    for (int j = 2; j <= 6; ++j) CHECK(six.verdict(j) == Verdict::Block);
    CHECK(six.monotone);
    check_dichotomy(six);
}

TEST_CASE("two-star with unequal thickness") {
    const auto b = make_cubic(0.25);
    REQUIRE(star_margin(0.25, 16.0) > 0.0);
    REQUIRE(star_margin(0.25, 25.0) < 0.0);
    const std::vector<double> t14{1.0, 4.0}, t15{1.0, 5.0};
    CHECK(limit_profile(star_graph(t14), b, 1).verdict(2) == Verdict::Propagate);
    CHECK(limit_profile(star_graph(t14), b, 2).verdict(1) == Verdict::Propagate);
    const auto blocked = limit_profile(star_graph(t15), b, 1);
    CHECK(blocked.verdict(2) == Verdict::Block);
    check_dichotomy(blocked);
}

TEST_CASE("short truncation is rejected") {
    SolverParams p;
    p.truncation = 15.0;
    CHECK(code_of([&] { limit_profile(star_graph(3), make_cubic(0.25), 1, p); }) == ErrorCode::OutOfRange);
}

TEST_CASE("general initial data converge to the front limit") {
    const auto b = make_cubic(0.25);
    for (int n : {3, 6}) {
        const auto g = star_graph(n);
        const auto front = limit_profile(g, b, 1);
        const double R = bump_min_radius(b).radius + 1.0;
        const auto a = cauchy_run(g, b, 1, bump_initial(b, R, R + 1.0));
        CHECK((a.field.values - front.field.values).cwiseAbs().maxCoeff() < 1e-3);
        const auto plateau = cauchy_run(g, b, 1, plateau_initial(b, 0.1, 8.0, 22.0));
        CHECK((plateau.field.values - front.field.values).cwiseAbs().maxCoeff() < 1e-3);
    }
}

TEST_CASE("initial class validation") {
    const auto b = make_cubic(0.25);
    CauchyInitial zero;
    zero.cls = InitialClass::B;
    zero.profile = [](double) { return 0.0; };
    CHECK(code_of([&] { cauchy_run(star_graph(3), b, 1, zero); }) == ErrorCode::InvalidInitialClass);

    CauchyInitial above = zero;
    above.profile = [](double) { return 0.9; };
    try {
        cauchy_run(star_graph(3), b, 1, above);
        FAIL("expected InvalidInitialClass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidInitialClass);
        CHECK(std::string(e.what()).find("outer1 s=0") != std::string::npos);
    }
}
