#include "doctest.h"

#include <random>

#include "frontlab/errors.hpp"
#include "frontlab/solver.hpp"
#include "frontlab/stationary.hpp"

using namespace frontlab;

namespace {

double cubic_F(double a, double s) { return s * s * (-a / 2 + (1 + a) * s / 3 - s * s / 4); }

}  // namespace

TEST_CASE("Dirichlet problems") {
    const auto seg = harmonic_dirichlet(segment_graph(1.0, 2.0), {{"A", 0.0}, {"B", 1.0}});
    CHECK(seg.slope("e") == doctest::Approx(1.0));
    CHECK(seg.boundary_flux.at("B") == doctest::Approx(2.0));
    CHECK(seg.boundary_flux.at("A") == doctest::Approx(-2.0));

    const auto tri = triangle_sigma(3.0);
    const FiniteGraph g(tri.vertices, tri.edges);
    const auto flat = harmonic_dirichlet(g, {{"S1", 1.0}});
    for (double v : flat.potential) CHECK(v == doctest::Approx(1.0));

    const auto melon = harmonic_dirichlet(melon_graph(3, 1.0), {{"A", 0.0}, {"B", 1.0}});
    for (const auto& e : melon.graph.edges()) CHECK(std::abs(melon.slope(e.id)) == doctest::Approx(1.0));
    CHECK(melon.boundary_flux.at("B") == doctest::Approx(3.0));

    try {
        harmonic_dirichlet(segment_graph(1.0), {});
        FAIL("expected EmptyBoundary");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::EmptyBoundary);
    }
}

TEST_CASE("harmonic maximum principle and identities on random graphs") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (unsigned seed = 1; seed <= 20; ++seed) {
        const auto g = random_center_graph(seed, 7, 3);
        std::map<std::string, double> bc;
        bc[g.vertices().front().id] = dist(rng);
        bc[g.vertices().back().id] = dist(rng);
        bc[g.vertices()[3].id] = dist(rng);
        const auto s = harmonic_dirichlet(g.center(), bc);
        double lo = 1e300, hi = -1e300;
        for (const auto& [v, x] : bc) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        for (double v : s.potential) {
            CHECK(v >= lo - 1e-12);
            CHECK(v <= hi + 1e-12);
        }
        CHECK(s.kirchhoff_residual() < 1e-12);
        CHECK(s.flux_balance_residual() < 1e-10);
        CHECK(s.energy_identity_residual() < 1e-10);
        CHECK(s.max_flux() <= s.flux_bound() * (1 + 1e-12));
    }
}

TEST_CASE("Neumann problems") {
    const std::vector<FluxCondition> ok{{"A", 2.0, -0.5}, {"B", 2.0, 0.5}};
    const auto s = harmonic_neumann(segment_graph(1.0, 2.0), ok, "A", 0.0);
    // A unit mass flux ρ|b| = 1 through thickness 2 gives slope 1/2.
    CHECK(s.value("B") == doctest::Approx(0.5));
    CHECK(s.value_on_edge("e", 0.4) == doctest::Approx(0.2));

    const std::vector<FluxCondition> bad{{"A", 1.0, 1.0}, {"B", 1.0, 1.0}};
    try {
        harmonic_neumann(segment_graph(1.0), bad, "A");
        FAIL("expected IncompatibleFlux");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IncompatibleFlux);
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
}

TEST_CASE("Gauss-Green on grid fields") {
    const auto grid = discretize(segment_graph(1.0, 3.0), 0.05);
    const Segment& seg = grid->segment("e");
    GridField u = GridField::constant(grid, 0.0);
    for (int j = 0; j <= seg.cells; ++j) {
        const double x = seg.position(j);
        u.values[static_cast<Eigen::Index>(seg.dof(j))] = 0.5 * x * x;
    }
    const auto gg = gauss_green(u);
    CHECK(gg.interior == doctest::Approx(3.0));
    CHECK(gg.boundary == doctest::Approx(3.0));
    CHECK(gg.residual < 1e-10);

    const auto melon = discretize(melon_graph(3, 1.0), 0.05);
    const auto h = harmonic_dirichlet(melon_graph(3, 1.0), {{"A", 0.2}, {"B", 0.9}});
    GridField lin = GridField::constant(melon, 0.0);
    for (const auto& s : melon->segments()) {
        for (int j = 0; j <= s.cells; ++j) {
            lin.values[static_cast<Eigen::Index>(s.dof(j))] = h.value_on_edge(s.id, s.position(j));
        }
    }
    CHECK(gauss_green(lin).residual < 1e-10);
}

TEST_CASE("star criterion arithmetic") {
    const auto b = make_cubic(0.25);
    const std::vector<double> five(5, 1.0), six(6, 1.0), heavy{3.0, 1.0, 1.0};
    CHECK(star_criterion(b, five, 1).margin == doctest::Approx(0.0074870).epsilon(1e-4));
    CHECK(star_criterion(b, five, 1).propagate);
    CHECK(star_criterion(b, six, 1).margin == doctest::Approx(-0.0130208).epsilon(1e-4));
    CHECK_FALSE(star_criterion(b, six, 1).propagate);
    CHECK(star_criterion(b, heavy, 1).R < 1.0);
    for (double a : {0.05, 0.2, 0.35, 0.45}) CHECK(star_criterion(make_cubic(a), heavy, 1).propagate);
}

TEST_CASE("blocking profile of the six-star") {
    const auto b = make_cubic(0.25);
    const std::vector<double> six(6, 1.0);
    const auto p = star_blocking_profile(b, six, 1);
    // F(1) + 24 F(ξ) = 0 has the exact root ξ = 1/6 for a = 1/4.
    CHECK(std::abs(cubic_F(0.25, 1.0 / 6.0) + b.F1() / 24.0) < 1e-15);
    CHECK(p.xi == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    CHECK(p.xi_upper > b.a());
    CHECK(p.xi_upper < b.beta());
    CHECK(p.equation_residual < 1e-10);
    CHECK(p.kirchhoff_residual < 1e-9);
    CHECK(p.orbit_kirchhoff_residual < 1e-6);
    CHECK(p.branches[0].kind == OrbitKind::Manifold);
    CHECK(p.branches[3].kind == OrbitKind::Pulse);
    CHECK(p.value(2, 0.0) == doctest::Approx(p.xi).epsilon(1e-9));
    CHECK(p.value(1, 30.0) > 0.999);

    const auto lp = limit_profile(star_graph(6), b, 1);
    const auto sup = p.on_grid(lp.field.grid);
    CHECK((lp.field.values - sup.values).maxCoeff() <= 1e-2);
    CHECK(lp.junction_values[0] == doctest::Approx(p.xi).epsilon(1e-3));

    try {
        star_blocking_profile(b, std::vector<double>(3, 1.0), 1);
        FAIL("expected NotBlocking");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotBlocking);
    }
}

TEST_CASE("perturbed blocking star supersolution") {
    const auto b = make_cubic(0.25);
    const auto g = perturbed_star(6, 0.3);
    const auto s = perturbed_star_supersolution(b, g, 1);
    CHECK(s.delta > 0.0);
    CHECK(s.argmax_vertex == g.outer(1).exit);
    CHECK(s.h.value(g.outer(1).exit) == doctest::Approx(b.a()));
    CHECK(s.h.kirchhoff_residual() < 1e-12);
    double rho_min = 1e300;
    for (const auto& p : g.outer_paths()) rho_min = std::min(rho_min, p.thickness);
    const double C = s.h.flux_bound() / rho_min;
    for (int j = 2; j <= 6; ++j) {
        const double xi = s.xi[static_cast<std::size_t>(j - 1)];
        CHECK(xi <= b.a() + 1e-12);
        CHECK(xi >= b.a() - C * g.total_length());
    }
    CHECK(s.valid);

    SolverParams params;
    params.refine_short_edges = true;
    const auto lp = limit_profile(g, b, 1, params);
    for (int j = 2; j <= 6; ++j) CHECK(lp.verdict(j) == Verdict::Block);
    CHECK((lp.field.values - s.on_grid(lp.field.grid).values).maxCoeff() <= 1e-2);

    CHECK_THROWS_AS(perturbed_star_supersolution(b, perturbed_star(3, 0.3), 1), Error);
}

TEST_CASE("gradient bound") {
    const auto b = make_cubic(0.25);
    const auto star = limit_profile(star_graph(3), b, 1);
    const auto sb = gradient_bound_check(star.field, b);
    CHECK(sb.max_flux == 0.0);
    CHECK(sb.bound == doctest::Approx(3 * std::sqrt(2 * (b.F1() - b.Fa()))));
    CHECK(sb.pass);

    const auto db = limit_profile(double_branching_graph(2.0), b, 1);
    const auto gb = gradient_bound_check(db.field, b);
    CHECK(gb.pass);
    CHECK(gb.max_flux > 0.0);

    // The converged profile balances boundary flux against -∫ f(v).
    const auto gg = gauss_green(db.field, {}, &b);
    CHECK(gg.source_residual < 10 * 0.02 * 0.02);
}
