#include "doctest.h"

#include <numbers>
#include <random>

#include "frontlab/errors.hpp"
#include "frontlab/solver.hpp"
#include "frontlab/spectral.hpp"

using namespace frontlab;

namespace {

constexpr double kPi = std::numbers::pi;

double melon_mu1(double h) {
    const auto spec = neumann_spectrum(discretize(melon_graph(3, 1.0), h), 5);
    return spec.eigenvalues[1];
}

}  // namespace

TEST_CASE("Neumann spectrum of a single edge") {
    const auto spec = neumann_spectrum(discretize(segment_graph(1.0), 0.01), 3);
    CHECK(std::abs(spec.eigenvalues[0]) < 1e-10);
    const auto& c = spec.eigenfields[0].values;
    CHECK((c.array() - c.mean()).abs().maxCoeff() < 1e-10);
    CHECK(spec.eigenvalues[1] == doctest::Approx(kPi * kPi).epsilon(1e-3));
    CHECK(spec.eigenvalues[2] == doctest::Approx(4 * kPi * kPi).epsilon(1e-3));
}

TEST_CASE("melon graph carries an m-fold first eigenvalue") {
    const auto spec = neumann_spectrum(discretize(melon_graph(3, 1.0), 0.01), 6);
    CHECK(spec.eigenvalues[1] == doctest::Approx(kPi * kPi).epsilon(1e-2));
    CHECK(spec.multiplicity(1) == 3);
    CHECK(spec.multiplicity(0) == 1);
    const auto grid = spec.eigenfields[0].grid;
    for (std::size_t i = 0; i < spec.eigenfields.size(); ++i) {
        const auto& wi = spec.eigenfields[i].values;
        CHECK(rayleigh_quotient(*grid, wi) == doctest::Approx(spec.eigenvalues[i]).epsilon(1e-10));
        for (std::size_t j = 0; j <= i; ++j) {
            const double d = grid->weighted_dot(wi, spec.eigenfields[j].values);
            CHECK(std::abs(d - (i == j ? 1.0 : 0.0)) < 1e-9);
        }
    }
    const double e1 = std::abs(melon_mu1(0.04) - kPi * kPi);
    const double e2 = std::abs(melon_mu1(0.02) - kPi * kPi);
    CHECK(std::log2(e1 / e2) >= 1.8);
}

TEST_CASE("Poincare constants") {
    const auto grid = discretize(segment_graph(1.0), 0.01);
    CHECK(poincare_constant(grid, {"A", "B"}) == doctest::Approx(kPi * kPi).epsilon(1e-3));
    CHECK(poincare_constant(grid, {"A"}) == doctest::Approx(kPi * kPi / 4).epsilon(1e-3));
    CHECK_THROWS_AS(poincare_constant(grid, {}), Error);

    const auto melon = discretize(melon_graph(3, 1.0), 0.05);
    const double lambda = poincare_constant(melon, {"A"});
    std::mt19937 rng(23);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        Eigen::VectorXd w(static_cast<Eigen::Index>(melon->size()));
        for (auto& x : w) x = dist(rng);
        w[static_cast<Eigen::Index>(melon->vertex_dof("A"))] = 0.0;
        CHECK(w.dot(melon->stiffness() * w) >= lambda * melon->weighted_dot(w, w) * (1 - 1e-12));
    }
}

TEST_CASE("Dirichlet eigenvalue around the constant state one") {
    const auto b = make_cubic(0.25);
    const auto grid = discretize(star_graph(2, 20.0), 0.01);
    const auto eig = dirichlet_principal_eig(GridField::constant(grid, 1.0), b, 1.0);
    CHECK(eig.lambda == doctest::Approx(kPi * kPi / 4 + 0.75).epsilon(1e-4));
    CHECK(eig.field.values.minCoeff() >= -1e-12);
}

TEST_CASE("principal eigenvalue of a propagating limit profile") {
    const auto b = make_cubic(0.25);
    const auto lp = limit_profile(star_graph(3), b, 1);
    const auto e10 = dirichlet_principal_eig(lp.field, b, 10.0);
    const auto e20 = dirichlet_principal_eig(lp.field, b, 20.0);
    CHECK(e10.lambda > 0.0);
    CHECK(e20.lambda < e10.lambda);
    CHECK(e10.field.values.minCoeff() >= -1e-10);

    const auto blocked = limit_profile(star_graph(6), b, 1);
    const auto eb = dirichlet_principal_eig(blocked.field, b, 20.0);
    CHECK(eb.lambda >= -1e-6);
    for (const auto& s : blocked.field.grid->segments()) CHECK(slope_sign_changes(blocked.field, s.id) <= 1);
}
