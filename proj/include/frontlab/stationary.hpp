#pragma once

// Stationary machinery: harmonic boundary value problems on bounded graphs,
// Gauss–Green bookkeeping on discrete fields, the star-graph criterion with
// its explicit blocking profile, and the center-graph gradient bound.

#include <map>
#include <span>
#include <string>
#include <vector>

#include "frontlab/graph.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/nonlinearity.hpp"
#include "frontlab/phase_plane.hpp"

namespace frontlab {

/// A harmonic function on a bounded graph: linear on every edge, so it is
/// fully described by its vertex potentials.
struct HarmonicSolution {
    FiniteGraph graph;
    std::vector<double> potential;  // by vertex index of `graph`
    /// Mass flux ρ ∂u/∂ν out of each boundary vertex along its symbolic
    /// outer edge, i.e. the Kirchhoff discrepancy -Σ_e ρ_e ∂_e u there.
    std::map<std::string, double> boundary_flux;

    double value(const std::string& vertex) const;
    /// du/dx along the edge in the from → to direction.
    double slope(const std::string& edge) const;
    /// Value at arclength s from the edge's `from` end.
    double value_on_edge(const std::string& edge, double s) const;
    /// Largest |Kirchhoff imbalance| over non-boundary vertices.
    double kirchhoff_residual() const;
    /// max over edges of ρ|u'|.
    double max_flux() const;
    /// ½ Σ |boundary mass flux|, the harmonic flux bound.
    double flux_bound() const;
    /// Residuals of Σ boundary flux = 0 and ∫|∇u|² = Σ u·(boundary flux).
    double flux_balance_residual() const;
    double energy_identity_residual() const;
};

HarmonicSolution harmonic_dirichlet(const FiniteGraph& g, const std::map<std::string, double>& boundary);

/// Prescribed outer derivative b along a symbolic outer edge of thickness ρ
/// at `vertex`; several entries may share a vertex.
struct FluxCondition {
    std::string vertex;
    double thickness = 1.0;
    double derivative = 0.0;
};

/// Solvable iff Σ ρ b = 0 (checked to 1e-12); the solution is pinned by
/// u(normalize_vertex) = normalize_value.
HarmonicSolution harmonic_neumann(const FiniteGraph& g, std::span<const FluxCondition> fluxes,
                                  const std::string& normalize_vertex, double normalize_value = 0.0);

struct GaussGreen {
    double interior = 0.0;  // ∫ ρ Δu over the subgraph
    double boundary = 0.0;  // Σ of Kirchhoff discrepancies at subgraph vertices
    double source = 0.0;    // -∫ ρ f(u), when a nonlinearity is given
    double residual = 0.0;  // |interior - boundary|
    double source_residual = 0.0;  // |boundary - source|
};

/// Gauss–Green balance of a grid field over the given center segments (all
/// center segments when empty). Derivatives at vertices use second-order
/// one-sided differences, Δu uses central differences inside and one-sided
/// ones at the ends, and integrals are trapezoidal; quadratics are exact.
GaussGreen gauss_green(const GridField& u, const std::vector<std::string>& segment_ids = {},
                       const Bistable* b = nullptr);

struct StarCriterion {
    double R = 0.0;       // Σ_{k≠i} ρ_k / ρ_i
    double margin = 0.0;  // F(1) + (R² - 1) F(a)
    bool propagate = false;  // margin > 0
};

StarCriterion star_criterion(const Bistable& b, std::span<const double> thicknesses, int i);

struct BlockingBranch {
    int index = 0;
    OrbitKind kind = OrbitKind::Pulse;
    double shift = 0.0;  // c_j with V(c_j) = ξ on target branches
};

/// Stationary solution of a blocking star: stable manifold from ξ on the
/// source branch, pulse tails V(x_j + c_j) on the others.
struct StationaryProfile {
    double xi = 0.0;        // smaller root of F(1) + (R² - 1) F(ξ) = 0
    double xi_upper = 0.0;  // the other root in (a, β)
    double R = 0.0;
    int source = 0;
    std::vector<double> thicknesses;
    std::vector<BlockingBranch> branches;
    double equation_residual = 0.0;   // |F(1) + (R² - 1) F(ξ)|
    double kirchhoff_residual = 0.0;  // |ρ_i √(2(F(1)-F(ξ))) - Σ ρ_j √(-2F(ξ))|
    double orbit_kirchhoff_residual = 0.0;  // same balance from the sampled orbits
    Orbit1D source_orbit;
    Orbit1D pulse_orbit;

    double value(int branch, double x) const;
    /// The profile evaluated on a grid of the same star.
    GridField on_grid(GridPtr grid) const;
};

/// Throws NotBlocking unless the criterion margin is strictly negative.
StationaryProfile star_blocking_profile(const Bistable& b, std::span<const double> thicknesses, int i);

/// Supersolution for a star whose center is replaced by a small graph D:
/// harmonic h on D with outer derivatives b_i = √(2(F(1)-F(a))) and
/// b_j = -√(-2F(a)) + δ, pinned at h(P_i) = a, continued by U on Ω_i and by
/// pulse tails on the other paths.
struct PerturbedStarSupersolution {
    double delta = 0.0;
    std::vector<double> derivatives;  // b_j, index j-1
    HarmonicSolution h;
    std::vector<double> xi;      // h(P_j), index j-1
    std::vector<double> shifts;  // c_j with V(c_j) = ξ_j (0 on the source)
    int source = 0;
    double h_max = 0.0;
    std::string argmax_vertex;
    bool valid = false;  // 0 < ξ_j ≤ a and the super-Kirchhoff inequality holds at every P_j
    Orbit1D U;
    Orbit1D pulse_orbit;

    GridField on_grid(GridPtr grid) const;
};

/// Throws NotBlocking when ρ_i √(2(F(1)-F(a))) ≥ Σ_{j≠i} ρ_j √(-2F(a)).
PerturbedStarSupersolution perturbed_star_supersolution(const Bistable& b, const MetricGraph& g, int i);

struct GradientBound {
    double max_flux = 0.0;  // max over center cells of ρ|Δu/h|
    double bound = 0.0;     // f_max |D| + N ρ_max √(2(F(1)-F(a)))
    bool pass = true;       // max_flux ≤ 1.05 · bound
};

GradientBound gradient_bound_check(const GridField& v, const Bistable& b);

}  // namespace frontlab
