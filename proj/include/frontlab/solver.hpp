#pragma once

// Time stepping of ∂_t u = Δu + f(u) on a discretized graph and extraction
// of limit profiles of front-like solutions.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/SparseCholesky>

#include "frontlab/grid.hpp"
#include "frontlab/nonlinearity.hpp"
#include "frontlab/phase_plane.hpp"

namespace frontlab {

struct SolverParams {
    double h = 0.02;
    double dt = 0.0;          // 0 selects 0.5 / max|f'|
    double truncation = 0.0;  // > 0 overrides every outer path's truncation
    double tol = 1e-8;        // steady when max|u(t+dt) - u(t)| / dt < tol
    double margin = 0.02;     // marginal band around β
    std::size_t max_steps = 1000000;
    double front_fraction = 0.6;
    double theta = 1.0;  // implicit weight of the diffusion term
    bool refine_short_edges = false;
    int probes = 16;
    bool extend_truncation = true;

    double time_step(const Bistable& b) const;
};

/// One-step scheme (W + θ dt K) u⁺ = (W - (1-θ) dt K) u + dt W f(u), with
/// optional Dirichlet DOFs held at their current values. θ = 1 is backward
/// Euler for diffusion, θ = ½ the trapezoidal rule.
class Evolver {
public:
    Evolver(GridPtr grid, const Bistable* b, double dt, double theta = 1.0, std::vector<std::size_t> fixed = {});

    /// Advances u in place. `b == nullptr` gives pure diffusion.
    void step(Eigen::VectorXd& u) const;
    double dt() const { return dt_; }
    const Grid& grid() const { return *grid_; }
    const std::vector<std::size_t>& fixed() const { return fixed_; }

private:
    GridPtr grid_;
    const Bistable* b_;
    double dt_;
    double theta_;
    std::vector<std::size_t> fixed_;
    std::vector<Eigen::Index> free_;  // free DOF -> global DOF
    std::vector<Eigen::Index> slot_;  // global DOF -> free index or -1
    SparseMatrix explicit_part_;      // W - (1-θ) dt K, full size
    SparseMatrix coupling_;           // θ dt K restricted to free rows, fixed columns
    Eigen::SimplicialLDLT<SparseMatrix> solver_;
};

GridField step(const GridField& u, const Bistable& b, double dt, double theta = 1.0);

/// Decay length of the wave tails, 1/√min(-f'(0), -f'(1)). Outer paths must
/// be at least ten of these long.
double front_width(const Bistable& b);

enum class Verdict { Propagate, Block, Marginal, Source };

std::string_view to_string(Verdict v) noexcept;
char matrix_symbol(Verdict v) noexcept;  // 1, 0, ?, -

Verdict classify_value(double junction_value, double beta, double margin);

struct LimitProfile {
    GridField field;
    int source = 0;
    std::vector<double> junction_values;  // v(P_j), index j-1
    std::vector<double> far_values;       // value at the truncated end of path j
    std::vector<Verdict> verdicts;        // Source on the diagonal
    double rate = 0.0;                    // final max|Δu|/dt
    double residual = 0.0;                // max|Lu + f(u)| at the end
    double time = 0.0;
    std::size_t steps = 0;
    double min_value = 0.0;
    double max_value = 0.0;
    bool monotone = true;         // probe values never decreased
    double worst_decrease = 0.0;  // largest probe decrease observed
    double truncation = 0.0;      // source path truncation used
    double margin = 0.02;
    double beta = 0.0;

    Verdict verdict(int j) const { return verdicts.at(static_cast<std::size_t>(j - 1)); }
    /// sup over the grid of 1 - v.
    double sup_deficit() const;
};

/// Called after every accepted step with (time, field values).
using StepObserver = std::function<void(double, const Eigen::VectorXd&)>;

/// Front placed on outer path i with its level-a point at x₀: the wave
/// φ(-(x - x₀)) on Ω_i and 0 elsewhere.
GridField front_initial_data(GridPtr grid, const WaveProfile& wave, int i, double x0);
GridField front_initial_data(GridPtr grid, const Bistable& b, int i, double x0);

/// Iterate to a steady state and classify every outer path j ≠ source.
LimitProfile evolve_to_steady(const GridField& u0, const Bistable& b, int source, const SolverParams& params,
                              const StepObserver& observer = {});

/// discretize → front_initial_data → evolve_to_steady, with time
/// monotonicity monitored at probe DOFs and automatic truncation doubling.
LimitProfile limit_profile(const MetricGraph& g, const Bistable& b, int i, const SolverParams& params = {});

/// Probe DOFs used for the monotonicity audit: spread over the center graph
/// and the outer paths, staying on the near side of the initial front on
/// the source path.
std::vector<std::size_t> probe_dofs(const Grid& grid, int source, double x0, int count);

/// J[u] = Σ ρ (Δu)²/(2h) - trapezoid(ρ F(u)) over the given segments (all
/// segments when `segment_ids` is empty). Throws UnknownEdge.
double local_energy(const GridField& u, const Bistable& b, const std::vector<std::string>& segment_ids = {});

enum class InitialClass { A, B };

struct CauchyInitial {
    InitialClass cls = InitialClass::A;
    std::function<double(double)> profile;  // u0 on the source path, as a function of x_i
    // class A: lower barrier Ψ^b with the given radius and center b
    double bump_radius = 0.0;
    double bump_center = 0.0;
    // class B: u0 >= a + sigma on an interval of at least `min_length`
    double sigma = 0.1;
    double min_length = 20.0;
};

/// u0 = Ψ^b on the source path (class A).
CauchyInitial bump_initial(const Bistable& b, double radius, double center);
/// u0 = min(H, (a + sigma)·smoothed indicator of [start, start + length]) (class B).
CauchyInitial plateau_initial(const Bistable& b, double sigma, double start, double length);

/// Validates the sandwich conditions and evolves u0 to its limit.
/// Throws InvalidInitialClass naming the offending node.
LimitProfile cauchy_run(const MetricGraph& g, const Bistable& b, int i, const CauchyInitial& init,
                        const SolverParams& params = {});

}  // namespace frontlab
