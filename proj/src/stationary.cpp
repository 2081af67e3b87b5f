#include "frontlab/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <boost/math/tools/roots.hpp>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

double bisect(const std::function<double(double)>& g, double lo, double hi) {
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::bisect(g, lo, hi, tol, iters);
    return 0.5 * (r.first + r.second);
}

// c ≥ 0 with V(c) = value on the decreasing half of the pulse.
double pulse_shift(const Orbit1D& V, double value) {
    double hi = 1.0;
    while (V.value(hi) > value) hi *= 2.0;
    return bisect([&](double c) { return V.value(c) - value; }, 0.0, hi);
}

// Solves the weighted graph Laplacian for the free vertices given the
// values at the pinned ones and an injected mass flux q at every vertex:
// Σ_e ρ_e/L_e (u_w - u_v) + q_v = 0 at free vertices.
std::vector<double> solve_potentials(const FiniteGraph& g, const std::vector<int>& pinned,
                                     const std::vector<double>& pinned_value, const std::vector<double>& injected) {
    const std::size_t n = g.vertices().size();
    std::vector<Eigen::Index> slot(n, -1);
    Eigen::Index nf = 0;
    for (std::size_t v = 0; v < n; ++v) {
        if (!pinned[v]) slot[v] = nf++;
    }
    std::vector<double> u(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) {
        if (pinned[v]) u[v] = pinned_value[v];
    }
    if (nf == 0) return u;

    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nf);
    for (std::size_t v = 0; v < n; ++v) {
        if (slot[v] >= 0) rhs[slot[v]] += injected[v];
    }
    for (const auto& e : g.edges()) {
        if (e.is_loop()) continue;
        const double c = e.thickness / e.length;
        const auto p = *g.vertex_index(e.from), q = *g.vertex_index(e.to);
        for (auto [x, y] : {std::pair{p, q}, std::pair{q, p}}) {
            if (slot[x] < 0) continue;
            trip.emplace_back(slot[x], slot[x], c);
            if (slot[y] >= 0) {
                trip.emplace_back(slot[x], slot[y], -c);
            } else {
                rhs[slot[x]] += c * u[y];
            }
        }
    }
    SparseMatrix A(nf, nf);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<SparseMatrix> solver(A);
    if (solver.info() != Eigen::Success) throw Error(ErrorCode::SingularSystem, "graph Laplacian is singular");
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success || !x.allFinite()) {
        throw Error(ErrorCode::SingularSystem, "graph Laplacian solve failed");
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (slot[v] >= 0) u[v] = x[slot[v]];
    }
    return u;
}

// -Σ_e ρ_e ∂_e u (derivatives pointing away from v) for every vertex.
std::vector<double> imbalance(const FiniteGraph& g, const std::vector<double>& u) {
    std::vector<double> out(g.vertices().size(), 0.0);
    for (const auto& e : g.edges()) {
        if (e.is_loop()) continue;
        const auto p = *g.vertex_index(e.from), q = *g.vertex_index(e.to);
        const double flux = e.thickness * (u[q] - u[p]) / e.length;
        out[p] -= flux;
        out[q] += flux;
    }
    return out;
}

HarmonicSolution package(const FiniteGraph& g, std::vector<double> u, const std::vector<int>& boundary) {
    HarmonicSolution s{g, std::move(u), {}};
    const auto imb = imbalance(g, s.potential);
    for (std::size_t v = 0; v < boundary.size(); ++v) {
        if (boundary[v]) s.boundary_flux[g.vertices()[v].id] = imb[v];
    }
    return s;
}

}  // namespace

double HarmonicSolution::value(const std::string& vertex) const {
    const auto k = graph.vertex_index(vertex);
    if (!k) throw Error(ErrorCode::DanglingReference, "no vertex '" + vertex + "'");
    return potential[*k];
}

double HarmonicSolution::slope(const std::string& edge) const {
    const Edge& e = graph.edge(edge);
    return (value(e.to) - value(e.from)) / e.length;
}

double HarmonicSolution::value_on_edge(const std::string& edge, double s) const {
    const Edge& e = graph.edge(edge);
    return value(e.from) + slope(edge) * s;
}

double HarmonicSolution::kirchhoff_residual() const {
    const auto imb = imbalance(graph, potential);
    double worst = 0.0;
    for (std::size_t v = 0; v < imb.size(); ++v) {
        if (!boundary_flux.count(graph.vertices()[v].id)) worst = std::max(worst, std::abs(imb[v]));
    }
    return worst;
}

double HarmonicSolution::max_flux() const {
    double m = 0.0;
    for (const auto& e : graph.edges()) m = std::max(m, e.thickness * std::abs(slope(e.id)));
    return m;
}

double HarmonicSolution::flux_bound() const {
    double s = 0.0;
    for (const auto& [v, q] : boundary_flux) s += std::abs(q);
    return 0.5 * s;
}

double HarmonicSolution::flux_balance_residual() const {
    double s = 0.0;
    for (const auto& [v, q] : boundary_flux) s += q;
    return std::abs(s);
}

double HarmonicSolution::energy_identity_residual() const {
    double dirichlet = 0.0;
    for (const auto& e : graph.edges()) dirichlet += e.thickness * slope(e.id) * slope(e.id) * e.length;
    double boundary = 0.0;
    for (const auto& [v, q] : boundary_flux) boundary += value(v) * q;
    return std::abs(dirichlet - boundary);
}

HarmonicSolution harmonic_dirichlet(const FiniteGraph& g, const std::map<std::string, double>& boundary) {
    if (boundary.empty()) throw Error(ErrorCode::EmptyBoundary, "Dirichlet problem needs a boundary vertex");
    const std::size_t n = g.vertices().size();
    std::vector<int> pinned(n, 0);
    std::vector<double> values(n, 0.0);
    for (const auto& [id, value] : boundary) {
        const auto k = g.vertex_index(id);
        if (!k) throw Error(ErrorCode::DanglingReference, "no vertex '" + id + "'");
        pinned[*k] = 1;
        values[*k] = value;
    }
    auto u = solve_potentials(g, pinned, values, std::vector<double>(n, 0.0));
    return package(g, std::move(u), pinned);
}

HarmonicSolution harmonic_neumann(const FiniteGraph& g, std::span<const FluxCondition> fluxes,
                                  const std::string& normalize_vertex, double normalize_value) {
    const std::size_t n = g.vertices().size();
    std::vector<double> injected(n, 0.0);
    std::vector<int> boundary(n, 0);
    double total = 0.0;
    for (const auto& c : fluxes) {
        const auto k = g.vertex_index(c.vertex);
        if (!k) throw Error(ErrorCode::DanglingReference, "no vertex '" + c.vertex + "'");
        // Kirchhoff with the symbolic edge: Σ_e ρ_e ∂_e u + ρ b = 0.
        injected[*k] += c.thickness * c.derivative;
        boundary[*k] = 1;
        total += c.thickness * c.derivative;
    }
    if (std::abs(total) > 1e-12) {
        std::ostringstream msg;
        msg << "sum of rho*b is " << total;
        throw Error(ErrorCode::IncompatibleFlux, msg.str());
    }
    const auto anchor = g.vertex_index(normalize_vertex);
    if (!anchor) throw Error(ErrorCode::DanglingReference, "no vertex '" + normalize_vertex + "'");
    std::vector<int> pinned(n, 0);
    std::vector<double> values(n, 0.0);
    pinned[*anchor] = 1;
    values[*anchor] = normalize_value;
    auto u = solve_potentials(g, pinned, values, injected);
    return package(g, std::move(u), boundary);
}

GaussGreen gauss_green(const GridField& u, const std::vector<std::string>& segment_ids, const Bistable* b) {
    const Grid& grid = *u.grid;
    std::vector<const Segment*> segs;
    if (segment_ids.empty()) {
        for (const auto& s : grid.segments()) {
            if (!s.is_outer()) segs.push_back(&s);
        }
    } else {
        for (const auto& id : segment_ids) segs.push_back(&grid.segment(id));
    }
    GaussGreen out;
    auto val = [&](const Segment& s, int j) { return u.values[static_cast<Eigen::Index>(s.dof(j))]; };
    for (const Segment* s : segs) {
        if (s->cells < 3) throw Error(ErrorCode::SpacingTooCoarse, "Gauss-Green needs three cells on '" + s->id + "'");
        const double h = s->h;
        const int n = s->cells;
        auto second = [&](int j) {
            if (j == 0) return (2 * val(*s, 0) - 5 * val(*s, 1) + 4 * val(*s, 2) - val(*s, 3)) / (h * h);
            if (j == n) return (2 * val(*s, n) - 5 * val(*s, n - 1) + 4 * val(*s, n - 2) - val(*s, n - 3)) / (h * h);
            return (val(*s, j + 1) - 2 * val(*s, j) + val(*s, j - 1)) / (h * h);
        };
        for (int j = 0; j <= n; ++j) {
            const double weight = (j == 0 || j == n) ? 0.5 * h : h;
            out.interior += s->thickness * weight * second(j);
            if (b) out.source -= s->thickness * weight * b->f(val(*s, j));
        }
        const double d_start = (-3 * val(*s, 0) + 4 * val(*s, 1) - val(*s, 2)) / (2 * h);
        const double d_end = (3 * val(*s, n) - 4 * val(*s, n - 1) + val(*s, n - 2)) / (2 * h);
        out.boundary += s->thickness * (d_end - d_start);
    }
    out.residual = std::abs(out.interior - out.boundary);
    out.source_residual = std::abs(out.boundary - out.source);
    return out;
}

StarCriterion star_criterion(const Bistable& b, std::span<const double> thicknesses, int i) {
    if (thicknesses.size() < 2) throw Error(ErrorCode::FewerThanTwoOuterPaths, "star needs two outer paths");
    if (i < 1 || static_cast<std::size_t>(i) > thicknesses.size()) {
        throw Error(ErrorCode::DanglingReference, "no outer path " + std::to_string(i));
    }
    for (double r : thicknesses) {
        if (!(r > 0.0)) throw Error(ErrorCode::NonpositiveLength, "thickness must be positive");
    }
    const double rho_i = thicknesses[static_cast<std::size_t>(i - 1)];
    const double rest = std::accumulate(thicknesses.begin(), thicknesses.end(), 0.0) - rho_i;
    StarCriterion c;
    c.R = rest / rho_i;
    c.margin = b.F1() + (c.R * c.R - 1.0) * b.Fa();
    c.propagate = c.margin > 0.0;
    return c;
}

double StationaryProfile::value(int branch, double x) const {
    if (branch == source) return source_orbit.value(x);
    const auto& br = branches.at(static_cast<std::size_t>(branch - 1));
    return pulse_orbit.value(x + br.shift);
}

GridField StationaryProfile::on_grid(GridPtr grid) const {
    GridField out = GridField::constant(grid, xi);
    for (const auto& s : grid->segments()) {
        if (!s.is_outer()) throw Error(ErrorCode::InvalidDocument, "star profile needs a star grid");
        for (int j = 0; j <= s.cells; ++j) {
            out.values[static_cast<Eigen::Index>(s.dof(j))] = value(s.outer_index, s.position(j));
        }
    }
    return out;
}

StationaryProfile star_blocking_profile(const Bistable& b, std::span<const double> thicknesses, int i) {
    const auto crit = star_criterion(b, thicknesses, i);
    if (crit.margin >= 0.0) {
        std::ostringstream msg;
        msg << "criterion margin " << crit.margin << " is not negative";
        throw Error(ErrorCode::NotBlocking, msg.str());
    }
    StationaryProfile p;
    p.R = crit.R;
    p.source = i;
    p.thicknesses.assign(thicknesses.begin(), thicknesses.end());
    const double k = crit.R * crit.R - 1.0;
    auto eq = [&](double s) { return b.F1() + k * b.F(s); };
    p.xi = bisect(eq, 0.0, b.a());
    p.xi_upper = bisect(eq, b.a(), b.beta());
    p.equation_residual = std::abs(eq(p.xi));

    const double rho_i = thicknesses[static_cast<std::size_t>(i - 1)];
    const double rest = crit.R * rho_i;
    p.kirchhoff_residual =
        std::abs(rho_i * std::sqrt(2.0 * (b.F1() - b.F(p.xi))) - rest * std::sqrt(-2.0 * b.F(p.xi)));

    p.source_orbit = stable_manifold(b, p.xi);
    p.pulse_orbit = pulse(b);
    const double shift = pulse_shift(p.pulse_orbit, p.xi);
    double inflow = 0.0;
    for (std::size_t j = 1; j <= thicknesses.size(); ++j) {
        BlockingBranch br;
        br.index = static_cast<int>(j);
        if (br.index == i) {
            br.kind = OrbitKind::Manifold;
        } else {
            br.kind = OrbitKind::Pulse;
            br.shift = shift;
            inflow += thicknesses[j - 1] * p.pulse_orbit.slope(shift);
        }
        p.branches.push_back(br);
    }
    p.orbit_kirchhoff_residual = std::abs(rho_i * p.source_orbit.slope(0.0) + inflow);
    return p;
}

GridField PerturbedStarSupersolution::on_grid(GridPtr grid) const {
    GridField out = GridField::constant(grid, 0.0);
    for (const auto& s : grid->segments()) {
        for (int j = 0; j <= s.cells; ++j) {
            const double x = s.position(j);
            double v = 0.0;
            if (!s.is_outer()) {
                v = h.value_on_edge(s.id, x);
            } else if (s.outer_index == source) {
                v = U.value(x);
            } else {
                v = pulse_orbit.value(x + shifts[static_cast<std::size_t>(s.outer_index - 1)]);
            }
            out.values[static_cast<Eigen::Index>(s.dof(j))] = v;
        }
    }
    return out;
}

PerturbedStarSupersolution perturbed_star_supersolution(const Bistable& b, const MetricGraph& g, int i) {
    const auto& paths = g.outer_paths();
    const double rho_i = g.outer(i).thickness;
    double rest = 0.0;
    for (const auto& p : paths) {
        if (p.index != i) rest += p.thickness;
    }
    const double up = std::sqrt(2.0 * (b.F1() - b.Fa()));
    const double down = std::sqrt(-2.0 * b.Fa());
    if (rho_i * up >= rest * down) {
        throw Error(ErrorCode::NotBlocking, "the star with these thicknesses does not block");
    }
    PerturbedStarSupersolution s;
    s.source = i;
    s.delta = down - rho_i * up / rest;
    std::vector<FluxCondition> fluxes;
    for (const auto& p : paths) {
        const double d = p.index == i ? up : -down + s.delta;
        s.derivatives.push_back(d);
        fluxes.push_back({p.exit, p.thickness, d});
    }
    // Rounding in δ can leave a residue of order 1e-17 in Σ ρ b; absorb it
    // into the source flux so the compatibility check sees an exact zero.
    double total = 0.0;
    for (const auto& f : fluxes) total += f.thickness * f.derivative;
    fluxes[static_cast<std::size_t>(i - 1)].derivative -= total / rho_i;

    s.h = harmonic_neumann(g.center(), fluxes, g.outer(i).exit, b.a());
    s.h_max = -std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < s.h.potential.size(); ++v) {
        if (s.h.potential[v] > s.h_max) {
            s.h_max = s.h.potential[v];
            s.argmax_vertex = g.vertices()[v].id;
        }
    }
    s.U = stable_manifold(b, b.a());
    s.pulse_orbit = pulse(b);
    s.valid = true;
    for (const auto& p : paths) {
        const double xi = s.h.value(p.exit);
        s.xi.push_back(xi);
        if (p.index == i) {
            s.shifts.push_back(0.0);
            continue;
        }
        if (!(xi > 0.0 && xi <= b.a() + 1e-12)) {
            s.valid = false;
            s.shifts.push_back(0.0);
            continue;
        }
        const double c = pulse_shift(s.pulse_orbit, xi);
        s.shifts.push_back(c);
        // Super-Kirchhoff: the pulse tail leaves P_j at least as steeply as b_j.
        if (-std::sqrt(-2.0 * b.F(xi)) > s.derivatives[static_cast<std::size_t>(p.index - 1)]) s.valid = false;
    }
    return s;
}

GradientBound gradient_bound_check(const GridField& v, const Bistable& b) {
    const Grid& grid = *v.grid;
    GradientBound out;
    double rho_max = 0.0;
    for (const auto& p : grid.outer_paths()) rho_max = std::max(rho_max, p.thickness);
    out.bound = b.f_max() * grid.center().total_length() +
                static_cast<double>(grid.outer_paths().size()) * rho_max * std::sqrt(2.0 * (b.F1() - b.Fa()));
    for (const auto& s : grid.segments()) {
        if (s.is_outer()) continue;
        for (int j = 0; j < s.cells; ++j) {
            const double d = v.values[static_cast<Eigen::Index>(s.dof(j + 1))] -
                             v.values[static_cast<Eigen::Index>(s.dof(j))];
            out.max_flux = std::max(out.max_flux, s.thickness * std::abs(d) / s.h);
        }
    }
    out.pass = out.max_flux <= 1.05 * out.bound;
    return out;
}

}  // namespace frontlab
