#include "frontlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

constexpr double kBoundSlack = 1e-8;
constexpr double kMonotoneTol = 1e-10;
constexpr double kFarEndClearance = 10.0;

std::vector<Eigen::Triplet<double>> triplets_of(const SparseMatrix& m) {
    std::vector<Eigen::Triplet<double>> out;
    for (int k = 0; k < m.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(m, k); it; ++it) out.emplace_back(it.row(), it.col(), it.value());
    }
    return out;
}

std::string describe_dof(const Grid& grid, std::size_t dof) {
    for (const auto& v : grid.vertices()) {
        if (grid.vertex_dof(v.id) == dof) return "vertex " + v.id;
    }
    for (const auto& s : grid.segments()) {
        for (int j = 1; j <= s.cells; ++j) {
            if (s.dof(j) == dof) {
                std::ostringstream out;
                out << s.id << " at s=" << s.position(j);
                return out.str();
            }
        }
    }
    return "dof " + std::to_string(dof);
}

}  // namespace

double SolverParams::time_step(const Bistable& b) const { return dt > 0.0 ? dt : 0.5 / b.fprime_abs_max(); }

double front_width(const Bistable& b) { return 1.0 / std::sqrt(std::min(-b.df(0.0), -b.df(1.0))); }

Evolver::Evolver(GridPtr grid, const Bistable* b, double dt, double theta, std::vector<std::size_t> fixed)
    : grid_(std::move(grid)), b_(b), dt_(dt), theta_(theta), fixed_(std::move(fixed)) {
    if (!(dt > 0.0)) throw Error(ErrorCode::OutOfRange, "time step must be positive");
    if (!(theta >= 0.5 && theta <= 1.0)) throw Error(ErrorCode::OutOfRange, "theta must lie in [1/2, 1]");
    const auto n = static_cast<Eigen::Index>(grid_->size());
    const SparseMatrix& K = grid_->stiffness();
    const Eigen::VectorXd& w = grid_->mass();

    SparseMatrix W(n, n);
    W.reserve(Eigen::VectorXi::Constant(n, 1));
    for (Eigen::Index k = 0; k < n; ++k) W.insert(k, k) = w[k];
    explicit_part_ = W - (1.0 - theta_) * dt_ * K;

    slot_.assign(static_cast<std::size_t>(n), 0);
    for (auto d : fixed_) {
        if (d >= grid_->size()) throw Error(ErrorCode::OutOfRange, "fixed DOF outside the grid");
        slot_[d] = -1;
    }
    for (Eigen::Index k = 0; k < n; ++k) {
        if (slot_[static_cast<std::size_t>(k)] == 0) {
            slot_[static_cast<std::size_t>(k)] = static_cast<Eigen::Index>(free_.size());
            free_.push_back(k);
        } else {
            slot_[static_cast<std::size_t>(k)] = -1;
        }
    }
    const auto nf = static_cast<Eigen::Index>(free_.size());

    const SparseMatrix implicit_full = W + theta_ * dt_ * K;
    std::vector<Eigen::Triplet<double>> ff, fc;
    for (const auto& t : triplets_of(implicit_full)) {
        const auto r = slot_[static_cast<std::size_t>(t.row())];
        const auto c = slot_[static_cast<std::size_t>(t.col())];
        if (r < 0) continue;
        if (c >= 0) {
            ff.emplace_back(r, c, t.value());
        } else {
            fc.emplace_back(r, t.col(), t.value());
        }
    }
    SparseMatrix A(nf, nf);
    A.setFromTriplets(ff.begin(), ff.end());
    coupling_.resize(nf, n);
    coupling_.setFromTriplets(fc.begin(), fc.end());
    if (nf > 0) {
        solver_.compute(A);
        if (solver_.info() != Eigen::Success) throw Error(ErrorCode::LinearSolveFailure, "factorization failed");
    }
}

void Evolver::step(Eigen::VectorXd& u) const {
    if (free_.empty()) return;
    Eigen::VectorXd rhs = explicit_part_ * u;
    if (b_) {
        const Eigen::VectorXd& w = grid_->mass();
        for (Eigen::Index k = 0; k < u.size(); ++k) rhs[k] += dt_ * w[k] * b_->f(u[k]);
    }
    Eigen::VectorXd rf(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) rf[static_cast<Eigen::Index>(k)] = rhs[free_[k]];
    if (!fixed_.empty()) rf -= coupling_ * u;
    const Eigen::VectorXd x = solver_.solve(rf);
    if (solver_.info() != Eigen::Success || !x.allFinite()) {
        throw Error(ErrorCode::LinearSolveFailure, "solve failed");
    }
    for (std::size_t k = 0; k < free_.size(); ++k) u[free_[k]] = x[static_cast<Eigen::Index>(k)];
}

GridField step(const GridField& u, const Bistable& b, double dt, double theta) {
    Evolver ev(u.grid, &b, dt, theta);
    GridField out = u;
    ev.step(out.values);
    return out;
}

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::Propagate: return "propagate";
        case Verdict::Block: return "block";
        case Verdict::Marginal: return "marginal";
        case Verdict::Source: return "source";
    }
    return "?";
}

char matrix_symbol(Verdict v) noexcept {
    switch (v) {
        case Verdict::Propagate: return '1';
        case Verdict::Block: return '0';
        case Verdict::Marginal: return '?';
        case Verdict::Source: return '-';
    }
    return '?';
}

Verdict classify_value(double junction_value, double beta, double margin) {
    if (junction_value > beta + margin) return Verdict::Propagate;
    if (junction_value < beta - margin) return Verdict::Block;
    return Verdict::Marginal;
}

double LimitProfile::sup_deficit() const { return 1.0 - field.values.minCoeff(); }

GridField front_initial_data(GridPtr grid, const WaveProfile& wave, int i, double x0) {
    const Segment& s = grid->outer_segment(i);
    if (!(x0 > 0.0 && x0 < s.length)) {
        std::ostringstream msg;
        msg << "x0=" << x0 << " outside (0, " << s.length << ") on path " << i;
        throw Error(ErrorCode::OffsetOutOfRange, msg.str());
    }
    GridField u = GridField::constant(grid, 0.0);
    for (int j = 0; j <= s.cells; ++j) {
        u.values[static_cast<Eigen::Index>(s.dof(j))] = wave.value(-(s.position(j) - x0));
    }
    return u;
}

GridField front_initial_data(GridPtr grid, const Bistable& b, int i, double x0) {
    return front_initial_data(std::move(grid), traveling_wave(b), i, x0);
}

LimitProfile evolve_to_steady(const GridField& u0, const Bistable& b, int source, const SolverParams& params,
                              const StepObserver& observer) {
    const Grid& grid = *u0.grid;
    const double dt = params.time_step(b);
    const Evolver ev(u0.grid, &b, dt, params.theta);

    LimitProfile out;
    out.field = u0;
    out.source = source;
    out.margin = params.margin;
    out.beta = b.beta();
    Eigen::VectorXd& u = out.field.values;
    Eigen::VectorXd prev;
    out.rate = std::numeric_limits<double>::infinity();
    while (true) {
        if (out.steps >= params.max_steps) {
            std::ostringstream msg;
            msg << "no steady state after " << out.steps << " steps (rate " << out.rate << ")";
            throw Error(ErrorCode::NoSteadyState, msg.str());
        }
        prev = u;
        ev.step(u);
        ++out.steps;
        out.time += dt;
        const double lo = u.minCoeff(), hi = u.maxCoeff();
        if (lo < -kBoundSlack || hi > 1.0 + kBoundSlack) {
            Eigen::Index at = 0;
            (lo < -kBoundSlack ? u.minCoeff(&at) : u.maxCoeff(&at));
            std::ostringstream msg;
            msg << "value " << u[at] << " at " << describe_dof(grid, static_cast<std::size_t>(at)) << " after "
                << out.steps << " steps; reduce dt";
            throw Error(ErrorCode::BoundViolation, msg.str());
        }
        out.rate = (u - prev).cwiseAbs().maxCoeff() / dt;
        if (observer) observer(out.time, u);
        if (out.rate < params.tol) break;
    }

    Eigen::VectorXd r = grid.apply_laplacian(u);
    for (Eigen::Index k = 0; k < u.size(); ++k) r[k] += b.f(u[k]);
    out.residual = r.cwiseAbs().maxCoeff();
    out.min_value = u.minCoeff();
    out.max_value = u.maxCoeff();
    if (source > 0) out.truncation = grid.outer_segment(source).length;

    for (const auto& p : grid.outer_paths()) {
        const double v = u[static_cast<Eigen::Index>(grid.vertex_dof(p.exit))];
        out.junction_values.push_back(v);
        out.far_values.push_back(u[static_cast<Eigen::Index>(grid.far_dof(p.index))]);
        out.verdicts.push_back(p.index == source ? Verdict::Source : classify_value(v, b.beta(), params.margin));
    }
    return out;
}

std::vector<std::size_t> probe_dofs(const Grid& grid, int source, double x0, int count) {
    std::vector<std::size_t> candidates;
    for (const auto& v : grid.vertices()) candidates.push_back(grid.vertex_dof(v.id));
    for (const auto& s : grid.segments()) {
        const double reach = s.outer_index == source ? std::min(x0, s.length) : s.length;
        for (double frac : {0.5, 0.25, 0.75, 1.0}) {
            const int node = std::clamp(static_cast<int>(std::floor(frac * reach / s.h)), 1, s.cells);
            if (s.position(node) <= reach + 1e-12) candidates.push_back(s.dof(node));
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    if (count <= 0 || candidates.empty()) return {};
    if (static_cast<std::size_t>(count) >= candidates.size()) return candidates;
    std::vector<std::size_t> out;
    const double stride = static_cast<double>(candidates.size()) / count;
    for (int k = 0; k < count; ++k) out.push_back(candidates[static_cast<std::size_t>(k * stride)]);
    return out;
}

namespace {

void check_truncation(const MetricGraph& g, const Bistable& b) {
    const double need = 10.0 * front_width(b);
    for (const auto& p : g.outer_paths()) {
        if (p.truncation < need) {
            std::ostringstream msg;
            msg << "outer path " << p.index << " truncated at " << p.truncation << " < " << need
                << " (ten front widths)";
            throw Error(ErrorCode::OutOfRange, msg.str());
        }
    }
}

// Level-a crossing on an outer path closest to its far end, or -1.
double far_crossing(const GridField& u, int index, double a) {
    const Segment& s = u.grid->outer_segment(index);
    for (int j = s.cells; j >= 0; --j) {
        if (u.values[static_cast<Eigen::Index>(s.dof(j))] < a) return s.position(j);
    }
    return -1.0;
}

LimitProfile monitored_run(const GridField& u0, const Bistable& b, int source, double x0,
                           const SolverParams& params) {
    const auto probes = probe_dofs(*u0.grid, source, x0, params.probes);
    Eigen::VectorXd last(static_cast<Eigen::Index>(probes.size()));
    for (std::size_t k = 0; k < probes.size(); ++k) last[static_cast<Eigen::Index>(k)] = u0.values[probes[k]];
    double worst = 0.0;
    auto observer = [&](double, const Eigen::VectorXd& u) {
        for (std::size_t k = 0; k < probes.size(); ++k) {
            const auto i = static_cast<Eigen::Index>(k);
            worst = std::max(worst, last[i] - u[static_cast<Eigen::Index>(probes[k])]);
            last[i] = u[static_cast<Eigen::Index>(probes[k])];
        }
    };
    LimitProfile lp = evolve_to_steady(u0, b, source, params, observer);
    lp.worst_decrease = worst;
    lp.monotone = worst <= kMonotoneTol;
    return lp;
}

// The wave placed on a truncated path is not exactly a discrete
// subsolution (zero-flux far end, O(h², dt) profile mismatch). The
// decreasing iteration w ← min(w, S(w)) converges to one, and from a
// subsolution the order-preserving scheme increases monotonically in time.
GridField discrete_subsolution(const GridField& u0, const Bistable& b, const SolverParams& params) {
    const Evolver ev(u0.grid, &b, params.time_step(b), params.theta);
    GridField w = u0;
    for (int k = 0; k < 1000; ++k) {
        Eigen::VectorXd s = w.values;
        ev.step(s);
        if ((w.values - s).maxCoeff() <= 1e-15) break;
        w.values = w.values.cwiseMin(s);
    }
    return w;
}

MetricGraph truncated(const MetricGraph& g, const SolverParams& params) {
    return params.truncation > 0.0 ? g.with_truncation(params.truncation) : g;
}

}  // namespace

LimitProfile limit_profile(const MetricGraph& g, const Bistable& b, int i, const SolverParams& params) {
    MetricGraph graph = truncated(g, params);
    check_truncation(graph, b);
    const WaveProfile wave = traveling_wave(b);
    while (true) {
        const GridPtr grid = discretize(graph, params.h, params.refine_short_edges);
        const double x0 = params.front_fraction * grid->outer_segment(i).length;
        const GridField u0 = discrete_subsolution(front_initial_data(grid, wave, i, x0), b, params);
        LimitProfile lp = monitored_run(u0, b, i, x0, params);
        const double crossing = far_crossing(lp.field, i, b.a());
        if (!params.extend_truncation || crossing < lp.truncation - kFarEndClearance) return lp;
        graph = graph.with_truncation(2.0 * lp.truncation);
    }
}

double local_energy(const GridField& u, const Bistable& b, const std::vector<std::string>& segment_ids) {
    const Grid& grid = *u.grid;
    std::vector<const Segment*> segs;
    if (segment_ids.empty()) {
        for (const auto& s : grid.segments()) segs.push_back(&s);
    } else {
        for (const auto& id : segment_ids) segs.push_back(&grid.segment(id));
    }
    double J = 0.0;
    for (const Segment* s : segs) {
        for (int j = 0; j < s->cells; ++j) {
            const double p = u.values[static_cast<Eigen::Index>(s->dof(j))];
            const double q = u.values[static_cast<Eigen::Index>(s->dof(j + 1))];
            J += s->thickness * ((q - p) * (q - p) / (2.0 * s->h) - 0.5 * s->h * (b.F(p) + b.F(q)));
        }
    }
    return J;
}

CauchyInitial bump_initial(const Bistable& b, double radius, double center) {
    auto psi = std::make_shared<Orbit1D>(interval_bump(b, radius, center));
    CauchyInitial init;
    init.cls = InitialClass::A;
    init.bump_radius = radius;
    init.bump_center = center;
    init.profile = [psi](double x) { return psi->value(x); };
    return init;
}

CauchyInitial plateau_initial(const Bistable& b, double sigma, double start, double length) {
    auto H = std::make_shared<Orbit1D>(stable_manifold(b, 0.0));
    const double level = b.a() + sigma;
    const double ramp = 2.0;
    CauchyInitial init;
    init.cls = InitialClass::B;
    init.sigma = sigma;
    init.profile = [=](double x) {
        // C¹ smoothstep ramps of width `ramp` on both sides of the plateau.
        auto smooth = [](double t) {
            t = std::clamp(t, 0.0, 1.0);
            return t * t * (3.0 - 2.0 * t);
        };
        const double ind = smooth((x - start + ramp) / ramp) * smooth((start + length + ramp - x) / ramp);
        return std::min(H->value(x), level * ind);
    };
    return init;
}

LimitProfile cauchy_run(const MetricGraph& g, const Bistable& b, int i, const CauchyInitial& init,
                        const SolverParams& params) {
    if (!init.profile) throw Error(ErrorCode::InvalidInitialClass, "no initial profile");
    const MetricGraph graph = truncated(g, params);
    check_truncation(graph, b);
    const GridPtr grid = discretize(graph, params.h, params.refine_short_edges);
    const Segment& s = grid->outer_segment(i);
    const Orbit1D H = stable_manifold(b, 0.0);
    const double slack = 1e-12;

    std::optional<Orbit1D> psi;
    if (init.cls == InitialClass::A) {
        if (init.bump_center < init.bump_radius) {
            throw Error(ErrorCode::InvalidInitialClass, "bump support reaches past the junction");
        }
        psi = interval_bump(b, init.bump_radius, init.bump_center);
    }

    GridField u = GridField::constant(grid, 0.0);
    double run = 0.0, best_run = 0.0;
    for (int j = 0; j <= s.cells; ++j) {
        const double x = s.position(j);
        const double v = init.profile(x);
        auto fail = [&](const std::string& why) {
            std::ostringstream msg;
            msg << why << " at outer" << i << " s=" << x << " (u0=" << v << ")";
            throw Error(ErrorCode::InvalidInitialClass, msg.str());
        };
        if (!std::isfinite(v) || v < 0.0) fail("u0 negative");
        if (v > H.value(x) + slack) fail("u0 above H");
        if (psi && v < psi->value(x) - slack) fail("u0 below the bump barrier");
        if (init.cls == InitialClass::B) {
            run = v >= b.a() + init.sigma - slack ? run + (j > 0 ? s.h : 0.0) : 0.0;
            best_run = std::max(best_run, run);
        }
        u.values[static_cast<Eigen::Index>(s.dof(j))] = v;
    }
    if (init.cls == InitialClass::B && best_run < init.min_length) {
        std::ostringstream msg;
        msg << "no interval of length " << init.min_length << " with u0 >= a+sigma on outer" << i
            << " (longest " << best_run << ")";
        throw Error(ErrorCode::InvalidInitialClass, msg.str());
    }
    return monitored_run(u, b, i, s.length, params);
}

}  // namespace frontlab
