#include "frontlab/scenarios.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <thread>

#include "frontlab/errors.hpp"
#include "frontlab/spectral.hpp"
#include "frontlab/stationary.hpp"

namespace frontlab {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Row row_of(const LimitProfile& p) { return p.verdicts; }

bool all_targets(const Row& row, int source, Verdict v) {
    for (std::size_t j = 0; j < row.size(); ++j) {
        if (static_cast<int>(j) + 1 == source) continue;
        if (row[j] != v) return false;
    }
    return true;
}

std::string fmt(double x, int precision = 6) {
    std::ostringstream s;
    s << std::setprecision(precision) << x;
    return s.str();
}

}  // namespace

std::string row_string(const Row& row) {
    std::string s;
    for (auto v : row) s += matrix_symbol(v);
    return s;
}

Verdict PropagationMatrix::at(int i, int j) const {
    return rows.at(static_cast<std::size_t>(i - 1)).at(static_cast<std::size_t>(j - 1));
}

bool PropagationMatrix::symmetric() const {
    const int n = static_cast<int>(rows.size());
    for (int i = 1; i <= n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
            if (at(i, j) != at(j, i)) return false;
        }
    }
    return true;
}

std::vector<TransitivityViolation> transitivity_audit(const std::vector<Row>& rows, int* triples_checked) {
    const int n = static_cast<int>(rows.size());
    auto at = [&](int i, int j) { return rows[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; };
    std::vector<TransitivityViolation> out;
    int checked = 0;
    for (int i = 1; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) {
            if (j == i || at(i, j) != Verdict::Propagate) continue;
            for (int k = 1; k <= n; ++k) {
                if (k == i || k == j || at(j, k) != Verdict::Propagate) continue;
                if (at(i, k) == Verdict::Marginal) continue;
                ++checked;
                if (at(i, k) != Verdict::Propagate) out.push_back({i, j, k});
            }
        }
    }
    if (triples_checked) *triples_checked = checked;
    return out;
}

PropagationMatrix propagation_matrix(const MetricGraph& g, const Bistable& b, const SolverParams& params) {
    PropagationMatrix m;
    for (const auto& path : g.outer_paths()) {
        m.profiles.push_back(limit_profile(g, b, path.index, params));
        m.rows.push_back(row_of(m.profiles.back()));
    }
    m.violations = transitivity_audit(m.rows, &m.triples_checked);
    return m;
}

std::string_view to_string(InvasionKind k) noexcept {
    switch (k) {
        case InvasionKind::Blocked: return "blocked";
        case InvasionKind::Incomplete: return "incomplete";
        case InvasionKind::Complete: return "complete";
        case InvasionKind::Marginal: return "marginal";
    }
    return "?";
}

InvasionReport classify_invasion(const LimitProfile& p, double deficit_threshold) {
    InvasionReport r;
    r.source = p.source;
    r.row = row_of(p);
    r.sup_deficit = p.sup_deficit();
    bool any_marginal = false, any_block = false;
    for (std::size_t j = 0; j < r.row.size(); ++j) {
        if (r.row[j] == Verdict::Marginal) any_marginal = true;
        if (r.row[j] == Verdict::Block) any_block = true;
    }
    if (any_marginal) {
        r.kind = InvasionKind::Marginal;
    } else if (any_block) {
        r.kind = InvasionKind::Blocked;
    } else {
        r.kind = r.sup_deficit < deficit_threshold ? InvasionKind::Complete : InvasionKind::Incomplete;
    }
    return r;
}

bool trace_monotone(const GridField& v, int k, double tol) {
    const Segment& s = v.grid->outer_segment(k);
    bool up = true, down = true;
    for (int j = 0; j < s.cells; ++j) {
        const double d = v.values[static_cast<Eigen::Index>(s.dof(j + 1))] - v.values[static_cast<Eigen::Index>(s.dof(j))];
        if (d < -tol) up = false;
        if (d > tol) down = false;
    }
    return up || down;
}

DichotomyAudit dichotomy_audit(const LimitProfile& p, double tol, double monotone_tol) {
    DichotomyAudit a;
    for (std::size_t j = 0; j < p.verdicts.size(); ++j) {
        const int k = static_cast<int>(j) + 1;
        if (k == p.source) continue;
        if (!trace_monotone(p.field, k, monotone_tol)) {
            a.traces_monotone = false;
            a.worst_path = k;
        }
        if (p.verdicts[j] == Verdict::Marginal) continue;
        const double far = p.far_values[j];
        const double gap = std::min(std::abs(far), std::abs(1.0 - far));
        if (gap > a.worst_far_gap) {
            a.worst_far_gap = gap;
            if (a.traces_monotone) a.worst_path = k;
        }
    }
    a.far_ok = a.worst_far_gap <= tol;
    return a;
}

// ---------------------------------------------------------------------------

double star_margin(const Bistable& b, int n) {
    const double R = n - 1;
    return b.F1() + (R * R - 1.0) * b.Fa();
}

AScan scan_cubic_a(int propagate_degree, int block_degree, int samples) {
    AScan s;
    s.propagate_degree = propagate_degree;
    s.block_degree = block_degree;
    s.samples = samples;
    auto score = [&](double a) {
        const auto b = make_cubic(a);
        return std::min(star_margin(b, propagate_degree), -star_margin(b, block_degree));
    };
    const double step = 0.5 / (samples + 1);
    double best = -1.0, best_a = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double a = k * step;
        double v = 0.0;
        try {
            v = score(a);
        } catch (const Error&) {
            continue;  // too close to 0 or 1/2 for the nonlinearity checks
        }
        if (v > 0.0) {
            if (s.admissible == 0) s.lo = a;
            s.hi = a;
            ++s.admissible;
        }
        if (v > best) {
            best = v;
            best_a = a;
        }
    }
    if (s.admissible == 0) {
        std::ostringstream msg;
        msg << "no cubic a in (0, 1/2) gives margin(" << propagate_degree << ") > 0 > margin(" << block_degree
            << ") on " << samples << " samples; best two-sided margin " << best << " at a=" << best_a;
        throw Error(ErrorCode::ConditionUnsatisfiable, msg.str());
    }
    s.a = golden_section_max(score, std::max(step, best_a - step), std::min(0.5 - step, best_a + step), 1e-10);
    const auto b = make_cubic(s.a);
    s.margin_propagate = star_margin(b, propagate_degree);
    s.margin_block = star_margin(b, block_degree);
    return s;
}

// ---------------------------------------------------------------------------

LengthStudy stabilize_length(const std::function<MetricGraph(double)>& build, const Bistable& b,
                             const std::vector<int>& sources, double start, double max_length,
                             const SolverParams& params) {
    if (!(start > 0.0)) throw Error(ErrorCode::OutOfRange, "start length must be positive");
    LengthStudy st;
    st.sources = sources;
    for (double L = start; L <= max_length * (1 + 1e-12); L *= 2.0) {
        const auto t0 = Clock::now();
        const MetricGraph g = build(L);
        LengthTrial trial;
        trial.length = L;
        st.profiles.clear();
        for (int i : sources) {
            st.profiles.push_back(limit_profile(g, b, i, params));
            trial.rows.push_back(row_of(st.profiles.back()));
        }
        trial.seconds = seconds_since(t0);
        st.trials.push_back(std::move(trial));
        const std::size_t n = st.trials.size();
        if (n >= 3 && st.trials[n - 1].rows == st.trials[n - 2].rows && st.trials[n - 2].rows == st.trials[n - 3].rows) {
            st.stabilized = true;
            st.threshold = st.trials[n - 3].length;
            st.rows = st.trials[n - 1].rows;
            return st;
        }
    }
    if (st.trials.empty()) throw Error(ErrorCode::OutOfRange, "start length exceeds max_length");
    st.threshold = st.trials.back().length;
    st.rows = st.trials.back().rows;
    return st;
}

namespace {

SplitScenario split_scenario(int block_degree, double a, double start, double max_length, const SolverParams& params,
                             const std::function<MetricGraph(double)>& build, const std::vector<int>& sources,
                             const std::function<bool(const std::vector<Row>&)>& expected) {
    SplitScenario s;
    if (a > 0.0) {
        const auto b = make_cubic(a);
        s.scan.propagate_degree = 3;
        s.scan.block_degree = block_degree;
        s.scan.a = a;
        s.scan.margin_propagate = star_margin(b, 3);
        s.scan.margin_block = star_margin(b, block_degree);
        if (!(s.scan.margin_propagate > 0.0 && s.scan.margin_block < 0.0)) {
            std::ostringstream msg;
            msg << "a=" << a << " gives margins " << s.scan.margin_propagate << " and " << s.scan.margin_block;
            throw Error(ErrorCode::ConditionUnsatisfiable, msg.str());
        }
    } else {
        s.scan = scan_cubic_a(3, block_degree);
    }
    const auto b = make_cubic(s.scan.a);
    s.study = stabilize_length(build, b, sources, start, max_length, params);
    s.expected = s.study.stabilized && expected(s.study.rows);
    for (const auto& p : s.study.profiles) s.reports.push_back(classify_invasion(p));
    return s;
}

}  // namespace

SplitScenario scenario_partial(double a, double start, double max_length, const SolverParams& params) {
    auto build = [&](double L) { return partial_propagation_graph(L, params.truncation > 0 ? params.truncation : kDefaultTruncation); };
    auto expected = [](const std::vector<Row>& rows) {
        const Row& r = rows.at(0);
        return r[4] == Verdict::Propagate && r[1] == Verdict::Block && r[2] == Verdict::Block && r[3] == Verdict::Block;
    };
    return split_scenario(4, a, start, max_length, params, build, {1}, expected);
}

SplitScenario scenario_oneway(double a, double start, double max_length, const SolverParams& params) {
    auto build = [&](double L) {
        return one_way_graph(L, L, params.truncation > 0 ? params.truncation : kDefaultTruncation);
    };
    auto expected = [](const std::vector<Row>& rows) {
        return rows.at(0)[1] == Verdict::Propagate && rows.at(1)[0] == Verdict::Block;
    };
    return split_scenario(5, a, start, max_length, params, build, {1, 2}, expected);
}

// ---------------------------------------------------------------------------

ReservoirHypothesis reservoir_hypothesis(const Bistable& b, double delta, int m, double l0, double stem, double h) {
    ReservoirHypothesis r;
    r.delta = delta;
    const auto probe = discretize(melon_graph(std::clamp(m, 1, 3), l0), std::min(h, l0 / 8.0));
    r.mu1 = neumann_spectrum(probe, 2).eigenvalues[1];
    r.mu_min = reservoir_constants(b, delta).mu_star;
    r.mu_star = r.mu1;
    r.spectral_ok = r.mu_min <= r.mu1;
    r.sigma = reservoir_sigma(b, delta, r.mu_star);
    const double gap = b.F1() - b.Fa();
    const double critical = 1.0 / std::sqrt(2.0 * gap);
    if (stem <= critical) {
        r.branch = 'a';
        r.lhs = 1.0 / (2.0 * stem) + stem * gap;
    } else {
        r.branch = 'b';
        r.lhs = std::sqrt(2.0 * gap);
    }
    r.rhs = r.sigma * m * l0;
    r.size_ok = r.sigma > 0.0 && r.lhs <= r.rhs;
    return r;
}

double segment_mean(const GridField& v, const std::vector<std::string>& segment_ids) {
    double num = 0.0, den = 0.0;
    for (const auto& id : segment_ids) {
        const Segment& s = v.grid->segment(id);
        for (int j = 0; j < s.cells; ++j) {
            const double u0 = v.values[static_cast<Eigen::Index>(s.dof(j))];
            const double u1 = v.values[static_cast<Eigen::Index>(s.dof(j + 1))];
            num += s.thickness * s.h * 0.5 * (u0 + u1);
        }
        den += s.thickness * s.length;
    }
    if (!(den > 0.0)) throw Error(ErrorCode::UnknownEdge, "mean over an empty subgraph");
    return num / den;
}

ReservoirReport scenario_reservoir(const Bistable& b, const ReservoirParams& rp, const SolverParams& params) {
    ReservoirReport out;
    const double delta = rp.delta > 0.0 ? rp.delta : 0.5 * b.a();
    int m = rp.m;
    if (m <= 0) {
        const auto probe = reservoir_hypothesis(b, delta, 1, rp.l0, rp.stem);
        if (!(probe.sigma > 0.0)) throw Error(ErrorCode::HypothesisUnmet, "no positive sigma at mu* = mu1");
        m = static_cast<int>(std::ceil(probe.lhs / (probe.sigma * rp.l0) - 1e-12));
    }
    out.m = m;
    out.hypothesis = reservoir_hypothesis(b, delta, m, rp.l0, rp.stem);
    out.profile = limit_profile(reservoir_graph(rp.host_paths, rp.stem, m, rp.l0,
                                                params.truncation > 0 ? params.truncation : kDefaultTruncation),
                                b, 1, params);
    std::vector<std::string> melon;
    for (int k = 1; k <= m; ++k) melon.push_back("r" + std::to_string(k));
    out.mean = segment_mean(out.profile.field, melon);
    out.invasion = classify_invasion(out.profile);
    out.invasion.reservoir_mean = out.mean;
    out.asserted = out.hypothesis.holds();
    out.pass = out.mean <= delta + 1e-2;
    return out;
}

void require_hypothesis(const ReservoirReport& r) {
    if (r.asserted) return;
    std::ostringstream msg;
    msg << "reservoir hypothesis fails: mu1=" << r.hypothesis.mu1 << " mu_min=" << r.hypothesis.mu_min
        << ", size condition (" << r.hypothesis.branch << ") " << r.hypothesis.lhs << " <= " << r.hypothesis.rhs;
    throw Error(ErrorCode::HypothesisUnmet, msg.str());
}

// ---------------------------------------------------------------------------

PerturbedStarReport scenario_perturbed_star(const Bistable& b, int n, const std::vector<double>& sizes,
                                            const SolverParams& params) {
    PerturbedStarReport r;
    r.n = n;
    r.base_margin = star_margin(b, n);
    if (r.base_margin == 0.0) throw Error(ErrorCode::HypothesisUnmet, "base star margin is zero");
    r.base = r.base_margin > 0.0 ? Verdict::Propagate : Verdict::Block;
    SolverParams p = params;
    p.refine_short_edges = true;

    std::vector<double> all = {0.0};
    for (double s : sizes) all.push_back(s);
    std::sort(all.begin(), all.end(), std::greater<>());
    const double trunc = params.truncation > 0 ? params.truncation : kDefaultTruncation;
    for (double size : all) {
        PerturbedStarRun run;
        run.size = size;
        const MetricGraph g = size > 0.0 ? perturbed_star(n, size, trunc) : star_graph(n, trunc);
        const auto lp = limit_profile(g, b, 1, p);
        run.row = row_of(lp);
        run.match = all_targets(run.row, 1, r.base);
        run.invasion = classify_invasion(lp);
        if (run.match && r.base == Verdict::Propagate && run.invasion.kind != InvasionKind::Complete) {
            r.complete_ok = false;
        }
        r.runs.push_back(std::move(run));
    }
    // Runs are in descending size; the threshold is the largest size from
    // which every smaller run matches.
    r.threshold = 0.0;
    for (auto it = r.runs.rbegin(); it != r.runs.rend(); ++it) {
        if (!it->match) break;
        r.threshold = it->size;
    }
    return r;
}

FarawayReport scenario_faraway(const Bistable& b, FarawayGeometry geometry, int junction_degree, int m, double start,
                               double max_length, const SolverParams& params) {
    FarawayReport r;
    r.geometry = geometry;
    r.junction_degree = junction_degree;
    r.margin = star_margin(b, junction_degree);
    if (!(r.margin < 0.0)) {
        std::ostringstream msg;
        msg << "junction of degree " << junction_degree << " does not block strictly: margin " << r.margin;
        throw Error(ErrorCode::HypothesisUnmet, msg.str());
    }
    const double trunc = params.truncation > 0 ? params.truncation : kDefaultTruncation;
    std::function<MetricGraph(double)> build;
    if (geometry == FarawayGeometry::Front) {
        build = [=](double L) { return faraway_front_graph(junction_degree - 1, L, trunc); };
    } else {
        const int free = junction_degree - 1 - m;
        if (free < 0 || m < 1) throw Error(ErrorCode::OutOfRange, "behind geometry needs 1 <= m < junction degree");
        build = [=](double L) { return faraway_behind_graph(free, m, L, trunc); };
    }
    const int paths = static_cast<int>(build(start).num_outer());
    for (int j = 2; j <= paths; ++j) r.far_paths.push_back(j);
    r.study = stabilize_length(build, b, {1}, start, max_length, params);
    r.blocked = all_targets(r.study.rows.at(0), 1, Verdict::Block);
    return r;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SweepFamily f) noexcept {
    switch (f) {
        case SweepFamily::TwoStarRatio: return "two_star_ratio";
        case SweepFamily::StarDegree: return "star_degree";
        case SweepFamily::PerturbedStar: return "perturbed_star";
        case SweepFamily::CubicA: return "cubic_a";
    }
    return "?";
}

SweepFamily sweep_family_from_string(const std::string& s) {
    for (auto f : {SweepFamily::TwoStarRatio, SweepFamily::StarDegree, SweepFamily::PerturbedStar, SweepFamily::CubicA}) {
        if (to_string(f) == s) return f;
    }
    throw Error(ErrorCode::InvalidDocument, "unknown sweep family '" + s + "'");
}

namespace {

SweepRow sweep_one(const SweepSpec& spec, double value, const SolverParams& base) {
    SweepRow row;
    row.family = std::string(to_string(spec.family));
    row.value = value;
    const auto t0 = Clock::now();
    try {
        double a = spec.a;
        if (spec.family == SweepFamily::CubicA) a = value;
        row.a = a;
        const auto b = make_cubic(a);
        SolverParams p = base;
        const double trunc = p.truncation > 0 ? p.truncation : kDefaultTruncation;
        std::optional<MetricGraph> g;
        switch (spec.family) {
            case SweepFamily::TwoStarRatio: {
                const std::vector<double> rho = {1.0, value};
                g.emplace(star_graph(rho, trunc));
                row.margin = star_criterion(b, rho, 1).margin;
                break;
            }
            case SweepFamily::StarDegree: {
                const int n = static_cast<int>(std::lround(value));
                g.emplace(star_graph(n, trunc));
                row.margin = star_margin(b, n);
                break;
            }
            case SweepFamily::PerturbedStar:
                g.emplace(value > 0.0 ? perturbed_star(spec.n, value, trunc) : star_graph(spec.n, trunc));
                p.refine_short_edges = true;
                row.margin = star_margin(b, spec.n);
                break;
            case SweepFamily::CubicA:
                g.emplace(star_graph(spec.n, trunc));
                row.margin = star_margin(b, spec.n);
                break;
        }
        const bool in_band = std::abs(row.margin) <= spec.marginal_band;
        row.criterion = in_band ? "marginal" : (row.margin > 0.0 ? "propagate" : "block");
        if (in_band) p.max_steps = std::min(p.max_steps, spec.marginal_steps);
        try {
            const auto lp = limit_profile(*g, b, 1, p);
            row.simulated = row_string(lp.verdicts);
            row.steps = lp.steps;
            row.min_junction = 1e300;
            row.max_junction = -1e300;
            for (std::size_t j = 0; j < lp.junction_values.size(); ++j) {
                if (static_cast<int>(j) + 1 == lp.source) continue;
                row.min_junction = std::min(row.min_junction, lp.junction_values[j]);
                row.max_junction = std::max(row.max_junction, lp.junction_values[j]);
            }
            if (in_band) {
                row.reported = "marginal";
            } else if (all_targets(lp.verdicts, 1, Verdict::Propagate)) {
                row.reported = "propagate";
            } else if (all_targets(lp.verdicts, 1, Verdict::Block)) {
                row.reported = "block";
            } else {
                row.reported = "mixed";
            }
        } catch (const Error& e) {
            if (!in_band) throw;
            row.error = e.what();
            row.reported = "marginal";
        }
    } catch (const std::exception& e) {
        row.error = e.what();
        row.reported = "error";
    }
    row.seconds = seconds_since(t0);
    return row;
}

}  // namespace

std::vector<SweepRow> sweep(const SweepSpec& spec, const SolverParams& params) {
    std::vector<SweepRow> rows(spec.values.size());
    const std::size_t workers =
        std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, std::max<std::size_t>(1, rows.size()));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t k = next++; k < rows.size(); k = next++) rows[k] = sweep_one(spec, spec.values[k], params);
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows, const std::vector<std::string>& metadata) {
    for (const auto& m : metadata) out << "# " << m << '\n';
    out << "family,value,a,margin,criterion,simulated,reported,min_junction,max_junction,steps,seconds,error\n";
    for (const auto& r : rows) {
        std::string err = r.error;
        std::replace(err.begin(), err.end(), ',', ';');
        std::replace(err.begin(), err.end(), '\n', ' ');
        out << r.family << ',' << fmt(r.value, 8) << ',' << fmt(r.a, 8) << ',' << fmt(r.margin, 8) << ','
            << r.criterion << ',' << r.simulated << ',' << r.reported << ',' << fmt(r.min_junction, 8) << ','
            << fmt(r.max_junction, 8) << ',' << r.steps << ',' << fmt(r.seconds, 4) << ',' << err << '\n';
    }
}

// ---------------------------------------------------------------------------

namespace {

void require_only(const nlohmann::json& j, std::initializer_list<const char*> keys, const std::string& block) {
    if (!j.is_object()) throw Error(ErrorCode::InvalidDocument, "block '" + block + "' must be an object");
    for (const auto& [k, _] : j.items()) {
        if (std::find_if(keys.begin(), keys.end(), [&](const char* s) { return k == s; }) == keys.end()) {
            throw Error(ErrorCode::InvalidDocument, "unknown key '" + k + "' in block '" + block + "'");
        }
    }
}

}  // namespace

Bistable bistable_from_json(const nlohmann::json& j) {
    if (j.is_null()) return make_cubic(0.25);
    require_only(j, {"kind", "a", "values"}, "nonlinearity");
    const std::string kind = j.value("kind", "cubic");
    try {
        if (kind == "cubic") return make_cubic(j.value("a", 0.25));
        if (kind == "table") return make_table(j.at("values").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidDocument, std::string("nonlinearity: ") + e.what());
    }
    throw Error(ErrorCode::InvalidDocument, "unknown nonlinearity kind '" + kind + "'");
}

SolverParams solver_params_from_json(const nlohmann::json& j, SolverParams p) {
    if (j.is_null()) return p;
    require_only(j, {"h", "dt", "truncation", "tol", "margin", "max_steps", "front_fraction", "theta",
                     "refine_short_edges", "probes", "extend_truncation"},
                 "solver");
    try {
        p.h = j.value("h", p.h);
        p.dt = j.value("dt", p.dt);
        p.truncation = j.value("truncation", p.truncation);
        p.tol = j.value("tol", p.tol);
        p.margin = j.value("margin", p.margin);
        p.max_steps = j.value("max_steps", p.max_steps);
        p.front_fraction = j.value("front_fraction", p.front_fraction);
        p.theta = j.value("theta", p.theta);
        p.refine_short_edges = j.value("refine_short_edges", p.refine_short_edges);
        p.probes = j.value("probes", p.probes);
        p.extend_truncation = j.value("extend_truncation", p.extend_truncation);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::InvalidDocument, std::string("solver: ") + e.what());
    }
    return p;
}

namespace {

void matrix_csv(std::ostringstream& csv, const std::vector<Row>& rows) {
    csv << "source";
    for (std::size_t j = 1; j <= rows.size(); ++j) csv << ",PR_" << j;
    csv << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        csv << i + 1;
        for (auto v : rows[i]) csv << ',' << matrix_symbol(v);
        csv << '\n';
    }
}

void study_csv(std::ostringstream& csv, const LengthStudy& st) {
    csv << "length";
    for (int s : st.sources) csv << ",row_" << s;
    csv << ",seconds\n";
    for (const auto& t : st.trials) {
        csv << fmt(t.length);
        for (const auto& r : t.rows) csv << ',' << row_string(r);
        csv << ',' << fmt(t.seconds, 4) << '\n';
    }
}

}  // namespace

ScenarioOutcome run_scenario(const nlohmann::json& doc) {
    ScenarioOutcome out;
    if (!doc.contains("scenario")) throw Error(ErrorCode::InvalidDocument, "document has no 'scenario' block");
    const auto& sc = doc.at("scenario");
    const std::string kind = sc.value("kind", "");
    const Bistable b = bistable_from_json(doc.value("nonlinearity", nlohmann::json()));
    const SolverParams params = solver_params_from_json(doc.value("solver", nlohmann::json()));
    std::ostringstream csv;
    auto note = [&](const std::string& s) {
        out.messages.push_back(s);
        csv << "# " << s << '\n';
    };
    auto fail = [&](const std::string& s) {
        note("FAIL " + s);
        out.status = 1;
    };
    auto warn = [&](const std::string& s) {
        note("WARN " + s);
        if (out.status == 0) out.status = 2;
    };
    note("scenario " + kind + " with " + b.name());

    try {
        if (kind == "matrix") {
            const auto m = propagation_matrix(build_graph(doc), b, params);
            note("transitivity triples " + std::to_string(m.triples_checked) + ", violations " +
                 std::to_string(m.violations.size()));
            if (!m.violations.empty()) fail("transitivity violated");
            for (const auto& p : m.profiles) {
                const auto d = dichotomy_audit(p);
                if (!d.far_ok || !d.traces_monotone) fail("dichotomy audit failed for source " + std::to_string(p.source));
            }
            if (sc.contains("expect")) {
                const auto want = sc.at("expect").get<std::vector<std::string>>();
                for (std::size_t i = 0; i < m.rows.size() && i < want.size(); ++i) {
                    if (row_string(m.rows[i]) != want[i]) fail("row " + std::to_string(i + 1) + " is " + row_string(m.rows[i]) + ", expected " + want[i]);
                }
            }
            matrix_csv(csv, m.rows);
        } else if (kind == "partial" || kind == "oneway") {
            const double a = sc.value("a", 0.0);
            const double start = sc.value("start", 5.0);
            const double max_length = sc.value("max_length", 80.0);
            const auto s = kind == "partial" ? scenario_partial(a, start, max_length, params)
                                             : scenario_oneway(a, start, max_length, params);
            note("a=" + fmt(s.scan.a, 8) + " margins " + fmt(s.scan.margin_propagate) + " / " + fmt(s.scan.margin_block));
            note("stabilized=" + std::string(s.study.stabilized ? "yes" : "no") + " threshold length " + fmt(s.study.threshold));
            if (!s.expected) fail("split outcome not reproduced");
            study_csv(csv, s.study);
        } else if (kind == "reservoir") {
            ReservoirParams rp;
            rp.host_paths = sc.value("host_paths", rp.host_paths);
            rp.stem = sc.value("stem", rp.stem);
            rp.m = sc.value("m", rp.m);
            rp.l0 = sc.value("l0", rp.l0);
            rp.delta = sc.value("delta", rp.delta);
            const auto r = scenario_reservoir(b, rp, params);
            const auto& h = r.hypothesis;
            note("m=" + std::to_string(r.m) + " mu1=" + fmt(h.mu1) + " mu_min=" + fmt(h.mu_min) + " sigma=" + fmt(h.sigma) +
                 " size condition (" + h.branch + ") " + fmt(h.lhs) + " <= " + fmt(h.rhs));
            if (!r.asserted) {
                warn("reservoir hypothesis unmet; bound not asserted");
            } else if (!r.pass) {
                fail("reservoir mean " + fmt(r.mean) + " exceeds delta + 1e-2");
            }
            csv << "m,mean,delta,kind,sup_deficit,row\n"
                << r.m << ',' << fmt(r.mean) << ',' << fmt(h.delta) << ',' << to_string(r.invasion.kind) << ','
                << fmt(r.invasion.sup_deficit) << ',' << row_string(r.invasion.row) << '\n';
        } else if (kind == "perturbed_star") {
            const int n = sc.value("n", 6);
            const auto sizes = sc.value("sizes", std::vector<double>{0.2, 0.1, 0.05, 0.025});
            const auto r = scenario_perturbed_star(b, n, sizes, params);
            note("base margin " + fmt(r.base_margin) + ", matching below |Sigma| = " + fmt(r.threshold));
            if (sc.contains("assert_below")) {
                const double below = sc.at("assert_below").get<double>();
                for (const auto& run : r.runs) {
                    if (run.size <= below && !run.match) fail("|Sigma|=" + fmt(run.size) + " does not match the base star");
                }
            }
            if (!r.complete_ok) fail("propagating perturbed star without complete invasion");
            csv << "size,row,match,kind,sup_deficit\n";
            for (const auto& run : r.runs) {
                csv << fmt(run.size) << ',' << row_string(run.row) << ',' << run.match << ',' << to_string(run.invasion.kind)
                    << ',' << fmt(run.invasion.sup_deficit) << '\n';
            }
        } else if (kind == "faraway") {
            const auto geometry = sc.value("geometry", "front") == "behind" ? FarawayGeometry::Behind : FarawayGeometry::Front;
            const auto r = scenario_faraway(b, geometry, sc.value("junction_degree", 6), sc.value("m", 2),
                                            sc.value("start", 7.5), sc.value("max_length", 60.0), params);
            note("junction margin " + fmt(r.margin) + ", threshold length " + fmt(r.study.threshold));
            if (!r.study.stabilized) warn("verdict did not stabilize within max_length");
            if (!r.blocked) fail("far paths are not all blocked");
            study_csv(csv, r.study);
        } else if (kind == "sweep") {
            SweepSpec spec;
            spec.family = sweep_family_from_string(sc.value("family", "two_star_ratio"));
            spec.values = sc.at("values").get<std::vector<double>>();
            spec.a = sc.value("a", spec.a);
            spec.n = sc.value("n", spec.n);
            spec.marginal_band = sc.value("marginal_band", spec.marginal_band);
            const auto rows = sweep(spec, params);
            for (const auto& r : rows) {
                if (r.reported == "error") fail("row " + fmt(r.value) + ": " + r.error);
            }
            std::ostringstream body;
            write_sweep_csv(body, rows);
            csv << body.str();
        } else {
            throw Error(ErrorCode::InvalidDocument, "unknown scenario kind '" + kind + "'");
        }
    } catch (const Error& e) {
        if (e.code() != ErrorCode::HypothesisUnmet) throw;
        warn(e.what());
    }
    out.csv = csv.str();
    return out;
}

}  // namespace frontlab
