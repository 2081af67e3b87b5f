#pragma once

// Scenario drivers: propagation matrices with a transitivity audit, invasion
// classification, the partial and one-way constructions, reservoirs,
// perturbed and far-away stars, and parameter sweeps written as CSV.

#include <cstddef>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "frontlab/graph.hpp"
#include "frontlab/nonlinearity.hpp"
#include "frontlab/solver.hpp"

namespace frontlab {

using Row = std::vector<Verdict>;  // PR(i, ·), index j-1

std::string row_string(const Row& row);  // e.g. "-10?"

struct TransitivityViolation {
    int i = 0, j = 0, k = 0;
};

struct PropagationMatrix {
    std::vector<Row> rows;  // rows[i-1]
    std::vector<LimitProfile> profiles;
    std::vector<TransitivityViolation> violations;
    int triples_checked = 0;

    std::size_t size() const { return rows.size(); }
    Verdict at(int i, int j) const;
    bool symmetric() const;
};

/// Zero entries where PR(i,j) = PR(j,k) = 1 but PR(i,k) ≠ 1. Marginal
/// entries do not take part.
std::vector<TransitivityViolation> transitivity_audit(const std::vector<Row>& rows, int* triples_checked = nullptr);

/// One limit-profile run per source.
PropagationMatrix propagation_matrix(const MetricGraph& g, const Bistable& b, const SolverParams& params = {});

enum class InvasionKind { Blocked, Incomplete, Complete, Marginal };

std::string_view to_string(InvasionKind k) noexcept;

struct InvasionReport {
    int source = 0;
    Row row;
    InvasionKind kind = InvasionKind::Blocked;
    double sup_deficit = 0.0;
    std::optional<double> reservoir_mean;
};

inline constexpr double kCompleteDeficit = 1e-3;

/// Depends on the profile only: marginal if any target is marginal,
/// blocked if some target blocks, otherwise complete or incomplete by the
/// sup-deficit threshold.
InvasionReport classify_invasion(const LimitProfile& p, double deficit_threshold = kCompleteDeficit);

struct DichotomyAudit {
    double worst_far_gap = 0.0;  // max over non-marginal targets of dist(far value, {0,1})
    bool far_ok = true;          // worst_far_gap ≤ tol
    bool traces_monotone = true;
    int worst_path = 0;
};

/// Far-field values near {0,1} and monotone traces along every target path.
DichotomyAudit dichotomy_audit(const LimitProfile& p, double tol = 1e-2, double monotone_tol = 1e-9);

/// Whether the trace along outer path k is monotone in x up to `tol`.
bool trace_monotone(const GridField& v, int k, double tol = 1e-9);

// ---------------------------------------------------------------------------
// Choosing the cubic parameter.

/// F(1) + ((N-1)² - 1) F(a) for an equal-thickness N-star.
double star_margin(const Bistable& b, int n);

struct AScan {
    int propagate_degree = 3;
    int block_degree = 0;
    double lo = 0.0, hi = 0.0;  // admissible interval found on the grid
    double a = 0.0;             // maximizer of min(margin_p, -margin_b)
    double margin_propagate = 0.0;
    double margin_block = 0.0;
    int samples = 0;
    int admissible = 0;
};

/// Scans cubic a over (0, ½) for margin(propagate_degree) > 0 >
/// margin(block_degree) and picks the a with the widest two-sided margin.
/// Throws ConditionUnsatisfiable when no sample qualifies.
AScan scan_cubic_a(int propagate_degree, int block_degree, int samples = 999);

// ---------------------------------------------------------------------------
// "Sufficiently long" edges, resolved by doubling.

struct LengthTrial {
    double length = 0.0;
    std::vector<Row> rows;  // one per requested source
    double seconds = 0.0;
};

struct LengthStudy {
    std::vector<int> sources;
    std::vector<LengthTrial> trials;
    bool stabilized = false;
    double threshold = 0.0;  // first length of the final stable triple
    std::vector<Row> rows;   // rows at the threshold
    std::vector<LimitProfile> profiles;  // at the last trial, one per source
};

/// Runs the listed sources on build(L) for L = start, 2 start, ... until the
/// rows agree across two doublings, or `max_length` is passed.
LengthStudy stabilize_length(const std::function<MetricGraph(double)>& build, const Bistable& b,
                             const std::vector<int>& sources, double start, double max_length,
                             const SolverParams& params);

struct SplitScenario {
    AScan scan;
    LengthStudy study;
    bool expected = false;  // the split outcome of the construction
    std::vector<InvasionReport> reports;
};

/// P1 carries paths 1 and 5, P2 carries 2, 3, 4; expects PR(1,5) = 1 and
/// PR(1,2..4) = 0 once P1P2 is long. `a` ≤ 0 selects it by scan.
SplitScenario scenario_partial(double a = 0.0, double start = 5.0, double max_length = 80.0,
                               const SolverParams& params = {});

/// Double branching with the four far paths unified; expects PR(1,2) = 1
/// and PR(2,1) = 0 once all connectors are long.
SplitScenario scenario_oneway(double a = 0.0, double start = 5.0, double max_length = 80.0,
                              const SolverParams& params = {});

// ---------------------------------------------------------------------------
// Reservoir.

struct ReservoirParams {
    int host_paths = 2;
    double stem = 10.0;
    int m = 0;          // 0 picks the smallest m meeting the size condition
    double l0 = 1.0;
    double delta = 0.0;  // 0 selects a/2
};

struct ReservoirHypothesis {
    double delta = 0.0;
    double mu1 = 0.0;      // smallest positive eigenvalue of the melon
    double mu_min = 0.0;   // smallest μ with a positive σ on the search grid
    double mu_star = 0.0;  // the μ* used, equal to μ1
    double sigma = 0.0;
    char branch = 'b';     // 'a' for short stems, 'b' otherwise
    double lhs = 0.0;      // size condition, left side
    double rhs = 0.0;      // σ |Δ0|
    bool spectral_ok = false;
    bool size_ok = false;
    bool holds() const { return spectral_ok && size_ok; }
};

/// Both hypothesis inequalities for a melon of m edges of length l0 on a
/// stem of length `stem`.
ReservoirHypothesis reservoir_hypothesis(const Bistable& b, double delta, int m, double l0, double stem,
                                         double h = 0.01);

struct ReservoirReport {
    ReservoirHypothesis hypothesis;
    int m = 0;
    InvasionReport invasion;
    double mean = 0.0;  // thickness-weighted mean of v̂ over the melon
    bool asserted = false;  // hypothesis held, so the bound is checked
    bool pass = false;      // mean ≤ δ + 1e-2 (only meaningful when asserted)
    LimitProfile profile;
};

/// Thickness-weighted mean over the given center segments.
double segment_mean(const GridField& v, const std::vector<std::string>& segment_ids);

/// Host star with a melon reservoir on a stem; source 1. A failed
/// hypothesis is recorded, not thrown.
ReservoirReport scenario_reservoir(const Bistable& b, const ReservoirParams& rp = {},
                                   const SolverParams& params = {});

/// Throws HypothesisUnmet when the reservoir report did not assert.
void require_hypothesis(const ReservoirReport& r);

// ---------------------------------------------------------------------------
// Perturbed and far-away stars.

struct PerturbedStarRun {
    double size = 0.0;  // |Σ|, 0 for the base star
    Row row;
    bool match = false;
    InvasionReport invasion;
};

struct PerturbedStarReport {
    int n = 0;
    double base_margin = 0.0;
    Verdict base = Verdict::Marginal;
    std::vector<PerturbedStarRun> runs;
    /// Largest tested |Σ| below which every run matches the base verdict
    /// (0 if even the smallest fails).
    double threshold = 0.0;
    bool complete_ok = true;  // propagating base: sup-deficit < 1e-3 in matching runs
};

/// Throws HypothesisUnmet when the base star margin is zero.
PerturbedStarReport scenario_perturbed_star(const Bistable& b, int n,
                                            const std::vector<double>& sizes = {0.2, 0.1, 0.05, 0.025},
                                            const SolverParams& params = {});

enum class FarawayGeometry { Front, Behind };

struct FarawayReport {
    FarawayGeometry geometry = FarawayGeometry::Front;
    int junction_degree = 0;
    double margin = 0.0;
    std::vector<int> far_paths;
    LengthStudy study;
    bool blocked = false;  // every far path blocks at the stabilized length
};

/// Front: the source enters through a stem into a junction with
/// `junction_degree - 1` further paths. Behind: the source leaves the
/// junction directly and `m` stems lead to a chain carrying one path each.
/// Throws HypothesisUnmet unless the junction star strictly blocks.
FarawayReport scenario_faraway(const Bistable& b, FarawayGeometry geometry, int junction_degree = 6, int m = 2,
                               double start = 7.5, double max_length = 60.0, const SolverParams& params = {});

// ---------------------------------------------------------------------------
// Sweeps.

enum class SweepFamily { TwoStarRatio, StarDegree, PerturbedStar, CubicA };

std::string_view to_string(SweepFamily f) noexcept;
SweepFamily sweep_family_from_string(const std::string& s);

struct SweepSpec {
    SweepFamily family = SweepFamily::TwoStarRatio;
    std::vector<double> values;
    double a = 0.25;
    int n = 6;  // star degree for PerturbedStar and CubicA
    double marginal_band = 1e-3;
    std::size_t marginal_steps = 20000;  // step cap inside the band
};

struct SweepRow {
    std::string family;
    double value = 0.0;
    double a = 0.0;
    double margin = 0.0;
    std::string criterion;  // verdict from the margin sign, marginal in the band
    std::string simulated;  // row string from the run, or empty on error
    std::string reported;   // final verdict
    double min_junction = 0.0;
    double max_junction = 0.0;
    std::size_t steps = 0;
    double seconds = 0.0;
    std::string error;
};

/// Rows in input order; per-row errors are recorded, not thrown.
std::vector<SweepRow> sweep(const SweepSpec& spec, const SolverParams& params = {});
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows,
                     const std::vector<std::string>& metadata = {});

// ---------------------------------------------------------------------------
// Scenario documents.

/// {"kind": "cubic", "a": ...} or {"kind": "table", "values": [...]}.
Bistable bistable_from_json(const nlohmann::json& j);
/// Known solver keys; unknown keys throw InvalidDocument.
SolverParams solver_params_from_json(const nlohmann::json& j, SolverParams base = {});

struct ScenarioOutcome {
    int status = 0;  // 0 pass, 2 hypothesis warnings only, 1 assertion failure
    std::vector<std::string> messages;
    std::string csv;
};

/// Runs the `scenario` block of a document with the document's
/// nonlinearity and solver blocks.
ScenarioOutcome run_scenario(const nlohmann::json& doc);

}  // namespace frontlab
