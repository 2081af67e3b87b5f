// Command-line front end. Every subcommand writes CSV to stdout (or --out)
// with '#'-prefixed metadata lines. Exit status: 0 when all checks pass, 2
// when only hypothesis warnings were raised, 1 on a failed check or error.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "frontlab/errors.hpp"
#include "frontlab/graph.hpp"
#include "frontlab/phase_plane.hpp"
#include "frontlab/scenarios.hpp"
#include "frontlab/solver.hpp"
#include "frontlab/spectral.hpp"
#include "frontlab/stationary.hpp"

using namespace frontlab;

namespace {

struct Common {
    std::string graph_path;
    double a = -1.0;  // < 0: take the document's nonlinearity (cubic 0.25 by default)
    double h = -1.0;
    double tol = -1.0;
    double truncation = -1.0;
    bool refine = false;
    std::string out_path;
};

nlohmann::json read_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidDocument, "cannot open '" + path + "'");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::InvalidDocument, path + ": " + e.what());
    }
}

nlohmann::json block(const nlohmann::json& doc, const char* key) {
    return doc.is_object() && doc.contains(key) ? doc.at(key) : nlohmann::json();
}

Bistable nonlinearity(const Common& c, const nlohmann::json& doc) {
    if (c.a > 0.0) return make_cubic(c.a);
    return bistable_from_json(block(doc, "nonlinearity"));
}

SolverParams solver(const Common& c, const nlohmann::json& doc) {
    SolverParams p = solver_params_from_json(block(doc, "solver"));
    if (c.h > 0.0) p.h = c.h;
    if (c.tol > 0.0) p.tol = c.tol;
    if (c.truncation > 0.0) p.truncation = c.truncation;
    if (c.refine) p.refine_short_edges = true;
    return p;
}

void add_common(CLI::App* sub, Common& c, bool needs_graph = true) {
    if (needs_graph) sub->add_option("--graph", c.graph_path, "graph document (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--a", c.a, "cubic parameter a, overriding the document");
    sub->add_option("--spacing", c.h, "grid spacing h");
    sub->add_option("--tol", c.tol, "steady-state tolerance");
    sub->add_option("--truncation", c.truncation, "outer path truncation length");
    sub->add_flag("--refine", c.refine, "give short center edges four cells");
    sub->add_option("--out", c.out_path, "write CSV here instead of stdout");
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw Error(ErrorCode::InvalidDocument, "cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

std::string fmt(double x, int precision = 10) {
    std::ostringstream s;
    s << std::setprecision(precision) << x;
    return s.str();
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
    return out;
}

void profile_metadata(std::ostream& os, const LimitProfile& lp) {
    os << "# source " << lp.source << " steps " << lp.steps << " time " << fmt(lp.time) << " rate " << fmt(lp.rate, 3)
       << " residual " << fmt(lp.residual, 3) << '\n';
    os << "# row " << row_string(lp.verdicts) << " truncation " << fmt(lp.truncation) << " monotone "
       << (lp.monotone ? "yes" : "no") << '\n';
}

int run_wave(const Common& c) {
    const auto doc = c.graph_path.empty() ? nlohmann::json() : read_document(c.graph_path);
    const auto b = nonlinearity(c, doc);
    const auto w = traveling_wave(b);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "# nonlinearity " << b.name() << " a " << fmt(b.a()) << " beta " << fmt(b.beta()) << '\n';
    os << "# speed " << fmt(w.speed) << '\n';
    os << "z,phi,dphi\n";
    const std::size_t stride = std::max<std::size_t>(1, w.phi.size() / 2000);
    for (std::size_t k = 0; k < w.phi.size(); k += stride) {
        os << fmt(w.z0 + w.h * static_cast<double>(k)) << ',' << fmt(w.phi[k]) << ',' << fmt(w.dphi[k]) << '\n';
    }
    return 0;
}

int run_criterion(const Common& c, const std::string& thickness, int source) {
    const auto doc = c.graph_path.empty() ? nlohmann::json() : read_document(c.graph_path);
    const auto b = nonlinearity(c, doc);
    const auto rho = parse_list(thickness);
    const auto s = star_criterion(b, rho, source);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "# F(1) " << fmt(b.F1()) << " F(a) " << fmt(b.Fa()) << " beta " << fmt(b.beta()) << '\n';
    os << "R,margin,verdict,xi,xi_upper\n";
    os << fmt(s.R) << ',' << fmt(s.margin) << ',' << (s.propagate ? "propagate" : "block") << ',';
    if (s.margin < 0.0) {
        const auto p = star_blocking_profile(b, rho, source);
        os << fmt(p.xi) << ',' << fmt(p.xi_upper) << '\n';
    } else {
        os << ",\n";
    }
    return 0;
}

int run_simulate(const Common& c, int source, const std::string& profile_path) {
    const auto doc = read_document(c.graph_path);
    const auto g = build_graph(doc);
    const auto b = nonlinearity(c, doc);
    const auto lp = limit_profile(g, b, source, solver(c, doc));
    const auto audit = dichotomy_audit(lp);
    Output out(c.out_path);
    auto& os = out.stream();
    profile_metadata(os, lp);
    os << "# far_gap " << fmt(audit.worst_far_gap, 3) << " traces_monotone " << (audit.traces_monotone ? "yes" : "no") << '\n';
    os << "path,junction_value,far_value,verdict\n";
    for (std::size_t j = 0; j < lp.verdicts.size(); ++j) {
        os << j + 1 << ',' << fmt(lp.junction_values[j]) << ',' << fmt(lp.far_values[j]) << ','
           << to_string(lp.verdicts[j]) << '\n';
    }
    if (!profile_path.empty()) {
        std::ofstream pf(profile_path);
        write_profile_csv(pf, lp.field, {"source " + std::to_string(source)});
    }
    return (audit.far_ok && audit.traces_monotone && lp.monotone) ? 0 : 1;
}

int run_classify(const Common& c, int source) {
    const auto doc = read_document(c.graph_path);
    const auto g = build_graph(doc);
    const auto b = nonlinearity(c, doc);
    const auto lp = limit_profile(g, b, source, solver(c, doc));
    const auto r = classify_invasion(lp);
    Output out(c.out_path);
    auto& os = out.stream();
    profile_metadata(os, lp);
    os << "source,row,kind,sup_deficit\n";
    os << r.source << ',' << row_string(r.row) << ',' << to_string(r.kind) << ',' << fmt(r.sup_deficit) << '\n';
    return 0;
}

int run_matrix(const Common& c) {
    const auto doc = read_document(c.graph_path);
    const auto g = build_graph(doc);
    const auto b = nonlinearity(c, doc);
    const auto m = propagation_matrix(g, b, solver(c, doc));
    Output out(c.out_path);
    auto& os = out.stream();
    os << "# graph " << g.name() << " nonlinearity " << b.name() << '\n';
    os << "# transitivity triples " << m.triples_checked << " violations " << m.violations.size() << '\n';
    for (const auto& v : m.violations) os << "# violation PR(" << v.i << ',' << v.k << ") via " << v.j << '\n';
    os << "source";
    for (std::size_t j = 1; j <= m.size(); ++j) os << ",PR_" << j;
    os << '\n';
    for (std::size_t i = 0; i < m.size(); ++i) {
        os << i + 1;
        for (auto v : m.rows[i]) os << ',' << matrix_symbol(v);
        os << '\n';
    }
    return m.violations.empty() ? 0 : 1;
}

int run_spectrum(const Common& c, int k) {
    const auto doc = read_document(c.graph_path);
    const auto g = build_finite_graph(doc);
    const double h = c.h > 0.0 ? c.h : 0.01;
    const auto spec = neumann_spectrum(discretize(g, h, c.refine), k);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "# h " << fmt(h) << " multiplet tolerance " << fmt(10 * h * h) << '\n';
    os << "index,eigenvalue,multiplicity\n";
    for (std::size_t j = 0; j < spec.eigenvalues.size(); ++j) {
        os << j << ',' << fmt(spec.eigenvalues[j], 12) << ',' << spec.multiplicity(j) << '\n';
    }
    return 0;
}

int run_energy(const Common& c, const std::string& fixed_text, double t_end) {
    const auto doc = read_document(c.graph_path);
    const auto g = build_finite_graph(doc);
    const auto b = nonlinearity(c, doc);
    const SolverParams p = solver(c, doc);
    const auto grid = discretize(g, p.h, p.refine_short_edges);
    // Dirichlet data "V=value,..."; the rest starts at the midpoint of the
    // boundary values and relaxes.
    std::vector<std::size_t> fixed;
    GridField u = GridField::constant(grid, 0.5);
    std::stringstream ss(fixed_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidDocument, "boundary entry '" + item + "' is not V=value");
        const auto dof = grid->vertex_dof(item.substr(0, eq));
        fixed.push_back(dof);
        u.values[static_cast<Eigen::Index>(dof)] = std::stod(item.substr(eq + 1));
    }
    const Evolver ev(grid, &b, p.time_step(b), p.theta, fixed);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "# dt " << fmt(ev.dt()) << " fixed " << fixed.size() << '\n';
    os << "time,energy,increase\n";
    double prev = local_energy(u, b);
    double worst = 0.0;
    os << 0 << ',' << fmt(prev, 15) << ",0\n";
    const int steps = static_cast<int>(std::ceil(t_end / ev.dt()));
    for (int s = 1; s <= steps; ++s) {
        ev.step(u.values);
        const double J = local_energy(u, b);
        worst = std::max(worst, J - prev);
        os << fmt(s * ev.dt()) << ',' << fmt(J, 15) << ',' << fmt(J - prev, 3) << '\n';
        prev = J;
    }
    os << "# worst increase " << fmt(worst, 3) << '\n';
    return worst <= 1e-10 ? 0 : 1;
}

int run_harmonic(const Common& c, const std::string& bc_text) {
    const auto doc = read_document(c.graph_path);
    const auto g = build_finite_graph(doc);
    std::map<std::string, double> bc;
    std::stringstream ss(bc_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidDocument, "boundary entry '" + item + "' is not V=value");
        bc[item.substr(0, eq)] = std::stod(item.substr(eq + 1));
    }
    const auto s = harmonic_dirichlet(g, bc);
    Output out(c.out_path);
    auto& os = out.stream();
    os << "# kirchhoff_residual " << fmt(s.kirchhoff_residual(), 3) << " flux_balance " << fmt(s.flux_balance_residual(), 3)
       << " energy_identity " << fmt(s.energy_identity_residual(), 3) << '\n';
    os << "vertex,potential,boundary_flux\n";
    for (std::size_t k = 0; k < g.vertices().size(); ++k) {
        const auto& id = g.vertices()[k].id;
        os << id << ',' << fmt(s.potential[k]) << ',';
        if (auto it = s.boundary_flux.find(id); it != s.boundary_flux.end()) os << fmt(it->second);
        os << '\n';
    }
    return s.kirchhoff_residual() < 1e-10 ? 0 : 1;
}

int run_sweep(const std::string& scenario_path, const std::string& out_path) {
    const auto outcome = run_scenario(read_document(scenario_path));
    Output out(out_path);
    out.stream() << outcome.csv;
    for (const auto& m : outcome.messages) std::cerr << m << '\n';
    return outcome.status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Front propagation and blocking on metric graphs"};
    app.require_subcommand(1);

    Common c;
    int source = 1;
    int k = 6;
    double t_end = 50.0;
    std::string thickness = "1,1,1";
    std::string profile_path, scenario_path, bc_text;

    auto* wave = app.add_subcommand("wave", "traveling wave profile and speed");
    add_common(wave, c, false);
    wave->add_option("--graph", c.graph_path, "document with a nonlinearity block");

    auto* criterion = app.add_subcommand("criterion", "star-graph criterion and blocking junction value");
    add_common(criterion, c, false);
    criterion->add_option("--thickness", thickness, "comma-separated outer path thicknesses");
    criterion->add_option("--source", source, "source path index");

    auto* simulate = app.add_subcommand("simulate", "limit profile of the front entering from one path");
    add_common(simulate, c);
    simulate->add_option("--source", source, "source path index")->required();
    simulate->add_option("--profile", profile_path, "also write the profile CSV here");

    auto* classify = app.add_subcommand("classify", "invasion kind of one source");
    add_common(classify, c);
    classify->add_option("--source", source, "source path index")->required();

    auto* matrix = app.add_subcommand("matrix", "propagation matrix with transitivity audit");
    add_common(matrix, c);

    auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues of -Laplacian on a bounded graph");
    add_common(spectrum, c);
    spectrum->add_option("--k", k, "number of eigenvalues");

    auto* energy = app.add_subcommand("energy", "energy along a fixed-boundary evolution");
    add_common(energy, c);
    energy->add_option("--fixed", bc_text, "Dirichlet vertices as V=value,...")->required();
    energy->add_option("--t-end", t_end, "final time");

    auto* harmonic = app.add_subcommand("harmonic", "harmonic Dirichlet problem on a bounded graph");
    add_common(harmonic, c);
    harmonic->add_option("--boundary", bc_text, "Dirichlet vertices as V=value,...")->required();

    auto* sweep_cmd = app.add_subcommand("sweep", "run a scenario document");
    sweep_cmd->add_option("--scenario", scenario_path, "scenario document (JSON)")->required()->check(CLI::ExistingFile);
    sweep_cmd->add_option("--out", c.out_path, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*wave) return run_wave(c);
        if (*criterion) return run_criterion(c, thickness, source);
        if (*simulate) return run_simulate(c, source, profile_path);
        if (*classify) return run_classify(c, source);
        if (*matrix) return run_matrix(c);
        if (*spectrum) return run_spectrum(c, k);
        if (*energy) return run_energy(c, bc_text, t_end);
        if (*harmonic) return run_harmonic(c, bc_text);
        if (*sweep_cmd) return run_sweep(scenario_path, c.out_path);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::HypothesisUnmet ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
