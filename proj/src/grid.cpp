#include "frontlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "frontlab/errors.hpp"

namespace frontlab {

std::size_t Segment::dof(int node) const {
    if (node == 0) return from_dof;
    if (node == cells) return to_dof;
    return first_interior + static_cast<std::size_t>(node - 1);
}

Grid::Grid(FiniteGraph center, std::vector<OuterPath> outer, double h, bool refine_short_edges)
    : center_(std::move(center)), outer_(std::move(outer)), h_(h) {
    if (!(h > 0.0)) throw Error(ErrorCode::SpacingTooCoarse, "spacing must be positive");
    std::sort(outer_.begin(), outer_.end(), [](const auto& x, const auto& y) { return x.index < y.index; });
    const auto& vertices = center_.vertices();
    std::size_t next = vertices.size() + outer_.size();

    auto make = [&](Segment s) {
        // The spacing rule applies to center edges; truncated outer paths are
        // long by construction and only need one cell.
        if (!s.is_outer() && h > s.length / 4.0 * (1.0 + 1e-12) && !refine_short_edges) {
            std::ostringstream msg;
            msg << "spacing " << h << " exceeds a quarter of '" << s.id << "' (length " << s.length << ")";
            throw Error(ErrorCode::SpacingTooCoarse, msg.str());
        }
        s.cells = std::max(s.is_outer() ? 1 : 4, static_cast<int>(std::llround(s.length / h)));
        s.h = s.length / s.cells;
        s.first_interior = next;
        next += static_cast<std::size_t>(s.cells - 1);
        segments_.push_back(std::move(s));
    };

    for (const auto& e : center_.edges()) {
        Segment s;
        s.id = e.id;
        s.from_vertex = e.from;
        s.to_vertex = e.to;
        s.length = e.length;
        s.thickness = e.thickness;
        s.from_dof = *center_.vertex_index(e.from);
        s.to_dof = *center_.vertex_index(e.to);
        make(std::move(s));
    }
    for (const auto& p : outer_) {
        Segment s;
        s.id = "outer" + std::to_string(p.index);
        s.from_vertex = p.exit;
        s.length = p.truncation;
        s.thickness = p.thickness;
        s.outer_index = p.index;
        s.from_dof = *center_.vertex_index(p.exit);
        s.to_dof = vertices.size() + static_cast<std::size_t>(p.index - 1);
        make(std::move(s));
    }

    mass_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(next));
    std::vector<Eigen::Triplet<double>> triplets;
    for (const auto& s : segments_) {
        const double k = s.thickness / s.h;
        const double m = 0.5 * s.thickness * s.h;
        for (int j = 0; j < s.cells; ++j) {
            const auto p = static_cast<Eigen::Index>(s.dof(j));
            const auto q = static_cast<Eigen::Index>(s.dof(j + 1));
            mass_[p] += m;
            mass_[q] += m;
            triplets.emplace_back(p, p, k);
            triplets.emplace_back(q, q, k);
            triplets.emplace_back(p, q, -k);
            triplets.emplace_back(q, p, -k);
        }
    }
    stiffness_.resize(mass_.size(), mass_.size());
    stiffness_.setFromTriplets(triplets.begin(), triplets.end());
    stiffness_.makeCompressed();
}

std::optional<std::size_t> Grid::find_segment(const std::string& id) const {
    for (std::size_t k = 0; k < segments_.size(); ++k) {
        if (segments_[k].id == id) return k;
    }
    return std::nullopt;
}

const Segment& Grid::segment(const std::string& id) const {
    auto k = find_segment(id);
    if (!k) throw Error(ErrorCode::UnknownEdge, "'" + id + "'");
    return segments_[*k];
}

const Segment& Grid::outer_segment(int index) const {
    if (index < 1 || static_cast<std::size_t>(index) > outer_.size()) {
        throw Error(ErrorCode::DanglingReference, "no outer path " + std::to_string(index));
    }
    return segment("outer" + std::to_string(index));
}

std::size_t Grid::vertex_dof(const std::string& vertex_id) const {
    auto k = center_.vertex_index(vertex_id);
    if (!k) throw Error(ErrorCode::DanglingReference, "no vertex '" + vertex_id + "'");
    return *k;
}

Eigen::VectorXd Grid::apply_laplacian(const Eigen::VectorXd& u) const {
    // Flux differences per cell, so constants map to exactly zero.
    Eigen::VectorXd out = Eigen::VectorXd::Zero(u.size());
    for (const auto& s : segments_) {
        const double k = s.thickness / s.h;
        for (int j = 0; j < s.cells; ++j) {
            const auto p = static_cast<Eigen::Index>(s.dof(j));
            const auto q = static_cast<Eigen::Index>(s.dof(j + 1));
            const double flux = k * (u[q] - u[p]);
            out[p] += flux;
            out[q] -= flux;
        }
    }
    return (out.array() / mass_.array()).matrix();
}

double Grid::weighted_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return (mass_.array() * u.array() * v.array()).sum();
}

std::vector<std::size_t> Grid::center_dofs() const {
    std::vector<std::size_t> out;
    for (std::size_t k = 0; k < center_.vertices().size(); ++k) out.push_back(k);
    for (const auto& s : segments_) {
        if (s.is_outer()) continue;
        for (int j = 1; j < s.cells; ++j) out.push_back(s.dof(j));
    }
    return out;
}

double Grid::min_spacing() const {
    double m = h_;
    for (const auto& s : segments_) m = std::min(m, s.h);
    return m;
}

GridPtr discretize(const MetricGraph& g, double h, bool refine_short_edges) {
    return std::make_shared<const Grid>(g.center(), g.outer_paths(), h, refine_short_edges);
}

GridPtr discretize(const FiniteGraph& g, double h, bool refine_short_edges) {
    return std::make_shared<const Grid>(g, std::vector<OuterPath>{}, h, refine_short_edges);
}

GridField GridField::constant(GridPtr grid, double value) {
    const auto n = static_cast<Eigen::Index>(grid->size());
    return {std::move(grid), Eigen::VectorXd::Constant(n, value)};
}

double GridField::at(const std::string& segment_id, int node) const {
    return values[static_cast<Eigen::Index>(grid->segment(segment_id).dof(node))];
}

std::vector<double> GridField::trace(const std::string& segment_id) const {
    const Segment& s = grid->segment(segment_id);
    std::vector<double> out(static_cast<std::size_t>(s.cells + 1));
    for (int j = 0; j <= s.cells; ++j) out[static_cast<std::size_t>(j)] = values[static_cast<Eigen::Index>(s.dof(j))];
    return out;
}

void write_profile_csv(std::ostream& out, const GridField& u, const std::vector<std::string>& metadata) {
    for (const auto& line : metadata) out << "# " << line << "\n";
    out << "edge_id,s,value\n";
    out.precision(17);
    for (const auto& s : u.grid->segments()) {
        for (int j = 0; j <= s.cells; ++j) {
            out << s.id << "," << s.position(j) << "," << u.values[static_cast<Eigen::Index>(s.dof(j))] << "\n";
        }
    }
}

GridField read_profile_csv(std::istream& in, GridPtr grid) {
    GridField u = GridField::constant(grid, 0.0);
    std::vector<bool> seen(grid->size(), false);
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line != "edge_id,s,value") throw Error(ErrorCode::InvalidDocument, "bad profile header: " + line);
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string id, s_text, v_text;
        if (!std::getline(row, id, ',') || !std::getline(row, s_text, ',') || !std::getline(row, v_text)) {
            throw Error(ErrorCode::InvalidDocument, "bad profile row: " + line);
        }
        const Segment& seg = grid->segment(id);
        const int node = static_cast<int>(std::llround(std::stod(s_text) / seg.h));
        if (node < 0 || node > seg.cells) throw Error(ErrorCode::InvalidDocument, "position outside edge: " + line);
        const auto dof = seg.dof(node);
        u.values[static_cast<Eigen::Index>(dof)] = std::stod(v_text);
        seen[dof] = true;
    }
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (!seen[k]) throw Error(ErrorCode::InvalidDocument, "profile misses grid node " + std::to_string(k));
    }
    return u;
}

}  // namespace frontlab
