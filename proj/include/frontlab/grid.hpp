#pragma once

// Vertex-centered finite-volume discretization of a metric graph. Every
// vertex owns one DOF shared by all incident edges; each truncated outer
// path ends in a free far-end DOF with a zero-flux closure.

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "frontlab/graph.hpp"

namespace frontlab {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// One discretized edge: nodes 0..cells, node 0 at `from`, node `cells` at `to`.
struct Segment {
    std::string id;  // edge id, or "outer<k>" for outer path k
    std::string from_vertex;
    std::string to_vertex;  // empty for outer paths (far end)
    double length = 0.0;
    double thickness = 1.0;
    int cells = 0;
    double h = 0.0;
    int outer_index = 0;  // 0 for center edges
    std::size_t from_dof = 0;
    std::size_t to_dof = 0;
    std::size_t first_interior = 0;  // DOF of node 1

    bool is_outer() const { return outer_index > 0; }
    std::size_t dof(int node) const;
    double position(int node) const { return h * node; }
};

class Grid {
public:
    Grid(FiniteGraph center, std::vector<OuterPath> outer, double h, bool refine_short_edges);

    const FiniteGraph& center() const { return center_; }
    const std::vector<Vertex>& vertices() const { return center_.vertices(); }
    /// Outer paths sorted by index; empty for a bounded graph.
    const std::vector<OuterPath>& outer_paths() const { return outer_; }
    double target_spacing() const { return h_; }
    std::size_t size() const { return mass_.size(); }
    const std::vector<Segment>& segments() const { return segments_; }
    const Segment& segment(const std::string& id) const;
    const Segment& outer_segment(int index) const;
    std::optional<std::size_t> find_segment(const std::string& id) const;

    std::size_t vertex_dof(const std::string& vertex_id) const;
    std::size_t far_dof(int outer_index) const { return outer_segment(outer_index).to_dof; }

    /// Control-volume masses w_k.
    const Eigen::VectorXd& mass() const { return mass_; }
    /// Stiffness K = sum over cells of (ρ/h)(e_i - e_j)(e_i - e_j)^T; the
    /// discrete Laplacian is L = -W^{-1} K.
    const SparseMatrix& stiffness() const { return stiffness_; }

    Eigen::VectorXd apply_laplacian(const Eigen::VectorXd& u) const;
    double weighted_dot(const Eigen::VectorXd& u, const Eigen::VectorXd& v) const;

    /// DOFs of the center graph (vertex DOFs and interior nodes of center edges).
    std::vector<std::size_t> center_dofs() const;

    double min_spacing() const;

private:
    FiniteGraph center_;
    std::vector<OuterPath> outer_;
    double h_;
    std::vector<Segment> segments_;
    Eigen::VectorXd mass_;
    SparseMatrix stiffness_;
};

using GridPtr = std::shared_ptr<const Grid>;

/// Throws SpacingTooCoarse when h exceeds a quarter of the shortest edge,
/// unless `refine_short_edges` gives those edges 4 cells of their own.
GridPtr discretize(const MetricGraph& g, double h, bool refine_short_edges = false);
/// Bounded graph with zero-flux (Neumann) closure at every degree-1 vertex.
GridPtr discretize(const FiniteGraph& g, double h, bool refine_short_edges = false);

/// Scalar field on a grid.
struct GridField {
    GridPtr grid;
    Eigen::VectorXd values;

    static GridField constant(GridPtr grid, double value);
    double at(const std::string& segment_id, int node) const;
    /// Values along a segment, node 0 first.
    std::vector<double> trace(const std::string& segment_id) const;
};

/// CSV with columns edge_id,s,value (one row per segment node).
void write_profile_csv(std::ostream& out, const GridField& u, const std::vector<std::string>& metadata = {});
GridField read_profile_csv(std::istream& in, GridPtr grid);

}  // namespace frontlab
