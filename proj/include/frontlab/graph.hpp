#pragma once

// Metric graphs: a bounded center graph D with semi-infinite outer paths
// attached at exit points. Outer paths are carried with a numerical
// truncation length; the solver closes them with a zero-flux far end.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace frontlab {

struct Vertex {
    std::string id;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct Edge {
    std::string id;
    std::string from;
    std::string to;
    double length = 1.0;
    double thickness = 1.0;

    bool is_loop() const { return from == to; }
    friend bool operator==(const Edge&, const Edge&) = default;
};

struct OuterPath {
    int index = 0;  // 1..N
    std::string exit;
    double thickness = 1.0;
    double truncation = 40.0;

    friend bool operator==(const OuterPath&, const OuterPath&) = default;
};

inline constexpr double kDefaultTruncation = 40.0;

/// Bounded finite metric graph: vertices and weighted edges, connected.
/// Degree-1 vertices are allowed (they carry the zero Neumann condition);
/// loops count twice toward the degree.
class FiniteGraph {
public:
    FiniteGraph() = default;
    FiniteGraph(std::vector<Vertex> vertices, std::vector<Edge> edges);

    const std::vector<Vertex>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }

    std::optional<std::size_t> vertex_index(const std::string& id) const;
    std::optional<std::size_t> edge_index(const std::string& id) const;
    const Edge& edge(const std::string& id) const;
    bool has_vertex(const std::string& id) const { return vertex_index(id).has_value(); }

    std::size_t degree(const std::string& vertex_id) const;

    /// Thickness-weighted total length over all edges.
    double total_length() const;
    /// Thickness-weighted total length over a subset; throws UnknownEdgeId.
    double total_length(std::span<const std::string> edge_ids) const;

    friend bool operator==(const FiniteGraph&, const FiniteGraph&);

private:
    void validate() const;
    void reindex();

    std::vector<Vertex> vertices_;
    std::vector<Edge> edges_;
    std::map<std::string, std::size_t> vertex_lookup_;
    std::map<std::string, std::size_t> edge_lookup_;
};

/// The domain: center graph plus N >= 2 outer paths. Immutable after
/// construction; transforms return fresh graphs.
class MetricGraph {
public:
    MetricGraph(std::string name, std::vector<Vertex> vertices, std::vector<Edge> edges,
                std::vector<OuterPath> outer_paths, double sigma_length = 0.0);

    const std::string& name() const { return name_; }
    const FiniteGraph& center() const { return center_; }
    const std::vector<Vertex>& vertices() const { return center_.vertices(); }
    const std::vector<Edge>& edges() const { return center_.edges(); }
    const std::vector<OuterPath>& outer_paths() const { return outer_; }
    std::size_t num_outer() const { return outer_.size(); }

    /// Outer path with the given 1-based index; throws DanglingReference.
    const OuterPath& outer(int index) const;
    bool is_exit_point(const std::string& vertex_id) const;

    double total_length() const { return center_.total_length(); }
    double total_length(std::span<const std::string> edge_ids) const {
        return center_.total_length(edge_ids);
    }

    /// Total weighted length of subgraphs spliced in by perturbations so far.
    double sigma_length() const { return sigma_length_; }

    /// Copy with every outer path truncated at `length`.
    MetricGraph with_truncation(double length) const;

    friend bool operator==(const MetricGraph&, const MetricGraph&);

private:
    std::string name_;
    FiniteGraph center_;
    std::vector<OuterPath> outer_;
    double sigma_length_ = 0.0;
};

// ---------------------------------------------------------------------------
// Serialization. The document is JSON with blocks `graph.name`, `vertex[]`,
// `edge[]`, `outer[]`; other top-level blocks (nonlinearity, solver,
// boundary) are allowed but ignored here. Unknown keys inside the graph
// blocks are rejected.

MetricGraph build_graph(const nlohmann::json& doc);
MetricGraph build_graph_from_string(const std::string& text);
MetricGraph load_graph(const std::string& path);
nlohmann::json to_json(const MetricGraph& g);
FiniteGraph build_finite_graph(const nlohmann::json& doc);

// ---------------------------------------------------------------------------
// Perturbations.

struct SmallGraph {
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;

    double total_length() const;
};

struct RescaleEdge {
    std::string edge_id;
    double factor = 1.0;
};

/// Split `edge_id` at arclength `offset` from its `from` end and insert
/// `sigma`: the first half ends at `attach_in`, the second starts at
/// `attach_out` (equal ids hang sigma off a single point).
struct SpliceGraph {
    std::string edge_id;
    double offset = 0.0;
    SmallGraph sigma;
    std::string attach_in;
    std::string attach_out;
};

/// Replace `vertex_id` by `sigma`. Every incident edge end and every outer
/// path leaving the vertex must be mapped to a vertex of sigma.
struct ReplaceVertex {
    std::string vertex_id;
    SmallGraph sigma;
    std::map<std::string, std::string> edge_reattach;
    std::map<int, std::string> outer_reattach;
};

using Perturbation = std::variant<RescaleEdge, SpliceGraph, ReplaceVertex>;

MetricGraph perturb(const MetricGraph& g, const Perturbation& op);

struct UnifyTarget {
    int index = 0;
    double offset = 0.0;
};

/// Cut the target outer paths at their offsets, join the stubs at a new
/// vertex and let a single new outer path leave it. Path indices are
/// renumbered 1..N' in their original order; the merged path takes the
/// position (and thickness, truncation) of the smallest target index.
MetricGraph unify_outer_paths(const MetricGraph& g, int source, std::span<const UnifyTarget> targets);

// ---------------------------------------------------------------------------
// Builders for the standard families.

/// Star graph with center "P"; thicknesses.size() outer paths.
MetricGraph star_graph(std::span<const double> thicknesses, double truncation = kDefaultTruncation);
MetricGraph star_graph(int n, double truncation = kDefaultTruncation);

/// Two k-stars whose centers P1, P2 are joined by an edge of given length.
MetricGraph two_stars_graph(int k, double length, double truncation = kDefaultTruncation);

/// Melon: vertices A, B joined by m parallel edges of length l0.
FiniteGraph melon_graph(int m, double l0, double thickness = 1.0);

/// Path A - B of the given length as a finite graph.
FiniteGraph segment_graph(double length, double thickness = 1.0);

/// Triangle with perimeter `perimeter`; vertex ids prefix+{0,1,2}.
SmallGraph triangle_sigma(double perimeter, const std::string& prefix = "S");

/// Star with its center replaced by a triangle of perimeter `perimeter`;
/// outer paths are attached to the corners round-robin.
MetricGraph perturbed_star(int n, double perimeter, double truncation = kDefaultTruncation);

/// P1 carries paths 1 and 5, P2 carries 2, 3, 4, edge P1P2 of length l.
MetricGraph partial_propagation_graph(double l, double truncation = kDefaultTruncation);

/// P1 carries path 1 and edges to Q1, Q2 of length l; Q1 carries 2, 3 and
/// Q2 carries 4, 5.
MetricGraph double_branching_graph(double l, double truncation = kDefaultTruncation);

/// Double branching with its four far paths unified at `offset`.
MetricGraph one_way_graph(double l, double offset, double truncation = kDefaultTruncation);

/// Host star with `host_paths` outer paths at P, a stem P-A of length
/// `stem`, and a melon A-B with m edges of length l0.
MetricGraph reservoir_graph(int host_paths, double stem, int m, double l0,
                            double truncation = kDefaultTruncation);

/// Star junction P with `star_paths` outer paths plus an edge P-Q of length
/// `stem`; Q carries outer path 1 (the source sits in front of the star).
MetricGraph faraway_front_graph(int star_paths, double stem, double truncation = kDefaultTruncation);

/// P carries outer path 1, `free_paths` further outer paths and `m`
/// connectors of length `stem` to the vertices of a D0 chain; each D0
/// vertex carries one outer path (the attachment sits behind the star).
MetricGraph faraway_behind_graph(int free_paths, int m, double stem,
                                 double truncation = kDefaultTruncation);

/// Seeded random connected center graph with the given vertex and path
/// counts; edge lengths uniform in [min_length, max_length].
MetricGraph random_center_graph(unsigned seed, int vertices, int paths, double min_length = 1.0,
                                double max_length = 4.0, double truncation = kDefaultTruncation);

}  // namespace frontlab
