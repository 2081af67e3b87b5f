#include "frontlab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"

#include "frontlab/errors.hpp"

namespace frontlab {

namespace {

using json = nlohmann::json;

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

// ---------------------------------------------------------------------------
// FiniteGraph

FiniteGraph::FiniteGraph(std::vector<Vertex> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    std::sort(vertices_.begin(), vertices_.end(),
              [](const Vertex& a, const Vertex& b) { return a.id < b.id; });
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    reindex();
    validate();
}

void FiniteGraph::reindex() {
    vertex_lookup_.clear();
    edge_lookup_.clear();
    for (std::size_t k = 0; k < vertices_.size(); ++k) {
        if (!vertex_lookup_.emplace(vertices_[k].id, k).second) {
            throw Error(ErrorCode::DuplicateId, "vertex '" + vertices_[k].id + "'");
        }
    }
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        if (!edge_lookup_.emplace(edges_[k].id, k).second) {
            throw Error(ErrorCode::DuplicateId, "edge '" + edges_[k].id + "'");
        }
    }
}

void FiniteGraph::validate() const {
    if (vertices_.empty()) {
        throw Error(ErrorCode::DisconnectedCenter, "center graph has no vertices");
    }
    std::vector<std::size_t> parent(vertices_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (const auto& e : edges_) {
        auto a = vertex_index(e.from);
        auto b = vertex_index(e.to);
        if (!a || !b) {
            throw Error(ErrorCode::DanglingReference,
                        "edge '" + e.id + "' references undeclared vertex '" + (a ? e.to : e.from) + "'");
        }
        if (!(e.length > 0.0)) {
            throw Error(ErrorCode::NonpositiveLength, "edge '" + e.id + "' has length " + std::to_string(e.length));
        }
        if (!(e.thickness > 0.0)) {
            throw Error(ErrorCode::NonpositiveLength,
                        "edge '" + e.id + "' has thickness " + std::to_string(e.thickness));
        }
        parent[find_root(parent, *a)] = find_root(parent, *b);
    }
    const std::size_t root = find_root(parent, 0);
    for (std::size_t k = 1; k < vertices_.size(); ++k) {
        if (find_root(parent, k) != root) {
            throw Error(ErrorCode::DisconnectedCenter, "vertex '" + vertices_[k].id + "' is not reachable");
        }
    }
}

std::optional<std::size_t> FiniteGraph::vertex_index(const std::string& id) const {
    auto it = vertex_lookup_.find(id);
    if (it == vertex_lookup_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> FiniteGraph::edge_index(const std::string& id) const {
    auto it = edge_lookup_.find(id);
    if (it == edge_lookup_.end()) return std::nullopt;
    return it->second;
}

const Edge& FiniteGraph::edge(const std::string& id) const {
    auto k = edge_index(id);
    if (!k) throw Error(ErrorCode::UnknownEdgeId, "'" + id + "'");
    return edges_[*k];
}

std::size_t FiniteGraph::degree(const std::string& vertex_id) const {
    std::size_t d = 0;
    for (const auto& e : edges_) {
        if (e.from == vertex_id) ++d;
        if (e.to == vertex_id) ++d;
    }
    return d;
}

double FiniteGraph::total_length() const {
    double sum = 0.0;
    for (const auto& e : edges_) sum += e.thickness * e.length;
    return sum;
}

double FiniteGraph::total_length(std::span<const std::string> edge_ids) const {
    double sum = 0.0;
    for (const auto& id : edge_ids) {
        const Edge& e = edge(id);
        sum += e.thickness * e.length;
    }
    return sum;
}

bool operator==(const FiniteGraph& a, const FiniteGraph& b) {
    return a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
}

// ---------------------------------------------------------------------------
// MetricGraph

MetricGraph::MetricGraph(std::string name, std::vector<Vertex> vertices, std::vector<Edge> edges,
                         std::vector<OuterPath> outer_paths, double sigma_length)
    : name_(std::move(name)),
      center_(std::move(vertices), std::move(edges)),
      outer_(std::move(outer_paths)),
      sigma_length_(sigma_length) {
    std::sort(outer_.begin(), outer_.end(),
              [](const OuterPath& a, const OuterPath& b) { return a.index < b.index; });
    if (outer_.size() < 2) {
        throw Error(ErrorCode::FewerThanTwoOuterPaths, "graph '" + name_ + "' has " +
                                                           std::to_string(outer_.size()) + " outer path(s)");
    }
    for (std::size_t k = 0; k < outer_.size(); ++k) {
        const auto& p = outer_[k];
        if (p.index != static_cast<int>(k) + 1) {
            throw Error(ErrorCode::InvalidDocument, "outer path indices must be 1..N without gaps");
        }
        if (!center_.has_vertex(p.exit)) {
            throw Error(ErrorCode::DanglingReference,
                        "outer path " + std::to_string(p.index) + " exits at undeclared vertex '" + p.exit + "'");
        }
        if (!(p.thickness > 0.0) || !(p.truncation > 0.0)) {
            throw Error(ErrorCode::NonpositiveLength,
                        "outer path " + std::to_string(p.index) + " needs positive thickness and truncation");
        }
    }
}

const OuterPath& MetricGraph::outer(int index) const {
    if (index < 1 || index > static_cast<int>(outer_.size())) {
        throw Error(ErrorCode::DanglingReference, "no outer path " + std::to_string(index));
    }
    return outer_[static_cast<std::size_t>(index - 1)];
}

bool MetricGraph::is_exit_point(const std::string& vertex_id) const {
    return std::any_of(outer_.begin(), outer_.end(), [&](const OuterPath& p) { return p.exit == vertex_id; });
}

MetricGraph MetricGraph::with_truncation(double length) const {
    auto paths = outer_;
    for (auto& p : paths) p.truncation = length;
    return MetricGraph(name_, center_.vertices(), center_.edges(), std::move(paths), sigma_length_);
}

bool operator==(const MetricGraph& a, const MetricGraph& b) {
    return a.name_ == b.name_ && a.center_ == b.center_ && a.outer_ == b.outer_;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

void require_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!obj.is_object()) throw Error(ErrorCode::InvalidDocument, where + " must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; });
        if (!ok) throw Error(ErrorCode::InvalidDocument, "unknown key '" + key + "' in " + where);
    }
}

template <typename T>
T get_required(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) throw Error(ErrorCode::InvalidDocument, "missing '" + std::string(key) + "' in " + where);
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::InvalidDocument, "bad '" + std::string(key) + "' in " + where + ": " + ex.what());
    }
}

template <typename T>
T get_optional(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::InvalidDocument, "bad '" + std::string(key) + "': " + ex.what());
    }
}

const json& array_block(const json& doc, const char* key) {
    static const json empty = json::array();
    if (!doc.contains(key)) return empty;
    const json& block = doc.at(key);
    if (!block.is_array()) throw Error(ErrorCode::InvalidDocument, std::string("'") + key + "' must be a list");
    return block;
}

std::pair<std::vector<Vertex>, std::vector<Edge>> parse_center(const json& doc) {
    std::vector<Vertex> vertices;
    for (const auto& v : array_block(doc, "vertex")) {
        require_keys(v, {"id"}, "vertex");
        vertices.push_back({get_required<std::string>(v, "id", "vertex")});
    }
    std::vector<Edge> edges;
    for (const auto& e : array_block(doc, "edge")) {
        require_keys(e, {"id", "from", "to", "length", "thickness"}, "edge");
        Edge edge;
        edge.id = get_required<std::string>(e, "id", "edge");
        edge.from = get_required<std::string>(e, "from", "edge '" + edge.id + "'");
        edge.to = get_required<std::string>(e, "to", "edge '" + edge.id + "'");
        edge.length = get_required<double>(e, "length", "edge '" + edge.id + "'");
        edge.thickness = get_optional<double>(e, "thickness", 1.0);
        edges.push_back(std::move(edge));
    }
    return {std::move(vertices), std::move(edges)};
}

}  // namespace

MetricGraph build_graph(const json& doc) {
    require_keys(doc, {"graph", "vertex", "edge", "outer", "nonlinearity", "solver", "boundary", "scenario"},
                 "document");
    std::string name = "graph";
    if (doc.contains("graph")) {
        require_keys(doc.at("graph"), {"name"}, "graph");
        name = get_optional<std::string>(doc.at("graph"), "name", name);
    }
    auto [vertices, edges] = parse_center(doc);
    std::vector<OuterPath> outer;
    for (const auto& o : array_block(doc, "outer")) {
        require_keys(o, {"index", "exit", "thickness", "truncation"}, "outer");
        OuterPath p;
        p.index = get_required<int>(o, "index", "outer");
        p.exit = get_required<std::string>(o, "exit", "outer " + std::to_string(p.index));
        p.thickness = get_optional<double>(o, "thickness", 1.0);
        p.truncation = get_optional<double>(o, "truncation", kDefaultTruncation);
        outer.push_back(std::move(p));
    }
    std::set<int> seen;
    for (const auto& p : outer) {
        if (!seen.insert(p.index).second) {
            throw Error(ErrorCode::DuplicateId, "outer path index " + std::to_string(p.index));
        }
    }
    return MetricGraph(std::move(name), std::move(vertices), std::move(edges), std::move(outer));
}

FiniteGraph build_finite_graph(const json& doc) {
    auto [vertices, edges] = parse_center(doc);
    return FiniteGraph(std::move(vertices), std::move(edges));
}

MetricGraph build_graph_from_string(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& ex) {
        throw Error(ErrorCode::InvalidDocument, ex.what());
    }
    return build_graph(doc);
}

MetricGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidDocument, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return build_graph_from_string(buf.str());
}

json to_json(const MetricGraph& g) {
    json doc;
    doc["graph"] = {{"name", g.name()}};
    doc["vertex"] = json::array();
    for (const auto& v : g.vertices()) doc["vertex"].push_back({{"id", v.id}});
    doc["edge"] = json::array();
    for (const auto& e : g.edges()) {
        doc["edge"].push_back(
            {{"id", e.id}, {"from", e.from}, {"to", e.to}, {"length", e.length}, {"thickness", e.thickness}});
    }
    doc["outer"] = json::array();
    for (const auto& p : g.outer_paths()) {
        doc["outer"].push_back(
            {{"index", p.index}, {"exit", p.exit}, {"thickness", p.thickness}, {"truncation", p.truncation}});
    }
    return doc;
}

// ---------------------------------------------------------------------------
// Perturbations

double SmallGraph::total_length() const {
    double sum = 0.0;
    for (const auto& e : edges) sum += e.thickness * e.length;
    return sum;
}

namespace {

bool sigma_has_vertex(const SmallGraph& s, const std::string& id) {
    return std::any_of(s.vertices.begin(), s.vertices.end(), [&](const Vertex& v) { return v.id == id; });
}

MetricGraph apply(const MetricGraph& g, const RescaleEdge& op) {
    if (!(op.factor > 0.0)) {
        throw Error(ErrorCode::NonpositiveLength, "rescale factor " + std::to_string(op.factor));
    }
    auto edges = g.edges();
    auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.id == op.edge_id; });
    if (it == edges.end()) throw Error(ErrorCode::UnknownEdgeId, "'" + op.edge_id + "'");
    it->length *= op.factor;
    return MetricGraph(g.name(), g.vertices(), std::move(edges), g.outer_paths(), g.sigma_length());
}

MetricGraph apply(const MetricGraph& g, const SpliceGraph& op) {
    auto edges = g.edges();
    auto it = std::find_if(edges.begin(), edges.end(), [&](const Edge& e) { return e.id == op.edge_id; });
    if (it == edges.end()) throw Error(ErrorCode::UnknownEdgeId, "'" + op.edge_id + "'");
    if (!(op.offset > 0.0) || !(op.offset < it->length)) {
        throw Error(ErrorCode::InvalidSplicePoint, "offset " + std::to_string(op.offset) + " outside edge '" +
                                                       op.edge_id + "' of length " + std::to_string(it->length));
    }
    if (!sigma_has_vertex(op.sigma, op.attach_in) || !sigma_has_vertex(op.sigma, op.attach_out)) {
        throw Error(ErrorCode::DanglingReference, "splice attachment is not a vertex of the inserted graph");
    }
    Edge first = *it;
    Edge second = *it;
    first.id = it->id + "a";
    first.to = op.attach_in;
    first.length = op.offset;
    second.id = it->id + "b";
    second.from = op.attach_out;
    second.length = it->length - op.offset;
    edges.erase(it);
    edges.push_back(first);
    edges.push_back(second);
    edges.insert(edges.end(), op.sigma.edges.begin(), op.sigma.edges.end());
    auto vertices = g.vertices();
    vertices.insert(vertices.end(), op.sigma.vertices.begin(), op.sigma.vertices.end());
    return MetricGraph(g.name(), std::move(vertices), std::move(edges), g.outer_paths(),
                       g.sigma_length() + op.sigma.total_length());
}

MetricGraph apply(const MetricGraph& g, const ReplaceVertex& op) {
    if (!g.center().has_vertex(op.vertex_id)) {
        throw Error(ErrorCode::DanglingReference, "no vertex '" + op.vertex_id + "' to replace");
    }
    auto target_of = [&](const std::string& key, const std::string& what) -> const std::string& {
        auto found = op.edge_reattach.find(key);
        if (found == op.edge_reattach.end()) {
            throw Error(ErrorCode::ReattachmentIncomplete, what + " '" + key + "' is not mapped");
        }
        if (!sigma_has_vertex(op.sigma, found->second)) {
            throw Error(ErrorCode::DanglingReference, "reattachment target '" + found->second + "' not in sigma");
        }
        return found->second;
    };
    auto edges = g.edges();
    for (auto& e : edges) {
        if (e.from == op.vertex_id) e.from = target_of(e.id, "incident edge");
        if (e.to == op.vertex_id) e.to = target_of(e.id, "incident edge");
    }
    auto outer = g.outer_paths();
    for (auto& p : outer) {
        if (p.exit != op.vertex_id) continue;
        auto found = op.outer_reattach.find(p.index);
        if (found == op.outer_reattach.end()) {
            throw Error(ErrorCode::ReattachmentIncomplete, "outer path " + std::to_string(p.index) + " is not mapped");
        }
        if (!sigma_has_vertex(op.sigma, found->second)) {
            throw Error(ErrorCode::DanglingReference, "reattachment target '" + found->second + "' not in sigma");
        }
        p.exit = found->second;
    }
    std::vector<Vertex> vertices;
    for (const auto& v : g.vertices()) {
        if (v.id != op.vertex_id) vertices.push_back(v);
    }
    vertices.insert(vertices.end(), op.sigma.vertices.begin(), op.sigma.vertices.end());
    edges.insert(edges.end(), op.sigma.edges.begin(), op.sigma.edges.end());
    return MetricGraph(g.name(), std::move(vertices), std::move(edges), std::move(outer),
                       g.sigma_length() + op.sigma.total_length());
}

}  // namespace

MetricGraph perturb(const MetricGraph& g, const Perturbation& op) {
    return std::visit([&](const auto& concrete) { return apply(g, concrete); }, op);
}

MetricGraph unify_outer_paths(const MetricGraph& g, int source, std::span<const UnifyTarget> targets) {
    if (targets.empty()) throw Error(ErrorCode::IndexCollision, "no targets to unify");
    g.outer(source);
    std::set<int> seen;
    for (const auto& t : targets) {
        g.outer(t.index);
        if (t.index == source || !seen.insert(t.index).second) {
            throw Error(ErrorCode::IndexCollision, "target index " + std::to_string(t.index));
        }
        if (!(t.offset > 0.0)) {
            throw Error(ErrorCode::NonpositiveOffset, "offset for path " + std::to_string(t.index));
        }
    }
    const int j0 = *seen.begin();
    const OuterPath& merged_template = g.outer(j0);

    std::string joint = "U" + std::to_string(j0);
    while (g.center().has_vertex(joint)) joint += "_";

    auto vertices = g.vertices();
    vertices.push_back({joint});
    auto edges = g.edges();
    for (const auto& t : targets) {
        const OuterPath& p = g.outer(t.index);
        std::string id = "stub" + std::to_string(t.index);
        while (g.center().edge_index(id)) id += "_";
        edges.push_back({id, p.exit, joint, t.offset, p.thickness});
    }

    std::vector<OuterPath> outer;
    for (const auto& p : g.outer_paths()) {
        if (p.index == j0) {
            OuterPath merged = merged_template;
            merged.exit = joint;
            outer.push_back(merged);
        } else if (!seen.contains(p.index)) {
            outer.push_back(p);
        }
    }
    for (std::size_t k = 0; k < outer.size(); ++k) outer[k].index = static_cast<int>(k) + 1;
    return MetricGraph(g.name(), std::move(vertices), std::move(edges), std::move(outer), g.sigma_length());
}

// ---------------------------------------------------------------------------
// Builders

MetricGraph star_graph(std::span<const double> thicknesses, double truncation) {
    std::vector<OuterPath> outer;
    for (std::size_t k = 0; k < thicknesses.size(); ++k) {
        outer.push_back({static_cast<int>(k) + 1, "P", thicknesses[k], truncation});
    }
    return MetricGraph("star" + std::to_string(thicknesses.size()), {{"P"}}, {}, std::move(outer));
}

MetricGraph star_graph(int n, double truncation) {
    std::vector<double> rho(static_cast<std::size_t>(std::max(n, 0)), 1.0);
    return star_graph(rho, truncation);
}

MetricGraph two_stars_graph(int k, double length, double truncation) {
    std::vector<OuterPath> outer;
    for (int j = 1; j <= 2 * k; ++j) outer.push_back({j, j <= k ? "P1" : "P2", 1.0, truncation});
    return MetricGraph("two_stars", {{"P1"}, {"P2"}}, {{"e12", "P1", "P2", length, 1.0}}, std::move(outer));
}

FiniteGraph melon_graph(int m, double l0, double thickness) {
    std::vector<Edge> edges;
    for (int k = 1; k <= m; ++k) edges.push_back({"m" + std::to_string(k), "A", "B", l0, thickness});
    return FiniteGraph({{"A"}, {"B"}}, std::move(edges));
}

FiniteGraph segment_graph(double length, double thickness) {
    return FiniteGraph({{"A"}, {"B"}}, {{"e", "A", "B", length, thickness}});
}

SmallGraph triangle_sigma(double perimeter, const std::string& prefix) {
    SmallGraph s;
    for (int k = 0; k < 3; ++k) s.vertices.push_back({prefix + std::to_string(k)});
    const double side = perimeter / 3.0;
    s.edges.push_back({prefix + "01", prefix + "0", prefix + "1", side, 1.0});
    s.edges.push_back({prefix + "12", prefix + "1", prefix + "2", side, 1.0});
    s.edges.push_back({prefix + "20", prefix + "2", prefix + "0", side, 1.0});
    return s;
}

MetricGraph perturbed_star(int n, double perimeter, double truncation) {
    MetricGraph base = star_graph(n, truncation);
    if (perimeter <= 0.0) return base;
    ReplaceVertex op;
    op.vertex_id = "P";
    op.sigma = triangle_sigma(perimeter);
    for (int j = 1; j <= n; ++j) op.outer_reattach[j] = "S" + std::to_string((j - 1) % 3);
    return perturb(base, op);
}

MetricGraph partial_propagation_graph(double l, double truncation) {
    std::vector<OuterPath> outer = {
        {1, "P1", 1.0, truncation}, {2, "P2", 1.0, truncation}, {3, "P2", 1.0, truncation},
        {4, "P2", 1.0, truncation}, {5, "P1", 1.0, truncation},
    };
    return MetricGraph("partial", {{"P1"}, {"P2"}}, {{"P1P2", "P1", "P2", l, 1.0}}, std::move(outer));
}

MetricGraph double_branching_graph(double l, double truncation) {
    std::vector<OuterPath> outer = {
        {1, "P1", 1.0, truncation}, {2, "Q1", 1.0, truncation}, {3, "Q1", 1.0, truncation},
        {4, "Q2", 1.0, truncation}, {5, "Q2", 1.0, truncation},
    };
    std::vector<Edge> edges = {{"P1Q1", "P1", "Q1", l, 1.0}, {"P1Q2", "P1", "Q2", l, 1.0}};
    return MetricGraph("double_branching", {{"P1"}, {"Q1"}, {"Q2"}}, std::move(edges), std::move(outer));
}

MetricGraph one_way_graph(double l, double offset, double truncation) {
    const MetricGraph base = double_branching_graph(l, truncation);
    const std::vector<UnifyTarget> targets = {{2, offset}, {3, offset}, {4, offset}, {5, offset}};
    MetricGraph unified = unify_outer_paths(base, 1, targets);
    return MetricGraph("one_way", unified.vertices(), unified.edges(), unified.outer_paths());
}

MetricGraph reservoir_graph(int host_paths, double stem, int m, double l0, double truncation) {
    std::vector<OuterPath> outer;
    for (int j = 1; j <= host_paths; ++j) outer.push_back({j, "P", 1.0, truncation});
    std::vector<Edge> edges = {{"stem", "P", "A", stem, 1.0}};
    for (int k = 1; k <= m; ++k) edges.push_back({"r" + std::to_string(k), "A", "B", l0, 1.0});
    return MetricGraph("reservoir", {{"A"}, {"B"}, {"P"}}, std::move(edges), std::move(outer));
}

MetricGraph faraway_front_graph(int star_paths, double stem, double truncation) {
    std::vector<OuterPath> outer = {{1, "Q", 1.0, truncation}};
    for (int j = 0; j < star_paths; ++j) outer.push_back({j + 2, "P", 1.0, truncation});
    return MetricGraph("faraway_front", {{"P"}, {"Q"}}, {{"QP", "Q", "P", stem, 1.0}}, std::move(outer));
}

MetricGraph faraway_behind_graph(int free_paths, int m, double stem, double truncation) {
    std::vector<Vertex> vertices = {{"P"}};
    std::vector<Edge> edges;
    std::vector<OuterPath> outer = {{1, "P", 1.0, truncation}};
    int next = 2;
    for (int j = 0; j < free_paths; ++j) outer.push_back({next++, "P", 1.0, truncation});
    for (int k = 1; k <= m; ++k) {
        const std::string q = "Q" + std::to_string(k);
        vertices.push_back({q});
        edges.push_back({"PQ" + std::to_string(k), "P", q, stem, 1.0});
        if (k > 1) edges.push_back({"D" + std::to_string(k - 1), "Q" + std::to_string(k - 1), q, 1.0, 1.0});
        outer.push_back({next++, q, 1.0, truncation});
    }
    return MetricGraph("faraway_behind", std::move(vertices), std::move(edges), std::move(outer));
}

MetricGraph random_center_graph(unsigned seed, int vertices, int paths, double min_length, double max_length,
                                double truncation) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> length(min_length, max_length);
    std::vector<Vertex> vs;
    for (int k = 0; k < vertices; ++k) vs.push_back({"V" + std::to_string(k)});
    std::vector<Edge> es;
    for (int k = 1; k < vertices; ++k) {
        std::uniform_int_distribution<int> pick(0, k - 1);
        es.push_back({"t" + std::to_string(k), vs[static_cast<std::size_t>(pick(rng))].id,
                      vs[static_cast<std::size_t>(k)].id, length(rng), 1.0});
    }
    std::uniform_int_distribution<int> any(0, vertices - 1);
    std::uniform_int_distribution<int> extra_count(0, 2);
    const int extras = vertices > 2 ? extra_count(rng) : 0;
    for (int k = 0; k < extras; ++k) {
        int a = any(rng);
        int b = any(rng);
        if (a == b) b = (a + 1) % vertices;
        es.push_back({"x" + std::to_string(k), vs[static_cast<std::size_t>(a)].id,
                      vs[static_cast<std::size_t>(b)].id, length(rng), 1.0});
    }
    std::vector<OuterPath> outer;
    for (int j = 1; j <= paths; ++j) {
        outer.push_back({j, vs[static_cast<std::size_t>(any(rng))].id, 1.0, truncation});
    }
    return MetricGraph("random" + std::to_string(seed), std::move(vs), std::move(es), std::move(outer));
}

}  // namespace frontlab
