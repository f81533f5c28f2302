#include "kgc/graph.hpp"

#include <algorithm>
#include <tuple>

#include "kgc/error.hpp"

namespace kgc {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::UnknownRelationship: return "UnknownRelationship";
        case ErrorKind::DanglingEndpoint: return "DanglingEndpoint";
        case ErrorKind::SelfLoop: return "SelfLoop";
        case ErrorKind::DuplicateEntity: return "DuplicateEntity";
        case ErrorKind::NonTransitiveRelationship: return "NonTransitiveRelationship";
        case ErrorKind::SnapshotMismatch: return "SnapshotMismatch";
        case ErrorKind::CyclicGraph: return "CyclicGraph";
        case ErrorKind::HopOutOfRange: return "HopOutOfRange";
        case ErrorKind::EmptyPathSet: return "EmptyPathSet";
        case ErrorKind::PathCountOverflow: return "PathCountOverflow";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SchemaError: return "SchemaError";
        case ErrorKind::ConfigError: return "ConfigError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Error";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::ParseError: return 3;
        case ErrorKind::SchemaError: return 4;
        case ErrorKind::ConfigError: return 5;
        case ErrorKind::CyclicGraph: return 6;
        case ErrorKind::IoError: return 7;
        case ErrorKind::InvalidParams: return 8;
        case ErrorKind::UnknownRelationship:
        case ErrorKind::DanglingEndpoint:
        case ErrorKind::SelfLoop:
        case ErrorKind::DuplicateEntity:
        case ErrorKind::NonTransitiveRelationship:
        case ErrorKind::SnapshotMismatch: return 9;
        case ErrorKind::HopOutOfRange:
        case ErrorKind::EmptyPathSet:
        case ErrorKind::PathCountOverflow: return 10;
    }
    return 10;
}

const Node* KnowledgeGraph::find_node(const NodeId& id) const {
    auto it = node_index_.find(id);
    return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const RelationshipType* KnowledgeGraph::find_relationship(const std::string& rel) const {
    auto it = registry_.find(rel);
    return it == registry_.end() ? nullptr : &it->second;
}

const Edge* KnowledgeGraph::find_edge(const NodeId& source, const NodeId& target,
                                      const std::string& rel) const {
    auto it = edge_index_.find(std::make_tuple(source, target, rel));
    return it == edge_index_.end() ? nullptr : &edges_[it->second];
}

std::size_t KnowledgeGraph::edge_count_of(const std::string& rel, Provenance provenance) const {
    std::size_t n = 0;
    for (const auto& e : edges_) {
        if (e.rel == rel && e.provenance == provenance) ++n;
    }
    return n;
}

KnowledgeGraph build_graph(std::vector<Node> nodes, std::vector<Edge> edges,
                           std::vector<RelationshipType> registry, BuildStats* stats) {
    KnowledgeGraph g;

    for (auto& rt : registry) {
        auto [it, inserted] = g.registry_.emplace(rt.name, rt);
        if (!inserted && !(it->second == rt)) {
            throw Error(ErrorKind::DuplicateEntity,
                        "relationship type '" + rt.name + "' declared twice with different flags");
        }
    }

    g.nodes_.reserve(nodes.size());
    for (auto& n : nodes) {
        if (n.label.empty()) {
            throw Error(ErrorKind::InvalidParams, "node '" + n.id + "' has an empty label");
        }
        auto it = g.node_index_.find(n.id);
        if (it != g.node_index_.end()) {
            if (g.nodes_[it->second] == n) continue;   // identical duplicate row
            throw Error(ErrorKind::DuplicateEntity,
                        "node id '" + n.id + "' appears twice with different content");
        }
        g.node_index_.emplace(n.id, g.nodes_.size());
        g.nodes_.push_back(std::move(n));
    }

    BuildStats local;
    g.edges_.reserve(edges.size());
    for (auto& e : edges) {
        if (e.source == e.target) {
            throw Error(ErrorKind::SelfLoop, "edge " + e.source + " -> " + e.target +
                                                 " [" + e.rel + "] is a self-loop");
        }
        if (!g.registry_.count(e.rel)) {
            throw Error(ErrorKind::UnknownRelationship,
                        "edge type '" + e.rel + "' is not in the registry");
        }
        if (!g.node_index_.count(e.source)) {
            throw Error(ErrorKind::DanglingEndpoint,
                        "edge source '" + e.source + "' is not a node");
        }
        if (!g.node_index_.count(e.target)) {
            throw Error(ErrorKind::DanglingEndpoint,
                        "edge target '" + e.target + "' is not a node");
        }
        if (e.strength && !(*e.strength > 0.0)) {
            throw Error(ErrorKind::InvalidParams,
                        "edge " + e.source + " -> " + e.target + " has non-positive strength");
        }
        auto key = std::make_tuple(e.source, e.target, e.rel);
        if (g.edge_index_.count(key)) {
            ++local.duplicate_edges_collapsed;   // first occurrence wins
            continue;
        }
        g.edge_index_.emplace(std::move(key), g.edges_.size());
        g.edges_.push_back(std::move(e));
    }

    if (stats) *stats = local;
    return g;
}

TypedAdjacency typed_adjacency(const KnowledgeGraph& g, const std::string& rel) {
    if (!g.has_relationship(rel)) {
        throw Error(ErrorKind::UnknownRelationship, "'" + rel + "' is not in the registry");
    }

    TypedAdjacency adj;
    adj.rel = rel;
    adj.ids.reserve(g.node_count());
    for (const auto& n : g.nodes()) {
        adj.index_of.emplace(n.id, static_cast<std::uint32_t>(adj.ids.size()));
        adj.ids.push_back(n.id);
    }
    adj.out.assign(adj.ids.size(), {});
    for (const auto& e : g.edges()) {
        if (e.rel != rel || e.provenance != Provenance::Direct) continue;
        adj.out[adj.index_of.at(e.source)].push_back(adj.index_of.at(e.target));
        ++adj.arc_count;
    }
    for (auto& neighbors : adj.out) {
        std::sort(neighbors.begin(), neighbors.end());
    }
    return adj;
}

CycleReport detect_cycles(const TypedAdjacency& adj) {
    const std::size_t n = adj.ids.size();
    enum : unsigned char { White, Grey, Black };
    std::vector<unsigned char> color(n, White);
    std::vector<std::uint32_t> parent(n, 0);

    // Iterative DFS; a grey->grey arc closes a directed cycle.
    struct Frame {
        std::uint32_t node;
        std::size_t next_child;
    };
    std::vector<Frame> stack;

    for (std::uint32_t root = 0; root < n; ++root) {
        if (color[root] != White) continue;
        stack.push_back({root, 0});
        color[root] = Grey;
        while (!stack.empty()) {
            Frame& frame = stack.back();
            if (frame.next_child < adj.out[frame.node].size()) {
                std::uint32_t child = adj.out[frame.node][frame.next_child++];
                if (color[child] == White) {
                    color[child] = Grey;
                    parent[child] = frame.node;
                    stack.push_back({child, 0});
                } else if (color[child] == Grey) {
                    CycleReport report;
                    report.acyclic = false;
                    std::vector<std::uint32_t> cycle{child};
                    for (std::uint32_t v = frame.node; v != child; v = parent[v]) {
                        cycle.push_back(v);
                    }
                    cycle.push_back(child);
                    std::reverse(cycle.begin() + 1, cycle.end() - 1);
                    for (auto v : cycle) report.witness.push_back(adj.ids[v]);
                    return report;
                }
            } else {
                color[frame.node] = Black;
                stack.pop_back();
            }
        }
    }
    return {};
}

} // namespace kgc
