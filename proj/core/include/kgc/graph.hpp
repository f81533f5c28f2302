#ifndef KGC_GRAPH_HPP
#define KGC_GRAPH_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

namespace kgc {

// Node identity is a plain string key, unique within a graph. Positional
// indices exist only inside TypedAdjacency.
using NodeId = std::string;

using Scalar = std::variant<bool, std::int64_t, double, std::string>;
using PropertyMap = std::map<std::string, Scalar>;

struct Node {
    NodeId id;
    std::string label;
    PropertyMap properties;

    friend bool operator==(const Node&, const Node&) = default;
};

struct RelationshipType {
    std::string name;
    bool transitive = false;

    friend bool operator==(const RelationshipType&, const RelationshipType&) = default;
};

enum class Provenance { Direct, Inferred };

struct Edge {
    NodeId source;
    NodeId target;
    std::string rel;
    std::optional<double> strength;
    Provenance provenance = Provenance::Direct;

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct BuildStats {
    std::size_t duplicate_edges_collapsed = 0;
};

// Immutable after construction; completion produces a new graph value.
class KnowledgeGraph {
public:
    KnowledgeGraph() = default;

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    const std::vector<Node>& nodes() const { return nodes_; }
    const std::vector<Edge>& edges() const { return edges_; }
    const std::map<std::string, RelationshipType>& registry() const { return registry_; }

    bool has_node(const NodeId& id) const { return node_index_.count(id) != 0; }
    const Node* find_node(const NodeId& id) const;
    bool has_relationship(const std::string& rel) const { return registry_.count(rel) != 0; }
    const RelationshipType* find_relationship(const std::string& rel) const;
    const Edge* find_edge(const NodeId& source, const NodeId& target, const std::string& rel) const;

    std::size_t edge_count_of(const std::string& rel, Provenance provenance) const;

private:
    friend KnowledgeGraph build_graph(std::vector<Node>, std::vector<Edge>,
                                      std::vector<RelationshipType>, BuildStats*);

    std::vector<Node> nodes_;
    std::vector<Edge> edges_;
    std::map<std::string, RelationshipType> registry_;
    std::unordered_map<NodeId, std::size_t> node_index_;
    std::map<std::tuple<NodeId, NodeId, std::string>, std::size_t> edge_index_;
};

// Validates raw inputs into a graph. Duplicate (source,target,rel) triples
// collapse to the first occurrence and are counted in stats.
// Throws: UnknownRelationship, DanglingEndpoint, SelfLoop, DuplicateEntity.
KnowledgeGraph build_graph(std::vector<Node> nodes, std::vector<Edge> edges,
                           std::vector<RelationshipType> registry,
                           BuildStats* stats = nullptr);

// Materialized view of the r-subgraph: Direct edges of one relationship type
// over a total node-index bijection. Out-lists are sorted by target index.
struct TypedAdjacency {
    std::string rel;
    std::vector<NodeId> ids;                              // index -> id
    std::unordered_map<NodeId, std::uint32_t> index_of;   // id -> index
    std::vector<std::vector<std::uint32_t>> out;
    std::size_t arc_count = 0;
};

// Throws UnknownRelationship if rel is not registered.
TypedAdjacency typed_adjacency(const KnowledgeGraph& g, const std::string& rel);

struct CycleReport {
    bool acyclic = true;
    std::vector<NodeId> witness;   // node sequence [a, ..., a] when cyclic
};

CycleReport detect_cycles(const TypedAdjacency& adj);

} // namespace kgc

#endif
