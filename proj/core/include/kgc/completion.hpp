#ifndef KGC_COMPLETION_HPP
#define KGC_COMPLETION_HPP

#include <chrono>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "kgc/decay.hpp"
#include "kgc/graph.hpp"

namespace kgc {

enum class Aggregation { Max, Avg, Sum };

// The engine counts walks. On a DAG walks coincide with simple paths; on a
// cyclic subgraph "all paths" is not well defined, so RequireDag is the
// default (hard error) and BoundedWalks is an opt-in extension counting
// walks of length <= max_hops.
enum class CyclePolicy { RequireDag, BoundedWalks };

struct RelationshipConfig {
    std::string rel;
    DecayFunction decay = DecayFunction::exponential(0.5);
    Aggregation aggregation = Aggregation::Sum;
    double threshold = 0.0;
    int max_hops = 7;
    CyclePolicy cycle_policy = CyclePolicy::RequireDag;

    // Throws ConfigError: threshold < 0, max_hops < 1, or a decay table
    // shorter than max_hops.
    void validate() const;
};

// Per ordered pair (x,z), x != z: walk counts c_h for h = 1..max_hops, plus
// (after aggregate_all) the aggregated strength S. Pairs with all-zero
// counts are not stored. A pair is truncated when some walk longer than
// max_hops exists, i.e. its stored counts are incomplete.
class PairStrengths {
public:
    int max_hops() const { return max_hops_; }
    std::size_t pair_count() const { return keys_.size(); }
    std::size_t truncated_pair_count() const { return truncated_pairs_; }
    bool has_strengths() const { return !strengths_.empty(); }

    struct View {
        const NodeId& source;
        const NodeId& target;
        std::span<const std::uint64_t> counts;   // counts[h-1] = c_h
        double strength;                         // NaN until aggregate_all
    };
    View pair(std::size_t i) const;

    // Counts row for (source,target), or an empty span when absent.
    std::span<const std::uint64_t> find(const NodeId& source, const NodeId& target) const;
    std::uint64_t count(const NodeId& source, const NodeId& target, int hops) const;

    void aggregate_all(const DecayFunction& decay, Aggregation agg);
    double strength(std::size_t i) const { return strengths_.at(i); }

private:
    friend PairStrengths count_paths_by_length(const TypedAdjacency&, int, CyclePolicy);

    int max_hops_ = 0;
    std::vector<NodeId> ids_;                                  // adjacency bijection copy
    std::unordered_map<NodeId, std::uint32_t> id_index_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> keys_; // sorted (source,target) indices
    std::vector<std::uint64_t> counts_;                         // keys_.size() * max_hops_
    std::vector<double> strengths_;
    std::size_t truncated_pairs_ = 0;
};

// Walk counts per length via sparse per-source propagation over Direct
// edges. RequireDag raises CyclicGraph on a cyclic subgraph.
// Throws: CyclicGraph, PathCountOverflow.
PairStrengths count_paths_by_length(const TypedAdjacency& adj, int max_hops, CyclePolicy policy);

// Aggregates the multiset { f(h) repeated c_h times }:
//   Max -> f(h_min), Sum -> sum c_h * f(h), Avg -> Sum / sum c_h.
// Throws EmptyPathSet when all counts are zero.
double aggregate_strength(std::span<const std::uint64_t> counts_by_length,
                          const DecayFunction& decay, Aggregation agg);

struct CompletionRecord {
    NodeId source;
    NodeId target;
    double strength = 0.0;
    int shortest_hops = 0;
    bool annotated_direct = false;   // true: existing Direct edge annotated
};

struct CompletionReport {
    std::string rel;
    std::size_t inferred_edge_count = 0;
    std::size_t annotated_direct_count = 0;
    std::size_t truncated_pairs_count = 0;
    std::vector<CompletionRecord> records;   // sorted by (source,target) id
    std::chrono::microseconds elapsed{0};
};

struct CompletionResult {
    KnowledgeGraph graph;
    CompletionReport report;
};

// The knowledge-completion phase for one relationship: aggregate decay-
// weighted path strengths over the Direct r-subgraph, keep pairs with
// S >= threshold, materialize. Pairs without an existing (source,target,rel)
// edge gain an Inferred edge with strength S; existing edges get strength S
// as an annotation. Inferred edges never feed the path base, so the
// operation is idempotent. Input graph is untouched.
// Throws: UnknownRelationship, NonTransitiveRelationship, CyclicGraph,
// PathCountOverflow.
CompletionResult complete(const KnowledgeGraph& g, const RelationshipConfig& cfg);

// All simple directed paths x -> z of length <= max_hops, as node sequences
// including both endpoints. Exhaustive DFS; oracle-grade, exponential in the
// worst case.
std::vector<std::vector<NodeId>> enumerate_simple_paths(const TypedAdjacency& adj,
                                                        const NodeId& x, const NodeId& z,
                                                        int max_hops);

// Independent oracle with the same contract as complete, built on per-pair
// simple-path enumeration. Requires an acyclic subgraph regardless of
// cycle_policy.
CompletionResult complete_bruteforce(const KnowledgeGraph& g, const RelationshipConfig& cfg);

} // namespace kgc

#endif
