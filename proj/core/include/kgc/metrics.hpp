#ifndef KGC_METRICS_HPP
#define KGC_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kgc/graph.hpp"

namespace kgc {

enum class Algorithm { Degree, PageRank };
enum class Direction { In, Out, Total };

struct PageRankParams {
    double damping = 0.85;
    double tolerance = 1e-7;
    int max_iterations = 100;
    bool weighted = false;       // edge strengths as weights (missing = 1)
    bool normalized = false;     // baseline (1-d)/N instead of (1-d)
};

struct MetricsSnapshot {
    Algorithm algorithm = Algorithm::Degree;
    std::string params;                 // rendered mode/params record
    std::map<NodeId, double> values;    // total map: every node present
    bool converged = true;              // PageRank only; false = NotConverged
    int iterations = 0;
};

// Incident-edge count (or strength sum when weighted; missing strength
// counts as 1) per node, Inferred edges included. rel = nullopt means all
// relationship types. Throws UnknownRelationship.
MetricsSnapshot degree_centrality(const KnowledgeGraph& g,
                                  const std::optional<std::string>& rel,
                                  Direction direction, bool weighted);

// Baseline-form PageRank: fixed point of
//   p(v) = base + d * sum_{u->v} p(u) * w(u,v) / wout(u)
// with base = 1-d (or (1-d)/N when normalized). Dangling mass is dropped.
// Stops when the L1 step change falls below tolerance; hitting
// max_iterations flags the snapshot as not converged instead of failing.
// Throws UnknownRelationship.
MetricsSnapshot pagerank(const KnowledgeGraph& g,
                         const std::optional<std::string>& rel,
                         const PageRankParams& params = {});

struct DiffEntry {
    NodeId node;
    double before = 0.0;
    double after = 0.0;
    double delta = 0.0;
    std::optional<double> pct;   // nullopt = sentinel New (before 0, after > 0)
};

enum class ChangeDirection { Increase, Decrease };

struct MetricsDiff {
    Algorithm algorithm = Algorithm::Degree;
    std::string params_before;
    std::string params_after;
    std::vector<DiffEntry> entries;   // sorted by node id
    std::size_t unchanged_count = 0;
};

// Pairs two snapshots of the same algorithm over the same node set.
// pct = 100 * (after-before)/before for before > 0; New sentinel for a zero
// baseline with growth; 0 when both are zero.
// Throws SnapshotMismatch.
MetricsDiff diff_metrics(const MetricsSnapshot& before, const MetricsSnapshot& after);

// Top-k by pct. Increase: descending, New above all finite values.
// Decrease: ascending over the same ordering, so the least-increasing nodes
// fill up k when fewer than k decreases exist. Ties break by node id, then
// delta. Returns fewer than k entries on small graphs.
std::vector<DiffEntry> top_changes(const MetricsDiff& diff, std::size_t k,
                                   ChangeDirection direction);

struct DiffSummary {
    std::vector<DiffEntry> top_increases;
    std::vector<DiffEntry> top_decreases;
    std::size_t unchanged_count = 0;
};

DiffSummary summarize(const MetricsDiff& diff, std::size_t k);

const char* to_string(Algorithm a) noexcept;
const char* to_string(Direction d) noexcept;

} // namespace kgc

#endif
