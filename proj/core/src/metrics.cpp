#include "kgc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <utility>

#include "kgc/error.hpp"
#include "kgc/io.hpp"

namespace kgc {

namespace {

void require_known_rel(const KnowledgeGraph& g, const std::optional<std::string>& rel) {
    if (rel && g.find_relationship(*rel) == nullptr)
        throw Error(ErrorKind::UnknownRelationship, *rel + " is not registered");
}

std::string rel_token(const std::optional<std::string>& rel) {
    return rel ? *rel : "*";
}

const char* bool_token(bool b) { return b ? "true" : "false"; }

} // namespace

const char* to_string(Algorithm a) noexcept {
    switch (a) {
    case Algorithm::Degree: return "degree";
    case Algorithm::PageRank: return "pagerank";
    }
    return "?";
}

const char* to_string(Direction d) noexcept {
    switch (d) {
    case Direction::In: return "in";
    case Direction::Out: return "out";
    case Direction::Total: return "total";
    }
    return "?";
}

MetricsSnapshot degree_centrality(const KnowledgeGraph& g,
                                  const std::optional<std::string>& rel,
                                  Direction direction, bool weighted) {
    require_known_rel(g, rel);

    MetricsSnapshot snap;
    snap.algorithm = Algorithm::Degree;
    snap.params = "rel=" + rel_token(rel) + " direction=" + to_string(direction) +
                  " weighted=" + bool_token(weighted);
    for (const Node& node : g.nodes()) snap.values[node.id] = 0.0;

    for (const Edge& e : g.edges()) {
        if (rel && e.rel != *rel) continue;
        const double w = weighted ? e.strength.value_or(1.0) : 1.0;
        if (direction != Direction::In) snap.values[e.source] += w;
        if (direction != Direction::Out) snap.values[e.target] += w;
    }
    return snap;
}

MetricsSnapshot pagerank(const KnowledgeGraph& g,
                         const std::optional<std::string>& rel,
                         const PageRankParams& params) {
    require_known_rel(g, rel);
    if (!(params.damping >= 0.0 && params.damping < 1.0))
        throw Error(ErrorKind::ConfigError,
                    "damping must lie in [0,1), got " + format_double(params.damping));
    if (!(params.tolerance > 0.0))
        throw Error(ErrorKind::ConfigError, "tolerance must be positive");
    if (params.max_iterations < 1)
        throw Error(ErrorKind::ConfigError, "max_iterations must be >= 1");

    MetricsSnapshot snap;
    snap.algorithm = Algorithm::PageRank;
    snap.params = "rel=" + rel_token(rel) +
                  " damping=" + format_double(params.damping) +
                  " tolerance=" + format_double(params.tolerance) +
                  " max_iterations=" + std::to_string(params.max_iterations) +
                  " weighted=" + bool_token(params.weighted) +
                  " normalized=" + bool_token(params.normalized);

    const std::size_t n = g.node_count();
    if (n == 0) return snap;

    std::unordered_map<NodeId, std::uint32_t> index;
    index.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) index.emplace(g.nodes()[i].id, i);

    std::vector<double> wout(n, 0.0);
    std::vector<std::vector<std::pair<std::uint32_t, double>>> in_arcs(n);
    for (const Edge& e : g.edges()) {
        if (rel && e.rel != *rel) continue;
        const double w = params.weighted ? e.strength.value_or(1.0) : 1.0;
        const std::uint32_t u = index.at(e.source);
        wout[u] += w;
        in_arcs[index.at(e.target)].emplace_back(u, w);
    }

    const double base = params.normalized
                            ? (1.0 - params.damping) / static_cast<double>(n)
                            : (1.0 - params.damping);
    std::vector<double> p(n, 1.0), next(n, 0.0);
    snap.converged = false;
    for (int it = 1; it <= params.max_iterations; ++it) {
        double l1 = 0.0;
        for (std::size_t v = 0; v < n; ++v) {
            double acc = 0.0;
            for (const auto& [u, w] : in_arcs[v]) acc += p[u] * w / wout[u];
            next[v] = base + params.damping * acc;
            l1 += std::abs(next[v] - p[v]);
        }
        std::swap(p, next);
        snap.iterations = it;
        if (l1 < params.tolerance) {
            snap.converged = true;
            break;
        }
    }

    for (std::uint32_t i = 0; i < n; ++i) snap.values[g.nodes()[i].id] = p[i];
    return snap;
}

MetricsDiff diff_metrics(const MetricsSnapshot& before, const MetricsSnapshot& after) {
    if (before.algorithm != after.algorithm)
        throw Error(ErrorKind::SnapshotMismatch,
                    std::string("cannot diff ") + to_string(before.algorithm) +
                        " against " + to_string(after.algorithm));

    MetricsDiff diff;
    diff.algorithm = before.algorithm;
    diff.params_before = before.params;
    diff.params_after = after.params;

    auto bi = before.values.begin();
    auto ai = after.values.begin();
    while (bi != before.values.end() || ai != after.values.end()) {
        if (ai == after.values.end() || (bi != before.values.end() && bi->first < ai->first))
            throw Error(ErrorKind::SnapshotMismatch,
                        "node " + bi->first + " is missing from the after snapshot");
        if (bi == before.values.end() || ai->first < bi->first)
            throw Error(ErrorKind::SnapshotMismatch,
                        "node " + ai->first + " is missing from the before snapshot");

        DiffEntry entry;
        entry.node = bi->first;
        entry.before = bi->second;
        entry.after = ai->second;
        entry.delta = entry.after - entry.before;
        if (entry.before > 0.0)
            entry.pct = 100.0 * entry.delta / entry.before;
        else if (entry.after > 0.0)
            entry.pct = std::nullopt;   // New: grew out of a zero baseline
        else
            entry.pct = 0.0;
        if (entry.after == entry.before) ++diff.unchanged_count;
        diff.entries.push_back(std::move(entry));
        ++bi;
        ++ai;
    }
    return diff;
}

std::vector<DiffEntry> top_changes(const MetricsDiff& diff, std::size_t k,
                                   ChangeDirection direction) {
    std::vector<DiffEntry> ranked = diff.entries;
    const auto rank = [](const DiffEntry& e) {
        return e.pct ? *e.pct : std::numeric_limits<double>::infinity();
    };
    std::sort(ranked.begin(), ranked.end(),
              [&](const DiffEntry& a, const DiffEntry& b) {
                  const double ra = rank(a), rb = rank(b);
                  if (ra != rb)
                      return direction == ChangeDirection::Increase ? ra > rb : ra < rb;
                  if (a.node != b.node) return a.node < b.node;
                  return a.delta > b.delta;
              });
    if (ranked.size() > k) ranked.resize(k);
    return ranked;
}

DiffSummary summarize(const MetricsDiff& diff, std::size_t k) {
    return {top_changes(diff, k, ChangeDirection::Increase),
            top_changes(diff, k, ChangeDirection::Decrease), diff.unchanged_count};
}

} // namespace kgc
