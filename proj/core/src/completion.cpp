#include "kgc/completion.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <numeric>
#include <utility>

#include "kgc/error.hpp"

namespace kgc {

namespace {

constexpr std::uint64_t kMaxCount = std::numeric_limits<std::uint64_t>::max();

std::string join_arrows(const std::vector<NodeId>& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i != 0) out += " -> ";
        out += seq[i];
    }
    return out;
}

// Kahn order; caller guarantees acyclicity.
std::vector<std::uint32_t> topo_positions(const TypedAdjacency& adj) {
    const std::size_t n = adj.ids.size();
    std::vector<std::uint32_t> indeg(n, 0);
    for (const auto& arcs : adj.out)
        for (std::uint32_t v : arcs) ++indeg[v];
    std::vector<std::uint32_t> order;
    order.reserve(n);
    for (std::uint32_t u = 0; u < n; ++u)
        if (indeg[u] == 0) order.push_back(u);
    for (std::size_t head = 0; head < order.size(); ++head) {
        std::uint32_t u = order[head];
        for (std::uint32_t v : adj.out[u])
            if (--indeg[v] == 0) order.push_back(v);
    }
    std::vector<std::uint32_t> pos(n, 0);
    for (std::uint32_t k = 0; k < order.size(); ++k) pos[order[k]] = k;
    return pos;
}

} // namespace

void RelationshipConfig::validate() const {
    if (rel.empty())
        throw Error(ErrorKind::ConfigError, "relationship name is empty");
    if (threshold < 0.0)
        throw Error(ErrorKind::ConfigError,
                    "threshold must be >= 0, got " + std::to_string(threshold));
    if (max_hops < 1)
        throw Error(ErrorKind::ConfigError,
                    "max_hops must be >= 1, got " + std::to_string(max_hops));
    if (decay.kind() == DecayKind::Table &&
        decay.values().size() < static_cast<std::size_t>(max_hops))
        throw Error(ErrorKind::ConfigError,
                    "decay table covers " + std::to_string(decay.values().size()) +
                        " hops but max_hops is " + std::to_string(max_hops));
}

PairStrengths::View PairStrengths::pair(std::size_t i) const {
    const auto& key = keys_.at(i);
    const std::size_t h = static_cast<std::size_t>(max_hops_);
    return View{ids_[key.first], ids_[key.second],
                std::span<const std::uint64_t>(counts_.data() + i * h, h),
                strengths_.empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : strengths_[i]};
}

std::span<const std::uint64_t> PairStrengths::find(const NodeId& source,
                                                   const NodeId& target) const {
    auto si = id_index_.find(source);
    auto ti = id_index_.find(target);
    if (si == id_index_.end() || ti == id_index_.end()) return {};
    const std::pair<std::uint32_t, std::uint32_t> key{si->second, ti->second};
    auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
    if (it == keys_.end() || *it != key) return {};
    const std::size_t i = static_cast<std::size_t>(it - keys_.begin());
    const std::size_t h = static_cast<std::size_t>(max_hops_);
    return {counts_.data() + i * h, h};
}

std::uint64_t PairStrengths::count(const NodeId& source, const NodeId& target,
                                   int hops) const {
    if (hops < 1 || hops > max_hops_)
        throw Error(ErrorKind::HopOutOfRange,
                    "hop count " + std::to_string(hops) + " outside [1, " +
                        std::to_string(max_hops_) + "]");
    auto row = find(source, target);
    return row.empty() ? 0 : row[static_cast<std::size_t>(hops - 1)];
}

void PairStrengths::aggregate_all(const DecayFunction& decay, Aggregation agg) {
    strengths_.resize(keys_.size());
    const std::size_t h = static_cast<std::size_t>(max_hops_);
    for (std::size_t i = 0; i < keys_.size(); ++i)
        strengths_[i] = aggregate_strength({counts_.data() + i * h, h}, decay, agg);
}

PairStrengths count_paths_by_length(const TypedAdjacency& adj, int max_hops,
                                    CyclePolicy policy) {
    if (max_hops < 1)
        throw Error(ErrorKind::ConfigError,
                    "max_hops must be >= 1, got " + std::to_string(max_hops));
    if (policy == CyclePolicy::RequireDag) {
        CycleReport cyc = detect_cycles(adj);
        if (!cyc.acyclic)
            throw Error(ErrorKind::CyclicGraph,
                        "cycle in " + adj.rel + " subgraph: " + join_arrows(cyc.witness));
    }

    PairStrengths ps;
    ps.max_hops_ = max_hops;
    ps.ids_ = adj.ids;
    ps.id_index_ = adj.index_of;

    const std::size_t n = adj.ids.size();
    const std::size_t h_cap = static_cast<std::size_t>(max_hops);

    std::vector<std::uint32_t> topo_pos;
    if (policy == CyclePolicy::RequireDag) topo_pos = topo_positions(adj);

    // Dense scratch, reused across sources; touched-lists keep resets sparse.
    std::vector<std::uint64_t> cur_count(n, 0), next_count(n, 0);
    std::vector<std::uint32_t> cur_touched, next_touched;
    std::vector<std::int64_t> pair_row(n, -1);
    std::vector<std::uint32_t> row_targets;
    std::vector<std::uint64_t> row_pool;
    std::vector<std::uint32_t> reach, frontier, frontier_next;
    std::vector<std::uint64_t> seen_epoch(n, 0), len_epoch(n, 0), trunc_epoch(n, 0);
    std::vector<std::uint64_t> len_val(n, 0);
    std::uint64_t epoch = 0;

    for (std::uint32_t s = 0; s < n; ++s) {
        if (adj.out[s].empty()) continue;

        cur_touched.assign(1, s);
        cur_count[s] = 1;
        bool exhausted = false;   // no walks longer than the last layer
        for (int h = 1; h <= max_hops; ++h) {
            for (std::uint32_t u : cur_touched) {
                const std::uint64_t c = cur_count[u];
                for (std::uint32_t v : adj.out[u]) {
                    if (next_count[v] == 0) next_touched.push_back(v);
                    if (next_count[v] > kMaxCount - c)
                        throw Error(ErrorKind::PathCountOverflow,
                                    "walk count for (" + adj.ids[s] + ", " + adj.ids[v] +
                                        ") exceeds 64 bits at " + std::to_string(h) +
                                        " hops");
                    next_count[v] += c;
                }
            }
            for (std::uint32_t v : next_touched) {
                if (v == s) continue;   // ordered pairs only, x != z
                std::int64_t row = pair_row[v];
                if (row < 0) {
                    row = static_cast<std::int64_t>(row_targets.size());
                    pair_row[v] = row;
                    row_targets.push_back(v);
                    row_pool.resize(row_pool.size() + h_cap, 0);
                }
                row_pool[static_cast<std::size_t>(row) * h_cap +
                         static_cast<std::size_t>(h - 1)] = next_count[v];
            }
            for (std::uint32_t u : cur_touched) cur_count[u] = 0;
            cur_touched.clear();
            std::swap(cur_count, next_count);
            std::swap(cur_touched, next_touched);
            if (cur_touched.empty()) {
                exhausted = true;
                break;
            }
        }

        // Flush this source's rows in target order; keys_ ends up sorted.
        std::vector<std::uint32_t> order(row_targets.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
            return row_targets[a] < row_targets[b];
        });
        for (std::uint32_t r : order) {
            ps.keys_.emplace_back(s, row_targets[r]);
            auto begin = row_pool.begin() + static_cast<std::ptrdiff_t>(r * h_cap);
            ps.counts_.insert(ps.counts_.end(), begin,
                              begin + static_cast<std::ptrdiff_t>(h_cap));
        }
        for (std::uint32_t v : row_targets) pair_row[v] = -1;
        row_targets.clear();
        row_pool.clear();

        if (!exhausted) {
            // Walks of length max_hops exist; decide which targets also have
            // longer ones.
            if (policy == CyclePolicy::RequireDag) {
                // Longest path from s over the reachable sub-DAG.
                ++epoch;
                reach.assign(1, s);
                seen_epoch[s] = epoch;
                for (std::size_t head = 0; head < reach.size(); ++head)
                    for (std::uint32_t v : adj.out[reach[head]])
                        if (seen_epoch[v] != epoch) {
                            seen_epoch[v] = epoch;
                            reach.push_back(v);
                        }
                std::sort(reach.begin(), reach.end(),
                          [&](std::uint32_t a, std::uint32_t b) {
                              return topo_pos[a] < topo_pos[b];
                          });
                len_epoch[s] = epoch;
                len_val[s] = 0;
                for (std::uint32_t u : reach) {
                    const std::uint64_t lu = len_val[u];
                    for (std::uint32_t v : adj.out[u]) {
                        if (len_epoch[v] != epoch || len_val[v] < lu + 1) {
                            len_epoch[v] = epoch;
                            len_val[v] = lu + 1;
                        }
                    }
                }
                for (std::uint32_t v : reach)
                    if (v != s && len_val[v] > static_cast<std::uint64_t>(max_hops))
                        ++ps.truncated_pairs_;
            } else {
                // Boolean layers max_hops+1 .. max_hops+n. Any walk longer
                // than max_hops shortens, by cutting cycles, to one of length
                // at most max_hops+n, so these layers witness every
                // truncated target.
                const std::uint64_t source_mark = ++epoch;
                frontier = cur_touched;
                for (std::size_t extra = 0; extra < n && !frontier.empty(); ++extra) {
                    const std::uint64_t layer_mark = ++epoch;
                    frontier_next.clear();
                    for (std::uint32_t u : frontier)
                        for (std::uint32_t v : adj.out[u])
                            if (seen_epoch[v] != layer_mark) {
                                seen_epoch[v] = layer_mark;
                                frontier_next.push_back(v);
                            }
                    for (std::uint32_t v : frontier_next)
                        if (v != s && trunc_epoch[v] != source_mark) {
                            trunc_epoch[v] = source_mark;
                            ++ps.truncated_pairs_;
                        }
                    std::swap(frontier, frontier_next);
                }
            }
        }

        for (std::uint32_t u : cur_touched) cur_count[u] = 0;
        cur_touched.clear();
    }
    return ps;
}

double aggregate_strength(std::span<const std::uint64_t> counts_by_length,
                          const DecayFunction& decay, Aggregation agg) {
    int h_min = 0;
    for (std::size_t i = 0; i < counts_by_length.size(); ++i)
        if (counts_by_length[i] != 0) {
            h_min = static_cast<int>(i) + 1;
            break;
        }
    if (h_min == 0)
        throw Error(ErrorKind::EmptyPathSet, "no paths to aggregate");

    if (agg == Aggregation::Max) return decay.value(h_min);

    double sum = 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < counts_by_length.size(); ++i) {
        const std::uint64_t c = counts_by_length[i];
        if (c == 0) continue;
        sum += static_cast<double>(c) * decay.value(static_cast<int>(i) + 1);
        if (total > kMaxCount - c)
            throw Error(ErrorKind::PathCountOverflow, "path total exceeds 64 bits");
        total += c;
    }
    if (agg == Aggregation::Sum) return sum;
    return sum / static_cast<double>(total);
}

namespace {

int shortest_hops_of(std::span<const std::uint64_t> counts) {
    for (std::size_t i = 0; i < counts.size(); ++i)
        if (counts[i] != 0) return static_cast<int>(i) + 1;
    return 0;
}

void sort_records(std::vector<CompletionRecord>& records) {
    std::sort(records.begin(), records.end(),
              [](const CompletionRecord& a, const CompletionRecord& b) {
                  if (a.source != b.source) return a.source < b.source;
                  return a.target < b.target;
              });
}

std::vector<RelationshipType> registry_of(const KnowledgeGraph& g) {
    std::vector<RelationshipType> out;
    out.reserve(g.registry().size());
    for (const auto& [name, rt] : g.registry()) out.push_back(rt);
    return out;
}

const RelationshipType& transitive_or_throw(const KnowledgeGraph& g,
                                            const std::string& rel) {
    const RelationshipType* rt = g.find_relationship(rel);
    if (rt == nullptr)
        throw Error(ErrorKind::UnknownRelationship, rel + " is not registered");
    if (!rt->transitive)
        throw Error(ErrorKind::NonTransitiveRelationship,
                    rel + " is not marked transitive");
    return *rt;
}

} // namespace

CompletionResult complete(const KnowledgeGraph& g, const RelationshipConfig& cfg) {
    cfg.validate();
    transitive_or_throw(g, cfg.rel);

    const auto t0 = std::chrono::steady_clock::now();
    TypedAdjacency adj = typed_adjacency(g, cfg.rel);
    PairStrengths ps = count_paths_by_length(adj, cfg.max_hops, cfg.cycle_policy);
    ps.aggregate_all(cfg.decay, cfg.aggregation);

    CompletionReport report;
    report.rel = cfg.rel;
    report.truncated_pairs_count = ps.truncated_pair_count();

    for (std::size_t i = 0; i < ps.pair_count(); ++i) {
        const auto view = ps.pair(i);
        if (view.strength < cfg.threshold) continue;
        report.records.push_back({view.source, view.target, view.strength,
                                  shortest_hops_of(view.counts), false});
    }
    sort_records(report.records);

    std::vector<Edge> edges = g.edges();
    for (auto& rec : report.records) {
        const Edge* existing = g.find_edge(rec.source, rec.target, cfg.rel);
        if (existing != nullptr) {
            const std::size_t idx =
                static_cast<std::size_t>(existing - g.edges().data());
            edges[idx].strength = rec.strength;
            if (existing->provenance == Provenance::Direct) {
                rec.annotated_direct = true;
                ++report.annotated_direct_count;
            }
        } else {
            edges.push_back({rec.source, rec.target, cfg.rel, rec.strength,
                             Provenance::Inferred});
            ++report.inferred_edge_count;
        }
    }

    KnowledgeGraph out = build_graph(g.nodes(), std::move(edges), registry_of(g));
    report.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - t0);
    return {std::move(out), std::move(report)};
}

std::vector<std::vector<NodeId>> enumerate_simple_paths(const TypedAdjacency& adj,
                                                        const NodeId& x,
                                                        const NodeId& z,
                                                        int max_hops) {
    std::vector<std::vector<NodeId>> out;
    if (max_hops < 1 || x == z) return out;
    auto xi = adj.index_of.find(x);
    auto zi = adj.index_of.find(z);
    if (xi == adj.index_of.end() || zi == adj.index_of.end()) return out;
    const std::uint32_t target = zi->second;

    struct Frame {
        std::uint32_t node;
        std::size_t next_arc;
    };
    std::vector<Frame> stack{{xi->second, 0}};
    std::vector<std::uint32_t> path{xi->second};
    std::vector<char> on_path(adj.ids.size(), 0);
    on_path[xi->second] = 1;

    while (!stack.empty()) {
        Frame& f = stack.back();
        const auto& arcs = adj.out[f.node];
        if (f.next_arc == arcs.size()) {
            on_path[f.node] = 0;
            path.pop_back();
            stack.pop_back();
            continue;
        }
        const std::uint32_t v = arcs[f.next_arc++];
        if (v == target) {
            // A simple path ending at z visits z exactly once, so never
            // expand past it.
            std::vector<NodeId> seq;
            seq.reserve(path.size() + 1);
            for (std::uint32_t u : path) seq.push_back(adj.ids[u]);
            seq.push_back(adj.ids[v]);
            out.push_back(std::move(seq));
        } else if (static_cast<int>(path.size()) < max_hops && !on_path[v]) {
            stack.push_back({v, 0});
            path.push_back(v);
            on_path[v] = 1;
        }
    }
    return out;
}

CompletionResult complete_bruteforce(const KnowledgeGraph& g,
                                     const RelationshipConfig& cfg) {
    cfg.validate();
    transitive_or_throw(g, cfg.rel);

    const auto t0 = std::chrono::steady_clock::now();
    TypedAdjacency adj = typed_adjacency(g, cfg.rel);
    CycleReport cyc = detect_cycles(adj);
    if (!cyc.acyclic)
        throw Error(ErrorKind::CyclicGraph,
                    "path enumeration requires an acyclic " + adj.rel +
                        " subgraph: " + join_arrows(cyc.witness));

    const std::size_t n = adj.ids.size();
    const std::size_t h_cap = static_cast<std::size_t>(cfg.max_hops);
    // Scan far enough to see every simple path, not just those within the
    // hop bound; longer ones mark the pair truncated.
    const int scan_hops =
        std::max(cfg.max_hops, n > 0 ? static_cast<int>(n) - 1 : 0);

    CompletionReport report;
    report.rel = cfg.rel;

    std::vector<std::uint64_t> counts(h_cap);
    for (std::uint32_t xi = 0; xi < n; ++xi) {
        for (std::uint32_t zi = 0; zi < n; ++zi) {
            if (xi == zi) continue;
            const auto paths =
                enumerate_simple_paths(adj, adj.ids[xi], adj.ids[zi], scan_hops);
            if (paths.empty()) continue;
            std::fill(counts.begin(), counts.end(), 0);
            bool truncated = false;
            for (const auto& p : paths) {
                const std::size_t length = p.size() - 1;
                if (length > h_cap)
                    truncated = true;
                else
                    ++counts[length - 1];
            }
            if (truncated) ++report.truncated_pairs_count;
            if (std::all_of(counts.begin(), counts.end(),
                            [](std::uint64_t c) { return c == 0; }))
                continue;
            const double strength = aggregate_strength(counts, cfg.decay,
                                                       cfg.aggregation);
            if (strength < cfg.threshold) continue;
            report.records.push_back({adj.ids[xi], adj.ids[zi], strength,
                                      shortest_hops_of(counts), false});
        }
    }
    sort_records(report.records);

    std::vector<Edge> edges = g.edges();
    const std::size_t original_edge_count = g.edges().size();
    for (auto& rec : report.records) {
        std::size_t idx = original_edge_count;
        for (std::size_t k = 0; k < original_edge_count; ++k) {
            const Edge& e = g.edges()[k];
            if (e.rel == cfg.rel && e.source == rec.source && e.target == rec.target) {
                idx = k;
                break;
            }
        }
        if (idx != original_edge_count) {
            edges[idx].strength = rec.strength;
            if (edges[idx].provenance == Provenance::Direct) {
                rec.annotated_direct = true;
                ++report.annotated_direct_count;
            }
        } else {
            edges.push_back({rec.source, rec.target, cfg.rel, rec.strength,
                             Provenance::Inferred});
            ++report.inferred_edge_count;
        }
    }

    KnowledgeGraph out = build_graph(g.nodes(), std::move(edges), registry_of(g));
    report.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::steady_clock::now() - t0);
    return {std::move(out), std::move(report)};
}

} // namespace kgc
