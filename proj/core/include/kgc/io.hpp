#ifndef KGC_IO_HPP
#define KGC_IO_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgc/completion.hpp"
#include "kgc/graph.hpp"
#include "kgc/metrics.hpp"

namespace kgc {

struct GraphBundle {
    std::filesystem::path nodes;
    std::filesystem::path edges;
    std::optional<std::filesystem::path> config;
};

struct ConfigFile {
    std::vector<RelationshipConfig> relationships;
    std::vector<RelationshipType> registry;   // declared types
    bool registry_closed = false;             // true when a "registry" section is present
};

// Config JSON schema (schema_version 1, unknown fields rejected):
//   { "schema_version": 1,
//     "registry": { "<rel>": {"transitive": bool}, ... },      // optional
//     "relationships": {
//       "<rel>": { "decay": {"kind": "exponential", "base": 0.5}
//                          | {"kind": "power_law", "exponent": 1.0}
//                          | {"kind": "table", "values": [..]},
//                  "aggregation": "max"|"avg"|"sum",
//                  "threshold": 0.0078125,
//                  "max_hops": 7,                               // optional, default 7
//                  "cycle_policy": "require_dag"|"bounded_walks" // optional
//       }, ... } }
ConfigFile parse_config(const std::filesystem::path& path);
ConfigFile parse_config_text(std::string_view text, const std::string& origin);

// Inverse of parse_config_text (round-trips).
std::string render_config_json(const ConfigFile& config);

// Parses one relationships-map entry (the object without the rel key).
RelationshipConfig parse_relationship_config_json(const std::string& rel,
                                                  std::string_view json_text);

struct LoadResult {
    KnowledgeGraph graph;
    std::vector<RelationshipConfig> configs;
    BuildStats stats;
};

// Loads node/edge CSVs (plus optional config JSON) and builds the graph.
// With a closed registry (config has a "registry" section) an edge type
// outside it is a SchemaError naming the offending line; otherwise the
// registry is inferred from edge types (transitive=false) and extended by
// configured relationships (transitive=true).
// Throws: ParseError, SchemaError, ConfigError, IoError, plus build_graph errors.
LoadResult load_bundle(const GraphBundle& bundle);

// Node CSV: id,label,props (props = flat JSON object or empty).
// Edge CSV: source,target,type,strength,provenance. RFC-4180, UTF-8, header
// row. Strengths carry shortest round-trip decimal form (<= 17 significant
// digits). Row order follows graph storage order, so write/load/write is
// byte-stable.
std::string render_nodes_csv(const KnowledgeGraph& g);
std::string render_edges_csv(const KnowledgeGraph& g);
void write_nodes(const KnowledgeGraph& g, const std::filesystem::path& path);
void write_edges(const KnowledgeGraph& g, const std::filesystem::path& path);

// Cypher script: one statement per line, nodes sorted by id then edges by
// (source,target,type). CREATE (:Label {id: "..."}) for nodes; MATCH-CREATE
// for relationships with strength/provenance properties.
std::string render_cypher(const KnowledgeGraph& g);
void export_cypher(const KnowledgeGraph& g, const std::filesystem::path& path);

// Snapshot JSON for the metrics/diff subcommands.
std::string render_snapshot_json(const MetricsSnapshot& snapshot);
MetricsSnapshot parse_snapshot_json(std::string_view text, const std::string& origin);
void write_snapshot(const MetricsSnapshot& snapshot, const std::filesystem::path& path);
MetricsSnapshot load_snapshot(const std::filesystem::path& path);

struct InputDigest {
    std::string name;     // bundle role: nodes / edges / config
    std::string path;     // as given on the command line
    std::string sha256;
};

struct MetricsSection {
    std::string name;     // e.g. "degree" / "pagerank"
    MetricsDiff diff;
    std::size_t top_k = 5;
};

// Self-describing run carrier: embeds the config that produced it and the
// input digests needed to re-run the experiment. Timings deliberately live
// outside (sidecar / stdout) so report serialization is byte-deterministic.
struct RunReport {
    std::string tool_version;
    std::vector<InputDigest> inputs;
    std::vector<RelationshipConfig> configs;
    std::vector<CompletionReport> completions;
    std::vector<MetricsSection> metrics;
};

enum class ReportFormat { Json, CsvTables };

std::string render_report_json(const RunReport& report);
std::string render_diff_csv(const MetricsDiff& diff);

// Json: path is the report file. CsvTables: path is a directory receiving
// one diff_<name>.csv per metrics section.
void write_report(const RunReport& report, const std::filesystem::path& path,
                  ReportFormat format);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Shortest round-trip decimal form of a double (integral values keep a
// trailing ".0" so the column stays typed).
std::string format_double(double value);

} // namespace kgc

#endif
