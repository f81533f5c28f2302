#include "kgc/io.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <system_error>

#include <json.hpp>
#include <openssl/evp.h>

#include "csv.hpp"
#include "kgc/error.hpp"

namespace kgc {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::string content{std::istreambuf_iterator<char>(in),
                        std::istreambuf_iterator<char>()};
    if (in.bad())
        throw Error(ErrorKind::IoError, "failed reading " + path.string());
    return content;
}

// Stage-then-rename so readers never observe a half-written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(ErrorKind::IoError, "cannot open " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw Error(ErrorKind::IoError, "failed writing " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::error_code ignored;
        std::filesystem::remove(tmp, ignored);
        throw Error(ErrorKind::IoError,
                    "cannot move " + tmp.string() + " into place: " + ec.message());
    }
}

[[noreturn]] void schema_fail(const std::string& origin, std::size_t line,
                              const std::string& what) {
    throw Error(ErrorKind::SchemaError,
                origin + ":" + std::to_string(line) + ": " + what);
}

// ---- node properties <-> flat JSON object

json scalar_to_json(const Scalar& value) {
    return std::visit([](const auto& v) { return json(v); }, value);
}

PropertyMap parse_props(const std::string& field, const std::string& origin,
                        std::size_t line) {
    PropertyMap props;
    if (field.empty()) return props;
    json obj;
    try {
        obj = json::parse(field);
    } catch (const json::parse_error& e) {
        schema_fail(origin, line, std::string("bad props JSON: ") + e.what());
    }
    if (!obj.is_object())
        schema_fail(origin, line, "props must be a JSON object");
    for (const auto& [key, value] : obj.items()) {
        if (value.is_boolean())
            props.emplace(key, value.get<bool>());
        else if (value.is_number_integer())
            props.emplace(key, value.get<std::int64_t>());
        else if (value.is_number_float())
            props.emplace(key, value.get<double>());
        else if (value.is_string())
            props.emplace(key, value.get<std::string>());
        else
            schema_fail(origin, line,
                        "props value for \"" + key + "\" must be a scalar");
    }
    return props;
}

std::string render_props(const PropertyMap& props) {
    if (props.empty()) return "";
    json obj = json::object();
    for (const auto& [key, value] : props) obj[key] = scalar_to_json(value);
    return obj.dump();
}

// ---- CSV column resolution: exact column set, any order

std::vector<std::size_t> resolve_columns(const csv::Table& table,
                                         std::initializer_list<const char*> names,
                                         const std::string& origin) {
    std::vector<std::size_t> out;
    for (const char* name : names) {
        std::size_t found = table.header.size();
        for (std::size_t i = 0; i < table.header.size(); ++i) {
            if (table.header[i] != name) continue;
            if (found != table.header.size())
                schema_fail(origin, 1, std::string("duplicate column \"") + name + "\"");
            found = i;
        }
        if (found == table.header.size())
            schema_fail(origin, 1, std::string("missing column \"") + name + "\"");
        out.push_back(found);
    }
    if (table.header.size() != names.size())
        for (const std::string& col : table.header)
            if (std::none_of(names.begin(), names.end(),
                             [&](const char* n) { return col == n; }))
                schema_fail(origin, 1, "unexpected column \"" + col + "\"");
    return out;
}

const char* provenance_token(Provenance p) {
    return p == Provenance::Direct ? "direct" : "inferred";
}

Provenance parse_provenance(const std::string& field, const std::string& origin,
                            std::size_t line) {
    if (field == "direct") return Provenance::Direct;
    if (field == "inferred") return Provenance::Inferred;
    schema_fail(origin, line, "provenance must be direct or inferred, got \"" +
                                  field + "\"");
}

std::optional<double> parse_strength(const std::string& field,
                                     const std::string& origin, std::size_t line) {
    if (field.empty()) return std::nullopt;
    double value = 0.0;
    const char* first = field.data();
    const char* last = first + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last || !std::isfinite(value))
        schema_fail(origin, line, "strength \"" + field + "\" is not a finite number");
    return value;
}

// ---- config JSON

[[noreturn]] void config_fail(const std::string& origin, const std::string& what) {
    throw Error(ErrorKind::ConfigError, origin + ": " + what);
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& origin, const std::string& where) {
    for (const auto& [key, value] : obj.items())
        if (std::none_of(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }))
            config_fail(origin, "unknown key \"" + key + "\" in " + where);
}

double number_or_fail(const json& value, const std::string& origin,
                      const std::string& where) {
    if (!value.is_number())
        config_fail(origin, where + " must be a number");
    return value.get<double>();
}

DecayFunction parse_decay(const json& obj, const std::string& origin,
                          const std::string& rel) {
    const std::string where = "decay of " + rel;
    if (!obj.is_object() || !obj.contains("kind") || !obj["kind"].is_string())
        config_fail(origin, where + " needs a \"kind\" string");
    const std::string kind = obj["kind"].get<std::string>();
    if (kind == "exponential") {
        reject_unknown_keys(obj, {"kind", "base"}, origin, where);
        if (!obj.contains("base"))
            config_fail(origin, where + " needs \"base\"");
        return DecayFunction::exponential(number_or_fail(obj["base"], origin, where));
    }
    if (kind == "power_law") {
        reject_unknown_keys(obj, {"kind", "exponent"}, origin, where);
        if (!obj.contains("exponent"))
            config_fail(origin, where + " needs \"exponent\"");
        return DecayFunction::power_law(
            number_or_fail(obj["exponent"], origin, where));
    }
    if (kind == "table") {
        reject_unknown_keys(obj, {"kind", "values"}, origin, where);
        if (!obj.contains("values") || !obj["values"].is_array())
            config_fail(origin, where + " needs a \"values\" array");
        std::vector<double> values;
        for (const auto& v : obj["values"])
            values.push_back(number_or_fail(v, origin, where + " entry"));
        return DecayFunction::table(std::move(values));
    }
    config_fail(origin, where + " has unknown kind \"" + kind + "\"");
}

Aggregation parse_aggregation(const json& value, const std::string& origin,
                              const std::string& rel) {
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s == "max") return Aggregation::Max;
        if (s == "avg") return Aggregation::Avg;
        if (s == "sum") return Aggregation::Sum;
    }
    config_fail(origin, "aggregation of " + rel + " must be max, avg, or sum");
}

CyclePolicy parse_cycle_policy(const json& value, const std::string& origin,
                               const std::string& rel) {
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        if (s == "require_dag") return CyclePolicy::RequireDag;
        if (s == "bounded_walks") return CyclePolicy::BoundedWalks;
    }
    config_fail(origin,
                "cycle_policy of " + rel + " must be require_dag or bounded_walks");
}

RelationshipConfig parse_rel_entry(const std::string& rel, const json& obj,
                                   const std::string& origin) {
    if (!obj.is_object())
        config_fail(origin, "relationship " + rel + " must map to an object");
    reject_unknown_keys(
        obj, {"decay", "aggregation", "threshold", "max_hops", "cycle_policy"},
        origin, "relationship " + rel);
    RelationshipConfig cfg;
    cfg.rel = rel;
    if (obj.contains("decay")) cfg.decay = parse_decay(obj["decay"], origin, rel);
    if (obj.contains("aggregation"))
        cfg.aggregation = parse_aggregation(obj["aggregation"], origin, rel);
    if (obj.contains("threshold"))
        cfg.threshold = number_or_fail(obj["threshold"], origin, "threshold of " + rel);
    if (obj.contains("max_hops")) {
        if (!obj["max_hops"].is_number_integer())
            config_fail(origin, "max_hops of " + rel + " must be an integer");
        cfg.max_hops = obj["max_hops"].get<int>();
    }
    if (obj.contains("cycle_policy"))
        cfg.cycle_policy = parse_cycle_policy(obj["cycle_policy"], origin, rel);
    cfg.validate();
    return cfg;
}

const char* aggregation_token(Aggregation a) {
    switch (a) {
    case Aggregation::Max: return "max";
    case Aggregation::Avg: return "avg";
    case Aggregation::Sum: return "sum";
    }
    return "?";
}

const char* cycle_policy_token(CyclePolicy p) {
    return p == CyclePolicy::RequireDag ? "require_dag" : "bounded_walks";
}

ordered_json decay_to_json(const DecayFunction& decay) {
    ordered_json j;
    switch (decay.kind()) {
    case DecayKind::Exponential:
        j["kind"] = "exponential";
        j["base"] = decay.base();
        break;
    case DecayKind::PowerLaw:
        j["kind"] = "power_law";
        j["exponent"] = decay.exponent();
        break;
    case DecayKind::Table:
        j["kind"] = "table";
        j["values"] = decay.values();
        break;
    }
    return j;
}

ordered_json config_to_json(const RelationshipConfig& cfg) {
    ordered_json j;
    j["relationship"] = cfg.rel;
    j["decay"] = decay_to_json(cfg.decay);
    j["aggregation"] = aggregation_token(cfg.aggregation);
    j["threshold"] = cfg.threshold;
    j["max_hops"] = cfg.max_hops;
    j["cycle_policy"] = cycle_policy_token(cfg.cycle_policy);
    return j;
}

ordered_json diff_entry_to_json(const DiffEntry& entry) {
    ordered_json j;
    j["node"] = entry.node;
    j["before"] = entry.before;
    j["after"] = entry.after;
    j["delta"] = entry.delta;
    if (entry.pct)
        j["pct"] = *entry.pct;
    else
        j["pct"] = "new";
    return j;
}

} // namespace

ConfigFile parse_config_text(std::string_view text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, origin + ": " + e.what());
    }
    if (!root.is_object())
        config_fail(origin, "top level must be an object");
    reject_unknown_keys(root, {"schema_version", "registry", "relationships"},
                        origin, "config");
    if (!root.contains("schema_version") ||
        !root["schema_version"].is_number_integer() ||
        root["schema_version"].get<int>() != 1)
        config_fail(origin, "schema_version must be 1");

    ConfigFile out;
    if (root.contains("registry")) {
        out.registry_closed = true;
        const json& reg = root["registry"];
        if (!reg.is_object())
            config_fail(origin, "registry must be an object");
        for (const auto& [name, entry] : reg.items()) {
            if (name.empty())
                config_fail(origin, "registry entry with empty name");
            if (!entry.is_object())
                config_fail(origin, "registry entry " + name + " must be an object");
            reject_unknown_keys(entry, {"transitive"}, origin, "registry entry " + name);
            if (!entry.contains("transitive") || !entry["transitive"].is_boolean())
                config_fail(origin,
                            "registry entry " + name + " needs a \"transitive\" bool");
            out.registry.push_back({name, entry["transitive"].get<bool>()});
        }
    }
    if (root.contains("relationships")) {
        const json& rels = root["relationships"];
        if (!rels.is_object())
            config_fail(origin, "relationships must be an object");
        for (const auto& [name, entry] : rels.items()) {
            if (name.empty())
                config_fail(origin, "relationship entry with empty name");
            out.relationships.push_back(parse_rel_entry(name, entry, origin));
        }
    }

    if (out.registry_closed) {
        for (const RelationshipConfig& cfg : out.relationships) {
            auto it = std::find_if(out.registry.begin(), out.registry.end(),
                                   [&](const RelationshipType& rt) {
                                       return rt.name == cfg.rel;
                                   });
            if (it == out.registry.end())
                config_fail(origin, "configured relationship " + cfg.rel +
                                        " is not in the registry");
            if (!it->transitive)
                config_fail(origin, "configured relationship " + cfg.rel +
                                        " is declared non-transitive");
        }
    }
    return out;
}

ConfigFile parse_config(const std::filesystem::path& path) {
    return parse_config_text(read_file(path), path.string());
}

std::string render_config_json(const ConfigFile& config) {
    ordered_json j;
    j["schema_version"] = 1;
    if (config.registry_closed) {
        ordered_json reg = ordered_json::object();
        for (const RelationshipType& rt : config.registry)
            reg[rt.name] = ordered_json{{"transitive", rt.transitive}};
        j["registry"] = std::move(reg);
    }
    ordered_json rels = ordered_json::object();
    for (const RelationshipConfig& cfg : config.relationships) {
        ordered_json entry = config_to_json(cfg);
        entry.erase("relationship");
        rels[cfg.rel] = std::move(entry);
    }
    j["relationships"] = std::move(rels);
    return j.dump(2) + "\n";
}

RelationshipConfig parse_relationship_config_json(const std::string& rel,
                                                  std::string_view json_text) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, std::string("inline config: ") + e.what());
    }
    return parse_rel_entry(rel, obj, "inline config");
}

LoadResult load_bundle(const GraphBundle& bundle) {
    ConfigFile config;
    if (bundle.config) config = parse_config(*bundle.config);

    const std::string nodes_origin = bundle.nodes.string();
    const std::string edges_origin = bundle.edges.string();
    csv::Table nodes_table = csv::parse(read_file(bundle.nodes), nodes_origin);
    csv::Table edges_table = csv::parse(read_file(bundle.edges), edges_origin);

    const auto ncols = resolve_columns(nodes_table, {"id", "label", "props"},
                                       nodes_origin);
    const auto ecols = resolve_columns(
        edges_table, {"source", "target", "type", "strength", "provenance"},
        edges_origin);

    std::vector<Node> nodes;
    nodes.reserve(nodes_table.rows.size());
    for (std::size_t r = 0; r < nodes_table.rows.size(); ++r) {
        const auto& row = nodes_table.rows[r];
        const std::size_t line = nodes_table.row_lines[r];
        nodes.push_back({row[ncols[0]], row[ncols[1]],
                         parse_props(row[ncols[2]], nodes_origin, line)});
    }

    std::map<std::string, RelationshipType> registry;
    if (config.registry_closed)
        for (const RelationshipType& rt : config.registry) registry[rt.name] = rt;
    else
        for (const RelationshipConfig& cfg : config.relationships)
            registry[cfg.rel] = {cfg.rel, true};

    std::vector<Edge> edges;
    edges.reserve(edges_table.rows.size());
    for (std::size_t r = 0; r < edges_table.rows.size(); ++r) {
        const auto& row = edges_table.rows[r];
        const std::size_t line = edges_table.row_lines[r];
        const std::string& type = row[ecols[2]];
        if (config.registry_closed) {
            if (registry.count(type) == 0)
                schema_fail(edges_origin, line,
                            "unknown relationship type \"" + type + "\"");
        } else if (registry.count(type) == 0) {
            registry[type] = {type, false};
        }
        edges.push_back({row[ecols[0]], row[ecols[1]], type,
                         parse_strength(row[ecols[3]], edges_origin, line),
                         parse_provenance(row[ecols[4]], edges_origin, line)});
    }

    std::vector<RelationshipType> registry_list;
    registry_list.reserve(registry.size());
    for (const auto& [name, rt] : registry) registry_list.push_back(rt);

    LoadResult result;
    result.configs = config.relationships;
    result.graph = build_graph(std::move(nodes), std::move(edges),
                               std::move(registry_list), &result.stats);
    return result;
}

std::string render_nodes_csv(const KnowledgeGraph& g) {
    std::string out = "id,label,props\n";
    for (const Node& node : g.nodes()) {
        out += csv::escape_field(node.id);
        out += ',';
        out += csv::escape_field(node.label);
        out += ',';
        out += csv::escape_field(render_props(node.properties));
        out += '\n';
    }
    return out;
}

std::string render_edges_csv(const KnowledgeGraph& g) {
    std::string out = "source,target,type,strength,provenance\n";
    for (const Edge& e : g.edges()) {
        out += csv::escape_field(e.source);
        out += ',';
        out += csv::escape_field(e.target);
        out += ',';
        out += csv::escape_field(e.rel);
        out += ',';
        if (e.strength) out += format_double(*e.strength);
        out += ',';
        out += provenance_token(e.provenance);
        out += '\n';
    }
    return out;
}

void write_nodes(const KnowledgeGraph& g, const std::filesystem::path& path) {
    write_file_atomic(path, render_nodes_csv(g));
}

void write_edges(const KnowledgeGraph& g, const std::filesystem::path& path) {
    write_file_atomic(path, render_edges_csv(g));
}

namespace {

bool is_cypher_ident(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (const char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

std::string cypher_name(std::string_view s) {
    if (is_cypher_ident(s)) return std::string(s);
    std::string out = "`";
    for (const char c : s) {
        if (c == '`') out += '`';
        out += c;
    }
    out += '`';
    return out;
}

std::string cypher_string(std::string_view s) {
    std::string out = "\"";
    for (const char c : s) {
        switch (c) {
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default: out += c;
        }
    }
    out += '"';
    return out;
}

std::string cypher_value(const Scalar& value) {
    if (const bool* b = std::get_if<bool>(&value)) return *b ? "true" : "false";
    if (const std::int64_t* i = std::get_if<std::int64_t>(&value))
        return std::to_string(*i);
    if (const double* d = std::get_if<double>(&value)) return format_double(*d);
    return cypher_string(std::get<std::string>(value));
}

} // namespace

std::string render_cypher(const KnowledgeGraph& g) {
    std::vector<const Node*> nodes;
    nodes.reserve(g.node_count());
    for (const Node& n : g.nodes()) nodes.push_back(&n);
    std::sort(nodes.begin(), nodes.end(),
              [](const Node* a, const Node* b) { return a->id < b->id; });

    std::vector<const Edge*> edges;
    edges.reserve(g.edge_count());
    for (const Edge& e : g.edges()) edges.push_back(&e);
    std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) {
        if (a->source != b->source) return a->source < b->source;
        if (a->target != b->target) return a->target < b->target;
        return a->rel < b->rel;
    });

    std::string out;
    for (const Node* n : nodes) {
        out += "CREATE (:" + cypher_name(n->label) + " {id: " + cypher_string(n->id);
        for (const auto& [key, value] : n->properties)
            out += ", " + cypher_name(key) + ": " + cypher_value(value);
        out += "});\n";
    }
    for (const Edge* e : edges) {
        out += "MATCH (a {id: " + cypher_string(e->source) + "}), (b {id: " +
               cypher_string(e->target) + "}) CREATE (a)-[:" + cypher_name(e->rel) +
               " {";
        if (e->strength) out += "strength: " + format_double(*e->strength) + ", ";
        out += "provenance: \"";
        out += provenance_token(e->provenance);
        out += "\"}]->(b);\n";
    }
    return out;
}

void export_cypher(const KnowledgeGraph& g, const std::filesystem::path& path) {
    write_file_atomic(path, render_cypher(g));
}

std::string render_snapshot_json(const MetricsSnapshot& snapshot) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "metrics_snapshot";
    j["algorithm"] = to_string(snapshot.algorithm);
    j["params"] = snapshot.params;
    j["converged"] = snapshot.converged;
    j["iterations"] = snapshot.iterations;
    ordered_json values = ordered_json::object();
    for (const auto& [id, value] : snapshot.values) values[id] = value;
    j["values"] = std::move(values);
    return j.dump(2) + "\n";
}

MetricsSnapshot parse_snapshot_json(std::string_view text, const std::string& origin) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::ParseError, origin + ": " + e.what());
    }
    const auto fail = [&](const std::string& what) -> void {
        throw Error(ErrorKind::SchemaError, origin + ": " + what);
    };
    if (!root.is_object()) fail("top level must be an object");
    for (const char* key :
         {"schema_version", "kind", "algorithm", "params", "converged",
          "iterations", "values"})
        if (!root.contains(key)) fail(std::string("missing key \"") + key + "\"");
    for (const auto& [key, value] : root.items())
        if (key != "schema_version" && key != "kind" && key != "algorithm" &&
            key != "params" && key != "converged" && key != "iterations" &&
            key != "values")
            fail("unknown key \"" + key + "\"");
    if (!root["schema_version"].is_number_integer() ||
        root["schema_version"].get<int>() != 1)
        fail("schema_version must be 1");
    if (!root["kind"].is_string() ||
        root["kind"].get<std::string>() != "metrics_snapshot")
        fail("kind must be metrics_snapshot");

    MetricsSnapshot snap;
    const std::string algorithm = root["algorithm"].is_string()
                                      ? root["algorithm"].get<std::string>()
                                      : "";
    if (algorithm == "degree")
        snap.algorithm = Algorithm::Degree;
    else if (algorithm == "pagerank")
        snap.algorithm = Algorithm::PageRank;
    else
        fail("algorithm must be degree or pagerank");
    if (!root["params"].is_string()) fail("params must be a string");
    snap.params = root["params"].get<std::string>();
    if (!root["converged"].is_boolean()) fail("converged must be a bool");
    snap.converged = root["converged"].get<bool>();
    if (!root["iterations"].is_number_integer()) fail("iterations must be an integer");
    snap.iterations = root["iterations"].get<int>();
    if (!root["values"].is_object()) fail("values must be an object");
    for (const auto& [id, value] : root["values"].items()) {
        if (!value.is_number()) fail("value of node \"" + id + "\" must be a number");
        snap.values[id] = value.get<double>();
    }
    return snap;
}

void write_snapshot(const MetricsSnapshot& snapshot,
                    const std::filesystem::path& path) {
    write_file_atomic(path, render_snapshot_json(snapshot));
}

MetricsSnapshot load_snapshot(const std::filesystem::path& path) {
    return parse_snapshot_json(read_file(path), path.string());
}

std::string render_report_json(const RunReport& report) {
    ordered_json j;
    j["schema_version"] = 1;
    j["kind"] = "run_report";
    j["tool"] = ordered_json{{"name", "kgc"}, {"version", report.tool_version}};

    ordered_json inputs = ordered_json::array();
    for (const InputDigest& in : report.inputs)
        inputs.push_back(ordered_json{
            {"name", in.name}, {"path", in.path}, {"sha256", in.sha256}});
    j["inputs"] = std::move(inputs);

    ordered_json configs = ordered_json::array();
    for (const RelationshipConfig& cfg : report.configs)
        configs.push_back(config_to_json(cfg));
    j["configs"] = std::move(configs);

    ordered_json completions = ordered_json::array();
    for (const CompletionReport& c : report.completions) {
        ordered_json entry;
        entry["relationship"] = c.rel;
        entry["inferred_edge_count"] = c.inferred_edge_count;
        entry["annotated_direct_count"] = c.annotated_direct_count;
        entry["truncated_pair_count"] = c.truncated_pairs_count;
        ordered_json records = ordered_json::array();
        for (const CompletionRecord& rec : c.records)
            records.push_back(ordered_json{{"source", rec.source},
                                           {"target", rec.target},
                                           {"strength", rec.strength},
                                           {"shortest_hops", rec.shortest_hops},
                                           {"annotated_direct", rec.annotated_direct}});
        entry["records"] = std::move(records);
        completions.push_back(std::move(entry));
    }
    j["completions"] = std::move(completions);

    ordered_json metrics = ordered_json::array();
    for (const MetricsSection& section : report.metrics) {
        ordered_json entry;
        entry["name"] = section.name;
        entry["algorithm"] = to_string(section.diff.algorithm);
        entry["params_before"] = section.diff.params_before;
        entry["params_after"] = section.diff.params_after;
        entry["unchanged_count"] = section.diff.unchanged_count;
        entry["top_k"] = section.top_k;
        const DiffSummary summary = summarize(section.diff, section.top_k);
        ordered_json increases = ordered_json::array();
        for (const DiffEntry& e : summary.top_increases)
            increases.push_back(diff_entry_to_json(e));
        entry["top_increases"] = std::move(increases);
        ordered_json decreases = ordered_json::array();
        for (const DiffEntry& e : summary.top_decreases)
            decreases.push_back(diff_entry_to_json(e));
        entry["top_decreases"] = std::move(decreases);
        ordered_json nodes = ordered_json::array();
        for (const DiffEntry& e : section.diff.entries)
            nodes.push_back(diff_entry_to_json(e));
        entry["nodes"] = std::move(nodes);
        metrics.push_back(std::move(entry));
    }
    j["metrics"] = std::move(metrics);

    return j.dump(2) + "\n";
}

std::string render_diff_csv(const MetricsDiff& diff) {
    std::string out = "node,before,after,delta,pct\n";
    for (const DiffEntry& e : diff.entries) {
        out += csv::escape_field(e.node);
        out += ',';
        out += format_double(e.before);
        out += ',';
        out += format_double(e.after);
        out += ',';
        out += format_double(e.delta);
        out += ',';
        out += e.pct ? format_double(*e.pct) : "new";
        out += '\n';
    }
    return out;
}

void write_report(const RunReport& report, const std::filesystem::path& path,
                  ReportFormat format) {
    if (format == ReportFormat::Json) {
        write_file_atomic(path, render_report_json(report));
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec)
        throw Error(ErrorKind::IoError,
                    "cannot create " + path.string() + ": " + ec.message());
    for (const MetricsSection& section : report.metrics)
        write_file_atomic(path / ("diff_" + section.name + ".csv"),
                          render_diff_csv(section.diff));
}

std::string sha256_hex(std::string_view bytes) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(),
                   nullptr) != 1)
        throw Error(ErrorKind::IoError, "SHA-256 digest failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(read_file(path));
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] =
        std::to_chars(buf.data(), buf.data() + buf.size(), value);
    std::string s(buf.data(), static_cast<std::size_t>(ptr - buf.data()));
    if (s.find_first_not_of("-0123456789") == std::string::npos) s += ".0";
    return s;
}

} // namespace kgc
