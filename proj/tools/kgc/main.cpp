#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kgc/datasets.hpp"
#include "kgc/error.hpp"
#include "kgc/io.hpp"
#include "kgc/metrics.hpp"
#include "kgc/version.hpp"

namespace fs = std::filesystem;

namespace {

bool verbose() { return std::getenv("KGC_LOG") != nullptr; }

void log_stage(const std::string& what) {
    if (verbose()) std::cerr << "[kgc] " << what << "\n";
}

struct InputArgs {
    std::string bundle;
    std::string nodes;
    std::string edges;
    std::string config;
};

void add_input_options(CLI::App* cmd, InputArgs& args, bool config_too = true) {
    auto* bundle = cmd->add_option(
        "--bundle", args.bundle,
        "directory holding nodes.csv, edges.csv and optionally config.json");
    auto* nodes = cmd->add_option("--nodes", args.nodes, "node CSV path");
    auto* edges = cmd->add_option("--edges", args.edges, "edge CSV path");
    nodes->excludes(bundle)->needs(edges);
    edges->excludes(bundle)->needs(nodes);
    if (config_too)
        cmd->add_option("--config", args.config, "relationship config JSON path")
            ->excludes(bundle);
}

kgc::GraphBundle resolve_bundle(const InputArgs& args) {
    kgc::GraphBundle bundle;
    if (!args.bundle.empty()) {
        const fs::path dir = args.bundle;
        bundle.nodes = dir / "nodes.csv";
        bundle.edges = dir / "edges.csv";
        if (fs::exists(dir / "config.json")) bundle.config = dir / "config.json";
        return bundle;
    }
    if (args.nodes.empty() || args.edges.empty())
        throw kgc::Error(kgc::ErrorKind::ConfigError,
                         "pass --bundle or both --nodes and --edges");
    bundle.nodes = args.nodes;
    bundle.edges = args.edges;
    if (!args.config.empty()) bundle.config = args.config;
    return bundle;
}

std::vector<kgc::InputDigest> digest_inputs(const kgc::GraphBundle& bundle) {
    std::vector<kgc::InputDigest> digests;
    digests.push_back(
        {"nodes", bundle.nodes.string(), kgc::sha256_file(bundle.nodes)});
    digests.push_back(
        {"edges", bundle.edges.string(), kgc::sha256_file(bundle.edges)});
    if (bundle.config)
        digests.push_back(
            {"config", bundle.config->string(), kgc::sha256_file(*bundle.config)});
    return digests;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw kgc::Error(kgc::ErrorKind::IoError, "failed writing " + path.string());
}

std::string render_timings_json(const std::vector<kgc::CompletionReport>& reports) {
    std::string out = "{\n  \"completions\": [";
    long long total = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        if (i != 0) out += ',';
        out += "\n    {\"relationship\": \"" + reports[i].rel +
               "\", \"microseconds\": " +
               std::to_string(reports[i].elapsed.count()) + "}";
        total += reports[i].elapsed.count();
    }
    out += reports.empty() ? "]" : "\n  ]";
    out += ",\n  \"total_microseconds\": " + std::to_string(total) + "\n}\n";
    return out;
}

std::string pct_token(const kgc::DiffEntry& entry) {
    if (!entry.pct) return "new";
    std::string s = kgc::format_double(*entry.pct);
    if (*entry.pct >= 0.0) s.insert(s.begin(), '+');
    return s + "%";
}

void print_top_changes(std::ostream& os, const std::string& name,
                       const kgc::DiffSummary& summary) {
    os << name << ": top increases\n";
    std::size_t rank = 1;
    for (const kgc::DiffEntry& e : summary.top_increases)
        os << "  " << rank++ << ". " << e.node << "  "
           << kgc::format_double(e.before) << " -> " << kgc::format_double(e.after)
           << "  (" << pct_token(e) << ")\n";
    os << name << ": top decreases\n";
    rank = 1;
    for (const kgc::DiffEntry& e : summary.top_decreases)
        os << "  " << rank++ << ". " << e.node << "  "
           << kgc::format_double(e.before) << " -> " << kgc::format_double(e.after)
           << "  (" << pct_token(e) << ")\n";
    os << name << ": " << summary.unchanged_count << " nodes unchanged\n";
}

// ---- gen

struct GenArgs {
    std::string out_dir;
    kgc::RomanEmpireParams roman;
    kgc::FamilyTreeParams family;
};

void run_gen(const std::string& which, const GenArgs& args) {
    kgc::KnowledgeGraph g;
    kgc::ConfigFile config;
    config.registry_closed = true;
    if (which == "roman") {
        g = kgc::gen_roman_empire(args.roman);
        config.registry.push_back({kgc::kCommandsRel, true});
        config.relationships.push_back(kgc::roman_commands_config());
    } else {
        g = kgc::gen_family_tree(args.family);
        config.registry.push_back({kgc::kRelativeOfRel, true});
        config.relationships.push_back(kgc::kinship_config());
    }

    const fs::path dir = args.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw kgc::Error(kgc::ErrorKind::IoError,
                         "cannot create " + dir.string() + ": " + ec.message());
    kgc::write_nodes(g, dir / "nodes.csv");
    kgc::write_edges(g, dir / "edges.csv");
    write_text(dir / "config.json", kgc::render_config_json(config));
    std::cout << "wrote " << which << " bundle to " << dir.string() << " ("
              << g.node_count() << " nodes, " << g.edge_count() << " edges)\n";
}

// ---- complete

struct CompleteArgs {
    InputArgs input;
    std::string out_dir;
    bool cypher = false;
};

struct CompletionRun {
    kgc::KnowledgeGraph graph;
    std::vector<kgc::CompletionReport> reports;
};

CompletionRun run_completions(kgc::KnowledgeGraph graph,
                              const std::vector<kgc::RelationshipConfig>& configs) {
    if (configs.empty())
        throw kgc::Error(kgc::ErrorKind::ConfigError,
                         "no relationships configured; nothing to complete");
    CompletionRun run;
    for (const kgc::RelationshipConfig& cfg : configs) {
        log_stage("completing " + cfg.rel);
        kgc::CompletionResult result = kgc::complete(graph, cfg);
        graph = std::move(result.graph);
        run.reports.push_back(std::move(result.report));
    }
    run.graph = std::move(graph);
    return run;
}

void print_completion_lines(const std::vector<kgc::CompletionReport>& reports) {
    for (const kgc::CompletionReport& r : reports)
        std::cout << r.rel << ": " << r.inferred_edge_count << " inferred, "
                  << r.annotated_direct_count << " direct annotated, "
                  << r.truncated_pairs_count << " truncated pairs ("
                  << r.elapsed.count() << " us)\n";
}

void run_complete(const CompleteArgs& args) {
    const kgc::GraphBundle bundle = resolve_bundle(args.input);
    log_stage("loading " + bundle.nodes.string());
    const std::vector<kgc::InputDigest> digests = digest_inputs(bundle);
    kgc::LoadResult loaded = kgc::load_bundle(bundle);
    CompletionRun run = run_completions(std::move(loaded.graph), loaded.configs);

    kgc::RunReport report;
    report.tool_version = kgc::kVersion;
    report.inputs = digests;
    report.configs = loaded.configs;
    report.completions = run.reports;

    const fs::path dir = args.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw kgc::Error(kgc::ErrorKind::IoError,
                         "cannot create " + dir.string() + ": " + ec.message());
    kgc::write_nodes(run.graph, dir / "completed_nodes.csv");
    kgc::write_edges(run.graph, dir / "completed_edges.csv");
    kgc::write_report(report, dir / "report.json", kgc::ReportFormat::Json);
    write_text(dir / "timings.json", render_timings_json(run.reports));
    if (args.cypher) kgc::export_cypher(run.graph, dir / "graph.cypher");

    print_completion_lines(run.reports);
    std::cout << "wrote " << (dir / "report.json").string() << "\n";
}

// ---- metrics

struct MetricsArgs {
    InputArgs input;
    std::string algorithm;
    std::string rel;
    std::string direction = "total";
    bool weighted = false;
    kgc::PageRankParams pagerank;
    std::string out;
};

kgc::Direction parse_direction(const std::string& s) {
    if (s == "in") return kgc::Direction::In;
    if (s == "out") return kgc::Direction::Out;
    return kgc::Direction::Total;
}

void run_metrics(const MetricsArgs& args) {
    const kgc::GraphBundle bundle = resolve_bundle(args.input);
    kgc::LoadResult loaded = kgc::load_bundle(bundle);
    const std::optional<std::string> rel =
        args.rel.empty() ? std::nullopt : std::optional<std::string>(args.rel);

    kgc::MetricsSnapshot snap;
    if (args.algorithm == "degree") {
        snap = kgc::degree_centrality(loaded.graph, rel,
                                      parse_direction(args.direction),
                                      args.weighted);
    } else {
        kgc::PageRankParams params = args.pagerank;
        params.weighted = args.weighted;
        snap = kgc::pagerank(loaded.graph, rel, params);
    }
    kgc::write_snapshot(snap, args.out);
    std::cout << args.algorithm << " over " << snap.values.size() << " nodes";
    if (args.algorithm == "pagerank") {
        std::cout << ", " << snap.iterations << " iterations, "
                  << (snap.converged ? "converged" : "NOT converged");
    }
    std::cout << " -> " << args.out << "\n";
}

// ---- diff

struct DiffArgs {
    std::string before;
    std::string after;
    std::size_t top_k = 5;
    std::string out;
};

void run_diff(const DiffArgs& args) {
    const kgc::MetricsSnapshot before = kgc::load_snapshot(args.before);
    const kgc::MetricsSnapshot after = kgc::load_snapshot(args.after);
    const kgc::MetricsDiff diff = kgc::diff_metrics(before, after);
    print_top_changes(std::cout, kgc::to_string(diff.algorithm),
                      kgc::summarize(diff, args.top_k));
    if (!args.out.empty()) {
        write_text(args.out, kgc::render_diff_csv(diff));
        std::cout << "wrote " << args.out << "\n";
    }
}

// ---- pipeline

struct PipelineArgs {
    InputArgs input;
    std::string out_dir;
    std::size_t top_k = 5;
    bool cypher = false;
};

void run_pipeline(const PipelineArgs& args) {
    const kgc::GraphBundle bundle = resolve_bundle(args.input);
    log_stage("loading " + bundle.nodes.string());
    const std::vector<kgc::InputDigest> digests = digest_inputs(bundle);
    kgc::LoadResult loaded = kgc::load_bundle(bundle);

    log_stage("metrics before completion");
    const kgc::MetricsSnapshot degree_before =
        kgc::degree_centrality(loaded.graph, std::nullopt, kgc::Direction::Total,
                               false);
    const kgc::MetricsSnapshot pagerank_before =
        kgc::pagerank(loaded.graph, std::nullopt, {});

    CompletionRun run = run_completions(loaded.graph, loaded.configs);

    log_stage("metrics after completion");
    const kgc::MetricsSnapshot degree_after = kgc::degree_centrality(
        run.graph, std::nullopt, kgc::Direction::Total, false);
    const kgc::MetricsSnapshot pagerank_after =
        kgc::pagerank(run.graph, std::nullopt, {});

    kgc::RunReport report;
    report.tool_version = kgc::kVersion;
    report.inputs = digests;
    report.configs = loaded.configs;
    report.completions = run.reports;
    report.metrics.push_back(
        {"degree", kgc::diff_metrics(degree_before, degree_after), args.top_k});
    report.metrics.push_back(
        {"pagerank", kgc::diff_metrics(pagerank_before, pagerank_after),
         args.top_k});

    // Everything is computed; only now touch the output directory.
    const fs::path dir = args.out_dir;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw kgc::Error(kgc::ErrorKind::IoError,
                         "cannot create " + dir.string() + ": " + ec.message());
    kgc::write_nodes(run.graph, dir / "completed_nodes.csv");
    kgc::write_edges(run.graph, dir / "completed_edges.csv");
    kgc::write_report(report, dir / "report.json", kgc::ReportFormat::Json);
    for (const kgc::MetricsSection& section : report.metrics)
        write_text(dir / ("diff_" + section.name + ".csv"),
                   kgc::render_diff_csv(section.diff));
    write_text(dir / "timings.json", render_timings_json(run.reports));
    if (args.cypher) kgc::export_cypher(run.graph, dir / "graph.cypher");

    std::cout << "loaded " << loaded.graph.node_count() << " nodes, "
              << loaded.graph.edge_count() << " edges\n";
    print_completion_lines(run.reports);
    for (const kgc::MetricsSection& section : report.metrics)
        print_top_changes(std::cout, section.name,
                          kgc::summarize(section.diff, section.top_k));
    std::cout << "wrote " << (dir / "report.json").string() << "\n";
}

// ---- export-cypher

struct ExportArgs {
    InputArgs input;
    std::string out;
};

void run_export(const ExportArgs& args) {
    kgc::LoadResult loaded = kgc::load_bundle(resolve_bundle(args.input));
    kgc::export_cypher(loaded.graph, args.out);
    std::cout << "wrote " << args.out << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic knowledge-graph completion and centrality shifts"};
    app.set_version_flag("--version", std::string("kgc ") + kgc::kVersion);
    app.require_subcommand(1);

    GenArgs gen_args;
    auto* gen = app.add_subcommand("gen", "generate a case-study dataset bundle");
    gen->require_subcommand(1);
    auto* gen_roman = gen->add_subcommand(
        "roman", "four-level command hierarchy (48 nodes by default)");
    gen_roman->add_option("--prefectures", gen_args.roman.prefecture_count,
                          "prefecture count");
    gen_roman->add_option("--dioceses", gen_args.roman.diocese_count,
                          "diocese count");
    gen_roman->add_option("--provinces", gen_args.roman.province_count,
                          "province count");
    gen_roman->add_option("--out", gen_args.out_dir, "output directory")
        ->required();
    auto* gen_family =
        gen->add_subcommand("family", "synthetic genealogy of blood relatives");
    gen_family->add_option("--generations", gen_args.family.generations,
                           "generation count (>= 2)");
    gen_family->add_option("--couples", gen_args.family.couples_per_generation,
                           "founder lines in generation 0");
    gen_family->add_option("--children", gen_args.family.children_per_couple,
                           "children per reproducing unit");
    gen_family->add_option("--intermarriage-rate",
                           gen_args.family.intermarriage_rate,
                           "probability of marrying within the family, [0,1)");
    gen_family->add_option("--seed", gen_args.family.seed, "RNG seed");
    gen_family->add_option("--out", gen_args.out_dir, "output directory")
        ->required();

    CompleteArgs complete_args;
    auto* complete =
        app.add_subcommand("complete", "infer edges for configured relationships");
    add_input_options(complete, complete_args.input);
    complete->add_option("--out", complete_args.out_dir, "output directory")
        ->required();
    complete->add_flag("--cypher", complete_args.cypher,
                       "also write graph.cypher");

    MetricsArgs metrics_args;
    auto* metrics =
        app.add_subcommand("metrics", "compute a centrality snapshot");
    add_input_options(metrics, metrics_args.input);
    metrics->add_option("--algorithm", metrics_args.algorithm, "degree or pagerank")
        ->required()
        ->check(CLI::IsMember({"degree", "pagerank"}));
    metrics->add_option("--rel", metrics_args.rel,
                        "restrict to one relationship type");
    metrics->add_option("--direction", metrics_args.direction,
                        "degree direction (in, out, total)")
        ->check(CLI::IsMember({"in", "out", "total"}));
    metrics->add_flag("--weighted", metrics_args.weighted,
                      "use edge strengths as weights (missing = 1)");
    metrics->add_option("--damping", metrics_args.pagerank.damping,
                        "pagerank damping factor");
    metrics->add_option("--tolerance", metrics_args.pagerank.tolerance,
                        "pagerank L1 stop threshold");
    metrics->add_option("--max-iterations", metrics_args.pagerank.max_iterations,
                        "pagerank iteration cap");
    metrics->add_flag("--normalized", metrics_args.pagerank.normalized,
                      "use the (1-d)/N baseline");
    metrics->add_option("--out", metrics_args.out, "snapshot JSON path")
        ->required();

    DiffArgs diff_args;
    auto* diff = app.add_subcommand("diff", "compare two metrics snapshots");
    diff->add_option("--before", diff_args.before, "snapshot JSON path")
        ->required();
    diff->add_option("--after", diff_args.after, "snapshot JSON path")->required();
    diff->add_option("--top-k", diff_args.top_k, "rows per change table");
    diff->add_option("--out", diff_args.out, "also write a diff CSV here");

    PipelineArgs pipeline_args;
    auto* pipeline = app.add_subcommand(
        "pipeline", "load, snapshot, complete, re-snapshot, diff, report");
    add_input_options(pipeline, pipeline_args.input);
    pipeline->add_option("--out", pipeline_args.out_dir, "output directory")
        ->required();
    pipeline->add_option("--top-k", pipeline_args.top_k, "rows per change table");
    pipeline->add_flag("--cypher", pipeline_args.cypher,
                       "also write graph.cypher");

    ExportArgs export_args;
    auto* exporter =
        app.add_subcommand("export-cypher", "render the graph as a Cypher script");
    add_input_options(exporter, export_args.input);
    exporter->add_option("--out", export_args.out, "Cypher script path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "kgc: " << e.what() << "\n";
        return 2;
    }

    try {
        if (gen->parsed())
            run_gen(gen_roman->parsed() ? "roman" : "family", gen_args);
        else if (complete->parsed())
            run_complete(complete_args);
        else if (metrics->parsed())
            run_metrics(metrics_args);
        else if (diff->parsed())
            run_diff(diff_args);
        else if (pipeline->parsed())
            run_pipeline(pipeline_args);
        else if (exporter->parsed())
            run_export(export_args);
    } catch (const kgc::Error& e) {
        std::cerr << "kgc: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "kgc: unexpected error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
