#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "test_util.hpp"

namespace t = kgc::test;
namespace fs = std::filesystem;

namespace {

std::string q(const fs::path& p) { return p.string(); }

// Generates the default command-hierarchy bundle and returns its directory.
fs::path gen_roman(const t::TempDir& dir) {
    const fs::path bundle = dir / "roman";
    const t::CliResult r = t::run_cli("gen roman --out " + q(bundle));
    EXPECT_EQ(r.exit_code, 0) << r.output;
    return bundle;
}

void expect_contains(const std::string& haystack, const std::string& needle) {
    EXPECT_NE(haystack.find(needle), std::string::npos)
        << "output lacks \"" << needle << "\":\n" << haystack;
}

} // namespace

TEST(Cli, VersionAndUsageErrors) {
    const t::CliResult version = t::run_cli("--version");
    EXPECT_EQ(version.exit_code, 0);
    expect_contains(version.output, "kgc 0.1.0");

    EXPECT_EQ(t::run_cli("").exit_code, 2);                    // subcommand required
    EXPECT_EQ(t::run_cli("--frobnicate").exit_code, 2);        // unknown flag
    EXPECT_EQ(t::run_cli("gen roman").exit_code, 2);           // missing --out
    EXPECT_EQ(t::run_cli("metrics --bundle x --algorithm sparkle --out s.json")
                  .exit_code, 2);                              // bad enum value

    const t::CliResult help = t::run_cli("--help");
    EXPECT_EQ(help.exit_code, 0);
    expect_contains(help.output, "complete");
    expect_contains(help.output, "pipeline");
}

TEST(Cli, InputOptionsAreMutuallyExclusive) {
    t::TempDir dir;
    const t::CliResult mixed = t::run_cli(
        "complete --bundle " + q(dir.path()) + " --nodes n.csv --edges e.csv --out " +
        q(dir / "out"));
    EXPECT_EQ(mixed.exit_code, 2);

    const t::CliResult half =
        t::run_cli("complete --nodes n.csv --out " + q(dir / "out"));
    EXPECT_EQ(half.exit_code, 2);   // --nodes needs --edges

    const t::CliResult none = t::run_cli("complete --out " + q(dir / "out"));
    EXPECT_EQ(none.exit_code, 5);
    expect_contains(none.output, "pass --bundle or both --nodes and --edges");
}

TEST(Cli, GenRomanWritesACompleteBundle) {
    t::TempDir dir;
    const fs::path bundle = dir / "roman";
    const t::CliResult r = t::run_cli("gen roman --out " + q(bundle));
    EXPECT_EQ(r.exit_code, 0);
    expect_contains(r.output, "wrote roman bundle to " + q(bundle) +
                                  " (48 nodes, 47 edges)");
    EXPECT_TRUE(fs::exists(bundle / "nodes.csv"));
    EXPECT_TRUE(fs::exists(bundle / "edges.csv"));
    EXPECT_TRUE(fs::exists(bundle / "config.json"));
    expect_contains(t::slurp(bundle / "nodes.csv"), "Emperor");
    expect_contains(t::slurp(bundle / "config.json"), "\"COMMANDS\"");
}

TEST(Cli, GenFamilyValidatesParams) {
    t::TempDir dir;
    const t::CliResult bad = t::run_cli("gen family --generations 1 --out " +
                                        q(dir / "family"));
    EXPECT_EQ(bad.exit_code, 8);
    expect_contains(bad.output, "kgc: InvalidParams");

    const t::CliResult ok = t::run_cli(
        "gen family --generations 3 --couples 1 --children 2 --out " +
        q(dir / "family"));
    EXPECT_EQ(ok.exit_code, 0);
    expect_contains(ok.output, "(7 nodes, 6 edges)");
}

TEST(Cli, CompleteProducesReportAndCompletedGraph) {
    t::TempDir dir;
    const fs::path bundle = gen_roman(dir);
    const fs::path out = dir / "out";
    const t::CliResult r = t::run_cli("complete --bundle " + q(bundle) +
                                      " --out " + q(out) + " --cypher");
    EXPECT_EQ(r.exit_code, 0);
    expect_contains(r.output, "COMMANDS: 74 inferred, 47 direct annotated, "
                              "0 truncated pairs");
    expect_contains(r.output, "wrote " + q(out / "report.json"));
    EXPECT_TRUE(fs::exists(out / "completed_nodes.csv"));
    EXPECT_TRUE(fs::exists(out / "completed_edges.csv"));
    EXPECT_TRUE(fs::exists(out / "timings.json"));
    EXPECT_TRUE(fs::exists(out / "graph.cypher"));

    const std::string report = t::slurp(out / "report.json");
    expect_contains(report, "\"kind\": \"run_report\"");
    expect_contains(report, "\"inferred_edge_count\": 74");
    expect_contains(t::slurp(out / "timings.json"), "total_microseconds");
}

TEST(Cli, CompleteWithoutConfigIsAConfigError) {
    t::TempDir dir;
    const fs::path bundle = gen_roman(dir);
    fs::remove(bundle / "config.json");
    const t::CliResult r = t::run_cli("complete --bundle " + q(bundle) +
                                      " --out " + q(dir / "out"));
    EXPECT_EQ(r.exit_code, 5);
    expect_contains(r.output, "no relationships configured");
}

TEST(Cli, MetricsSnapshotsAndDiffRoundTrip) {
    t::TempDir dir;
    const fs::path bundle = gen_roman(dir);
    const fs::path out = dir / "out";

    const t::CliResult before = t::run_cli(
        "metrics --bundle " + q(bundle) + " --algorithm degree --out " +
        q(dir / "before.json"));
    EXPECT_EQ(before.exit_code, 0);
    expect_contains(before.output, "degree over 48 nodes -> ");

    ASSERT_EQ(t::run_cli("complete --bundle " + q(bundle) + " --out " + q(out))
                  .exit_code, 0);
    const t::CliResult after = t::run_cli(
        "metrics --nodes " + q(out / "completed_nodes.csv") + " --edges " +
        q(out / "completed_edges.csv") + " --algorithm degree --out " +
        q(dir / "after.json"));
    EXPECT_EQ(after.exit_code, 0) << after.output;

    const t::CliResult diff = t::run_cli(
        "diff --before " + q(dir / "before.json") + " --after " +
        q(dir / "after.json") + " --top-k 3 --out " + q(dir / "diff.csv"));
    EXPECT_EQ(diff.exit_code, 0) << diff.output;
    expect_contains(diff.output, "degree: top increases");
    expect_contains(diff.output, "1. Emperor  4.0 -> 47.0  (+1075.0%)");
    expect_contains(diff.output, "degree: top decreases");
    expect_contains(t::slurp(dir / "diff.csv"), "node,before,after,delta,pct\n");
}

TEST(Cli, PageRankMetricsReportConvergence) {
    t::TempDir dir;
    const fs::path bundle = gen_roman(dir);
    const t::CliResult r = t::run_cli(
        "metrics --bundle " + q(bundle) +
        " --algorithm pagerank --normalized --out " + q(dir / "snap.json"));
    EXPECT_EQ(r.exit_code, 0);
    expect_contains(r.output, "pagerank over 48 nodes");
    expect_contains(r.output, "converged");
    expect_contains(t::slurp(dir / "snap.json"), "normalized=true");
}

TEST(Cli, PipelineRunsEndToEnd) {
    t::TempDir dir;
    const fs::path bundle = gen_roman(dir);
    const fs::path out = dir / "out";
    const t::CliResult r =
        t::run_cli("pipeline --bundle " + q(bundle) + " --out " + q(out));
    EXPECT_EQ(r.exit_code, 0) << r.output;
    expect_contains(r.output, "loaded 48 nodes, 47 edges");
    expect_contains(r.output, "COMMANDS: 74 inferred");
    expect_contains(r.output, "degree: top increases");
    expect_contains(r.output, "1. Emperor  4.0 -> 47.0  (+1075.0%)");
    expect_contains(r.output, "pagerank: top increases");
    EXPECT_TRUE(fs::exists(out / "report.json"));
    EXPECT_TRUE(fs::exists(out / "diff_degree.csv"));
    EXPECT_TRUE(fs::exists(out / "diff_pagerank.csv"));
    EXPECT_TRUE(fs::exists(out / "timings.json"));
}

TEST(Cli, FailedPipelineWritesNothing) {
    t::TempDir dir;
    const fs::path bundle = dir / "loops";
    fs::create_directories(bundle);
    t::spit(bundle / "nodes.csv", "id,label,props\na,Thing,\nb,Thing,\n");
    t::spit(bundle / "edges.csv",
            "source,target,type,strength,provenance\n"
            "a,b,LOOPS,,direct\n"
            "b,a,LOOPS,,direct\n");
    t::spit(bundle / "config.json", R"({
  "schema_version": 1,
  "registry": {"LOOPS": {"transitive": true}},
  "relationships": {"LOOPS": {}}
})");
    const fs::path out = dir / "out";
    const t::CliResult r =
        t::run_cli("pipeline --bundle " + q(bundle) + " --out " + q(out));
    EXPECT_EQ(r.exit_code, 6);
    expect_contains(r.output, "kgc: CyclicGraph");
    expect_contains(r.output, "a -> b -> a");
    EXPECT_FALSE(fs::exists(out));   // failure leaves no partial output
}

TEST(Cli, LoadErrorsMapToDistinctExitCodes) {
    t::TempDir dir;
    // missing input file
    const t::CliResult missing = t::run_cli(
        "complete --nodes " + q(dir / "no.csv") + " --edges " +
        q(dir / "no2.csv") + " --out " + q(dir / "out"));
    EXPECT_EQ(missing.exit_code, 7);
    expect_contains(missing.output, "kgc: IoError");

    // malformed CSV
    const fs::path bundle = dir / "bundle";
    fs::create_directories(bundle);
    t::spit(bundle / "nodes.csv", "id,label,props\na,Thing,\nb\"oops,Thing,\n");
    t::spit(bundle / "edges.csv",
            "source,target,type,strength,provenance\na,b,R,,direct\n");
    const t::CliResult bad_csv = t::run_cli("complete --bundle " + q(bundle) +
                                            " --out " + q(dir / "out"));
    EXPECT_EQ(bad_csv.exit_code, 3);
    expect_contains(bad_csv.output, "nodes.csv:3: quote inside unquoted field");

    // malformed config JSON
    t::spit(bundle / "nodes.csv", "id,label,props\na,Thing,\nb,Thing,\n");
    t::spit(bundle / "config.json", "{broken");
    EXPECT_EQ(t::run_cli("complete --bundle " + q(bundle) + " --out " +
                         q(dir / "out")).exit_code, 3);

    // edge type outside a closed registry
    t::spit(bundle / "config.json", R"({
  "schema_version": 1,
  "registry": {"OTHER": {"transitive": true}},
  "relationships": {"OTHER": {}}
})");
    const t::CliResult stray = t::run_cli("complete --bundle " + q(bundle) +
                                          " --out " + q(dir / "out"));
    EXPECT_EQ(stray.exit_code, 4);
    expect_contains(stray.output, "unknown relationship type \"R\"");
}

TEST(Cli, ExportCypherWritesAScript) {
    t::TempDir dir;
    const fs::path bundle = gen_roman(dir);
    const t::CliResult r = t::run_cli("export-cypher --bundle " + q(bundle) +
                                      " --out " + q(dir / "graph.cypher"));
    EXPECT_EQ(r.exit_code, 0);
    const std::string script = t::slurp(dir / "graph.cypher");
    expect_contains(script, "CREATE (:Emperor {id: \"Emperor\", tier: 0});");
    expect_contains(script, "CREATE (a)-[:COMMANDS {provenance: \"direct\"}]->(b);");
}
