#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "framesim/cli.hpp"
#include "support.hpp"

using namespace framesim;
using namespace framesim::testing;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

std::vector<records::json> read_records(const fs::path& p) {
    std::ifstream in(p);
    std::vector<records::json> out;
    records::for_each(in, [&](const records::json& j, std::size_t) { out.push_back(j); });
    return out;
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        static int counter = 0;
        dir = fs::temp_directory_path() /
              ("framesim_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(dir);
        fs::create_directories(dir);
        spit(dir / "g5.jsonl", g5_with_lexicon());
        ::unsetenv("FRAMESIM_CONFIG");
    }
    void TearDown() override { fs::remove_all(dir); }

    std::string path(const std::string& name) const { return (dir / name).string(); }

    fs::path dir;
};

const std::string kToyFrames = std::string(FRAMESIM_DATA_DIR) + "/frames.jsonl";
const std::string kToyCorpus = std::string(FRAMESIM_DATA_DIR) + "/corpus.jsonl";

}  // namespace

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run({}).code, 1);
    EXPECT_EQ(run({"frobnicate"}).code, 1);
    EXPECT_EQ(run({"table", "--frame-db", path("g5.jsonl"), "--decay", "1.5"}).code, 1);
    EXPECT_EQ(run({"table", "--frame-db", path("g5.jsonl"), "--traversal", "sideways"}).code, 1);
    EXPECT_EQ(run({"table", "--frame-db", path("g5.jsonl"), "--relations", "inherits"}).code, 1);
    EXPECT_EQ(run({"compare", "--frame-db", path("g5.jsonl"), "--setup", "ENO"}).code, 1);
    EXPECT_EQ(run({"report", "--kind", "paired"}).code, 1);
    const auto help = run({"table", "--help"});
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("--decay"), std::string::npos);
}

TEST_F(Cli, ValidateCleanDatabase) {
    const auto r = run({"validate", "--frame-db", path("g5.jsonl"), "--quiet"});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "");
    EXPECT_EQ(r.err, "");
}

TEST_F(Cli, ValidateReportsCycles) {
    spit(dir / "cyc.jsonl", std::string(kG5) + R"({"kind":"relation","type":"using","parent":"E","child":"A"})");
    const auto r = run({"validate", "--frame-db", path("cyc.jsonl")});
    EXPECT_EQ(r.code, 3);
    EXPECT_NE(r.out.find("cycle"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("A"), std::string::npos);
    // Other commands refuse the database outright.
    EXPECT_EQ(run({"table", "--frame-db", path("cyc.jsonl"), "--out", dir.string()}).code, 2);
}

TEST_F(Cli, MissingOrMalformedInputs) {
    EXPECT_EQ(run({"validate", "--frame-db", path("nope.jsonl")}).code, 2);
    EXPECT_EQ(run({"validate"}).code, 2);
    spit(dir / "bad.jsonl", "{\"kind\":\"frame\",\"id\":1,\"name\":\"A\"}\n{oops\n");
    const auto r = run({"validate", "--frame-db", path("bad.jsonl")});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
    spit(dir / "dangling.jsonl", std::string(kG5) + R"({"kind":"relation","type":"using","parent":"E","child":"Q"})");
    EXPECT_EQ(run({"validate", "--frame-db", path("dangling.jsonl")}).code, 2);
}

TEST_F(Cli, TableIsDeterministicAndMatchesSpread) {
    spit(dir / "plain.jsonl", kG5);
    ASSERT_EQ(run({"table", "--frame-db", path("plain.jsonl"), "--out", path("a")}).code, 0);
    ASSERT_EQ(run({"table", "--frame-db", path("plain.jsonl"), "--table", path("b/t.jsonl"), "--threads", "1"}).code, 0);
    const auto text = slurp(dir / "a" / "table.jsonl");
    EXPECT_EQ(text, slurp(dir / "b" / "t.jsonl"));

    const auto rows = read_records(dir / "a" / "table.jsonl");
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[1].dump(), R"({"frame":"B","related":[["A",0.5],["B",1.0],["C",0.25],["D",0.5],["E",0.125]]})");
}

TEST_F(Cli, EmptyDatabaseGivesEmptyTable) {
    spit(dir / "empty.jsonl", "");
    EXPECT_EQ(run({"table", "--frame-db", path("empty.jsonl"), "--out", dir.string()}).code, 0);
    EXPECT_EQ(slurp(dir / "table.jsonl"), "");
}

TEST_F(Cli, ParseSingleCaption) {
    spit(dir / "c.jsonl", R"({"id":"c1","image":"i1","setup":"ENO","lang":"en","text":"the bee"})");
    const auto r = run({"parse", "--frame-db", path("g5.jsonl"), "--corpus", path("c.jsonl"), "--out", dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto anns = read_records(dir / "annotations.jsonl");
    ASSERT_EQ(anns.size(), 1u);
    EXPECT_EQ(anns[0]["frames"].dump(), R"(["B"])");
    EXPECT_EQ(anns[0]["lemmas"], 2);
    EXPECT_EQ(anns[0]["frame_lemmas"], 1);
    EXPECT_EQ(read_records(dir / "trace.jsonl").size(), 2u);
}

TEST_F(Cli, ParseEmptyCaptionIsPartialFailure) {
    spit(dir / "c.jsonl", "{\"id\":\"c1\",\"image\":\"i1\",\"setup\":\"ENO\",\"lang\":\"en\",\"text\":\"bee\"}\n"
                          "{\"id\":\"c2\",\"image\":\"i2\",\"setup\":\"ENO\",\"lang\":\"en\",\"text\":\"\"}\n");
    const auto r = run({"parse", "--frame-db", path("g5.jsonl"), "--corpus", path("c.jsonl"), "--out", dir.string(),
                        "--quiet"});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("c2"), std::string::npos);
    EXPECT_EQ(read_records(dir / "annotations.jsonl").size(), 1u);
}

TEST_F(Cli, ParseTraceMatchesLibrary) {
    ASSERT_EQ(run({"parse", "--frame-db", kToyFrames, "--corpus", kToyCorpus, "--out", dir.string(), "--quiet"}).code,
              0);
    std::ifstream fin(kToyFrames), cin(kToyCorpus);
    const auto g = load_frame_database(fin);
    const auto corpus = load_corpus(cin);
    std::vector<const AnnotationRecord*> recs;
    for (const auto& r : corpus.records())
        if (!is_visual(r.setup)) recs.push_back(&r);
    std::sort(recs.begin(), recs.end(), [](auto* a, auto* b) { return a->id < b->id; });
    std::ostringstream expected;
    for (const auto* r : recs)
        for (const auto& t : trace_records(r->id, parse(r->text(), r->lang, g), g)) records::write(expected, t);
    EXPECT_EQ(slurp(dir / "trace.jsonl"), expected.str());
}

TEST_F(Cli, ParseIsDeterministicAcrossThreadCounts) {
    ASSERT_EQ(run({"parse", "--frame-db", kToyFrames, "--corpus", kToyCorpus, "--out", path("t1"), "--threads", "1",
                   "--quiet"}).code, 0);
    ASSERT_EQ(run({"parse", "--frame-db", kToyFrames, "--corpus", kToyCorpus, "--out", path("t8"), "--threads", "8",
                   "--quiet"}).code, 0);
    for (const char* f : {"annotations.jsonl", "trace.jsonl", "descriptive.jsonl"})
        EXPECT_EQ(slurp(dir / "t1" / f), slurp(dir / "t8" / f)) << f;
}

TEST_F(Cli, CompareIdenticalLabels) {
    spit(dir / "c.jsonl",
         "{\"id\":\"a\",\"image\":\"i1\",\"setup\":\"VWC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"B\"},{\"frame\":\"E\"}]}\n"
         "{\"id\":\"b\",\"image\":\"i1\",\"setup\":\"VWoC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"E\"},{\"frame\":\"B\"}]}\n"
         "{\"id\":\"c\",\"image\":\"i2\",\"setup\":\"VWC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"D\"}]}\n"
         "{\"id\":\"d\",\"image\":\"i2\",\"setup\":\"VWoC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"D\"}]}\n");
    const auto r = run({"compare", "--frame-db", path("g5.jsonl"), "--corpus", path("c.jsonl"), "--setup", "VWC",
                        "--setup", "VWoC", "--out", dir.string(), "--quiet"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ifstream csv(dir / "VWC_VWoC.csv");
    const auto sample = read_similarity_csv(csv);
    ASSERT_EQ(sample.pairs.size(), 2u);
    for (const auto& p : sample.pairs) EXPECT_NEAR(p.cosine, 1.0, 1e-15);
    const auto summary = records::json::parse(r.out);
    EXPECT_NEAR(summary["mean"].get<double>(), 1.0, 1e-15);
}

TEST_F(Cli, CompareG5HandValue) {
    spit(dir / "c.jsonl",
         "{\"id\":\"a\",\"image\":\"img1\",\"setup\":\"VWC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"B\"}]}\n"
         "{\"id\":\"b\",\"image\":\"img1\",\"setup\":\"VWoC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"C\"}]}\n");
    const auto r = run({"compare", "--frame-db", path("g5.jsonl"), "--corpus", path("c.jsonl"), "--setup", "VWC",
                        "--setup", "VWoC", "--out", dir.string(), "--format", "csv,records,svg-histogram"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(slurp(dir / "VWC_VWoC.csv"), "image_id,setup_a,setup_b,cosine\nimg1,VWC,VWoC,0.5544554455445545\n");
    EXPECT_TRUE(fs::exists(dir / "VWC_VWoC.svg"));
    const auto summary = read_records(dir / "VWC_VWoC.summary.jsonl");
    ASSERT_EQ(summary.size(), 11u);
    EXPECT_EQ(summary[0]["n"], 1);
    EXPECT_TRUE(summary[0]["stdev"].is_null());
    EXPECT_EQ(summary[6]["count"], 1);  // bin [0.5, 0.6)
}

TEST_F(Cli, CompareEmptyIntersection) {
    spit(dir / "c.jsonl",
         "{\"id\":\"a\",\"image\":\"i1\",\"setup\":\"VWC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"B\"}]}\n"
         "{\"id\":\"b\",\"image\":\"i2\",\"setup\":\"VWoC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"C\"}]}\n");
    const auto r = run({"compare", "--frame-db", path("g5.jsonl"), "--corpus", path("c.jsonl"), "--setup", "VWC",
                        "--setup", "VWoC", "--out", dir.string()});
    EXPECT_EQ(r.code, 4);
    EXPECT_NE(r.err.find("warn"), std::string::npos);
}

TEST_F(Cli, CompareRejectsUnknownLabelFrame) {
    spit(dir / "c.jsonl", R"({"id":"a","image":"i1","setup":"VWC","lang":"en","labels":[{"frame":"Nope"}]})");
    EXPECT_EQ(run({"compare", "--frame-db", path("g5.jsonl"), "--corpus", path("c.jsonl"), "--setup", "VWC",
                   "--setup", "VWoC", "--out", dir.string()}).code, 2);
}

TEST_F(Cli, ReportFromSummaries) {
    auto r = run({"report", "--from-summary", "0.92,0.33,2000", "--from-summary", "0.71,0.28,2000", "--kind", "welch"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto rec = records::json::parse(r.out);
    EXPECT_NEAR(rec["t"].get<double>(), 21.70, 0.005);
    EXPECT_LT(rec["p"].get<double>(), 0.001);

    r = run({"report", "--from-summary", "0.51,0.14,2000", "--from-summary", "0.33,0.14,2000", "--kind", "student",
             "--out", dir.string()});
    ASSERT_EQ(r.code, 0);
    rec = records::json::parse(r.out);
    EXPECT_NEAR(rec["t"].get<double>(), 40.66, 0.005);
    EXPECT_EQ(rec["df"], 3998.0);
    EXPECT_EQ(slurp(dir / "report.jsonl"), r.out);

    r = run({"report", "--from-summary", "0.5,0.1,30", "--from-summary", "0.5,0.1,30"});
    rec = records::json::parse(r.out);
    EXPECT_EQ(rec["t"], 0.0);
    EXPECT_EQ(rec["p"], 1.0);
}

TEST_F(Cli, ReportInputErrors) {
    EXPECT_EQ(run({"report"}).code, 2);
    EXPECT_EQ(run({"report", "--from-summary", "0.5,0.1,30"}).code, 2);
    EXPECT_EQ(run({"report", "--from-summary", "0.5,0.1", "--from-summary", "0.5,0.1,30"}).code, 2);
    EXPECT_EQ(run({"report", "--sample", path("missing.csv"), "--sample", path("missing.csv")}).code, 2);
}

TEST_F(Cli, ConfigFileAndEnvironment) {
    spit(dir / "plain.jsonl", kG5);
    spit(dir / "cfg.json", R"({"frame_db":")" + path("plain.jsonl") + R"(","decay":0.25,"quiet":true})");
    ASSERT_EQ(run({"table", "--config", path("cfg.json"), "--out", path("x")}).code, 0);
    EXPECT_NE(slurp(dir / "x" / "table.jsonl").find(R"(["B",0.25])"), std::string::npos);

    ::setenv("FRAMESIM_CONFIG", path("cfg.json").c_str(), 1);
    // Flags win over the config file.
    ASSERT_EQ(run({"table", "--decay", "0.5", "--out", path("y")}).code, 0);
    ::unsetenv("FRAMESIM_CONFIG");
    EXPECT_NE(slurp(dir / "y" / "table.jsonl").find(R"(["B",0.5])"), std::string::npos);

    spit(dir / "broken.json", "{nope");
    EXPECT_EQ(run({"table", "--config", path("broken.json")}).code, 2);
}

TEST_F(Cli, TableCacheIsReused) {
    spit(dir / "plain.jsonl", kG5);
    ASSERT_EQ(run({"table", "--frame-db", path("plain.jsonl"), "--table", path("t.jsonl")}).code, 0);
    spit(dir / "c.jsonl",
         "{\"id\":\"a\",\"image\":\"img1\",\"setup\":\"VWC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"B\"}]}\n"
         "{\"id\":\"b\",\"image\":\"img1\",\"setup\":\"VWoC\",\"lang\":\"en\",\"labels\":[{\"frame\":\"C\"}]}\n");
    const auto r = run({"compare", "--frame-db", path("plain.jsonl"), "--corpus", path("c.jsonl"), "--table",
                        path("t.jsonl"), "--setup", "VWC", "--setup", "VWoC", "--out", dir.string()});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("loaded relatedness table"), std::string::npos);
}
