#pragma once
// Batch command-line front end: validate, table, parse, compare, report.
//
// Exit codes: 0 success, 1 usage, 2 input error, 3 validation failure,
// 4 partial failure or empty result.
//
// Settings come from a JSON config file (--config, or the FRAMESIM_CONFIG
// environment variable) and are overridden by flags.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "framesim/activation.hpp"
#include "framesim/corpus.hpp"
#include "framesim/daisy.hpp"
#include "framesim/error.hpp"
#include "framesim/fn_graph.hpp"
#include "framesim/parallel.hpp"
#include "framesim/records.hpp"
#include "framesim/similarity.hpp"
#include "framesim/stats.hpp"

namespace framesim::cli {

namespace fs = std::filesystem;
using records::json;

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kInputError = 2,
    kValidationFailure = 3,
    kPartialFailure = 4,
};

struct RunConfig {
    std::string frame_db;
    std::string corpus;
    std::string table;
    SpreadParams params;
    std::string out_dir;  // empty means the working directory
    std::set<std::string> formats{"csv", "records"};
    std::vector<std::string> setups;
    std::vector<std::string> from_summary;
    std::vector<std::string> samples;
    stats::TestKind kind = stats::TestKind::welch;
    std::size_t bins = 10;
    unsigned threads = 0;
    bool quiet = false;
};

// Thrown for bad flag values; maps to the usage exit code.
class UsageError : public Error {
public:
    using Error::Error;
};

class Logger {
public:
    Logger(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}

    void info(const std::string& msg, json extra = json::object()) { emit("info", msg, std::move(extra)); }
    void warn(const std::string& msg, json extra = json::object()) { emit("warn", msg, std::move(extra)); }
    // Errors are printed even in quiet mode.
    void error(const std::string& msg, json extra = json::object()) { emit("error", msg, std::move(extra), true); }

private:
    void emit(const char* level, const std::string& msg, json extra, bool force = false) {
        if (quiet_ && !force) return;
        extra["level"] = level;
        extra["msg"] = msg;
        records::write(err_, extra);
    }

    std::ostream& err_;
    bool quiet_;
};

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) out.push_back(item);
    return out;
}

// "inheritance,using" or "inheritance=1,see_also=0.5".
inline void apply_relations(SpreadParams& params, const std::vector<std::string>& items) {
    params.relation_types.clear();
    params.relation_weights.clear();
    for (const auto& item : items) {
        const auto eq = item.find('=');
        const std::string name = item.substr(0, eq);
        auto type = parse_relation_type(name);
        if (!type) throw UsageError("unknown relation type \"" + name + "\"");
        params.relation_types.insert(*type);
        if (eq != std::string::npos) {
            try {
                params.relation_weights[*type] = std::stod(item.substr(eq + 1));
            } catch (const std::exception&) {
                throw UsageError("bad relation weight in \"" + item + "\"");
            }
        }
    }
}

inline stats::SummaryStats parse_summary(const std::string& text) {
    const auto parts = split_list(text);
    if (parts.size() != 3) throw InputError("--from-summary expects MEAN,STDEV,N but got \"" + text + "\"");
    try {
        std::size_t used = 0;
        const double n = std::stod(parts[2], &used);
        if (used != parts[2].size() || n < 0 || n != static_cast<double>(static_cast<std::size_t>(n)))
            throw InputError("sample size must be a non-negative integer");
        return {std::stod(parts[0]), std::stod(parts[1]), static_cast<std::size_t>(n)};
    } catch (const std::logic_error&) {
        throw InputError("--from-summary expects numbers but got \"" + text + "\"");
    }
}

inline std::ifstream open_input(const std::string& path, const char* what) {
    if (path.empty()) throw InputError(std::string("no ") + what + " given");
    std::ifstream in(path);
    if (!in) throw InputError(std::string("cannot read ") + what + " " + path);
    return in;
}

inline fs::path out_dir(const RunConfig& cfg) { return cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir); }

inline std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

inline FrameGraph load_graph(const RunConfig& cfg, LoadOptions options = {}) {
    auto in = open_input(cfg.frame_db, "frame database");
    return load_frame_database(in, options);
}

inline Corpus load_corpus_file(const RunConfig& cfg, const FrameGraph& g) {
    auto in = open_input(cfg.corpus, "corpus");
    return load_corpus(in, MergePolicy::error, &g);
}

// Reads --table when it exists, otherwise builds rows for every frame.
inline RelatednessTable table_for(const RunConfig& cfg, const FrameGraph& g, Logger& log) {
    if (!cfg.table.empty() && fs::exists(cfg.table)) {
        auto in = open_input(cfg.table, "relatedness table");
        auto table = read_table(in, g, cfg.params);
        if (table.rows().size() != g.size())
            throw InputError("relatedness table " + cfg.table + " does not cover every frame");
        log.info("loaded relatedness table", {{"path", cfg.table}, {"rows", table.rows().size()}});
        return table;
    }
    return build_relatedness_table(g, cfg.params, std::nullopt, cfg.threads);
}

inline std::vector<Setup> parse_setups(const std::vector<std::string>& names) {
    std::vector<Setup> out;
    for (const auto& n : names) {
        auto s = parse_setup(n);
        if (!s) throw UsageError("unknown setup \"" + n + "\"");
        out.push_back(*s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Commands

inline int cmd_validate(const RunConfig& cfg, std::ostream& out, Logger& log) {
    const auto g = load_graph(cfg, {.reject_structural = false});
    const auto report = validate(g);
    for (const auto& v : report.violations) out << v.str() << '\n';
    if (!report.ok()) {
        log.warn("frame database failed validation", {{"violations", report.violations.size()}});
        return kValidationFailure;
    }
    log.info("frame database is valid", {{"frames", g.size()}, {"relations", g.relations().size()}});
    return kOk;
}

inline int cmd_table(const RunConfig& cfg, std::ostream&, Logger& log) {
    const auto g = load_graph(cfg);
    const fs::path path = cfg.table.empty() ? out_dir(cfg) / "table.jsonl" : fs::path(cfg.table);
    const auto table = build_relatedness_table(g, cfg.params, std::nullopt, cfg.threads);
    auto out = open_output(path);
    write_table(out, table, g);
    log.info("wrote relatedness table", {{"path", path.string()}, {"rows", table.rows().size()}});
    return kOk;
}

inline int cmd_parse(const RunConfig& cfg, std::ostream&, Logger& log) {
    const auto g = load_graph(cfg);
    const auto corpus = load_corpus_file(cfg, g);
    const auto table = table_for(cfg, g, log);
    const auto filter = parse_setups(cfg.setups);

    std::vector<const AnnotationRecord*> todo;
    for (const auto& r : corpus.records()) {
        if (is_visual(r.setup)) continue;
        if (!filter.empty() && std::find(filter.begin(), filter.end(), r.setup) == filter.end()) continue;
        todo.push_back(&r);
    }
    std::sort(todo.begin(), todo.end(), [](auto* a, auto* b) { return a->id < b->id; });

    struct Slot {
        std::optional<ParseResult> result;
        std::string error;
    };
    std::vector<Slot> slots(todo.size());
    parallel_for(
        todo.size(),
        [&](std::size_t i) {
            try {
                slots[i].result = parse(todo[i]->text(), todo[i]->lang, g, cfg.params, &table, todo[i]->id);
            } catch (const Error& e) {
                slots[i].error = e.what();
            }
        },
        cfg.threads);

    const fs::path dir = out_dir(cfg);
    auto annotations = open_output(dir / "annotations.jsonl");
    auto trace = open_output(dir / "trace.jsonl");
    std::map<Setup, std::vector<RecordCounts>> counts;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < todo.size(); ++i) {
        const auto& rec = *todo[i];
        if (!slots[i].result) {
            ++failures;
            log.error("parse failed", {{"record", rec.id}, {"reason", slots[i].error}});
            continue;
        }
        const auto& res = *slots[i].result;
        json frames = json::array();
        for (auto h : res.annotation.evoked) frames.push_back(g.id(h).to_json());
        records::write(annotations, {{"id", rec.id},
                                     {"image", rec.image},
                                     {"setup", to_string(rec.setup)},
                                     {"lang", rec.lang},
                                     {"frames", std::move(frames)},
                                     {"lemmas", res.lemma_count()},
                                     {"frame_lemmas", res.frame_lemma_count()}});
        for (const auto& t : trace_records(rec.id, res, g)) records::write(trace, t);
        counts[rec.setup].push_back({res.lemma_count(), res.frame_lemma_count()});
    }

    auto stats_out = open_output(dir / "descriptive.jsonl");
    for (const auto& [setup, c] : counts) {
        const auto s = summarize_counts(setup, c);
        records::write(stats_out, {{"setup", to_string(setup)},
                                   {"n", s.n},
                                   {"avg_frames", s.avg_frames},
                                   {"stdev_frames", s.stdev_frames},
                                   {"avg_lemmas", s.avg_lemmas},
                                   {"stdev_lemmas", s.stdev_lemmas},
                                   {"avg_ratio", s.avg_ratio},
                                   {"stdev_ratio", s.stdev_ratio}});
    }
    log.info("parsed captions", {{"records", todo.size()}, {"failures", failures}});
    return failures == 0 ? kOk : kPartialFailure;
}

inline std::string histogram_svg(const std::vector<HistogramBin>& bins, const std::string& title) {
    constexpr int kWidth = 400, kHeight = 240, kMargin = 30;
    std::size_t peak = 1;
    for (const auto& b : bins) peak = std::max(peak, b.count);
    const double bar_w = static_cast<double>(kWidth - 2 * kMargin) / static_cast<double>(bins.size());
    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
    svg << "<text x=\"" << kMargin << "\" y=\"18\" font-size=\"12\">" << title << "</text>\n";
    for (std::size_t i = 0; i < bins.size(); ++i) {
        const double h = static_cast<double>(bins[i].count) / static_cast<double>(peak) * (kHeight - 2 * kMargin);
        svg << "<rect x=\"" << format_double(kMargin + bar_w * static_cast<double>(i)) << "\" y=\""
            << format_double(kHeight - kMargin - h) << "\" width=\"" << format_double(bar_w * 0.9) << "\" height=\""
            << format_double(h) << "\" fill=\"steelblue\"/>\n";
    }
    svg << "<text x=\"" << kMargin << "\" y=\"" << kHeight - 10 << "\" font-size=\"10\">0</text>\n";
    svg << "<text x=\"" << kWidth - kMargin << "\" y=\"" << kHeight - 10 << "\" font-size=\"10\">1</text>\n";
    svg << "</svg>\n";
    return svg.str();
}

inline int cmd_compare(const RunConfig& cfg, std::ostream& out, Logger& log) {
    const auto setups = parse_setups(cfg.setups);
    if (setups.size() != 2) throw UsageError("compare needs exactly two --setup values");
    for (const auto& f : cfg.formats)
        if (f != "csv" && f != "records" && f != "svg-histogram") throw UsageError("unknown format \"" + f + "\"");
    if (cfg.bins == 0) throw UsageError("--bins must be positive");

    const auto g = load_graph(cfg);
    const auto corpus = load_corpus_file(cfg, g);
    const auto table = table_for(cfg, g, log);
    const auto sample = pairwise_similarities(corpus, setups[0], setups[1], g, table, cfg.params, cfg.threads);

    for (const auto& w : sample.warnings) log.warn(w);
    for (const auto& [image, reason] : sample.failures) log.error("comparison failed", {{"image", image}, {"reason", reason}});
    if (!sample.empty.empty()) log.warn("images skipped: a side evoked no frames", {{"images", sample.empty}});
    if (!sample.missing.empty()) log.info("images present in only one setup", {{"images", sample.missing}});

    const std::string stem = std::string(to_string(setups[0])) + "_" + std::string(to_string(setups[1]));
    const fs::path dir = out_dir(cfg);
    const auto values = sample.values();

    json summary{{"kind", "summary"},
                 {"setup_a", to_string(setups[0])},
                 {"setup_b", to_string(setups[1])},
                 {"n", values.size()},
                 {"missing", sample.missing.size()},
                 {"empty", sample.empty.size()},
                 {"failures", sample.failures.size()}};
    if (values.empty()) {
        summary["mean"] = nullptr;
        summary["stdev"] = nullptr;
    } else {
        const auto [mean, sd] = detail::mean_stdev(values);
        summary["mean"] = mean;
        summary["stdev"] = values.size() >= 2 ? json(sd) : json(nullptr);
    }

    if (cfg.formats.contains("csv")) {
        auto csv = open_output(dir / (stem + ".csv"));
        write_similarity_csv(csv, sample);
    }
    std::vector<HistogramBin> bins;
    if (!values.empty()) bins = histogram(values, cfg.bins);
    if (cfg.formats.contains("records")) {
        auto rec = open_output(dir / (stem + ".summary.jsonl"));
        records::write(rec, summary);
        for (const auto& b : bins)
            records::write(rec, {{"kind", "bin"}, {"lo", b.lo}, {"hi", b.hi}, {"count", b.count}});
    }
    if (cfg.formats.contains("svg-histogram") && !bins.empty()) {
        auto svg = open_output(dir / (stem + ".svg"));
        svg << histogram_svg(bins, std::string(to_string(setups[0])) + " x " + std::string(to_string(setups[1])));
    }
    records::write(out, summary);

    if (values.empty()) {
        log.warn("similarity sample is empty");
        return kPartialFailure;
    }
    return sample.failures.empty() ? kOk : kPartialFailure;
}

inline int cmd_report(const RunConfig& cfg, std::ostream& out, Logger& log) {
    struct Input {
        std::string label;
        stats::SummaryStats summary;
    };
    std::vector<Input> summaries, samples;
    for (const auto& s : cfg.from_summary) summaries.push_back({s, parse_summary(s)});
    for (const auto& path : cfg.samples) {
        auto in = open_input(path, "similarity sample");
        const auto sample = read_similarity_csv(in);
        const auto values = sample.values();
        if (values.size() < 2) throw InputError("similarity sample " + path + " has fewer than two rows");
        samples.push_back({std::string(to_string(sample.setup_a)) + "x" + std::string(to_string(sample.setup_b)),
                           stats::summarize(values)});
    }
    if (summaries.empty() && samples.empty()) throw InputError("report needs --from-summary or --sample inputs");
    if (summaries.size() % 2 != 0 || samples.size() % 2 != 0)
        throw InputError("report inputs must come in pairs");

    std::optional<std::ofstream> file;
    if (!cfg.out_dir.empty()) file = open_output(fs::path(cfg.out_dir) / "report.jsonl");
    for (const auto* list : {&summaries, &samples}) {
        for (std::size_t i = 0; i + 1 < list->size(); i += 2) {
            const auto& a = (*list)[i];
            const auto& b = (*list)[i + 1];
            const auto r = stats::t_test(a.summary, b.summary, cfg.kind);
            json rec{{"comparison", a.label + " vs " + b.label},
                     {"kind", stats::to_string(r.kind)},
                     {"t", r.t},
                     {"df", r.df},
                     {"p", r.p_two_sided},
                     {"n1", a.summary.n},
                     {"n2", b.summary.n}};
            records::write(out, rec);
            if (file) records::write(*file, rec);
        }
    }
    log.info("wrote t-test report", {{"comparisons", (summaries.size() + samples.size()) / 2}});
    return kOk;
}

// ---------------------------------------------------------------------------
// Entry point

inline void apply_config_file(RunConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot read config file " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("malformed config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw InputError("config file must hold a JSON object");
    try {
        if (j.contains("frame_db")) cfg.frame_db = j["frame_db"].get<std::string>();
        if (j.contains("corpus")) cfg.corpus = j["corpus"].get<std::string>();
        if (j.contains("table")) cfg.table = j["table"].get<std::string>();
        if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
        if (j.contains("decay")) cfg.params.decay = j["decay"].get<double>();
        if (j.contains("max_depth")) cfg.params.max_depth = j["max_depth"].get<std::uint32_t>();
        if (j.contains("threshold")) cfg.params.threshold = j["threshold"].get<double>();
        if (j.contains("traversal")) {
            auto t = parse_traversal(j["traversal"].get<std::string>());
            if (!t) throw InputError("config: unknown traversal");
            cfg.params.traversal = *t;
        }
        if (j.contains("relations")) apply_relations(cfg.params, j["relations"].get<std::vector<std::string>>());
        if (j.contains("format")) {
            auto f = j["format"].get<std::vector<std::string>>();
            cfg.formats = {f.begin(), f.end()};
        }
        if (j.contains("bins")) cfg.bins = j["bins"].get<std::size_t>();
        if (j.contains("threads")) cfg.threads = j["threads"].get<unsigned>();
        if (j.contains("kind")) {
            auto k = stats::parse_test_kind(j["kind"].get<std::string>());
            if (!k) throw InputError("config: unknown test kind");
            cfg.kind = *k;
        }
        if (j.contains("quiet")) cfg.quiet = j["quiet"].get<bool>();
    } catch (const json::exception& e) {
        throw InputError("config file " + path + ": " + e.what());
    }
}

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Frame-semantic similarity by spread activation over a frame graph", "framesim"};
    app.require_subcommand(1);

    std::string config_path, frame_db, corpus, table, out_flag, traversal, relations, formats, kind;
    double decay = 0, threshold = 0;
    std::uint32_t max_depth = 0;
    std::size_t bins = 0;
    unsigned threads = 0;
    bool quiet = false;
    std::vector<std::string> setups, summaries, samples;

    using Options = std::map<std::string, CLI::Option*>;
    auto add_common = [&](CLI::App* sub) {
        Options o;
        o["config"] = sub->add_option("--config", config_path, "JSON config file (default: $FRAMESIM_CONFIG)");
        o["frame_db"] = sub->add_option("--frame-db", frame_db, "Frame database (line-delimited records)");
        o["corpus"] = sub->add_option("--corpus", corpus, "Annotation corpus (line-delimited records)");
        o["table"] = sub->add_option("--table", table, "Relatedness table file");
        o["decay"] = sub->add_option("--decay", decay, "Per-hop activation decay in (0,1)");
        o["max_depth"] = sub->add_option("--max-depth", max_depth, "Maximum spreading depth");
        o["threshold"] = sub->add_option("--threshold", threshold, "Drop activations below this value");
        o["traversal"] = sub->add_option("--traversal", traversal, "undirected|parents_only|children_only");
        o["relations"] = sub->add_option("--relations", relations, "Relation types, optionally type=weight");
        o["out"] = sub->add_option("--out", out_flag, "Output directory");
        o["format"] = sub->add_option("--format", formats, "Output formats: csv,records,svg-histogram");
        o["setup"] = sub->add_option("--setup", setups, "Setup filter / pair (ENO PTT PTO VWC VWoC)");
        o["from_summary"] = sub->add_option("--from-summary", summaries, "MEAN,STDEV,N summary input");
        o["sample"] = sub->add_option("--sample", samples, "Similarity CSV input");
        o["kind"] = sub->add_option("--kind", kind, "student|welch");
        o["bins"] = sub->add_option("--bins", bins, "Histogram bins");
        o["threads"] = sub->add_option("--threads", threads, "Worker threads (0 = hardware)");
        o["quiet"] = sub->add_flag("--quiet", quiet, "Only log errors");
        return o;
    };

    using Command = int (*)(const RunConfig&, std::ostream&, Logger&);
    struct Entry {
        CLI::App* app;
        Command fn;
        Options opts;
    };
    std::vector<Entry> commands;
    auto add_command = [&](const char* name, const char* help, Command fn) {
        auto* sub = app.add_subcommand(name, help);
        commands.push_back({sub, fn, add_common(sub)});
    };
    add_command("validate", "Check the frame database for cycles, dangling references and duplicates", cmd_validate);
    add_command("table", "Build the per-frame relatedness table", cmd_table);
    add_command("parse", "Assign frames to caption lemmas", cmd_parse);
    add_command("compare", "Cosine similarities between two setups", cmd_compare);
    add_command("report", "t-tests from summaries or similarity samples", cmd_report);

    std::vector<const char*> argv{"framesim"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        for (const auto& c : commands)
            if (c.app->parsed()) {
                out << c.app->help();
                return kOk;
            }
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        return kUsage;
    }
    const Entry* chosen = nullptr;
    for (const auto& c : commands)
        if (c.app->parsed()) chosen = &c;
    const Options& opts = chosen->opts;
    const Command fn = chosen->fn;

    RunConfig cfg;
    Logger boot_log(err, false);
    try {
        if (opts.at("config")->count() == 0) {
            if (const char* env = std::getenv("FRAMESIM_CONFIG"); env && *env) config_path = env;
        }
        if (!config_path.empty()) apply_config_file(cfg, config_path);

        auto given = [&](const char* key) { return opts.at(key)->count() > 0; };
        if (given("frame_db")) cfg.frame_db = frame_db;
        if (given("corpus")) cfg.corpus = corpus;
        if (given("table")) cfg.table = table;
        if (given("out")) cfg.out_dir = out_flag;
        if (given("decay")) cfg.params.decay = decay;
        if (given("max_depth")) cfg.params.max_depth = max_depth;
        if (given("threshold")) cfg.params.threshold = threshold;
        if (given("traversal")) {
            auto t = parse_traversal(traversal);
            if (!t) throw UsageError("unknown traversal \"" + traversal + "\"");
            cfg.params.traversal = *t;
        }
        if (given("relations")) apply_relations(cfg.params, split_list(relations));
        if (given("format")) {
            auto f = split_list(formats);
            cfg.formats = {f.begin(), f.end()};
        }
        if (given("setup")) cfg.setups = setups;
        if (given("from_summary")) cfg.from_summary = summaries;
        if (given("sample")) cfg.samples = samples;
        if (given("kind")) {
            auto k = stats::parse_test_kind(kind);
            if (!k) throw UsageError("unknown test kind \"" + kind + "\"");
            cfg.kind = *k;
        }
        if (given("bins")) cfg.bins = bins;
        if (given("threads")) cfg.threads = threads;
        if (given("quiet")) cfg.quiet = quiet;
        try {
            cfg.params.check();
        } catch (const InvalidArgument& e) {
            throw UsageError(e.what());
        }
    } catch (const UsageError& e) {
        boot_log.error(e.what());
        return kUsage;
    } catch (const Error& e) {
        boot_log.error(e.what());
        return kInputError;
    }

    Logger log(err, cfg.quiet);
    try {
        return fn(cfg, out, log);
    } catch (const UsageError& e) {
        log.error(e.what());
        return kUsage;
    } catch (const ValidationError& e) {
        log.error(e.what());
        return kInputError;
    } catch (const Error& e) {
        log.error(e.what());
        return kInputError;
    } catch (const fs::filesystem_error& e) {
        log.error(e.what());
        return kInputError;
    }
}

inline int run(int argc, char** argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, out, err);
}

}  // namespace framesim::cli
