#pragma once
// Caption and image-annotation corpora: loading, per-record frame sets,
// descriptive statistics, pairwise similarity samples and histograms.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "framesim/activation.hpp"
#include "framesim/daisy.hpp"
#include "framesim/error.hpp"
#include "framesim/fn_graph.hpp"
#include "framesim/parallel.hpp"
#include "framesim/records.hpp"
#include "framesim/similarity.hpp"

namespace framesim {

enum class Setup { ENO, PTT, PTO, VWC, VWoC };

inline constexpr std::array<Setup, 5> kAllSetups = {Setup::ENO, Setup::PTT, Setup::PTO, Setup::VWC, Setup::VWoC};

inline std::string_view to_string(Setup s) {
    switch (s) {
        case Setup::ENO: return "ENO";
        case Setup::PTT: return "PTT";
        case Setup::PTO: return "PTO";
        case Setup::VWC: return "VWC";
        case Setup::VWoC: return "VWoC";
    }
    return "?";
}

inline std::optional<Setup> parse_setup(std::string_view s) {
    for (auto setup : kAllSetups)
        if (to_string(setup) == s) return setup;
    return std::nullopt;
}

// Image annotation setups carry frame labels instead of caption text.
inline bool is_visual(Setup s) { return s == Setup::VWC || s == Setup::VWoC; }

struct FrameLabel {
    std::string frame;  // frame name
    std::optional<std::string> fe;
    std::optional<std::string> box;

    friend bool operator==(const FrameLabel&, const FrameLabel&) = default;
};

struct AnnotationRecord {
    std::string id;
    std::string image;
    Setup setup = Setup::ENO;
    std::string lang;
    std::variant<std::string, std::vector<FrameLabel>> payload;

    const std::string& text() const { return std::get<std::string>(payload); }
    const std::vector<FrameLabel>& labels() const { return std::get<std::vector<FrameLabel>>(payload); }

    friend bool operator==(const AnnotationRecord&, const AnnotationRecord&) = default;
};

enum class MergePolicy { error, first };

class Corpus {
public:
    const std::vector<AnnotationRecord>& records() const { return records_; }

    const AnnotationRecord* find(const std::string& image, Setup setup) const {
        auto it = index_.find({image, setup});
        return it == index_.end() ? nullptr : &records_[it->second];
    }

    // Image ids with a record in `setup`, ascending.
    std::vector<std::string> images(Setup setup) const {
        std::vector<std::string> out;
        for (const auto& [key, _] : index_)
            if (key.second == setup) out.push_back(key.first);
        std::sort(out.begin(), out.end());
        return out;
    }

    // Records of one setup in ascending image order.
    std::vector<const AnnotationRecord*> in_setup(Setup setup) const {
        std::vector<const AnnotationRecord*> out;
        for (const auto& image : images(setup)) out.push_back(find(image, setup));
        return out;
    }

    // Returns false when (image, setup) is already present and the policy is "first".
    bool add(AnnotationRecord rec, MergePolicy policy = MergePolicy::error) {
        if (ids_.contains(rec.id)) throw DuplicateError("duplicate record id " + rec.id);
        auto key = std::make_pair(rec.image, rec.setup);
        if (index_.contains(key)) {
            if (policy == MergePolicy::error)
                throw DuplicateError("duplicate record for image " + rec.image + " in setup " +
                                     std::string(to_string(rec.setup)));
            return false;
        }
        ids_.insert(rec.id);
        index_.emplace(std::move(key), records_.size());
        records_.push_back(std::move(rec));
        return true;
    }

    friend bool operator==(const Corpus& a, const Corpus& b) { return a.records_ == b.records_; }

private:
    std::vector<AnnotationRecord> records_;
    std::map<std::pair<std::string, Setup>, std::size_t> index_;
    std::set<std::string> ids_;
};

// When `graph` is given, every visual label must name one of its frames.
// Caption text is not required to be non-empty here; parsing rejects empty
// captions per record.
inline Corpus load_corpus(std::istream& in, MergePolicy policy = MergePolicy::error,
                          const FrameGraph* graph = nullptr) {
    using records::json;
    Corpus corpus;
    records::for_each(in, [&](const json& rec, std::size_t line) {
        AnnotationRecord r;
        r.id = records::require<std::string>(rec, "id", line);
        r.image = records::require<std::string>(rec, "image", line);
        const auto setup_name = records::require<std::string>(rec, "setup", line);
        auto setup = parse_setup(setup_name);
        if (!setup) throw ParseError(line, "unknown setup \"" + setup_name + "\"");
        r.setup = *setup;
        r.lang = records::require<std::string>(rec, "lang", line);
        if (is_visual(r.setup)) {
            if (rec.contains("text")) throw ParseError(line, "visual setup record carries caption text");
            auto labels = rec.find("labels");
            if (labels == rec.end() || !labels->is_array()) throw ParseError(line, "missing \"labels\" array");
            std::vector<FrameLabel> out;
            for (const auto& l : *labels) {
                if (!l.is_object()) throw ParseError(line, "label must be an object");
                FrameLabel fl;
                fl.frame = records::require<std::string>(l, "frame", line);
                if (auto fe = l.find("fe"); fe != l.end() && !fe->is_null()) {
                    if (!fe->is_string()) throw ParseError(line, "\"fe\" must be a string");
                    fl.fe = fe->get<std::string>();
                }
                if (auto box = l.find("box"); box != l.end() && !box->is_null()) {
                    auto id = Id::from_json(*box);
                    if (!id) throw ParseError(line, "\"box\" must be an integer or string");
                    fl.box = id->str();
                }
                if (graph && !graph->find_by_name(fl.frame))
                    throw ReferenceError(fl.frame, "line " + std::to_string(line) + ": unknown frame " + fl.frame);
                out.push_back(std::move(fl));
            }
            r.payload = std::move(out);
        } else {
            if (rec.contains("labels")) throw ParseError(line, "caption setup record carries frame labels");
            r.payload = records::require<std::string>(rec, "text", line);
        }
        try {
            corpus.add(std::move(r), policy);
        } catch (const DuplicateError& e) {
            throw DuplicateError("line " + std::to_string(line) + ": " + e.what());
        }
    });
    return corpus;
}

inline records::json to_record(const AnnotationRecord& r) {
    records::json rec{{"id", r.id}, {"image", r.image}, {"setup", to_string(r.setup)}, {"lang", r.lang}};
    if (is_visual(r.setup)) {
        records::json labels = records::json::array();
        for (const auto& l : r.labels()) {
            records::json lj{{"frame", l.frame}};
            if (l.fe) lj["fe"] = *l.fe;
            if (l.box) lj["box"] = *l.box;
            labels.push_back(std::move(lj));
        }
        rec["labels"] = std::move(labels);
    } else {
        rec["text"] = r.text();
    }
    return rec;
}

inline void write_corpus(std::ostream& out, const Corpus& corpus) {
    for (const auto& r : corpus.records()) records::write(out, to_record(r));
}

// Caption records go through the disambiguator; visual records use their
// labels directly. An empty result is returned as-is and callers decide.
inline AnnotationFrames annotation_frames(const AnnotationRecord& record, const FrameGraph& g,
                                          const SpreadParams& params = {}, const RelatednessTable* table = nullptr) {
    if (!is_visual(record.setup)) return parse(record.text(), record.lang, g, params, table, record.id).annotation;
    AnnotationFrames out{record.id, {}};
    for (const auto& l : record.labels()) {
        auto h = g.find_by_name(l.frame);
        if (!h) throw ReferenceError(l.frame, "record " + record.id + ": unknown frame " + l.frame);
        out.evoked.insert(*h);
    }
    return out;
}

struct DescriptiveStats {
    Setup setup = Setup::ENO;
    std::size_t n = 0;
    double avg_frames = 0.0, stdev_frames = 0.0;
    double avg_lemmas = 0.0, stdev_lemmas = 0.0;
    double avg_ratio = 0.0, stdev_ratio = 0.0;
};

namespace detail {

// Mean and n-1 standard deviation; a single value has zero spread.
inline std::pair<double, double> mean_stdev(const std::vector<double>& xs) {
    double sum = 0.0;
    for (double x : xs) sum += x;
    const double mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / static_cast<double>(xs.size() - 1))};
}

}  // namespace detail

struct RecordCounts {
    std::size_t lemmas = 0;
    std::size_t frames = 0;  // frame-evoking lemmas

    double ratio() const { return lemmas == 0 ? 0.0 : static_cast<double>(frames) / static_cast<double>(lemmas); }
};

inline DescriptiveStats summarize_counts(Setup setup, const std::vector<RecordCounts>& counts) {
    if (counts.empty()) throw InvalidArgument("descriptive statistics: no records");
    std::vector<double> frames, lemmas, ratios;
    for (const auto& c : counts) {
        frames.push_back(static_cast<double>(c.frames));
        lemmas.push_back(static_cast<double>(c.lemmas));
        ratios.push_back(c.ratio());
    }
    DescriptiveStats s;
    s.setup = setup;
    s.n = counts.size();
    std::tie(s.avg_frames, s.stdev_frames) = detail::mean_stdev(frames);
    std::tie(s.avg_lemmas, s.stdev_lemmas) = detail::mean_stdev(lemmas);
    std::tie(s.avg_ratio, s.stdev_ratio) = detail::mean_stdev(ratios);
    return s;
}

// Frame and lemma counts for caption setups (one frame per evoking lemma).
inline DescriptiveStats descriptive_stats(const Corpus& corpus, Setup setup, const FrameGraph& g,
                                          const SpreadParams& params = {}, const RelatednessTable* table = nullptr) {
    if (is_visual(setup))
        throw InvalidArgument("descriptive statistics count lemmas and need a caption setup");
    const auto recs = corpus.in_setup(setup);
    if (recs.empty()) throw InvalidArgument("no records in setup " + std::string(to_string(setup)));
    std::vector<RecordCounts> counts;
    for (const auto* r : recs) {
        const auto result = parse(r->text(), r->lang, g, params, table, r->id);
        counts.push_back({result.lemma_count(), result.frame_lemma_count()});
    }
    return summarize_counts(setup, counts);
}

struct SimilarityPair {
    std::string image;
    double cosine = 0.0;
};

struct SimilaritySample {
    Setup setup_a = Setup::ENO;
    Setup setup_b = Setup::ENO;
    std::vector<SimilarityPair> pairs;            // ascending by image id
    std::vector<std::string> missing;             // images present in only one setup
    std::vector<std::string> empty;               // images where a side evoked no frames
    std::vector<std::pair<std::string, std::string>> failures;  // image id, message
    std::vector<std::string> warnings;

    std::vector<double> values() const {
        std::vector<double> v;
        for (const auto& p : pairs) v.push_back(p.cosine);
        return v;
    }
};

inline SimilaritySample pairwise_similarities(const Corpus& corpus, Setup a, Setup b, const FrameGraph& g,
                                              const RelatednessTable& table, const SpreadParams& params = {},
                                              unsigned threads = 0) {
    SimilaritySample sample;
    sample.setup_a = a;
    sample.setup_b = b;
    const auto images_a = corpus.images(a);
    const auto images_b = corpus.images(b);
    std::vector<std::string> both;
    std::set_intersection(images_a.begin(), images_a.end(), images_b.begin(), images_b.end(),
                          std::back_inserter(both));
    std::set_symmetric_difference(images_a.begin(), images_a.end(), images_b.begin(), images_b.end(),
                                  std::back_inserter(sample.missing));

    enum class Outcome { scored, empty, failed };
    struct Slot {
        Outcome outcome = Outcome::failed;
        double cosine = 0.0;
        std::string message;
    };
    std::vector<Slot> slots(both.size());
    parallel_for(
        both.size(),
        [&](std::size_t i) {
            auto& slot = slots[i];
            try {
                const auto fa = annotation_frames(*corpus.find(both[i], a), g, params, &table);
                const auto fb = annotation_frames(*corpus.find(both[i], b), g, params, &table);
                if (fa.empty() || fb.empty()) {
                    slot.outcome = Outcome::empty;
                    return;
                }
                slot.cosine = compare_annotations(fa, fb, table);
                slot.outcome = Outcome::scored;
            } catch (const Error& e) {
                slot.outcome = Outcome::failed;
                slot.message = e.what();
            }
        },
        threads);

    for (std::size_t i = 0; i < both.size(); ++i) {
        switch (slots[i].outcome) {
            case Outcome::scored: sample.pairs.push_back({both[i], slots[i].cosine}); break;
            case Outcome::empty: sample.empty.push_back(both[i]); break;
            case Outcome::failed: sample.failures.emplace_back(both[i], slots[i].message); break;
        }
    }
    if (both.empty())
        sample.warnings.push_back("no image has records in both " + std::string(to_string(a)) + " and " +
                                  std::string(to_string(b)));
    return sample;
}

struct HistogramBin {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
};

// Equal-width bins over [0,1]; bins are [lo,hi) except the last, which is closed.
inline std::vector<HistogramBin> histogram(const std::vector<double>& sample, std::size_t bins) {
    if (bins == 0) throw InvalidArgument("histogram: bins must be positive");
    if (sample.empty()) throw InvalidArgument("histogram: empty sample");
    std::vector<HistogramBin> out(bins);
    for (std::size_t i = 0; i < bins; ++i) {
        out[i].lo = static_cast<double>(i) / static_cast<double>(bins);
        out[i].hi = static_cast<double>(i + 1) / static_cast<double>(bins);
    }
    for (double x : sample) {
        if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("histogram: value outside [0,1]");
        auto k = static_cast<std::size_t>(std::floor(x * static_cast<double>(bins)));
        k = std::min(k, bins - 1);
        // Guard against x * bins rounding across a boundary.
        while (k > 0 && x < out[k].lo) --k;
        while (k + 1 < bins && x >= out[k + 1].lo) ++k;
        ++out[k].count;
    }
    return out;
}

// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline void write_similarity_csv(std::ostream& out, const SimilaritySample& s) {
    out << "image_id,setup_a,setup_b,cosine\n";
    for (const auto& p : s.pairs)
        out << p.image << ',' << to_string(s.setup_a) << ',' << to_string(s.setup_b) << ',' << format_double(p.cosine)
            << '\n';
}

inline SimilaritySample read_similarity_csv(std::istream& in) {
    SimilaritySample s;
    std::string line;
    std::size_t lineno = 0;
    bool first_row = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (lineno == 1 && line == "image_id,setup_a,setup_b,cosine") continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        if (cells.size() != 4) throw ParseError(lineno, "expected 4 CSV columns");
        auto sa = parse_setup(cells[1]);
        auto sb = parse_setup(cells[2]);
        if (!sa || !sb) throw ParseError(lineno, "unknown setup");
        if (first_row) {
            s.setup_a = *sa;
            s.setup_b = *sb;
            first_row = false;
        } else if (*sa != s.setup_a || *sb != s.setup_b) {
            throw ParseError(lineno, "mixed setup pairs in one sample");
        }
        double v = 0.0;
        const auto& c = cells[3];
        auto [ptr, ec] = std::from_chars(c.data(), c.data() + c.size(), v);
        if (ec != std::errc{} || ptr != c.data() + c.size()) throw ParseError(lineno, "bad cosine value");
        s.pairs.push_back({cells[0], v});
    }
    return s;
}

}  // namespace framesim
