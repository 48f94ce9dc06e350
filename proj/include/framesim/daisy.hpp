#pragma once
// Caption-to-frames disambiguation.
//
// Text is split into words, matched greedily against the lexical-unit lemma
// inventory (longest multiword match first), and every frame-evoking lemma is
// assigned exactly one of its candidate frames. A candidate's score is 1.0 for
// its own lemma plus, for every other token in the sentence, the strongest
// relatedness between one of that token's candidates and the candidate frame.
// The highest score wins; ties go to the frame whose name sorts first.

#include <algorithm>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "framesim/activation.hpp"
#include "framesim/error.hpp"
#include "framesim/fn_graph.hpp"
#include "framesim/records.hpp"
#include "framesim/similarity.hpp"
#include "framesim/text.hpp"

namespace framesim {

// Maps a case-folded word to candidate lemma forms, most preferred first.
class Lemmatizer {
public:
    virtual ~Lemmatizer() = default;
    virtual std::vector<std::string> forms(std::string_view word, std::string_view lang) const = 0;
};

// Identity, then plural stripping: "-s" / "-es" for English, "-s" for Portuguese.
class SuffixLemmatizer final : public Lemmatizer {
public:
    std::vector<std::string> forms(std::string_view word, std::string_view lang) const override {
        std::vector<std::string> out{std::string(word)};
        auto strip = [&](std::string_view suffix) {
            if (word.size() > suffix.size() + 1 && word.ends_with(suffix))
                out.emplace_back(word.substr(0, word.size() - suffix.size()));
        };
        if (lang == "en") {
            strip("s");
            strip("es");
        } else if (lang == "pt") {
            strip("s");
        }
        return out;
    }
};

inline const Lemmatizer& default_lemmatizer() {
    static const SuffixLemmatizer instance;
    return instance;
}

struct LemmaToken {
    std::string surface;
    std::string lemma;
    std::size_t begin = 0;  // word index range [begin, end)
    std::size_t end = 0;

    friend bool operator==(const LemmaToken&, const LemmaToken&) = default;
};

struct Candidate {
    const LexicalUnit* unit;
    FrameHandle frame;
};

struct CandidateSet {
    LemmaToken token;
    std::vector<Candidate> candidates;  // one per frame, ascending by frame name
};

struct FrameAssignment {
    LemmaToken token;
    FrameHandle frame;
    double score = 0.0;
};

inline std::vector<LemmaToken> lemmatize(std::string_view source, std::string_view lang, const FrameGraph& g,
                                         const Lemmatizer& lemmatizer = default_lemmatizer()) {
    if (source.empty()) throw InvalidArgument("lemmatize: empty text");
    if (!g.has_language(lang)) throw InvalidArgument("unsupported language \"" + std::string(lang) + "\"");

    const auto words = text::split_words(source);
    std::vector<std::string> folded;
    folded.reserve(words.size());
    for (const auto& w : words) folded.push_back(text::fold_case(w.surface));

    auto known = [&](const std::string& lemma) { return !g.units_for(lemma, lang).empty(); };
    auto single_lemma = [&](const std::string& word) -> std::optional<std::string> {
        for (auto& form : lemmatizer.forms(word, lang))
            if (known(form)) return form;
        return std::nullopt;
    };

    const std::size_t max_words = g.max_lemma_words(lang);
    std::vector<LemmaToken> tokens;
    std::size_t i = 0;
    while (i < words.size()) {
        std::size_t matched_len = 0;
        std::string lemma;
        for (std::size_t len = std::min(max_words, words.size() - i); len >= 2; --len) {
            std::string head;
            for (std::size_t k = i; k + 1 < i + len; ++k) head += folded[k] + " ";
            for (auto& last : lemmatizer.forms(folded[i + len - 1], lang)) {
                if (known(head + last)) {
                    lemma = head + last;
                    break;
                }
            }
            if (!lemma.empty()) {
                matched_len = len;
                break;
            }
        }
        if (matched_len == 0) {
            matched_len = 1;
            lemma = single_lemma(folded[i]).value_or(folded[i]);
        }
        const auto& first = words[i];
        const auto& last = words[i + matched_len - 1];
        const std::size_t stop = last.offset + last.surface.size();
        tokens.push_back({std::string(source.substr(first.offset, stop - first.offset)), std::move(lemma), i,
                          i + matched_len});
        i += matched_len;
    }
    return tokens;
}

inline std::vector<CandidateSet> candidates(const std::vector<LemmaToken>& tokens, const FrameGraph& g,
                                            std::string_view lang) {
    std::vector<CandidateSet> out;
    for (const auto& token : tokens) {
        const auto matches = g.units_for(token.lemma, lang);
        if (matches.empty()) continue;
        CandidateSet set{token, {}};
        for (auto idx : matches) {
            const auto& lu = g.lexical_units()[idx];
            set.candidates.push_back({&lu, lu.frame});
        }
        std::sort(set.candidates.begin(), set.candidates.end(), [&](const Candidate& a, const Candidate& b) {
            if (g.name(a.frame) != g.name(b.frame)) return g.name(a.frame) < g.name(b.frame);
            return a.unit->id < b.unit->id;
        });
        set.candidates.erase(std::unique(set.candidates.begin(), set.candidates.end(),
                                         [](const Candidate& a, const Candidate& b) { return a.frame == b.frame; }),
                             set.candidates.end());
        out.push_back(std::move(set));
    }
    return out;
}

// `table` must hold a row for every candidate frame.
inline std::vector<FrameAssignment> disambiguate(const std::vector<CandidateSet>& sets,
                                                 const RelatednessTable& table) {
    if (sets.empty()) throw InvalidArgument("disambiguate: no candidate sets");
    std::vector<FrameAssignment> out;
    out.reserve(sets.size());
    for (std::size_t t = 0; t < sets.size(); ++t) {
        const Candidate* chosen = nullptr;
        double best = -1.0;
        for (const auto& cand : sets[t].candidates) {
            double score = 1.0;
            for (std::size_t other = 0; other < sets.size(); ++other) {
                if (other == t) continue;
                double support = 0.0;
                for (const auto& ctx : sets[other].candidates)
                    support = std::max(support, table.relatedness(ctx.frame, cand.frame));
                score += support;
            }
            // Candidates are sorted by frame name, so strict > keeps the first on ties.
            if (score > best) {
                best = score;
                chosen = &cand;
            }
        }
        out.push_back({sets[t].token, chosen->frame, best});
    }
    return out;
}

inline std::vector<FrameAssignment> disambiguate(const std::vector<CandidateSet>& sets, const FrameGraph& g,
                                                 const SpreadParams& params) {
    std::vector<FrameHandle> frames;
    for (const auto& set : sets)
        for (const auto& c : set.candidates) frames.push_back(c.frame);
    return disambiguate(sets, build_relatedness_table(g, params, frames, 1));
}

struct ParseResult {
    AnnotationFrames annotation;
    std::vector<LemmaToken> tokens;
    std::vector<CandidateSet> candidate_sets;
    std::vector<FrameAssignment> assignments;

    std::size_t lemma_count() const { return tokens.size(); }
    std::size_t frame_lemma_count() const { return assignments.size(); }
};

// Uses `table` for context support when given (it must cover all frames the
// captions can evoke); otherwise computes rows for the candidate frames.
inline ParseResult parse(std::string_view source, std::string_view lang, const FrameGraph& g,
                         const SpreadParams& params = {}, const RelatednessTable* table = nullptr,
                         std::string annotation_id = {}, const Lemmatizer& lemmatizer = default_lemmatizer()) {
    ParseResult result;
    result.annotation.annotation_id = std::move(annotation_id);
    result.tokens = lemmatize(source, lang, g, lemmatizer);
    result.candidate_sets = candidates(result.tokens, g, lang);
    if (result.candidate_sets.empty()) return result;
    result.assignments =
        table ? disambiguate(result.candidate_sets, *table) : disambiguate(result.candidate_sets, g, params);
    for (const auto& a : result.assignments) result.annotation.evoked.insert(a.frame);
    return result;
}

// One audit record per token; non-evoking tokens carry "chosen": null.
inline std::vector<records::json> trace_records(const std::string& caption_id, const ParseResult& result,
                                                const FrameGraph& g) {
    std::vector<records::json> out;
    std::size_t next_set = 0;
    for (const auto& token : result.tokens) {
        records::json rec{{"caption", caption_id}, {"token", token.surface}, {"lemma", token.lemma}};
        records::json cands = records::json::array();
        if (next_set < result.candidate_sets.size() && result.candidate_sets[next_set].token == token) {
            for (const auto& c : result.candidate_sets[next_set].candidates) cands.push_back(g.id(c.frame).to_json());
            const auto& a = result.assignments[next_set];
            rec["candidates"] = std::move(cands);
            rec["chosen"] = g.id(a.frame).to_json();
            rec["score"] = a.score;
            ++next_set;
        } else {
            rec["candidates"] = std::move(cands);
            rec["chosen"] = nullptr;
            rec["score"] = nullptr;
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace framesim
