#pragma once
// Frame database: frames, frame elements, lexical units and typed
// frame-to-frame relations.
//
// A FrameGraph is immutable once loaded. Frames are addressed internally by
// dense FrameHandle values assigned in ascending frame-id order, so sorting by
// handle and sorting by id agree everywhere.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "framesim/error.hpp"
#include "framesim/records.hpp"
#include "framesim/text.hpp"

namespace framesim {

// Identifier as written in a record file: an integer or an opaque string.
// Integers order numerically and sort before strings.
class Id {
public:
    Id() = default;
    Id(std::int64_t v) : value_(v) {}
    Id(std::string v) : value_(std::move(v)) {}
    Id(const char* v) : value_(std::string(v)) {}

    bool is_integer() const { return std::holds_alternative<std::int64_t>(value_); }

    std::string str() const {
        if (is_integer()) return std::to_string(std::get<std::int64_t>(value_));
        return std::get<std::string>(value_);
    }

    nlohmann::json to_json() const {
        if (is_integer()) return std::get<std::int64_t>(value_);
        return std::get<std::string>(value_);
    }

    static std::optional<Id> from_json(const nlohmann::json& j) {
        if (j.is_number_integer()) return Id(j.get<std::int64_t>());
        if (j.is_string()) return Id(j.get<std::string>());
        return std::nullopt;
    }

    friend auto operator<=>(const Id&, const Id&) = default;
    friend bool operator==(const Id&, const Id&) = default;

private:
    std::variant<std::int64_t, std::string> value_;
};

using FrameId = Id;

struct FrameHandle {
    std::uint32_t value = 0;

    friend auto operator<=>(FrameHandle, FrameHandle) = default;
};

enum class Coreness { core, non_core };

struct FrameElement {
    std::string name;
    Coreness coreness = Coreness::core;
};

struct Frame {
    FrameId id;
    std::string name;
    std::vector<FrameElement> frame_elements;
};

struct LexicalUnit {
    Id id;
    std::string lemma;  // case-folded
    std::string pos;
    FrameHandle frame;
    std::string lang;
};

enum class RelationType {
    inheritance,
    perspective_on,
    using_,
    subframe,
    precedes,
    see_also,
    inchoative_of,
    causative_of,
};

inline constexpr std::array<RelationType, 8> kAllRelationTypes = {
    RelationType::inheritance, RelationType::perspective_on, RelationType::using_,
    RelationType::subframe,    RelationType::precedes,       RelationType::see_also,
    RelationType::inchoative_of, RelationType::causative_of,
};

inline std::string_view to_string(RelationType t) {
    switch (t) {
        case RelationType::inheritance: return "inheritance";
        case RelationType::perspective_on: return "perspective_on";
        case RelationType::using_: return "using";
        case RelationType::subframe: return "subframe";
        case RelationType::precedes: return "precedes";
        case RelationType::see_also: return "see_also";
        case RelationType::inchoative_of: return "inchoative_of";
        case RelationType::causative_of: return "causative_of";
    }
    return "?";
}

inline std::optional<RelationType> parse_relation_type(std::string_view s) {
    for (auto t : kAllRelationTypes)
        if (to_string(t) == s) return t;
    return std::nullopt;
}

struct FrameRelation {
    RelationType type = RelationType::inheritance;
    FrameHandle parent;
    FrameHandle child;
};

struct LoadOptions {
    // When false, cycles, self-relations and duplicate relation triples are
    // kept in the graph so that validate() can report them.
    bool reject_structural = true;
};

class FrameGraph;
inline FrameGraph load_frame_database(std::istream& source, LoadOptions options = {});

class FrameGraph {
public:
    FrameGraph() = default;

    std::span<const Frame> frames() const { return frames_; }
    std::span<const LexicalUnit> lexical_units() const { return lexical_units_; }
    std::span<const FrameRelation> relations() const { return relations_; }
    std::size_t size() const { return frames_.size(); }

    const Frame& frame(FrameHandle h) const { return frames_.at(h.value); }
    const FrameId& id(FrameHandle h) const { return frame(h).id; }
    const std::string& name(FrameHandle h) const { return frame(h).name; }

    std::optional<FrameHandle> find(const FrameId& id) const {
        auto it = std::lower_bound(frames_.begin(), frames_.end(), id,
                                   [](const Frame& f, const FrameId& k) { return f.id < k; });
        if (it == frames_.end() || it->id != id) return std::nullopt;
        return FrameHandle{static_cast<std::uint32_t>(it - frames_.begin())};
    }

    std::optional<FrameHandle> find_by_name(std::string_view name) const {
        auto it = by_name_.find(std::string(name));
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    FrameHandle handle(const FrameId& id) const {
        auto h = find(id);
        if (!h) throw ReferenceError(id.str(), "unknown frame id " + id.str());
        return *h;
    }

    // Indexes into relations() where the frame is the child (edges to parents)
    // or the parent (edges to children).
    std::span<const std::size_t> parent_edges(FrameHandle h) const { return up_.at(h.value); }
    std::span<const std::size_t> child_edges(FrameHandle h) const { return down_.at(h.value); }

    // Indexes into lexical_units() for a case-folded (lemma, lang) key.
    std::span<const std::size_t> units_for(std::string_view lemma, std::string_view lang) const {
        auto it = by_lemma_.find({std::string(lemma), std::string(lang)});
        if (it == by_lemma_.end()) return {};
        return it->second;
    }

    bool has_language(std::string_view lang) const { return languages_.contains(std::string(lang)); }
    const std::set<std::string>& languages() const { return languages_; }

    // Longest lexical unit lemma for a language, in words.
    std::size_t max_lemma_words(std::string_view lang) const {
        auto it = max_words_.find(std::string(lang));
        return it == max_words_.end() ? 0 : it->second;
    }

    // All case-folded lemmas recorded for a language.
    std::vector<std::string_view> lemma_inventory(std::string_view lang) const {
        std::vector<std::string_view> out;
        for (const auto& [key, _] : by_lemma_)
            if (key.second == lang) out.push_back(key.first);
        return out;
    }

private:
    friend FrameGraph load_frame_database(std::istream&, LoadOptions);

    std::vector<Frame> frames_;  // sorted by id; index == handle
    std::vector<LexicalUnit> lexical_units_;
    std::vector<FrameRelation> relations_;
    std::vector<std::vector<std::size_t>> up_;
    std::vector<std::vector<std::size_t>> down_;
    std::map<std::string, FrameHandle, std::less<>> by_name_;
    std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> by_lemma_;
    std::set<std::string> languages_;
    std::map<std::string, std::size_t> max_words_;
};

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind {
    cycle,
    dangling_reference,
    duplicate_frame_id,
    duplicate_frame_name,
    duplicate_frame_element,
    duplicate_relation,
};

inline std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::cycle: return "cycle";
        case ViolationKind::dangling_reference: return "dangling_reference";
        case ViolationKind::duplicate_frame_id: return "duplicate_frame_id";
        case ViolationKind::duplicate_frame_name: return "duplicate_frame_name";
        case ViolationKind::duplicate_frame_element: return "duplicate_frame_element";
        case ViolationKind::duplicate_relation: return "duplicate_relation";
    }
    return "?";
}

struct Violation {
    ViolationKind kind;
    std::vector<FrameId> frames;  // cycle members in edge order, or the offending frame(s)
    std::string detail;

    std::string str() const {
        std::string s(to_string(kind));
        s += ":";
        for (std::size_t i = 0; i < frames.size(); ++i) s += (i ? "," : " ") + frames[i].str();
        if (!detail.empty()) s += " (" + detail + ")";
        return s;
    }
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
    std::size_t count(ViolationKind k) const {
        return static_cast<std::size_t>(std::count_if(
            violations.begin(), violations.end(), [k](const Violation& v) { return v.kind == k; }));
    }
};

namespace detail {

// One witness cycle per strongly connected component that contains a cycle,
// following parent -> child edges and starting at the smallest handle.
inline std::vector<std::vector<FrameHandle>> find_cycles(const FrameGraph& g) {
    const std::size_t n = g.size();
    std::vector<std::vector<std::uint32_t>> succ(n);
    for (const auto& r : g.relations()) {
        if (r.parent.value >= n || r.child.value >= n) continue;
        succ[r.parent.value].push_back(r.child.value);
    }
    for (auto& s : succ) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
    }

    // Iterative Tarjan.
    constexpr std::uint32_t kUnvisited = UINT32_MAX;
    std::vector<std::uint32_t> index(n, kUnvisited), low(n, 0), comp(n, kUnvisited);
    std::vector<bool> on_stack(n, false);
    std::vector<std::uint32_t> stack;
    std::uint32_t counter = 0, ncomp = 0;
    std::vector<std::vector<std::uint32_t>> components;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        std::vector<std::pair<std::uint32_t, std::size_t>> work{{root, 0}};
        while (!work.empty()) {
            auto& [v, next] = work.back();
            if (next == 0 && index[v] == kUnvisited) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = true;
            }
            if (next < succ[v].size()) {
                std::uint32_t w = succ[v][next++];
                if (index[w] == kUnvisited) {
                    work.emplace_back(w, 0);
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::uint32_t> members;
                std::uint32_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp[w] = ncomp;
                    members.push_back(w);
                } while (w != v);
                components.push_back(std::move(members));
                ++ncomp;
            }
            std::uint32_t done = v;
            work.pop_back();
            if (!work.empty()) {
                auto parent = work.back().first;
                low[parent] = std::min(low[parent], low[done]);
            }
        }
    }

    std::vector<std::vector<FrameHandle>> cycles;
    for (const auto& members : components) {
        const std::uint32_t start = *std::min_element(members.begin(), members.end());
        const bool self_loop =
            std::binary_search(succ[start].begin(), succ[start].end(), start);
        if (members.size() == 1 && !self_loop) continue;
        if (self_loop) {
            cycles.push_back({FrameHandle{start}});
            continue;
        }
        // BFS inside the component for the shortest way back to start.
        const std::uint32_t c = comp[start];
        std::unordered_map<std::uint32_t, std::uint32_t> prev;
        std::vector<std::uint32_t> frontier{start};
        std::optional<std::uint32_t> closing;
        while (!frontier.empty() && !closing) {
            std::vector<std::uint32_t> next_frontier;
            for (auto v : frontier) {
                for (auto w : succ[v]) {
                    if (comp[w] != c) continue;
                    if (w == start) {
                        closing = v;
                        break;
                    }
                    if (prev.emplace(w, v).second) next_frontier.push_back(w);
                }
                if (closing) break;
            }
            frontier = std::move(next_frontier);
        }
        std::vector<FrameHandle> cycle;
        for (std::uint32_t v = *closing; v != start; v = prev.at(v)) cycle.push_back(FrameHandle{v});
        cycle.push_back(FrameHandle{start});
        std::reverse(cycle.begin(), cycle.end());
        cycles.push_back(std::move(cycle));
    }
    std::sort(cycles.begin(), cycles.end());
    return cycles;
}

}  // namespace detail

inline ValidationReport validate(const FrameGraph& g) {
    ValidationReport report;
    const auto frames = g.frames();

    std::map<std::string, std::size_t> names;
    for (std::size_t i = 0; i < frames.size(); ++i) {
        if (i > 0 && frames[i - 1].id == frames[i].id)
            report.violations.push_back({ViolationKind::duplicate_frame_id, {frames[i].id}, {}});
        if (!names.emplace(frames[i].name, i).second)
            report.violations.push_back(
                {ViolationKind::duplicate_frame_name, {frames[i].id}, frames[i].name});
        std::set<std::string> fe_names;
        for (const auto& fe : frames[i].frame_elements)
            if (!fe_names.insert(fe.name).second)
                report.violations.push_back(
                    {ViolationKind::duplicate_frame_element, {frames[i].id}, fe.name});
    }

    for (const auto& lu : g.lexical_units())
        if (lu.frame.value >= frames.size())
            report.violations.push_back(
                {ViolationKind::dangling_reference, {}, "lexical unit " + lu.id.str()});

    std::set<std::tuple<RelationType, FrameHandle, FrameHandle>> seen;
    for (const auto& r : g.relations()) {
        if (r.parent.value >= frames.size() || r.child.value >= frames.size()) {
            report.violations.push_back(
                {ViolationKind::dangling_reference, {}, std::string(to_string(r.type)) + " relation"});
            continue;
        }
        if (!seen.emplace(r.type, r.parent, r.child).second)
            report.violations.push_back({ViolationKind::duplicate_relation,
                                         {g.id(r.parent), g.id(r.child)},
                                         std::string(to_string(r.type))});
    }

    for (const auto& cycle : detail::find_cycles(g)) {
        Violation v{ViolationKind::cycle, {}, {}};
        for (auto h : cycle) v.frames.push_back(g.id(h));
        report.violations.push_back(std::move(v));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Loading

inline FrameGraph load_frame_database(std::istream& source, LoadOptions options) {
    using records::json;

    struct RawUnit {
        Id id;
        std::string lemma, pos, lang;
        Id frame;
        std::size_t line;
    };
    struct RawRelation {
        RelationType type;
        Id parent, child;
        std::size_t line;
    };
    std::vector<std::pair<Frame, std::size_t>> raw_frames;
    std::vector<RawUnit> raw_units;
    std::vector<RawRelation> raw_relations;

    auto read_id = [](const json& rec, const char* key, std::size_t line) {
        auto it = rec.find(key);
        if (it == rec.end()) throw ParseError(line, std::string("missing field \"") + key + "\"");
        auto id = Id::from_json(*it);
        if (!id) throw ParseError(line, std::string("field \"") + key + "\" must be an integer or string");
        return *id;
    };

    records::for_each(source, [&](const json& rec, std::size_t line) {
        const auto kind = records::require<std::string>(rec, "kind", line);
        if (kind == "frame") {
            Frame f;
            f.id = read_id(rec, "id", line);
            f.name = records::require<std::string>(rec, "name", line);
            if (f.name.empty()) throw ParseError(line, "empty frame name");
            if (auto fes = rec.find("fes"); fes != rec.end()) {
                if (!fes->is_array()) throw ParseError(line, "\"fes\" must be an array");
                for (const auto& fe : *fes) {
                    if (!fe.is_object()) throw ParseError(line, "frame element must be an object");
                    FrameElement el;
                    el.name = records::require<std::string>(fe, "name", line);
                    el.coreness = records::require<bool>(fe, "core", line) ? Coreness::core
                                                                           : Coreness::non_core;
                    f.frame_elements.push_back(std::move(el));
                }
            }
            raw_frames.emplace_back(std::move(f), line);
        } else if (kind == "lu") {
            RawUnit u;
            u.id = read_id(rec, "id", line);
            u.lemma = text::normalize_lemma(records::require<std::string>(rec, "lemma", line));
            if (u.lemma.empty()) throw ParseError(line, "empty lemma");
            u.pos = records::require<std::string>(rec, "pos", line);
            u.lang = records::require<std::string>(rec, "lang", line);
            u.frame = read_id(rec, "frame", line);
            u.line = line;
            raw_units.push_back(std::move(u));
        } else if (kind == "relation") {
            const auto type_name = records::require<std::string>(rec, "type", line);
            auto type = parse_relation_type(type_name);
            if (!type) throw ParseError(line, "unknown relation type \"" + type_name + "\"");
            raw_relations.push_back(
                {*type, read_id(rec, "parent", line), read_id(rec, "child", line), line});
        } else {
            throw ParseError(line, "unknown record kind \"" + kind + "\"");
        }
    });

    FrameGraph g;
    std::stable_sort(raw_frames.begin(), raw_frames.end(),
                     [](const auto& a, const auto& b) { return a.first.id < b.first.id; });
    for (std::size_t i = 0; i < raw_frames.size(); ++i) {
        const auto& [f, line] = raw_frames[i];
        if (i > 0 && raw_frames[i - 1].first.id == f.id)
            throw DuplicateError("line " + std::to_string(line) + ": duplicate frame id " + f.id.str());
        const FrameHandle h{static_cast<std::uint32_t>(i)};
        if (!g.by_name_.emplace(f.name, h).second)
            throw DuplicateError("line " + std::to_string(line) + ": duplicate frame name " + f.name);
        std::set<std::string> fe_names;
        for (const auto& fe : f.frame_elements)
            if (!fe_names.insert(fe.name).second)
                throw DuplicateError("line " + std::to_string(line) + ": duplicate frame element " +
                                     fe.name + " in frame " + f.name);
        g.frames_.push_back(f);
    }
    g.up_.resize(g.frames_.size());
    g.down_.resize(g.frames_.size());

    auto resolve = [&](const Id& id, std::size_t line) {
        auto h = g.find(id);
        if (!h)
            throw ReferenceError(id.str(), "line " + std::to_string(line) +
                                               ": reference to unknown frame id " + id.str());
        return *h;
    };

    std::set<Id> unit_ids;
    for (auto& u : raw_units) {
        if (!unit_ids.insert(u.id).second)
            throw DuplicateError("line " + std::to_string(u.line) + ": duplicate lexical unit id " +
                                 u.id.str());
        LexicalUnit lu{u.id, std::move(u.lemma), std::move(u.pos), resolve(u.frame, u.line),
                       std::move(u.lang)};
        const std::size_t idx = g.lexical_units_.size();
        g.by_lemma_[{lu.lemma, lu.lang}].push_back(idx);
        g.languages_.insert(lu.lang);
        auto& words = g.max_words_[lu.lang];
        words = std::max<std::size_t>(
            words, 1 + static_cast<std::size_t>(std::count(lu.lemma.begin(), lu.lemma.end(), ' ')));
        g.lexical_units_.push_back(std::move(lu));
    }

    std::set<std::tuple<RelationType, FrameHandle, FrameHandle>> triples;
    for (const auto& r : raw_relations) {
        FrameRelation rel{r.type, resolve(r.parent, r.line), resolve(r.child, r.line)};
        if (options.reject_structural) {
            if (rel.parent == rel.child)
                throw ValidationError("line " + std::to_string(r.line) + ": frame " +
                                      r.parent.str() + " related to itself");
            if (!triples.emplace(rel.type, rel.parent, rel.child).second)
                throw DuplicateError("line " + std::to_string(r.line) + ": duplicate " +
                                     std::string(to_string(rel.type)) + " relation " +
                                     r.parent.str() + " -> " + r.child.str());
        }
        const std::size_t idx = g.relations_.size();
        g.down_[rel.parent.value].push_back(idx);
        g.up_[rel.child.value].push_back(idx);
        g.relations_.push_back(rel);
    }

    if (options.reject_structural) {
        auto cycles = detail::find_cycles(g);
        if (!cycles.empty()) {
            std::string msg = "frame relations contain a cycle:";
            for (auto h : cycles.front()) msg += " " + g.id(h).str();
            throw ValidationError(msg);
        }
    }
    return g;
}

inline FrameGraph load_frame_database(std::string_view text, LoadOptions options = {}) {
    std::istringstream in{std::string(text)};
    return load_frame_database(in, options);
}

// ---------------------------------------------------------------------------
// Queries

struct LemmaMatch {
    const LexicalUnit* unit;
    FrameHandle frame;
};

// Matches sorted by (frame name, lexical unit id).
inline std::vector<LemmaMatch> lookup_lemma(const FrameGraph& g, std::string_view lemma,
                                            std::string_view lang,
                                            std::optional<std::string_view> pos = std::nullopt) {
    const auto key = text::normalize_lemma(lemma);
    if (key.empty()) throw InvalidArgument("lookup_lemma: empty lemma");
    std::vector<LemmaMatch> out;
    for (auto idx : g.units_for(key, lang)) {
        const auto& lu = g.lexical_units()[idx];
        if (pos && lu.pos != *pos) continue;
        out.push_back({&lu, lu.frame});
    }
    std::sort(out.begin(), out.end(), [&](const LemmaMatch& a, const LemmaMatch& b) {
        return std::tie(g.name(a.frame), a.unit->id) < std::tie(g.name(b.frame), b.unit->id);
    });
    return out;
}

enum class Direction { parents, children, both };
enum class Side { parent, child };

inline std::string_view to_string(Side s) { return s == Side::parent ? "parent" : "child"; }

struct Neighbor {
    FrameHandle frame;
    RelationType type;
    Side side;  // which role the neighbour plays in the relation

    friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Neighbours sorted by (name, relation type, side).
inline std::vector<Neighbor> related(const FrameGraph& g, FrameHandle h,
                                     const std::optional<std::set<RelationType>>& filter = std::nullopt,
                                     Direction direction = Direction::both) {
    if (h.value >= g.size()) throw InvalidArgument("related: unknown frame handle");
    std::vector<Neighbor> out;
    auto keep = [&](RelationType t) { return !filter || filter->contains(t); };
    if (direction != Direction::children)
        for (auto idx : g.parent_edges(h)) {
            const auto& r = g.relations()[idx];
            if (keep(r.type)) out.push_back({r.parent, r.type, Side::parent});
        }
    if (direction != Direction::parents)
        for (auto idx : g.child_edges(h)) {
            const auto& r = g.relations()[idx];
            if (keep(r.type)) out.push_back({r.child, r.type, Side::child});
        }
    std::sort(out.begin(), out.end(), [&](const Neighbor& a, const Neighbor& b) {
        return std::tie(g.name(a.frame), a.type, a.side) < std::tie(g.name(b.frame), b.type, b.side);
    });
    return out;
}

inline std::vector<Neighbor> related(const FrameGraph& g, const FrameId& id,
                                     const std::optional<std::set<RelationType>>& filter = std::nullopt,
                                     Direction direction = Direction::both) {
    return related(g, g.handle(id), filter, direction);
}

}  // namespace framesim
