#pragma once
// Spread activation over the frame graph and the per-frame relatedness table
// built from it.
//
// Activation of a frame n reached from seed s is
//
//     energy(s) * max_k ( P_k(s, n) * decay^k ),   0 <= k <= max_depth
//
// where P_k is the best product of relation weights over walks of exactly k
// edges. With uniform weights this collapses to energy(s) * decay^dist(s, n).
// Seeds combine by max. There is no post-adjustment stage.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "framesim/error.hpp"
#include "framesim/fn_graph.hpp"
#include "framesim/parallel.hpp"
#include "framesim/records.hpp"

namespace framesim {

enum class Traversal { undirected, parents_only, children_only };

inline std::string_view to_string(Traversal t) {
    switch (t) {
        case Traversal::undirected: return "undirected";
        case Traversal::parents_only: return "parents_only";
        case Traversal::children_only: return "children_only";
    }
    return "?";
}

inline std::optional<Traversal> parse_traversal(std::string_view s) {
    for (auto t : {Traversal::undirected, Traversal::parents_only, Traversal::children_only})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

struct SpreadParams {
    double decay = 0.5;
    std::uint32_t max_depth = 4;
    double threshold = 0.05;
    std::set<RelationType> relation_types{kAllRelationTypes.begin(), kAllRelationTypes.end()};
    std::map<RelationType, double> relation_weights;  // missing types weigh 1.0
    Traversal traversal = Traversal::undirected;

    double weight(RelationType t) const {
        auto it = relation_weights.find(t);
        return it == relation_weights.end() ? 1.0 : it->second;
    }

    void check() const {
        if (!(decay > 0.0 && decay < 1.0)) throw InvalidArgument("decay must lie in (0,1)");
        if (!(threshold >= 0.0 && threshold < 1.0))
            throw InvalidArgument("threshold must lie in [0,1)");
        for (const auto& [type, w] : relation_weights)
            if (!(w > 0.0 && w <= 1.0))
                throw InvalidArgument("weight for " + std::string(to_string(type)) +
                                      " must lie in (0,1]");
    }

    friend bool operator==(const SpreadParams&, const SpreadParams&) = default;
};

using Activation = std::pair<FrameHandle, double>;
using Seeds = std::map<FrameHandle, double>;

struct ActivationMap {
    std::vector<Activation> entries;  // ascending by handle
    SpreadParams params;
    Seeds seeds;

    // 0.0 for frames not present.
    double at(FrameHandle h) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), h,
                                   [](const Activation& a, FrameHandle k) { return a.first < k; });
        return (it != entries.end() && it->first == h) ? it->second : 0.0;
    }

    bool contains(FrameHandle h) const {
        return std::binary_search(entries.begin(), entries.end(), Activation{h, 0.0},
                                  [](const Activation& a, const Activation& b) { return a.first < b.first; });
    }

    std::size_t size() const { return entries.size(); }
};

// Clamps energies above 1 to 1. Negative energies are rejected.
inline Seeds pre_adjust(const Seeds& seeds) {
    Seeds out;
    for (const auto& [frame, energy] : seeds) {
        if (!(energy >= 0.0)) throw InvalidArgument("seed energy must be non-negative");
        out.emplace(frame, std::min(energy, 1.0));
    }
    return out;
}

namespace detail {

struct Arc {
    std::uint32_t to;
    double weight;
};

// Adjacency restricted to the participating relation types and oriented by
// the traversal mode.
inline std::vector<std::vector<Arc>> spread_adjacency(const FrameGraph& g, const SpreadParams& p) {
    std::vector<std::vector<Arc>> adj(g.size());
    for (const auto& r : g.relations()) {
        if (!p.relation_types.contains(r.type)) continue;
        const double w = p.weight(r.type);
        if (p.traversal != Traversal::children_only) adj[r.child.value].push_back({r.parent.value, w});
        if (p.traversal != Traversal::parents_only) adj[r.parent.value].push_back({r.child.value, w});
    }
    return adj;
}

inline ActivationMap spread_with(const std::vector<std::vector<Arc>>& adj, const Seeds& raw_seeds,
                                 const SpreadParams& params) {
    const std::size_t n = adj.size();
    if (raw_seeds.empty()) throw InvalidArgument("spread: empty seed set");
    for (const auto& [h, _] : raw_seeds)
        if (h.value >= n) throw InvalidArgument("spread: unknown seed frame");
    params.check();
    const Seeds seeds = pre_adjust(raw_seeds);

    constexpr double kUnreached = -1.0;
    std::vector<double> best(n, kUnreached);
    std::vector<double> walk(n), next(n);
    std::vector<std::uint32_t> frontier, next_frontier;

    double min_seed_energy = 1.0;
    for (const auto& [_, energy] : seeds) min_seed_energy = std::min(min_seed_energy, energy);

    for (const auto& [seed, energy] : seeds) {
        best[seed.value] = std::max(best[seed.value], energy);
        std::fill(walk.begin(), walk.end(), kUnreached);
        walk[seed.value] = 1.0;
        frontier.assign({seed.value});
        for (std::uint32_t k = 1; k <= params.max_depth && !frontier.empty(); ++k) {
            const double scale = std::pow(params.decay, static_cast<double>(k));
            // Contributions from here on are below threshold and cannot raise a
            // seed above its own energy, so they cannot change the output.
            if (energy * scale < params.threshold && energy * scale <= min_seed_energy) break;
            std::fill(next.begin(), next.end(), kUnreached);
            next_frontier.clear();
            for (auto v : frontier) {
                for (const auto& arc : adj[v]) {
                    const double product = walk[v] * arc.weight;
                    if (next[arc.to] == kUnreached) next_frontier.push_back(arc.to);
                    next[arc.to] = std::max(next[arc.to], product);
                }
            }
            for (auto v : next_frontier) best[v] = std::max(best[v], energy * next[v] * scale);
            std::swap(walk, next);
            std::swap(frontier, next_frontier);
        }
    }

    ActivationMap out;
    out.params = params;
    out.seeds = seeds;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (best[v] == kUnreached) continue;
        const bool is_seed = seeds.contains(FrameHandle{v});
        if (!is_seed && best[v] < params.threshold) continue;
        out.entries.emplace_back(FrameHandle{v}, best[v]);
    }
    return out;
}

}  // namespace detail

inline ActivationMap spread(const FrameGraph& g, const Seeds& seeds, const SpreadParams& params = {}) {
    params.check();
    return detail::spread_with(detail::spread_adjacency(g, params), seeds, params);
}

// Per-frame relatedness rows, each the spread from a single seed at energy 1.
class RelatednessTable {
public:
    RelatednessTable() = default;
    explicit RelatednessTable(SpreadParams params) : params_(std::move(params)) {}

    const SpreadParams& params() const { return params_; }
    const std::map<FrameHandle, ActivationMap>& rows() const { return rows_; }

    const ActivationMap* row(FrameHandle h) const {
        auto it = rows_.find(h);
        return it == rows_.end() ? nullptr : &it->second;
    }

    // relatedness(from, to): activation of `to` in the row of `from`.
    double relatedness(FrameHandle from, FrameHandle to) const {
        const auto* r = row(from);
        if (!r) throw InvalidArgument("relatedness table has no row for the requested frame");
        return r->at(to);
    }

    void insert(FrameHandle h, ActivationMap row) { rows_.insert_or_assign(h, std::move(row)); }

private:
    SpreadParams params_;
    std::map<FrameHandle, ActivationMap> rows_;
};

// Rows for `frames` (all frames when omitted). Rows may be computed on several
// threads; the result does not depend on scheduling.
inline RelatednessTable build_relatedness_table(const FrameGraph& g, const SpreadParams& params = {},
                                                std::optional<std::vector<FrameHandle>> frames = std::nullopt,
                                                unsigned threads = 0) {
    params.check();
    std::vector<FrameHandle> wanted;
    if (frames) {
        wanted = *frames;
        for (auto h : wanted)
            if (h.value >= g.size()) throw InvalidArgument("relatedness table: unknown frame");
        std::sort(wanted.begin(), wanted.end());
        wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());
    } else {
        for (std::uint32_t v = 0; v < g.size(); ++v) wanted.push_back(FrameHandle{v});
    }

    const auto adj = detail::spread_adjacency(g, params);
    std::vector<ActivationMap> rows(wanted.size());
    parallel_for(
        wanted.size(), [&](std::size_t i) { rows[i] = detail::spread_with(adj, {{wanted[i], 1.0}}, params); },
        threads);

    RelatednessTable table(params);
    for (std::size_t i = 0; i < wanted.size(); ++i) table.insert(wanted[i], std::move(rows[i]));
    return table;
}

// {"frame":<id>,"related":[[<id>,<activation>],...]} per row, rows and entries
// in ascending frame-id order.
inline void write_table(std::ostream& out, const RelatednessTable& table, const FrameGraph& g) {
    for (const auto& [frame, row] : table.rows()) {
        records::json related = records::json::array();
        for (const auto& [h, value] : row.entries) related.push_back({g.id(h).to_json(), value});
        records::write(out, {{"frame", g.id(frame).to_json()}, {"related", std::move(related)}});
    }
}

inline RelatednessTable read_table(std::istream& in, const FrameGraph& g, const SpreadParams& params = {}) {
    RelatednessTable table(params);
    records::for_each(in, [&](const records::json& rec, std::size_t line) {
        auto frame_field = rec.find("frame");
        auto related = rec.find("related");
        if (frame_field == rec.end() || related == rec.end() || !related->is_array())
            throw ParseError(line, "table row needs \"frame\" and \"related\" fields");
        auto id = Id::from_json(*frame_field);
        if (!id) throw ParseError(line, "bad frame id");
        auto h = g.find(*id);
        if (!h) throw ReferenceError(id->str(), "line " + std::to_string(line) + ": unknown frame id " + id->str());
        if (table.row(*h)) throw DuplicateError("line " + std::to_string(line) + ": duplicate row " + id->str());

        ActivationMap row;
        row.params = params;
        row.seeds = {{*h, 1.0}};
        for (const auto& pair : *related) {
            if (!pair.is_array() || pair.size() != 2 || !pair[1].is_number())
                throw ParseError(line, "related entry must be [frame id, activation]");
            auto rid = Id::from_json(pair[0]);
            if (!rid) throw ParseError(line, "bad related frame id");
            auto rh = g.find(*rid);
            if (!rh) throw ReferenceError(rid->str(), "line " + std::to_string(line) + ": unknown frame id " + rid->str());
            const double v = pair[1].get<double>();
            if (!(v >= 0.0 && v <= 1.0)) throw ParseError(line, "activation outside [0,1]");
            row.entries.emplace_back(*rh, v);
        }
        std::sort(row.entries.begin(), row.entries.end(),
                  [](const Activation& a, const Activation& b) { return a.first < b.first; });
        for (std::size_t i = 1; i < row.entries.size(); ++i)
            if (row.entries[i - 1].first == row.entries[i].first)
                throw ParseError(line, "repeated related frame");
        if (row.at(*h) != 1.0) throw ParseError(line, "row must relate its own frame at 1.0");
        table.insert(*h, std::move(row));
    });
    return table;
}

}  // namespace framesim
