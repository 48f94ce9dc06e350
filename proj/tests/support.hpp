#pragma once
// Shared fixtures and brute-force oracles for the test suites. Oracles here
// never call into the spreading or similarity code they check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "framesim/framesim.hpp"

namespace framesim::testing {

// Five frames: A <- B <- D (perspective_on), A <- C <- E.
inline const char* kG5 = R"({"kind":"frame","id":"A","name":"A","fes":[]}
{"kind":"frame","id":"B","name":"B","fes":[]}
{"kind":"frame","id":"C","name":"C","fes":[]}
{"kind":"frame","id":"D","name":"D","fes":[]}
{"kind":"frame","id":"E","name":"E","fes":[]}
{"kind":"relation","type":"inheritance","parent":"A","child":"B"}
{"kind":"relation","type":"inheritance","parent":"A","child":"C"}
{"kind":"relation","type":"perspective_on","parent":"B","child":"D"}
{"kind":"relation","type":"inheritance","parent":"C","child":"E"}
)";

// G5 plus an isolated frame X and a small English lexicon.
inline std::string g5_with_lexicon() {
    return std::string(kG5) + R"({"kind":"frame","id":"X","name":"X","fes":[]}
{"kind":"lu","id":1,"lemma":"bee","pos":"n","frame":"B","lang":"en"}
{"kind":"lu","id":2,"lemma":"dee","pos":"n","frame":"D","lang":"en"}
{"kind":"lu","id":3,"lemma":"dee","pos":"n","frame":"X","lang":"en"}
{"kind":"lu","id":4,"lemma":"cee","pos":"v","frame":"C","lang":"en"}
{"kind":"lu","id":5,"lemma":"ex","pos":"n","frame":"X","lang":"en"}
)";
}

inline const char* kCommerce = R"({"kind":"frame","id":1,"name":"Commerce_buy","fes":[{"name":"Buyer","core":true},{"name":"Goods","core":true},{"name":"Place","core":false}]}
{"kind":"frame","id":2,"name":"Getting","fes":[{"name":"Recipient","core":true}]}
{"kind":"frame","id":3,"name":"Commerce_goods-transfer","fes":[]}
{"kind":"frame","id":4,"name":"Relational_natural_features","fes":[]}
{"kind":"frame","id":5,"name":"Businesses","fes":[]}
{"kind":"frame","id":6,"name":"Isolated","fes":[]}
{"kind":"relation","type":"inheritance","parent":2,"child":1}
{"kind":"relation","type":"perspective_on","parent":3,"child":1}
{"kind":"lu","id":10,"lemma":"buy","pos":"v","frame":1,"lang":"en"}
{"kind":"lu","id":11,"lemma":"Purchase","pos":"n","frame":1,"lang":"en"}
{"kind":"lu","id":12,"lemma":"buyer","pos":"n","frame":1,"lang":"en"}
{"kind":"lu","id":13,"lemma":"bank","pos":"n","frame":4,"lang":"en"}
{"kind":"lu","id":14,"lemma":"bank","pos":"n","frame":5,"lang":"en"}
{"kind":"lu","id":15,"lemma":"comprar","pos":"v","frame":1,"lang":"pt"}
{"kind":"lu","id":16,"lemma":"street performer","pos":"n","frame":6,"lang":"en"}
)";

inline FrameGraph load(const std::string& text, LoadOptions options = {}) {
    return load_frame_database(std::string_view(text), options);
}

inline FrameHandle H(const FrameGraph& g, const char* id) { return g.handle(FrameId(id)); }

// ---------------------------------------------------------------------------
// Random acyclic graphs

struct RandomGraph {
    std::string text;
    std::size_t frames = 0;
    std::vector<std::tuple<RelationType, std::size_t, std::size_t>> edges;  // type, parent, child
};

// Acyclic by construction: parents always precede children in a hidden random order.
inline RandomGraph random_dag(std::mt19937_64& rng, std::size_t max_frames = 20, std::size_t max_edges = 40) {
    RandomGraph out;
    out.frames = std::uniform_int_distribution<std::size_t>(1, max_frames)(rng);
    std::vector<std::size_t> order(out.frames);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    std::ostringstream s;
    for (std::size_t i = 0; i < out.frames; ++i)
        s << R"({"kind":"frame","id":)" << i << R"(,"name":"F)" << i << R"("})" << '\n';
    if (out.frames >= 2) {
        const auto want = std::uniform_int_distribution<std::size_t>(0, max_edges)(rng);
        std::uniform_int_distribution<std::size_t> pick(0, out.frames - 1);
        std::uniform_int_distribution<std::size_t> type_pick(0, kAllRelationTypes.size() - 1);
        std::set<std::tuple<RelationType, std::size_t, std::size_t>> seen;
        for (std::size_t tries = 0; out.edges.size() < want && tries < want * 4; ++tries) {
            auto a = pick(rng), b = pick(rng);
            if (a == b) continue;
            if (a > b) std::swap(a, b);
            const auto type = kAllRelationTypes[type_pick(rng)];
            const auto parent = order[a], child = order[b];
            if (!seen.emplace(type, parent, child).second) continue;
            out.edges.emplace_back(type, parent, child);
            s << R"({"kind":"relation","type":")" << to_string(type) << R"(","parent":)" << parent
              << R"(,"child":)" << child << "}\n";
        }
    }
    out.text = s.str();
    return out;
}

// ---------------------------------------------------------------------------
// Oracles

// Unweighted shortest-path distances from `source` over raw edge triples.
inline std::vector<int> bfs_distances(std::size_t n,
                                      const std::vector<std::tuple<RelationType, std::size_t, std::size_t>>& edges,
                                      std::size_t source, Traversal traversal,
                                      const std::set<RelationType>& types) {
    std::vector<std::vector<std::size_t>> adj(n);
    for (const auto& [type, parent, child] : edges) {
        if (!types.contains(type)) continue;
        if (traversal != Traversal::children_only) adj[child].push_back(parent);
        if (traversal != Traversal::parents_only) adj[parent].push_back(child);
    }
    std::vector<int> dist(n, -1);
    std::deque<std::size_t> q{source};
    dist[source] = 0;
    while (!q.empty()) {
        auto v = q.front();
        q.pop_front();
        for (auto w : adj[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

// Dense activation vector by the distance law: max over seeds of e * decay^d.
// Unreached frames hold -1.
inline std::vector<double> distance_law(std::size_t n,
                                        const std::vector<std::tuple<RelationType, std::size_t, std::size_t>>& edges,
                                        const std::map<std::size_t, double>& seeds, const SpreadParams& p) {
    std::vector<double> act(n, -1.0);
    for (const auto& [s, e] : seeds) {
        const double energy = std::min(e, 1.0);
        const auto dist = bfs_distances(n, edges, s, p.traversal, p.relation_types);
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] < 0 || dist[v] > static_cast<int>(p.max_depth)) continue;
            act[v] = std::max(act[v], energy * std::pow(p.decay, dist[v]));
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        const bool seed = seeds.contains(v);
        if (!seed && act[v] >= 0.0 && act[v] < p.threshold) act[v] = -1.0;
    }
    return act;
}

// Full cosine pipeline from scratch: distances, decay powers, max-combine, explicit dot product.
inline double brute_force_similarity(std::size_t n,
                                     const std::vector<std::tuple<RelationType, std::size_t, std::size_t>>& edges,
                                     const std::set<std::size_t>& evoked1, const std::set<std::size_t>& evoked2,
                                     const SpreadParams& p) {
    auto vec = [&](const std::set<std::size_t>& evoked) {
        std::vector<double> v(n, 0.0);
        for (auto f : evoked) {
            const auto row = distance_law(n, edges, {{f, 1.0}}, p);
            for (std::size_t k = 0; k < n; ++k) v[k] = std::max(v[k], std::max(row[k], 0.0));
        }
        return v;
    };
    const auto a = vec(evoked1), b = vec(evoked2);
    double dot = 0, na = 0, nb = 0;
    for (std::size_t k = 0; k < n; ++k) {
        dot += a[k] * b[k];
        na += a[k] * a[k];
        nb += b[k] * b[k];
    }
    return dot / std::sqrt(na * nb);
}

// CDF of Student's t by adaptive Simpson integration of the density.
inline double t_density(double x, double df) {
    const double logc = std::lgamma((df + 1) / 2) - std::lgamma(df / 2) - 0.5 * std::log(df * M_PI);
    return std::exp(logc - (df + 1) / 2 * std::log1p(x * x / df));
}

inline double simpson(double a, double b, double df, double fa, double fm, double fb, double whole, double tol,
                      int depth) {
    const double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
    const double flm = t_density(lm, df), frm = t_density(rm, df);
    const double left = (m - a) / 6 * (fa + 4 * flm + fm);
    const double right = (b - m) / 6 * (fm + 4 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15 * tol)
        return left + right + (left + right - whole) / 15;
    return simpson(a, m, df, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson(m, b, df, fm, frm, fb, right, tol / 2, depth - 1);
}

inline double t_cdf_by_quadrature(double t, double df) {
    if (t == 0) return 0.5;
    const double a = 0, b = std::fabs(t);
    const double fa = t_density(a, df), fb = t_density(b, df), fm = t_density(b / 2, df);
    const double area = simpson(a, b, df, fa, fm, fb, b / 6 * (fa + 4 * fm + fb), 1e-13, 60);
    return t > 0 ? 0.5 + area : 0.5 - area;
}

}  // namespace framesim::testing
