#pragma once
// Associative arrays and cosine similarity between annotations.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "framesim/activation.hpp"
#include "framesim/error.hpp"
#include "framesim/fn_graph.hpp"
#include "framesim/records.hpp"

namespace framesim {

struct AnnotationFrames {
    std::string annotation_id;
    std::set<FrameHandle> evoked;

    bool empty() const { return evoked.empty(); }
};

// Sparse frame-indexed activation vector. `index` is strictly ascending.
struct AssociativeArray {
    std::vector<FrameHandle> index;
    std::vector<double> values;

    std::size_t size() const { return index.size(); }
    bool empty() const { return index.empty(); }

    double at(FrameHandle h) const {
        auto it = std::lower_bound(index.begin(), index.end(), h);
        if (it == index.end() || *it != h) return 0.0;
        return values[static_cast<std::size_t>(it - index.begin())];
    }

    friend bool operator==(const AssociativeArray&, const AssociativeArray&) = default;
};

inline AssociativeArray build_array(const AnnotationFrames& ann, const RelatednessTable& table) {
    std::vector<const ActivationMap*> rows;
    for (auto h : ann.evoked) {
        const auto* row = table.row(h);
        if (!row) throw InvalidArgument("annotation " + ann.annotation_id + " evokes a frame with no table row");
        rows.push_back(row);
    }
    // Merge of sorted rows, combining by max.
    std::vector<Activation> merged;
    for (const auto* row : rows) merged.insert(merged.end(), row->entries.begin(), row->entries.end());
    std::sort(merged.begin(), merged.end(),
              [](const Activation& a, const Activation& b) { return a.first < b.first; });

    AssociativeArray out;
    for (const auto& [h, v] : merged) {
        if (!out.index.empty() && out.index.back() == h) {
            out.values.back() = std::max(out.values.back(), v);
        } else {
            out.index.push_back(h);
            out.values.push_back(v);
        }
    }
    // Directly evoked frames are pinned at 1.0; drop zero-valued entries.
    for (std::size_t i = 0; i < out.index.size(); ++i)
        if (ann.evoked.contains(out.index[i])) out.values[i] = 1.0;
    AssociativeArray compact;
    for (std::size_t i = 0; i < out.index.size(); ++i) {
        if (out.values[i] == 0.0) continue;
        compact.index.push_back(out.index[i]);
        compact.values.push_back(out.values[i]);
    }
    return compact;
}

// Zero-completes both arrays over the union of their indexes.
inline std::pair<AssociativeArray, AssociativeArray> align(const AssociativeArray& a1,
                                                           const AssociativeArray& a2) {
    std::pair<AssociativeArray, AssociativeArray> out;
    auto& [o1, o2] = out;
    std::size_t i = 0, j = 0;
    while (i < a1.size() || j < a2.size()) {
        FrameHandle h;
        double v1 = 0.0, v2 = 0.0;
        if (j == a2.size() || (i < a1.size() && a1.index[i] < a2.index[j])) {
            h = a1.index[i];
            v1 = a1.values[i++];
        } else if (i == a1.size() || a2.index[j] < a1.index[i]) {
            h = a2.index[j];
            v2 = a2.values[j++];
        } else {
            h = a1.index[i];
            v1 = a1.values[i++];
            v2 = a2.values[j++];
        }
        o1.index.push_back(h);
        o1.values.push_back(v1);
        o2.index.push_back(h);
        o2.values.push_back(v2);
    }
    return out;
}

// Cosine over the union index. Both sums run in ascending index order, so the
// result is exactly symmetric in its arguments.
inline double cosine(const AssociativeArray& a1, const AssociativeArray& a2) {
    const bool aligned = a1.index == a2.index;
    std::pair<AssociativeArray, AssociativeArray> tmp;
    if (!aligned) tmp = align(a1, a2);
    const auto& x = aligned ? a1 : tmp.first;
    const auto& y = aligned ? a2 : tmp.second;

    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        dot += x.values[k] * y.values[k];
        nx += x.values[k] * x.values[k];
        ny += y.values[k] * y.values[k];
    }
    if (nx == 0.0 || ny == 0.0) throw UndefinedSimilarity("cosine of a zero-norm associative array");
    const double c = dot / (std::sqrt(nx) * std::sqrt(ny));
    return std::clamp(c, 0.0, 1.0);
}

inline double compare_annotations(const AnnotationFrames& ann1, const AnnotationFrames& ann2,
                                  const RelatednessTable& table) {
    if (ann1.empty() || ann2.empty())
        throw UndefinedSimilarity("cannot compare an annotation that evokes no frames");
    return cosine(build_array(ann1, table), build_array(ann2, table));
}

// {"annotation":<id>,"frames":[[<frame id>,<value>],...]}
inline records::json to_record(const std::string& annotation_id, const AssociativeArray& a,
                               const FrameGraph& g) {
    records::json frames = records::json::array();
    for (std::size_t i = 0; i < a.size(); ++i) frames.push_back({g.id(a.index[i]).to_json(), a.values[i]});
    return {{"annotation", annotation_id}, {"frames", std::move(frames)}};
}

}  // namespace framesim
