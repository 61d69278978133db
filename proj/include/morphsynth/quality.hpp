#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

namespace morphsynth {

// Ordinal quality vector N(S) = (w; n). `w` is the minimum pairwise
// compatibility inside a composition, `tiers[r]` counts the selected
// options of priority r+1. Trailing zero tiers carry no meaning: all
// comparisons pad to a common length.
struct QualityVector {
    int w = 0;
    std::vector<int> tiers;

    int tier(std::size_t r) const { return r < tiers.size() ? tiers[r] : 0; }

    std::string to_string() const {
        std::string s = "(" + std::to_string(w) + ";";
        for (std::size_t i = 0; i < tiers.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(tiers[i]);
        }
        s += ")";
        return s;
    }

    std::string to_string_padded(std::size_t len) const {
        QualityVector q{w, tiers};
        while (q.tiers.size() < len) q.tiers.push_back(0);
        return q.to_string();
    }
};

inline bool operator==(const QualityVector& a, const QualityVector& b) {
    if (a.w != b.w) return false;
    std::size_t n = std::max(a.tiers.size(), b.tiers.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a.tier(i) != b.tier(i)) return false;
    return true;
}

inline bool operator!=(const QualityVector& a, const QualityVector& b) { return !(a == b); }

enum class Dominance {
    StrictlyDominates,
    Equal,
    Other,  // dominated or incomparable
};

// a covers b when a.w >= b.w and every prefix sum of a.tiers is at least
// the matching prefix sum of b.tiers (more high-priority picks, cumulatively).
inline bool covers(const QualityVector& a, const QualityVector& b) {
    if (a.w < b.w) return false;
    std::size_t n = std::max(a.tiers.size(), b.tiers.size());
    long long sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += a.tier(i);
        sb += b.tier(i);
        if (sa < sb) return false;
    }
    return true;
}

inline Dominance compare_quality(const QualityVector& a, const QualityVector& b) {
    if (a == b) return Dominance::Equal;
    if (covers(a, b)) return Dominance::StrictlyDominates;
    return Dominance::Other;
}

inline bool strictly_dominates(const QualityVector& a, const QualityVector& b) {
    return compare_quality(a, b) == Dominance::StrictlyDominates;
}

// Deterministic ordering used inside a Pareto layer and for result listings:
// w descending, then tier prefix sums descending, then id ascending.
inline bool quality_order_before(const QualityVector& qa, const std::string& ida,
                                 const QualityVector& qb, const std::string& idb) {
    if (qa.w != qb.w) return qa.w > qb.w;
    std::size_t n = std::max(qa.tiers.size(), qb.tiers.size());
    long long sa = 0, sb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sa += qa.tier(i);
        sb += qb.tier(i);
        if (sa != sb) return sa > sb;
    }
    return ida < idb;
}

struct QualityItem {
    std::string id;
    QualityVector quality;
};

// Peels Pareto layers: layer 1 holds the items not strictly dominated by any
// other, deeper layers are obtained after removing the shallower ones. At
// most `depth` layers are produced; each layer is sorted deterministically.
// Returns indices into `items`.
inline std::vector<std::vector<std::size_t>> pareto_layers(const std::vector<QualityItem>& items,
                                                           int depth) {
    std::vector<std::vector<std::size_t>> layers;
    std::vector<bool> taken(items.size(), false);
    std::size_t remaining = items.size();
    while (remaining > 0 && static_cast<int>(layers.size()) < depth) {
        std::vector<std::size_t> layer;
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (taken[i]) continue;
            bool dominated = false;
            for (std::size_t j = 0; j < items.size(); ++j) {
                if (j == i || taken[j]) continue;
                if (strictly_dominates(items[j].quality, items[i].quality)) {
                    dominated = true;
                    break;
                }
            }
            if (!dominated) layer.push_back(i);
        }
        for (std::size_t i : layer) taken[i] = true;
        remaining -= layer.size();
        std::sort(layer.begin(), layer.end(), [&](std::size_t a, std::size_t b) {
            return quality_order_before(items[a].quality, items[a].id, items[b].quality,
                                        items[b].id);
        });
        layers.push_back(std::move(layer));
    }
    return layers;
}

}  // namespace morphsynth
