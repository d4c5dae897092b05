#pragma once

#include "qsi/addmap.hpp"

#include <functional>
#include <vector>

namespace qsi {

/// Bounds for the bounded enumeration of maps in add(Q): entries draw on
/// paths of length <= max_len with coefficients from `coeffs` (nonzero
/// values), slot multiplicities stay <= max_mult per vertex, and at most
/// `budget` candidate maps are visited in total.
struct MapEnumBounds {
    int max_len = 2;
    int max_mult = 3;
    std::vector<Rat> coeffs = {Rat(1), Rat(-1)};
    long long budget = 200000;
};

struct MapEnumStats {
    long long visited = 0;
    bool truncated = false;  // budget ran out before the bounds were exhausted
};

namespace detail {

struct CellPaths {
    int s, t;                 // slot indices
    std::vector<Path> paths;  // candidate paths for this cell, canonical order
};

/// Enumerates k-subsets of the flattened (cell, path) item list together with
/// nonzero coefficient assignments, in lexicographic order. `min_new_len`
/// forces at least one chosen path of exactly that length, which deduplicates
/// the sweep over increasing path-length levels.
inline bool emit_supports(const Quiver& q, const std::vector<int>& src,
                          const std::vector<int>& tgt,
                          const std::vector<std::pair<std::pair<int, int>, Path>>& items,
                          int support, int min_new_len, const std::vector<Rat>& coeffs,
                          long long& budget, MapEnumStats* stats,
                          const std::function<bool(const AddMap&)>& cb) {
    std::vector<int> pick(support);
    std::vector<int> coef_idx(support);
    const int n = static_cast<int>(items.size());
    AddMap base = zero_addmap(q, src, tgt);

    std::function<bool(int, int, bool)> rec = [&](int depth, int start, bool has_new) -> bool {
        if (depth == support) {
            if (min_new_len > 0 && !has_new) return true;
            // sweep coefficient assignments (odometer over `coeffs`)
            std::fill(coef_idx.begin(), coef_idx.end(), 0);
            for (;;) {
                if (budget <= 0) {
                    if (stats) stats->truncated = true;
                    return false;
                }
                --budget;
                if (stats) ++stats->visited;
                AddMap m = base;
                for (int i = 0; i < support; ++i) {
                    const auto& [cell, path] = items[pick[i]];
                    m.entries[cell.first][cell.second] = comb_add(
                        m.entries[cell.first][cell.second],
                        comb_from_path(path, coeffs[coef_idx[i]]));
                }
                if (!cb(m)) return false;
                int d = support - 1;
                while (d >= 0 && ++coef_idx[d] == static_cast<int>(coeffs.size())) {
                    coef_idx[d] = 0;
                    --d;
                }
                if (d < 0) break;
            }
            return true;
        }
        for (int i = start; i <= n - (support - depth); ++i) {
            pick[depth] = i;
            const bool is_new = items[i].second.length() == min_new_len;
            if (!rec(depth + 1, i + 1, has_new || is_new)) return false;
        }
        return true;
    };
    return rec(0, 0, false);
}

}  // namespace detail

/// Visits maps phi in add(Q) satisfying the squareness condition at beta, in
/// the canonical order (increasing multiplicity profile, then maximum path
/// length, then coefficient support, then lexicographic choice). Returns
/// false from the callback to stop early. Entirely deterministic.
inline MapEnumStats enumerate_addmaps(const Quiver& q, const DimVector& beta,
                                      const MapEnumBounds& bounds,
                                      const std::function<bool(const AddMap&)>& cb) {
    check_dimvector(q, beta, "enumerate_addmaps beta");
    MapEnumStats stats;
    long long budget = bounds.budget;
    const int nv = q.num_vertices();

    // multiplicity profiles (a, b) with entries <= max_mult and matching
    // realization sizes, ordered by total slots then lexicographically
    std::vector<std::pair<DimVector, DimVector>> profiles;
    std::vector<long long> cur(2 * nv, 0);
    std::function<void(int)> gen = [&](int i) {
        if (i == 2 * nv) {
            DimVector a = DimVector::zeros(nv), b = DimVector::zeros(nv);
            long long ra = 0, rb = 0;
            for (int v = 0; v < nv; ++v) {
                a[v] = cur[v];
                b[v] = cur[nv + v];
                ra += a[v] * beta[v];
                rb += b[v] * beta[v];
            }
            if (ra == rb && ra >= 1) profiles.emplace_back(a, b);
            return;
        }
        for (long long m = 0; m <= bounds.max_mult; ++m) {
            cur[i] = m;
            gen(i + 1);
        }
        cur[i] = 0;
    };
    gen(0);
    std::stable_sort(profiles.begin(), profiles.end(), [](const auto& x, const auto& y) {
        long long sx = x.first.total() + x.second.total();
        long long sy = y.first.total() + y.second.total();
        if (sx != sy) return sx < sy;
        if (x.first.entries != y.first.entries) return x.first.entries < y.first.entries;
        return x.second.entries < y.second.entries;
    });

    for (const auto& [a, b] : profiles) {
        std::vector<int> src = canonical_slots(q, a);
        std::vector<int> tgt = canonical_slots(q, b);
        for (int len = 0; len <= bounds.max_len; ++len) {
            // items: (cell, path) with path of length <= len, in canonical order
            std::vector<std::pair<std::pair<int, int>, Path>> items;
            bool any_at_len = false;
            for (int s = 0; s < static_cast<int>(src.size()); ++s)
                for (int t = 0; t < static_cast<int>(tgt.size()); ++t)
                    for (const Path& p : enumerate_paths(q, src[s], tgt[t], len)) {
                        items.push_back({{s, t}, p});
                        if (p.length() == len) any_at_len = true;
                    }
            if (len > 0 && !any_at_len) continue;  // nothing new at this level
            const int max_support = static_cast<int>(items.size());
            for (int support = 1; support <= max_support; ++support) {
                if (!detail::emit_supports(q, src, tgt, items, support, len, bounds.coeffs,
                                           budget, &stats, cb))
                    return stats;
            }
        }
    }
    return stats;
}

}  // namespace qsi
