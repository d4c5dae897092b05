#pragma once

#include "qsi/quiver.hpp"

#include <string>
#include <vector>

namespace qsi {

/// A map phi: (+)_v O(v)^{a(v)} -> (+)_v O(v)^{b(v)} in add(Q), stored as a
/// matrix of path combinations indexed by (source slot, target slot). Each
/// slot records its vertex; the canonical constructors lay slots out in
/// (vertex order, copy index) order, but functor images keep the transported
/// order, so the slot lists are explicit.
struct AddMap {
    Quiver quiver;
    std::vector<int> source_slots;  // vertex per source slot
    std::vector<int> target_slots;
    std::vector<std::vector<PathComb>> entries;  // [source][target]

    int num_source_slots() const { return static_cast<int>(source_slots.size()); }
    int num_target_slots() const { return static_cast<int>(target_slots.size()); }

    const PathComb& entry(int s, int t) const { return entries[s][t]; }

    DimVector source_mult() const {
        DimVector d = DimVector::zeros(quiver.num_vertices());
        for (int v : source_slots) ++d[v];
        return d;
    }
    DimVector target_mult() const {
        DimVector d = DimVector::zeros(quiver.num_vertices());
        for (int v : target_slots) ++d[v];
        return d;
    }

    bool operator==(const AddMap&) const = default;
};

inline void check_addmap(const AddMap& m) {
    for (int s = 0; s < m.num_source_slots(); ++s) {
        if (static_cast<int>(m.entries[s].size()) != m.num_target_slots())
            fail("shape mismatch", "AddMap entry matrix is ragged");
        for (int t = 0; t < m.num_target_slots(); ++t) {
            const PathComb& e = m.entries[s][t];
            if (e.source != m.source_slots[s] || e.target != m.target_slots[t])
                fail("endpoint mismatch", "AddMap entry endpoints disagree with its slots");
        }
    }
    if (static_cast<int>(m.entries.size()) != m.num_source_slots())
        fail("shape mismatch", "AddMap entry matrix is ragged");
}

/// Canonical slot list for a multiplicity vector: vertices in quiver order,
/// copies consecutive.
inline std::vector<int> canonical_slots(const Quiver& q, const DimVector& mult) {
    check_dimvector(q, mult, "slot multiplicities");
    std::vector<int> slots;
    for (int v = 0; v < q.num_vertices(); ++v)
        for (long long k = 0; k < mult[v]; ++k) slots.push_back(v);
    return slots;
}

inline AddMap make_addmap(Quiver q, std::vector<int> source_slots, std::vector<int> target_slots,
                          std::vector<std::vector<PathComb>> entries) {
    AddMap m{std::move(q), std::move(source_slots), std::move(target_slots), std::move(entries)};
    check_addmap(m);
    return m;
}

/// Zero map with the given slot layout.
inline AddMap zero_addmap(const Quiver& q, std::vector<int> source_slots,
                          std::vector<int> target_slots) {
    std::vector<std::vector<PathComb>> entries(source_slots.size());
    for (std::size_t s = 0; s < source_slots.size(); ++s)
        for (std::size_t t = 0; t < target_slots.size(); ++t)
            entries[s].push_back(zero_comb(source_slots[s], target_slots[t]));
    return AddMap{q, std::move(source_slots), std::move(target_slots), std::move(entries)};
}

/// Block-diagonal sum; multiplicities add, the ambient quiver must agree.
inline AddMap block_diag(const AddMap& x, const AddMap& y) {
    if (!(x.quiver == y.quiver)) fail("quiver mismatch", "block_diag over different quivers");
    std::vector<int> src = x.source_slots;
    src.insert(src.end(), y.source_slots.begin(), y.source_slots.end());
    std::vector<int> tgt = x.target_slots;
    tgt.insert(tgt.end(), y.target_slots.begin(), y.target_slots.end());
    AddMap m = zero_addmap(x.quiver, std::move(src), std::move(tgt));
    for (int s = 0; s < x.num_source_slots(); ++s)
        for (int t = 0; t < x.num_target_slots(); ++t) m.entries[s][t] = x.entries[s][t];
    const int so = x.num_source_slots(), to = x.num_target_slots();
    for (int s = 0; s < y.num_source_slots(); ++s)
        for (int t = 0; t < y.num_target_slots(); ++t)
            m.entries[so + s][to + t] = y.entries[s][t];
    return m;
}

/// Data of an additive functor s: add(dom) -> add(cod): a vertex map plus an
/// arrow-to-path-combination map with matching endpoints. Arbitrary additive
/// functors are recovered from this data since add(dom) is generated by
/// vertices and arrows.
struct FunctorData {
    Quiver dom;
    Quiver cod;
    std::vector<int> vertex_map;     // dom vertex -> cod vertex
    std::vector<PathComb> arrow_map;  // dom arrow -> PathComb over cod
};

inline void check_functor(const FunctorData& s) {
    if (static_cast<int>(s.vertex_map.size()) != s.dom.num_vertices() ||
        static_cast<int>(s.arrow_map.size()) != s.dom.num_arrows())
        fail("shape mismatch", "functor data arity");
    for (int a = 0; a < s.dom.num_arrows(); ++a) {
        const PathComb& img = s.arrow_map[a];
        if (img.source != s.vertex_map[s.dom.source(a)] ||
            img.target != s.vertex_map[s.dom.target(a)])
            fail("endpoint mismatch",
                 "functor image of arrow '" + s.dom.arrow_name(a) + "' has wrong endpoints");
    }
}

inline FunctorData identity_functor(const Quiver& q) {
    FunctorData s{q, q, {}, {}};
    for (int v = 0; v < q.num_vertices(); ++v) s.vertex_map.push_back(v);
    for (int a = 0; a < q.num_arrows(); ++a)
        s.arrow_map.push_back(comb_from_path(make_path(q, {a})));
    return s;
}

/// s(alpha) = alpha o s: pulls a dimension vector on cod back to dom.
inline DimVector apply_functor_dim(const FunctorData& s, const DimVector& alpha_on_cod) {
    check_dimvector(s.cod, alpha_on_cod, "apply_functor_dim");
    DimVector d = DimVector::zeros(s.dom.num_vertices());
    for (int v = 0; v < s.dom.num_vertices(); ++v) d[v] = alpha_on_cod[s.vertex_map[v]];
    return d;
}

/// Image of a single dom-path under the functor (composition of arrow images).
inline PathComb apply_functor_path(const FunctorData& s, const Path& p) {
    PathComb acc = comb_from_path(trivial_path(s.vertex_map[p.source]));
    for (int a : p.arrows) acc = comb_compose(s.cod, acc, s.arrow_map[a]);
    return acc;
}

inline PathComb apply_functor_comb(const FunctorData& s, const PathComb& pc) {
    PathComb acc = zero_comb(s.vertex_map[pc.source], s.vertex_map[pc.target]);
    for (const auto& [p, c] : pc.terms)
        acc = comb_add(acc, comb_scale(apply_functor_path(s, p), c));
    return acc;
}

/// Pushes a map in add(dom) into add(cod). Slots keep the dom order (re-tagged
/// with cod vertices); this is the layout under which eq-(1) functoriality
/// holds on the nose.
inline AddMap apply_functor_map(const FunctorData& s, const AddMap& phi) {
    if (!(phi.quiver == s.dom)) fail("quiver mismatch", "apply_functor_map: map not over dom");
    AddMap out;
    out.quiver = s.cod;
    for (int v : phi.source_slots) out.source_slots.push_back(s.vertex_map[v]);
    for (int v : phi.target_slots) out.target_slots.push_back(s.vertex_map[v]);
    out.entries.resize(phi.num_source_slots());
    for (int i = 0; i < phi.num_source_slots(); ++i)
        for (int j = 0; j < phi.num_target_slots(); ++j)
            out.entries[i].push_back(apply_functor_comb(s, phi.entries[i][j]));
    return out;
}

/// Composite functor: first `inner` (add(A)->add(B)), then `outer`
/// (add(B)->add(C)).
inline FunctorData compose_functors(const FunctorData& outer, const FunctorData& inner) {
    if (!(inner.cod == outer.dom)) fail("quiver mismatch", "compose_functors");
    FunctorData s{inner.dom, outer.cod, {}, {}};
    for (int v = 0; v < inner.dom.num_vertices(); ++v)
        s.vertex_map.push_back(outer.vertex_map[inner.vertex_map[v]]);
    for (int a = 0; a < inner.dom.num_arrows(); ++a)
        s.arrow_map.push_back(apply_functor_comb(outer, inner.arrow_map[a]));
    return s;
}

/// Stable-sorts the slots into the canonical (vertex order, copy) layout,
/// permuting entries to match. Needed before the JSON rendering, which
/// describes slots by multiplicities only.
inline AddMap canonicalize_slots(const AddMap& m) {
    auto perm_of = [](const std::vector<int>& slots) {
        std::vector<int> perm(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i) perm[i] = static_cast<int>(i);
        std::stable_sort(perm.begin(), perm.end(),
                         [&](int x, int y) { return slots[x] < slots[y]; });
        return perm;
    };
    std::vector<int> ps = perm_of(m.source_slots), pt = perm_of(m.target_slots);
    AddMap out;
    out.quiver = m.quiver;
    for (int i : ps) out.source_slots.push_back(m.source_slots[i]);
    for (int j : pt) out.target_slots.push_back(m.target_slots[j]);
    out.entries.resize(ps.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        for (std::size_t j = 0; j < pt.size(); ++j)
            out.entries[i].push_back(m.entries[ps[i]][pt[j]]);
    return out;
}

inline std::string addmap_str(const AddMap& m) {
    std::string s = "[";
    for (int i = 0; i < m.num_source_slots(); ++i) {
        if (i) s += "; ";
        for (int j = 0; j < m.num_target_slots(); ++j) {
            if (j) s += ", ";
            s += comb_str(m.quiver, m.entries[i][j]);
        }
    }
    s += "]";
    return s;
}

}  // namespace qsi
