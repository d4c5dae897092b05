#pragma once

#include "qsi/invariants.hpp"
#include "qsi/enumerate.hpp"
#include "qsi/parallel.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qsi {

/// A finite-dimensional representation: dimension vector plus one matrix per
/// arrow (row-vector convention, R(a): alpha(ia) x alpha(ta)).
struct Representation {
    DimVector dims;
    RepPoint point;
};

inline void check_representation(const Quiver& q, const Representation& r) {
    check_point(*make_ambient(q, r.dims), r.point);
}

inline Representation direct_sum(const Quiver& q, const Representation& a,
                                 const Representation& b) {
    Representation s;
    s.dims = add(a.dims, b.dims);
    for (int arr = 0; arr < q.num_arrows(); ++arr) {
        const auto& ma = a.point.mats[arr];
        const auto& mb = b.point.mats[arr];
        RatMatrix m(ma.rows + mb.rows, ma.cols + mb.cols);
        for (int i = 0; i < ma.rows; ++i)
            for (int j = 0; j < ma.cols; ++j) m.at(i, j) = ma.at(i, j);
        for (int i = 0; i < mb.rows; ++i)
            for (int j = 0; j < mb.cols; ++j) m.at(ma.rows + i, ma.cols + j) = mb.at(i, j);
        s.point.mats.push_back(std::move(m));
    }
    return s;
}

/// A homomorphism of representations R -> S: one block per vertex, shape
/// dims_R(v) x dims_S(v), satisfying R(a) phi(ta) = phi(ia) S(a).
struct RepMorphism {
    std::vector<RatMatrix> blocks;
};

/// Basis of Hom(R, S), by exact solution of the intertwiner system.
inline std::vector<RepMorphism> hom_basis(const Quiver& q, const Representation& R,
                                          const Representation& S) {
    check_representation(q, R);
    check_representation(q, S);
    std::vector<int> off(q.num_vertices() + 1, 0);
    for (int v = 0; v < q.num_vertices(); ++v)
        off[v + 1] = off[v] + static_cast<int>(R.dims[v] * S.dims[v]);
    const int unknowns = off.back();
    auto var = [&](int v, int i, int j) { return off[v] + i * static_cast<int>(S.dims[v]) + j; };

    std::vector<std::vector<Rat>> rows;
    for (int a = 0; a < q.num_arrows(); ++a) {
        const int sv = q.source(a), tv = q.target(a);
        for (int i = 0; i < R.dims[sv]; ++i)
            for (int j = 0; j < S.dims[tv]; ++j) {
                std::vector<Rat> row(unknowns, Rat(0));
                bool nonzero = false;
                for (int k = 0; k < R.dims[tv]; ++k) {
                    const Rat& c = R.point.mats[a].at(i, k);
                    if (c == 0) continue;
                    row[var(tv, k, j)] += c;
                    nonzero = true;
                }
                for (int k = 0; k < S.dims[sv]; ++k) {
                    const Rat& c = S.point.mats[a].at(k, j);
                    if (c == 0) continue;
                    row[var(sv, i, k)] -= c;
                    nonzero = true;
                }
                if (nonzero) rows.push_back(std::move(row));
            }
    }
    std::vector<std::vector<Rat>> kernel;
    if (rows.empty()) {
        kernel.resize(unknowns);
        for (int j = 0; j < unknowns; ++j) {
            kernel[j].assign(unknowns, Rat(0));
            kernel[j][j] = 1;
        }
    } else {
        RatMatrix sys(static_cast<int>(rows.size()), unknowns);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (int j = 0; j < unknowns; ++j) sys.at(static_cast<int>(i), j) = rows[i][j];
        kernel = right_nullspace(sys);
    }
    std::vector<RepMorphism> basis;
    for (const auto& x : kernel) {
        RepMorphism m;
        for (int v = 0; v < q.num_vertices(); ++v) {
            RatMatrix blk(static_cast<int>(R.dims[v]), static_cast<int>(S.dims[v]));
            for (int i = 0; i < R.dims[v]; ++i)
                for (int j = 0; j < S.dims[v]; ++j) blk.at(i, j) = x[var(v, i, j)];
            m.blocks.push_back(std::move(blk));
        }
        basis.push_back(std::move(m));
    }
    return basis;
}

inline long long hom_dim(const Quiver& q, const Representation& R, const Representation& S) {
    return static_cast<long long>(hom_basis(q, R, S).size());
}

/// dim Ext(R, S) via the Euler defect: dim Hom - <dim R, dim S>. Quivers are
/// hereditary, so this pins Ext exactly; a negative value signals an internal
/// inconsistency and is a hard error.
inline long long ext_dim(const Quiver& q, const Representation& R, const Representation& S) {
    long long e = hom_dim(q, R, S) - euler_form(q, R.dims, S.dims);
    if (e < 0) fail("internal inconsistency", "negative Ext dimension");
    return e;
}

/// Hom/Ext dimensions of (cok phi-hat, S) read off the long exact sequence of
/// the presentation: the kernel and cokernel of R_S(phi).
inline std::pair<long long, long long> hom_ext_via_presentation(const Quiver& q,
                                                                const AddMap& phi,
                                                                const Representation& S) {
    AmbientPtr amb = make_ambient(q, S.dims);
    RatMatrix m = realize_at(amb, phi, S.point);
    const int r = rank(m);
    return {m.rows - r, m.cols - r};
}

// ---------------------------------------------------------------------------
// projective presentations

enum class InjStatus { Injective, NotInjective, UnknownTruncated };

struct InjectivityResult {
    InjStatus status = InjStatus::UnknownTruncated;
    std::optional<DimVector> kernel_mult;  // c(v): acyclic non-injective case
    int truncation = -1;                   // bound used for cyclic quivers
    // kernel generators lifting a basis of top(ker), acyclic case: one vector
    // of path combinations (indexed by target slot) per generator
    std::vector<std::vector<PathComb>> generators;
    std::vector<int> generator_vertex;  // top vertex per generator
};

namespace detail {

/// Basis (slot, path) of (+)_slots P_{vertex(slot)} truncated at max_len.
struct ProjBasis {
    std::vector<std::pair<int, Path>> elems;
    std::map<std::pair<int, Path>, int> index;

    void build(const Quiver& q, const std::vector<int>& slots, int max_len) {
        for (int s = 0; s < static_cast<int>(slots.size()); ++s)
            for (int w = 0; w < q.num_vertices(); ++w)
                for (const Path& p : enumerate_paths(q, slots[s], w, max_len))
                    elems.emplace_back(s, p);
        std::sort(elems.begin(), elems.end());
        for (int i = 0; i < static_cast<int>(elems.size()); ++i) index[elems[i]] = i;
    }
};

}  // namespace detail

/// Injectivity of phi-hat, the map of projectives corresponding to phi read
/// contravariantly. Acyclic quivers get the exact answer with kernel summand
/// multiplicities c(v); quivers with cycles are analyzed at the given
/// truncation: an exact kernel element proves NotInjective, an empty
/// truncated kernel proves Injective (any nonzero kernel is a projective
/// summand, hence contains an element with a nonzero constant component),
/// anything else is honestly UnknownTruncated.
inline InjectivityResult injectivity_check(const Quiver& q, const AddMap& phi, int truncation = 6) {
    const bool acyclic = is_acyclic(q);
    const int in_len = acyclic ? q.num_vertices() : truncation;
    int entry_len = 0;
    for (const auto& row : phi.entries)
        for (const auto& e : row) entry_len = std::max(entry_len, e.max_length());
    const int out_len = in_len + entry_len;

    detail::ProjBasis in_basis, out_basis;
    in_basis.build(q, phi.target_slots, in_len);
    out_basis.build(q, phi.source_slots, out_len);

    const int ni = static_cast<int>(in_basis.elems.size());
    const int no = static_cast<int>(out_basis.elems.size());
    RatMatrix m(no, ni);
    for (int j = 0; j < ni; ++j) {
        const auto& [t, path] = in_basis.elems[j];
        for (int s = 0; s < phi.num_source_slots(); ++s) {
            const PathComb& e = phi.entries[s][t];
            if (e.is_zero()) continue;
            for (const auto& [ep, c] : e.terms) {
                Path full = compose_paths(q, ep, path);
                auto it = out_basis.index.find({s, full});
                if (it == out_basis.index.end())
                    fail("internal inconsistency", "projective basis misses a composite path");
                m.at(it->second, j) += c;
            }
        }
    }

    InjectivityResult res;
    res.truncation = acyclic ? -1 : in_len;
    std::vector<std::vector<Rat>> kernel = right_nullspace(m);

    if (!acyclic && kernel.empty()) {
        // No exact kernel element in the window. The truncated map (outputs
        // clipped at in_len) decides between Injective and UnknownTruncated.
        RatMatrix trunc(no, ni);
        for (int i = 0; i < no; ++i) {
            if (out_basis.elems[i].second.length() > in_len) continue;
            for (int j = 0; j < ni; ++j) trunc.at(i, j) = m.at(i, j);
        }
        res.status = right_nullspace(trunc).empty() ? InjStatus::Injective
                                                    : InjStatus::UnknownTruncated;
        return res;
    }
    if (kernel.empty()) {
        res.status = InjStatus::Injective;
        return res;
    }
    res.status = InjStatus::NotInjective;
    if (!acyclic) return res;  // witness exists; no dimension-vector claim

    // Acyclic: compute c(v) and top-lifting generators. The kernel is graded
    // by the terminal vertex of basis paths; tops are kernel elements modulo
    // the right action of the arrows.
    auto to_combs = [&](const std::vector<Rat>& vec, int w) {
        std::vector<PathComb> combs;
        for (int t = 0; t < phi.num_target_slots(); ++t)
            combs.push_back(zero_comb(phi.target_slots[t], w));
        for (int j = 0; j < ni; ++j) {
            if (vec[j] == 0) continue;
            const auto& [t, path] = in_basis.elems[j];
            combs[t].terms.emplace_back(path, vec[j]);
        }
        for (auto& c : combs) comb_normalize(c);
        return combs;
    };
    // coordinates of the w-graded component of a kernel vector
    auto component_coords = [&](const std::vector<Rat>& vec, int w) {
        std::vector<Rat> out(ni, Rat(0));
        for (int j = 0; j < ni; ++j)
            if (vec[j] != 0 && in_basis.elems[j].second.target == w) out[j] = vec[j];
        return out;
    };
    // right multiplication by arrow a in coordinates
    auto shift_by_arrow = [&](const std::vector<Rat>& vec, int a) {
        std::vector<Rat> out(ni, Rat(0));
        for (int j = 0; j < ni; ++j) {
            if (vec[j] == 0) continue;
            const auto& [t, path] = in_basis.elems[j];
            if (path.target != q.source(a)) continue;
            Path ext = path;
            ext.arrows.push_back(a);
            ext.target = q.target(a);
            auto it = in_basis.index.find({t, ext});
            if (it != in_basis.index.end()) out[it->second] = vec[j];
        }
        return out;
    };

    DimVector cm = DimVector::zeros(q.num_vertices());
    for (int w = 0; w < q.num_vertices(); ++w) {
        RowSpace kj(ni);  // (K J) component at w
        for (const auto& k : kernel)
            for (int a = 0; a < q.num_arrows(); ++a) {
                if (q.target(a) != w) continue;
                auto shifted = shift_by_arrow(k, a);
                kj.insert(std::move(shifted));
            }
        RowSpace full = kj;
        for (const auto& k : kernel) {
            auto comp = component_coords(k, w);
            if (full.insert(comp)) {
                ++cm[w];
                res.generators.push_back(to_combs(comp, w));
                res.generator_vertex.push_back(w);
            }
        }
    }
    res.kernel_mult = cm;
    return res;
}

/// Restriction of phi to the summand complementary to ker phi-hat (acyclic):
/// drops, per vertex, target slots chosen so that the kernel generators'
/// constant terms together with the surviving coordinate slots span
/// everything. The realization of the dropped part vanishes on supp(beta)
/// exactly when some c(v) > 0 there.
inline AddMap restrict_to_complement(const Quiver& q, const AddMap& phi,
                                     const InjectivityResult& inj) {
    if (inj.status != InjStatus::NotInjective || !inj.kernel_mult)
        return phi;  // nothing to cancel
    std::vector<bool> keep(phi.target_slots.size(), true);
    for (int v = 0; v < q.num_vertices(); ++v) {
        std::vector<int> slots_here;
        for (int t = 0; t < phi.num_target_slots(); ++t)
            if (phi.target_slots[t] == v) slots_here.push_back(t);
        if (slots_here.empty()) continue;
        RowSpace span(static_cast<int>(slots_here.size()));
        for (std::size_t gidx = 0; gidx < inj.generators.size(); ++gidx) {
            if (inj.generator_vertex[gidx] != v) continue;
            std::vector<Rat> col(slots_here.size(), Rat(0));
            for (std::size_t i = 0; i < slots_here.size(); ++i) {
                auto c = inj.generators[gidx][slots_here[i]].trivial_coeff();
                if (c) col[i] = *c;
            }
            span.insert(std::move(col));
        }
        for (std::size_t i = 0; i < slots_here.size(); ++i) {
            std::vector<Rat> e(slots_here.size(), Rat(0));
            e[i] = 1;
            if (!span.insert(std::move(e))) keep[slots_here[i]] = false;
        }
    }
    AddMap out;
    out.quiver = phi.quiver;
    out.source_slots = phi.source_slots;
    for (int t = 0; t < phi.num_target_slots(); ++t)
        if (keep[t]) out.target_slots.push_back(phi.target_slots[t]);
    out.entries.resize(phi.num_source_slots());
    for (int s = 0; s < phi.num_source_slots(); ++s)
        for (int t = 0; t < phi.num_target_slots(); ++t)
            if (keep[t]) out.entries[s].push_back(phi.entries[s][t]);
    return out;
}

struct PresentationData {
    AddMap phi;
    InjectivityResult inj;
    std::optional<DimVector> cok_dims;  // acyclic case
};

/// Cokernel of phi-hat as a concrete representation (acyclic quivers): vertex
/// spaces are the path-graded quotients, arrows act by right multiplication.
inline Representation cokernel_rep(const Quiver& q, const AddMap& phi) {
    if (!is_acyclic(q)) fail("oriented cycle", "cokernel_rep needs an acyclic quiver");
    const int len = q.num_vertices();
    detail::ProjBasis out_basis;
    out_basis.build(q, phi.source_slots, len);

    // Per-vertex grading of the output basis.
    std::vector<std::vector<int>> by_vertex(q.num_vertices());
    for (int i = 0; i < static_cast<int>(out_basis.elems.size()); ++i)
        by_vertex[out_basis.elems[i].second.target].push_back(i);

    // image row spaces per vertex
    std::vector<RowSpace> image;
    for (int w = 0; w < q.num_vertices(); ++w)
        image.emplace_back(static_cast<int>(by_vertex[w].size()));
    std::vector<std::map<int, int>> local_index(q.num_vertices());
    for (int w = 0; w < q.num_vertices(); ++w)
        for (std::size_t i = 0; i < by_vertex[w].size(); ++i)
            local_index[w][by_vertex[w][i]] = static_cast<int>(i);

    for (int t = 0; t < phi.num_target_slots(); ++t) {
        const int vt = phi.target_slots[t];
        for (int w = 0; w < q.num_vertices(); ++w)
            for (const Path& p : enumerate_paths(q, vt, w, len)) {
                std::vector<Rat> vec(by_vertex[w].size(), Rat(0));
                bool nonzero = false;
                for (int s = 0; s < phi.num_source_slots(); ++s) {
                    const PathComb& e = phi.entries[s][t];
                    for (const auto& [ep, c] : e.terms) {
                        Path full = compose_paths(q, ep, p);
                        auto it = out_basis.index.find({s, full});
                        if (it == out_basis.index.end())
                            fail("internal inconsistency", "cokernel basis misses a path");
                        vec[local_index[w].at(it->second)] += c;
                        nonzero = true;
                    }
                }
                if (nonzero) image[w].insert(std::move(vec));
            }
    }

    // free coordinates represent the cokernel basis
    std::vector<std::vector<int>> free_coords(q.num_vertices());
    for (int w = 0; w < q.num_vertices(); ++w) {
        std::vector<bool> pivot(by_vertex[w].size(), false);
        for (const auto& row : image[w].rows())
            for (std::size_t j = 0; j < row.size(); ++j)
                if (row[j] != 0) {
                    pivot[j] = true;
                    break;
                }
        for (std::size_t j = 0; j < by_vertex[w].size(); ++j)
            if (!pivot[j]) free_coords[w].push_back(static_cast<int>(j));
    }

    Representation T;
    T.dims = DimVector::zeros(q.num_vertices());
    for (int w = 0; w < q.num_vertices(); ++w)
        T.dims[w] = static_cast<long long>(free_coords[w].size());
    for (int a = 0; a < q.num_arrows(); ++a) {
        const int vi = q.source(a), vt = q.target(a);
        RatMatrix mat(static_cast<int>(T.dims[vi]), static_cast<int>(T.dims[vt]));
        for (std::size_t bi = 0; bi < free_coords[vi].size(); ++bi) {
            const auto& [slot, path] = out_basis.elems[by_vertex[vi][free_coords[vi][bi]]];
            Path ext = path;
            ext.arrows.push_back(a);
            ext.target = vt;
            auto it = out_basis.index.find({slot, ext});
            if (it == out_basis.index.end()) continue;  // beyond the acyclic length bound: impossible
            std::vector<Rat> vec(by_vertex[vt].size(), Rat(0));
            vec[local_index[vt].at(it->second)] = 1;
            std::vector<Rat> residue = image[vt].reduce(std::move(vec));
            for (std::size_t bj = 0; bj < free_coords[vt].size(); ++bj)
                mat.at(static_cast<int>(bi), static_cast<int>(bj)) = residue[free_coords[vt][bj]];
        }
        T.point.mats.push_back(std::move(mat));
    }
    return T;
}

/// The standard projective presentation of a representation over an acyclic
/// quiver. Slot layout: source slots (v, n) for n <= d(v); target slots
/// (a, m) for m <= d(i(a)); entry((v,n),(a,m)) is the arrow a when v = i(a)
/// and n = m, and -R(a)_{m,n} e_{t(a)} when v = t(a).
inline PresentationData canonical_presentation(const Quiver& q, const Representation& R) {
    if (!is_acyclic(q))
        fail("oriented cycle", "canonical_presentation needs an acyclic quiver");
    check_representation(q, R);
    const DimVector& d = R.dims;
    std::vector<int> src = canonical_slots(q, d);
    std::vector<std::pair<int, int>> tslots;  // (arrow, copy)
    std::vector<int> tgt;
    for (int a = 0; a < q.num_arrows(); ++a)
        for (int m = 0; m < d[q.source(a)]; ++m) {
            tslots.emplace_back(a, m);
            tgt.push_back(q.target(a));
        }
    AddMap phi = zero_addmap(q, src, tgt);
    int sidx = 0;
    for (int v = 0; v < q.num_vertices(); ++v)
        for (int n = 0; n < d[v]; ++n, ++sidx)
            for (std::size_t tj = 0; tj < tslots.size(); ++tj) {
                const auto& [a, m] = tslots[tj];
                PathComb e = zero_comb(v, q.target(a));
                if (v == q.source(a) && n == m)
                    e = comb_add(e, comb_from_path(make_path(q, {a})));
                if (v == q.target(a)) {
                    const Rat& val = R.point.mats[a].at(m, n);
                    if (val != 0)
                        e = comb_add(e, comb_from_path(trivial_path(v), Rat(-val)));
                }
                phi.entries[sidx][tj] = std::move(e);
            }
    PresentationData out;
    out.phi = std::move(phi);
    out.inj = injectivity_check(q, out.phi);
    out.cok_dims = cokernel_rep(q, out.phi).dims;
    return out;
}

/// Cancels trivial-path pivot pairs by exact elimination. Only entries that
/// are exactly a nonzero scalar multiple of e_v are used as pivots; no
/// path-algebra division is attempted. Terminates because each step removes
/// one source and one target slot.
inline AddMap minimize_addmap(AddMap phi) {
    const Quiver& q = phi.quiver;
    for (;;) {
        int ps = -1, pt = -1;
        for (int s = 0; s < phi.num_source_slots() && ps < 0; ++s)
            for (int t = 0; t < phi.num_target_slots(); ++t)
                if (phi.entries[s][t].is_scalar_trivial()) {
                    ps = s;
                    pt = t;
                    break;
                }
        if (ps < 0) break;
        const Rat lambda = phi.entries[ps][pt].terms.front().second;
        AddMap next;
        next.quiver = q;
        for (int s = 0; s < phi.num_source_slots(); ++s)
            if (s != ps) next.source_slots.push_back(phi.source_slots[s]);
        for (int t = 0; t < phi.num_target_slots(); ++t)
            if (t != pt) next.target_slots.push_back(phi.target_slots[t]);
        next.entries.resize(next.source_slots.size());
        int si = 0;
        for (int s = 0; s < phi.num_source_slots(); ++s) {
            if (s == ps) continue;
            for (int t = 0; t < phi.num_target_slots(); ++t) {
                if (t == pt) continue;
                // Schur complement step: e(s,t) - e(s,pt) lambda^{-1} e(ps,t)
                PathComb upd = phi.entries[s][t];
                if (!phi.entries[s][pt].is_zero() && !phi.entries[ps][t].is_zero()) {
                    PathComb corr = comb_compose(
                        q, comb_scale(phi.entries[s][pt], Rat(-1) / lambda), phi.entries[ps][t]);
                    upd = comb_add(upd, corr);
                }
                next.entries[si].push_back(std::move(upd));
            }
            ++si;
        }
        phi = std::move(next);
    }
    return phi;
}

inline PresentationData minimize_presentation(const PresentationData& p) {
    PresentationData out;
    out.phi = minimize_addmap(p.phi);
    out.inj = injectivity_check(out.phi.quiver, out.phi);
    if (is_acyclic(out.phi.quiver)) out.cok_dims = cokernel_rep(out.phi.quiver, out.phi).dims;
    return out;
}

/// P_{R,beta}: the determinantal semi-invariant of the minimized canonical
/// presentation, defined when <dim R, beta> = 0.
inline Poly p_R_beta(const Quiver& q, const Representation& R, const DimVector& beta) {
    if (euler_form(q, R.dims, beta) != 0)
        fail("euler pairing nonzero", "P_{R,beta} needs <dim R, beta> = 0");
    PresentationData pres = canonical_presentation(q, R);
    AddMap phi = minimize_addmap(pres.phi);
    return det_semiinvariant(make_ambient(q, beta), phi);
}

// ---------------------------------------------------------------------------
// perpendicularity and semistability

struct PerpResult {
    bool perpendicular = false;  // det R_p(phi) != 0
    Rat det_value;
    std::optional<long long> hom, ext;  // cross-validation dimensions
};

/// det R_p(phi) != 0 iff R_p lies in (cok phi-hat)-perp. In
/// cross-validation mode the right-hand side is computed independently via
/// the intertwiner solver on the explicit cokernel; disagreement is a hard
/// failure, not a result.
inline PerpResult perp_check(const Quiver& q, const AddMap& phi, const DimVector& beta,
                             const RepPoint& p, bool cross_validate = false) {
    AmbientPtr amb = make_ambient(q, beta);
    if (!is_square_at(amb, phi)) fail("non-square", "perp_check needs a square realization");
    PerpResult res;
    res.det_value = det(realize_at(amb, phi, p));
    res.perpendicular = res.det_value != 0;
    if (cross_validate) {
        if (!is_acyclic(q))
            fail("oriented cycle", "cross-validation needs a finite-dimensional cokernel");
        Representation T = cokernel_rep(q, phi);
        Representation Rp{beta, p};
        res.hom = hom_dim(q, T, Rp);
        res.ext = ext_dim(q, T, Rp);
        const bool rhs = (*res.hom == 0) && (*res.ext == 0);
        if (rhs != res.perpendicular)
            fail("cross-validation mismatch",
                 "determinant verdict disagrees with the Hom/Ext computation");
    }
    return res;
}

struct SemistableWitness {
    AddMap phi;
    Poly poly;   // P_{phi,beta}
    Rat value;   // P_{phi,beta}(p) != 0
    PresentationData pres;
    std::optional<Representation> cok;  // the perpendicular witness T, acyclic case
};

struct SemistableOutcome {
    std::optional<SemistableWitness> witness;
    MapEnumBounds bounds;
    MapEnumStats stats;
};

/// Searches the bounded, canonically ordered family of maps for a
/// determinantal semi-invariant that is non-constant, has injective phi-hat,
/// and does not vanish at p. A miss is explicitly inconclusive: a bounded
/// search can certify semistability but never refute it.
inline SemistableOutcome semistable_search(const Quiver& q, const DimVector& beta,
                                           const RepPoint& p, const MapEnumBounds& bounds) {
    AmbientPtr amb = make_ambient(q, beta);
    check_point(*amb, p);
    SemistableOutcome out;
    out.bounds = bounds;
    const int truncation = bounds.max_len + 2;

    // Batched deterministic search: candidates are screened in parallel, the
    // first hit in canonical order wins regardless of the worker count.
    std::vector<AddMap> batch;
    auto flush = [&]() -> bool {  // returns true when a witness was found
        if (batch.empty()) return false;
        std::vector<char> hit = parallel_map(batch, [&](const AddMap& phi) -> char {
            if (det(realize_at(amb, phi, p)) == 0) return 0;
            Poly P = det_semiinvariant(amb, phi);
            if (P.is_constant()) return 0;
            return injectivity_check(q, phi, truncation).status == InjStatus::Injective ? 1 : 0;
        });
        for (std::size_t i = 0; i < batch.size(); ++i) {
            if (!hit[i]) continue;
            SemistableWitness w;
            w.phi = batch[i];
            w.poly = det_semiinvariant(amb, w.phi);
            w.value = evaluate(w.poly, p);
            w.pres.phi = w.phi;
            w.pres.inj = injectivity_check(q, w.phi, truncation);
            if (is_acyclic(q)) {
                w.cok = cokernel_rep(q, w.phi);
                w.pres.cok_dims = w.cok->dims;
            }
            out.witness = std::move(w);
            return true;
        }
        batch.clear();
        return false;
    };

    out.stats = enumerate_addmaps(q, beta, bounds, [&](const AddMap& phi) {
        batch.push_back(phi);
        if (static_cast<int>(batch.size()) >= 64) return !flush();
        return true;
    });
    if (!out.witness) flush();
    return out;
}

}  // namespace qsi
