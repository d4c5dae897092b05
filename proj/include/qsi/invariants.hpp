#pragma once

#include "qsi/addmap.hpp"
#include "qsi/poly.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qsi {

/// Symbolic matrix of the arrow a over (Q, alpha): entries are the coordinate
/// functions x[a,r,c].
inline PolyMatrix arrow_matrix(const AmbientPtr& amb, int arrow) {
    const long long nr = amb->alpha[amb->quiver.source(arrow)];
    const long long nc = amb->alpha[amb->quiver.target(arrow)];
    PolyMatrix m(nr, std::vector<Poly>(nc));
    for (int r = 0; r < nr; ++r)
        for (int c = 0; c < nc; ++c)
            m[r][c] = Poly::var(amb, Coord{arrow, r + 1, c + 1});
    return m;
}

inline PolyMatrix poly_mat_mul(const PolyMatrix& a, const PolyMatrix& b, const AmbientPtr& amb) {
    const int n = static_cast<int>(a.size());
    const int k = a.empty() ? 0 : static_cast<int>(a[0].size());
    const int mcols = b.empty() ? 0 : static_cast<int>(b[0].size());
    PolyMatrix r(n, std::vector<Poly>(mcols, Poly::zero(amb)));
    for (int i = 0; i < n; ++i)
        for (int x = 0; x < k; ++x) {
            if (a[i][x].is_zero()) continue;
            for (int j = 0; j < mcols; ++j)
                if (!b[x][j].is_zero()) r[i][j] = r[i][j] + a[i][x] * b[x][j];
        }
    return r;
}

/// Realization of a path as a product of symbolic arrow matrices; the trivial
/// path realizes as the identity.
inline PolyMatrix realize_path(const AmbientPtr& amb, const Path& p) {
    const long long n0 = amb->alpha[p.source];
    PolyMatrix acc(n0, std::vector<Poly>(n0, Poly::zero(amb)));
    for (int i = 0; i < n0; ++i) acc[i][i] = Poly::constant(amb, 1);
    for (int a : p.arrows) acc = poly_mat_mul(acc, arrow_matrix(amb, a), amb);
    return acc;
}

inline PolyMatrix realize_comb(const AmbientPtr& amb, const PathComb& pc) {
    const long long nr = amb->alpha[pc.source];
    const long long nc = amb->alpha[pc.target];
    PolyMatrix acc(nr, std::vector<Poly>(nc, Poly::zero(amb)));
    for (const auto& [p, c] : pc.terms) {
        PolyMatrix pm = realize_path(amb, p);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j)
                if (!pm[i][j].is_zero()) acc[i][j] = acc[i][j] + pm[i][j].scaled(c);
    }
    return acc;
}

/// R_p(phi) as a symbolic block matrix: block (s,t) realizes entry(s,t), with
/// rows grouped by source slot and columns by target slot.
inline PolyMatrix rep_matrix(const AmbientPtr& amb, const AddMap& phi) {
    if (!(phi.quiver == amb->quiver)) fail("quiver mismatch", "rep_matrix ambient");
    std::vector<int> row_off{0}, col_off{0};
    for (int v : phi.source_slots) row_off.push_back(row_off.back() + static_cast<int>(amb->alpha[v]));
    for (int v : phi.target_slots) col_off.push_back(col_off.back() + static_cast<int>(amb->alpha[v]));
    PolyMatrix m(row_off.back(), std::vector<Poly>(col_off.back(), Poly::zero(amb)));
    for (int s = 0; s < phi.num_source_slots(); ++s)
        for (int t = 0; t < phi.num_target_slots(); ++t) {
            PolyMatrix blk = realize_comb(amb, phi.entries[s][t]);
            for (std::size_t i = 0; i < blk.size(); ++i)
                for (std::size_t j = 0; j < blk[i].size(); ++j)
                    m[row_off[s] + i][col_off[t] + j] = blk[i][j];
        }
    return m;
}

/// Numeric realization of phi at a concrete point (no symbolic step).
inline RatMatrix realize_at(const AmbientPtr& amb, const AddMap& phi, const RepPoint& p) {
    check_point(*amb, p);
    auto path_mat = [&](const Path& q) {
        RatMatrix acc = RatMatrix::identity(static_cast<int>(amb->alpha[q.source]));
        for (int a : q.arrows) acc = mat_mul(acc, p.mats[a]);
        return acc;
    };
    std::vector<int> row_off{0}, col_off{0};
    for (int v : phi.source_slots) row_off.push_back(row_off.back() + static_cast<int>(amb->alpha[v]));
    for (int v : phi.target_slots) col_off.push_back(col_off.back() + static_cast<int>(amb->alpha[v]));
    RatMatrix m(row_off.back(), col_off.back());
    for (int s = 0; s < phi.num_source_slots(); ++s)
        for (int t = 0; t < phi.num_target_slots(); ++t)
            for (const auto& [q, c] : phi.entries[s][t].terms) {
                RatMatrix pm = path_mat(q);
                for (int i = 0; i < pm.rows; ++i)
                    for (int j = 0; j < pm.cols; ++j)
                        m.at(row_off[s] + i, col_off[t] + j) += c * pm.at(i, j);
            }
    return m;
}

inline bool is_square_at(const AmbientPtr& amb, const AddMap& phi) {
    long long r = 0, c = 0;
    for (int v : phi.source_slots) r += amb->alpha[v];
    for (int v : phi.target_slots) c += amb->alpha[v];
    return r == c;
}

/// The determinantal semi-invariant P_{phi,alpha} = det R_p(phi). May be the
/// zero polynomial; the empty map yields the constant 1.
inline Poly det_semiinvariant(const AmbientPtr& amb, const AddMap& phi, int check_samples = 0,
                              std::uint64_t seed = 0) {
    if (!is_square_at(amb, phi)) {
        long long r = 0, c = 0;
        for (int v : phi.source_slots) r += amb->alpha[v];
        for (int v : phi.target_slots) c += amb->alpha[v];
        fail("non-square", "realization is " + std::to_string(r) + "x" + std::to_string(c));
    }
    return determinant(rep_matrix(amb, phi), check_samples, seed, amb);
}

/// Tr_l(p) = Tr(R_p(l)) for an oriented cycle l.
inline Poly trace_invariant(const AmbientPtr& amb, const Path& cycle) {
    if (!cycle.is_cycle()) fail("not a cycle", "trace of a non-cycle path");
    PolyMatrix m = realize_path(amb, cycle);
    Poly t = Poly::zero(amb);
    for (std::size_t i = 0; i < m.size(); ++i) t = t + m[i][i];
    return t;
}

/// Weight of P_{phi,alpha} under the group action convention
/// (g.p)(a) = g_{ia}^{-1} p(a) g_{ta}: psi_v = b(v) - a(v).
inline VWeight weight_of_map(const AddMap& phi) {
    DimVector a = phi.source_mult(), b = phi.target_mult();
    VWeight w = VWeight::zeros(phi.quiver.num_vertices());
    for (int v = 0; v < phi.quiver.num_vertices(); ++v) w[v] = b[v] - a[v];
    return w;
}

// ---------------------------------------------------------------------------
// infinitesimal semi-invariance

/// Elementary traceless matrices for sl_n: off-diagonal units e_{rc} and
/// consecutive diagonal differences e_{rr} - e_{r+1,r+1}.
inline std::vector<RatMatrix> traceless_basis(int n) {
    std::vector<RatMatrix> basis;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (r != c) {
                RatMatrix e(n, n);
                e.at(r, c) = 1;
                basis.push_back(std::move(e));
            }
    for (int r = 0; r + 1 < n; ++r) {
        RatMatrix e(n, n);
        e.at(r, r) = 1;
        e.at(r + 1, r + 1) = -1;
        basis.push_back(std::move(e));
    }
    return basis;
}

/// Derivation of f by the infinitesimal action of E in sl(alpha(v)) at the
/// vertex v: the block of arrow a moves to -E X_a when i(a) = v, plus X_a E
/// when t(a) = v (both summands for a loop).
inline Poly derive(const Poly& f, int v, const RatMatrix& E) {
    const Ambient& amb = *f.ambient();
    auto d_coord = [&](const Coord& x) {
        Poly out = Poly::zero(f.ambient());
        const int a = x.arrow;
        if (amb.quiver.source(a) == v)
            for (int k = 0; k < E.cols; ++k)
                if (E.at(x.row - 1, k) != 0)
                    out = out - Poly::var(f.ambient(), Coord{a, k + 1, x.col}).scaled(E.at(x.row - 1, k));
        if (amb.quiver.target(a) == v)
            for (int k = 0; k < E.rows; ++k)
                if (E.at(k, x.col - 1) != 0)
                    out = out + Poly::var(f.ambient(), Coord{a, x.row, k + 1}).scaled(E.at(k, x.col - 1));
        return out;
    };
    Poly total = Poly::zero(f.ambient());
    for (const auto& [m, c] : f.terms()) {
        for (std::size_t i = 0; i < m.factors.size(); ++i) {
            const auto& [x, e] = m.factors[i];
            Poly dx = d_coord(x);
            if (dx.is_zero()) continue;
            // c * e * (m / x) * dx
            Monomial rest;
            for (std::size_t j = 0; j < m.factors.size(); ++j) {
                if (j == i) {
                    if (e > 1) rest.factors.emplace_back(x, e - 1);
                } else {
                    rest.factors.push_back(m.factors[j]);
                }
            }
            Poly restp = Poly::from_terms(f.ambient(), {{rest, c * e}});
            total = total + restp * dx;
        }
    }
    return total;
}

struct SemiInvarianceCert {
    bool ok = false;
    std::string reason;        // empty when ok
    int vertex = -1;           // violating vertex, when applicable
    int elementary = -1;       // index into traceless_basis(alpha(v)), or -1 for a torus violation
};

/// Checks that (i) every monomial of f has the torus weight prescribed by psi
/// (raw weight alpha(v) * psi_v) and (ii) every infinitesimal sl(alpha(v))
/// action annihilates f. In characteristic zero this is equivalent to
/// semi-invariance of weight psi under the connected group.
inline SemiInvarianceCert check_semiinvariance(const Poly& f, const VWeight& psi) {
    const Ambient& amb = *f.ambient();
    if (psi.size() != amb.quiver.num_vertices())
        fail("shape mismatch", "weight has wrong arity");
    SemiInvarianceCert cert;
    for (const auto& [m, c] : f.terms()) {
        std::vector<long long> w = raw_torus_weight(amb, m);
        for (int v = 0; v < amb.quiver.num_vertices(); ++v)
            if (w[v] != amb.alpha[v] * psi[v]) {
                cert.reason = "monomial " + monomial_str(amb, m) +
                              " has torus weight " + std::to_string(w[v]) + " != alpha*psi = " +
                              std::to_string(amb.alpha[v] * psi[v]) + " at vertex " +
                              amb.quiver.vertex_name(v);
                cert.vertex = v;
                return cert;
            }
    }
    for (int v = 0; v < amb.quiver.num_vertices(); ++v) {
        const int n = static_cast<int>(amb.alpha[v]);
        if (n < 2) continue;  // sl_1 and sl_0 are trivial
        std::vector<RatMatrix> basis = traceless_basis(n);
        for (std::size_t k = 0; k < basis.size(); ++k) {
            if (!derive(f, v, basis[k]).is_zero()) {
                cert.vertex = v;
                cert.elementary = static_cast<int>(k);
                cert.reason = "infinitesimal action at vertex " + amb.quiver.vertex_name(v) +
                              " (elementary #" + std::to_string(k) + ") does not annihilate f";
                return cert;
            }
        }
    }
    cert.ok = true;
    return cert;
}

// ---------------------------------------------------------------------------
// group action

/// An element of GL(alpha): one invertible block per vertex.
struct GroupElement {
    std::vector<RatMatrix> blocks;  // indexed by vertex
};

inline void check_group_element(const Ambient& amb, const GroupElement& g) {
    if (static_cast<int>(g.blocks.size()) != amb.quiver.num_vertices())
        fail("shape mismatch", "group element block count");
    for (int v = 0; v < amb.quiver.num_vertices(); ++v) {
        if (g.blocks[v].rows != amb.alpha[v] || g.blocks[v].cols != amb.alpha[v])
            fail("shape mismatch", "group element block shape at " + amb.quiver.vertex_name(v));
        if (det(g.blocks[v]) == 0) fail("singular", "group element block is singular");
    }
}

inline GroupElement random_group_element(const Ambient& amb, RatSampler& sampler) {
    GroupElement g;
    for (int v = 0; v < amb.quiver.num_vertices(); ++v) {
        const int n = static_cast<int>(amb.alpha[v]);
        RatMatrix m(n, n);
        for (;;) {
            for (auto& x : m.data) x = sampler.small(3, 2);
            if (n == 0 || det(m) != 0) break;
        }
        g.blocks.push_back(std::move(m));
    }
    return g;
}

inline RepPoint random_point(const Ambient& amb, RatSampler& sampler) {
    RepPoint p = zero_point(amb);
    for (auto& m : p.mats)
        for (auto& x : m.data) x = sampler.small();
    return p;
}

/// (g.p)(a) = g_{i(a)}^{-1} p(a) g_{t(a)}.
inline RepPoint act(const Ambient& amb, const GroupElement& g, const RepPoint& p) {
    check_group_element(amb, g);
    check_point(amb, p);
    RepPoint out = p;
    std::vector<RatMatrix> inv;
    for (const auto& b : g.blocks) inv.push_back(b.rows ? inverse(b) : b);
    for (int a = 0; a < amb.quiver.num_arrows(); ++a)
        out.mats[a] = mat_mul(mat_mul(inv[amb.quiver.source(a)], p.mats[a]),
                              g.blocks[amb.quiver.target(a)]);
    return out;
}

inline Rat character_value(const GroupElement& g, const VWeight& psi) {
    Rat val = 1;
    for (int v = 0; v < psi.size(); ++v) {
        Rat d = g.blocks[v].rows ? det(g.blocks[v]) : Rat(1);
        long long e = psi[v];
        Rat p = 1;
        for (long long k = 0; k < (e < 0 ? -e : e); ++k) p *= d;
        val *= (e < 0) ? Rat(1) / p : p;
    }
    return val;
}

// ---------------------------------------------------------------------------
// trace-in-determinant-span certificate

/// Exact witnesses that Tr_l lies in the span of the P_{e + lambda l, alpha}:
/// sum_m coeffs[m] * P_{e + lambdas[m] l, alpha} = Tr_l as polynomials.
struct TraceCertificate {
    Path cycle;
    std::vector<Rat> lambdas;
    std::vector<Rat> coeffs;
};

inline AddMap unit_plus_lambda_cycle(const Quiver& q, const Path& cycle, const Rat& lambda) {
    PathComb e = comb_from_path(trivial_path(cycle.source));
    PathComb term = comb_add(e, comb_scale(comb_from_path(cycle), lambda));
    return make_addmap(q, {cycle.source}, {cycle.source}, {{term}});
}

/// Solves the Vandermonde system at sample points 0, 1, ..., n (n = alpha at
/// the base vertex) so that the certificate reproduces Tr_l exactly, then
/// verifies the polynomial identity before returning.
inline TraceCertificate trace_from_dets(const AmbientPtr& amb, const Path& cycle) {
    if (!cycle.is_cycle()) fail("not a cycle", "trace_from_dets needs an oriented cycle");
    const int n = static_cast<int>(amb->alpha[cycle.source]);
    TraceCertificate cert;
    cert.cycle = cycle;
    for (int m = 0; m <= n; ++m) cert.lambdas.emplace_back(m);
    // det(I + lambda X_l) = sum_j lambda^j sigma_j; we want the coefficient of
    // lambda^1, so solve sum_m c_m lambda_m^j = delta_{j,1} for j = 0..n.
    RatMatrix vdm(n + 1, n + 1);
    std::vector<Rat> rhs(n + 1);
    for (int j = 0; j <= n; ++j) {
        for (int m = 0; m <= n; ++m) {
            Rat p = 1;
            for (int k = 0; k < j; ++k) p *= cert.lambdas[m];
            vdm.at(j, m) = p;
        }
        rhs[j] = (j == 1) ? 1 : 0;
    }
    auto sol = solve_linear(vdm, rhs);
    if (!sol) fail("singular", "Vandermonde system unexpectedly singular");
    cert.coeffs = *sol;

    Poly lhs = Poly::zero(amb);
    for (int m = 0; m <= n; ++m) {
        AddMap phi = unit_plus_lambda_cycle(amb->quiver, cycle, cert.lambdas[m]);
        lhs = lhs + det_semiinvariant(amb, phi).scaled(cert.coeffs[m]);
    }
    if (!(lhs == trace_invariant(amb, cycle)))
        fail("determinant cross-check", "trace certificate identity failed");
    return cert;
}

// ---------------------------------------------------------------------------
// functor pullback on polynomials

/// s(f) = f o s on coordinate rings: substitutes, for each dom-arrow a', the
/// realization of its image path combination over (cod, alpha) into the block
/// of a'. f must live over (dom, alpha o s).
inline Poly apply_functor_poly(const FunctorData& s, const Poly& f, const DimVector& alpha_on_cod) {
    check_functor(s);
    AmbientPtr cod_amb = make_ambient(s.cod, alpha_on_cod);
    DimVector alpha_dom = apply_functor_dim(s, alpha_on_cod);
    if (!(f.ambient()->quiver == s.dom) || !(f.ambient()->alpha == alpha_dom))
        fail("ambient mismatch", "apply_functor_poly: polynomial not over (dom, alpha o s)");
    // realize each dom arrow once
    std::vector<PolyMatrix> images;
    for (int a = 0; a < s.dom.num_arrows(); ++a)
        images.push_back(realize_comb(cod_amb, s.arrow_map[a]));
    Poly out = Poly::zero(cod_amb);
    for (const auto& [m, c] : f.terms()) {
        Poly term = Poly::constant(cod_amb, c);
        for (const auto& [x, e] : m.factors) {
            const Poly& sub = images[x.arrow][x.row - 1][x.col - 1];
            if (sub.is_zero()) {
                term = Poly::zero(cod_amb);
                break;
            }
            for (int k = 0; k < e; ++k) term = term * sub;
        }
        out = out + term;
    }
    return out;
}

// ---------------------------------------------------------------------------
// standard pairs

/// A pair (Q, alpha) is standard when Q is a single loop, or Q is bipartite
/// (every vertex purely initial or purely terminal) and every vertex v meets
/// exactly alpha(v) arrow endpoints.
inline bool standard_pair_check(const Quiver& q, const DimVector& alpha) {
    check_dimvector(q, alpha, "standard_pair_check");
    if (q.num_vertices() == 1 && q.num_arrows() == 1 && q.source(0) == q.target(0)) return true;
    std::vector<long long> out_deg(q.num_vertices(), 0), in_deg(q.num_vertices(), 0);
    for (int a = 0; a < q.num_arrows(); ++a) {
        if (q.source(a) == q.target(a)) return false;  // loops only in the one-loop case
        ++out_deg[q.source(a)];
        ++in_deg[q.target(a)];
    }
    for (int v = 0; v < q.num_vertices(); ++v) {
        if (out_deg[v] > 0 && in_deg[v] > 0) return false;  // not bipartite as oriented
        if (out_deg[v] + in_deg[v] != alpha[v]) return false;
    }
    return true;
}

/// For a standard bipartite pair: the all-arrows-summed map
/// (+)_{i in I} O(i) -> (+)_{j in J} O(j), entry (i,j) = sum of arrows i -> j.
inline AddMap standard_map(const Quiver& q) {
    std::vector<long long> out_deg(q.num_vertices(), 0), in_deg(q.num_vertices(), 0);
    for (int a = 0; a < q.num_arrows(); ++a) {
        ++out_deg[q.source(a)];
        ++in_deg[q.target(a)];
    }
    std::vector<int> src, tgt;
    for (int v = 0; v < q.num_vertices(); ++v) {
        if (out_deg[v] > 0) src.push_back(v);
        if (in_deg[v] > 0) tgt.push_back(v);
    }
    AddMap m = zero_addmap(q, src, tgt);
    for (int a = 0; a < q.num_arrows(); ++a) {
        int i = static_cast<int>(std::find(src.begin(), src.end(), q.source(a)) - src.begin());
        int j = static_cast<int>(std::find(tgt.begin(), tgt.end(), q.target(a)) - tgt.begin());
        m.entries[i][j] = comb_add(m.entries[i][j], comb_from_path(make_path(q, {a})));
    }
    return m;
}

/// The canonical invariant of a standard pair: the loop trace, or the
/// determinantal semi-invariant of the all-arrows map.
inline Poly standard_semiinvariant(const AmbientPtr& amb) {
    const Quiver& q = amb->quiver;
    if (!standard_pair_check(q, amb->alpha)) fail("pair not standard", "no standard semi-invariant");
    if (q.num_vertices() == 1 && q.num_arrows() == 1)
        return trace_invariant(amb, make_path(q, {0}));
    return det_semiinvariant(amb, standard_map(q));
}

}  // namespace qsi
