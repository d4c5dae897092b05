#pragma once

#include "qsi/enumerate.hpp"
#include "qsi/invariants.hpp"
#include "qsi/parallel.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace qsi {

// ---------------------------------------------------------------------------
// Weyl contraction data

/// The quintuple Gamma = (mu, nu, I, J, K) for the multilinear degree, stored
/// by its fibers: each I-element is a mu-fiber of alpha(v) arrows starting at
/// v, each J-element a nu-fiber of alpha(v) arrows ending at v, and each
/// K-element a pair (x, y) with t(x) = i(y) (nu^{-1}(k) = x, mu^{-1}(k) = y).
/// Index-set labels are quotiented away: fibers are sets, canonically sorted.
struct GammaData {
    struct Fiber {
        int vertex = -1;
        std::vector<int> arrows;  // ascending; the Levi-Civita fiber order
        auto operator<=>(const Fiber&) const = default;
    };
    std::vector<Fiber> i_fibers;
    std::vector<Fiber> j_fibers;
    std::vector<std::pair<int, int>> k_pairs;  // (x, y): arrow x feeds arrow y

    bool operator==(const GammaData&) const = default;
};

inline std::string gamma_str(const Quiver& q, const GammaData& g) {
    auto fibers = [&](const std::vector<GammaData::Fiber>& fs) {
        std::string s = "{";
        for (std::size_t i = 0; i < fs.size(); ++i) {
            if (i) s += ", ";
            s += q.vertex_name(fs[i].vertex) + ":(";
            for (std::size_t k = 0; k < fs[i].arrows.size(); ++k) {
                if (k) s += " ";
                s += q.arrow_name(fs[i].arrows[k]);
            }
            s += ")";
        }
        return s + "}";
    };
    std::string s = "Gamma{I=" + fibers(g.i_fibers) + " J=" + fibers(g.j_fibers) + " K={";
    for (std::size_t i = 0; i < g.k_pairs.size(); ++i) {
        if (i) s += ", ";
        s += q.arrow_name(g.k_pairs[i].first) + ">" + q.arrow_name(g.k_pairs[i].second);
    }
    return s + "}}";
}

namespace detail {

/// Partitions of `elems` into blocks of exactly `block_size`, in canonical
/// order (each block led by its least remaining element).
inline void partitions_into_blocks(const std::vector<int>& elems, int block_size,
                                   std::vector<std::vector<std::vector<int>>>& out) {
    if (elems.empty()) {
        out.push_back({});
        return;
    }
    // choose companions of elems[0]
    std::vector<int> rest(elems.begin() + 1, elems.end());
    std::vector<int> pick(block_size - 1);
    std::function<void(int, int)> choose = [&](int start, int depth) {
        if (depth == block_size - 1) {
            std::vector<int> block{elems[0]};
            std::vector<bool> used(rest.size(), false);
            for (int i = 0; i < block_size - 1; ++i) {
                block.push_back(rest[pick[i]]);
                used[pick[i]] = true;
            }
            std::vector<int> remaining;
            for (std::size_t i = 0; i < rest.size(); ++i)
                if (!used[i]) remaining.push_back(rest[i]);
            std::vector<std::vector<std::vector<int>>> sub;
            partitions_into_blocks(remaining, block_size, sub);
            for (auto& p : sub) {
                p.insert(p.begin(), block);
                out.push_back(std::move(p));
            }
            return;
        }
        for (int i = start; i <= static_cast<int>(rest.size()) - (block_size - 1 - depth); ++i) {
            pick[depth] = i;
            choose(i + 1, depth + 1);
        }
    };
    if (block_size == 1) {
        std::vector<std::vector<std::vector<int>>> sub;
        partitions_into_blocks(rest, 1, sub);
        for (auto& p : sub) {
            p.insert(p.begin(), {elems[0]});
            out.push_back(std::move(p));
        }
        return;
    }
    choose(0, 0);
}

}  // namespace detail

/// All admissible Gamma for the multilinear degree on (Q, alpha), one
/// canonical representative per relabeling class. Empty when the fiber-size
/// constraints are infeasible.
inline std::vector<GammaData> enumerate_gamma(const Quiver& q, const DimVector& alpha) {
    check_dimvector(q, alpha, "enumerate_gamma");
    const int n = q.num_arrows();
    std::vector<GammaData> out;

    // Step 1: K structures. Arrow x is scanned in order and either keeps its
    // nu-value in J or is paired (nu(x) = k = mu(y)) with a compatible y.
    std::vector<std::pair<int, int>> pairs;
    std::vector<bool> used_second(n, false);
    std::function<void(int)> gen_pairs = [&](int x) {
        if (x == n) {
            // Step 2: I-side fibers over arrows that are not second components.
            std::vector<std::vector<int>> by_source(q.num_vertices());
            for (int a = 0; a < n; ++a)
                if (!used_second[a]) by_source[q.source(a)].push_back(a);
            std::vector<std::vector<std::vector<GammaData::Fiber>>> i_choices;  // per vertex
            for (int v = 0; v < q.num_vertices(); ++v) {
                const auto& elems = by_source[v];
                if (elems.empty()) {
                    i_choices.push_back({{}});
                    continue;
                }
                if (alpha[v] == 0 || static_cast<long long>(elems.size()) % alpha[v] != 0)
                    return;  // infeasible
                std::vector<std::vector<std::vector<int>>> parts;
                detail::partitions_into_blocks(elems, static_cast<int>(alpha[v]), parts);
                std::vector<std::vector<GammaData::Fiber>> opts;
                for (auto& p : parts) {
                    std::vector<GammaData::Fiber> fs;
                    for (auto& blk : p) fs.push_back({v, blk});
                    opts.push_back(std::move(fs));
                }
                i_choices.push_back(std::move(opts));
            }
            // Step 3: J-side fibers over arrows that are not first components.
            std::vector<bool> used_first(n, false);
            for (const auto& [x0, y0] : pairs) used_first[x0] = true;
            std::vector<std::vector<int>> by_target(q.num_vertices());
            for (int a = 0; a < n; ++a)
                if (!used_first[a]) by_target[q.target(a)].push_back(a);
            std::vector<std::vector<std::vector<GammaData::Fiber>>> j_choices;
            for (int v = 0; v < q.num_vertices(); ++v) {
                const auto& elems = by_target[v];
                if (elems.empty()) {
                    j_choices.push_back({{}});
                    continue;
                }
                if (alpha[v] == 0 || static_cast<long long>(elems.size()) % alpha[v] != 0)
                    return;
                std::vector<std::vector<std::vector<int>>> parts;
                detail::partitions_into_blocks(elems, static_cast<int>(alpha[v]), parts);
                std::vector<std::vector<GammaData::Fiber>> opts;
                for (auto& p : parts) {
                    std::vector<GammaData::Fiber> fs;
                    for (auto& blk : p) fs.push_back({v, blk});
                    opts.push_back(std::move(fs));
                }
                j_choices.push_back(std::move(opts));
            }
            // cartesian products over vertices
            std::vector<std::vector<GammaData::Fiber>> i_sets{{}};
            for (const auto& opts : i_choices) {
                std::vector<std::vector<GammaData::Fiber>> next;
                for (const auto& acc : i_sets)
                    for (const auto& o : opts) {
                        auto merged = acc;
                        merged.insert(merged.end(), o.begin(), o.end());
                        next.push_back(std::move(merged));
                    }
                i_sets = std::move(next);
            }
            std::vector<std::vector<GammaData::Fiber>> j_sets{{}};
            for (const auto& opts : j_choices) {
                std::vector<std::vector<GammaData::Fiber>> next;
                for (const auto& acc : j_sets)
                    for (const auto& o : opts) {
                        auto merged = acc;
                        merged.insert(merged.end(), o.begin(), o.end());
                        next.push_back(std::move(merged));
                    }
                j_sets = std::move(next);
            }
            for (const auto& is : i_sets)
                for (const auto& js : j_sets) {
                    GammaData g;
                    g.i_fibers = is;
                    g.j_fibers = js;
                    g.k_pairs = pairs;
                    std::sort(g.i_fibers.begin(), g.i_fibers.end());
                    std::sort(g.j_fibers.begin(), g.j_fibers.end());
                    std::sort(g.k_pairs.begin(), g.k_pairs.end());
                    out.push_back(std::move(g));
                }
            return;
        }
        gen_pairs(x + 1);  // nu(x) stays in J
        for (int y = 0; y < n; ++y) {
            if (used_second[y] || q.source(y) != q.target(x)) continue;
            pairs.emplace_back(x, y);
            used_second[y] = true;
            gen_pairs(x + 1);
            used_second[y] = false;
            pairs.pop_back();
        }
    };
    gen_pairs(0);
    std::sort(out.begin(), out.end(), [](const GammaData& a, const GammaData& b) {
        if (a.k_pairs != b.k_pairs) return a.k_pairs < b.k_pairs;
        if (a.i_fibers != b.i_fibers) return a.i_fibers < b.i_fibers;
        return a.j_fibers < b.j_fibers;
    });
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline void check_gamma(const Quiver& q, const DimVector& alpha, const GammaData& g) {
    std::vector<int> mu_of(q.num_arrows(), -1), nu_of(q.num_arrows(), -1);
    for (std::size_t i = 0; i < g.i_fibers.size(); ++i)
        for (int a : g.i_fibers[i].arrows) {
            if (q.source(a) != g.i_fibers[i].vertex || mu_of[a] != -1)
                fail("shape mismatch", "invalid Gamma I-fiber");
            mu_of[a] = static_cast<int>(i);
        }
    for (std::size_t j = 0; j < g.j_fibers.size(); ++j)
        for (int a : g.j_fibers[j].arrows) {
            if (q.target(a) != g.j_fibers[j].vertex || nu_of[a] != -1)
                fail("shape mismatch", "invalid Gamma J-fiber");
            nu_of[a] = static_cast<int>(j);
        }
    for (const auto& [x, y] : g.k_pairs) {
        if (q.target(x) != q.source(y)) fail("endpoint mismatch", "invalid Gamma K-pair");
        if (nu_of[x] != -1 || mu_of[y] != -1) fail("shape mismatch", "Gamma K-pair overlaps fibers");
        nu_of[x] = -2;
        mu_of[y] = -2;
    }
    for (int a = 0; a < q.num_arrows(); ++a)
        if (mu_of[a] == -1 || nu_of[a] == -1)
            fail("shape mismatch", "Gamma does not cover every arrow");
    for (const auto& f : g.i_fibers)
        if (static_cast<long long>(f.arrows.size()) != alpha[f.vertex])
            fail("shape mismatch", "Gamma I-fiber size != alpha");
    for (const auto& f : g.j_fibers)
        if (static_cast<long long>(f.arrows.size()) != alpha[f.vertex])
            fail("shape mismatch", "Gamma J-fiber size != alpha");
}

namespace detail {

/// Levi-Civita sign of a tuple of 1-based indices; 0 on repeats.
inline int levi_civita(const std::vector<int>& idx) {
    int sign = 1;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) {
            if (idx[i] == idx[j]) return 0;
            if (idx[i] > idx[j]) sign = -sign;
        }
    return sign;
}

}  // namespace detail

/// The Weyl contraction invariant f_Gamma, realized by summing over all row
/// and column index assignments: epsilon factors over the mu/nu fibers (in
/// canonical arrow order), delta contractions over K, one coordinate factor
/// per arrow. Multilinear by construction; defined up to the global sign
/// fixed by the fiber order.
inline Poly f_gamma(const AmbientPtr& amb, const GammaData& g) {
    const Quiver& q = amb->quiver;
    check_gamma(q, amb->alpha, g);
    const int n = q.num_arrows();
    std::vector<int> r(n, 1), c(n, 1);
    std::vector<std::pair<Monomial, Rat>> terms;
    for (int a = 0; a < n; ++a)
        if (amb->alpha[q.source(a)] == 0 || amb->alpha[q.target(a)] == 0)
            return Poly::zero(amb);  // no assignments at all

    std::function<void(int)> sweep = [&](int pos) {
        if (pos == 2 * n) {
            int sign = 1;
            for (const auto& f : g.i_fibers) {
                std::vector<int> tup;
                for (int a : f.arrows) tup.push_back(r[a]);
                sign *= detail::levi_civita(tup);
                if (!sign) return;
            }
            for (const auto& f : g.j_fibers) {
                std::vector<int> tup;
                for (int a : f.arrows) tup.push_back(c[a]);
                sign *= detail::levi_civita(tup);
                if (!sign) return;
            }
            for (const auto& [x, y] : g.k_pairs)
                if (c[x] != r[y]) return;
            Monomial m;
            for (int a = 0; a < n; ++a) m.factors.push_back({Coord{a, r[a], c[a]}, 1});
            std::sort(m.factors.begin(), m.factors.end(),
                      [](const auto& u, const auto& v) { return u.first < v.first; });
            terms.emplace_back(std::move(m), Rat(sign));
            return;
        }
        const bool is_row = pos < n;
        const int a = is_row ? pos : pos - n;
        const int bound =
            static_cast<int>(is_row ? amb->alpha[q.source(a)] : amb->alpha[q.target(a)]);
        for (int i = 1; i <= bound; ++i) {
            (is_row ? r[a] : c[a]) = i;
            sweep(pos + 1);
        }
    };
    sweep(0);
    return Poly::from_terms(amb, std::move(terms));
}

// ---------------------------------------------------------------------------
// the Phi_Gamma construction with the Q(A,K) reduction

struct PhiGammaResult {
    AddMap phi;               // over Q, rows indexed by I, columns by J
    std::vector<Path> cycles;  // trace factors from the cycle components of Q(A,K)
    ADegree chi;               // weight 1 on every arrow covered by phi's paths
};

/// Builds Q(A,K) (vertices = arrows of Q, arrows = K), splits it into cycle
/// and open-path components, emits Tr factors for the cycles and composite
/// paths p_M for the rest, and assembles Phi with (i,j)-entry the sum of the
/// composite paths whose (mu, nu) values are (i, j). Isolated vertices of
/// Q(A,K) count as length-one open paths.
inline PhiGammaResult phi_gamma(const AmbientPtr& amb, const GammaData& g) {
    const Quiver& q = amb->quiver;
    check_gamma(q, amb->alpha, g);
    const int n = q.num_arrows();
    std::vector<int> next(n, -1), prev(n, -1);
    for (const auto& [x, y] : g.k_pairs) {
        next[x] = y;
        prev[y] = x;
    }
    std::vector<bool> visited(n, false);
    std::vector<std::vector<int>> open_chains;
    for (int a = 0; a < n; ++a) {
        if (visited[a] || prev[a] != -1) continue;
        std::vector<int> chain;
        for (int cur = a; cur != -1; cur = next[cur]) {
            chain.push_back(cur);
            visited[cur] = true;
        }
        open_chains.push_back(std::move(chain));
    }
    std::vector<Path> cycles;
    for (int a = 0; a < n; ++a) {
        if (visited[a]) continue;
        std::vector<int> cyc;
        int cur = a;
        do {
            cyc.push_back(cur);
            visited[cur] = true;
            cur = next[cur];
        } while (cur != a);
        cycles.push_back(make_path(q, least_rotation(cyc)));
    }
    std::sort(cycles.begin(), cycles.end());

    PhiGammaResult res;
    res.cycles = std::move(cycles);
    res.chi = ADegree::zeros(n);

    // which I/J fiber each composite path attaches to
    std::vector<int> mu_fiber(n, -1), nu_fiber(n, -1);
    for (std::size_t i = 0; i < g.i_fibers.size(); ++i)
        for (int a : g.i_fibers[i].arrows) mu_fiber[a] = static_cast<int>(i);
    for (std::size_t j = 0; j < g.j_fibers.size(); ++j)
        for (int a : g.j_fibers[j].arrows) nu_fiber[a] = static_cast<int>(j);

    std::vector<int> src, tgt;
    for (const auto& f : g.i_fibers) src.push_back(f.vertex);
    for (const auto& f : g.j_fibers) tgt.push_back(f.vertex);
    AddMap phi = zero_addmap(q, src, tgt);
    for (const auto& chain : open_chains) {
        Path p = make_path(q, chain);
        for (int a : chain) res.chi[a] = 1;
        const int i = mu_fiber[chain.front()];
        const int j = nu_fiber[chain.back()];
        if (i < 0 || j < 0) fail("shape mismatch", "open chain boundary not in I or J");
        phi.entries[i][j] = comb_add(phi.entries[i][j], comb_from_path(p));
    }
    res.phi = std::move(phi);
    return res;
}

/// Contraction identity check: f_Gamma = +- (chi-component of P_{Phi_Gamma})
/// times the trace factors, as exact polynomials. Returns the resolved sign
/// (0 when the identity fails).
inline int contraction_identity_sign(const AmbientPtr& amb, const GammaData& g) {
    Poly lhs = f_gamma(amb, g);
    PhiGammaResult pg = phi_gamma(amb, g);
    Poly rhs = a_degree_component(det_semiinvariant(amb, pg.phi), pg.chi);
    for (const Path& l : pg.cycles) rhs = rhs * trace_invariant(amb, l);
    if (lhs == rhs) return 1;
    if (lhs == -rhs) return -1;
    return 0;
}

inline bool check_contraction_identity(const AmbientPtr& amb, const GammaData& g) {
    return contraction_identity_sign(amb, g) != 0;
}

// ---------------------------------------------------------------------------
// polarization quiver

struct QChi {
    Quiver qchi;
    FunctorData sigma;  // add(Q) -> add(Q_chi), sigma(a) = sum_i a_i
    FunctorData pi;     // add(Q_chi) -> add(Q), pi(a_i) = a
    ADegree chi;        // over Q
};

/// The polarization quiver Q_chi: arrow a splits into m_a parallel copies
/// a_1..a_{m_a}; arrows of degree zero are deleted (restriction to the
/// smaller quiver). sigma and pi are returned as functor data.
inline QChi build_q_chi(const Quiver& q, const ADegree& chi) {
    if (chi.size() != q.num_arrows()) fail("shape mismatch", "A-degree arity");
    std::vector<std::tuple<std::string, std::string, std::string>> arrows;
    std::map<std::string, std::pair<int, int>> origin;  // copy name -> (arrow, copy index)
    for (int a = 0; a < q.num_arrows(); ++a) {
        if (chi[a] < 0) fail("shape mismatch", "negative A-degree");
        for (long long k = 1; k <= chi[a]; ++k) {
            std::string name = q.arrow_name(a) + "_" + std::to_string(k);
            arrows.emplace_back(name, q.vertex_name(q.source(a)), q.vertex_name(q.target(a)));
            origin[name] = {a, static_cast<int>(k)};
        }
    }
    QChi out;
    out.chi = chi;
    out.qchi = validate_quiver(q.vertices(), arrows);

    out.sigma.dom = q;
    out.sigma.cod = out.qchi;
    for (int v = 0; v < q.num_vertices(); ++v)
        out.sigma.vertex_map.push_back(out.qchi.vertex_index(q.vertex_name(v)));
    std::vector<PathComb> images;
    for (int a = 0; a < q.num_arrows(); ++a) {
        PathComb acc = zero_comb(out.sigma.vertex_map[q.source(a)],
                                 out.sigma.vertex_map[q.target(a)]);
        for (long long k = 1; k <= chi[a]; ++k) {
            int idx = out.qchi.arrow_index(q.arrow_name(a) + "_" + std::to_string(k));
            acc = comb_add(acc, comb_from_path(make_path(out.qchi, {idx})));
        }
        out.sigma.arrow_map.push_back(std::move(acc));
    }
    check_functor(out.sigma);

    out.pi.dom = out.qchi;
    out.pi.cod = q;
    for (int v = 0; v < out.qchi.num_vertices(); ++v)
        out.pi.vertex_map.push_back(q.vertex_index(out.qchi.vertex_name(v)));
    for (int a2 = 0; a2 < out.qchi.num_arrows(); ++a2) {
        int orig = origin.at(out.qchi.arrow_name(a2)).first;
        out.pi.arrow_map.push_back(comb_from_path(make_path(q, {orig})));
    }
    check_functor(out.pi);
    return out;
}

/// f-tilde: the multilinear component of the sigma-pullback of f, which must
/// be A-homogeneous of degree chi.
inline Poly polarize(const QChi& qc, const Poly& f) {
    auto deg = a_degree_if_homogeneous(f);
    if (!f.is_zero() && (!deg || !(*deg == qc.chi)))
        fail("not homogeneous", "polarize: polynomial is not A-homogeneous of the given degree");
    DimVector alpha_chi = apply_functor_dim(qc.pi, f.ambient()->alpha);  // same entries, Q_chi order
    Poly pulled = apply_functor_poly(qc.sigma, f, alpha_chi);
    ADegree ones(std::vector<long long>(qc.qchi.num_arrows(), 1));
    return a_degree_component(pulled, ones);
}

/// pi-pullback back to (Q, alpha); restitute(polarize(f)) = prod_a m_a! * f.
inline Poly restitute(const QChi& qc, const Poly& ftilde, const DimVector& alpha_on_q) {
    return apply_functor_poly(qc.pi, ftilde, alpha_on_q);
}

// ---------------------------------------------------------------------------
// independent weight-space oracle

/// All monomials of A-degree chi over (Q, alpha), in descending canonical
/// order.
inline std::vector<Monomial> monomials_of_degree(const Ambient& amb, const ADegree& chi) {
    std::vector<std::vector<Monomial>> per_arrow;
    for (int a = 0; a < amb.quiver.num_arrows(); ++a) {
        const long long m = chi[a];
        if (m == 0) continue;
        std::vector<Coord> coords;
        for (int r = 1; r <= amb.alpha[amb.quiver.source(a)]; ++r)
            for (int c = 1; c <= amb.alpha[amb.quiver.target(a)]; ++c)
                coords.push_back(Coord{a, r, c});
        if (coords.empty()) return {};  // positive degree on a zero block
        // multisets of size m over coords
        std::vector<Monomial> monos;
        std::vector<int> pick(m);
        std::function<void(int, int)> rec = [&](int depth, int start) {
            if (depth == m) {
                Monomial mono;
                for (int i = 0; i < m; ++i) {
                    if (!mono.factors.empty() && mono.factors.back().first == coords[pick[i]])
                        ++mono.factors.back().second;
                    else
                        mono.factors.push_back({coords[pick[i]], 1});
                }
                monos.push_back(std::move(mono));
                return;
            }
            for (int i = start; i < static_cast<int>(coords.size()); ++i) {
                pick[depth] = i;
                rec(depth + 1, i);
            }
        };
        rec(0, 0);
        per_arrow.push_back(std::move(monos));
    }
    std::vector<Monomial> all{Monomial{}};
    for (const auto& opts : per_arrow) {
        std::vector<Monomial> next;
        for (const auto& acc : all)
            for (const auto& o : opts) next.push_back(Poly::mul_monomials(acc, o));
        all = std::move(next);
    }
    std::sort(all.begin(), all.end(), monomial_before);
    return all;
}

/// Basis of the semi-invariants of A-degree chi, computed independently of
/// every determinantal construction: the joint kernel of all infinitesimal
/// sl(alpha(v)) derivations on the finite-dimensional degree-chi component,
/// returned in canonical echelon form over the monomial basis.
inline std::vector<Poly> weight_space_basis(const AmbientPtr& amb, const ADegree& chi) {
    for (auto e : chi.entries)
        if (e < 0) fail("shape mismatch", "negative A-degree");
    std::vector<Monomial> monos = monomials_of_degree(*amb, chi);
    if (monos.empty()) return {};
    const int dim = static_cast<int>(monos.size());
    auto mono_index = [&](const Monomial& m) {
        auto it = std::lower_bound(monos.begin(), monos.end(), m, monomial_before);
        if (it == monos.end() || !(*it == m)) fail("shape mismatch", "monomial outside the chi-block");
        return static_cast<int>(it - monos.begin());
    };

    std::vector<std::vector<Rat>> rows;
    for (int v = 0; v < amb->quiver.num_vertices(); ++v) {
        const int nv = static_cast<int>(amb->alpha[v]);
        if (nv < 2) continue;
        for (const RatMatrix& E : traceless_basis(nv)) {
            // one equation row per (E, output monomial); build D columns
            std::vector<std::vector<Rat>> cols(dim);
            for (int j = 0; j < dim; ++j) {
                Poly dj = derive(Poly::from_terms(amb, {{monos[j], Rat(1)}}), v, E);
                for (const auto& [m, c] : dj.terms()) {
                    int i = mono_index(m);
                    if (cols[j].empty()) cols[j].assign(dim, Rat(0));
                    cols[j][i] += c;
                }
            }
            for (int i = 0; i < dim; ++i) {
                std::vector<Rat> row(dim, Rat(0));
                bool nonzero = false;
                for (int j = 0; j < dim; ++j) {
                    if (cols[j].empty()) continue;
                    if (cols[j][i] != 0) {
                        row[j] = cols[j][i];
                        nonzero = true;
                    }
                }
                if (nonzero) rows.push_back(std::move(row));
            }
        }
    }
    std::vector<std::vector<Rat>> kernel;
    if (rows.empty()) {
        kernel.resize(dim);
        for (int j = 0; j < dim; ++j) {
            kernel[j].assign(dim, Rat(0));
            kernel[j][j] = 1;
        }
    } else {
        RatMatrix sys(static_cast<int>(rows.size()), dim);
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (int j = 0; j < dim; ++j) sys.at(static_cast<int>(i), j) = rows[i][j];
        kernel = right_nullspace(sys);
    }
    RowSpace space(dim);
    for (auto& v : kernel) space.insert(std::move(v));
    std::vector<Poly> basis;
    for (const auto& row : space.rows()) {
        std::vector<std::pair<Monomial, Rat>> terms;
        for (int j = 0; j < dim; ++j)
            if (row[j] != 0) terms.emplace_back(monos[j], row[j]);
        basis.push_back(Poly::from_terms(amb, std::move(terms)));
    }
    return basis;
}

// ---------------------------------------------------------------------------
// span verification

struct SpanOptions {
    char strategy = 'A';
    MapEnumBounds bounds;    // strategy B map enumeration
    int trace_max_len = 3;   // strategy B trace monomials
    bool early_stop = true;  // stop strategy B once the oracle dimension is reached
};

struct SpanReport {
    char strategy = 'A';
    std::string alpha_str;
    std::string chi_str;
    long long oracle_dim = 0;
    long long span_dim = 0;
    bool containment = true;
    bool equality = false;
    std::vector<std::string> inventory;  // one line per basis-contributing generator
    std::vector<std::string> notes;

    std::string render() const {
        std::string s;
        s += "span-check strategy=" + std::string(1, strategy) + " alpha=" + alpha_str +
             " chi=" + chi_str + "\n";
        s += "oracle dimension: " + std::to_string(oracle_dim) + "\n";
        s += "span dimension:   " + std::to_string(span_dim) + "\n";
        s += "containment:      " + std::string(containment ? "yes" : "NO") + "\n";
        s += "verdict:          " + std::string(equality ? "EQUAL" : "NOT EQUAL") + "\n";
        for (const auto& g : inventory) s += "generator: " + g + "\n";
        for (const auto& n : notes) s += "note: " + n + "\n";
        return s;
    }
};

namespace detail {

inline std::string dimvector_str(const Quiver& q, const DimVector& d) {
    std::string s;
    for (int v = 0; v < q.num_vertices(); ++v) {
        if (v) s += ",";
        s += q.vertex_name(v) + ":" + std::to_string(d[v]);
    }
    return s;
}

inline std::string adegree_str(const Quiver& q, const ADegree& d) {
    std::string s;
    for (int a = 0; a < q.num_arrows(); ++a) {
        if (a) s += ",";
        s += q.arrow_name(a) + ":" + std::to_string(d[a]);
    }
    return s;
}

inline std::vector<Rat> poly_coords(const Poly& f, const std::vector<Monomial>& monos) {
    std::vector<Rat> v(monos.size(), Rat(0));
    for (const auto& [m, c] : f.terms()) {
        auto it = std::lower_bound(monos.begin(), monos.end(), m, monomial_before);
        if (it == monos.end() || !(*it == m))
            fail("shape mismatch", "candidate leaves the chi-block");
        v[it - monos.begin()] = c;
    }
    return v;
}

}  // namespace detail

/// Desk-scale span verification at one (Q, alpha, chi): do the
/// determinantal semi-invariants fill the whole weight space?
/// Strategy A polarizes: every admissible Gamma on (Q_chi, alpha) is
/// evaluated, restituted, and row-reduced against the oracle. Strategy B
/// enumerates determinantal semi-invariants directly within bounds,
/// optionally multiplied by trace monomials. Containment of every candidate
/// in the oracle space is checked unconditionally.
inline SpanReport span_check(const AmbientPtr& amb, const ADegree& chi, const SpanOptions& opt) {
    SpanReport rep;
    rep.strategy = opt.strategy;
    rep.alpha_str = detail::dimvector_str(amb->quiver, amb->alpha);
    rep.chi_str = detail::adegree_str(amb->quiver, chi);

    std::vector<Monomial> monos = monomials_of_degree(*amb, chi);
    std::vector<Poly> oracle = weight_space_basis(amb, chi);
    rep.oracle_dim = static_cast<long long>(oracle.size());
    RowSpace oracle_space(static_cast<int>(monos.size()));
    for (const Poly& f : oracle) oracle_space.insert(detail::poly_coords(f, monos));
    RowSpace span_space(static_cast<int>(monos.size()));

    auto process = [&](const Poly& cand, const std::string& desc) {
        if (cand.is_zero()) return;
        std::vector<Rat> v = detail::poly_coords(cand, monos);
        if (!oracle_space.contains(v)) {
            rep.containment = false;
            rep.notes.push_back("containment violated by " + desc);
        }
        if (span_space.insert(std::move(v))) rep.inventory.push_back(desc);
    };

    if (opt.strategy == 'A') {
        QChi qc = build_q_chi(amb->quiver, chi);
        DimVector alpha_chi = apply_functor_dim(qc.pi, amb->alpha);
        AmbientPtr amb_chi = make_ambient(qc.qchi, alpha_chi);
        std::vector<GammaData> gammas = enumerate_gamma(qc.qchi, alpha_chi);
        std::vector<Poly> cands = parallel_map(gammas, [&](const GammaData& g) {
            return restitute(qc, f_gamma(amb_chi, g), amb->alpha);
        });
        for (std::size_t i = 0; i < cands.size(); ++i)
            process(cands[i], gamma_str(qc.qchi, gammas[i]));
        if (gammas.empty()) rep.notes.push_back("no admissible Gamma at this degree");
    } else if (opt.strategy == 'B') {
        // trace monomials of componentwise degree <= chi
        std::vector<Path> cycles = is_acyclic(amb->quiver)
                                       ? std::vector<Path>{}
                                       : enumerate_cycles(amb->quiver, opt.trace_max_len);
        struct TraceMon {
            Poly poly;
            ADegree deg;
            std::string desc;
        };
        std::vector<TraceMon> tmons;
        std::function<void(std::size_t, Poly, ADegree, std::string)> build =
            [&](std::size_t i, Poly acc, ADegree deg, std::string desc) {
                for (auto e : deg.entries)
                    if (e < 0) return;
                tmons.push_back({acc, deg, desc});
                for (std::size_t k = i; k < cycles.size(); ++k) {
                    ADegree d2 = deg;
                    bool ok = true;
                    for (int arr : cycles[k].arrows) {
                        if (++d2[arr] > chi[arr]) {
                            ok = false;
                            break;
                        }
                    }
                    if (!ok) continue;
                    build(k, acc * trace_invariant(amb, cycles[k]), d2,
                          desc + "*Tr(" + path_str(amb->quiver, cycles[k]) + ")");
                }
            };
        build(0, Poly::constant(amb, 1), ADegree::zeros(amb->quiver.num_arrows()), "");
        long long maps_seen = 0;
        MapEnumStats stats = enumerate_addmaps(
            amb->quiver, amb->alpha, opt.bounds, [&](const AddMap& phi) {
                ++maps_seen;
                Poly p = det_semiinvariant(amb, phi);
                if (!p.is_zero()) {
                    for (const TraceMon& t : tmons) {
                        ADegree residual = chi;
                        bool ok = true;
                        for (int a = 0; a < residual.size(); ++a) {
                            residual[a] -= t.deg[a];
                            if (residual[a] < 0) ok = false;
                        }
                        if (!ok) continue;
                        Poly comp = a_degree_component(p, residual);
                        if (comp.is_zero()) continue;
                        process(comp * t.poly, "P[" + addmap_str(phi) + "],chi-part=" +
                                                   detail::adegree_str(amb->quiver, residual) +
                                                   t.desc);
                    }
                }
                if (opt.early_stop && rep.containment &&
                    span_space.rank() == static_cast<int>(oracle.size()))
                    return false;
                return true;
            });
        rep.notes.push_back("maps examined: " + std::to_string(maps_seen));
        if (stats.truncated)
            rep.notes.push_back("enumeration budget exhausted before the bounds");
        if (opt.early_stop && span_space.rank() == static_cast<int>(oracle.size()))
            rep.notes.push_back("stopped at oracle dimension");
    } else {
        fail("parse error", "unknown span strategy");
    }

    rep.span_dim = span_space.rank();
    rep.equality = rep.containment && rep.span_dim == rep.oracle_dim;
    return rep;
}

}  // namespace qsi
