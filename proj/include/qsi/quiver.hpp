#pragma once

#include "qsi/common.hpp"

#include <algorithm>
#include <compare>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace qsi {

/// A finite directed multigraph. Vertex and arrow identifiers are strings;
/// both lists are kept sorted lexicographically, and that order is the
/// canonical order used by every downstream construction (slot layouts,
/// monomial orders, Levi-Civita fiber orders).
class Quiver {
public:
    struct Arrow {
        std::string id;
        int from = -1;
        int to = -1;
        bool operator==(const Arrow&) const = default;
    };

    Quiver() = default;

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<Arrow>& arrows() const { return arrows_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_arrows() const { return static_cast<int>(arrows_.size()); }

    const std::string& vertex_name(int v) const { return vertices_.at(v); }
    const std::string& arrow_name(int a) const { return arrows_.at(a).id; }
    int source(int a) const { return arrows_.at(a).from; }
    int target(int a) const { return arrows_.at(a).to; }

    int vertex_index(const std::string& id) const {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
        if (it == vertices_.end() || *it != id)
            fail("unknown vertex", "no vertex '" + id + "'");
        return static_cast<int>(it - vertices_.begin());
    }

    std::optional<int> find_vertex(const std::string& id) const {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
        if (it == vertices_.end() || *it != id) return std::nullopt;
        return static_cast<int>(it - vertices_.begin());
    }

    int arrow_index(const std::string& id) const {
        for (int a = 0; a < num_arrows(); ++a)
            if (arrows_[a].id == id) return a;
        fail("unknown arrow", "no arrow '" + id + "'");
    }

    std::optional<int> find_arrow(const std::string& id) const {
        for (int a = 0; a < num_arrows(); ++a)
            if (arrows_[a].id == id) return a;
        return std::nullopt;
    }

    bool operator==(const Quiver&) const = default;

    friend Quiver validate_quiver(std::vector<std::string> vertices,
                                  std::vector<std::tuple<std::string, std::string, std::string>> arrows);

private:
    std::vector<std::string> vertices_;
    std::vector<Arrow> arrows_;
};

/// Validates a raw description (vertex ids, arrows as (id, from, to)) and
/// returns the canonically ordered quiver. Rejects duplicate identifiers and
/// dangling endpoints.
inline Quiver validate_quiver(std::vector<std::string> vertices,
                              std::vector<std::tuple<std::string, std::string, std::string>> arrows) {
    Quiver q;
    std::sort(vertices.begin(), vertices.end());
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i)
        if (vertices[i] == vertices[i + 1])
            fail("duplicate identifier", "duplicate vertex '" + vertices[i] + "'");
    q.vertices_ = std::move(vertices);

    std::sort(arrows.begin(), arrows.end(),
              [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    for (std::size_t i = 0; i + 1 < arrows.size(); ++i)
        if (std::get<0>(arrows[i]) == std::get<0>(arrows[i + 1]))
            fail("duplicate identifier", "duplicate arrow '" + std::get<0>(arrows[i]) + "'");
    for (const auto& [id, from, to] : arrows) {
        auto f = q.find_vertex(from);
        auto t = q.find_vertex(to);
        if (!f || !t)
            fail("dangling endpoint",
                 "arrow '" + id + "' has endpoint outside the vertex set");
        q.arrows_.push_back({id, *f, *t});
    }
    return q;
}

/// Dimension vector: one natural number per vertex, aligned with the quiver's
/// canonical vertex order.
struct DimVector {
    std::vector<long long> entries;

    DimVector() = default;
    explicit DimVector(std::vector<long long> e) : entries(std::move(e)) {}
    static DimVector zeros(int n) { return DimVector(std::vector<long long>(n, 0)); }

    long long operator[](int v) const { return entries.at(v); }
    long long& operator[](int v) { return entries.at(v); }
    int size() const { return static_cast<int>(entries.size()); }
    bool operator==(const DimVector&) const = default;

    long long total() const {
        long long s = 0;
        for (auto e : entries) s += e;
        return s;
    }
};

inline void check_dimvector(const Quiver& q, const DimVector& d, const std::string& what) {
    if (d.size() != q.num_vertices())
        fail("shape mismatch", what + ": expected " + std::to_string(q.num_vertices()) +
                                   " entries, got " + std::to_string(d.size()));
    for (auto e : d.entries)
        if (e < 0) fail("shape mismatch", what + ": negative entry");
}

inline DimVector add(const DimVector& a, const DimVector& b) {
    DimVector r = a;
    for (int i = 0; i < r.size(); ++i) r[i] += b[i];
    return r;
}

/// A path in the quiver: a composable arrow sequence, possibly empty (the
/// trivial path e_v, for which source == target == v). Composition is written
/// left to right: the sequence a_1 ... a_n requires t(a_i) = i(a_{i+1}).
struct Path {
    int source = -1;
    int target = -1;
    std::vector<int> arrows;

    int length() const { return static_cast<int>(arrows.size()); }
    bool is_trivial() const { return arrows.empty(); }
    bool is_cycle() const { return source == target; }

    bool operator==(const Path&) const = default;

    // Canonical order: (length, arrow sequence, source). Arrow indices follow
    // the lexicographic arrow-id order, so index order equals id order.
    std::strong_ordering operator<=>(const Path& o) const {
        if (auto c = length() <=> o.length(); c != 0) return c;
        if (auto c = arrows <=> o.arrows; c != 0) return c;
        return source <=> o.source;
    }
};

inline Path trivial_path(int v) { return Path{v, v, {}}; }

/// Builds a path from an arrow index sequence, validating composability.
inline Path make_path(const Quiver& q, const std::vector<int>& arrows, int source_if_trivial = -1) {
    if (arrows.empty()) {
        if (source_if_trivial < 0 || source_if_trivial >= q.num_vertices())
            fail("endpoint mismatch", "trivial path needs a base vertex");
        return trivial_path(source_if_trivial);
    }
    for (std::size_t i = 0; i + 1 < arrows.size(); ++i)
        if (q.target(arrows[i]) != q.source(arrows[i + 1]))
            fail("endpoint mismatch",
                 "arrows '" + q.arrow_name(arrows[i]) + "' and '" + q.arrow_name(arrows[i + 1]) +
                     "' do not compose");
    return Path{q.source(arrows.front()), q.target(arrows.back()), arrows};
}

inline Path compose_paths(const Quiver& q, const Path& p, const Path& r) {
    if (p.target != r.source)
        fail("endpoint mismatch",
             "cannot compose: target " + q.vertex_name(p.target) + " != source " +
                 q.vertex_name(r.source));
    Path out;
    out.source = p.source;
    out.target = r.target;
    out.arrows = p.arrows;
    out.arrows.insert(out.arrows.end(), r.arrows.begin(), r.arrows.end());
    return out;
}

inline std::string path_str(const Quiver& q, const Path& p) {
    if (p.is_trivial()) return "e_" + q.vertex_name(p.source);
    std::string s;
    for (std::size_t i = 0; i < p.arrows.size(); ++i) {
        if (i) s += ".";
        s += q.arrow_name(p.arrows[i]);
    }
    return s;
}

/// All paths from v to w of length <= max_len, complete for that bound and in
/// canonical order.
inline std::vector<Path> enumerate_paths(const Quiver& q, int v, int w, int max_len) {
    if (max_len < 0) fail("shape mismatch", "enumerate_paths: negative bound");
    std::vector<Path> out;
    // frontier of paths starting at v, grown one arrow at a time
    std::vector<Path> frontier{trivial_path(v)};
    if (v == w) out.push_back(frontier.front());
    for (int len = 1; len <= max_len; ++len) {
        std::vector<Path> next;
        for (const Path& p : frontier) {
            for (int a = 0; a < q.num_arrows(); ++a) {
                if (q.source(a) != p.target) continue;
                Path e = p;
                e.arrows.push_back(a);
                e.target = q.target(a);
                next.push_back(e);
            }
        }
        for (const Path& p : next)
            if (p.target == w) out.push_back(p);
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Lexicographically least rotation of a cycle's arrow sequence.
inline std::vector<int> least_rotation(const std::vector<int>& a) {
    std::vector<int> best = a;
    std::vector<int> cur = a;
    for (std::size_t i = 1; i < a.size(); ++i) {
        std::rotate(cur.begin(), cur.begin() + 1, cur.end());
        if (cur < best) best = cur;
    }
    return best;
}

/// All oriented cycles of length in [1, max_len], one representative per
/// rotation class (the lexicographically least rotation), in canonical order.
/// A rotation of a closed chain is only a valid path when the cut point is
/// consistent, which always holds for cycles.
inline std::vector<Path> enumerate_cycles(const Quiver& q, int max_len) {
    if (max_len < 1) fail("shape mismatch", "enumerate_cycles: bound must be >= 1");
    std::vector<Path> out;
    for (int v = 0; v < q.num_vertices(); ++v)
        for (const Path& p : enumerate_paths(q, v, v, max_len))
            if (!p.is_trivial() && least_rotation(p.arrows) == p.arrows) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_acyclic(const Quiver& q) {
    // Kahn's algorithm on the underlying multigraph.
    std::vector<int> indeg(q.num_vertices(), 0);
    for (int a = 0; a < q.num_arrows(); ++a) ++indeg[q.target(a)];
    std::vector<int> stack;
    for (int v = 0; v < q.num_vertices(); ++v)
        if (indeg[v] == 0) stack.push_back(v);
    int seen = 0;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        ++seen;
        for (int a = 0; a < q.num_arrows(); ++a)
            if (q.source(a) == v && --indeg[q.target(a)] == 0) stack.push_back(q.target(a));
    }
    return seen == q.num_vertices();
}

/// Euler inner product <alpha, beta> = sum_v a(v)b(v) - sum_a a(ia)b(ta).
inline long long euler_form(const Quiver& q, const DimVector& alpha, const DimVector& beta) {
    check_dimvector(q, alpha, "euler_form alpha");
    check_dimvector(q, beta, "euler_form beta");
    long long s = 0;
    for (int v = 0; v < q.num_vertices(); ++v) s += alpha[v] * beta[v];
    for (int a = 0; a < q.num_arrows(); ++a) s -= alpha[q.source(a)] * beta[q.target(a)];
    return s;
}

/// Formal rational combination of parallel paths: an element of the
/// Hom-space P(source, target) of add(Q). Terms are kept sorted in canonical
/// path order with nonzero coefficients.
struct PathComb {
    int source = -1;
    int target = -1;
    std::vector<std::pair<Path, Rat>> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const PathComb&) const = default;

    /// True iff the combination is exactly c * e_v (used as minimization pivot).
    bool is_scalar_trivial() const {
        return terms.size() == 1 && terms.front().first.is_trivial();
    }

    std::optional<Rat> trivial_coeff() const {
        for (const auto& [p, c] : terms)
            if (p.is_trivial()) return c;
        return std::nullopt;
    }

    int max_length() const {
        int m = 0;
        for (const auto& [p, c] : terms) m = std::max(m, p.length());
        return m;
    }
};

inline PathComb zero_comb(int source, int target) { return PathComb{source, target, {}}; }

inline PathComb comb_from_path(const Path& p, Rat c = 1) {
    PathComb pc{p.source, p.target, {}};
    if (c != 0) pc.terms.emplace_back(p, std::move(c));
    return pc;
}

inline void comb_normalize(PathComb& pc) {
    std::sort(pc.terms.begin(), pc.terms.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::pair<Path, Rat>> out;
    for (auto& [p, c] : pc.terms) {
        if (!out.empty() && out.back().first == p)
            out.back().second += c;
        else
            out.emplace_back(p, c);
    }
    std::erase_if(out, [](const auto& t) { return t.second == 0; });
    pc.terms = std::move(out);
}

inline PathComb comb_add(const PathComb& x, const PathComb& y) {
    if (x.source != y.source || x.target != y.target)
        fail("endpoint mismatch", "PathComb addition endpoints differ");
    PathComb r = x;
    r.terms.insert(r.terms.end(), y.terms.begin(), y.terms.end());
    comb_normalize(r);
    return r;
}

inline PathComb comb_scale(const PathComb& x, const Rat& c) {
    PathComb r{x.source, x.target, {}};
    if (c == 0) return r;
    r.terms = x.terms;
    for (auto& t : r.terms) t.second *= c;
    return r;
}

/// Composition (left to right): x from u to v, y from v to w.
inline PathComb comb_compose(const Quiver& q, const PathComb& x, const PathComb& y) {
    if (x.target != y.source)
        fail("endpoint mismatch", "PathComb composition endpoints differ");
    PathComb r{x.source, y.target, {}};
    for (const auto& [p, c] : x.terms)
        for (const auto& [p2, c2] : y.terms)
            r.terms.emplace_back(compose_paths(q, p, p2), c * c2);
    comb_normalize(r);
    return r;
}

inline std::string comb_str(const Quiver& q, const PathComb& pc) {
    if (pc.terms.empty()) return "0";
    std::string s;
    bool first = true;
    for (const auto& [p, c] : pc.terms) {
        Rat mag = c < 0 ? Rat(-c) : c;
        if (first) {
            if (c < 0) s += "-";
            first = false;
        } else {
            s += (c < 0) ? " - " : " + ";
        }
        if (mag != 1) s += rat_str(mag) + "*";
        s += path_str(q, p);
    }
    return s;
}

}  // namespace qsi
