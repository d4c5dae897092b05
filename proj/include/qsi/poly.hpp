#pragma once

#include "qsi/common.hpp"
#include "qsi/linalg.hpp"
#include "qsi/quiver.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <unordered_map>
#include <vector>

namespace qsi {

/// The representation space R(Q, alpha) that a polynomial's coordinates refer
/// to. Shared immutably between all values built over it.
struct Ambient {
    Quiver quiver;
    DimVector alpha;

    bool operator==(const Ambient&) const = default;
};

using AmbientPtr = std::shared_ptr<const Ambient>;

inline AmbientPtr make_ambient(Quiver q, DimVector alpha) {
    check_dimvector(q, alpha, "ambient dimension vector");
    return std::make_shared<const Ambient>(Ambient{std::move(q), std::move(alpha)});
}

inline bool same_ambient(const AmbientPtr& a, const AmbientPtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    return *a == *b;
}

inline void require_same_ambient(const AmbientPtr& a, const AmbientPtr& b) {
    if (!same_ambient(a, b)) fail("ambient mismatch", "operands live on different R(Q,alpha)");
}

/// Coordinate function x[a,r,c] on R(Q, alpha): the (r,c) entry of the matrix
/// attached to arrow a. Indices are 1-based.
struct Coord {
    int arrow = -1;
    int row = 0;
    int col = 0;

    auto operator<=>(const Coord&) const = default;
};

inline void check_coord(const Ambient& amb, const Coord& c) {
    if (c.arrow < 0 || c.arrow >= amb.quiver.num_arrows())
        fail("shape mismatch", "coordinate arrow out of range");
    const long long nr = amb.alpha[amb.quiver.source(c.arrow)];
    const long long nc = amb.alpha[amb.quiver.target(c.arrow)];
    if (c.row < 1 || c.row > nr || c.col < 1 || c.col > nc)
        fail("shape mismatch", "coordinate index out of range for (Q,alpha)");
}

/// Monomial: multiset of coordinates, stored as sorted (Coord, exponent>0).
struct Monomial {
    std::vector<std::pair<Coord, int>> factors;

    int total_degree() const {
        int d = 0;
        for (const auto& [c, e] : factors) d += e;
        return d;
    }

    bool operator==(const Monomial&) const = default;
};

/// Canonical order: graded lexicographic with variables ordered by
/// (arrow, row, col). Returns true when a precedes b in *descending* canonical
/// order, i.e. a is the larger monomial.
inline bool monomial_before(const Monomial& a, const Monomial& b) {
    const int da = a.total_degree(), db = b.total_degree();
    if (da != db) return da > db;
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() && j < b.factors.size()) {
        if (a.factors[i].first != b.factors[j].first)
            return a.factors[i].first < b.factors[j].first;  // earlier variable => lex-larger
        if (a.factors[i].second != b.factors[j].second)
            return a.factors[i].second > b.factors[j].second;
        ++i;
        ++j;
    }
    return i < a.factors.size();
}

/// Multidegree over arrows (the A-grading).
struct ADegree {
    std::vector<long long> entries;  // one per arrow

    ADegree() = default;
    explicit ADegree(std::vector<long long> e) : entries(std::move(e)) {}
    static ADegree zeros(int n) { return ADegree(std::vector<long long>(n, 0)); }

    long long operator[](int a) const { return entries.at(a); }
    long long& operator[](int a) { return entries.at(a); }
    int size() const { return static_cast<int>(entries.size()); }
    long long total() const {
        long long s = 0;
        for (auto e : entries) s += e;
        return s;
    }
    bool operator==(const ADegree&) const = default;
};

/// Character exponents of GL(alpha): sigma with g . f = prod_v det(g_v)^sigma_v f.
struct VWeight {
    std::vector<long long> entries;  // one per vertex

    VWeight() = default;
    explicit VWeight(std::vector<long long> e) : entries(std::move(e)) {}
    static VWeight zeros(int n) { return VWeight(std::vector<long long>(n, 0)); }

    long long operator[](int v) const { return entries.at(v); }
    long long& operator[](int v) { return entries.at(v); }
    int size() const { return static_cast<int>(entries.size()); }
    bool operator==(const VWeight&) const = default;
};

/// A concrete point of R(Q, alpha): one rational matrix per arrow.
struct RepPoint {
    std::vector<RatMatrix> mats;  // indexed by arrow

    bool operator==(const RepPoint&) const = default;
};

inline void check_point(const Ambient& amb, const RepPoint& p) {
    if (static_cast<int>(p.mats.size()) != amb.quiver.num_arrows())
        fail("shape mismatch", "point has wrong number of arrow matrices");
    for (int a = 0; a < amb.quiver.num_arrows(); ++a) {
        const auto& m = p.mats[a];
        if (m.rows != amb.alpha[amb.quiver.source(a)] || m.cols != amb.alpha[amb.quiver.target(a)])
            fail("shape mismatch",
                 "matrix for arrow '" + amb.quiver.arrow_name(a) + "' has wrong shape");
    }
}

inline RepPoint zero_point(const Ambient& amb) {
    RepPoint p;
    for (int a = 0; a < amb.quiver.num_arrows(); ++a)
        p.mats.emplace_back(static_cast<int>(amb.alpha[amb.quiver.source(a)]),
                            static_cast<int>(amb.alpha[amb.quiver.target(a)]));
    return p;
}

/// Exact multivariate polynomial over Q in the coordinates of R(Q, alpha).
/// Terms are stored in descending canonical monomial order with nonzero
/// coefficients; the zero polynomial has no terms.
class Poly {
public:
    Poly() = default;
    explicit Poly(AmbientPtr amb) : ambient_(std::move(amb)) {}

    static Poly zero(AmbientPtr amb) { return Poly(std::move(amb)); }

    static Poly constant(AmbientPtr amb, Rat c) {
        Poly f(std::move(amb));
        if (c != 0) f.terms_.emplace_back(Monomial{}, std::move(c));
        return f;
    }

    static Poly var(AmbientPtr amb, Coord c) {
        check_coord(*amb, c);
        Poly f(std::move(amb));
        f.terms_.emplace_back(Monomial{{{c, 1}}}, Rat(1));
        return f;
    }

    const AmbientPtr& ambient() const { return ambient_; }
    const std::vector<std::pair<Monomial, Rat>>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }

    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && terms_.front().first.factors.empty());
    }

    Rat constant_term() const {
        for (const auto& [m, c] : terms_)
            if (m.factors.empty()) return c;
        return 0;
    }

    bool operator==(const Poly& o) const {
        return same_ambient(ambient_, o.ambient_) && terms_ == o.terms_;
    }

    friend Poly operator+(const Poly& a, const Poly& b) {
        require_same_ambient(a.ambient_, b.ambient_);
        Poly r(a.ambient_);
        std::size_t i = 0, j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() ||
                (i < a.terms_.size() && monomial_before(a.terms_[i].first, b.terms_[j].first))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() ||
                       monomial_before(b.terms_[j].first, a.terms_[i].first)) {
                r.terms_.push_back(b.terms_[j++]);
            } else {
                Rat c = a.terms_[i].second + b.terms_[j].second;
                if (c != 0) r.terms_.emplace_back(a.terms_[i].first, std::move(c));
                ++i;
                ++j;
            }
        }
        return r;
    }

    friend Poly operator-(const Poly& a, const Poly& b) { return a + b.scaled(-1); }
    Poly operator-() const { return scaled(-1); }

    Poly scaled(const Rat& c) const {
        Poly r(ambient_);
        if (c == 0) return r;
        r.terms_ = terms_;
        for (auto& t : r.terms_) t.second *= c;
        return r;
    }

    friend Poly operator*(const Poly& a, const Poly& b) {
        require_same_ambient(a.ambient_, b.ambient_);
        std::map<Monomial, Rat, decltype(&monomial_before)> acc(&monomial_before);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_) {
                Monomial m = mul_monomials(ma, mb);
                acc[std::move(m)] += ca * cb;
            }
        Poly r(a.ambient_);
        for (auto& [m, c] : acc)
            if (c != 0) r.terms_.emplace_back(m, c);
        return r;
    }

    Poly pow(int e) const {
        Poly r = constant(ambient_, 1);
        for (int k = 0; k < e; ++k) r = r * (*this);
        return r;
    }

    static Monomial mul_monomials(const Monomial& a, const Monomial& b) {
        Monomial m;
        std::size_t i = 0, j = 0;
        while (i < a.factors.size() || j < b.factors.size()) {
            if (j == b.factors.size() ||
                (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
                m.factors.push_back(a.factors[i++]);
            } else if (i == a.factors.size() || b.factors[j].first < a.factors[i].first) {
                m.factors.push_back(b.factors[j++]);
            } else {
                m.factors.emplace_back(a.factors[i].first,
                                       a.factors[i].second + b.factors[j].second);
                ++i;
                ++j;
            }
        }
        return m;
    }

    /// Rebuilds a polynomial from arbitrary (monomial, coeff) pairs.
    static Poly from_terms(AmbientPtr amb, std::vector<std::pair<Monomial, Rat>> terms) {
        std::sort(terms.begin(), terms.end(),
                  [](const auto& x, const auto& y) { return monomial_before(x.first, y.first); });
        Poly r(std::move(amb));
        for (auto& [m, c] : terms) {
            if (!r.terms_.empty() && r.terms_.back().first == m)
                r.terms_.back().second += c;
            else
                r.terms_.emplace_back(std::move(m), std::move(c));
        }
        std::erase_if(r.terms_, [](const auto& t) { return t.second == 0; });
        return r;
    }

private:
    AmbientPtr ambient_;
    std::vector<std::pair<Monomial, Rat>> terms_;
};

inline ADegree a_degree_of(const Ambient& amb, const Monomial& m) {
    ADegree d = ADegree::zeros(amb.quiver.num_arrows());
    for (const auto& [c, e] : m.factors) d[c.arrow] += e;
    return d;
}

/// Sum of the terms of f whose per-arrow degree equals chi (possibly zero).
inline Poly a_degree_component(const Poly& f, const ADegree& chi) {
    const Ambient& amb = *f.ambient();
    if (chi.size() != amb.quiver.num_arrows())
        fail("shape mismatch", "A-degree has wrong arity");
    std::vector<std::pair<Monomial, Rat>> keep;
    for (const auto& [m, c] : f.terms())
        if (a_degree_of(amb, m) == chi) keep.emplace_back(m, c);
    return Poly::from_terms(f.ambient(), std::move(keep));
}

/// The common A-degree of f, if f is A-homogeneous.
inline std::optional<ADegree> a_degree_if_homogeneous(const Poly& f) {
    if (f.is_zero()) return std::nullopt;
    const Ambient& amb = *f.ambient();
    ADegree d = a_degree_of(amb, f.terms().front().first);
    for (const auto& [m, c] : f.terms())
        if (!(a_degree_of(amb, m) == d)) return std::nullopt;
    return d;
}

/// Raw torus weight of a monomial under the central torus of GL(alpha),
/// with the convention (g.p)(a) = g_{ia}^{-1} p(a) g_{ta}:
/// w_v = sum_{a: ta=v} deg_a - sum_{a: ia=v} deg_a.
inline std::vector<long long> raw_torus_weight(const Ambient& amb, const Monomial& m) {
    std::vector<long long> w(amb.quiver.num_vertices(), 0);
    for (const auto& [c, e] : m.factors) {
        w[amb.quiver.target(c.arrow)] += e;
        w[amb.quiver.source(c.arrow)] -= e;
    }
    return w;
}

/// Weight of a V-homogeneous polynomial as determinant exponents: the raw
/// torus weight divided by alpha(v) per vertex (the only way a torus weight
/// can come from a character of GL(alpha)). Errors when f is zero, not
/// V-homogeneous, or the weight is not an alpha-multiple.
inline VWeight v_weight_of(const Poly& f) {
    if (f.is_zero()) fail("zero polynomial", "v_weight_of(0) is undefined");
    const Ambient& amb = *f.ambient();
    std::vector<long long> w = raw_torus_weight(amb, f.terms().front().first);
    for (const auto& [m, c] : f.terms())
        if (raw_torus_weight(amb, m) != w)
            fail("not homogeneous", "polynomial is not V-homogeneous");
    VWeight sigma = VWeight::zeros(amb.quiver.num_vertices());
    for (int v = 0; v < amb.quiver.num_vertices(); ++v) {
        if (amb.alpha[v] == 0) {
            sigma[v] = 0;  // det over a 0x0 block is identically 1
            continue;
        }
        if (w[v] % amb.alpha[v] != 0)
            fail("not homogeneous",
                 "torus weight is not a multiple of alpha at vertex " + amb.quiver.vertex_name(v));
        sigma[v] = w[v] / amb.alpha[v];
    }
    return sigma;
}

inline Rat evaluate(const Poly& f, const RepPoint& p) {
    const Ambient& amb = *f.ambient();
    check_point(amb, p);
    Rat total = 0;
    for (const auto& [m, c] : f.terms()) {
        Rat t = c;
        for (const auto& [coord, e] : m.factors) {
            const Rat& x = p.mats[coord.arrow].at(coord.row - 1, coord.col - 1);
            if (x == 0) {
                t = 0;
                break;
            }
            for (int k = 0; k < e; ++k) t *= x;
        }
        total += t;
    }
    return total;
}

// ---------------------------------------------------------------------------
// canonical text rendering (bit-exact across runs)

inline std::string monomial_str(const Ambient& amb, const Monomial& m) {
    std::string s;
    for (std::size_t i = 0; i < m.factors.size(); ++i) {
        const auto& [c, e] = m.factors[i];
        if (i) s += "*";
        s += "x[" + amb.quiver.arrow_name(c.arrow) + "," + std::to_string(c.row) + "," +
             std::to_string(c.col) + "]";
        if (e > 1) s += "^" + std::to_string(e);
    }
    return s;
}

inline std::string poly_str(const Poly& f) {
    if (f.is_zero()) return "0";
    const Ambient& amb = *f.ambient();
    std::string s;
    bool first = true;
    for (const auto& [m, c] : f.terms()) {
        const Rat mag = c < 0 ? Rat(-c) : c;
        if (first) {
            if (c < 0) s += "-";
            first = false;
        } else {
            s += (c < 0) ? " - " : " + ";
        }
        if (m.factors.empty()) {
            s += rat_str(mag);
        } else {
            if (mag != 1) s += rat_str(mag) + "*";
            s += monomial_str(amb, m);
        }
    }
    return s;
}

/// Parses the canonical polynomial rendering back. Grammar:
///   poly   := [sign] term ((+|-) term)*
///   term   := rational ['*' factors] | factors
///   factor := 'x[' arrowId ',' int ',' int ']' ['^' int]
inline Poly parse_poly(const AmbientPtr& amb, const std::string& text) {
    std::size_t i = 0;
    auto skip_ws = [&] {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    auto parse_int = [&]() -> long long {
        skip_ws();
        std::size_t b = i;
        while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
        if (i == b) fail("parse error", "expected integer at offset " + std::to_string(b));
        return std::stoll(text.substr(b, i - b));
    };
    auto parse_factor = [&](Monomial& m) {
        // caller has consumed 'x['
        skip_ws();
        std::size_t b = i;
        while (i < text.size() && text[i] != ',') ++i;
        if (i == text.size()) fail("parse error", "unterminated coordinate");
        std::string arrow_id = text.substr(b, i - b);
        while (!arrow_id.empty() && std::isspace(static_cast<unsigned char>(arrow_id.back())))
            arrow_id.pop_back();
        ++i;  // ','
        long long row = parse_int();
        skip_ws();
        if (i >= text.size() || text[i] != ',') fail("parse error", "expected ',' in coordinate");
        ++i;
        long long col = parse_int();
        skip_ws();
        if (i >= text.size() || text[i] != ']') fail("parse error", "expected ']' in coordinate");
        ++i;
        int exp = 1;
        skip_ws();
        if (i < text.size() && text[i] == '^') {
            ++i;
            exp = static_cast<int>(parse_int());
            if (exp <= 0) fail("parse error", "exponent must be positive");
        }
        Coord c{amb->quiver.arrow_index(arrow_id), static_cast<int>(row), static_cast<int>(col)};
        check_coord(*amb, c);
        bool merged = false;
        for (auto& [fc, fe] : m.factors)
            if (fc == c) {
                fe += exp;
                merged = true;
                break;
            }
        if (!merged) m.factors.emplace_back(c, exp);
    };

    std::vector<std::pair<Monomial, Rat>> terms;
    skip_ws();
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
        neg = text[i] == '-';
        ++i;
    }
    for (;;) {
        skip_ws();
        Rat coeff = 1;
        Monomial m;
        bool saw_anything = false;
        // optional leading rational
        if (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
            std::size_t b = i;
            while (i < text.size() &&
                   (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '/'))
                ++i;
            coeff = parse_rat(text.substr(b, i - b));
            saw_anything = true;
            skip_ws();
            if (i < text.size() && text[i] == '*') ++i;
        }
        for (;;) {
            skip_ws();
            if (i + 1 < text.size() && text[i] == 'x' && text[i + 1] == '[') {
                i += 2;
                parse_factor(m);
                saw_anything = true;
                skip_ws();
                if (i < text.size() && text[i] == '*') {
                    ++i;
                    continue;
                }
            }
            break;
        }
        if (!saw_anything) fail("parse error", "expected term at offset " + std::to_string(i));
        std::sort(m.factors.begin(), m.factors.end(),
                  [](const auto& x, const auto& y) { return x.first < y.first; });
        terms.emplace_back(std::move(m), neg ? Rat(-coeff) : coeff);
        skip_ws();
        if (i >= text.size()) break;
        if (text[i] == '+' || text[i] == '-') {
            neg = text[i] == '-';
            ++i;
        } else {
            fail("parse error", "unexpected character at offset " + std::to_string(i));
        }
    }
    return Poly::from_terms(amb, std::move(terms));
}

// ---------------------------------------------------------------------------
// symbolic determinants

using PolyMatrix = std::vector<std::vector<Poly>>;

namespace detail {

inline Poly det_laplace(const PolyMatrix& m, const AmbientPtr& amb) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return Poly::constant(amb, 1);
    // Cofactor expansion along rows with minors memoized by the set of
    // still-active columns (the row index is determined by the popcount).
    std::unordered_map<std::uint64_t, Poly> memo;
    auto rec = [&](auto&& self, int row, std::uint64_t colmask) -> Poly {
        if (row == n) return Poly::constant(amb, 1);
        auto it = memo.find(colmask);
        if (it != memo.end()) return it->second;
        Poly acc = Poly::zero(amb);
        int sign = 1;
        for (int c = 0; c < n; ++c) {
            const std::uint64_t bit = std::uint64_t(1) << c;
            if (!(colmask & bit)) continue;
            if (!m[row][c].is_zero()) {
                Poly sub = self(self, row + 1, colmask & ~bit);
                Poly contrib = m[row][c] * sub;
                acc = (sign > 0) ? acc + contrib : acc - contrib;
            }
            sign = -sign;
        }
        memo.emplace(colmask, acc);
        return acc;
    };
    return rec(rec, 0, (n >= 64) ? ~std::uint64_t(0) : ((std::uint64_t(1) << n) - 1));
}

}  // namespace detail

/// Exact symbolic determinant via memoized Laplace expansion.
/// `check_samples` > 0 additionally evaluates the result at that many random
/// rational points and compares against the numeric determinant of the
/// entry-wise evaluated matrix (an independent route), failing loudly on any
/// mismatch.
inline Poly determinant(const PolyMatrix& m, int check_samples = 0, std::uint64_t seed = 0,
                        AmbientPtr amb_hint = nullptr) {
    const int n = static_cast<int>(m.size());
    AmbientPtr amb = std::move(amb_hint);
    for (const auto& row : m) {
        if (static_cast<int>(row.size()) != n) fail("non-square", "determinant of non-square matrix");
        for (const Poly& e : row)
            if (e.ambient()) {
                if (!amb)
                    amb = e.ambient();
                else
                    require_same_ambient(amb, e.ambient());
            }
    }
    if (!amb && n > 0) fail("ambient mismatch", "determinant entries carry no ambient");
    if (n >= 64) fail("shape mismatch", "determinant limited to 63 columns");
    Poly d = detail::det_laplace(m, amb);
    if (check_samples > 0 && n > 0) {
        RatSampler sampler(seed);
        for (int s = 0; s < check_samples; ++s) {
            RepPoint p = zero_point(*amb);
            for (auto& mat : p.mats)
                for (auto& x : mat.data) x = sampler.small();
            RatMatrix num(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) num.at(i, j) = evaluate(m[i][j], p);
            if (det(num) != evaluate(d, p))
                fail("determinant cross-check",
                     "symbolic determinant disagrees with numeric evaluation");
        }
    }
    return d;
}

}  // namespace qsi
