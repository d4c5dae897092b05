#pragma once

#include "qsi/invariants.hpp"
#include "qsi/repthy.hpp"

#include <vector>

namespace qtest {

using namespace qsi;

inline Quiver k2() { return validate_quiver({"1", "2"}, {{"a", "1", "2"}, {"b", "1", "2"}}); }
inline Quiver l1() { return validate_quiver({"1"}, {{"l", "1", "1"}}); }
inline Quiver a3() {
    return validate_quiver({"1", "2", "3"}, {{"a", "1", "2"}, {"b", "2", "3"}});
}

inline RatMatrix mat(int rows, int cols, std::vector<Rat> vals) {
    RatMatrix m(rows, cols);
    m.data = std::move(vals);
    return m;
}

/// Representation with the given dims and small random matrices.
inline Representation random_rep(const Quiver& q, const DimVector& dims, RatSampler& s) {
    Representation r;
    r.dims = dims;
    AmbientPtr amb = make_ambient(q, dims);
    r.point = random_point(*amb, s);
    return r;
}

inline DimVector random_dims(const Quiver& q, RatSampler& s, int max_dim, bool allow_zero = true) {
    for (;;) {
        DimVector d = DimVector::zeros(q.num_vertices());
        long long total = 0;
        for (int v = 0; v < q.num_vertices(); ++v) {
            d[v] = s.uniform(allow_zero ? 0 : 1, max_dim);
            total += d[v];
        }
        if (total > 0) return d;
    }
}

/// Independent determinant: plain signed permutation expansion, no memo, no
/// shared code path with qsi::determinant.
inline Poly naive_det(const PolyMatrix& m, const AmbientPtr& amb) {
    const int n = static_cast<int>(m.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Poly acc = Poly::zero(amb);
    std::function<void(int, int)> rec = [&](int i, int sign) {
        if (i == n) {
            Poly term = Poly::constant(amb, sign);
            for (int r = 0; r < n; ++r) term = term * m[r][perm[r]];
            acc = acc + term;
            return;
        }
        for (int j = i; j < n; ++j) {
            std::swap(perm[i], perm[j]);
            rec(i + 1, i == j ? sign : -sign);
            std::swap(perm[i], perm[j]);
        }
    };
    rec(0, 1);
    return acc;
}

}  // namespace qtest
