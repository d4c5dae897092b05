#include "helpers.hpp"

#include "qsi/spanning.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace qtest;

namespace {

AddMap single_arrow_map(const Quiver& q, const std::string& arrow) {
    int a = q.arrow_index(arrow);
    return make_addmap(q, {q.source(a)}, {q.target(a)}, {{comb_from_path(make_path(q, {a}))}});
}

}  // namespace

TEST_CASE("rep_matrix realizations", "[invariants]") {
    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({2, 2}));
    PolyMatrix m = rep_matrix(amb, single_arrow_map(q, "a"));
    REQUIRE(m.size() == 2);
    REQUIRE(poly_str(m[0][1]) == "x[a,1,2]");

    Quiver l = l1();
    auto ambl = make_ambient(l, DimVector({1}));
    PathComb epl = comb_add(comb_from_path(trivial_path(0)), comb_from_path(make_path(l, {0})));
    PolyMatrix ml = rep_matrix(ambl, make_addmap(l, {0}, {0}, {{epl}}));
    REQUIRE(ml.size() == 1);
    REQUIRE(poly_str(ml[0][0]) == "x[l,1,1] + 1");

    Quiver a = a3();
    auto amba = make_ambient(a, DimVector({1, 1, 1}));
    Path ab = make_path(a, {a.arrow_index("a"), a.arrow_index("b")});
    PolyMatrix ma = rep_matrix(amba, make_addmap(a, {0}, {2}, {{comb_from_path(ab)}}));
    REQUIRE(poly_str(ma[0][0]) == "x[a,1,1]*x[b,1,1]");
}

TEST_CASE("det_semiinvariant", "[invariants]") {
    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({2, 2}));
    REQUIRE(poly_str(det_semiinvariant(amb, single_arrow_map(q, "a"))) ==
            "x[a,1,1]*x[a,2,2] - x[a,1,2]*x[a,2,1]");

    auto amb12 = make_ambient(q, DimVector({1, 2}));
    REQUIRE_THROWS_MATCHES(det_semiinvariant(amb12, single_arrow_map(q, "a")), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == "non-square"; }));

    // stacked columns (a; b): O(1) -> O(2)^2 at alpha = (2,1)
    auto amb21 = make_ambient(q, DimVector({2, 1}));
    AddMap stacked = make_addmap(q, {0}, {1, 1},
                                 {{comb_from_path(make_path(q, {0})),
                                   comb_from_path(make_path(q, {1}))}});
    REQUIRE(poly_str(det_semiinvariant(amb21, stacked)) ==
            "x[a,1,1]*x[b,2,1] - x[a,2,1]*x[b,1,1]");
}

TEST_CASE("trace_invariant", "[invariants]") {
    Quiver l = l1();
    auto amb2 = make_ambient(l, DimVector({2}));
    Path loop = make_path(l, {0});
    REQUIRE(poly_str(trace_invariant(amb2, loop)) == "x[l,1,1] + x[l,2,2]");
    REQUIRE(poly_str(trace_invariant(amb2, compose_paths(l, loop, loop))) ==
            "x[l,1,1]^2 + 2*x[l,1,2]*x[l,2,1] + x[l,2,2]^2");
    auto amb1 = make_ambient(l, DimVector({1}));
    REQUIRE(poly_str(trace_invariant(amb1, loop)) == "x[l,1,1]");

    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({1, 1}));
    REQUIRE_THROWS_MATCHES(trace_invariant(amb, make_path(q, {0})), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == "not a cycle"; }));
}

TEST_CASE("traces are rotation invariant", "[invariants][property]") {
    Quiver two = validate_quiver({"1"}, {{"l", "1", "1"}, {"m", "1", "1"}});
    auto amb = make_ambient(two, DimVector({2}));
    Path lm = make_path(two, {0, 1});
    Path ml = make_path(two, {1, 0});
    REQUIRE(trace_invariant(amb, lm) == trace_invariant(amb, ml));
}

TEST_CASE("weight_of_map", "[invariants]") {
    Quiver q = k2();
    AddMap phi = single_arrow_map(q, "a");
    REQUIRE(weight_of_map(phi) == VWeight({-1, 1}));

    // derived check: substitute block-scalar group elements
    auto amb = make_ambient(q, DimVector({2, 2}));
    Poly p = det_semiinvariant(amb, phi);
    GroupElement g;
    g.blocks = {mat(2, 2, {Rat(3), Rat(0), Rat(0), Rat(3)}),
                mat(2, 2, {Rat(5), Rat(0), Rat(0), Rat(5)})};
    RatSampler s(3);
    RepPoint pt = random_point(*amb, s);
    REQUIRE(evaluate(p, act(*amb, g, pt)) ==
            character_value(g, weight_of_map(phi)) * evaluate(p, pt));

    Quiver l = l1();
    PathComb epl = comb_add(comb_from_path(trivial_path(0)), comb_from_path(make_path(l, {0})));
    REQUIRE(weight_of_map(make_addmap(l, {0}, {0}, {{epl}})) == VWeight({0}));

    AddMap dbl = block_diag(phi, phi);
    REQUIRE(weight_of_map(dbl) == VWeight({-2, 2}));
}

TEST_CASE("check_semiinvariance", "[invariants]") {
    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({2, 2}));
    Poly det_a = det_semiinvariant(amb, single_arrow_map(q, "a"));
    REQUIRE(check_semiinvariance(det_a, VWeight({-1, 1})).ok);

    Poly coord = Poly::var(amb, Coord{0, 1, 1});
    auto cert = check_semiinvariance(coord, VWeight({-1, 1}));
    REQUIRE_FALSE(cert.ok);
    REQUIRE(cert.vertex >= 0);

    auto ambl = make_ambient(l1(), DimVector({2}));
    REQUIRE(check_semiinvariance(trace_invariant(ambl, make_path(l1(), {0})), VWeight({0})).ok);
}

TEST_CASE("block_diag multiplicativity", "[invariants]") {
    Quiver q = k2();
    auto amb11 = make_ambient(q, DimVector({1, 1}));
    AddMap pa = single_arrow_map(q, "a"), pb = single_arrow_map(q, "b");
    REQUIRE(det_semiinvariant(amb11, block_diag(pa, pb)) ==
            det_semiinvariant(amb11, pa) * det_semiinvariant(amb11, pb));

    // zero-size block is the identity for block_diag
    AddMap empty = zero_addmap(q, {}, {});
    REQUIRE(block_diag(pa, empty) == pa);

    auto amb22 = make_ambient(q, DimVector({2, 2}));
    Poly da = det_semiinvariant(amb22, pa);
    REQUIRE(det_semiinvariant(amb22, block_diag(pa, pa)) == da * da);

    Quiver other = l1();
    REQUIRE_THROWS_MATCHES(block_diag(pa, zero_addmap(other, {}, {})), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == "quiver mismatch"; }));
}

TEST_CASE("functor pullback of maps and polynomials", "[invariants]") {
    Quiver q = k2();
    // identity functor leaves everything unchanged
    FunctorData id = identity_functor(q);
    AddMap phi = single_arrow_map(q, "a");
    REQUIRE(apply_functor_map(id, phi) == phi);
    auto amb = make_ambient(q, DimVector({2, 2}));
    Poly p = det_semiinvariant(amb, phi);
    REQUIRE(apply_functor_poly(id, p, amb->alpha) == p);

    // pi: Q_chi -> K2 with chi = (2,1): pi(a_i) = a, pi(b_1) = b
    QChi qc = build_q_chi(q, ADegree({2, 1}));
    DimVector alpha11({1, 1});
    AmbientPtr amb_chi = make_ambient(qc.qchi, apply_functor_dim(qc.pi, alpha11));
    Poly f = Poly::var(amb_chi, Coord{qc.qchi.arrow_index("a_1"), 1, 1}) *
             Poly::var(amb_chi, Coord{qc.qchi.arrow_index("a_2"), 1, 1}) *
             Poly::var(amb_chi, Coord{qc.qchi.arrow_index("b_1"), 1, 1});
    Poly pulled = apply_functor_poly(qc.pi, f, alpha11);
    auto amb11 = make_ambient(q, alpha11);
    REQUIRE(pulled == Poly::var(amb11, Coord{0, 1, 1}).pow(2) * Poly::var(amb11, Coord{1, 1, 1}));

    // pullback identity instance: s = pi, phi' = [a_1]
    AddMap phi1 = single_arrow_map(qc.qchi, "a_1");
    Poly lhs = apply_functor_poly(qc.pi, det_semiinvariant(amb_chi, phi1), alpha11);
    Poly rhs = det_semiinvariant(amb11, apply_functor_map(qc.pi, phi1));
    REQUIRE(lhs == rhs);
    REQUIRE(poly_str(rhs) == "x[a,1,1]");
}

TEST_CASE("functor pullback commutes with det_semiinvariant", "[invariants][property]") {
    RatSampler s(41);
    for (const Quiver& q : {k2(), a3()}) {
        DimVector alpha = q.num_vertices() == 2 ? DimVector({2, 2}) : DimVector({1, 2, 1});
        for (int trial = 0; trial < 10; ++trial) {
            // random functor from a small random quiver
            int nv = s.uniform(1, 2), na = s.uniform(1, 2);
            std::vector<std::string> verts;
            for (int v = 0; v < nv; ++v) verts.push_back("v" + std::to_string(v));
            std::vector<std::tuple<std::string, std::string, std::string>> arrows;
            std::vector<int> vmap;
            for (int v = 0; v < nv; ++v) vmap.push_back(s.uniform(0, q.num_vertices() - 1));
            std::vector<PathComb> amap;
            std::vector<std::pair<int, int>> ends;
            for (int a = 0; a < na; ++a) {
                int sv = s.uniform(0, nv - 1), tv = s.uniform(0, nv - 1);
                auto paths = enumerate_paths(q, vmap[sv], vmap[tv], 2);
                if (paths.empty()) {
                    --a;  // retry with different endpoints
                    continue;
                }
                arrows.emplace_back("w" + std::to_string(a), verts[sv], verts[tv]);
                PathComb pc = comb_from_path(paths[s.uniform(0, static_cast<int>(paths.size()) - 1)],
                                             s.nonzero(2, 1));
                if (paths.size() > 1 && s.uniform(0, 1))
                    pc = comb_add(pc, comb_from_path(paths[0], s.small(2, 1)));
                amap.push_back(pc);
                ends.emplace_back(sv, tv);
            }
            Quiver dom = validate_quiver(verts, arrows);
            FunctorData fn{dom, q, {}, {}};
            fn.vertex_map = vmap;
            // arrow order may permute under validation: rebuild by name
            fn.arrow_map.resize(dom.num_arrows(), PathComb{});
            for (int a = 0; a < dom.num_arrows(); ++a) {
                int orig = std::stoi(dom.arrow_name(a).substr(1));
                fn.arrow_map[a] = amap[orig];
            }
            check_functor(fn);
            DimVector alpha_dom = apply_functor_dim(fn, alpha);
            AmbientPtr amb_dom = make_ambient(dom, alpha_dom);

            // random square map over dom: single-slot profiles to keep it cheap
            int sv = s.uniform(0, dom.num_vertices() - 1);
            std::vector<int> cand;
            for (int tv = 0; tv < dom.num_vertices(); ++tv)
                if (alpha_dom[tv] == alpha_dom[sv]) cand.push_back(tv);
            int tv = cand[s.uniform(0, static_cast<int>(cand.size()) - 1)];
            auto paths = enumerate_paths(dom, sv, tv, 2);
            PathComb e = zero_comb(sv, tv);
            for (const Path& pp : paths)
                if (s.uniform(0, 1)) e = comb_add(e, comb_from_path(pp, s.small(2, 1)));
            AddMap phi_dom = make_addmap(dom, {sv}, {tv}, {{e}});

            AmbientPtr amb_cod = make_ambient(q, alpha);
            Poly lhs = apply_functor_poly(fn, det_semiinvariant(amb_dom, phi_dom), alpha);
            Poly rhs = det_semiinvariant(amb_cod, apply_functor_map(fn, phi_dom));
            REQUIRE(lhs == rhs);
        }
    }
}

TEST_CASE("trace_from_dets certificates", "[invariants]") {
    Quiver l = l1();
    Path loop = make_path(l, {0});

    auto amb1 = make_ambient(l, DimVector({1}));
    TraceCertificate c1 = trace_from_dets(amb1, loop);
    REQUIRE(c1.lambdas == std::vector<Rat>{0, 1});
    REQUIRE(c1.coeffs == std::vector<Rat>{-1, 1});  // Tr = P_{lambda=1} - P_{lambda=0}

    auto amb2 = make_ambient(l, DimVector({2}));
    REQUIRE_NOTHROW(trace_from_dets(amb2, loop));                       // 3-point Vandermonde
    REQUIRE_NOTHROW(trace_from_dets(amb2, compose_paths(l, loop, loop)));  // cycle l^2
}

TEST_CASE("standard pairs", "[invariants]") {
    Quiver l = l1();
    REQUIRE(standard_pair_check(l, DimVector({1})));
    REQUIRE(poly_str(standard_semiinvariant(make_ambient(l, DimVector({1})))) == "x[l,1,1]");

    Quiver q = k2();
    REQUIRE(standard_pair_check(q, DimVector({2, 2})));
    auto amb = make_ambient(q, DimVector({2, 2}));
    PolyMatrix s(2, std::vector<Poly>(2, Poly::zero(amb)));
    PolyMatrix A = arrow_matrix(amb, 0), B = arrow_matrix(amb, 1);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) s[i][j] = A[i][j] + B[i][j];
    REQUIRE(standard_semiinvariant(amb) == determinant(s));

    REQUIRE_FALSE(standard_pair_check(q, DimVector({1, 1})));
    REQUIRE_THROWS_MATCHES(standard_semiinvariant(make_ambient(q, DimVector({1, 1}))), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == "pair not standard"; }));
}

TEST_CASE("semi-invariance under random group elements", "[invariants][property]") {
    RatSampler s(59);
    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({2, 2}));
    AddMap phi = single_arrow_map(q, "a");
    Poly p = det_semiinvariant(amb, phi);
    VWeight w = weight_of_map(phi);
    for (int trial = 0; trial < 15; ++trial) {
        GroupElement g = random_group_element(*amb, s);
        RepPoint pt = random_point(*amb, s);
        REQUIRE(evaluate(p, act(*amb, g, pt)) == character_value(g, w) * evaluate(p, pt));
    }
}

TEST_CASE("torus rescaling of arrows matches the A-grading", "[invariants][property]") {
    // the lifted (k*)^A action: g . P_{phi,alpha} = P_{g . phi, alpha}
    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({2, 2}));
    AddMap phi = make_addmap(
        q, {0}, {1},
        {{comb_add(comb_from_path(make_path(q, {0})), comb_from_path(make_path(q, {1})))}});
    Poly p = det_semiinvariant(amb, phi);
    Rat la(3), lb(Rat(1, 2));
    AddMap scaled = make_addmap(
        q, {0}, {1},
        {{comb_add(comb_from_path(make_path(q, {0}), la), comb_from_path(make_path(q, {1}), lb))}});
    Poly lhs = det_semiinvariant(amb, scaled);
    // g . P: scale each chi-component by la^i lb^j
    Poly rhs = Poly::zero(amb);
    for (long long i = 0; i <= 2; ++i)
        for (long long j = 0; j <= 2; ++j) {
            Rat factor = 1;
            for (long long k = 0; k < i; ++k) factor *= la;
            for (long long k = 0; k < j; ++k) factor *= lb;
            rhs = rhs + a_degree_component(p, ADegree({i, j})).scaled(factor);
        }
    REQUIRE(lhs == rhs);
}
