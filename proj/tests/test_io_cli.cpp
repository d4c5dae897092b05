#include "helpers.hpp"

#include "qsi/jsonio.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cstdio>
#include <string>

using namespace qtest;

namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    std::string cmd = env_prefix + std::string(QSI_CLI_BIN) + " " + args + " 2>&1";
    std::array<char, 4096> buf{};
    std::string out;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    while (fgets(buf.data(), buf.size(), pipe)) out += buf.data();
    int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

std::string fx(const std::string& name) { return std::string(QSI_FIXTURES) + "/" + name; }

}  // namespace

TEST_CASE("parse_path_expr", "[io]") {
    Quiver q = k2();
    PathComb pa = parse_path_expr(q, "a");
    REQUIRE(pa.terms.size() == 1);
    REQUIRE(pa.source == q.vertex_index("1"));
    REQUIRE(pa.target == q.vertex_index("2"));

    Quiver l = l1();
    PathComb mixed = parse_path_expr(l, "e_1 + 2*l");
    REQUIRE(mixed.terms.size() == 2);
    REQUIRE(mixed.terms[0].first.is_trivial());
    REQUIRE(mixed.terms[1].second == 2);

    Quiver a = a3();
    REQUIRE_THROWS_MATCHES(parse_path_expr(a, "b.a"), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == "endpoint mismatch"; }));
    REQUIRE_THROWS_MATCHES(parse_path_expr(a, "a + b"), Error,
                           Catch::Matchers::Predicate<Error>(
                               [](const Error& e) { return e.kind() == "endpoint mismatch"; }));
    REQUIRE_NOTHROW(parse_path_expr(a, "a.b"));
    REQUIRE_THROWS_AS(parse_path_expr(a, "3*"), Error);

    // rationals, signs, whitespace
    PathComb c = parse_path_expr(l, "-1/2*l + l.l - e_1");
    REQUIRE(c.terms.size() == 3);
    REQUIRE(c.terms[0].second == -1);   // e_1 (canonical order: shortest first)
    REQUIRE(c.terms[1].second == Rat(-1, 2));
}

TEST_CASE("path expressions round-trip through comb_str", "[io][property]") {
    RatSampler s(83);
    Quiver l = validate_quiver({"1"}, {{"l", "1", "1"}, {"m", "1", "1"}});
    for (int trial = 0; trial < 30; ++trial) {
        PathComb pc = zero_comb(0, 0);
        auto paths = enumerate_paths(l, 0, 0, 2);
        for (const Path& p : paths)
            if (s.uniform(0, 1)) pc = comb_add(pc, comb_from_path(p, s.small(5, 3)));
        if (pc.is_zero()) continue;
        REQUIRE(parse_path_expr(l, comb_str(l, pc)) == pc);
    }
}

TEST_CASE("quiver JSON round-trip", "[io]") {
    for (const Quiver& q : {k2(), l1(), a3()})
        REQUIRE(parse_quiver_json(render_quiver_json(q)) == q);
}

TEST_CASE("addmap JSON round-trip", "[io]") {
    Quiver q = k2();
    Json j = Json::parse(R"({"source": {"1": 1}, "target": {"2": 2}, "entries": [["a", "b"]]})");
    AddMap m = parse_addmap_json(q, j);
    REQUIRE(m.num_source_slots() == 1);
    REQUIRE(m.num_target_slots() == 2);
    REQUIRE(parse_addmap_json(q, render_addmap_json(m)) == m);

    // bad endpoints are rejected
    Json bad = Json::parse(R"({"source": {"2": 1}, "target": {"1": 1}, "entries": [["a"]]})");
    REQUIRE_THROWS_AS(parse_addmap_json(q, bad), Error);
}

TEST_CASE("point JSON round-trip", "[io]") {
    Quiver q = k2();
    auto amb = make_ambient(q, DimVector({2, 2}));
    RatSampler s(89);
    RepPoint p = random_point(*amb, s);
    REQUIRE(parse_point_json(*amb, render_point_json(*amb, p)) == p);
    // omitted arrows read back as zero
    RepPoint z = parse_point_json(*amb, Json::object());
    REQUIRE(z == zero_point(*amb));
}

TEST_CASE("dimension vector and degree flags", "[io]") {
    Quiver q = k2();
    REQUIRE(parse_dimvector_flag(q, "1:2,2:3") == DimVector({2, 3}));
    REQUIRE(parse_dimvector_flag(q, "2:1") == DimVector({0, 1}));
    REQUIRE(parse_adegree_flag(q, "a:1,b:2") == ADegree({1, 2}));
    REQUIRE_THROWS_AS(parse_dimvector_flag(q, "7:1"), Error);
    REQUIRE_THROWS_AS(parse_dimvector_flag(q, "nonsense"), Error);
}

TEST_CASE("cli: det prints the polynomial and weight", "[cli]") {
    CliResult r = run_cli("det --quiver " + fx("k2.json") + " --alpha 1:2,2:2 --map " +
                          fx("phi_a.json"));
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("P = x[a,1,1]*x[a,2,2] - x[a,1,2]*x[a,2,1]") != std::string::npos);
    REQUIRE(r.output.find("weight = 1:-1,2:1") != std::string::npos);
}

TEST_CASE("cli: span-check reports EQUAL with exit 0", "[cli]") {
    CliResult r = run_cli("span-check --quiver " + fx("k2.json") +
                          " --alpha 1:2,2:2 --degree a:1,b:1 --strategy A");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("oracle dimension: 1") != std::string::npos);
    REQUIRE(r.output.find("verdict:          EQUAL") != std::string::npos);
}

TEST_CASE("cli: semistable witness and undetermined cases", "[cli]") {
    CliResult w = run_cli("semistable --quiver " + fx("k2.json") + " --beta 1:1,2:1 --point " +
                          fx("p10_k2.json") + " --max-len 2 --max-mult 3");
    REQUIRE(w.exit_code == 0);
    REQUIRE(w.output.find("SEMISTABLE") != std::string::npos);
    REQUIRE(w.output.find("witness map: [a]") != std::string::npos);

    CliResult u = run_cli("semistable --quiver " + fx("k2.json") + " --beta 1:1,2:1 --point " +
                          fx("origin_k2_11.json") + " --max-len 2 --max-mult 3 --budget 15000");
    REQUIRE(u.exit_code == 0);
    REQUIRE(u.output.find("UNDETERMINED") != std::string::npos);
}

TEST_CASE("cli: input errors exit 1 with a position", "[cli]") {
    CliResult r = run_cli("trace --quiver " + fx("a3.json") + " --alpha 1:1,2:1,3:1 --cycle b.a");
    REQUIRE(r.exit_code == 1);
    REQUIRE(r.output.find("error[") != std::string::npos);

    CliResult r2 = run_cli("det --quiver " + fx("k2.json") + " --alpha 1:1,2:2 --map " +
                           fx("phi_a.json"));
    REQUIRE(r2.exit_code == 1);  // non-square realization
}

TEST_CASE("cli: reports are byte-identical across worker counts", "[cli]") {
    std::string args = "span-check --quiver " + fx("k2.json") +
                       " --alpha 1:2,2:2 --degree a:2,b:2 --strategy A";
    // popen goes through sh -c, so a leading assignment sets the environment
    CliResult one = run_cli(args, "QSI_THREADS=1 ");
    CliResult four = run_cli(args, "QSI_THREADS=4 ");
    REQUIRE(one.exit_code == 0);
    REQUIRE(one.output == four.output);
}

TEST_CASE("cli: span-check NOT EQUAL exits 2", "[cli]") {
    // at mult <= 1 no candidate reaches degree (2,2), so strategy B honestly
    // reports a strict gap
    CliResult r = run_cli("span-check --quiver " + fx("k2.json") +
                          " --alpha 1:2,2:2 --degree a:2,b:2 --strategy B --max-mult 1");
    REQUIRE(r.exit_code == 2);
    REQUIRE(r.output.find("NOT EQUAL") != std::string::npos);
}

TEST_CASE("cli: json mirror", "[cli]") {
    std::string tmp = std::string(QSI_FIXTURES) + "/../build/mirror_test.json";
    CliResult r = run_cli("--json " + tmp + " det --quiver " + fx("k2.json") +
                          " --alpha 1:2,2:2 --map " + fx("phi_a.json"));
    REQUIRE(r.exit_code == 0);
    Json j = load_json_file(tmp);
    REQUIRE(j.at("poly").get<std::string>() == "x[a,1,1]*x[a,2,2] - x[a,1,2]*x[a,2,1]");
    REQUIRE(j.at("weight").get<std::string>() == "1:-1,2:1");
    std::remove(tmp.c_str());
}

TEST_CASE("cli: component, weight-space, ext, minimize", "[cli]") {
    CliResult c = run_cli("component --quiver " + fx("k2.json") +
                          " --alpha 1:1,2:1 --map " + fx("phi_a.json") + " --degree a:1,b:0");
    REQUIRE(c.exit_code == 0);
    REQUIRE(c.output.find("component[a:1,b:0] = x[a,1,1]") != std::string::npos);

    CliResult w = run_cli("weight-space --quiver " + fx("l1.json") + " --alpha 1:2 --degree l:2");
    REQUIRE(w.exit_code == 0);
    REQUIRE(w.output.find("dimension: 2") != std::string::npos);

    CliResult e = run_cli("ext --quiver " + fx("k2.json") + " --dims-r 1:1,2:1 --rep-r " +
                          fx("p10_k2.json") + " --dims-s 1:1,2:1 --rep-s " + fx("p10_k2.json"));
    REQUIRE(e.exit_code == 0);
    REQUIRE(e.output.find("dim Hom = 1") != std::string::npos);
    REQUIRE(e.output.find("dim Ext = 1") != std::string::npos);

    CliResult m = run_cli("minimize --quiver " + fx("k2.json") + " --map " + fx("phi_a.json"));
    REQUIRE(m.exit_code == 0);
    REQUIRE(m.output.find("status: injective") != std::string::npos);
}

TEST_CASE("cli: trace certificate", "[cli]") {
    CliResult r = run_cli("trace --quiver " + fx("l1.json") + " --alpha 1:2 --cycle l "
                          "--certificate");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("Tr = x[l,1,1] + x[l,2,2]") != std::string::npos);
    REQUIRE(r.output.find("certificate:") != std::string::npos);
}

TEST_CASE("cli: gamma --check verifies the contraction identity", "[cli]") {
    CliResult r = run_cli("gamma --quiver " + fx("a3.json") + " --alpha 1:1,2:1,3:1 --check");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("admissible Gamma: 2") != std::string::npos);
    REQUIRE(r.output.find("FAILED") == std::string::npos);
}

TEST_CASE("cli: perp with cross-validation", "[cli]") {
    CliResult r = run_cli("perp --quiver " + fx("k2.json") + " --map " +
                          fx("phi_ab_stacked.json") + " --beta 1:2,2:1 --point " +
                          fx("p_eye_k2_21.json") + " --cross-validate");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("perpendicular: yes") != std::string::npos);
}

TEST_CASE("cli: prb and present", "[cli]") {
    CliResult r = run_cli("prb --quiver " + fx("k2.json") + " --dims 1:1,2:0 --beta 1:2,2:1");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("P_{R,beta} = x[a,1,1]*x[b,2,1] - x[a,2,1]*x[b,1,1]") !=
            std::string::npos);

    CliResult pr = run_cli("present --quiver " + fx("k2.json") + " --dims 1:1,2:0");
    REQUIRE(pr.exit_code == 0);
    REQUIRE(pr.output.find("injective: yes") != std::string::npos);
    REQUIRE(pr.output.find("cokernel dims: 1:1,2:0") != std::string::npos);
}

TEST_CASE("cli: polarize and restitute", "[cli]") {
    CliResult r = run_cli("polarize --quiver " + fx("k2.json") +
                          " --alpha 1:1,2:1 --degree a:2,b:1 --poly "
                          "\"x[a,1,1]^2*x[b,1,1]\"");
    REQUIRE(r.exit_code == 0);
    REQUIRE(r.output.find("2*x[a_1,1,1]*x[a_2,1,1]*x[b_1,1,1]") != std::string::npos);

    CliResult b = run_cli("restitute --quiver " + fx("k2.json") +
                          " --alpha 1:1,2:1 --degree a:2,b:1 --poly "
                          "\"x[a_1,1,1]*x[a_2,1,1]*x[b_1,1,1]\"");
    REQUIRE(b.exit_code == 0);
    REQUIRE(b.output.find("restituted = x[a,1,1]^2*x[b,1,1]") != std::string::npos);
}
