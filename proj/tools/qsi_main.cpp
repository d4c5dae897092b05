// qsi: exact semi-invariants of quiver representation spaces.
//
// Subcommands wrap the library operations one-to-one; all arithmetic is exact
// and every report is byte-deterministic for a fixed invocation (including
// the seed and regardless of QSI_THREADS).

#include "qsi/jsonio.hpp"
#include "qsi/repthy.hpp"
#include "qsi/spanning.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

using namespace qsi;

struct Output {
    std::ostringstream text;
    Json mirror = Json::object();
    std::string json_path;

    void finish() {
        std::cout << text.str();
        if (!json_path.empty()) {
            std::ofstream out(json_path);
            if (!out) fail("parse error", "cannot write '" + json_path + "'");
            out << mirror.dump(2) << "\n";
        }
    }
};

std::string vweight_flag(const Quiver& q, const VWeight& w) {
    std::string s;
    for (int v = 0; v < q.num_vertices(); ++v) {
        if (v) s += ",";
        s += q.vertex_name(v) + ":" + std::to_string(w[v]);
    }
    return s;
}

Quiver load_quiver(const std::string& path) { return parse_quiver_json(load_json_file(path)); }

Representation load_representation(const Quiver& q, const std::string& dims_flag,
                                   const std::string& rep_path) {
    Representation r;
    r.dims = parse_dimvector_flag(q, dims_flag);
    AmbientPtr amb = make_ambient(q, r.dims);
    r.point = rep_path.empty() ? zero_point(*amb)
                               : parse_point_json(*amb, load_json_file(rep_path));
    return r;
}

Path parse_single_path(const Quiver& q, const std::string& expr) {
    PathComb pc = parse_path_expr(q, expr);
    if (pc.terms.size() != 1 || pc.terms.front().second != 1)
        fail("parse error", "expected a single path, got '" + expr + "'");
    return pc.terms.front().first;
}

std::vector<Rat> parse_coeff_list(const std::string& flag) {
    std::vector<Rat> out;
    std::size_t i = 0;
    while (i < flag.size()) {
        std::size_t comma = flag.find(',', i);
        if (comma == std::string::npos) comma = flag.size();
        Rat c = parse_rat(flag.substr(i, comma - i));
        if (c != 0) out.push_back(c);  // zero means "omit the path"; the enumerator does that
        i = comma + 1;
    }
    if (out.empty()) fail("parse error", "coefficient set has no nonzero values");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact semi-invariants of quiver representation spaces"};
    app.require_subcommand(1);

    Output out;
    std::uint64_t seed = 0;
    app.add_option("--json", out.json_path, "write a machine-readable mirror of the report");
    app.add_option("--seed", seed, "seed for randomized cross-checks (default 0)");

    std::string quiver_path, alpha_flag, beta_flag, map_path, degree_flag, point_path;
    std::string dims_flag, rep_path, dims_s_flag, rep_s_path, poly_text, cycle_expr;
    std::string strategy = "A", coeffs_flag = "1,-1";
    int max_len = 2, max_mult = 3, trace_len = 3, check_samples = 0;
    long long budget = 200000;
    bool do_cert = false, do_check = false, do_minimize = false, cross_validate = false;
    bool show_basis = false, no_early_stop = false;

    auto add_quiver = [&](CLI::App* c) {
        c->add_option("--quiver", quiver_path, "quiver JSON file")->required();
    };

    CLI::App* c_det = app.add_subcommand("det", "determinantal semi-invariant P_{phi,alpha}");
    add_quiver(c_det);
    c_det->add_option("--alpha", alpha_flag, "dimension vector, v:n list")->required();
    c_det->add_option("--map", map_path, "map JSON file")->required();
    c_det->add_option("--check", check_samples, "evaluation cross-check sample count");

    CLI::App* c_comp = app.add_subcommand("component", "A-degree component of P_{phi,alpha}");
    add_quiver(c_comp);
    c_comp->add_option("--alpha", alpha_flag)->required();
    c_comp->add_option("--map", map_path)->required();
    c_comp->add_option("--degree", degree_flag, "A-degree, a:m list")->required();

    CLI::App* c_trace = app.add_subcommand("trace", "trace invariant of an oriented cycle");
    add_quiver(c_trace);
    c_trace->add_option("--alpha", alpha_flag)->required();
    c_trace->add_option("--cycle", cycle_expr, "cycle as a path expression")->required();
    c_trace->add_flag("--certificate", do_cert, "emit the determinant-span certificate");

    CLI::App* c_ws = app.add_subcommand("weight-space", "independent semi-invariant basis");
    add_quiver(c_ws);
    c_ws->add_option("--alpha", alpha_flag)->required();
    c_ws->add_option("--degree", degree_flag)->required();

    CLI::App* c_span = app.add_subcommand("span-check", "verify determinantal spanning at one degree");
    add_quiver(c_span);
    c_span->add_option("--alpha", alpha_flag)->required();
    c_span->add_option("--degree", degree_flag)->required();
    c_span->add_option("--strategy", strategy, "A (polarization) or B (direct enumeration)");
    c_span->add_option("--max-len", max_len, "strategy B: path length bound");
    c_span->add_option("--max-mult", max_mult, "strategy B: multiplicity bound");
    c_span->add_option("--coeffs", coeffs_flag, "strategy B: coefficient set");
    c_span->add_option("--trace-len", trace_len, "strategy B: trace cycle length bound");
    c_span->add_option("--budget", budget, "strategy B: candidate budget");
    c_span->add_flag("--no-early-stop", no_early_stop, "strategy B: exhaust the bounds");

    CLI::App* c_gamma = app.add_subcommand("gamma", "enumerate Weyl contraction data");
    add_quiver(c_gamma);
    c_gamma->add_option("--alpha", alpha_flag)->required();
    c_gamma->add_flag("--check", do_check, "verify f_Gamma = +-P_{Phi,chi} * traces per Gamma");

    CLI::App* c_pol = app.add_subcommand("polarize", "multilinear polarization over Q_chi");
    add_quiver(c_pol);
    c_pol->add_option("--alpha", alpha_flag)->required();
    c_pol->add_option("--degree", degree_flag)->required();
    c_pol->add_option("--poly", poly_text, "polynomial in canonical text form")->required();

    CLI::App* c_res = app.add_subcommand("restitute", "pi-pullback from Q_chi back to Q");
    add_quiver(c_res);
    c_res->add_option("--alpha", alpha_flag)->required();
    c_res->add_option("--degree", degree_flag)->required();
    c_res->add_option("--poly", poly_text, "polynomial over Q_chi in canonical text form")
        ->required();

    CLI::App* c_hom = app.add_subcommand("hom", "Hom space between two representations");
    add_quiver(c_hom);
    c_hom->add_option("--dims-r", dims_flag)->required();
    c_hom->add_option("--rep-r", rep_path, "point JSON for R (omitted: zero)");
    c_hom->add_option("--dims-s", dims_s_flag)->required();
    c_hom->add_option("--rep-s", rep_s_path, "point JSON for S (omitted: zero)");
    c_hom->add_flag("--basis", show_basis, "print a basis of intertwiners");

    CLI::App* c_ext = app.add_subcommand("ext", "Ext dimension via the Euler defect");
    add_quiver(c_ext);
    c_ext->add_option("--dims-r", dims_flag)->required();
    c_ext->add_option("--rep-r", rep_path);
    c_ext->add_option("--dims-s", dims_s_flag)->required();
    c_ext->add_option("--rep-s", rep_s_path);

    CLI::App* c_pres = app.add_subcommand("present", "canonical projective presentation");
    add_quiver(c_pres);
    c_pres->add_option("--dims", dims_flag)->required();
    c_pres->add_option("--rep", rep_path);
    c_pres->add_flag("--minimize", do_minimize, "minimize before printing");

    CLI::App* c_min = app.add_subcommand("minimize", "cancel trivial-path pivots of a map");
    add_quiver(c_min);
    c_min->add_option("--map", map_path)->required();

    CLI::App* c_prb = app.add_subcommand("prb", "P_{R,beta} from the minimized presentation");
    add_quiver(c_prb);
    c_prb->add_option("--dims", dims_flag)->required();
    c_prb->add_option("--rep", rep_path);
    c_prb->add_option("--beta", beta_flag)->required();

    CLI::App* c_perp = app.add_subcommand("perp", "perpendicularity via the presentation determinant");
    add_quiver(c_perp);
    c_perp->add_option("--map", map_path, "presentation map JSON (alternative to --dims/--rep)");
    c_perp->add_option("--dims", dims_flag, "dimension vector of R");
    c_perp->add_option("--rep", rep_path, "point JSON of R");
    c_perp->add_option("--beta", beta_flag)->required();
    c_perp->add_option("--point", point_path, "point JSON of the test point")->required();
    c_perp->add_flag("--cross-validate", cross_validate, "also compute Hom/Ext directly");

    CLI::App* c_ss = app.add_subcommand("semistable", "semistability witness search");
    add_quiver(c_ss);
    c_ss->add_option("--beta", beta_flag)->required();
    c_ss->add_option("--point", point_path)->required();
    c_ss->add_option("--max-len", max_len);
    c_ss->add_option("--max-mult", max_mult);
    c_ss->add_option("--coeffs", coeffs_flag);
    c_ss->add_option("--budget", budget);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    int exit_code = 0;
    try {
        if (app.got_subcommand(c_det) || app.got_subcommand(c_comp)) {
            Quiver q = load_quiver(quiver_path);
            AmbientPtr amb = make_ambient(q, parse_dimvector_flag(q, alpha_flag));
            AddMap phi = parse_addmap_json(q, load_json_file(map_path));
            Poly p = det_semiinvariant(amb, phi, check_samples, seed);
            if (app.got_subcommand(c_comp)) {
                ADegree chi = parse_adegree_flag(q, degree_flag);
                Poly comp = a_degree_component(p, chi);
                out.text << "component[" << adegree_flag(q, chi) << "] = " << poly_str(comp)
                         << "\n";
                out.mirror["component"] = poly_str(comp);
            } else {
                VWeight w = weight_of_map(phi);
                out.text << "P = " << poly_str(p) << "\n";
                out.text << "weight = " << vweight_flag(q, w) << "\n";
                out.mirror["poly"] = poly_str(p);
                out.mirror["weight"] = vweight_flag(q, w);
            }
        } else if (app.got_subcommand(c_trace)) {
            Quiver q = load_quiver(quiver_path);
            AmbientPtr amb = make_ambient(q, parse_dimvector_flag(q, alpha_flag));
            Path l = parse_single_path(q, cycle_expr);
            Poly t = trace_invariant(amb, l);
            out.text << "Tr = " << poly_str(t) << "\n";
            out.mirror["trace"] = poly_str(t);
            if (do_cert) {
                TraceCertificate cert = trace_from_dets(amb, l);
                out.text << "certificate: Tr =";
                Json jc = Json::array();
                for (std::size_t m = 0; m < cert.lambdas.size(); ++m) {
                    out.text << (m ? " + " : " ") << rat_str(cert.coeffs[m]) << "*P[e + "
                             << rat_str(cert.lambdas[m]) << "*" << path_str(q, l) << "]";
                    jc.push_back({{"lambda", rat_str(cert.lambdas[m])},
                                  {"coeff", rat_str(cert.coeffs[m])}});
                }
                out.text << "\n";
                out.mirror["certificate"] = jc;
            }
        } else if (app.got_subcommand(c_ws)) {
            Quiver q = load_quiver(quiver_path);
            AmbientPtr amb = make_ambient(q, parse_dimvector_flag(q, alpha_flag));
            ADegree chi = parse_adegree_flag(q, degree_flag);
            std::vector<Poly> basis = weight_space_basis(amb, chi);
            out.text << "dimension: " << basis.size() << "\n";
            Json jb = Json::array();
            for (const Poly& f : basis) {
                out.text << "basis: " << poly_str(f) << "\n";
                jb.push_back(poly_str(f));
            }
            out.mirror["dimension"] = basis.size();
            out.mirror["basis"] = jb;
        } else if (app.got_subcommand(c_span)) {
            Quiver q = load_quiver(quiver_path);
            AmbientPtr amb = make_ambient(q, parse_dimvector_flag(q, alpha_flag));
            ADegree chi = parse_adegree_flag(q, degree_flag);
            SpanOptions opt;
            if (strategy != "A" && strategy != "B")
                fail("parse error", "strategy must be A or B");
            opt.strategy = strategy[0];
            opt.bounds.max_len = max_len;
            opt.bounds.max_mult = max_mult;
            opt.bounds.coeffs = parse_coeff_list(coeffs_flag);
            opt.bounds.budget = budget;
            opt.trace_max_len = trace_len;
            opt.early_stop = !no_early_stop;
            SpanReport rep = span_check(amb, chi, opt);
            out.text << rep.render();
            out.mirror["oracle_dim"] = rep.oracle_dim;
            out.mirror["span_dim"] = rep.span_dim;
            out.mirror["containment"] = rep.containment;
            out.mirror["equality"] = rep.equality;
            if (!rep.equality) exit_code = 2;
        } else if (app.got_subcommand(c_gamma)) {
            Quiver q = load_quiver(quiver_path);
            DimVector alpha = parse_dimvector_flag(q, alpha_flag);
            AmbientPtr amb = make_ambient(q, alpha);
            std::vector<GammaData> gs = enumerate_gamma(q, alpha);
            out.text << "admissible Gamma: " << gs.size() << "\n";
            Json jg = Json::array();
            for (const GammaData& g : gs) {
                out.text << gamma_str(q, g) << "\n";
                out.text << "  f_Gamma = " << poly_str(f_gamma(amb, g)) << "\n";
                Json item{{"gamma", gamma_str(q, g)}};
                if (do_check) {
                    int sign = contraction_identity_sign(amb, g);
                    out.text << "  identity: " << (sign ? (sign > 0 ? "ok (+)" : "ok (-)")
                                                        : "FAILED")
                             << "\n";
                    item["contraction_identity_sign"] = sign;
                    if (sign == 0) exit_code = 2;
                }
                jg.push_back(std::move(item));
            }
            out.mirror["gammas"] = jg;
        } else if (app.got_subcommand(c_pol) || app.got_subcommand(c_res)) {
            Quiver q = load_quiver(quiver_path);
            DimVector alpha = parse_dimvector_flag(q, alpha_flag);
            ADegree chi = parse_adegree_flag(q, degree_flag);
            QChi qc = build_q_chi(q, chi);
            if (app.got_subcommand(c_pol)) {
                AmbientPtr amb = make_ambient(q, alpha);
                Poly f = parse_poly(amb, poly_text);
                Poly ft = polarize(qc, f);
                out.text << "Q_chi arrows:";
                for (int a = 0; a < qc.qchi.num_arrows(); ++a)
                    out.text << " " << qc.qchi.arrow_name(a);
                out.text << "\npolarized = " << poly_str(ft) << "\n";
                out.mirror["polarized"] = poly_str(ft);
            } else {
                DimVector alpha_chi = apply_functor_dim(qc.pi, alpha);
                AmbientPtr amb_chi = make_ambient(qc.qchi, alpha_chi);
                Poly ft = parse_poly(amb_chi, poly_text);
                Poly f = restitute(qc, ft, alpha);
                out.text << "restituted = " << poly_str(f) << "\n";
                out.mirror["restituted"] = poly_str(f);
            }
        } else if (app.got_subcommand(c_hom) || app.got_subcommand(c_ext)) {
            Quiver q = load_quiver(quiver_path);
            Representation R = load_representation(q, dims_flag, rep_path);
            Representation S = load_representation(q, dims_s_flag, rep_s_path);
            long long h = hom_dim(q, R, S);
            if (app.got_subcommand(c_hom)) {
                out.text << "dim Hom = " << h << "\n";
                out.mirror["hom"] = h;
                if (show_basis) {
                    for (const RepMorphism& m : hom_basis(q, R, S)) {
                        out.text << "morphism:";
                        for (int v = 0; v < q.num_vertices(); ++v) {
                            out.text << " " << q.vertex_name(v) << ":[";
                            for (int i = 0; i < m.blocks[v].rows; ++i) {
                                if (i) out.text << "; ";
                                for (int j = 0; j < m.blocks[v].cols; ++j)
                                    out.text << (j ? " " : "") << rat_str(m.blocks[v].at(i, j));
                            }
                            out.text << "]";
                        }
                        out.text << "\n";
                    }
                }
            } else {
                long long e = ext_dim(q, R, S);
                out.text << "dim Hom = " << h << "\n";
                out.text << "dim Ext = " << e << "\n";
                out.text << "euler   = " << euler_form(q, R.dims, S.dims) << "\n";
                out.mirror["hom"] = h;
                out.mirror["ext"] = e;
            }
        } else if (app.got_subcommand(c_pres)) {
            Quiver q = load_quiver(quiver_path);
            Representation R = load_representation(q, dims_flag, rep_path);
            PresentationData pd = canonical_presentation(q, R);
            if (do_minimize) pd = minimize_presentation(pd);
            out.text << "map: " << render_addmap_json(pd.phi).dump() << "\n";
            out.text << "injective: "
                     << (pd.inj.status == InjStatus::Injective ? "yes" : "no") << "\n";
            if (pd.cok_dims)
                out.text << "cokernel dims: " << dimvector_flag(q, *pd.cok_dims) << "\n";
            out.mirror["map"] = render_addmap_json(pd.phi);
        } else if (app.got_subcommand(c_min)) {
            Quiver q = load_quiver(quiver_path);
            AddMap phi = parse_addmap_json(q, load_json_file(map_path));
            AddMap m = minimize_addmap(phi);
            out.text << "map: " << render_addmap_json(m).dump() << "\n";
            InjectivityResult inj = injectivity_check(q, m);
            out.text << "status: "
                     << (inj.status == InjStatus::Injective
                             ? "injective"
                             : inj.status == InjStatus::NotInjective ? "not injective"
                                                                     : "unknown (truncated)")
                     << "\n";
            out.mirror["map"] = render_addmap_json(m);
        } else if (app.got_subcommand(c_prb)) {
            Quiver q = load_quiver(quiver_path);
            Representation R = load_representation(q, dims_flag, rep_path);
            DimVector beta = parse_dimvector_flag(q, beta_flag);
            Poly p = p_R_beta(q, R, beta);
            out.text << "P_{R,beta} = " << poly_str(p) << "\n";
            out.mirror["poly"] = poly_str(p);
        } else if (app.got_subcommand(c_perp)) {
            Quiver q = load_quiver(quiver_path);
            DimVector beta = parse_dimvector_flag(q, beta_flag);
            AddMap phi = [&] {
                if (!map_path.empty()) return parse_addmap_json(q, load_json_file(map_path));
                if (dims_flag.empty())
                    fail("parse error", "perp needs --map or --dims/--rep");
                Representation R = load_representation(q, dims_flag, rep_path);
                return minimize_addmap(canonical_presentation(q, R).phi);
            }();
            AmbientPtr amb = make_ambient(q, beta);
            RepPoint p = parse_point_json(*amb, load_json_file(point_path));
            PerpResult res = perp_check(q, phi, beta, p, cross_validate);
            out.text << "perpendicular: " << (res.perpendicular ? "yes" : "no") << "\n";
            out.text << "det = " << rat_str(res.det_value) << "\n";
            if (res.hom)
                out.text << "dim Hom(T,R_p) = " << *res.hom << ", dim Ext(T,R_p) = " << *res.ext
                         << "\n";
            out.mirror["perpendicular"] = res.perpendicular;
            out.mirror["det"] = rat_str(res.det_value);
        } else if (app.got_subcommand(c_ss)) {
            Quiver q = load_quiver(quiver_path);
            DimVector beta = parse_dimvector_flag(q, beta_flag);
            AmbientPtr amb = make_ambient(q, beta);
            RepPoint p = parse_point_json(*amb, load_json_file(point_path));
            MapEnumBounds bounds;
            bounds.max_len = max_len;
            bounds.max_mult = max_mult;
            bounds.coeffs = parse_coeff_list(coeffs_flag);
            bounds.budget = budget;
            SemistableOutcome res = semistable_search(q, beta, p, bounds);
            if (res.witness) {
                out.text << "SEMISTABLE\n";
                out.text << "witness map: " << addmap_str(res.witness->phi) << "\n";
                out.text << "P = " << poly_str(res.witness->poly) << "\n";
                out.text << "P(p) = " << rat_str(res.witness->value) << "\n";
                if (res.witness->cok) {
                    out.text << "cokernel T dims: "
                             << dimvector_flag(q, res.witness->cok->dims) << "\n";
                }
                out.mirror["semistable"] = true;
                out.mirror["witness"] = addmap_str(res.witness->phi);
            } else {
                out.text << "UNDETERMINED (inconclusive at bounds: max-len=" << bounds.max_len
                         << " max-mult=" << bounds.max_mult
                         << " examined=" << res.stats.visited
                         << (res.stats.truncated ? ", budget exhausted" : "") << ")\n";
                out.mirror["semistable"] = nullptr;
                out.mirror["examined"] = res.stats.visited;
            }
        }
        out.finish();
    } catch (const Error& e) {
        std::cerr << "error[" << e.kind() << "]: " << e.what() << "\n";
        return e.kind() == "cross-validation mismatch" ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
