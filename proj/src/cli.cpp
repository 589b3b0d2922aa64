#include "freespectra/cli.hpp"

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freespectra/catalog.hpp"
#include "freespectra/certify.hpp"
#include "freespectra/expr.hpp"
#include "freespectra/gallery.hpp"
#include "freespectra/generic.hpp"
#include "freespectra/io.hpp"

namespace freespectra::cli {

namespace {

using io::json;

class Digest {
public:
    void add(const std::string& s) {
        for (unsigned char c : s) {
            h_ ^= c;
            h_ *= 0x100000001b3ULL;
        }
        h_ ^= 0xff;
        h_ *= 0x100000001b3ULL;
    }
    std::string hex() const {
        std::ostringstream os;
        os << std::hex << std::setw(16) << std::setfill('0') << h_;
        return os.str();
    }

private:
    std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

struct Context {
    Digest digest;
    double tol = 1e-10;
    int degree = 8;
    int samples = 100;
    std::uint64_t seed = 0;
    int fock_order = 4;
    std::string format = "json";
    bool timings = false;

    json load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw InvalidInput("cannot open '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        digest.add(ss.str());
        try {
            return json::parse(ss.str());
        } catch (const json::parse_error& e) {
            throw InvalidInput("malformed JSON in '" + path + "': " + e.what());
        }
    }
};

struct Outcome {
    bool pass = true;
    json residuals = json::object();
    json result = json::object();
};

// A bare input file may hold the tuple itself or an object with an "Xi" field.
Tuple load_xi(Context& ctx, const std::string& path) {
    json j = ctx.load(path);
    if (j.is_object() && j.contains("Xi") && !j.contains("g")) return io::xi_from_json(j.at("Xi"));
    return io::xi_from_json(j);
}

Outcome cmd_verify_xi(Context& ctx, const std::string& path) {
    Tuple Xi = load_xi(ctx, path);
    Outcome o;
    auto conv = is_convexotonic(Xi, ctx.tol);
    auto inv = verify_inverse_pair(Xi, ctx.degree, ctx.samples, ctx.seed);
    auto nil = nilpotency_and_degree(Xi);
    o.pass = conv.pass && inv.passed(ctx.tol);
    o.residuals = {{"convexotonic", conv.max_residual},
                   {"series_pq", inv.series_pq},
                   {"series_qp", inv.series_qp},
                   {"samples", inv.sample_residual}};
    o.result = {{"g", Xi.size()}, {"convexotonic", conv.pass}, {"nilpotent", nil.nilpotent}};
    if (nil.nilpotent) {
        o.result["nilpotency_order"] = nil.order;
        o.result["degree_p"] = nil.degree_p;
    }
    o.result["p"] = io::to_json(map_series(Xi, std::min(ctx.degree, 4)).p);
    return o;
}

Outcome cmd_structure(Context& ctx, const std::string& e_path, const std::string& r_path) {
    Tuple E = io::tuple_from_json(ctx.load(e_path));
    Tuple R = r_path.empty() ? E : io::tuple_from_json(ctx.load(r_path));
    Outcome o;
    try {
        auto s = structure_matrices(E, R, 1e-8);
        auto conv = is_convexotonic(s.Xi, ctx.tol);
        o.residuals = {{"least_squares", s.residual}, {"convexotonic", conv.max_residual}};
        o.result = {{"Xi", io::to_json(s.Xi)}, {"sigma_ratio", s.sigma_ratio}, {"convexotonic", conv.pass}};
        o.pass = true;
    } catch (const DependentBasis& e) {
        o.pass = false;
        o.result = {{"error", "DependentBasis"}, {"message", e.what()}};
    } catch (const NotAModule& e) {
        o.pass = false;
        o.result = {{"error", "NotAModule"}, {"message", e.what()}};
    }
    return o;
}

Outcome cmd_eval(Context& ctx, const std::string& xi_path, const std::string& point_path, bool inverse) {
    Tuple Xi = load_xi(ctx, xi_path);
    MatrixTuple X = io::matrix_tuple_from_json(ctx.load(point_path));
    Outcome o;
    try {
        auto v = map_eval(Xi, X, inverse);
        o.result = {{"value", io::to_json(v.value)}, {"rcond", v.rcond}, {"map", inverse ? "q" : "p"}};
    } catch (const OutsideDomain& e) {
        o.pass = false;
        o.result = {{"error", "OutsideDomain"}, {"message", e.what()}};
    }
    return o;
}

Outcome cmd_inverse_check(Context& ctx, const std::string& path, int level, double radius) {
    Tuple Xi = load_xi(ctx, path);
    auto r = verify_inverse_pair(Xi, ctx.degree, ctx.samples, ctx.seed, level, radius);
    Outcome o;
    o.pass = r.passed(ctx.tol);
    o.residuals = {{"series_pq", r.series_pq}, {"series_qp", r.series_qp}, {"samples", r.sample_residual}};
    o.result = {{"degree", r.degree}, {"samples", r.samples}, {"level", level}, {"radius", radius}};
    return o;
}

catalog::EntryParams entry_params(const std::string& alpha, const std::string& v, int size) {
    catalog::EntryParams p;
    if (!alpha.empty()) {
        cplx a = parse_scalar(alpha);
        if (std::abs(a.imag()) > 0) throw InvalidInput("alpha must be real");
        p.alpha = a.real();
    }
    if (!v.empty()) p.v = io::vector_from_json(json::parse(v));
    if (size > 0) p.size = size;
    return p;
}

json entry_json(const catalog::CatalogEntry& e) {
    json params = json::object();
    for (const auto& [k, val] : e.params) params[k] = io::to_json(val);
    return {{"id", e.id},
            {"g", e.g},
            {"description", e.description},
            {"relations", e.relations},
            {"params", params},
            {"R", io::to_json(e.R)},
            {"Xi", io::to_json(e.Xi)},
            {"p_formula", e.p_formula},
            {"q_formula", e.q_formula},
            {"validation",
             {{"convexotonic", e.validation.convexotonic_residual},
              {"structure", e.validation.structure_residual},
              {"formula", e.validation.formula_residual},
              {"degree", e.validation.degree}}}};
}

Outcome cmd_catalog_list() {
    Outcome o;
    json entries = json::array();
    for (const auto& e : catalog::list()) entries.push_back({{"id", e.id}, {"description", e.description}});
    o.result = {{"entries", entries}};
    return o;
}

Outcome cmd_catalog_get(Context& ctx, const std::string& id, const catalog::EntryParams& p) {
    ctx.digest.add(id);
    auto e = catalog::get(id, p, ctx.degree);
    Outcome o;
    o.result = entry_json(e);
    o.residuals = {{"convexotonic", e.validation.convexotonic_residual},
                   {"structure", e.validation.structure_residual},
                   {"formula", e.validation.formula_residual}};
    return o;
}

void certificate_suite(Context& ctx, const Pencil& A, const Mat& C, const Mat& W0, Outcome& o, double radius) {
    const int relation_degree = std::max(1, std::min(ctx.degree, 5));
    Certificate cert = build_certificate(A, C, W0, std::max(relation_degree, ctx.fock_order));
    auto rel = verify_relations(cert, relation_degree);
    Certificate fock = build_certificate(A, C, W0, ctx.fock_order);
    auto nil = verify_on_nilpotents(fock, ctx.fock_order, ctx.seed);
    auto smp = verify_on_samples(cert, ctx.samples, radius, ctx.seed);
    auto rec = verify_recursion(cert, relation_degree);
    o.residuals["relations"] = rel.max();
    o.residuals["fock"] = nil.fock_residual;
    o.residuals["random_nilpotent"] = nil.random_residual;
    o.residuals["samples_identity"] = smp.identity_residual;
    if (smp.map_residual >= 0) o.residuals["samples_map"] = smp.map_residual;
    o.residuals["recursion"] = rec.max();
    o.result["relation_degree"] = relation_degree;
    o.result["worst_relation"] = rel.worst;
    o.result["fock_order"] = ctx.fock_order;
    o.result["fock_dimension"] = nil.fock_dim;
    o.result["samples"] = smp.samples;
    o.result["samples_skipped"] = smp.skipped;
    o.result["radius"] = radius;
    o.result["B"] = io::to_json(cert.B);
    if (cert.Xi) o.result["Xi"] = io::to_json(*cert.Xi);
    const double scale = std::max(1.0, A.max_abs());
    o.pass = rel.passed(ctx.tol) && nil.passed(ctx.tol) && smp.passed(1e-8) && rec.max() < ctx.tol * scale;
}

Outcome cmd_certify(Context& ctx, const std::string& a_path, const std::string& c_path, const std::string& w_path,
                    double radius) {
    Pencil A = io::pencil_from_json(ctx.load(a_path));
    Mat C = io::matrix_from_json(ctx.load(c_path));
    Mat W0 = w_path.empty() ? Mat(Mat::Identity(A.d(), A.d())) : io::matrix_from_json(ctx.load(w_path));
    Outcome o;
    certificate_suite(ctx, A, C, W0, o, radius);
    return o;
}

Outcome cmd_generic(Context& ctx, const std::string& a_path, const std::string& mode, int budget) {
    Pencil A = io::pencil_from_json(ctx.load(a_path));
    GenericityReport r = mode == "sv" ? check_sv_generic(A, budget, ctx.seed)
                                      : check_eig_star_generic(A, mode, {}, budget, ctx.seed);
    Outcome o;
    o.pass = r.witnessed;
    o.residuals = {{"pairing", r.max_pairing_residual}, {"kernel_eigenvalue", r.max_kernel_eig}};
    json probes = json::array();
    for (const auto& p : r.probes)
        probes.push_back({{"level", p.level}, {"left", p.left}, {"gap", p.gap}});
    json right = json::array(), left = json::array();
    for (const auto& v : r.right_witnesses) right.push_back(io::to_json(Mat(v)));
    for (const auto& v : r.left_witnesses) left.push_back(io::to_json(Mat(v)));
    o.result = {{"condition", r.condition},   {"verdict", r.verdict},          {"explanation", r.explanation},
                {"budget", r.budget},         {"probes_used", r.probes_used},  {"rejected", r.rejected},
                {"target_dim", r.target_dim}, {"weak_only", r.weak_only},      {"right_witnesses", right},
                {"left_witnesses", left},     {"right_min_sigma", r.right_min_sigma},
                {"left_min_sigma", r.left_min_sigma}, {"accepted_probes", probes}};
    return o;
}

Outcome cmd_pair(Context& ctx, const std::string& id, const catalog::EntryParams& p, double margin, double radius) {
    ctx.digest.add(id);
    auto e = catalog::get(id, p, 2);
    Mat C = gallery::unitary_with_margin(e.R[0].rows(), margin, ctx.seed);
    auto pair = gallery::build_pair(e.R, C, margin, std::nullopt, id);
    Outcome o;
    certificate_suite(ctx, pair.A, C, Mat::Identity(pair.A.d(), pair.A.d()), o, radius);
    o.result["A"] = io::to_json(pair.A);
    o.result["C"] = io::to_json(C);
    o.result["source"] = id;
    double trip = -1;
    if (o.result.contains("Xi")) {
        Tuple got = io::tuple_from_json(o.result["Xi"]);
        trip = 0;
        for (size_t j = 0; j < got.size(); ++j) trip = std::max(trip, max_abs(got[j] - pair.Xi[j]));
    }
    o.residuals["round_trip_Xi"] = trip;
    if (!(trip >= 0 && trip < 1e-8)) o.pass = false;
    return o;
}

Outcome cmd_pq(Context& ctx, const std::string& gamma_s, const std::string& mode, const std::string& a1,
               const std::string& a3, const std::string& phi_s) {
    const cplx gamma = parse_scalar(gamma_s);
    gallery::PQFamily fam;
    if (mode == "identity") {
        fam = gallery::pq_example(false);
    } else if (mode == "span") {
        const cplx alpha1 = parse_scalar(a1), alpha3 = parse_scalar(a3);
        auto base = gallery::pq_example(false);
        Mat S = base.P12.adjoint() * base.P12 + base.P21 * base.P21.adjoint();
        fam = gallery::pq_build(base.Q, base.P12, base.P21, alpha1 * base.Q + alpha3 * S);
    } else {
        throw InvalidInput("--p22-mode must be identity or span");
    }
    auto m = gallery::pq_map(fam, gamma);
    auto bt = gallery::boundary_to_boundary(fam.A, m.B, m.p, std::max(1, ctx.samples / 2), {1, 2, 3}, ctx.seed);
    auto bounded = boundedness_evidence(fam.A, 1000, ctx.seed);
    auto cc = gallery::pq_c_condition(fam);
    Outcome o;
    o.residuals = {{"extraction", m.extraction_residual},
                   {"series", m.series_residual},
                   {"boundary_image", bt.max_image_eig}};
    o.result = {{"gamma", io::to_json(gamma)},
                {"A", io::to_json(fam.A)},
                {"B", io::to_json(m.B)},
                {"Xi", io::to_json(m.Xi)},
                {"p", io::to_json(m.p)},
                {"boundary_points", bt.points},
                {"bounded_evidence", {{"samples", bounded.samples}, {"indefinite", bounded.indefinite}}},
                {"c_condition", {{"holds", cc.holds}, {"candidates", cc.candidates.size()}}}};
    if (cc.witness) o.result["c_condition"]["witness"] = io::to_json(*cc.witness);
    o.pass = m.extraction_residual < ctx.tol && m.series_residual < ctx.tol && bt.passed() && bounded.passed();
    if (!phi_s.empty()) {
        const cplx phi = parse_scalar(phi_s);
        auto coeffs = gallery::pq_span(fam);
        FreeSeries s = gallery::s_phi_series(coeffs.alpha1, coeffs.alpha3, phi);
        auto auto_bt = gallery::boundary_to_boundary(fam.A, fam.A, s, std::max(1, ctx.samples / 2), {1, 2, 3}, ctx.seed);
        auto law = gallery::check_group_law(coeffs.alpha1, coeffs.alpha3, 10, ctx.seed);
        o.result["automorphism"] = {{"phi", io::to_json(phi)},
                                    {"alpha1", io::to_json(coeffs.alpha1)},
                                    {"alpha3", io::to_json(coeffs.alpha3)},
                                    {"s", io::to_json(s)}};
        o.residuals["automorphism_boundary"] = auto_bt.max_image_eig;
        o.residuals["group_law"] = law.max_residual;
        o.residuals["s_1_identity"] = law.identity_residual;
        o.pass = o.pass && auto_bt.passed() && law.max_residual < ctx.tol && law.identity_residual == 0.0;
    }
    return o;
}

Outcome cmd_bounded(Context& ctx, const std::string& a_path) {
    Pencil A = io::pencil_from_json(ctx.load(a_path));
    auto r = boundedness_evidence(A, ctx.samples, ctx.seed);
    Outcome o;
    o.pass = r.passed();
    o.residuals = {{"worst_margin", r.worst_margin}};
    o.result = {{"samples", r.samples}, {"indefinite", r.indefinite}, {"interpretation",
                r.passed() ? "all sampled directions indefinite (evidence of boundedness)"
                           : "definite direction found: D_A(1) is unbounded"}};
    if (r.counterexample) o.result["counterexample"] = io::to_json(Mat(*r.counterexample));
    return o;
}

Outcome cmd_hereditary(Context& ctx, const std::string& path) {
    json j = ctx.load(path);
    HereditaryCertificate hc;
    hc.L = io::pencil_from_json(j.at("L"));
    hc.h = io::hereditary_from_json(j.at("h"));
    for (const auto& s : j.value("squares", json::array())) hc.squares.push_back(io::series_from_json(s));
    for (const auto& w : j.value("weights", json::array())) hc.weights.push_back(io::series_from_json(w));
    auto r = verify_hereditary(hc, ctx.tol, ctx.seed, std::min(ctx.samples, 20));
    Outcome o;
    o.pass = r.valid;
    o.residuals = {{"max_mismatch", r.max_mismatch}, {"min_sample_eigenvalue", r.min_sample_eig}};
    o.result = {{"shape", r.shape}, {"samples", r.samples}};
    if (r.max_mismatch > 0)
        o.result["worst"] = {{"left", io::word_to_json(r.worst_left)}, {"right", io::word_to_json(r.worst_right)}};
    return o;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Free spectrahedra toolkit: convexotonic maps, certificates, genericity"};
    app.require_subcommand(1);
    Context ctx;
    auto common = [&](CLI::App* sub) {
        sub->add_option("--tol", ctx.tol, "Residual tolerance");
        sub->add_option("--degree", ctx.degree, "Series truncation degree");
        sub->add_option("--samples", ctx.samples, "Random sample count");
        sub->add_option("--seed", ctx.seed, "Master seed");
        sub->add_option("--fock-order", ctx.fock_order, "Truncated Fock order");
        sub->add_option("--format", ctx.format, "Output format")->check(CLI::IsMember({"json"}));
        sub->add_flag("--timings", ctx.timings, "Include wall-clock timings (breaks byte-identical output)");
    };

    std::string xi_path, e_path, r_path, point_path, a_path, c_path, w_path, cert_path, mode = "sv", id;
    std::string alpha, v, gamma = "-1", p22_mode = "identity", alpha1 = "0", alpha3 = "1", phi;
    bool inverse = false;
    int level = 3, budget = 500, size = 0;
    double radius = 0.1, margin = 0.1, cert_radius = 0.05;

    auto* verify = app.add_subcommand("verify-xi", "Check a structure tuple: convexotonic identity and inverse pair");
    verify->add_option("xi", xi_path, "Xi JSON file")->required();
    auto* structure = app.add_subcommand("structure", "Structure matrices of a module basis E over an algebra basis R");
    structure->add_option("--E", e_path, "Module basis JSON")->required();
    structure->add_option("--R", r_path, "Algebra basis JSON (defaults to E)");
    auto* eval = app.add_subcommand("eval", "Evaluate p (or q with --inverse) at a matrix tuple");
    eval->add_option("--xi", xi_path)->required();
    eval->add_option("--point", point_path)->required();
    eval->add_flag("--inverse", inverse);
    auto* inv = app.add_subcommand("inverse-check", "Series and sampled check that q inverts p");
    inv->add_option("--xi", xi_path)->required();
    inv->add_option("--level", level, "Matrix size of random samples");
    inv->add_option("--radius", radius, "Norm bound for random samples");
    auto* cat = app.add_subcommand("catalog", "Catalog of convexotonic tuples");
    cat->require_subcommand(1);
    auto* cat_list = cat->add_subcommand("list", "List catalog entries");
    auto* cat_get = cat->add_subcommand("get", "Load and validate one entry");
    cat_get->add_option("id", id)->required();
    auto* certify = app.add_subcommand("certify", "Build and verify the one-term certificate for (A, C)");
    certify->add_option("--A", a_path)->required();
    certify->add_option("--C", c_path)->required();
    certify->add_option("--W0", w_path, "Isometry W0 (defaults to I)");
    certify->add_option("--radius", cert_radius, "Sample radius");
    auto* generic = app.add_subcommand("generic", "Randomized sv/eig/star genericity witnesses");
    generic->add_option("--A", a_path)->required();
    generic->add_option("--mode", mode)->check(CLI::IsMember({"sv", "eig", "star"}));
    generic->add_option("--budget", budget, "Probe budget");
    auto* pair = app.add_subcommand("pair", "Spectrahedral pair from a catalog algebra and a random unitary");
    pair->add_option("--algebra", id)->required();
    pair->add_option("--margin", margin, "Distance of spec(C) from 1");
    pair->add_option("--radius", cert_radius, "Sample radius");
    auto* pq = app.add_subcommand("pq", "The P-Q example family");
    pq->add_option("--gamma", gamma, "Unimodular gamma");
    pq->add_option("--p22-mode", p22_mode, "identity or span");
    pq->add_option("--alpha1", alpha1);
    pq->add_option("--alpha3", alpha3);
    pq->add_option("--phi", phi, "Unimodular phi for the automorphism s_phi");
    auto* bounded = app.add_subcommand("bounded", "Randomized boundedness evidence for D_A");
    bounded->add_option("--A", a_path)->required();
    auto* hered = app.add_subcommand("hereditary", "Verify a hereditary Positivstellensatz certificate");
    hered->add_option("cert", cert_path)->required();
    for (auto* sub : {verify, structure, eval, inv, cat_get, certify, generic, pair, pq, bounded, hered}) common(sub);
    for (auto* sub : {cat_get, pair}) {
        sub->add_option("--alpha", alpha, "Real parameter of g3.02");
        sub->add_option("--v", v, "Ball centre as a JSON array");
        sub->add_option("--size", size, "g for ex6.4");
    }

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    for (int i = 1; i < argc; ++i) ctx.digest.add(argv[i]);

    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    std::string command;
    try {
        if (*verify) {
            command = "verify-xi";
            o = cmd_verify_xi(ctx, xi_path);
        } else if (*structure) {
            command = "structure";
            o = cmd_structure(ctx, e_path, r_path);
        } else if (*eval) {
            command = "eval";
            o = cmd_eval(ctx, xi_path, point_path, inverse);
        } else if (*inv) {
            command = "inverse-check";
            o = cmd_inverse_check(ctx, xi_path, level, radius);
        } else if (*cat_list) {
            command = "catalog list";
            o = cmd_catalog_list();
        } else if (*cat_get) {
            command = "catalog get";
            o = cmd_catalog_get(ctx, id, entry_params(alpha, v, size));
        } else if (*certify) {
            command = "certify";
            o = cmd_certify(ctx, a_path, c_path, w_path, cert_radius);
        } else if (*generic) {
            command = "generic";
            o = cmd_generic(ctx, a_path, mode, budget);
        } else if (*pair) {
            command = "pair";
            o = cmd_pair(ctx, id, entry_params(alpha, v, size), margin, cert_radius);
        } else if (*pq) {
            command = "pq";
            o = cmd_pq(ctx, gamma, p22_mode, alpha1, alpha3, phi);
        } else if (*bounded) {
            command = "bounded";
            o = cmd_bounded(ctx, a_path);
        } else if (*hered) {
            command = "hereditary";
            o = cmd_hereditary(ctx, cert_path);
        }
    } catch (const json::exception& e) {
        err << "error: malformed input: " << e.what() << "\n";
        return 2;
    } catch (const InvalidInput& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeMismatch& e) {
        err << "error: shape mismatch: " << e.what() << "\n";
        return 2;
    } catch (const VariableMismatch& e) {
        err << "error: variable mismatch: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        o.pass = false;
        o.result = {{"error", e.what()}};
    }

    json report = {{"command", command},
                   {"inputs_digest", ctx.digest.hex()},
                   {"seed", ctx.seed},
                   {"verdict", o.pass ? "pass" : "fail"},
                   {"residuals", o.residuals},
                   {"result", o.result}};
    if (ctx.timings)
        report["timings"] = {{"total_seconds",
                              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()}};
    out << report.dump(2) << "\n";
    return o.pass ? 0 : 1;
}

}  // namespace freespectra::cli
