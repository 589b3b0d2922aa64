// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "freespectra/catalog.hpp"
#include "freespectra/certify.hpp"
#include "freespectra/convexotonic.hpp"
#include "freespectra/expr.hpp"
#include "freespectra/gallery.hpp"
#include "freespectra/generic.hpp"
#include "freespectra/random.hpp"

using namespace freespectra;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

catalog::CatalogEntry load(const std::string& id, int degree = 8) {
    catalog::EntryParams p;
    if (id == "g3.02") p.alpha = 0.5;
    return catalog::get(id, p, degree);
}

std::vector<std::string> fixture_ids() {
    std::vector<std::string> ids;
    for (const auto& e : catalog::list())
        if (e.id.rfind("g2.", 0) == 0 || e.id.rfind("g3.", 0) == 0) ids.push_back(e.id);
    return ids;
}

void criterion1(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto ids = fixture_ids();
    o.require(ids.size() == 16, "16 fixtures listed");
    double conv = 0, series = 0, sample = 0;
    for (size_t k = 0; k < ids.size(); ++k) {
        auto e = load(ids[k]);
        conv = std::max(conv, is_convexotonic(e.Xi).max_residual);
        auto r = verify_inverse_pair(e.Xi, 8, 100, 1000 + k, 3, 0.1);
        series = std::max({series, r.series_pq, r.series_qp});
        sample = std::max(sample, r.sample_residual);
        o.require(r.samples == 100, ids[k] + " sample count");
    }
    const double secs = seconds_since(t0);
    o.require(conv < 1e-12, "convexotonic residual");
    o.require(series < 1e-10, "series residual");
    o.require(sample < 1e-8, "sample residual");
    o.require(secs < 10, "runtime");
    o.detail << ids.size() << " entries, conv " << conv << ", series " << series << ", samples " << sample << ", "
             << secs << " s";
}

void criterion2(Outcome& o) {
    int nilpotent = 0;
    for (const auto& id : fixture_ids()) {
        auto e = load(id, 2);
        auto r = nilpotency_and_degree(e.Xi);
        if (!r.nilpotent) continue;
        ++nilpotent;
        o.require(r.degree_p == r.order && r.order <= e.g, id + " deg p = nu <= g");
    }
    std::ostringstream degs;
    for (int g = 2; g <= 4; ++g) {
        catalog::EntryParams p;
        p.size = g;
        auto e = catalog::get("ex6.4", p, g + 2);
        auto r = nilpotency_and_degree(e.Xi);
        o.require(r.degree_p == g, "ex6.4 degree at g=" + std::to_string(g));
        degs << (g > 2 ? "," : "") << r.degree_p;
    }
    o.detail << nilpotent << " nilpotent entries checked, ex6.4 degrees " << degs.str();
}

void criterion3(Outcome& o) {
    auto e = load("g2.I");
    double r1 = coeff_distance(map_series(e.Xi, 8).p, parse_map({"x1", "x2 + x1^2"}, 2, 8));
    o.require(r1 < 1e-10, "Type I map");
    auto fam = gallery::pq_example();
    auto m = gallery::pq_map(fam, -1.0);
    double r2 = coeff_distance(map_series(m.Xi, 8).p, parse_map({"x1", "x2 + 4*x1^2"}, 2, 8));
    o.require(r2 < 1e-10, "gamma=-1 map");
    double r3 = 0;
    for (cplx gamma : {cplx(-1.0), cplx(0.0, 1.0), std::polar(1.0, std::numbers::pi / 3)}) {
        auto mg = gallery::pq_map(fam, gamma);
        Mat X1 = Mat::Zero(2, 2);
        X1(0, 1) = -2.0 * (gamma - 1.0);
        Extraction ex = extract_convexotonic(fam.A, gallery::v_gamma(gamma));
        o.require(ex.ok, "extraction");
        r3 = std::max({r3, max_abs(ex.Xi[0] - X1), max_abs(ex.Xi[1]), mg.extraction_residual});
    }
    o.require(r3 < 1e-10, "extracted Xi");
    o.detail << "Type I " << r1 << ", p_-1 " << r2 << ", extraction " << r3;
}

void criterion4(Outcome& o) {
    auto t0 = std::chrono::steady_clock::now();
    auto ids = fixture_ids();
    double rel = 0, nil = 0, smp = 0, rec = 0, trip = 0;
    const int instances = 20;
    for (int k = 0; k < instances; ++k) {
        auto e = load(ids[static_cast<size_t>(k) % ids.size()], 2);
        Mat C = gallery::unitary_with_margin(e.R[0].rows(), 0.1, 77 + static_cast<std::uint64_t>(k));
        auto pair = gallery::build_pair(e.R, C, 0.1);
        const auto d = pair.A.d();
        Certificate cert = build_certificate(pair.A, C, Mat::Identity(d, d), 5);
        rel = std::max(rel, verify_relations(cert, 5).max());
        Certificate c4 = build_certificate(pair.A, C, Mat::Identity(d, d), 4);
        nil = std::max(nil, verify_on_nilpotents(c4, 4, static_cast<std::uint64_t>(k)).max());
        auto s = verify_on_samples(cert, 100, 0.05, static_cast<std::uint64_t>(k));
        o.require(s.skipped == 0, "no skipped samples");
        smp = std::max(smp, s.max());
        rec = std::max(rec, verify_recursion(cert, 5).max());
        o.require(cert.Xi.has_value(), "Xi extracted");
        if (cert.Xi)
            for (size_t j = 0; j < e.Xi.size(); ++j) trip = std::max(trip, max_abs((*cert.Xi)[j] - e.Xi[j]));
    }
    const double secs = seconds_since(t0);
    o.require(rel < 1e-10, "relations");
    o.require(nil < 1e-10, "Fock order 4");
    o.require(smp < 1e-8, "samples");
    o.require(rec < 1e-12, "recursion");
    o.require(trip < 1e-10, "round trip Xi");
    o.require(secs < 60, "runtime");
    o.detail << instances << " pairs, relations " << rel << ", nilpotent " << nil << ", samples " << smp
             << ", recursion " << rec << ", round trip " << trip << ", " << secs << " s";
}

void criterion5(Outcome& o) {
    auto e = load("g2.I", 2);
    Mat C = gallery::unitary_with_margin(3, 0.1, 5);
    auto pair = gallery::build_pair(e.R, C);
    const int N = 4;
    Certificate base = build_certificate(pair.A, C, Mat::Identity(3, 3), N);
    o.require(verify_relations(base, N).max() < 1e-10, "clean certificate");
    double weakest_rel = 1e300, weakest_nil = 1e300;
    int tried = 0;
    for (const auto& w : words_up_to(2, N)) {
        Certificate bad = base;
        Mat c = bad.W.coeff(w);
        c(0, 0) += 1e-3;
        bad.W.set(w, c);
        weakest_rel = std::min(weakest_rel, verify_relations(bad, N).max());
        weakest_nil = std::min(weakest_nil, verify_on_nilpotents(bad, N, 3, 4).max());
        ++tried;
    }
    o.require(weakest_rel >= 1e-4, "relations detect");
    o.require(weakest_nil >= 1e-4, "nilpotent evaluation detects");
    o.detail << tried << " single-coefficient perturbations, smallest relation residual " << weakest_rel
             << ", smallest nilpotent residual " << weakest_nil;
}

void criterion6(Outcome& o) {
    auto fam = gallery::pq_example();
    auto bounded = boundedness_evidence(fam.A, 1000, 6);
    o.require(bounded.passed(), "boundedness evidence");
    auto m = gallery::pq_map(fam, -1.0);
    auto bt = gallery::boundary_to_boundary(fam.A, m.B, m.p, 50, {1, 2, 3}, 6);
    o.require(bt.points == 150 && bt.passed(1e-7), "boundary to boundary");
    auto span = gallery::pq_example(true);
    auto coeffs = gallery::pq_span(span);
    auto law = gallery::check_group_law(coeffs.alpha1, coeffs.alpha3, 10, 6);
    o.require(law.max_residual < 1e-10, "group law");
    o.require(law.identity_residual == 0.0, "s_1 = id");
    o.detail << "bounded " << bounded.indefinite << "/" << bounded.samples << ", boundary image " << bt.max_image_eig
             << ", group law " << law.max_residual << ", s_1 residual " << law.identity_residual;
}

void criterion7(Outcome& o) {
    double conv = 0, bnd = 0, fix = 0;
    for (int k = 0; k < 10; ++k) {
        Rng rng(7, static_cast<std::uint64_t>(k));
        const int g = 2 + k % 2;
        Vec v = rng.unit_vector(g) * rng.uniform(0.05, 0.7);
        conv = std::max(conv, is_convexotonic(catalog::ball_tuple(v)).max_residual);
        Pencil L = catalog::ball_pencil(g);
        for (int s = 0; s < 3; ++s) {
            MatrixTuple X = gallery::random_boundary_point(L, 1 + s, 70 + static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(s));
            bnd = std::max(bnd, std::abs(min_eigenvalue(eval_pencil(L, catalog::ball_automorphism(v, X)))));
        }
        MatrixTuple V;
        for (int j = 0; j < g; ++j) V.X.push_back(Mat::Constant(1, 1, v(j)));
        fix = std::max(fix, catalog::ball_automorphism(v, V).max_abs());
    }
    o.require(conv <= 1e-15, "convexotonic");
    o.require(bnd < 1e-7, "boundary");
    o.require(fix < 1e-10, "F_v(v) = 0");
    o.detail << "10 centres, conv " << conv << ", 30 boundary images " << bnd << ", F_v(v) " << fix;
}

void criterion8(Outcome& o) {
    Tuple Xa{Mat::Zero(2, 2), Mat::Zero(2, 2)}, Xb{Mat::Zero(2, 2), Mat::Zero(2, 2)};
    Xa[0](0, 1) = 1.0;  // (x1, x2 + x1^2)
    Xb[1](1, 0) = 1.0;  // (x1 + x2^2, x2)
    auto rep = composition_probe(Xa, Xb, 8);
    auto expected = parse_map({"x1 + x2^2", "x2 + x1^2 + x1*x2^2 + x2^2*x1 + x2^4"}, 2, 8);
    const double r = coeff_distance(rep.composite, expected);
    o.require(r < 1e-12, "composite");
    o.require(rep.verdict == "not convexotonic, degree 4 > g=2", "verdict");
    o.detail << "composite residual " << r << ", verdict \"" << rep.verdict << "\"";
}

void criterion9(Outcome& o) {
    auto e = load("g2.I", 2);
    Pencil A = gallery::build_pair(e.R, gallery::unitary_with_margin(3, 0.1, 9)).A;
    HereditaryCertificate lin{A, A.as_hereditary(), {}, {FreeSeries::identity(2, 3, 0)}};
    HereditaryCertificate sq{Pencil({Mat::Constant(1, 1, 0.5)}), HereditaryPoly(1, 1, 1), {FreeSeries::variable(1, 0, 1)}, {}};
    sq.h.set(Word::letter(0), Word::letter(0), Mat::Constant(1, 1, 1.0));
    auto r1 = verify_hereditary(lin);
    auto r2 = verify_hereditary(sq);
    o.require(r1.valid && r1.max_mismatch == 0.0, "h = L_A accepted exactly");
    o.require(r2.valid && r2.max_mismatch == 0.0, "h = x*x accepted exactly");
    int rejected = 0, located = 0, total = 0;
    for (const HereditaryCertificate* hc : {&lin, &sq}) {
        for (const auto& [key, c] : hc->h.terms()) {
            HereditaryCertificate bad = *hc;
            Mat m = c;
            m(0, 0) += 1e-3;
            bad.h.set(key.first, key.second, m);
            auto r = verify_hereditary(bad);
            ++total;
            if (!r.valid) ++rejected;
            if (r.worst_left == key.first && r.worst_right == key.second) ++located;
        }
    }
    o.require(rejected == total && located == total, "perturbations rejected and located");
    o.detail << "trivial certificates exact, " << rejected << "/" << total << " perturbations rejected, " << located
             << " located";
}

void criterion10(Outcome& o) {
    int witnessed = 0;
    for (int k = 0; k < 10; ++k) {
        Rng rng(10, static_cast<std::uint64_t>(k));
        Pencil A({rng.gaussian(3, 3), rng.gaussian(3, 3)});
        if (check_sv_generic(A, 500, static_cast<std::uint64_t>(k)).witnessed) ++witnessed;
    }
    o.require(witnessed == 10, "random tuples witnessed");
    Mat N = Mat::Zero(2, 2);
    N(0, 1) = 1.0;
    auto nil = check_sv_generic(Pencil({N}), 500, 10);
    o.require(!nil.witnessed, "nilpotent not witnessed");
    o.require(nil.explanation.find("u=e_2") != std::string::npos, "structural explanation");
    auto eig = check_eig_star_generic(gallery::pq_example().A, "eig", {}, 500, 10);
    o.require(eig.witnessed && !eig.weak_only, "eig-generic for the example");
    o.detail << witnessed << "/10 random witnessed, nilpotent: " << nil.verdict << " (" << nil.explanation
             << "), example: " << eig.verdict;
}

}  // namespace

int main(int argc, char** argv) {
    // optional argument: run only the listed criteria, e.g. "4"
    std::vector<int> only;
    for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
    const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"catalog validity", criterion1},
        {"degree bounds", criterion2},
        {"pinned formulas", criterion3},
        {"certificate suite", criterion4},
        {"perturbation detection", criterion5},
        {"P-Q family end to end", criterion6},
        {"ball automorphisms", criterion7},
        {"composition non-closure", criterion8},
        {"hereditary verifier", criterion9},
        {"genericity", criterion10},
    };
    int failed = 0, ran = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(i + 1)) == only.end()) continue;
        Outcome o;
        ++ran;
        try {
            criteria[i].second(o);
        } catch (const std::exception& ex) {
            o.pass = false;
            o.detail << " [exception: " << ex.what() << "]";
        }
        if (!o.pass) ++failed;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.str().c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%d criteria passed\n", ran - failed, ran);
    return failed == 0 ? 0 : 1;
}
