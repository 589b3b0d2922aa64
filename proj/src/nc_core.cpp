#include "freespectra/nc_core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>

namespace freespectra {

Word Word::operator+(const Word& o) const {
    Word r;
    r.letters.reserve(letters.size() + o.letters.size());
    r.letters.insert(r.letters.end(), letters.begin(), letters.end());
    r.letters.insert(r.letters.end(), o.letters.begin(), o.letters.end());
    return r;
}

Word Word::prefix(int len) const {
    return Word(std::vector<int>(letters.begin(), letters.begin() + len));
}

Word Word::suffix_from(int pos) const {
    return Word(std::vector<int>(letters.begin() + pos, letters.end()));
}

std::string Word::str() const {
    if (letters.empty()) return "1";
    std::ostringstream os;
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i) os << '*';
        os << 'x' << letters[i] + 1;
    }
    return os.str();
}

std::size_t word_count(int g, int N) {
    std::size_t total = 0, layer = 1;
    for (int k = 0; k <= N; ++k) {
        total += layer;
        layer *= static_cast<std::size_t>(g);
    }
    return total;
}

std::vector<Word> words_of_length(int g, int len) {
    std::vector<Word> out;
    std::vector<int> cur(static_cast<size_t>(len), 0);
    if (len == 0) {
        out.emplace_back();
        return out;
    }
    if (g <= 0) return out;
    while (true) {
        out.emplace_back(cur);
        int pos = len - 1;
        while (pos >= 0 && cur[static_cast<size_t>(pos)] == g - 1) {
            cur[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
        ++cur[static_cast<size_t>(pos)];
    }
    return out;
}

std::vector<Word> words_up_to(int g, int N) {
    std::vector<Word> out;
    out.reserve(word_count(g, N));
    for (int k = 0; k <= N; ++k) {
        auto layer = words_of_length(g, k);
        out.insert(out.end(), layer.begin(), layer.end());
    }
    return out;
}

std::size_t word_index(const Word& w, int g) {
    std::size_t offset = word_count(g, w.size() - 1);
    if (w.empty()) offset = 0;
    std::size_t rank = 0;
    for (int l : w.letters) rank = rank * static_cast<std::size_t>(g) + static_cast<std::size_t>(l);
    return offset + rank;
}

MatrixTuple::MatrixTuple(std::vector<Mat> xs) : X(std::move(xs)) {
    for (const auto& m : X) {
        if (m.rows() != m.cols() || m.rows() != X[0].rows())
            throw ShapeMismatch("matrix tuple entries must be square of a common size");
    }
}

MatrixTuple MatrixTuple::zeros(int g, Eigen::Index n) {
    return MatrixTuple(std::vector<Mat>(static_cast<size_t>(g), Mat::Zero(n, n)));
}

MatrixTuple MatrixTuple::scaled(cplx c) const {
    MatrixTuple r = *this;
    for (auto& m : r.X) m *= c;
    return r;
}

MatrixTuple MatrixTuple::conjugated(const Mat& U) const {
    MatrixTuple r;
    for (const auto& m : X) r.X.push_back(U.adjoint() * m * U);
    return r;
}

MatrixTuple MatrixTuple::operator+(const MatrixTuple& o) const {
    if (g() != o.g()) throw VariableMismatch("tuple sum: variable counts differ");
    MatrixTuple r = *this;
    for (int j = 0; j < g(); ++j) r[j] += o[j];
    return r;
}

MatrixTuple MatrixTuple::operator-(const MatrixTuple& o) const {
    return *this + o.scaled(-1.0);
}

double MatrixTuple::max_norm() const {
    double r = 0;
    for (const auto& m : X) r = std::max(r, opnorm(m));
    return r;
}

double MatrixTuple::max_abs() const {
    double r = 0;
    for (const auto& m : X) r = std::max(r, freespectra::max_abs(m));
    return r;
}

MatrixTuple direct_sum(const MatrixTuple& a, const MatrixTuple& b) {
    if (a.g() != b.g()) throw VariableMismatch("direct sum: variable counts differ");
    const auto n = a.n(), m = b.n();
    MatrixTuple r;
    for (int j = 0; j < a.g(); ++j) {
        Mat s = Mat::Zero(n + m, n + m);
        s.topLeftCorner(n, n) = a[j];
        s.bottomRightCorner(m, m) = b[j];
        r.X.push_back(std::move(s));
    }
    return r;
}

Mat eval_word(const Word& w, const MatrixTuple& X) {
    Mat r = Mat::Identity(X.n(), X.n());
    for (int l : w.letters) {
        if (l < 0 || l >= X.g()) throw VariableMismatch("word letter outside 1..g");
        r = r * X[l];
    }
    return r;
}

// ---------------------------------------------------------------- FreeSeries

FreeSeries::FreeSeries(int g, Eigen::Index rows, Eigen::Index cols, int max_degree)
    : g_(g), rows_(rows), cols_(cols), N_(max_degree) {}

FreeSeries FreeSeries::constant(int g, const Mat& c, int max_degree) {
    FreeSeries f(g, c.rows(), c.cols(), max_degree);
    f.set(Word(), c);
    return f;
}

FreeSeries FreeSeries::identity(int g, Eigen::Index size, int max_degree) {
    return constant(g, Mat::Identity(size, size), max_degree);
}

FreeSeries FreeSeries::variable(int g, int j, int max_degree) {
    if (j < 0 || j >= g) throw VariableMismatch("variable index outside 1..g");
    FreeSeries f(g, 1, 1, max_degree);
    f.set(Word::letter(j), Mat::Ones(1, 1));
    return f;
}

Mat FreeSeries::coeff(const Word& w) const {
    auto it = coeffs_.find(w);
    if (it == coeffs_.end()) return Mat::Zero(rows_, cols_);
    return it->second;
}

void FreeSeries::set(const Word& w, const Mat& m) {
    if (m.rows() != rows_ || m.cols() != cols_) throw ShapeMismatch("series coefficient has wrong shape");
    for (int l : w.letters)
        if (l < 0 || l >= g_) throw VariableMismatch("series word letter outside 1..g");
    if (w.size() > N_) return;
    coeffs_[w] = m;
}

void FreeSeries::add_to(const Word& w, const Mat& m) {
    if (w.size() > N_) return;
    auto it = coeffs_.find(w);
    if (it == coeffs_.end())
        set(w, m);
    else
        it->second += m;
}

void FreeSeries::prune(double tol) {
    for (auto it = coeffs_.begin(); it != coeffs_.end();) {
        if (freespectra::max_abs(it->second) <= tol)
            it = coeffs_.erase(it);
        else
            ++it;
    }
}

int FreeSeries::degree(double tol) const {
    int d = -1;
    for (const auto& [w, m] : coeffs_)
        if (freespectra::max_abs(m) > tol) d = std::max(d, w.size());
    return d;
}

double FreeSeries::max_coeff_norm() const {
    double r = 0;
    for (const auto& [w, m] : coeffs_) r = std::max(r, freespectra::max_abs(m));
    return r;
}

FreeSeries FreeSeries::truncated(int N) const {
    FreeSeries r(g_, rows_, cols_, N);
    for (const auto& [w, m] : coeffs_)
        if (w.size() <= N) r.coeffs_[w] = m;
    return r;
}

FreeSeries FreeSeries::scaled(cplx c) const {
    FreeSeries r = *this;
    for (auto& [w, m] : r.coeffs_) m *= c;
    return r;
}

FreeSeries FreeSeries::left_mul(const Mat& a) const {
    if (a.cols() != rows_) throw ShapeMismatch("left multiplier does not conform");
    FreeSeries r(g_, a.rows(), cols_, N_);
    for (const auto& [w, m] : coeffs_) r.coeffs_[w] = a * m;
    return r;
}

FreeSeries FreeSeries::right_mul(const Mat& a) const {
    if (a.rows() != cols_) throw ShapeMismatch("right multiplier does not conform");
    FreeSeries r(g_, rows_, a.cols(), N_);
    for (const auto& [w, m] : coeffs_) r.coeffs_[w] = m * a;
    return r;
}

FreeSeries FreeSeries::entry(Eigen::Index i, Eigen::Index j) const {
    FreeSeries r(g_, 1, 1, N_);
    for (const auto& [w, m] : coeffs_) r.coeffs_[w] = m.block(i, j, 1, 1);
    return r;
}

void FreeSeries::check_compatible(const FreeSeries& o) const {
    if (g_ != o.g_) throw VariableMismatch("series have different variable counts");
    if (rows_ != o.rows_ || cols_ != o.cols_) throw ShapeMismatch("series shapes differ");
}

FreeSeries FreeSeries::operator+(const FreeSeries& o) const {
    check_compatible(o);
    FreeSeries r(g_, rows_, cols_, std::min(N_, o.N_));
    for (const auto& [w, m] : coeffs_) r.add_to(w, m);
    for (const auto& [w, m] : o.coeffs_) r.add_to(w, m);
    return r;
}

FreeSeries FreeSeries::operator-(const FreeSeries& o) const {
    return *this + o.scaled(-1.0);
}

FreeSeries series_mul(const FreeSeries& f, const FreeSeries& h) {
    if (f.g() != h.g()) throw VariableMismatch("series_mul: variable counts differ");
    if (f.cols() != h.rows()) throw ShapeMismatch("series_mul: inner dimensions differ");
    const int N = std::min(f.max_degree(), h.max_degree());
    FreeSeries r(f.g(), f.rows(), h.cols(), N);

    std::vector<std::vector<const std::pair<const Word, Mat>*>> buckets(static_cast<size_t>(N) + 1);
    for (const auto& t : h.terms()) buckets[static_cast<size_t>(t.first.size())].push_back(&t);

    for (const auto& [u, fu] : f.terms()) {
        for (int d = 0; d + u.size() <= N; ++d) {
            for (const auto* t : buckets[static_cast<size_t>(d)]) r.add_to(u + t->first, fu * t->second);
        }
    }
    return r;
}

FreeSeries series_inverse(const FreeSeries& f) {
    if (f.rows() != f.cols()) throw ShapeMismatch("series_inverse: square coefficients required");
    Mat c = f.coeff(Word());
    Eigen::FullPivLU<Mat> lu(c);
    if (!lu.isInvertible()) throw OutsideDomain("series_inverse: constant term is singular");
    Mat ci = lu.inverse();

    FreeSeries k = f;
    k.set(Word(), Mat::Zero(f.rows(), f.cols()));
    k = k.left_mul(-ci);
    k.prune();

    FreeSeries base = FreeSeries::constant(f.g(), ci, f.max_degree());
    FreeSeries y = base;
    // Y <- c^{-1} + K Y is exact through degree k after k steps
    for (int step = 0; step < f.max_degree(); ++step) y = base + series_mul(k, y);
    return y;
}

FreeSeries geometric_inverse(const FreeSeries& lambda, int N) {
    if (lambda.rows() != lambda.cols()) throw ShapeMismatch("geometric_inverse: square coefficients required");
    for (const auto& [w, m] : lambda.terms())
        if (w.size() != 1 && max_abs(m) > 0) throw InvalidInput("geometric_inverse: input must be homogeneous linear");
    FreeSeries one = FreeSeries::identity(lambda.g(), lambda.rows(), N);
    FreeSeries lam(lambda.g(), lambda.rows(), lambda.cols(), N);
    for (const auto& [w, m] : lambda.terms()) lam.set(w, m);
    return series_inverse(one - lam);
}

FreeSeries substitute(const FreeSeries& f, const std::vector<FreeSeries>& h, int N) {
    if (static_cast<int>(h.size()) != f.g()) throw VariableMismatch("substitute: need one series per variable");
    const int g_in = h.empty() ? 0 : h[0].g();
    std::vector<FreeSeries> hs;
    for (const auto& s : h) {
        if (s.rows() != 1 || s.cols() != 1) throw ShapeMismatch("substitute: inner series must be scalar");
        if (s.g() != g_in) throw VariableMismatch("substitute: inner series disagree on g");
        hs.push_back(s.truncated(N));
    }
    std::map<Word, FreeSeries> powers;
    powers.emplace(Word(), FreeSeries::identity(g_in, 1, N));
    auto power = [&](const Word& w, auto&& self) -> const FreeSeries& {
        auto it = powers.find(w);
        if (it != powers.end()) return it->second;
        const FreeSeries& head = self(w.prefix(w.size() - 1), self);
        FreeSeries p = series_mul(head, hs[static_cast<size_t>(w.letters.back())]);
        return powers.emplace(w, std::move(p)).first->second;
    };

    FreeSeries r(g_in, f.rows(), f.cols(), N);
    for (const auto& [w, c] : f.terms()) {
        const FreeSeries& p = power(w, power);
        for (const auto& [u, s] : p.terms()) r.add_to(u, c * s(0, 0));
    }
    return r;
}

double coeff_distance(const FreeSeries& a, const FreeSeries& b) {
    double r = 0;
    for (const auto& [w, m] : a.terms()) r = std::max(r, max_abs(m - b.coeff(w)));
    for (const auto& [w, m] : b.terms())
        if (!a.has(w)) r = std::max(r, max_abs(m));
    return r;
}

const Mat& WordPowers::get(const Word& w) {
    auto it = cache_.find(w);
    if (it != cache_.end()) return it->second;
    Mat value;
    if (w.empty()) {
        value = Mat::Identity(X_.n(), X_.n());
    } else {
        const int last = w.letters.back();
        if (last < 0 || last >= X_.g()) throw VariableMismatch("word letter outside 1..g");
        const Mat& head = get(w.prefix(w.size() - 1));
        value = head * X_[last];
    }
    return cache_.emplace(w, std::move(value)).first->second;
}

Mat eval_series(const FreeSeries& f, WordPowers& powers, Eigen::Index n) {
    Mat r = Mat::Zero(f.rows() * n, f.cols() * n);
    for (const auto& [w, c] : f.terms()) {
        if (max_abs(c) == 0) continue;
        r += Eigen::kroneckerProduct(c, powers.get(w)).eval();
    }
    return r;
}

Mat eval_series(const FreeSeries& f, const MatrixTuple& X) {
    if (f.g() != X.g()) throw VariableMismatch("eval_series: variable counts differ");
    WordPowers powers(X);
    return eval_series(f, powers, X.n());
}

double joint_spectral_radius(const MatrixTuple& X, int N) {
    if (N < 1) throw InvalidInput("joint_spectral_radius: depth must be positive");
    double best = 0;
    std::vector<Mat> stack{Mat::Identity(X.n(), X.n())};
    std::vector<int> choice;
    // depth-first over words of length N, reusing prefix products
    std::function<void(int)> walk = [&](int depth) {
        if (depth == N) {
            best = std::max(best, std::pow(opnorm(stack.back()), 1.0 / N));
            return;
        }
        for (int j = 0; j < X.g(); ++j) {
            stack.push_back(stack.back() * X[j]);
            walk(depth + 1);
            stack.pop_back();
        }
    };
    walk(0);
    return best;
}

double formal_radius_estimate(const FreeSeries& f, int N) {
    double s = 0;
    for (const auto& [w, m] : f.terms())
        if (w.size() == N) s += opnorm(m);
    if (s == 0) return std::numeric_limits<double>::infinity();
    return std::pow(s, -1.0 / N);
}

MatrixTuple fock_shift_tuple(int g, int N) {
    if (g < 1 || N < 1) throw InvalidInput("fock_shift_tuple: need g >= 1 and N >= 1");
    const auto dim = static_cast<Eigen::Index>(word_count(g, N));
    MatrixTuple S = MatrixTuple::zeros(g, dim);
    for (const Word& w : words_up_to(g, N - 1)) {
        const auto src = static_cast<Eigen::Index>(word_index(w, g));
        for (int j = 0; j < g; ++j) {
            const auto dst = static_cast<Eigen::Index>(word_index(Word::letter(j) + w, g));
            S[j](dst, src) = 1.0;
        }
    }
    return S;
}

// ------------------------------------------------------------ HereditaryPoly

HereditaryPoly::HereditaryPoly(int g, Eigen::Index rows, Eigen::Index cols) : g_(g), rows_(rows), cols_(cols) {}

HereditaryPoly HereditaryPoly::from_analytic(const FreeSeries& f) {
    HereditaryPoly h(f.g(), f.rows(), f.cols());
    for (const auto& [w, m] : f.terms()) h.set(Word(), w, m);
    return h;
}

Mat HereditaryPoly::coeff(const Word& v, const Word& w) const {
    auto it = coeffs_.find({v, w});
    if (it == coeffs_.end()) return Mat::Zero(rows_, cols_);
    return it->second;
}

void HereditaryPoly::set(const Word& v, const Word& w, const Mat& m) {
    if (m.rows() != rows_ || m.cols() != cols_) throw ShapeMismatch("hereditary coefficient has wrong shape");
    for (const Word* x : {&v, &w})
        for (int l : x->letters)
            if (l < 0 || l >= g_) throw VariableMismatch("hereditary word letter outside 1..g");
    coeffs_[{v, w}] = m;
}

void HereditaryPoly::add_to(const Word& v, const Word& w, const Mat& m) {
    auto it = coeffs_.find({v, w});
    if (it == coeffs_.end())
        set(v, w, m);
    else
        it->second += m;
}

int HereditaryPoly::degree() const {
    int d = -1;
    for (const auto& [k, m] : coeffs_)
        if (max_abs(m) > 0) d = std::max(d, k.first.size() + k.second.size());
    return d;
}

bool HereditaryPoly::is_symmetric(double tol) const {
    if (rows_ != cols_) return false;
    for (const auto& [k, m] : coeffs_)
        if (max_abs(m - coeff(k.second, k.first).adjoint()) > tol) return false;
    return true;
}

Mat HereditaryPoly::eval(const MatrixTuple& X) const {
    if (X.g() != g_) throw VariableMismatch("hereditary eval: variable counts differ");
    WordPowers powers(X);
    const auto n = X.n();
    Mat r = Mat::Zero(rows_ * n, cols_ * n);
    for (const auto& [k, m] : coeffs_) {
        Mat xv = powers.get(k.first).adjoint() * powers.get(k.second);
        r += Eigen::kroneckerProduct(m, xv).eval();
    }
    return r;
}

HereditaryPoly hermitian_product(const FreeSeries& a, const FreeSeries& b) {
    if (a.g() != b.g()) throw VariableMismatch("hermitian_product: variable counts differ");
    if (a.rows() != b.rows()) throw ShapeMismatch("hermitian_product: row counts differ");
    HereditaryPoly h(a.g(), a.cols(), b.cols());
    for (const auto& [v, av] : a.terms())
        for (const auto& [w, bw] : b.terms()) h.add_to(v, w, av.adjoint() * bw);
    return h;
}

}  // namespace freespectra
