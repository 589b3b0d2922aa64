#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "freespectra/types.hpp"

namespace freespectra {

// Letters are stored 0-based; the JSON and string forms use 1..g.
struct Word {
    std::vector<int> letters;

    Word() = default;
    explicit Word(std::vector<int> l) : letters(std::move(l)) {}
    static Word letter(int j) { return Word({j}); }

    int size() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }
    int operator[](int i) const { return letters[static_cast<size_t>(i)]; }

    Word operator+(const Word& o) const;
    Word prefix(int len) const;
    Word suffix_from(int pos) const;

    // graded lexicographic, x_1 < ... < x_g
    bool operator<(const Word& o) const {
        if (letters.size() != o.letters.size()) return letters.size() < o.letters.size();
        return letters < o.letters;
    }
    bool operator==(const Word& o) const { return letters == o.letters; }
    bool operator!=(const Word& o) const { return !(*this == o); }

    std::string str() const;
};

// Number of words of length <= N in g letters.
std::size_t word_count(int g, int N);
// All words of length <= N, graded-lex order.
std::vector<Word> words_up_to(int g, int N);
std::vector<Word> words_of_length(int g, int len);
// Position of w in words_up_to(g, N) for any N >= |w|.
std::size_t word_index(const Word& w, int g);

struct MatrixTuple {
    std::vector<Mat> X;

    MatrixTuple() = default;
    explicit MatrixTuple(std::vector<Mat> xs);
    static MatrixTuple zeros(int g, Eigen::Index n);

    int g() const { return static_cast<int>(X.size()); }
    Eigen::Index n() const { return X.empty() ? 0 : X[0].rows(); }
    const Mat& operator[](int j) const { return X[static_cast<size_t>(j)]; }
    Mat& operator[](int j) { return X[static_cast<size_t>(j)]; }

    MatrixTuple scaled(cplx c) const;
    MatrixTuple conjugated(const Mat& U) const;  // U* X_j U
    MatrixTuple operator+(const MatrixTuple& o) const;
    MatrixTuple operator-(const MatrixTuple& o) const;
    double max_norm() const;  // max_j ||X_j||_2
    double max_abs() const;
};

MatrixTuple direct_sum(const MatrixTuple& a, const MatrixTuple& b);

Mat eval_word(const Word& w, const MatrixTuple& X);

class FreeSeries {
public:
    FreeSeries() = default;
    FreeSeries(int g, Eigen::Index rows, Eigen::Index cols, int max_degree);

    static FreeSeries constant(int g, const Mat& c, int max_degree);
    static FreeSeries identity(int g, Eigen::Index size, int max_degree);
    // scalar series consisting of the single variable x_j (0-based j)
    static FreeSeries variable(int g, int j, int max_degree);

    int g() const { return g_; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    int max_degree() const { return N_; }
    const std::map<Word, Mat>& terms() const { return coeffs_; }

    Mat coeff(const Word& w) const;
    bool has(const Word& w) const { return coeffs_.count(w) != 0; }
    // Words longer than max_degree are dropped silently.
    void set(const Word& w, const Mat& m);
    void add_to(const Word& w, const Mat& m);
    void prune(double tol = 0.0);

    // largest word length carrying a nonzero coefficient, -1 for the zero series
    int degree(double tol = 0.0) const;
    double max_coeff_norm() const;
    FreeSeries truncated(int N) const;
    FreeSeries scaled(cplx c) const;
    FreeSeries left_mul(const Mat& m) const;
    FreeSeries right_mul(const Mat& m) const;
    // the (i,j) entry of every coefficient as a scalar series
    FreeSeries entry(Eigen::Index i, Eigen::Index j) const;

    FreeSeries operator+(const FreeSeries& o) const;
    FreeSeries operator-(const FreeSeries& o) const;

private:
    void check_compatible(const FreeSeries& o) const;

    int g_ = 0;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    int N_ = 0;
    std::map<Word, Mat> coeffs_;
};

FreeSeries series_mul(const FreeSeries& f, const FreeSeries& h);
// Inverse of a series with invertible constant term, truncated at f's degree.
FreeSeries series_inverse(const FreeSeries& f);
// (I - Lambda)^{-1} for a homogeneous linear square series.
FreeSeries geometric_inverse(const FreeSeries& lambda, int N);
// f(h_1, ..., h_g) where each h_j is a 1x1 series; exact for polynomial f.
FreeSeries substitute(const FreeSeries& f, const std::vector<FreeSeries>& h, int N);
// Max coefficient difference, missing words counted as zero.
double coeff_distance(const FreeSeries& a, const FreeSeries& b);

// Caches X^w along prefixes; evaluation cost is one product per word.
class WordPowers {
public:
    explicit WordPowers(const MatrixTuple& X) : X_(X) {}
    const Mat& get(const Word& w);

private:
    const MatrixTuple& X_;
    std::map<Word, Mat> cache_;
};

Mat eval_series(const FreeSeries& f, const MatrixTuple& X);
Mat eval_series(const FreeSeries& f, WordPowers& powers, Eigen::Index n);

// max over |alpha| = N of ||X^alpha||^{1/N}
double joint_spectral_radius(const MatrixTuple& X, int N);
// (sum_{|alpha|=N} ||f_alpha||)^{-1/N}; infinity when the layer vanishes
double formal_radius_estimate(const FreeSeries& f, int N);

MatrixTuple fock_shift_tuple(int g, int N);

// Coefficients of v* w for pairs (v, w).
class HereditaryPoly {
public:
    using Key = std::pair<Word, Word>;

    HereditaryPoly() = default;
    HereditaryPoly(int g, Eigen::Index rows, Eigen::Index cols);

    static HereditaryPoly from_analytic(const FreeSeries& f);

    int g() const { return g_; }
    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    const std::map<Key, Mat>& terms() const { return coeffs_; }

    Mat coeff(const Word& v, const Word& w) const;
    void set(const Word& v, const Word& w, const Mat& m);
    void add_to(const Word& v, const Word& w, const Mat& m);
    int degree() const;
    bool is_symmetric(double tol) const;
    Mat eval(const MatrixTuple& X) const;

private:
    int g_ = 0;
    Eigen::Index rows_ = 0;
    Eigen::Index cols_ = 0;
    std::map<Key, Mat> coeffs_;
};

// Sum over terms of a_v* b_w placed at (v, w).
HereditaryPoly hermitian_product(const FreeSeries& a, const FreeSeries& b);

}  // namespace freespectra
