#include "freespectra/expr.hpp"

#include <cctype>

namespace freespectra {

namespace {

class Parser {
public:
    Parser(const std::string& s, int g, int N, const Params& params) : s_(s), g_(g), N_(N), params_(params) {}

    FreeSeries run() {
        FreeSeries r = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw InvalidInput("expression '" + s_ + "' at " + std::to_string(pos_) + ": " + what);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip();
        return pos_ < s_.size() && s_[pos_] == c;
    }
    bool starts_atom() {
        skip();
        if (pos_ >= s_.size()) return false;
        char c = s_[pos_];
        return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '.';
    }
    FreeSeries scalar(cplx c) const {
        Mat m(1, 1);
        m(0, 0) = c;
        return FreeSeries::constant(g_, m, N_);
    }

    FreeSeries expr() {
        FreeSeries r = scalar(0.0);
        bool first = true;
        while (true) {
            double sign = 1.0;
            if (peek('+') || peek('-')) {
                sign = s_[pos_] == '-' ? -1.0 : 1.0;
                ++pos_;
            } else if (!first) {
                break;
            }
            r = r + term().scaled(sign);
            first = false;
        }
        return r;
    }

    FreeSeries term() {
        FreeSeries r = power();
        while (true) {
            if (peek('*')) {
                ++pos_;
                r = series_mul(r, power());
            } else if (peek('/')) {
                // division only by constants
                ++pos_;
                const FreeSeries d = power();
                for (const auto& [w, c] : d.terms())
                    if (w.size() > 0 && c.norm() > 0) fail("division by a non-constant");
                cplx c = d.coeff(Word())(0, 0);
                if (c == cplx(0.0)) fail("division by zero");
                r = r.scaled(1.0 / c);
            } else if (starts_atom()) {
                r = series_mul(r, power());
            } else {
                break;
            }
        }
        return r;
    }

    FreeSeries power() {
        FreeSeries base = atom();
        if (peek('^')) {
            ++pos_;
            skip();
            size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) fail("exponent must be a nonnegative integer");
            int e = std::stoi(s_.substr(start, pos_ - start));
            FreeSeries r = scalar(1.0);
            for (int k = 0; k < e; ++k) r = series_mul(r, base);
            return r;
        }
        return base;
    }

    FreeSeries atom() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            FreeSeries r = expr();
            if (!peek(')')) fail("missing ')'");
            ++pos_;
            return r;
        }
        if (c == '-') {
            ++pos_;
            return atom().scaled(-1.0);
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t used = 0;
            double v = std::stod(s_.substr(pos_), &used);
            pos_ += used;
            return scalar(v);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
            std::string id = s_.substr(start, pos_ - start);
            if (id == "inv") {
                if (!peek('(')) fail("inv needs a parenthesised argument");
                ++pos_;
                FreeSeries arg = expr();
                if (!peek(')')) fail("missing ')'");
                ++pos_;
                return series_inverse(arg);
            }
            if (id == "i") return scalar(cplx(0.0, 1.0));
            if ((id[0] == 'x' || id[0] == 'y') && id.size() > 1 &&
                id.find_first_not_of("0123456789", 1) == std::string::npos) {
                int j = std::stoi(id.substr(1));
                if (j < 1 || j > g_) fail("variable " + id + " outside 1..g");
                return FreeSeries::variable(g_, j - 1, N_);
            }
            auto it = params_.find(id);
            if (it == params_.end()) fail("unknown identifier '" + id + "'");
            return scalar(it->second);
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    int g_;
    int N_;
    const Params& params_;
    size_t pos_ = 0;
};

}  // namespace

FreeSeries parse_series(const std::string& text, int g, int N, const Params& params) {
    return Parser(text, g, N, params).run();
}

cplx parse_scalar(const std::string& text, const Params& params) {
    FreeSeries f = parse_series(text, 1, 1, params);
    if (f.degree() > 0) throw InvalidInput("expression '" + text + "' is not a scalar");
    return f.coeff(Word())(0, 0);
}

FreeSeries parse_map(const std::vector<std::string>& coords, int g, int N, const Params& params) {
    if (static_cast<int>(coords.size()) != g) throw InvalidInput("map needs one expression per variable");
    FreeSeries row(g, 1, g, N);
    for (int i = 0; i < g; ++i) {
        const FreeSeries f = parse_series(coords[static_cast<size_t>(i)], g, N, params);
        for (const auto& [w, c] : f.terms()) {
            Mat e = Mat::Zero(1, g);
            e(0, i) = c(0, 0);
            row.add_to(w, e);
        }
    }
    return row;
}

}  // namespace freespectra
