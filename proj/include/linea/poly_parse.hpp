#pragma once

#include <cctype>
#include <cmath>
#include <complex>
#include <string>
#include <string_view>
#include <vector>

#include "linea/errors.hpp"
#include "linea/polynomial.hpp"

namespace linea {

namespace detail {

/// Recursive-descent parser for the input grammar: a sum of terms c, c*z^k or
/// z^k, where c is a real/imaginary literal (1.5, 2i, i) or a parenthesized
/// complex literal ((1+2i)). Errors carry the offending position.
class PolyParser {
public:
    explicit PolyParser(std::string_view src) : src_(src) {}

    std::vector<cplx> parse() {
        std::vector<cplx> coeffs(1, cplx(0.0));
        skip_ws();
        if (eof()) throw ParseError("empty polynomial", pos_);
        bool first = true;
        while (true) {
            skip_ws();
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') {
                if (peek() == '-') sign = -1.0;
                ++pos_;
            } else if (!first) {
                throw ParseError("expected '+' or '-' between terms", pos_);
            }
            auto [coef, power] = parse_term();
            if (static_cast<std::size_t>(power) + 1 > coeffs.size())
                coeffs.resize(static_cast<std::size_t>(power) + 1, cplx(0.0));
            coeffs[static_cast<std::size_t>(power)] += sign * coef;
            first = false;
            skip_ws();
            if (eof()) break;
            if (peek() != '+' && peek() != '-')
                throw ParseError("unexpected character", pos_);
        }
        return coeffs;
    }

private:
    bool eof() const { return pos_ >= src_.size(); }
    char peek() const { return eof() ? '\0' : src_[pos_]; }
    void skip_ws() {
        while (!eof() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    std::pair<cplx, int> parse_term() {
        skip_ws();
        cplx coef(1.0);
        bool have_coef = false;
        if (peek() == '(') {
            coef = parse_paren_complex();
            have_coef = true;
        } else if (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '.' ||
                   peek() == 'i' || peek() == 'I') {
            coef = parse_atom();
            have_coef = true;
        }
        skip_ws();
        if (have_coef && peek() == '*') {
            ++pos_;
            skip_ws();
        }
        int power = 0;
        if (peek() == 'z' || peek() == 'Z') {
            ++pos_;
            power = 1;
            skip_ws();
            if (peek() == '^') {
                ++pos_;
                skip_ws();
                power = parse_uint();
            }
        } else if (!have_coef) {
            throw ParseError("expected a coefficient or 'z'", pos_);
        }
        return {coef, power};
    }

    /// number ['i'] or bare 'i' (no leading sign).
    cplx parse_atom() {
        if (peek() == 'i' || peek() == 'I') {
            ++pos_;
            return cplx(0.0, 1.0);
        }
        double x = parse_number();
        if (peek() == 'i' || peek() == 'I') {
            ++pos_;
            return cplx(0.0, x);
        }
        return cplx(x, 0.0);
    }

    /// '(' [+-] atom (('+'|'-') atom)* ')'
    cplx parse_paren_complex() {
        ++pos_;  // '('
        cplx total(0.0);
        bool first = true;
        while (true) {
            skip_ws();
            double sign = 1.0;
            if (peek() == '+' || peek() == '-') {
                if (peek() == '-') sign = -1.0;
                ++pos_;
                skip_ws();
            } else if (!first) {
                break;
            }
            total += sign * parse_atom();
            first = false;
            skip_ws();
            if (peek() == ')') break;
        }
        skip_ws();
        if (peek() != ')') throw ParseError("expected ')'", pos_);
        ++pos_;
        return total;
    }

    double parse_number() {
        std::size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (!eof() && src_[pos_] == '.') {
            ++pos_;
            while (!eof() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && src_[start] == '.'))
            throw ParseError("expected a number", start);
        if (!eof() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (!eof() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (eof() || !std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                pos_ = mark;  // the 'e' was not an exponent
            } else {
                while (!eof() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            }
        }
        return std::stod(std::string(src_.substr(start, pos_ - start)));
    }

    int parse_uint() {
        std::size_t start = pos_;
        while (!eof() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ == start) throw ParseError("expected an exponent", start);
        return std::stoi(std::string(src_.substr(start, pos_ - start)));
    }

    std::string_view src_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Parse "c*z^k + ..." into a Polynomial. Examples: "z^2", "1.5*z+z^2",
/// "z^2-2", "(1+2i)*z^2 - 0.5i".
inline Polynomial parse_polynomial(std::string_view text) {
    detail::PolyParser parser(text);
    Polynomial p(parser.parse());
    if (p.degree() == 0 && p.coeffs[0] == cplx(0.0) && text.find_first_not_of(" \t") ==
                                                           std::string_view::npos)
        throw ParseError("empty polynomial", 0);
    return p;
}

/// Parse a complex scalar: "3", "-0.5", "2i", "1+2i", "(1+2i)".
inline cplx parse_complex(std::string_view text) {
    detail::PolyParser parser(text);
    std::vector<cplx> coeffs = parser.parse();
    for (std::size_t k = 1; k < coeffs.size(); ++k)
        if (coeffs[k] != cplx(0.0)) throw ParseError("expected a scalar, found 'z'", 0);
    return coeffs[0];
}

} // namespace linea
