#pragma once

// Exact numeric literals. Config files carry coefficients as strings
// ("-1", "1/12", "2.5e-3", "0,-1/2" for complex); they are parsed into
// exact rationals once and materialized at whatever working precision a
// run asks for, so the same config serves double and multiprecision runs.

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <complex>
#include <stdexcept>
#include <string>

namespace gsmsplit {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational pow_rational(const Rational& base, long e) {
    Rational out(1);
    Rational b = base;
    long n = e >= 0 ? e : -e;
    while (n) {
        if (n & 1) out *= b;
        b *= b;
        n >>= 1;
    }
    if (e < 0) {
        if (out == 0) throw std::domain_error("pow_rational: zero to negative power");
        out = Rational(1) / out;
    }
    return out;
}

namespace detail {

inline Rational parse_decimal_token(const std::string& t) {
    // [+-]? digits [. digits] [eE [+-] digits]
    std::size_t i = 0;
    bool neg = false;
    if (i < t.size() && (t[i] == '+' || t[i] == '-')) neg = (t[i++] == '-');
    BigInt mant = 0;
    long scale = 0;
    bool any_digit = false, seen_dot = false;
    for (; i < t.size(); ++i) {
        char c = t[i];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            mant = mant * 10 + (c - '0');
            if (seen_dot) ++scale;
            any_digit = true;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!any_digit) throw std::invalid_argument("bad numeric literal: '" + t + "'");
    long expo = 0;
    if (i < t.size() && (t[i] == 'e' || t[i] == 'E')) {
        ++i;
        bool eneg = false;
        if (i < t.size() && (t[i] == '+' || t[i] == '-')) eneg = (t[i++] == '-');
        if (i >= t.size()) throw std::invalid_argument("bad exponent in '" + t + "'");
        for (; i < t.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(t[i])))
                throw std::invalid_argument("bad exponent in '" + t + "'");
            expo = expo * 10 + (t[i] - '0');
        }
        if (eneg) expo = -expo;
    }
    if (i != t.size()) throw std::invalid_argument("trailing junk in '" + t + "'");
    Rational out(mant);
    out *= pow_rational(Rational(10), expo - scale);
    return neg ? -out : out;
}

} // namespace detail

// "123", "-4/9", "2.5", "1.25e-3" -> exact rational
inline Rational parse_rational(const std::string& s) {
    std::string t;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
    if (t.empty()) throw std::invalid_argument("empty numeric literal");
    auto slash = t.find('/');
    if (slash != std::string::npos) {
        Rational num = detail::parse_decimal_token(t.substr(0, slash));
        Rational den = detail::parse_decimal_token(t.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + s + "'");
        return num / den;
    }
    return detail::parse_decimal_token(t);
}

// Exact complex literal: "re" or "re,im", each component rational/decimal.
struct ValueLit {
    Rational re{0};
    Rational im{0};

    bool is_real() const { return im == 0; }
    bool is_zero() const { return re == 0 && im == 0; }
};

inline ValueLit parse_value(const std::string& s) {
    auto comma = s.find(',');
    ValueLit v;
    if (comma == std::string::npos) {
        v.re = parse_rational(s);
    } else {
        v.re = parse_rational(s.substr(0, comma));
        v.im = parse_rational(s.substr(comma + 1));
    }
    return v;
}

// Materialize an exact rational at the target precision.
template <class Real>
Real to_real(const Rational& q) {
    return Real(numerator(q)) / Real(denominator(q));
}

template <class Complex>
Complex to_complex(const ValueLit& v) {
    using R = std::remove_cvref_t<decltype(std::declval<Complex>().real())>;
    return Complex(to_real<R>(v.re), to_real<R>(v.im));
}

inline std::string rational_to_string(const Rational& q) {
    std::string s = numerator(q).str();
    if (denominator(q) != 1) s += "/" + denominator(q).str();
    return s;
}

} // namespace gsmsplit
