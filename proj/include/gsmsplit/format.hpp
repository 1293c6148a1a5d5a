#pragma once

// Locale-independent, round-trip numeric formatting for the CLI outputs.
// CSV always uses '.' decimals; multiprecision values are printed with
// their full working precision so they survive serialization.

#include <boost/multiprecision/mpfr.hpp>

#include <charconv>
#include <cstdio>
#include <string>

namespace gsmsplit {

inline std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, p);
}

inline std::string fmt(long double v) {
    // 21 significant digits round-trips the 64-bit extended format
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.21Lg", v);
    return buf;
}

inline std::string fmt(const boost::multiprecision::mpfr_float& v) {
    return v.str(static_cast<std::streamsize>(v.precision()), std::ios_base::scientific);
}

template <class C>
std::string fmt_complex(const C& z) {
    return fmt(z.real()) + (z.imag() < 0 ? "" : "+") + fmt(z.imag()) + "i";
}

} // namespace gsmsplit
