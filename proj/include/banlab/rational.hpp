#pragma once

// Scalar layer. Two lanes run through the whole library: `double` for search
// and estimation, `rational` for results that must be exact. Rational values
// convert outward to double at API boundaries, never inward.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

namespace banlab {

using rational = boost::multiprecision::cpp_rational;
using bigint   = boost::multiprecision::cpp_int;

// Thrown when an exact-lane computation has no exact oracle for the request.
struct exactness_error : std::runtime_error {
    explicit exactness_error(const std::string& what) : std::runtime_error(what) {}
};

template <class S>
inline constexpr bool is_exact_scalar = std::is_same_v<S, rational>;

inline double to_double(double x) { return x; }
inline double to_double(const rational& x) { return static_cast<double>(x); }

inline double abs_val(double x) { return std::fabs(x); }
inline rational abs_val(const rational& x) { return x < 0 ? rational(-x) : x; }

// |x|^k for integer k >= 0. Stays in the scalar lane.
template <class S>
S pow_abs(const S& x, long k) {
    if (k < 0) throw std::invalid_argument("pow_abs: negative exponent");
    S ax = abs_val(x);
    S r(1);
    while (k-- > 0) r *= ax;
    return r;
}

inline bool is_integer(double p) {
    return std::isfinite(p) && p == std::floor(p) && std::fabs(p) < 1e9;
}

namespace detail {

// bigint's own string constructor treats leading zeros as octal and "0x" as
// hex; integer literals here are always decimal, so parse them by hand.
inline bigint decimal_bigint(std::string_view s) {
    bool neg = false;
    std::size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) neg = (s[i] == '-'), ++i;
    if (i == s.size()) throw std::invalid_argument("bad integer literal: " + std::string(s));
    bigint v(0);
    for (; i < s.size(); ++i) {
        if (s[i] < '0' || s[i] > '9')
            throw std::invalid_argument("bad integer literal: " + std::string(s));
        v = v * 10 + (s[i] - '0');
    }
    return neg ? bigint(-v) : v;
}

} // namespace detail

// Accepts "3", "-3/4", "0.25", "2.5e-3". Decimal forms are converted exactly.
inline rational rational_from_string(std::string_view sv) {
    auto fail = [&] { throw std::invalid_argument("bad rational literal: " + std::string(sv)); };
    std::string s(sv);
    if (s.empty()) fail();
    if (s.find('/') != std::string::npos) {
        auto pos = s.find('/');
        bigint num = detail::decimal_bigint(s.substr(0, pos));
        bigint den = detail::decimal_bigint(s.substr(pos + 1));
        if (den == 0) fail();
        return rational(num, den);
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') neg = (s[i] == '-'), ++i;
    std::string digits;
    long scale10 = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (seen_dot) fail();
            seen_dot = true;
        } else if (c == 'e' || c == 'E') {
            scale10 += std::stol(s.substr(i + 1));
            break;
        } else if (c >= '0' && c <= '9') {
            digits += c;
            seen_digit = true;
            if (seen_dot) --scale10;
        } else {
            fail();
        }
    }
    if (!seen_digit) fail();
    rational r{detail::decimal_bigint(digits)};
    bigint ten(10);
    for (long k = 0; k < scale10; ++k) r *= ten;
    for (long k = 0; k > scale10; --k) r /= ten;
    return neg ? rational(-r) : r;
}

inline std::string to_string_exact(const rational& x) {
    if (denominator(x) == 1) return numerator(x).str();
    return numerator(x).str() + "/" + denominator(x).str();
}

} // namespace banlab
