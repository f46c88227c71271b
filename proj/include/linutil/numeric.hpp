#pragma once

// Scalar backends shared by every module: 64-bit floating point for general
// use and exact rationals for verification sweeps. All comparisons that can
// be affected by rounding go through the helpers below so that both backends
// agree on the meaning of "equal" and "strictly greater".

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <concepts>
#include <cstdint>
#include <string>
#include <string_view>
#include <type_traits>

namespace linutil {

using Rational = boost::multiprecision::cpp_rational;

/// Absolute-plus-relative band used for value comparisons in float mode.
inline constexpr double kValueEpsilon = 1e-9;
/// Tolerance on |sum(p) - 1| when validating probability vectors in float mode.
inline constexpr double kSumEpsilon = 1e-9;

template <class T>
concept Scalar = std::same_as<T, double> || std::same_as<T, Rational>;

template <Scalar T>
inline constexpr bool is_exact_v = std::same_as<T, Rational>;

template <Scalar T>
T abs_value(const T& v) {
    if constexpr (is_exact_v<T>) {
        return boost::multiprecision::abs(v);
    } else {
        return std::fabs(v);
    }
}

template <Scalar T>
bool is_finite(const T& v) {
    if constexpr (is_exact_v<T>) {
        (void)v;
        return true;
    } else {
        return std::isfinite(v);
    }
}

template <Scalar T>
double to_double(const T& v) {
    if constexpr (is_exact_v<T>) {
        return v.template convert_to<double>();
    } else {
        return v;
    }
}

/// Builds num/den in the target backend (den != 0).
template <Scalar T>
T ratio(std::int64_t num, std::int64_t den) {
    return T(num) / T(den);
}

/// Comparison band for values of magnitude `scale`; zero for exact arithmetic.
template <Scalar T>
T value_tolerance(const T& scale) {
    if constexpr (is_exact_v<T>) {
        (void)scale;
        return T(0);
    } else {
        return kValueEpsilon * (1.0 + std::fabs(scale));
    }
}

/// Three-way comparison with the epsilon band applied in float mode:
/// -1 if a is definitely below b, +1 if definitely above, 0 otherwise.
template <Scalar T>
int compare_values(const T& a, const T& b) {
    if constexpr (is_exact_v<T>) {
        return a < b ? -1 : (b < a ? 1 : 0);
    } else {
        const double tol = value_tolerance(std::fmax(std::fabs(a), std::fabs(b)));
        if (a > b + tol) return 1;
        if (a < b - tol) return -1;
        return 0;
    }
}

template <Scalar T>
bool definitely_greater(const T& a, const T& b) {
    return compare_values(a, b) > 0;
}

template <Scalar T>
bool definitely_less(const T& a, const T& b) {
    return compare_values(a, b) < 0;
}

template <Scalar T>
bool approx_equal(const T& a, const T& b) {
    return compare_values(a, b) == 0;
}

/// Sign of `value` where |value| inside the band around `scale` counts as zero.
template <Scalar T>
int banded_sign(const T& value, const T& scale) {
    const T tol = value_tolerance(scale);
    if (value > tol) return 1;
    if (value < -tol) return -1;
    return 0;
}

/// Parses "a/b", an integer, or a decimal literal ("0.125", "-3e-2") exactly.
/// Throws ValidationError on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// Exact rational equal to the shortest round-trip decimal form of `value`
/// (so 0.1 becomes 1/10, not the binary expansion).
Rational rational_from_double(double value);

/// "a/b", or "a" when the denominator is 1.
std::string to_rational_string(const Rational& value);

/// Shortest round-trip decimal text of a double.
std::string to_decimal_string(double value);

template <Scalar T>
T from_rational(const Rational& r) {
    if constexpr (is_exact_v<T>) {
        return r;
    } else {
        return r.convert_to<double>();
    }
}

}  // namespace linutil
