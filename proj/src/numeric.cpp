#include "linutil/numeric.hpp"

#include "linutil/error.hpp"

#include <cctype>
#include <charconv>
#include <system_error>

namespace linutil {

namespace {

using boost::multiprecision::cpp_int;

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

cpp_int pow10(long exponent) {
    cpp_int result = 1;
    for (long i = 0; i < exponent; ++i) result *= 10;
    return result;
}

// Integer or decimal literal with optional exponent, e.g. "-12", "0.125", "3e-2".
Rational parse_decimal(std::string_view text, std::string_view original) {
    auto bad = [&]() -> Rational {
        detail::fail_validation("malformed number '" + std::string(original) + "'");
    };
    if (text.empty()) return bad();

    bool negative = false;
    std::size_t pos = 0;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    cpp_int digits = 0;
    long scale = 0;
    bool any_digit = false;
    bool seen_point = false;
    for (; pos < text.size(); ++pos) {
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits = digits * 10 + (c - '0');
            any_digit = true;
            if (seen_point) ++scale;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!any_digit) return bad();

    long exponent = 0;
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') return bad();
        ++pos;
        std::string_view rest = text.substr(pos);
        if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
        if (rest.empty()) return bad();
        const auto [end, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), exponent);
        if (ec != std::errc{} || end != rest.data() + rest.size()) return bad();
        if (exponent > 4000 || exponent < -4000) return bad();
    }

    const long shift = exponent - scale;
    Rational value = shift >= 0 ? Rational(digits * pow10(shift)) : Rational(digits, pow10(-shift));
    return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    const std::string_view original = text;
    text = trim(text);
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return parse_decimal(text, original);

    const Rational num = parse_decimal(trim(text.substr(0, slash)), original);
    const Rational den = parse_decimal(trim(text.substr(slash + 1)), original);
    if (den == 0) detail::fail_validation("zero denominator in '" + std::string(original) + "'");
    return num / den;
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) detail::fail_validation("non-finite number");
    return parse_rational(to_decimal_string(value));
}

std::string to_rational_string(const Rational& value) {
    const cpp_int num = boost::multiprecision::numerator(value);
    const cpp_int den = boost::multiprecision::denominator(value);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

std::string to_decimal_string(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    if (ec != std::errc{}) detail::fail_internal("to_chars failed");
    return std::string(buffer, end);
}

}  // namespace linutil
