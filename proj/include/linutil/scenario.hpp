#pragma once

// Scenario documents: UTF-8 JSON with a top-level "kind" discriminator, an
// optional free-form "label", and kind-specific fields. Numbers are JSON
// decimals or exact rational strings "a/b"; any rational string routes the
// whole document to the exact backend.

#include "linutil/numeric.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace linutil::cli {

/// A scalar as written in the document: a JSON decimal or an exact rational.
class Number {
public:
    Number() = default;
    Number(double v) : value_(v) {}  // NOLINT(google-explicit-constructor)
    Number(Rational v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

    bool is_rational() const { return std::holds_alternative<Rational>(value_); }

    /// Value in the requested backend. Decimals convert to rationals through
    /// their shortest decimal text, so 0.1 becomes exactly 1/10.
    template <Scalar T>
    T as() const {
        if constexpr (is_exact_v<T>) {
            return is_rational() ? std::get<Rational>(value_) : rational_from_double(std::get<double>(value_));
        } else {
            return is_rational() ? to_double(std::get<Rational>(value_)) : std::get<double>(value_);
        }
    }

    const std::variant<double, Rational>& raw() const { return value_; }

    friend bool operator==(const Number&, const Number&) = default;

private:
    std::variant<double, Rational> value_{0.0};
};

using NumberList = std::vector<Number>;

template <Scalar T>
std::vector<T> to_scalars(const NumberList& list) {
    std::vector<T> out;
    out.reserve(list.size());
    for (const Number& n : list) out.push_back(n.template as<T>());
    return out;
}

struct PoraFields {
    NumberList returns;
    NumberList probs;
    friend bool operator==(const PoraFields&, const PoraFields&) = default;
};

struct ProfiledPora {
    NumberList profile;
    PoraFields pora;
    friend bool operator==(const ProfiledPora&, const ProfiledPora&) = default;
};

struct PoraEvalPayload {
    ProfiledPora subject;
    /// Second (profile, PORA) for the "more risk averse than" comparison.
    std::optional<ProfiledPora> compare;
    friend bool operator==(const PoraEvalPayload&, const PoraEvalPayload&) = default;
};

struct DominancePayload {
    PoraFields a;
    PoraFields b;
    friend bool operator==(const DominancePayload&, const DominancePayload&) = default;
};

struct SpreadPayload {
    NumberList returns;
    NumberList p;
    NumberList q;
    std::optional<NumberList> profile;
    /// When set and q spreads p, sample this many increasing-concave profiles.
    std::optional<std::int64_t> samples;
    friend bool operator==(const SpreadPayload&, const SpreadPayload&) = default;
};

struct DiversificationFields {
    Number amount;
    Number u1;
    Number u2;
    Number u3;
    friend bool operator==(const DiversificationFields&, const DiversificationFields&) = default;
};

struct InsurancePayload {
    Number wealth;
    Number loss;
    Number loss_prob;
    Number u1;
    Number u2;
    std::optional<Number> u3;
    std::optional<Number> invest_return;
    std::optional<DiversificationFields> diversification;
    friend bool operator==(const InsurancePayload&, const InsurancePayload&) = default;
};

struct AlmostLinearPayload {
    Number wealth;
    NumberList loss_breakpoints;
    NumberList loss_slopes;
    NumberList gain_breakpoints;
    NumberList gain_slopes;
    std::vector<std::string> loss_sides;
    std::vector<std::string> gain_sides;
    std::optional<NumberList> evaluate_at;
    friend bool operator==(const AlmostLinearPayload&, const AlmostLinearPayload&) = default;
};

struct AmbiguityPayload {
    std::vector<NumberList> candidates;
    NumberList probs;
    /// Per SON: [loss slope, gain slope].
    std::vector<NumberList> profile;
    friend bool operator==(const AmbiguityPayload&, const AmbiguityPayload&) = default;
};

struct VerifyPayload {
    NumberList returns;
    std::int64_t denominator = 6;
    std::int64_t samples = 200;
    std::int64_t budget = 1000;
    friend bool operator==(const VerifyPayload&, const VerifyPayload&) = default;
};

using Payload = std::variant<PoraEvalPayload, DominancePayload, SpreadPayload, InsurancePayload,
                             AlmostLinearPayload, AmbiguityPayload, VerifyPayload>;

enum class Kind { PoraEval, Dominance, Spread, Insurance, AlmostLinear, Ambiguity, Verify };

std::string_view to_string(Kind kind);
/// Subcommand name that runs documents of this kind ("eval", "insure", ...).
std::string_view command_for(Kind kind);

struct ScenarioDocument {
    std::string label;
    Payload payload;

    Kind kind() const { return static_cast<Kind>(payload.index()); }
    /// True when any number was written as a rational string.
    bool uses_rationals() const;

    friend bool operator==(const ScenarioDocument&, const ScenarioDocument&) = default;
};

/// Parses and validates a document. Malformed JSON and schema violations throw
/// ValidationError whose message names the first offending field.
ScenarioDocument parse_scenario(std::string_view text);
ScenarioDocument parse_scenario(std::istream& in);

/// Canonical JSON text; parse_scenario(serialize_scenario(d)) == d.
std::string serialize_scenario(const ScenarioDocument& doc);

}  // namespace linutil::cli
