#pragma once

// Expected utility with state-dependent linear utility functions over a
// finite set of states of nature (SONs). A PORA (portfolio of risky assets)
// pairs a return per SON with a strictly positive probability per SON; a
// linear utility profile assigns each SON a constant positive marginal
// utility of money.

#include "linutil/error.hpp"
#include "linutil/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace linutil {

template <Scalar T>
class ProbabilityVector {
public:
    /// Requires at least two entries, all strictly positive, summing to 1
    /// (exactly for rationals, within kSumEpsilon for doubles).
    explicit ProbabilityVector(std::vector<T> entries) : entries_(std::move(entries)) {
        if (entries_.size() < 2) detail::fail_validation("probs must have at least 2 entries");
        T sum(0);
        for (std::size_t j = 0; j < entries_.size(); ++j) {
            if (!is_finite(entries_[j])) detail::fail_validation("probs must be finite");
            if (!(entries_[j] > T(0))) {
                detail::fail_validation("probs must be strictly positive (entry " + std::to_string(j + 1) +
                                        " is " + to_decimal_string(to_double(entries_[j])) + ")");
            }
            sum += entries_[j];
        }
        bool normalized;
        if constexpr (is_exact_v<T>) {
            normalized = sum == T(1);
        } else {
            normalized = std::fabs(sum - 1.0) <= kSumEpsilon;
        }
        if (!normalized) {
            detail::fail_validation("probs must sum to 1 (sum is " + to_decimal_string(to_double(sum)) + ")");
        }
    }

    std::size_t size() const { return entries_.size(); }
    const T& operator[](std::size_t j) const { return entries_[j]; }
    std::span<const T> entries() const { return entries_; }

    friend bool operator==(const ProbabilityVector&, const ProbabilityVector&) = default;

private:
    std::vector<T> entries_;
};

template <Scalar T>
class ReturnVector {
public:
    explicit ReturnVector(std::vector<T> entries) : entries_(std::move(entries)) {
        if (entries_.size() < 2) detail::fail_validation("returns must have at least 2 entries");
        for (const T& v : entries_) {
            if (!is_finite(v)) detail::fail_validation("returns must be finite");
        }
    }

    std::size_t size() const { return entries_.size(); }
    const T& operator[](std::size_t j) const { return entries_[j]; }
    std::span<const T> entries() const { return entries_; }

    bool strictly_increasing() const {
        return std::adjacent_find(entries_.begin(), entries_.end(),
                                  [](const T& a, const T& b) { return !(a < b); }) == entries_.end();
    }

    friend bool operator==(const ReturnVector&, const ReturnVector&) = default;

private:
    std::vector<T> entries_;
};

template <Scalar T>
class Pora {
public:
    Pora(ReturnVector<T> returns, ProbabilityVector<T> probs)
        : returns_(std::move(returns)), probs_(std::move(probs)) {
        if (returns_.size() != probs_.size()) {
            detail::fail_validation("returns and probs differ in length (" + std::to_string(returns_.size()) +
                                    " vs " + std::to_string(probs_.size()) + ")");
        }
    }

    Pora(std::vector<T> returns, std::vector<T> probs)
        : Pora(ReturnVector<T>(std::move(returns)), ProbabilityVector<T>(std::move(probs))) {}

    std::size_t size() const { return returns_.size(); }
    const ReturnVector<T>& returns() const { return returns_; }
    const ProbabilityVector<T>& probs() const { return probs_; }

    friend bool operator==(const Pora&, const Pora&) = default;

private:
    ReturnVector<T> returns_;
    ProbabilityVector<T> probs_;
};

template <Scalar T>
class LinearUtilityProfile {
public:
    explicit LinearUtilityProfile(std::vector<T> slopes) : slopes_(std::move(slopes)) {
        if (slopes_.empty()) detail::fail_validation("profile must not be empty");
        for (std::size_t j = 0; j < slopes_.size(); ++j) {
            if (!is_finite(slopes_[j]) || !(slopes_[j] > T(0))) {
                detail::fail_validation("profile slopes must be strictly positive (entry " + std::to_string(j + 1) +
                                        ")");
            }
        }
    }

    std::size_t size() const { return slopes_.size(); }
    const T& operator[](std::size_t j) const { return slopes_[j]; }
    std::span<const T> slopes() const { return slopes_; }

    friend bool operator==(const LinearUtilityProfile&, const LinearUtilityProfile&) = default;

private:
    std::vector<T> slopes_;
};

enum class RiskAttitude { Averse, Neutral, Loving };

inline std::string_view to_string(RiskAttitude a) {
    switch (a) {
        case RiskAttitude::Averse: return "averse";
        case RiskAttitude::Neutral: return "neutral";
        case RiskAttitude::Loving: return "loving";
    }
    return "?";
}

enum class Relation { Greater, GreaterEqual, Less, LessEqual, Equal };

namespace detail {

template <Scalar T>
void require_same_length(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    if (u.size() != pora.size()) {
        fail_validation("profile and PORA differ in length (" + std::to_string(u.size()) + " vs " +
                        std::to_string(pora.size()) + ")");
    }
}

}  // namespace detail

/// E(x, p) = sum_j p_j x_j.
template <Scalar T>
T expected_value(const Pora<T>& pora) {
    T total(0);
    for (std::size_t j = 0; j < pora.size(); ++j) total += pora.probs()[j] * pora.returns()[j];
    return total;
}

/// Probability that the realized return stands in `relation` to `threshold`.
/// The '<=' and '<' forms are complements of '>' and '>=', so
/// P{X <= a} + P{X > a} == 1 holds exactly in both backends.
template <Scalar T>
T tail_probability(const Pora<T>& pora, const T& threshold, Relation relation) {
    auto sum_where = [&](auto&& pred) {
        T total(0);
        for (std::size_t j = 0; j < pora.size(); ++j) {
            if (pred(pora.returns()[j])) total += pora.probs()[j];
        }
        return total;
    };
    switch (relation) {
        case Relation::Greater: return sum_where([&](const T& x) { return x > threshold; });
        case Relation::GreaterEqual: return sum_where([&](const T& x) { return x >= threshold; });
        case Relation::LessEqual: return T(1) - tail_probability(pora, threshold, Relation::Greater);
        case Relation::Less: return T(1) - tail_probability(pora, threshold, Relation::GreaterEqual);
        case Relation::Equal: return sum_where([&](const T& x) { return x == threshold; });
    }
    return T(0);
}

/// Eu(x, p) = sum_j p_j u_j x_j.
template <Scalar T>
T expected_utility(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    detail::require_same_length(u, pora);
    T total(0);
    for (std::size_t j = 0; j < pora.size(); ++j) total += pora.probs()[j] * u[j] * pora.returns()[j];
    return total;
}

/// Same quantity through cumulative probabilities:
/// sum_{j<L} C_j (u_j x_j - u_{j+1} x_{j+1}) + C_L u_L x_L, with C_j = p_1 + ... + p_j.
template <Scalar T>
T expected_utility_telescoped(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    detail::require_same_length(u, pora);
    const std::size_t n = pora.size();
    T cumulative(0);
    T total(0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
        cumulative += pora.probs()[j];
        total += cumulative * (u[j] * pora.returns()[j] - u[j + 1] * pora.returns()[j + 1]);
    }
    cumulative += pora.probs()[n - 1];
    total += cumulative * u[n - 1] * pora.returns()[n - 1];
    return total;
}

/// p^T u, the utility weight of one unit of money received in every SON.
template <Scalar T>
T expected_slope(const LinearUtilityProfile<T>& u, const ProbabilityVector<T>& p) {
    if (u.size() != p.size()) detail::fail_validation("profile and probs differ in length");
    T total(0);
    for (std::size_t j = 0; j < p.size(); ++j) total += p[j] * u[j];
    return total;
}

/// The sure amount c with (p^T u) c = Eu(x, p).
template <Scalar T>
T certainty_equivalent(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    return expected_utility(u, pora) / expected_slope(u, pora.probs());
}

/// R(u, x, p) = E(x, p) - CE(u, x, p).
template <Scalar T>
T risk_premium(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    return expected_value(pora) - certainty_equivalent(u, pora);
}

/// Band used to decide whether a risk premium counts as zero: scaled by the
/// larger of |E| and |CE|.
template <Scalar T>
T premium_scale(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    const T e = abs_value(expected_value(pora));
    const T ce = abs_value(certainty_equivalent(u, pora));
    return e < ce ? ce : e;
}

template <Scalar T>
RiskAttitude classify_risk_attitude(const LinearUtilityProfile<T>& u, const Pora<T>& pora) {
    switch (banded_sign(risk_premium(u, pora), premium_scale(u, pora))) {
        case 1: return RiskAttitude::Averse;
        case -1: return RiskAttitude::Loving;
        default: return RiskAttitude::Neutral;
    }
}

/// True iff u relative to `a` carries a strictly larger risk premium than v
/// relative to `b` (beyond the float band).
template <Scalar T>
bool more_risk_averse(const LinearUtilityProfile<T>& u, const Pora<T>& a, const LinearUtilityProfile<T>& v,
                      const Pora<T>& b) {
    return definitely_greater(risk_premium(u, a), risk_premium(v, b));
}

}  // namespace linutil
