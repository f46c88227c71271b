#pragma once

// Ambiguity over returns: each SON may realize any of several candidate
// returns. The pessimistic evaluation takes the smallest candidate per SON
// (the MIN-PORA) and applies loss-averse sign-dependent linear utility.

#include "linutil/core.hpp"

#include <algorithm>
#include <utility>
#include <vector>

namespace linutil {

template <Scalar T>
class GeneralizedPora {
public:
    /// Each candidate set must be non-empty; duplicates are dropped and the
    /// sets are kept sorted ascending.
    GeneralizedPora(std::vector<std::vector<T>> candidates, ProbabilityVector<T> probs)
        : candidates_(std::move(candidates)), probs_(std::move(probs)) {
        if (candidates_.size() != probs_.size()) {
            detail::fail_validation("candidate sets and probs differ in length");
        }
        for (auto& set : candidates_) {
            if (set.empty()) detail::fail_validation("every candidate set must be non-empty");
            for (const T& v : set) {
                if (!is_finite(v)) detail::fail_validation("candidate returns must be finite");
            }
            std::sort(set.begin(), set.end());
            set.erase(std::unique(set.begin(), set.end()), set.end());
        }
    }

    std::size_t size() const { return candidates_.size(); }
    const std::vector<T>& candidates(std::size_t j) const { return candidates_[j]; }
    const std::vector<std::vector<T>>& candidate_sets() const { return candidates_; }
    const ProbabilityVector<T>& probs() const { return probs_; }

private:
    std::vector<std::vector<T>> candidates_;
    ProbabilityVector<T> probs_;
};

template <Scalar T>
struct SignSlopes {
    T loss;
    T gain;
};

template <Scalar T>
class SignDependentProfile {
public:
    /// Requires loss >= gain > 0 in every SON.
    explicit SignDependentProfile(std::vector<SignSlopes<T>> slopes) : slopes_(std::move(slopes)) {
        if (slopes_.empty()) detail::fail_validation("sign-dependent profile must not be empty");
        for (const auto& s : slopes_) {
            if (!(s.gain > T(0))) detail::fail_validation("gain slopes must be positive");
            if (!(s.loss >= s.gain)) detail::fail_validation("loss slope must be >= gain slope in every state");
        }
    }

    std::size_t size() const { return slopes_.size(); }
    const SignSlopes<T>& operator[](std::size_t j) const { return slopes_[j]; }

private:
    std::vector<SignSlopes<T>> slopes_;
};

template <Scalar T>
Pora<T> min_pora(const GeneralizedPora<T>& g) {
    std::vector<T> returns;
    returns.reserve(g.size());
    for (std::size_t j = 0; j < g.size(); ++j) returns.push_back(g.candidates(j).front());
    return Pora<T>(ReturnVector<T>(std::move(returns)), g.probs());
}

/// sum_j p_j [u_j^- min(x_j, 0) + u_j^+ max(x_j, 0)]
template <Scalar T>
T sign_dependent_expected_utility(const SignDependentProfile<T>& sp, const Pora<T>& pora) {
    if (sp.size() != pora.size()) detail::fail_validation("profile and PORA differ in length");
    T total(0);
    for (std::size_t j = 0; j < pora.size(); ++j) {
        const T& x = pora.returns()[j];
        const T utility = x < T(0) ? sp[j].loss * x : sp[j].gain * x;
        total += pora.probs()[j] * utility;
    }
    return total;
}

template <Scalar T>
T min_expected_utility(const SignDependentProfile<T>& sp, const GeneralizedPora<T>& g) {
    return sign_dependent_expected_utility(sp, min_pora(g));
}

}  // namespace linutil
