#pragma once

// Two-SON insurance against a single loss, its three-SON refinement (a loss
// SON where the agent holds a policy), a seller with an outside investment
// return, risk spreading over two investments, and the contract a monopolist
// insurer offers when partial coverage (a deductible) is allowed.
//
// SON 1: no loss (slope u1). SON 2: loss, uninsured (slope u2). SON 3: loss
// with a policy in force (slope u3, optional).

#include "linutil/core.hpp"

#include <optional>
#include <string>

namespace linutil {

template <Scalar T>
class InsuranceScenario {
public:
    /// Requires w > 0, 0 < L < w, 0 < p < 1, 0 < u1 <= u2, u1 < u3 < u2 when u3
    /// is given, and r > 0 when the investment return is given.
    InsuranceScenario(T wealth, T loss, T loss_prob, T u1, T u2, std::optional<T> u3 = std::nullopt,
                      std::optional<T> invest_return = std::nullopt)
        : wealth_(std::move(wealth)),
          loss_(std::move(loss)),
          loss_prob_(std::move(loss_prob)),
          u1_(std::move(u1)),
          u2_(std::move(u2)),
          u3_(std::move(u3)),
          invest_return_(std::move(invest_return)) {
        if (!(wealth_ > T(0))) detail::fail_validation("wealth must be > 0");
        if (!(loss_ > T(0))) detail::fail_validation("loss must be > 0");
        if (!(loss_ < wealth_)) detail::fail_validation("loss must be < wealth");
        if (!(loss_prob_ > T(0) && loss_prob_ < T(1))) detail::fail_validation("loss_prob must lie in (0, 1)");
        if (!(u1_ > T(0))) detail::fail_validation("u1 must be > 0");
        if (!(u1_ <= u2_)) detail::fail_validation("u2 must be >= u1");
        if (u3_ && !(u1_ < *u3_ && *u3_ < u2_)) detail::fail_validation("u3 must satisfy u1 < u3 < u2");
        if (invest_return_ && !(*invest_return_ > T(0))) detail::fail_validation("invest_return must be > 0");
    }

    const T& wealth() const { return wealth_; }
    const T& loss() const { return loss_; }
    const T& loss_prob() const { return loss_prob_; }
    const T& u1() const { return u1_; }
    const T& u2() const { return u2_; }
    const std::optional<T>& u3() const { return u3_; }
    const std::optional<T>& invest_return() const { return invest_return_; }

    /// Same scenario without the insured-loss SON.
    InsuranceScenario two_son_view() const {
        return InsuranceScenario(wealth_, loss_, loss_prob_, u1_, u2_, std::nullopt, invest_return_);
    }

    /// Slope that applies to the loss SON once a policy is bought.
    const T& insured_loss_slope() const { return u3_ ? *u3_ : u2_; }

private:
    T wealth_;
    T loss_;
    T loss_prob_;
    T u1_;
    T u2_;
    std::optional<T> u3_;
    std::optional<T> invest_return_;
};

template <Scalar T>
struct InsuranceContract {
    T premium;
    T deductible;
    /// premium - p (L - deductible)
    T expected_profit;
    /// u1 == u2: the buyer is risk neutral and no surplus can be extracted.
    bool degenerate = false;
};

template <Scalar T>
struct PremiumBand {
    T low;
    T high;
};

template <Scalar T>
struct DiversificationReport {
    T single;
    T split;
    T advantage;
};

/// -p u2 L
template <Scalar T>
T no_insurance_expected_utility(const InsuranceScenario<T>& s) {
    return -s.loss_prob() * s.u2() * s.loss();
}

/// (1 - p) u1 + p u2
template <Scalar T>
T two_son_weight(const InsuranceScenario<T>& s) {
    return (T(1) - s.loss_prob()) * s.u1() + s.loss_prob() * s.u2();
}

/// CE1 = -p u2 L / ((1 - p) u1 + p u2)
template <Scalar T>
T no_insurance_certainty_equivalent(const InsuranceScenario<T>& s) {
    return no_insurance_expected_utility(s) / two_son_weight(s);
}

template <Scalar T>
T actuarially_fair_premium(const InsuranceScenario<T>& s) {
    return s.loss_prob() * s.loss();
}

/// Buyer expected utility under a policy (premium, deductible):
/// -(1 - p) u1 pi - p u_ins (pi + d), with u_ins = u3 if present, else u2.
template <Scalar T>
T contract_expected_utility(const InsuranceScenario<T>& s, const T& premium, const T& deductible) {
    const T& p = s.loss_prob();
    return -(T(1) - p) * s.u1() * premium - p * s.insured_loss_slope() * (premium + deductible);
}

/// Buyer expected utility with full coverage bought at `premium`.
template <Scalar T>
T full_coverage_expected_utility(const InsuranceScenario<T>& s, const T& premium) {
    return contract_expected_utility(s, premium, T(0));
}

/// Open interval (pL / (1 + r), pL) of full-coverage premiums at which both a
/// seller earning r on invested premiums and the buyer strictly gain.
template <Scalar T>
PremiumBand<T> seller_premium_band(const InsuranceScenario<T>& s) {
    if (!s.invest_return()) detail::fail_precondition("seller premium band needs invest_return");
    const T fair = actuarially_fair_premium(s);
    return {fair / (T(1) + *s.invest_return()), fair};
}

/// Investing I in one opportunity versus splitting it over two independent
/// ones, each failing with probability p. SON slopes: u1 nothing lost, u2 half
/// lost, u3 everything lost.
template <Scalar T>
DiversificationReport<T> diversification_comparison(const T& wealth, const T& invest, const T& p, const T& u1,
                                                    const T& u2, const T& u3) {
    if (!(invest > T(0) && invest < wealth)) detail::fail_precondition("investment must lie in (0, wealth)");
    if (!(T(0) < u1 && u1 < u2 && u2 < u3)) detail::fail_precondition("slopes must satisfy 0 < u1 < u2 < u3");
    if (!(p > T(0) && p < T(1))) detail::fail_precondition("failure probability must lie in (0, 1)");

    DiversificationReport<T> report{-p * u3 * invest, -p * ((T(1) - p) * u2 + p * u3) * invest, T(0)};
    report.advantage = report.split - report.single;
    if (!(report.split > report.single)) detail::fail_internal("splitting did not beat a single investment");
    return report;
}

/// Profit-maximizing contract with slopes (u1, u2): full coverage (d = 0) at
/// pi* = p u2 L / ((1 - p) u1 + p u2), profit p (1 - p)(u2 - u1) L / (same).
/// With u1 == u2 the contract is flagged degenerate (pi* = pL, zero profit).
template <Scalar T>
InsuranceContract<T> optimal_contract_two_son(const InsuranceScenario<T>& s) {
    if (s.u3()) detail::fail_precondition("two-SON contract requires a scenario without u3");
    const T& p = s.loss_prob();
    const T weight = two_son_weight(s);
    InsuranceContract<T> c{p * s.u2() * s.loss() / weight, T(0),
                           p * (T(1) - p) * (s.u2() - s.u1()) * s.loss() / weight, s.u1() == s.u2()};

    const T fair = actuarially_fair_premium(s);
    if (!approx_equal(c.expected_profit, T(c.premium - fair))) {
        detail::fail_internal("two-SON profit does not match premium - pL");
    }
    if (!c.degenerate && !(c.premium > fair && c.expected_profit > T(0))) {
        detail::fail_internal("two-SON contract is not strictly profitable");
    }
    return c;
}

/// Profit-maximizing contract when the insured loss SON has slope u3 with
/// u1 < u3 < u2: pi* = p u2 L / ((1 - p) u1 + p u3), d = 0. Strictly more
/// profitable than the two-SON contract.
template <Scalar T>
InsuranceContract<T> optimal_contract_three_son(const InsuranceScenario<T>& s) {
    if (!s.u3()) detail::fail_precondition("three-SON contract requires u3");
    const T& p = s.loss_prob();
    const T premium = p * s.u2() * s.loss() / ((T(1) - p) * s.u1() + p * *s.u3());
    InsuranceContract<T> c{premium, T(0), premium - actuarially_fair_premium(s), false};

    const InsuranceContract<T> two = optimal_contract_two_son(s.two_son_view());
    if (!(c.premium > two.premium && c.expected_profit > two.expected_profit)) {
        detail::fail_internal("three-SON contract does not dominate the two-SON contract");
    }
    return c;
}

/// Insurer strictly profits while the buyer participates iff CE1 < -pL, i.e.
/// iff the agent is risk averse towards the uninsured loss ((-L, 0), (p, 1-p))
/// with slopes (u2, u1). Uses u1 and u2 only.
template <Scalar T>
bool strict_profitability_holds(const InsuranceScenario<T>& s) {
    const Pora<T> risk({-s.loss(), T(0)}, {s.loss_prob(), T(1) - s.loss_prob()});
    const LinearUtilityProfile<T> profile({s.u2(), s.u1()});
    const bool averse = classify_risk_attitude(profile, risk) == RiskAttitude::Averse;
    const bool ce_rule = definitely_less(no_insurance_certainty_equivalent(s), -actuarially_fair_premium(s));
    if (averse != ce_rule) detail::fail_internal("risk attitude and CE1 < -pL disagree");
    return averse;
}

struct OracleContract {
    InsuranceContract<double> contract;
    double premium_step = 0.0;
    double deductible_step = 0.0;
};

/// Brute-force optimum of the insurer's problem: scans a resolution x
/// resolution grid of (premium, deductible) over [0, 2 p L u2 / u1] x [0, L],
/// keeping points where the insurer breaks even (pi + p d >= pL) and the buyer
/// participates (contract EU >= no-insurance EU). In every deductible row the
/// last buyer-feasible premium is then refined by bisection inside its grid
/// cell, so grid snapping cannot favour a positive deductible. Ties keep the
/// first point found (smallest deductible, then smallest premium).
OracleContract grid_oracle_optimal_contract(const InsuranceScenario<double>& s, int resolution);

}  // namespace linutil
