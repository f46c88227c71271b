#include "linutil/insurance.hpp"

#include <cmath>
#include <limits>

namespace linutil {

OracleContract grid_oracle_optimal_contract(const InsuranceScenario<double>& s, int resolution) {
    if (resolution < 2) detail::fail_validation("oracle resolution must be >= 2");

    const double p = s.loss_prob();
    const double loss = s.loss();
    const double premium_max = 2.0 * p * loss * s.u2() / s.u1();
    const double premium_step = premium_max / (resolution - 1);
    const double deductible_step = loss / (resolution - 1);

    const double reservation = no_insurance_expected_utility(s);
    const double buyer_slack = 1e-12 * std::fabs(reservation);
    const double insurer_slack = 1e-12 * p * loss;
    auto buyer_ok = [&](double premium, double deductible) {
        return contract_expected_utility(s, premium, deductible) >= reservation - buyer_slack;
    };
    auto insurer_ok = [&](double premium, double deductible) {
        return premium + p * deductible >= p * loss - insurer_slack;
    };
    auto profit = [&](double premium, double deductible) { return premium - p * (loss - deductible); };

    bool found = false;
    double best_profit = -std::numeric_limits<double>::infinity();
    double best_premium = 0.0;
    double best_deductible = 0.0;
    auto consider = [&](double premium, double deductible) {
        if (!buyer_ok(premium, deductible) || !insurer_ok(premium, deductible)) return;
        const double value = profit(premium, deductible);
        if (!found || value > best_profit) {
            found = true;
            best_profit = value;
            best_premium = premium;
            best_deductible = deductible;
        }
    };

    for (int row = 0; row < resolution; ++row) {
        const double deductible = row == resolution - 1 ? loss : row * deductible_step;
        int last_buyer_ok = -1;
        for (int col = 0; col < resolution; ++col) {
            const double premium = col == resolution - 1 ? premium_max : col * premium_step;
            if (buyer_ok(premium, deductible)) last_buyer_ok = col;
            consider(premium, deductible);
        }
        // The buyer constraint is monotone in the premium: bisect the cell
        // between the last accepted and the first rejected grid premium.
        if (last_buyer_ok >= 0 && last_buyer_ok + 1 < resolution) {
            double lo = last_buyer_ok * premium_step;
            double hi = (last_buyer_ok + 1) * premium_step;
            for (int it = 0; it < 200 && hi - lo > 4 * std::numeric_limits<double>::epsilon() * hi; ++it) {
                const double mid = 0.5 * (lo + hi);
                (buyer_ok(mid, deductible) ? lo : hi) = mid;
            }
            consider(lo, deductible);
        }
    }
    if (!found) detail::fail_internal("oracle found no feasible contract");

    OracleContract out;
    out.contract = {best_premium, best_deductible, best_profit, s.u1() == s.u2()};
    out.premium_step = premium_step;
    out.deductible_step = deductible_step;
    return out;
}

}  // namespace linutil
