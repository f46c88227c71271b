// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Runtime budgets are part of each criterion.

#include "linutil/almost_linear.hpp"
#include "linutil/ambiguity.hpp"
#include "linutil/core.hpp"
#include "linutil/insurance.hpp"
#include "linutil/report.hpp"
#include "linutil/scenario.hpp"
#include "linutil/stochastic.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

namespace {

using linutil::Rational;
using R = Rational;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

int failures = 0;

void criterion(const char* id, const char* title, double budget_seconds, const std::function<Outcome()>& body) {
    const auto start = Clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.ok = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double elapsed = std::chrono::duration<double>(Clock::now() - start).count();
    if (out.ok && elapsed > budget_seconds) {
        out.ok = false;
        out.detail = "runtime budget exceeded";
    }
    if (!out.ok) ++failures;
    std::ostringstream line;
    line.setf(std::ios::fixed);
    line.precision(2);
    line << id << " " << (out.ok ? "PASS" : "FAIL") << " " << title << " [" << elapsed << " s / " << budget_seconds
         << " s]";
    if (!out.detail.empty()) line << " -- " << out.detail;
    std::cout << line.str() << std::endl;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------

Outcome ac1() {
    Outcome out;
    struct Case {
        std::vector<int> x;
        R ce;
        linutil::RiskAttitude attitude;
    };
    const std::vector<Case> cases{{{2, 0}, R(2, 3), linutil::RiskAttitude::Averse},
                                  {{0, 2}, R(4, 3), linutil::RiskAttitude::Loving},
                                  {{1, 1}, R(1), linutil::RiskAttitude::Neutral}};
    const linutil::LinearUtilityProfile<R> u({1, 2});
    const linutil::LinearUtilityProfile<double> uf({1, 2});
    for (const Case& c : cases) {
        const linutil::Pora<R> a({R(c.x[0]), R(c.x[1])}, {R(1, 2), R(1, 2)});
        out.require(linutil::certainty_equivalent(u, a) == c.ce, "exact CE mismatch");
        out.require(linutil::classify_risk_attitude(u, a) == c.attitude, "exact attitude mismatch");
        const linutil::Pora<double> af({double(c.x[0]), double(c.x[1])}, {0.5, 0.5});
        out.require(std::fabs(linutil::certainty_equivalent(uf, af) - c.ce.convert_to<double>()) <= 1e-12,
                    "float CE error above 1e-12");
        out.require(linutil::classify_risk_attitude(uf, af) == c.attitude, "float attitude mismatch");
    }
    return out;
}

Outcome ac2() {
    Outcome out;
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> ret(-100, 100), slope(0.1, 10), weight(0.01, 1);
    std::uniform_int_distribution<std::size_t> size(2, 8);
    double worst = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = size(rng);
        std::vector<double> x(n), u(n), p(n);
        double total = 0;
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = ret(rng);
            u[j] = slope(rng);
            total += (p[j] = weight(rng));
        }
        for (double& v : p) v /= total;
        const linutil::LinearUtilityProfile<double> up(u);
        const linutil::Pora<double> a(x, p);
        double scale = 0;
        for (std::size_t j = 0; j < n; ++j) scale += std::fabs(u[j] * x[j]);
        const double gap =
            std::fabs(linutil::expected_utility(up, a) - linutil::expected_utility_telescoped(up, a)) / (1 + scale);
        worst = std::max(worst, gap);
        out.require(gap <= 1e-9, "telescoping gap above tolerance");
    }
    std::ostringstream ss;
    ss << "1000 draws, worst scaled gap " << worst;
    if (out.ok) out.detail = ss.str();
    return out;
}

Outcome ac3() {
    Outcome out;
    const linutil::ReturnVector<R> x({0, 1, 2});
    const auto grid = linutil::probability_grid<R>(3, 6);
    std::size_t forward = 0, reverse = 0;
    std::uint64_t seed = 0;
    for (const auto& p : grid) {
        for (const auto& q : grid) {
            if (p == q) continue;
            const auto r = linutil::verify_prop1(x, p, q, 200, seed++);
            if (r.direction == linutil::Prop1Direction::Forward) {
                ++forward;
                out.require(r.passed && r.samples == 200 && *r.min_margin > 0, "forward strict inequality failed");
            } else {
                ++reverse;
                out.require(r.direction == linutil::Prop1Direction::Reverse, "unexpected degenerate pair");
                out.require(r.passed && *r.max_margin <= R(-3, 2), "adversarial margin above -3/2");
                // Independent check of the returned profile.
                const std::vector<R> u(r.adversarial->slopes().begin(), r.adversarial->slopes().end());
                const std::vector<R> xs(x.entries().begin(), x.entries().end());
                const std::vector<R> ps(p.entries().begin(), p.entries().end());
                const std::vector<R> qs(q.entries().begin(), q.entries().end());
                out.require(oracle::expected_utility(u, xs, ps) - oracle::expected_utility(u, xs, qs) <= R(-3, 2),
                            "oracle margin above -3/2");
                for (std::size_t j = 0; j + 1 < 3; ++j) {
                    out.require(u[j] * xs[j] < u[j + 1] * xs[j + 1], "adversarial products not increasing");
                }
            }
        }
    }
    if (out.ok) out.detail = std::to_string(forward) + " forward pairs x 200 profiles, " + std::to_string(reverse) +
                             " reverse pairs";
    return out;
}

Outcome ac4() {
    Outcome out;
    std::mt19937_64 rng(4);
    for (int pair = 0; pair < 500; ++pair) {
        const std::size_t n = 3 + static_cast<std::size_t>(pair % 3);
        std::vector<R> x;
        R cur(static_cast<int>(rng() % 11) - 5);
        for (std::size_t j = 0; j < n; ++j) {
            x.push_back(cur);
            cur += R(1 + static_cast<int>(rng() % 6), 2);
        }
        const auto p = oracle::random_probs(rng, n, 60);
        std::size_t i = 0, j = 0, k = 0;
        while (!(i < j && j < k)) {
            i = rng() % n;
            j = rng() % n;
            k = rng() % n;
        }
        const R mass = p[j] * R(1 + static_cast<int>(rng() % 9), 10);
        const auto q = oracle::spread(x, p, i, j, k, mass);
        const linutil::ReturnVector<R> xs(x);
        const auto r = linutil::verify_prop2a(xs, linutil::ProbabilityVector<R>(p), linutil::ProbabilityVector<R>(q),
                                              50, static_cast<std::uint64_t>(pair));
        out.require(r.passed && r.samples == 50 && *r.min_margin > 0, "strict inequality failed");
    }
    if (out.ok) out.detail = "500 spread pairs x 50 profiles";
    return out;
}

Outcome ac5() {
    Outcome out;
    const linutil::ReturnVector<R> x({0, 1, 2});
    const auto grid = linutil::probability_grid<R>(3, 6);
    std::size_t checked = 0;
    for (const auto& p : grid) {
        for (const auto& q : grid) {
            const linutil::Pora<R> a(x, p), b(x, q);
            if (linutil::expected_value(a) != linutil::expected_value(b) || p[1] == q[1]) continue;
            if (linutil::is_mean_preserving_spread(x, p, q)) continue;
            ++checked;
            const auto r = linutil::verify_prop2b(x, p, q);
            out.require(r.passed && r.witness && r.evaluated <= linutil::kDefaultSearchBudget, "no witness found");
            if (r.witness) {
                out.require(linutil::is_increasing_concave(*r.witness, x), "witness not increasing-concave");
                out.require(linutil::expected_utility(*r.witness, a) <= linutil::expected_utility(*r.witness, b),
                            "witness does not reverse the preference");
            }
        }
    }
    out.require(checked > 0, "no qualifying pairs");
    if (out.ok) out.detail = std::to_string(checked) + " non-spread equal-mean pairs";
    return out;
}

Outcome ac6() {
    Outcome out;
    {
        const linutil::InsuranceScenario<R> s(R(1000), R(100), R(1, 10), R(1), R(2));
        const auto c = linutil::optimal_contract_two_son(s);
        out.require(c.premium == R(200, 11) && c.expected_profit == R(90, 11) && c.deductible == 0,
                    "reference contract differs from 200/11, 90/11");
    }
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> prob(0.01, 0.5), loss(10, 500), base(0.5, 2), ratio(1.05, 3), mix(0.05, 0.95);
    double worst_gap_steps = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const double p = prob(rng), l = loss(rng), u1 = base(rng), u2 = u1 * ratio(rng);
        const linutil::InsuranceScenario<double> s(1000, l, p, u1, u2);
        const auto closed = linutil::optimal_contract_two_son(s);
        const auto oracle = linutil::grid_oracle_optimal_contract(s, 2000);
        const double gap = std::fabs(closed.premium - oracle.contract.premium);
        worst_gap_steps = std::max(worst_gap_steps, gap / oracle.premium_step);
        out.require(gap <= oracle.premium_step, "closed form and oracle premium differ by more than one step");
        out.require(oracle.contract.deductible == 0.0, "oracle picked a positive deductible");
        const double formula = p * (1 - p) * (u2 - u1) * l / ((1 - p) * u1 + p * u2);
        out.require(std::fabs(formula - (closed.premium - p * l)) <= 1e-9 * (1 + std::fabs(formula)),
                    "profit formula mismatch");

        const double u3 = u1 + mix(rng) * (u2 - u1);
        const auto three = linutil::optimal_contract_three_son(linutil::InsuranceScenario<double>(1000, l, p, u1, u2, u3));
        out.require(three.premium > closed.premium, "three-SON premium not above two-SON");
    }
    std::ostringstream ss;
    ss << "100 scenarios, worst premium gap " << worst_gap_steps << " grid steps";
    if (out.ok) out.detail = ss.str();
    return out;
}

Outcome ac7() {
    Outcome out;
    std::mt19937_64 rng(7);
    auto check = [&](const linutil::InsuranceScenario<R>& s) {
        const bool strict = linutil::strict_profitability_holds(s);
        const linutil::Pora<R> risk({-s.loss(), R(0)}, {s.loss_prob(), 1 - s.loss_prob()});
        const bool averse = linutil::classify_risk_attitude(linutil::LinearUtilityProfile<R>({s.u2(), s.u1()}), risk) ==
                            linutil::RiskAttitude::Averse;
        out.require(strict == averse && averse == (s.u2() > s.u1()), "equivalence broken");
    };
    for (int trial = 0; trial < 1000; ++trial) {
        const R p(1 + static_cast<int>(rng() % 999), 1000);
        const R l(1 + static_cast<int>(rng() % 999));
        const R u1(1 + static_cast<int>(rng() % 100), 10);
        const R u2 = trial % 10 == 0 ? u1 : u1 + R(1 + static_cast<int>(rng() % 1000), 1000);
        check(linutil::InsuranceScenario<R>(R(1000), l, p, u1, u2));
    }
    check(linutil::InsuranceScenario<R>(R(1000), R(100), R(1, 10), R(2), R(2)));
    if (out.ok) out.detail = "1000 scenarios (100 on the u1 = u2 boundary) plus the reference boundary";
    return out;
}

Outcome ac8() {
    using linutil::Side;
    using ALU = linutil::AlmostLinearUtility<R>;
    Outcome out;
    {
        const ALU ref(R(100), {R(-10), R(-100)}, {R(2), R(3)}, {R(10)}, {R(1), R(2)}, {Side::Left}, {Side::Left});
        out.require(linutil::perturbation_certainty_equivalent(ref, 1, R(1)) == R(31, 3), "gain reference CE");
        out.require(linutil::perturbation_certainty_equivalent(ref, -1, R(1)) == R(-51, 5), "loss reference CE");
    }
    std::mt19937_64 rng(8);
    std::size_t breakpoints = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4), m = 1 + static_cast<int>(rng() % 4);
        const R w(20 + static_cast<int>(rng() % 200));
        std::vector<R> lb, ls, gb, gs;
        R cur(0);
        for (int j = 1; j < n; ++j) lb.push_back(cur -= R(1 + static_cast<int>(rng() % 4)));
        lb.push_back(-w);
        R s(1 + static_cast<int>(rng() % 8), 4);
        for (int j = 0; j < n; ++j, s += R(1 + static_cast<int>(rng() % 8), 8)) ls.push_back(s);
        cur = 0;
        for (int k = 1; k < m; ++k) gb.push_back(cur += R(1 + static_cast<int>(rng() % 9)));
        s = R(1 + static_cast<int>(rng() % 8), 8);
        for (int k = 0; k < m; ++k, s += R(1 + static_cast<int>(rng() % 8), 8)) gs.push_back(s);
        std::vector<Side> lside, gside;
        for (int j = 1; j < n; ++j) lside.push_back(rng() % 2 ? Side::Left : Side::Right);
        for (int k = 1; k < m; ++k) gside.push_back(rng() % 2 ? Side::Left : Side::Right);
        const ALU u(w, lb, ls, gb, gs, lside, gside);

        // Strict monotonicity scan: breakpoints and points just around them.
        std::vector<R> pts{-w, R(0), R(50)};
        for (const R& b : lb) {
            for (const R& d : {R(-1, 100), R(0), R(1, 100)}) pts.push_back(b + d);
        }
        for (const R& b : gb) {
            for (const R& d : {R(-1, 100), R(0), R(1, 100)}) pts.push_back(b + d);
        }
        std::sort(pts.begin(), pts.end());
        pts.erase(std::remove_if(pts.begin(), pts.end(), [&](const R& v) { return v < -w; }), pts.end());
        for (std::size_t i = 1; i < pts.size(); ++i) {
            out.require(u.evaluate(pts[i - 1]) < u.evaluate(pts[i]) || pts[i - 1] == pts[i], "not strictly increasing");
        }

        for (int k : u.interior_breakpoints()) {
            ++breakpoints;
            const auto info = u.breakpoint(k);
            const R width = linutil::default_perturbation(u, k) * 4;
            for (int step = 1; step <= 5; ++step) {
                const R delta = width * R(step, 6);
                const auto attitude = linutil::risk_attitude_at_breakpoint(u, k, delta);
                out.require(attitude == (info.side == Side::Right ? linutil::RiskAttitude::Averse
                                                                  : linutil::RiskAttitude::Loving),
                            "attitude contradicts continuity side");
                // Independent evaluation from the adjacent slopes and the side rule.
                const R value = (info.side == Side::Right ? std::max(info.left_slope * info.location,
                                                                     info.right_slope * info.location)
                                                          : std::min(info.left_slope * info.location,
                                                                     info.right_slope * info.location));
                const R eu = (info.left_slope * (info.location - delta) + info.right_slope * (info.location + delta)) / 2;
                out.require((eu < value) == (info.side == Side::Right), "oracle attitude mismatch");
                const R ce = linutil::perturbation_certainty_equivalent(u, k, delta);
                out.require(k > 0 ? ce > info.location : ce < info.location, "CE on the wrong side of x_k");
            }
        }
    }
    if (out.ok) out.detail = "200 instances, " + std::to_string(breakpoints) + " interior breakpoints x 5 deltas";
    return out;
}

Outcome ac9() {
    Outcome out;
    std::mt19937_64 rng(9);
    std::size_t selections = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 3;
        std::vector<std::vector<R>> sets(n);
        std::vector<linutil::SignSlopes<R>> slopes;
        for (auto& set : sets) {
            const std::size_t size = 1 + rng() % 3;
            while (set.size() < size) {
                const R v(static_cast<int>(rng() % 41) - 20, 4);
                if (std::find(set.begin(), set.end(), v) == set.end()) set.push_back(v);
            }
            const R gain(1 + static_cast<int>(rng() % 10), 5);
            slopes.push_back({gain + R(static_cast<int>(rng() % 10), 5), gain});
        }
        const auto probs = oracle::random_probs(rng, n, 30);
        const linutil::GeneralizedPora<R> g(sets, linutil::ProbabilityVector<R>(probs));
        const linutil::SignDependentProfile<R> sp(slopes);
        const R floor = linutil::min_expected_utility(sp, g);

        std::vector<std::size_t> pick(n, 0);
        for (;;) {
            ++selections;
            std::vector<R> x;
            bool is_min = true;
            for (std::size_t j = 0; j < n; ++j) {
                x.push_back(sets[j][pick[j]]);
                if (x.back() != *std::min_element(sets[j].begin(), sets[j].end())) is_min = false;
            }
            const R value = linutil::sign_dependent_expected_utility(sp, linutil::Pora<R>(x, probs));
            out.require(floor <= value, "selection below the min-expected utility");
            out.require((floor == value) == is_min, "equality does not identify the MIN-PORA");
            std::size_t j = 0;
            while (j < n && ++pick[j] == sets[j].size()) pick[j++] = 0;
            if (j == n) break;
        }
    }
    if (out.ok) out.detail = "100 instances, " + std::to_string(selections) + " selections";
    return out;
}

Outcome ac10() {
    using namespace linutil::cli;
    Outcome out;
    const std::string dir = LINUTIL_GOLDEN_DIR;
    const auto doc = parse_scenario(read_file(std::string(LINUTIL_SCENARIO_DIR) + "/example1.json"));
    RunOptions options;
    const Report report = run_command(doc, options);
    out.require(render(report, OutputFormat::Json) == read_file(dir + "/example1.json"), "JSON golden mismatch");
    out.require(render(report, OutputFormat::Text) == read_file(dir + "/example1.txt"), "text golden mismatch");

    for (const char* name : {"example1.json", "example1_float.json", "dominance.json", "spread.json", "insurance.json",
                             "insurance_full.json", "almost_linear.json", "ambiguity.json", "verify.json"}) {
        const auto d = parse_scenario(read_file(std::string(LINUTIL_SCENARIO_DIR) + "/" + name));
        out.require(parse_scenario(serialize_scenario(d)) == d, std::string("round trip failed for ") + name);
    }

    const auto spread = parse_scenario(read_file(std::string(LINUTIL_SCENARIO_DIR) + "/spread.json"));
    options.seed = 12345;
    out.require(render(run_command(spread, options), OutputFormat::Json) ==
                    render(run_command(spread, options), OutputFormat::Json),
                "JSON report not deterministic under a fixed seed");
    return out;
}

}  // namespace

int main() {
    criterion("AC1", "Example 1 certainty equivalents and attitudes", 1, ac1);
    criterion("AC2", "telescoping identity on random inputs", 1, ac2);
    criterion("AC3", "Proposition 1 forward and reverse on the denominator-6 grid", 30, ac3);
    criterion("AC4", "Proposition 2(a) on generated spread pairs", 10, ac4);
    criterion("AC5", "Proposition 2(b) converse witnesses at L = 3", 30, ac5);
    criterion("AC6", "insurance closed form versus grid oracle", 60, ac6);
    criterion("AC7", "strict profitability equivalence", 1, ac7);
    criterion("AC8", "Almost Linear breakpoint attitudes and certainty equivalents", 5, ac8);
    criterion("AC9", "ambiguity lower bound over all selections", 5, ac9);
    criterion("AC10", "CLI golden report, round trip and determinism", 1, ac10);
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
