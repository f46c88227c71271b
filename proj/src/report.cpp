#include "linutil/report.hpp"

#include "linutil/almost_linear.hpp"
#include "linutil/ambiguity.hpp"
#include "linutil/error.hpp"
#include "linutil/insurance.hpp"
#include "linutil/stochastic.hpp"

#include <cmath>
#include <sstream>

namespace linutil::cli {

using Json = nlohmann::ordered_json;

namespace {

template <Scalar T>
Json num(const T& v) {
    if constexpr (is_exact_v<T>) {
        return Json{{"decimal", to_double(v)}, {"rational", to_rational_string(v)}};
    } else {
        return v;
    }
}

template <Scalar T>
Json nums(std::span<const T> values) {
    Json out = Json::array();
    for (const T& v : values) out.push_back(num(v));
    return out;
}

template <Scalar T>
Json nums(const std::vector<T>& values) {
    return nums(std::span<const T>(values));
}

template <Scalar T>
Json optional_num(const std::optional<T>& v) {
    return v ? num(*v) : Json(nullptr);
}

std::string pass_fail(bool ok) { return ok ? "pass" : "FAIL"; }

template <Scalar T>
std::string number_text(const T& v) {
    if constexpr (is_exact_v<T>) {
        return to_rational_string(v);
    } else {
        return to_decimal_string(v);
    }
}

// ---------------------------------------------------------------------------

template <Scalar T>
Pora<T> make_pora(const PoraFields& f) {
    return Pora<T>(to_scalars<T>(f.returns), to_scalars<T>(f.probs));
}

template <Scalar T>
Json evaluate_pora(const ProfiledPora& f) {
    const LinearUtilityProfile<T> u(to_scalars<T>(f.profile));
    const Pora<T> pora = make_pora<T>(f.pora);

    const T eu = expected_utility(u, pora);
    const T telescoped = expected_utility_telescoped(u, pora);
    if (compare_values(eu, telescoped) != 0) detail::fail_internal("direct and telescoped expected utility disagree");

    Json tails = Json::array();
    std::vector<T> support(pora.returns().entries().begin(), pora.returns().entries().end());
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());
    for (const T& alpha : support) {
        tails.push_back(Json{{"threshold", num(alpha)},
                             {"greater", num(tail_probability(pora, alpha, Relation::Greater))},
                             {"less_equal", num(tail_probability(pora, alpha, Relation::LessEqual))}});
    }

    Json out;
    out["expected_value"] = num(expected_value(pora));
    out["expected_utility"] = num(eu);
    out["expected_utility_telescoped"] = num(telescoped);
    out["certainty_equivalent"] = num(certainty_equivalent(u, pora));
    out["risk_premium"] = num(risk_premium(u, pora));
    out["attitude"] = std::string(to_string(classify_risk_attitude(u, pora)));
    out["tail_probabilities"] = std::move(tails);
    return out;
}

template <Scalar T>
Json run_pora_eval(const PoraEvalPayload& p) {
    Json out = evaluate_pora<T>(p.subject);
    if (p.compare) {
        const LinearUtilityProfile<T> u(to_scalars<T>(p.subject.profile));
        const LinearUtilityProfile<T> v(to_scalars<T>(p.compare->profile));
        Json cmp = evaluate_pora<T>(*p.compare);
        cmp["subject_more_risk_averse"] =
            more_risk_averse(u, make_pora<T>(p.subject.pora), v, make_pora<T>(p.compare->pora));
        out["compare"] = std::move(cmp);
    }
    return out;
}

template <Scalar T>
Json verdict_json(const DominanceVerdict<T>& v) {
    return Json{{"dominates", v.dominates}, {"strict_at", optional_num(v.strict_at)}};
}

template <Scalar T>
Json run_dominance(const DominancePayload& p) {
    const Pora<T> a = make_pora<T>(p.a);
    const Pora<T> b = make_pora<T>(p.b);
    Json out;
    out["a_dominates_b"] = verdict_json(first_order_dominates(a, b));
    out["b_dominates_a"] = verdict_json(first_order_dominates(b, a));
    return out;
}

template <Scalar T>
Json run_spread(const SpreadPayload& p, const RunOptions& options) {
    const ReturnVector<T> x(to_scalars<T>(p.returns));
    const ProbabilityVector<T> prob_p(to_scalars<T>(p.p));
    const ProbabilityVector<T> prob_q(to_scalars<T>(p.q));

    Json out;
    out["mean_p"] = num(expected_value(Pora<T>(x, prob_p)));
    out["mean_q"] = num(expected_value(Pora<T>(x, prob_q)));
    const auto witness = is_mean_preserving_spread(x, prob_p, prob_q);
    out["spread_witness"] = witness ? Json::array({witness->i, witness->j, witness->k}) : Json(nullptr);

    if (p.profile) {
        const LinearUtilityProfile<T> u(to_scalars<T>(*p.profile));
        const T eu_p = expected_utility(u, Pora<T>(x, prob_p));
        const T eu_q = expected_utility(u, Pora<T>(x, prob_q));
        out["profile"] = Json{{"increasing_concave", is_increasing_concave(u, x)},
                              {"expected_utility_p", num(eu_p)},
                              {"expected_utility_q", num(eu_q)}};
    }
    if (p.samples) {
        if (witness) {
            const auto r = verify_prop2a(x, prob_p, prob_q, static_cast<std::size_t>(*p.samples), options.seed);
            out["prop2a"] = Json{{"samples", r.samples}, {"min_margin", optional_num(r.min_margin)},
                                 {"result", pass_fail(r.passed)}};
            if (!r.passed) detail::fail_internal("sampled increasing-concave profile did not prefer p over its spread");
        } else {
            out["prop2a"] = "skipped: q is not a mean-preserving spread of p";
        }
    }
    return out;
}

template <Scalar T>
Json contract_json(const InsuranceContract<T>& c) {
    return Json{{"premium", num(c.premium)},
                {"deductible", num(c.deductible)},
                {"expected_profit", num(c.expected_profit)},
                {"degenerate", c.degenerate}};
}

template <Scalar T>
Json run_insurance(const InsurancePayload& p, const RunOptions& options) {
    auto opt = [](const std::optional<Number>& n) {
        return n ? std::optional<T>(n->template as<T>()) : std::nullopt;
    };
    const InsuranceScenario<T> s(p.wealth.template as<T>(), p.loss.template as<T>(), p.loss_prob.template as<T>(),
                                 p.u1.template as<T>(), p.u2.template as<T>(), opt(p.u3), opt(p.invest_return));

    Json out;
    out["no_insurance_expected_utility"] = num(no_insurance_expected_utility(s));
    out["no_insurance_certainty_equivalent"] = num(no_insurance_certainty_equivalent(s));
    out["actuarially_fair_premium"] = num(actuarially_fair_premium(s));
    out["strict_profitability"] = strict_profitability_holds(s);
    if (s.invest_return()) {
        const PremiumBand<T> band = seller_premium_band(s);
        out["seller_premium_band"] = Json{{"low", num(band.low)}, {"high", num(band.high)}};
    }
    const InsuranceContract<T> two = optimal_contract_two_son(s.two_son_view());
    out["two_son_contract"] = contract_json(two);
    std::optional<InsuranceContract<T>> three;
    if (s.u3()) {
        three = optimal_contract_three_son(s);
        out["three_son_contract"] = contract_json(*three);
    }

    if (options.oracle_resolution) {
        const InsuranceScenario<double> fs(to_double(s.wealth()), to_double(s.loss()), to_double(s.loss_prob()),
                                           to_double(s.u1()), to_double(s.u2()),
                                           s.u3() ? std::optional<double>(to_double(*s.u3())) : std::nullopt);
        const OracleContract oracle = grid_oracle_optimal_contract(fs, *options.oracle_resolution);
        const InsuranceContract<T>& closed = three ? *three : two;
        const double gap = std::fabs(to_double(closed.premium) - oracle.contract.premium);
        const bool agrees = closed.degenerate
                                ? std::fabs(oracle.contract.expected_profit) <= oracle.premium_step
                                : gap <= oracle.premium_step && oracle.contract.deductible == 0.0;
        out["oracle"] = Json{{"resolution", *options.oracle_resolution},
                             {"premium", oracle.contract.premium},
                             {"deductible", oracle.contract.deductible},
                             {"expected_profit", oracle.contract.expected_profit},
                             {"premium_step", oracle.premium_step},
                             {"premium_gap", gap},
                             {"agrees", agrees}};
        if (!agrees) detail::fail_internal("closed-form contract and grid oracle disagree");
    }

    if (p.diversification) {
        const auto& d = *p.diversification;
        const auto r = diversification_comparison(s.wealth(), d.amount.template as<T>(), s.loss_prob(),
                                                  d.u1.template as<T>(), d.u2.template as<T>(), d.u3.template as<T>());
        out["diversification"] = Json{{"single", num(r.single)}, {"split", num(r.split)}, {"advantage", num(r.advantage)}};
    }
    return out;
}

template <Scalar T>
std::string interval_text(const StateEvent<T>& e) {
    std::string s = e.lower_closed ? "[" : "(";
    s += number_text(e.lower) + ", ";
    if (e.upper) {
        s += number_text(*e.upper) + (e.upper_closed ? "]" : ")");
    } else {
        s += "inf)";
    }
    return s;
}

template <Scalar T>
Json run_almost_linear(const AlmostLinearPayload& p, const RunOptions& options) {
    std::vector<Side> ls, gs;
    for (const auto& s : p.loss_sides) ls.push_back(s == "left" ? Side::Left : Side::Right);
    for (const auto& s : p.gain_sides) gs.push_back(s == "left" ? Side::Left : Side::Right);
    const AlmostLinearUtility<T> u(p.wealth.template as<T>(), to_scalars<T>(p.loss_breakpoints),
                                   to_scalars<T>(p.loss_slopes), to_scalars<T>(p.gain_breakpoints),
                                   to_scalars<T>(p.gain_slopes), ls, gs);

    Json out;
    Json events = Json::array();
    for (const auto& e : derive_state_profile(u).events) {
        events.push_back(Json{{"label", e.label}, {"interval", interval_text(e)}, {"slope", num(e.slope)}});
    }
    out["events"] = std::move(events);

    Json bps = Json::array();
    for (int k : u.interior_breakpoints()) {
        const BreakpointInfo<T> info = u.breakpoint(k);
        const T delta = options.delta ? from_rational<T>(*options.delta) : default_perturbation(u, k);
        bps.push_back(Json{{"index", k},
                           {"location", num(info.location)},
                           {"side", std::string(to_string(info.side))},
                           {"value", num(u.evaluate(info.location))},
                           {"delta", num(delta)},
                           {"attitude", std::string(to_string(risk_attitude_at_breakpoint(u, k, delta)))},
                           {"certainty_equivalent", num(perturbation_certainty_equivalent(u, k, delta))}});
    }
    out["breakpoints"] = std::move(bps);

    if (p.evaluate_at) {
        Json evals = Json::array();
        for (const T& x : to_scalars<T>(*p.evaluate_at)) evals.push_back(Json{{"x", num(x)}, {"utility", num(u.evaluate(x))}});
        out["evaluations"] = std::move(evals);
    }
    return out;
}

template <Scalar T>
Json run_ambiguity(const AmbiguityPayload& p) {
    std::vector<std::vector<T>> sets;
    for (const auto& c : p.candidates) sets.push_back(to_scalars<T>(c));
    const GeneralizedPora<T> g(std::move(sets), ProbabilityVector<T>(to_scalars<T>(p.probs)));
    std::vector<SignSlopes<T>> slopes;
    for (const auto& pair : p.profile) slopes.push_back({pair[0].template as<T>(), pair[1].template as<T>()});
    const SignDependentProfile<T> sp(std::move(slopes));

    const Pora<T> m = min_pora(g);
    Json out;
    out["min_pora"] = Json{{"returns", nums(m.returns().entries())}, {"probs", nums(m.probs().entries())}};
    out["min_expected_utility"] = num(min_expected_utility(sp, g));
    return out;
}

Json tally_json(const SuiteTally& t) {
    return Json{{"checked", t.checked}, {"failed", t.failed}, {"result", pass_fail(t.passed())}};
}

Json run_verify(const VerifyPayload& p, const RunOptions& options) {
    const ReturnVector<Rational> x(to_scalars<Rational>(p.returns));
    const GridSuiteReport r =
        verify_grid_suite(x, static_cast<int>(p.denominator), static_cast<std::size_t>(p.samples),
                          static_cast<std::size_t>(p.budget), options.seed);

    std::string summary = "Prop1: " + pass_fail(r.prop1_passed());
    Json out;
    out["grid_size"] = r.grid_size;
    out["prop1"] = Json{{"forward", tally_json(r.prop1_forward)},
                        {"reverse", tally_json(r.prop1_reverse)},
                        {"result", pass_fail(r.prop1_passed())}};
    if (x.size() >= 3) {
        out["prop2a"] = tally_json(r.prop2a);
        summary += ", Prop2a: " + pass_fail(r.prop2a.passed());
    } else {
        out["prop2a"] = "skipped: needs at least 3 states";
    }
    if (x.size() == 3) {
        out["prop2b"] = tally_json(r.prop2b);
        summary += ", Prop2b: " + pass_fail(r.prop2b.passed());
    } else {
        out["prop2b"] = "skipped: defined for exactly 3 states";
    }
    out["summary"] = summary;
    if (!r.passed()) detail::fail_internal("verification suite failed: " + summary);
    return out;
}

template <Scalar T>
Json dispatch(const ScenarioDocument& doc, const RunOptions& options) {
    return std::visit(
        [&](const auto& p) -> Json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PoraEvalPayload>) return run_pora_eval<T>(p);
            else if constexpr (std::is_same_v<P, DominancePayload>) return run_dominance<T>(p);
            else if constexpr (std::is_same_v<P, SpreadPayload>) return run_spread<T>(p, options);
            else if constexpr (std::is_same_v<P, InsurancePayload>) return run_insurance<T>(p, options);
            else if constexpr (std::is_same_v<P, AlmostLinearPayload>) return run_almost_linear<T>(p, options);
            else if constexpr (std::is_same_v<P, AmbiguityPayload>) return run_ambiguity<T>(p);
            else return run_verify(p, options);
        },
        doc.payload);
}

// ---------------------------------------------------------------------------
// Text rendering

bool is_number_node(const Json& j) {
    return j.is_object() && j.contains("decimal") && j.size() <= 2 && (j.size() == 1 || j.contains("rational"));
}

std::string scalar_text(const Json& j) {
    if (is_number_node(j)) {
        const std::string decimal = to_decimal_string(j["decimal"].get<double>());
        if (!j.contains("rational")) return decimal;
        const auto rational = j["rational"].get<std::string>();
        return rational.find('/') == std::string::npos ? rational : rational + " (" + decimal + ")";
    }
    if (j.is_number_float()) return to_decimal_string(j.get<double>());
    if (j.is_string()) return j.get<std::string>();
    if (j.is_null()) return "none";
    return j.dump();
}

bool is_inline(const Json& j) {
    if (j.is_array()) {
        return std::all_of(j.begin(), j.end(), [](const Json& e) { return !e.is_structured() || is_number_node(e); });
    }
    return !j.is_structured() || is_number_node(j);
}

std::string inline_text(const Json& j) {
    if (!j.is_array()) return scalar_text(j);
    std::string s = "[";
    for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + scalar_text(j[i]);
    return s + "]";
}

void render_text(std::ostream& os, const Json& j, int indent) {
    const std::string pad(static_cast<std::size_t>(indent), ' ');
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (is_inline(it.value())) {
                os << pad << it.key() << ": " << inline_text(it.value()) << "\n";
            } else {
                os << pad << it.key() << ":\n";
                render_text(os, it.value(), indent + 2);
            }
        }
    } else if (j.is_array()) {
        for (const Json& e : j) {
            if (is_inline(e)) {
                os << pad << "- " << inline_text(e) << "\n";
            } else {
                os << pad << "-\n";
                render_text(os, e, indent + 2);
            }
        }
    } else {
        os << pad << scalar_text(j) << "\n";
    }
}

}  // namespace

Report run_command(const ScenarioDocument& doc, const RunOptions& options) {
    const bool exact = options.exact || doc.uses_rationals() || doc.kind() == Kind::Verify;
    Report report;
    report.body["kind"] = std::string(to_string(doc.kind()));
    report.body["label"] = doc.label;
    report.body["backend"] = exact ? "exact" : "float";
    report.body["seed"] = options.seed;
    report.body["input"] = Json::parse(serialize_scenario(doc));
    report.body["results"] = exact ? dispatch<Rational>(doc, options) : dispatch<double>(doc, options);
    return report;
}

std::string render(const Report& report, OutputFormat format) {
    if (format == OutputFormat::Json) return report.body.dump(2) + "\n";
    std::ostringstream os;
    render_text(os, report.body, 0);
    return os.str();
}

}  // namespace linutil::cli
