#include "linutil/scenario.hpp"

#include "linutil/almost_linear.hpp"
#include "linutil/ambiguity.hpp"
#include "linutil/error.hpp"
#include "linutil/insurance.hpp"
#include "linutil/stochastic.hpp"

#include <json.hpp>

#include <array>
#include <istream>
#include <iterator>
#include <set>

namespace linutil::cli {

using Json = nlohmann::ordered_json;

namespace {

constexpr std::array<std::string_view, 7> kKindNames{"pora_eval", "dominance", "spread", "insurance",
                                                     "almost_linear", "ambiguity", "verify"};
constexpr std::array<std::string_view, 7> kCommands{"eval", "dominance", "spread", "insure",
                                                    "almost", "ambiguity", "verify"};

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
    detail::fail_validation("schema error: field '" + field + "': " + what);
}

std::string observed(const Json& j) {
    std::string text = j.dump();
    if (text.size() > 60) text = text.substr(0, 57) + "...";
    return text;
}

// ---------------------------------------------------------------------------
// JSON -> fields

class ObjectReader {
public:
    ObjectReader(const Json& object, std::string path) : object_(object), path_(std::move(path)) {
        if (!object_.is_object()) detail::fail_validation("schema error: '" + display() + "' must be an object");
    }

    std::string field_path(std::string_view name) const {
        return path_.empty() ? std::string(name) : path_ + "." + std::string(name);
    }

    bool has(std::string_view name) const { return object_.contains(std::string(name)); }

    const Json& at(std::string_view name) {
        seen_.insert(std::string(name));
        if (!object_.contains(std::string(name))) field_error(field_path(name), "required field is missing");
        return object_.at(std::string(name));
    }

    Number number(std::string_view name) { return to_number(at(name), field_path(name)); }

    std::optional<Number> optional_number(std::string_view name) {
        if (!has(name)) return std::nullopt;
        return number(name);
    }

    NumberList numbers(std::string_view name) { return to_numbers(at(name), field_path(name)); }

    std::optional<NumberList> optional_numbers(std::string_view name) {
        if (!has(name)) return std::nullopt;
        return numbers(name);
    }

    std::int64_t integer(std::string_view name, std::int64_t fallback, std::int64_t min_value) {
        if (!has(name)) return fallback;
        const Json& j = at(name);
        if (!j.is_number_integer()) field_error(field_path(name), "expected an integer, observed " + observed(j));
        const auto v = j.get<std::int64_t>();
        if (v < min_value) {
            field_error(field_path(name),
                        "must be >= " + std::to_string(min_value) + ", observed " + std::to_string(v));
        }
        return v;
    }

    std::string string(std::string_view name, std::string fallback) {
        if (!has(name)) return fallback;
        const Json& j = at(name);
        if (!j.is_string()) field_error(field_path(name), "expected a string, observed " + observed(j));
        return j.get<std::string>();
    }

    /// Rejects fields that were never read.
    void finish() const {
        for (auto it = object_.begin(); it != object_.end(); ++it) {
            if (!seen_.contains(it.key())) field_error(field_path(it.key()), "unknown field");
        }
    }

    static Number to_number(const Json& j, const std::string& path) {
        if (j.is_number()) return Number(j.get<double>());
        if (j.is_string()) {
            try {
                return Number(parse_rational(j.get<std::string>()));
            } catch (const ValidationError& e) {
                field_error(path, e.what());
            }
        }
        field_error(path, "expected a number or an \"a/b\" string, observed " + observed(j));
    }

    static NumberList to_numbers(const Json& j, const std::string& path) {
        if (!j.is_array()) field_error(path, "expected an array of numbers, observed " + observed(j));
        NumberList out;
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_number(j[i], path + "[" + std::to_string(i) + "]"));
        return out;
    }

private:
    std::string display() const { return path_.empty() ? "document" : path_; }

    const Json& object_;
    std::string path_;
    std::set<std::string> seen_;
};

std::vector<std::string> read_sides(ObjectReader& r, std::string_view name) {
    const std::string path = r.field_path(name);
    const Json& j = r.at(name);
    if (!j.is_array()) field_error(path, "expected an array of \"left\"/\"right\", observed " + observed(j));
    std::vector<std::string> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_string() || (j[i] != "left" && j[i] != "right")) {
            field_error(path + "[" + std::to_string(i) + "]", "expected \"left\" or \"right\", observed " + observed(j[i]));
        }
        out.push_back(j[i].get<std::string>());
    }
    return out;
}

PoraFields read_pora(ObjectReader& r) { return {r.numbers("returns"), r.numbers("probs")}; }

ProfiledPora read_profiled(ObjectReader& r) {
    ProfiledPora out;
    out.profile = r.numbers("profile");
    out.pora = read_pora(r);
    return out;
}

Payload read_payload(Kind kind, ObjectReader& r) {
    switch (kind) {
        case Kind::PoraEval: {
            PoraEvalPayload p;
            p.subject = read_profiled(r);
            if (r.has("compare")) {
                ObjectReader sub(r.at("compare"), r.field_path("compare"));
                p.compare = read_profiled(sub);
                sub.finish();
            }
            return p;
        }
        case Kind::Dominance: {
            DominancePayload p;
            ObjectReader a(r.at("a"), "a");
            p.a = read_pora(a);
            a.finish();
            ObjectReader b(r.at("b"), "b");
            p.b = read_pora(b);
            b.finish();
            return p;
        }
        case Kind::Spread: {
            SpreadPayload p;
            p.returns = r.numbers("returns");
            p.p = r.numbers("p");
            p.q = r.numbers("q");
            p.profile = r.optional_numbers("profile");
            if (r.has("samples")) p.samples = r.integer("samples", 0, 0);
            return p;
        }
        case Kind::Insurance: {
            InsurancePayload p;
            p.wealth = r.number("wealth");
            p.loss = r.number("loss");
            p.loss_prob = r.number("loss_prob");
            p.u1 = r.number("u1");
            p.u2 = r.number("u2");
            p.u3 = r.optional_number("u3");
            p.invest_return = r.optional_number("invest_return");
            if (r.has("diversification")) {
                ObjectReader sub(r.at("diversification"), "diversification");
                p.diversification = DiversificationFields{sub.number("amount"), sub.number("u1"), sub.number("u2"),
                                                          sub.number("u3")};
                sub.finish();
            }
            return p;
        }
        case Kind::AlmostLinear: {
            AlmostLinearPayload p;
            p.wealth = r.number("wealth");
            p.loss_breakpoints = r.numbers("loss_breakpoints");
            p.loss_slopes = r.numbers("loss_slopes");
            p.gain_breakpoints = r.numbers("gain_breakpoints");
            p.gain_slopes = r.numbers("gain_slopes");
            p.loss_sides = read_sides(r, "loss_sides");
            p.gain_sides = read_sides(r, "gain_sides");
            p.evaluate_at = r.optional_numbers("evaluate_at");
            return p;
        }
        case Kind::Ambiguity: {
            AmbiguityPayload p;
            const Json& cands = r.at("candidates");
            if (!cands.is_array()) field_error("candidates", "expected an array of arrays, observed " + observed(cands));
            for (std::size_t i = 0; i < cands.size(); ++i) {
                p.candidates.push_back(ObjectReader::to_numbers(cands[i], "candidates[" + std::to_string(i) + "]"));
            }
            p.probs = r.numbers("probs");
            const Json& prof = r.at("profile");
            if (!prof.is_array()) field_error("profile", "expected an array of [loss, gain] pairs, observed " + observed(prof));
            for (std::size_t i = 0; i < prof.size(); ++i) {
                const std::string path = "profile[" + std::to_string(i) + "]";
                NumberList pair = ObjectReader::to_numbers(prof[i], path);
                if (pair.size() != 2) field_error(path, "expected [loss slope, gain slope], observed " + observed(prof[i]));
                p.profile.push_back(std::move(pair));
            }
            return p;
        }
        case Kind::Verify: {
            VerifyPayload p;
            p.returns = r.numbers("returns");
            p.denominator = r.integer("denominator", 6, 2);
            p.samples = r.integer("samples", 200, 0);
            p.budget = r.integer("budget", static_cast<std::int64_t>(kDefaultSearchBudget), 1);
            return p;
        }
    }
    detail::fail_internal("unhandled kind");
}

// ---------------------------------------------------------------------------
// Semantic validation: build the library objects once in the document's
// backend, prefixing failures with the field they came from.

template <class F>
void check_field(const std::string& field, F&& build) {
    try {
        build();
    } catch (const ValidationError& e) {
        field_error(field, e.what());
    } catch (const PreconditionError& e) {
        field_error(field, e.what());
    }
}

Side parse_side(const std::string& s) { return s == "left" ? Side::Left : Side::Right; }

template <Scalar T>
void validate_pora(const PoraFields& f, const std::string& prefix) {
    check_field(prefix + "returns", [&] { ReturnVector<T>(to_scalars<T>(f.returns)); });
    check_field(prefix + "probs", [&] { ProbabilityVector<T>(to_scalars<T>(f.probs)); });
    check_field(prefix + "returns", [&] { Pora<T>(to_scalars<T>(f.returns), to_scalars<T>(f.probs)); });
}

template <Scalar T>
void validate_profiled(const ProfiledPora& f, const std::string& prefix) {
    validate_pora<T>(f.pora, prefix);
    check_field(prefix + "profile", [&] {
        const LinearUtilityProfile<T> u(to_scalars<T>(f.profile));
        if (u.size() != f.pora.returns.size()) detail::fail_validation("profile and returns differ in length");
    });
}

template <Scalar T>
void validate_increasing(const NumberList& returns, const std::string& field, std::size_t min_states) {
    check_field(field, [&] {
        const ReturnVector<T> x(to_scalars<T>(returns));
        if (x.size() < min_states) {
            detail::fail_validation("needs at least " + std::to_string(min_states) + " states");
        }
        if (!x.strictly_increasing()) detail::fail_validation("returns must be strictly increasing");
    });
}

template <Scalar T>
void validate_payload(const Payload& payload) {
    std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PoraEvalPayload>) {
                validate_profiled<T>(p.subject, "");
                if (p.compare) validate_profiled<T>(*p.compare, "compare.");
            } else if constexpr (std::is_same_v<P, DominancePayload>) {
                validate_pora<T>(p.a, "a.");
                validate_pora<T>(p.b, "b.");
            } else if constexpr (std::is_same_v<P, SpreadPayload>) {
                validate_increasing<T>(p.returns, "returns", 3);
                check_field("p", [&] { ProbabilityVector<T>(to_scalars<T>(p.p)); });
                check_field("q", [&] { ProbabilityVector<T>(to_scalars<T>(p.q)); });
                if (p.p.size() != p.returns.size()) field_error("p", "length differs from returns");
                if (p.q.size() != p.returns.size()) field_error("q", "length differs from returns");
                if (p.profile) {
                    check_field("profile", [&] {
                        const LinearUtilityProfile<T> u(to_scalars<T>(*p.profile));
                        if (u.size() != p.returns.size()) detail::fail_validation("length differs from returns");
                    });
                }
            } else if constexpr (std::is_same_v<P, InsurancePayload>) {
                check_field("loss", [&] {
                    auto opt = [](const std::optional<Number>& n) {
                        return n ? std::optional<T>(n->template as<T>()) : std::nullopt;
                    };
                    InsuranceScenario<T>(p.wealth.template as<T>(), p.loss.template as<T>(),
                                         p.loss_prob.template as<T>(), p.u1.template as<T>(),
                                         p.u2.template as<T>(), opt(p.u3), opt(p.invest_return));
                });
                if (p.diversification) {
                    const auto& d = *p.diversification;
                    check_field("diversification", [&] {
                        diversification_comparison(p.wealth.template as<T>(), d.amount.template as<T>(),
                                                   p.loss_prob.template as<T>(), d.u1.template as<T>(),
                                                   d.u2.template as<T>(), d.u3.template as<T>());
                    });
                }
            } else if constexpr (std::is_same_v<P, AlmostLinearPayload>) {
                check_field("almost_linear", [&] {
                    std::vector<Side> ls, gs;
                    for (const auto& s : p.loss_sides) ls.push_back(parse_side(s));
                    for (const auto& s : p.gain_sides) gs.push_back(parse_side(s));
                    AlmostLinearUtility<T>(p.wealth.template as<T>(), to_scalars<T>(p.loss_breakpoints),
                                           to_scalars<T>(p.loss_slopes), to_scalars<T>(p.gain_breakpoints),
                                           to_scalars<T>(p.gain_slopes), ls, gs);
                });
                if (p.evaluate_at) {
                    for (const auto& n : *p.evaluate_at) {
                        if (n.template as<T>() < -p.wealth.template as<T>()) {
                            field_error("evaluate_at", "amounts must be >= -wealth");
                        }
                    }
                }
            } else if constexpr (std::is_same_v<P, AmbiguityPayload>) {
                check_field("probs", [&] { ProbabilityVector<T>(to_scalars<T>(p.probs)); });
                check_field("candidates", [&] {
                    std::vector<std::vector<T>> sets;
                    for (const auto& c : p.candidates) sets.push_back(to_scalars<T>(c));
                    GeneralizedPora<T>(std::move(sets), ProbabilityVector<T>(to_scalars<T>(p.probs)));
                });
                check_field("profile", [&] {
                    std::vector<SignSlopes<T>> slopes;
                    for (const auto& pair : p.profile) slopes.push_back({pair[0].template as<T>(), pair[1].template as<T>()});
                    const SignDependentProfile<T> sp(std::move(slopes));
                    if (sp.size() != p.probs.size()) detail::fail_validation("length differs from probs");
                });
            } else if constexpr (std::is_same_v<P, VerifyPayload>) {
                validate_increasing<T>(p.returns, "returns", 2);
                if (p.denominator < static_cast<std::int64_t>(p.returns.size())) {
                    field_error("denominator", "must be >= the number of states, observed " +
                                                   std::to_string(p.denominator));
                }
            }
        },
        payload);
}

// ---------------------------------------------------------------------------
// fields -> JSON

Json number_json(const Number& n) {
    if (n.is_rational()) return to_rational_string(std::get<Rational>(n.raw()));
    return std::get<double>(n.raw());
}

Json numbers_json(const NumberList& list) {
    Json out = Json::array();
    for (const auto& n : list) out.push_back(number_json(n));
    return out;
}

void write_pora(Json& out, const PoraFields& f) {
    out["returns"] = numbers_json(f.returns);
    out["probs"] = numbers_json(f.probs);
}

void write_profiled(Json& out, const ProfiledPora& f) {
    out["profile"] = numbers_json(f.profile);
    write_pora(out, f.pora);
}

bool any_rational(const NumberList& list) {
    return std::any_of(list.begin(), list.end(), [](const Number& n) { return n.is_rational(); });
}

bool any_rational(const std::optional<Number>& n) { return n && n->is_rational(); }
bool any_rational(const std::optional<NumberList>& list) { return list && any_rational(*list); }

}  // namespace

std::string_view to_string(Kind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::string_view command_for(Kind kind) { return kCommands[static_cast<std::size_t>(kind)]; }

bool ScenarioDocument::uses_rationals() const {
    return std::visit(
        [](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PoraEvalPayload>) {
                auto profiled = [](const ProfiledPora& f) {
                    return any_rational(f.profile) || any_rational(f.pora.returns) || any_rational(f.pora.probs);
                };
                return profiled(p.subject) || (p.compare && profiled(*p.compare));
            } else if constexpr (std::is_same_v<P, DominancePayload>) {
                return any_rational(p.a.returns) || any_rational(p.a.probs) || any_rational(p.b.returns) ||
                       any_rational(p.b.probs);
            } else if constexpr (std::is_same_v<P, SpreadPayload>) {
                return any_rational(p.returns) || any_rational(p.p) || any_rational(p.q) || any_rational(p.profile);
            } else if constexpr (std::is_same_v<P, InsurancePayload>) {
                bool d = false;
                if (p.diversification) {
                    d = any_rational(NumberList{p.diversification->amount, p.diversification->u1,
                                                p.diversification->u2, p.diversification->u3});
                }
                return d || any_rational(NumberList{p.wealth, p.loss, p.loss_prob, p.u1, p.u2}) ||
                       any_rational(p.u3) || any_rational(p.invest_return);
            } else if constexpr (std::is_same_v<P, AlmostLinearPayload>) {
                return p.wealth.is_rational() || any_rational(p.loss_breakpoints) || any_rational(p.loss_slopes) ||
                       any_rational(p.gain_breakpoints) || any_rational(p.gain_slopes) ||
                       any_rational(p.evaluate_at);
            } else if constexpr (std::is_same_v<P, AmbiguityPayload>) {
                bool r = any_rational(p.probs);
                for (const auto& c : p.candidates) r = r || any_rational(c);
                for (const auto& c : p.profile) r = r || any_rational(c);
                return r;
            } else {
                return any_rational(p.returns);
            }
        },
        payload);
}

ScenarioDocument parse_scenario(std::string_view text) {
    Json root;
    try {
        root = Json::parse(text.begin(), text.end());
    } catch (const nlohmann::json::parse_error& e) {
        detail::fail_validation(std::string("malformed JSON: ") + e.what());
    }

    ObjectReader reader(root, "");
    const Json& kind_json = reader.at("kind");
    if (!kind_json.is_string()) field_error("kind", "expected a string, observed " + observed(kind_json));
    const auto name = kind_json.get<std::string>();
    const auto it = std::find(kKindNames.begin(), kKindNames.end(), name);
    if (it == kKindNames.end()) field_error("kind", "unknown kind '" + name + "'");
    const auto kind = static_cast<Kind>(std::distance(kKindNames.begin(), it));

    ScenarioDocument doc{reader.string("label", ""), read_payload(kind, reader)};
    reader.finish();

    if (doc.uses_rationals()) {
        validate_payload<Rational>(doc.payload);
    } else {
        validate_payload<double>(doc.payload);
    }
    return doc;
}

ScenarioDocument parse_scenario(std::istream& in) {
    const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    return parse_scenario(std::string_view(text));
}

std::string serialize_scenario(const ScenarioDocument& doc) {
    Json out;
    out["kind"] = std::string(to_string(doc.kind()));
    if (!doc.label.empty()) out["label"] = doc.label;
    std::visit(
        [&](const auto& p) {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, PoraEvalPayload>) {
                write_profiled(out, p.subject);
                if (p.compare) {
                    Json sub;
                    write_profiled(sub, *p.compare);
                    out["compare"] = std::move(sub);
                }
            } else if constexpr (std::is_same_v<P, DominancePayload>) {
                Json a, b;
                write_pora(a, p.a);
                write_pora(b, p.b);
                out["a"] = std::move(a);
                out["b"] = std::move(b);
            } else if constexpr (std::is_same_v<P, SpreadPayload>) {
                out["returns"] = numbers_json(p.returns);
                out["p"] = numbers_json(p.p);
                out["q"] = numbers_json(p.q);
                if (p.profile) out["profile"] = numbers_json(*p.profile);
                if (p.samples) out["samples"] = *p.samples;
            } else if constexpr (std::is_same_v<P, InsurancePayload>) {
                out["wealth"] = number_json(p.wealth);
                out["loss"] = number_json(p.loss);
                out["loss_prob"] = number_json(p.loss_prob);
                out["u1"] = number_json(p.u1);
                out["u2"] = number_json(p.u2);
                if (p.u3) out["u3"] = number_json(*p.u3);
                if (p.invest_return) out["invest_return"] = number_json(*p.invest_return);
                if (p.diversification) {
                    out["diversification"] = Json{{"amount", number_json(p.diversification->amount)},
                                                  {"u1", number_json(p.diversification->u1)},
                                                  {"u2", number_json(p.diversification->u2)},
                                                  {"u3", number_json(p.diversification->u3)}};
                }
            } else if constexpr (std::is_same_v<P, AlmostLinearPayload>) {
                out["wealth"] = number_json(p.wealth);
                out["loss_breakpoints"] = numbers_json(p.loss_breakpoints);
                out["loss_slopes"] = numbers_json(p.loss_slopes);
                out["gain_breakpoints"] = numbers_json(p.gain_breakpoints);
                out["gain_slopes"] = numbers_json(p.gain_slopes);
                out["loss_sides"] = p.loss_sides;
                out["gain_sides"] = p.gain_sides;
                if (p.evaluate_at) out["evaluate_at"] = numbers_json(*p.evaluate_at);
            } else if constexpr (std::is_same_v<P, AmbiguityPayload>) {
                Json cands = Json::array();
                for (const auto& c : p.candidates) cands.push_back(numbers_json(c));
                out["candidates"] = std::move(cands);
                out["probs"] = numbers_json(p.probs);
                Json prof = Json::array();
                for (const auto& c : p.profile) prof.push_back(numbers_json(c));
                out["profile"] = std::move(prof);
            } else if constexpr (std::is_same_v<P, VerifyPayload>) {
                out["returns"] = numbers_json(p.returns);
                out["denominator"] = p.denominator;
                out["samples"] = p.samples;
                out["budget"] = p.budget;
            }
        },
        doc.payload);
    return out.dump(2) + "\n";
}

}  // namespace linutil::cli
