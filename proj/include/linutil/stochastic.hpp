#pragma once

// Stochastic orders on PORAs sharing a strictly increasing return grid:
// first-order stochastic dominance (FSD), mean-preserving spreads (MPS), and
// profiles whose state utilities u_j x_j are increasing (and concave in x).
// The verify_* functions check the two characterization results
//   FSD  <=> Eu(x,p) > Eu(x,q) for every profile with u_j x_j increasing,
//   MPS   => Eu(x,p) > Eu(x,q) for every increasing-concave profile
//            (and the converse at L = 3 when p_2 != q_2),
// by sampling profiles, by the constructive counterexample used in the
// converse direction, and by bounded witness search.

#include "linutil/core.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace linutil {

/// 1-based SON indices i < j < k: mass leaves j and moves to the outer pair.
struct SpreadWitness {
    std::size_t i = 0;
    std::size_t j = 0;
    std::size_t k = 0;
    friend bool operator==(const SpreadWitness&, const SpreadWitness&) = default;
};

template <Scalar T>
struct DominanceVerdict {
    bool dominates = false;
    /// First threshold (ascending) where P{X > a} strictly exceeds P{Y > a};
    /// present iff `dominates`.
    std::optional<T> strict_at;
};

namespace detail {

template <Scalar T>
void require_increasing_grid(const ReturnVector<T>& x, std::size_t min_states) {
    if (x.size() < min_states) {
        fail_precondition("return grid needs at least " + std::to_string(min_states) + " states");
    }
    if (!x.strictly_increasing()) fail_precondition("returns must be strictly increasing");
}

template <Scalar T>
void require_matching(const ReturnVector<T>& x, const ProbabilityVector<T>& p, const ProbabilityVector<T>& q) {
    if (x.size() != p.size() || x.size() != q.size()) {
        fail_validation("returns and probability vectors differ in length");
    }
}

/// Cumulative difference C^p_j - C^q_j for j = 1..L-1 (0-based index j-1).
template <Scalar T>
std::vector<T> cumulative_differences(const ProbabilityVector<T>& p, const ProbabilityVector<T>& q) {
    std::vector<T> diffs;
    diffs.reserve(p.size() - 1);
    T cp(0), cq(0);
    for (std::size_t j = 0; j + 1 < p.size(); ++j) {
        cp += p[j];
        cq += q[j];
        diffs.push_back(cp - cq);
    }
    return diffs;
}

template <Scalar T>
T eu_difference(const LinearUtilityProfile<T>& u, const ReturnVector<T>& x, const ProbabilityVector<T>& p,
                const ProbabilityVector<T>& q) {
    return expected_utility(u, Pora<T>(x, p)) - expected_utility(u, Pora<T>(x, q));
}

/// Lays out state utilities v_j = u_j x_j with the given positive gaps
/// v_{j+1} - v_j and sign(v_j) == sign(x_j) for strictly increasing x.
///   - a zero return pins v = 0 there and fixes every other value;
///   - a sign change between states m and m+1 places v_m = -split * gap_m;
///   - all-positive grids start at v_1 = base, all-negative end at v_L = -base.
/// `split` must lie in (0, 1) and `base` must be positive.
template <Scalar T>
std::vector<T> anchor_products(const ReturnVector<T>& x, const std::vector<T>& gaps, const T& split,
                               const T& base) {
    const std::size_t n = x.size();
    std::vector<T> v(n, T(0));
    std::size_t anchor = 0;
    std::size_t negatives = 0;
    while (negatives < n && x[negatives] < T(0)) ++negatives;

    if (negatives < n && x[negatives] == T(0)) {
        anchor = negatives;
        v[anchor] = T(0);
    } else if (negatives == 0) {
        anchor = 0;
        v[0] = base;
    } else if (negatives == n) {
        anchor = n - 1;
        v[n - 1] = -base;
    } else {
        anchor = negatives - 1;
        v[anchor] = -split * gaps[anchor];
    }
    for (std::size_t j = anchor; j + 1 < n; ++j) v[j + 1] = v[j] + gaps[j];
    for (std::size_t j = anchor; j > 0; --j) v[j - 1] = v[j] - gaps[j - 1];
    return v;
}

/// Slopes u_j = v_j / x_j, with slope 1 at a zero return.
template <Scalar T>
LinearUtilityProfile<T> profile_from_products(const ReturnVector<T>& x, const std::vector<T>& v) {
    std::vector<T> slopes(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) slopes[j] = x[j] == T(0) ? T(1) : v[j] / x[j];
    return LinearUtilityProfile<T>(std::move(slopes));
}

template <Scalar T>
T random_fraction(std::mt19937_64& rng, int lo, int hi, int den) {
    std::uniform_int_distribution<int> dist(lo, hi);
    return ratio<T>(dist(rng), den);
}

}  // namespace detail

template <Scalar T>
DominanceVerdict<T> first_order_dominates(const Pora<T>& a, const Pora<T>& b) {
    std::vector<T> support;
    support.reserve(a.size() + b.size());
    for (const T& v : a.returns().entries()) support.push_back(v);
    for (const T& v : b.returns().entries()) support.push_back(v);
    std::sort(support.begin(), support.end());
    support.erase(std::unique(support.begin(), support.end()), support.end());

    // Upper-tail probabilities are step functions that only change at support
    // points, and both equal 1 below the support.
    DominanceVerdict<T> verdict;
    for (const T& alpha : support) {
        const int cmp = compare_values(tail_probability(a, alpha, Relation::Greater),
                                       tail_probability(b, alpha, Relation::Greater));
        if (cmp < 0) return {};
        if (cmp > 0 && !verdict.strict_at) verdict.strict_at = alpha;
    }
    verdict.dominates = verdict.strict_at.has_value();
    return verdict;
}

/// u_j x_j strictly increasing and strictly concave as a function of x:
/// u_j x_j > (1 - d) u_i x_i + d u_k x_k with d = (x_j - x_i) / (x_k - x_i)
/// for every i < j < k.
template <Scalar T>
bool is_increasing_concave(const LinearUtilityProfile<T>& u, const ReturnVector<T>& x) {
    detail::require_increasing_grid(x, 3);
    if (u.size() != x.size()) detail::fail_validation("profile and returns differ in length");
    const std::size_t n = x.size();
    std::vector<T> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = u[j] * x[j];

    for (std::size_t j = 0; j + 1 < n; ++j) {
        if (!definitely_less(v[j], v[j + 1])) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            for (std::size_t k = j + 1; k < n; ++k) {
                const T delta = (x[j] - x[i]) / (x[k] - x[i]);
                if (!definitely_greater(v[j], (T(1) - delta) * v[i] + delta * v[k])) return false;
            }
        }
    }
    return true;
}

/// Lexicographically first (i, j, k) showing (x, q) is a mean-preserving
/// spread of (x, p); nullopt when no triple qualifies or the means differ.
template <Scalar T>
std::optional<SpreadWitness> is_mean_preserving_spread(const ReturnVector<T>& x, const ProbabilityVector<T>& p,
                                                       const ProbabilityVector<T>& q) {
    detail::require_increasing_grid(x, 3);
    detail::require_matching(x, p, q);
    if (!approx_equal(expected_value(Pora<T>(x, p)), expected_value(Pora<T>(x, q)))) return std::nullopt;

    const std::size_t n = x.size();
    std::vector<int> change(n);
    for (std::size_t h = 0; h < n; ++h) change[h] = compare_values(q[h], p[h]);

    for (std::size_t i = 0; i < n; ++i) {
        if (change[i] <= 0) continue;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (change[j] >= 0) continue;
            for (std::size_t k = j + 1; k < n; ++k) {
                if (change[k] <= 0) continue;
                bool rest_equal = true;
                for (std::size_t h = 0; h < n && rest_equal; ++h) {
                    if (h != i && h != j && h != k && change[h] != 0) rest_equal = false;
                }
                if (rest_equal) return SpreadWitness{i + 1, j + 1, k + 1};
            }
        }
    }
    return std::nullopt;
}

/// Profile with u_j x_j strictly increasing for which Eu(x,p) - Eu(x,q) <= -3/2,
/// built when (x, p) does not first-order dominate (x, q). With
/// eta = min{C^p_j - C^q_j > 0}, the state-utility gap after state j is 2/eta
/// where the cumulative difference is positive and 1/(4L) elsewhere.
template <Scalar T>
LinearUtilityProfile<T> construct_adversarial_profile(const ReturnVector<T>& x, const ProbabilityVector<T>& p,
                                                      const ProbabilityVector<T>& q) {
    detail::require_increasing_grid(x, 2);
    detail::require_matching(x, p, q);
    if (first_order_dominates(Pora<T>(x, p), Pora<T>(x, q)).dominates) {
        detail::fail_precondition("(x, p) first-order dominates (x, q); no adversarial profile exists");
    }

    const std::vector<T> diffs = detail::cumulative_differences(p, q);
    std::optional<T> eta;
    for (const T& d : diffs) {
        if (definitely_greater(d, T(0)) && (!eta || d < *eta)) eta = d;
    }
    if (!eta) detail::fail_precondition("no state with a positive cumulative probability difference (p equals q)");

    const std::size_t n = x.size();
    const T wide = T(2) / *eta;
    const T narrow = T(1) / T(4 * static_cast<std::int64_t>(n));
    std::vector<T> gaps(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) gaps[j] = definitely_greater(diffs[j], T(0)) ? wide : narrow;

    // The all-positive anchor v_1 = x_1 gives u_1 = 1; all-negative gives u_L = 1.
    const T base = x[0] > T(0) ? x[0] : -x[n - 1];
    const std::vector<T> v = detail::anchor_products(x, gaps, ratio<T>(1, 2), base);
    LinearUtilityProfile<T> profile = detail::profile_from_products(x, v);

    const T margin = detail::eu_difference(profile, x, p, q);
    if (definitely_greater(margin, ratio<T>(-3, 2))) {
        detail::fail_internal("adversarial profile margin " + to_decimal_string(to_double(margin)) +
                              " exceeds -3/2");
    }
    return profile;
}

/// Random profile with u_j x_j strictly increasing (not necessarily concave).
template <Scalar T>
LinearUtilityProfile<T> random_increasing_profile(const ReturnVector<T>& x, std::mt19937_64& rng) {
    detail::require_increasing_grid(x, 2);
    std::vector<T> gaps(x.size() - 1);
    for (T& g : gaps) g = detail::random_fraction<T>(rng, 1, 200, 20);
    const T split = detail::random_fraction<T>(rng, 1, 19, 20);
    const T base = detail::random_fraction<T>(rng, 1, 100, 10);
    return detail::profile_from_products(x, detail::anchor_products(x, gaps, split, base));
}

/// Random increasing-concave profile: strictly decreasing positive slopes of
/// the state utility per unit of x, anchored to match the signs of x.
template <Scalar T>
LinearUtilityProfile<T> random_increasing_concave_profile(const ReturnVector<T>& x, std::mt19937_64& rng) {
    detail::require_increasing_grid(x, 3);
    const std::size_t n = x.size();
    std::vector<T> slopes(n - 1);
    slopes[n - 2] = detail::random_fraction<T>(rng, 1, 40, 20);
    for (std::size_t j = n - 2; j > 0; --j) slopes[j - 1] = slopes[j] + detail::random_fraction<T>(rng, 1, 40, 20);

    std::vector<T> gaps(n - 1);
    for (std::size_t j = 0; j + 1 < n; ++j) gaps[j] = slopes[j] * (x[j + 1] - x[j]);
    const T split = detail::random_fraction<T>(rng, 1, 19, 20);
    const T base = detail::random_fraction<T>(rng, 1, 100, 10);
    LinearUtilityProfile<T> profile = detail::profile_from_products(x, detail::anchor_products(x, gaps, split, base));
    if (!is_increasing_concave(profile, x)) detail::fail_internal("generated profile is not increasing-concave");
    return profile;
}

template <Scalar T>
LinearUtilityProfile<T> random_increasing_concave_profile(const ReturnVector<T>& x, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    return random_increasing_concave_profile(x, rng);
}

// ---------------------------------------------------------------------------
// Verifiers

enum class Prop1Direction { Forward, Reverse, DegenerateEqual };

inline std::string_view to_string(Prop1Direction d) {
    switch (d) {
        case Prop1Direction::Forward: return "forward";
        case Prop1Direction::Reverse: return "reverse";
        case Prop1Direction::DegenerateEqual: return "degenerate-equal";
    }
    return "?";
}

template <Scalar T>
struct Prop1Report {
    Prop1Direction direction = Prop1Direction::Forward;
    std::size_t samples = 0;
    /// Extremes of Eu(x,p) - Eu(x,q) over the evaluated profiles.
    std::optional<T> min_margin;
    std::optional<T> max_margin;
    std::optional<LinearUtilityProfile<T>> adversarial;
    bool passed = false;
};

template <Scalar T>
struct Prop2aReport {
    SpreadWitness witness;
    std::size_t samples = 0;
    std::optional<T> min_margin;
    bool passed = false;
};

template <Scalar T>
struct Prop2bReport {
    bool is_spread = false;
    std::optional<Prop2aReport<T>> delegated;
    std::size_t evaluated = 0;
    std::optional<LinearUtilityProfile<T>> witness;
    std::optional<T> witness_margin;
    bool passed = false;
};

namespace detail {

template <Scalar T>
void track(std::optional<T>& lo, std::optional<T>& hi, const T& value) {
    if (!lo || value < *lo) lo = value;
    if (!hi || *hi < value) hi = value;
}

}  // namespace detail

/// If (x,p) FSD (x,q), samples profiles with u_j x_j increasing and requires
/// Eu(x,p) > Eu(x,q) for each; otherwise builds the adversarial profile and
/// requires Eu(x,p) - Eu(x,q) <= -3/2. Identical p and q are reported as the
/// degenerate case (every profile gives a zero difference).
template <Scalar T>
Prop1Report<T> verify_prop1(const ReturnVector<T>& x, const ProbabilityVector<T>& p, const ProbabilityVector<T>& q,
                            std::size_t sample_count, std::uint64_t seed) {
    detail::require_increasing_grid(x, 2);
    detail::require_matching(x, p, q);
    Prop1Report<T> report;

    if (first_order_dominates(Pora<T>(x, p), Pora<T>(x, q)).dominates) {
        report.direction = Prop1Direction::Forward;
        std::mt19937_64 rng(seed);
        bool all_strict = true;
        for (std::size_t s = 0; s < sample_count; ++s) {
            const T margin = detail::eu_difference(random_increasing_profile(x, rng), x, p, q);
            detail::track(report.min_margin, report.max_margin, margin);
            if (!definitely_greater(margin, T(0))) all_strict = false;
        }
        report.samples = sample_count;
        report.passed = all_strict;
        return report;
    }

    bool has_positive_difference = false;
    for (const T& d : detail::cumulative_differences(p, q)) {
        if (definitely_greater(d, T(0))) has_positive_difference = true;
    }
    if (!has_positive_difference) {
        // Not FSD-ordered and no positive cumulative difference: p equals q.
        report.direction = Prop1Direction::DegenerateEqual;
        const LinearUtilityProfile<T> flat(std::vector<T>(x.size(), T(1)));
        const T margin = detail::eu_difference(flat, x, p, q);
        detail::track(report.min_margin, report.max_margin, margin);
        report.samples = 1;
        report.passed = approx_equal(margin, T(0));
        return report;
    }

    report.direction = Prop1Direction::Reverse;
    LinearUtilityProfile<T> profile = construct_adversarial_profile(x, p, q);
    const T margin = detail::eu_difference(profile, x, p, q);
    detail::track(report.min_margin, report.max_margin, margin);
    report.samples = 1;
    report.passed = !definitely_greater(margin, ratio<T>(-3, 2));
    report.adversarial = std::move(profile);
    return report;
}

template <Scalar T>
Prop2aReport<T> verify_prop2a(const ReturnVector<T>& x, const ProbabilityVector<T>& p,
                              const ProbabilityVector<T>& q, std::size_t sample_count, std::uint64_t seed) {
    const std::optional<SpreadWitness> witness = is_mean_preserving_spread(x, p, q);
    if (!witness) detail::fail_precondition("(x, q) is not a mean-preserving spread of (x, p)");

    Prop2aReport<T> report;
    report.witness = *witness;
    std::mt19937_64 rng(seed);
    bool all_strict = true;
    for (std::size_t s = 0; s < sample_count; ++s) {
        const T margin = detail::eu_difference(random_increasing_concave_profile(x, rng), x, p, q);
        if (!report.min_margin || margin < *report.min_margin) report.min_margin = margin;
        if (!definitely_greater(margin, T(0))) all_strict = false;
    }
    report.samples = sample_count;
    report.passed = all_strict;
    return report;
}

inline constexpr std::size_t kDefaultSearchBudget = 1000;

/// Converse check at L = 3. For an equal-mean pair with p_2 != q_2 that is not
/// a mean-preserving spread, searches increasing-concave profiles (a 10 x 10
/// grid of concavity and tilt levels, then random draws) for one with
/// Eu(x,p) <= Eu(x,q). Spread pairs are handed to verify_prop2a.
template <Scalar T>
Prop2bReport<T> verify_prop2b(const ReturnVector<T>& x, const ProbabilityVector<T>& p,
                              const ProbabilityVector<T>& q, std::size_t search_budget = kDefaultSearchBudget,
                              std::uint64_t seed = 0) {
    detail::require_matching(x, p, q);
    if (x.size() != 3) detail::fail_precondition("the converse check is defined for exactly 3 states");
    detail::require_increasing_grid(x, 3);
    if (!approx_equal(expected_value(Pora<T>(x, p)), expected_value(Pora<T>(x, q)))) {
        detail::fail_precondition("E(x, p) and E(x, q) differ");
    }
    if (approx_equal(p[1], q[1])) detail::fail_precondition("p_2 equals q_2");

    Prop2bReport<T> report;
    if (is_mean_preserving_spread(x, p, q)) {
        report.is_spread = true;
        report.delegated = verify_prop2a(x, p, q, search_budget, seed);
        report.evaluated = report.delegated->samples;
        report.passed = report.delegated->passed;
        return report;
    }

    auto try_profile = [&](LinearUtilityProfile<T> u) {
        ++report.evaluated;
        const T margin = detail::eu_difference(u, x, p, q);
        if (!definitely_greater(margin, T(0))) {
            report.witness = std::move(u);
            report.witness_margin = margin;
            return true;
        }
        return false;
    };

    for (int concavity = 1; concavity <= 10 && report.evaluated < search_budget; ++concavity) {
        for (int tilt = 1; tilt <= 10 && report.evaluated < search_budget; ++tilt) {
            const T outer = ratio<T>(tilt, 4);
            const T inner = outer + ratio<T>(concavity, 4);
            std::vector<T> gaps{inner * (x[1] - x[0]), outer * (x[2] - x[1])};
            const auto v = detail::anchor_products(x, gaps, ratio<T>(1, 2), T(1));
            if (try_profile(detail::profile_from_products(x, v))) {
                report.passed = true;
                return report;
            }
        }
    }
    std::mt19937_64 rng(seed);
    while (report.evaluated < search_budget) {
        if (try_profile(random_increasing_concave_profile(x, rng))) {
            report.passed = true;
            return report;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------
// Grid sweeps

/// Every strictly positive probability vector of length `states` whose
/// entries are multiples of 1/denominator, in lexicographic order.
template <Scalar T>
std::vector<ProbabilityVector<T>> probability_grid(std::size_t states, int denominator) {
    if (states < 2) detail::fail_validation("grid needs at least 2 states");
    if (denominator < static_cast<int>(states)) detail::fail_validation("denominator smaller than the state count");
    std::vector<ProbabilityVector<T>> out;
    std::vector<int> counts(states, 1);
    // Enumerate compositions of `denominator` into `states` positive parts.
    auto recurse = [&](auto&& self, std::size_t pos, int remaining) -> void {
        if (pos + 1 == states) {
            counts[pos] = remaining;
            std::vector<T> entries;
            entries.reserve(states);
            for (int c : counts) entries.push_back(ratio<T>(c, denominator));
            out.emplace_back(std::move(entries));
            return;
        }
        const int slots_after = static_cast<int>(states - pos - 1);
        for (int c = 1; c <= remaining - slots_after; ++c) {
            counts[pos] = c;
            self(self, pos + 1, remaining - c);
        }
    };
    recurse(recurse, 0, denominator);
    return out;
}

struct SuiteTally {
    std::size_t checked = 0;
    std::size_t failed = 0;
    bool passed() const { return failed == 0; }
};

struct GridSuiteReport {
    std::size_t grid_size = 0;
    SuiteTally prop1_forward;
    SuiteTally prop1_reverse;
    SuiteTally prop2a;
    SuiteTally prop2b;
    bool prop1_passed() const { return prop1_forward.passed() && prop1_reverse.passed(); }
    bool passed() const { return prop1_passed() && prop2a.passed() && prop2b.passed(); }
};

/// Runs every verifier over all ordered pairs of the probability grid on x.
/// The converse spread check only applies when x has 3 states.
template <Scalar T>
GridSuiteReport verify_grid_suite(const ReturnVector<T>& x, int denominator, std::size_t samples,
                                  std::size_t search_budget, std::uint64_t seed) {
    detail::require_increasing_grid(x, 2);
    const auto grid = probability_grid<T>(x.size(), denominator);
    GridSuiteReport report;
    report.grid_size = grid.size();
    std::uint64_t pair_index = 0;
    for (const auto& p : grid) {
        for (const auto& q : grid) {
            const std::uint64_t pair_seed = seed + pair_index++;
            if (p == q) continue;
            const auto r1 = verify_prop1(x, p, q, samples, pair_seed);
            SuiteTally& t1 = r1.direction == Prop1Direction::Forward ? report.prop1_forward : report.prop1_reverse;
            ++t1.checked;
            if (!r1.passed) ++t1.failed;

            if (x.size() < 3) continue;
            if (is_mean_preserving_spread(x, p, q)) {
                ++report.prop2a.checked;
                if (!verify_prop2a(x, p, q, samples, pair_seed).passed) ++report.prop2a.failed;
            }
            if (x.size() == 3 && approx_equal(expected_value(Pora<T>(x, p)), expected_value(Pora<T>(x, q))) &&
                !approx_equal(p[1], q[1]) && !is_mean_preserving_spread(x, p, q)) {
                ++report.prop2b.checked;
                if (!verify_prop2b(x, p, q, search_budget, pair_seed).passed) ++report.prop2b.failed;
            }
        }
    }
    return report;
}

}  // namespace linutil
