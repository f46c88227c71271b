#pragma once

// Test-side reference computations. Each one is written independently of the
// library code it checks: plain loops over the defining formulas, no shared
// helpers beyond the Rational type.

#include "linutil/numeric.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace oracle {

using linutil::Rational;

template <class T>
T sum_products(const std::vector<T>& a, const std::vector<T>& b, const std::vector<T>& c) {
    T total(0);
    for (std::size_t j = 0; j < a.size(); ++j) total += a[j] * b[j] * c[j];
    return total;
}

/// sum_j p_j u_j x_j
template <class T>
T expected_utility(const std::vector<T>& u, const std::vector<T>& x, const std::vector<T>& p) {
    return sum_products(u, x, p);
}

/// Eu / (p . u)
template <class T>
T certainty_equivalent(const std::vector<T>& u, const std::vector<T>& x, const std::vector<T>& p) {
    T weight(0);
    for (std::size_t j = 0; j < u.size(); ++j) weight += p[j] * u[j];
    return expected_utility(u, x, p) / weight;
}

/// P{X <= t} for a distribution over arbitrary (unsorted) returns.
template <class T>
T cdf(const std::vector<T>& x, const std::vector<T>& p, const T& t) {
    T total(0);
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] <= t) total += p[j];
    }
    return total;
}

/// FSD via CDFs evaluated at every support point and at midpoints between
/// them (where nothing changes, so the midpoints only guard the oracle).
inline bool fsd(const std::vector<Rational>& xa, const std::vector<Rational>& pa, const std::vector<Rational>& xb,
                const std::vector<Rational>& pb) {
    std::vector<Rational> pts(xa);
    pts.insert(pts.end(), xb.begin(), xb.end());
    std::sort(pts.begin(), pts.end());
    std::vector<Rational> probes(pts);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) probes.push_back((pts[i] + pts[i + 1]) / 2);
    bool strict = false;
    for (const Rational& t : probes) {
        const Rational fa = cdf(xa, pa, t);
        const Rational fb = cdf(xb, pb, t);
        if (fa > fb) return false;
        if (fa < fb) strict = true;
    }
    return strict;
}

/// Applies one mean-preserving spread on a sorted grid: removes `mass` from
/// state j and sends it to i and k in the proportions that keep the mean.
inline std::vector<Rational> spread(const std::vector<Rational>& x, std::vector<Rational> p, std::size_t i,
                                    std::size_t j, std::size_t k, const Rational& mass) {
    const Rational span = x[k] - x[i];
    p[j] -= mass;
    p[i] += mass * (x[k] - x[j]) / span;
    p[k] += mass * (x[j] - x[i]) / span;
    return p;
}

/// Strictly increasing, strictly concave sequence check on points (x_j, v_j):
/// successive chord slopes strictly decrease and are positive.
inline bool increasing_concave_points(const std::vector<Rational>& x, const std::vector<Rational>& v) {
    std::optional<Rational> last;
    for (std::size_t j = 0; j + 1 < x.size(); ++j) {
        const Rational slope = (v[j + 1] - v[j]) / (x[j + 1] - x[j]);
        if (slope <= 0) return false;
        if (last && !(slope < *last)) return false;
        last = slope;
    }
    return true;
}

/// Random strictly positive probability vector with entries k / den.
inline std::vector<Rational> random_probs(std::mt19937_64& rng, std::size_t n, int den) {
    std::vector<int> counts(n, 1);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    for (int r = static_cast<int>(n); r < den; ++r) ++counts[pick(rng)];
    std::vector<Rational> out;
    for (int c : counts) out.emplace_back(c, den);
    return out;
}

inline std::vector<double> to_doubles(const std::vector<Rational>& v) {
    std::vector<double> out;
    for (const Rational& r : v) out.push_back(r.convert_to<double>());
    return out;
}

}  // namespace oracle
