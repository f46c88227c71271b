#pragma once

// Almost Linear utility: piecewise linear through the origin on [-w, inf),
// constant average utility on every segment, with upward jumps at the
// breakpoints so that the function stays strictly increasing while deeper
// losses and larger gains carry larger slopes.
//
// Indexing follows signed breakpoint numbers:
//   losses  x_{-1} > x_{-2} > ... > x_{-n} = -w, slopes u_{-1} < ... < u_{-n};
//   gains   0 < x_1 < ... < x_{m-1},             slopes u_1 < ... < u_m.
// Slope u_{-j} applies on (x_{-j}, x_{-(j-1)}) with x_0 = 0 (u_{-n} on
// [-w, x_{-(n-1)})), and u_k on (x_{k-1}, x_k) with u_m beyond x_{m-1}.
// At an interior breakpoint the value is the product of the breakpoint with
// the slope of the segment on the chosen side.

#include "linutil/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace linutil {

enum class Side { Left, Right };

inline std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

template <Scalar T>
struct BreakpointInfo {
    int index = 0;
    T location;
    T left_slope;
    T right_slope;
    /// Neighbouring breakpoints bounding the two adjacent open segments;
    /// `upper` is empty when the right segment is unbounded.
    T lower;
    std::optional<T> upper;
    Side side = Side::Left;
};

template <Scalar T>
class AlmostLinearUtility {
public:
    /// loss_breakpoints lists x_{-1}, ..., x_{-n}; loss_slopes u_{-1}, ..., u_{-n};
    /// gain_breakpoints x_1, ..., x_{m-1}; gain_slopes u_1, ..., u_m. The side
    /// vectors hold one entry per interior breakpoint (n-1 and m-1 entries).
    AlmostLinearUtility(T wealth, std::vector<T> loss_breakpoints, std::vector<T> loss_slopes,
                        std::vector<T> gain_breakpoints, std::vector<T> gain_slopes, std::vector<Side> loss_sides,
                        std::vector<Side> gain_sides)
        : AlmostLinearUtility(std::move(wealth), std::move(loss_breakpoints), std::move(loss_slopes),
                              std::move(gain_breakpoints), std::move(gain_slopes), std::move(loss_sides),
                              std::move(gain_sides), false) {}

    /// Test-only: like the constructor but adjacent slopes may be equal
    /// (no kink, hence no jump at that breakpoint).
    static AlmostLinearUtility relaxed(T wealth, std::vector<T> loss_breakpoints, std::vector<T> loss_slopes,
                                       std::vector<T> gain_breakpoints, std::vector<T> gain_slopes,
                                       std::vector<Side> loss_sides, std::vector<Side> gain_sides) {
        return AlmostLinearUtility(std::move(wealth), std::move(loss_breakpoints), std::move(loss_slopes),
                                   std::move(gain_breakpoints), std::move(gain_slopes), std::move(loss_sides),
                                   std::move(gain_sides), true);
    }

    const T& wealth() const { return wealth_; }
    /// n: number of loss segments.
    int loss_count() const { return static_cast<int>(loss_slopes_.size()); }
    /// m: number of gain segments.
    int gain_count() const { return static_cast<int>(gain_slopes_.size()); }
    const std::vector<T>& loss_breakpoints() const { return loss_breakpoints_; }
    const std::vector<T>& loss_slopes() const { return loss_slopes_; }
    const std::vector<T>& gain_breakpoints() const { return gain_breakpoints_; }
    const std::vector<T>& gain_slopes() const { return gain_slopes_; }
    const std::vector<Side>& loss_sides() const { return loss_sides_; }
    const std::vector<Side>& gain_sides() const { return gain_sides_; }

    /// Signed indices of the interior breakpoints: -1 .. -(n-1), then 1 .. m-1.
    std::vector<int> interior_breakpoints() const {
        std::vector<int> out;
        for (int j = 1; j < loss_count(); ++j) out.push_back(-j);
        for (int k = 1; k < gain_count(); ++k) out.push_back(k);
        return out;
    }

    BreakpointInfo<T> breakpoint(int k) const {
        BreakpointInfo<T> info;
        info.index = k;
        if (k < 0 && -k < loss_count()) {
            const std::size_t j = static_cast<std::size_t>(-k);
            info.location = loss_breakpoints_[j - 1];
            info.left_slope = loss_slopes_[j];
            info.right_slope = loss_slopes_[j - 1];
            info.lower = loss_breakpoints_[j];
            info.upper = j == 1 ? T(0) : loss_breakpoints_[j - 2];
            info.side = loss_sides_[j - 1];
        } else if (k > 0 && k < gain_count()) {
            const std::size_t i = static_cast<std::size_t>(k);
            info.location = gain_breakpoints_[i - 1];
            info.left_slope = gain_slopes_[i - 1];
            info.right_slope = gain_slopes_[i];
            info.lower = i == 1 ? T(0) : gain_breakpoints_[i - 2];
            if (i < gain_breakpoints_.size()) info.upper = gain_breakpoints_[i];
            info.side = gain_sides_[i - 1];
        } else {
            detail::fail_precondition("index " + std::to_string(k) + " is not an interior breakpoint");
        }
        return info;
    }

    T evaluate(const T& x) const {
        if (x < -wealth_) detail::fail_precondition("utility is defined on [-w, inf) only");
        if (x == T(0)) return T(0);
        if (x < T(0)) {
            for (std::size_t j = 1; j < loss_slopes_.size(); ++j) {
                const T& bp = loss_breakpoints_[j - 1];
                if (x > bp) return loss_slopes_[j - 1] * x;
                if (x == bp) return (loss_sides_[j - 1] == Side::Left ? loss_slopes_[j] : loss_slopes_[j - 1]) * x;
            }
            return loss_slopes_.back() * x;
        }
        for (std::size_t k = 1; k < gain_slopes_.size(); ++k) {
            const T& bp = gain_breakpoints_[k - 1];
            if (x < bp) return gain_slopes_[k - 1] * x;
            if (x == bp) return (gain_sides_[k - 1] == Side::Left ? gain_slopes_[k - 1] : gain_slopes_[k]) * x;
        }
        return gain_slopes_.back() * x;
    }

private:
    AlmostLinearUtility(T wealth, std::vector<T> loss_breakpoints, std::vector<T> loss_slopes,
                        std::vector<T> gain_breakpoints, std::vector<T> gain_slopes, std::vector<Side> loss_sides,
                        std::vector<Side> gain_sides, bool allow_flat_kinks)
        : wealth_(std::move(wealth)),
          loss_breakpoints_(std::move(loss_breakpoints)),
          loss_slopes_(std::move(loss_slopes)),
          gain_breakpoints_(std::move(gain_breakpoints)),
          gain_slopes_(std::move(gain_slopes)),
          loss_sides_(std::move(loss_sides)),
          gain_sides_(std::move(gain_sides)) {
        validate(allow_flat_kinks);
    }

    void validate(bool allow_flat_kinks) const {
        using detail::fail_validation;
        if (!(wealth_ > T(0))) fail_validation("wealth must be > 0");
        if (loss_slopes_.empty()) fail_validation("at least one loss slope is required");
        if (loss_breakpoints_.size() != loss_slopes_.size()) {
            fail_validation("loss_breakpoints and loss_slopes must have the same length");
        }
        if (gain_slopes_.empty()) fail_validation("at least one gain slope is required");
        if (gain_breakpoints_.size() + 1 != gain_slopes_.size()) {
            fail_validation("gain_breakpoints must have one entry fewer than gain_slopes");
        }
        if (loss_sides_.size() + 1 != loss_slopes_.size()) {
            fail_validation("loss_sides must have one entry per interior loss breakpoint");
        }
        if (gain_sides_.size() != gain_breakpoints_.size()) {
            fail_validation("gain_sides must have one entry per gain breakpoint");
        }
        if (!(loss_breakpoints_.back() == -wealth_)) fail_validation("last loss breakpoint must equal -wealth");

        auto ordered = [&](const T& a, const T& b) { return allow_flat_kinks ? a <= b : a < b; };
        for (std::size_t j = 0; j < loss_breakpoints_.size(); ++j) {
            if (!(loss_breakpoints_[j] < T(0))) fail_validation("loss breakpoints must be negative");
            if (j > 0 && !(loss_breakpoints_[j] < loss_breakpoints_[j - 1])) {
                fail_validation("loss breakpoints must be strictly decreasing");
            }
            if (!(loss_slopes_[j] > T(0))) fail_validation("loss slopes must be positive");
            if (j > 0 && !ordered(loss_slopes_[j - 1], loss_slopes_[j])) {
                fail_validation("loss slopes must increase with loss depth");
            }
        }
        for (std::size_t k = 0; k < gain_breakpoints_.size(); ++k) {
            if (!(gain_breakpoints_[k] > T(0))) fail_validation("gain breakpoints must be positive");
            if (k > 0 && !(gain_breakpoints_[k] > gain_breakpoints_[k - 1])) {
                fail_validation("gain breakpoints must be strictly increasing");
            }
        }
        for (std::size_t k = 0; k < gain_slopes_.size(); ++k) {
            if (!(gain_slopes_[k] > T(0))) fail_validation("gain slopes must be positive");
            if (k > 0 && !ordered(gain_slopes_[k - 1], gain_slopes_[k])) {
                fail_validation("gain slopes must be increasing");
            }
        }
        // Every jump must be upward: left limit <= value <= right limit.
        for (int k : interior_breakpoints()) {
            const BreakpointInfo<T> info = breakpoint(k);
            const T left = info.left_slope * info.location;
            const T right = info.right_slope * info.location;
            if (allow_flat_kinks ? right < left : !(left < right)) {
                fail_validation("utility must jump upward at breakpoint " + std::to_string(k));
            }
        }
    }

    T wealth_;
    std::vector<T> loss_breakpoints_;
    std::vector<T> loss_slopes_;
    std::vector<T> gain_breakpoints_;
    std::vector<T> gain_slopes_;
    std::vector<Side> loss_sides_;
    std::vector<Side> gain_sides_;
};

template <Scalar T>
struct StateEvent {
    /// -n .. -1 for loss events, 0 .. m-1 for gain events.
    int label = 0;
    T lower;
    bool lower_closed = false;
    /// Empty for the unbounded last gain event.
    std::optional<T> upper;
    bool upper_closed = false;
    T slope;

    bool contains(const T& x) const {
        const bool above = lower_closed ? !(x < lower) : lower < x;
        const bool below = !upper || (upper_closed ? !(*upper < x) : x < *upper);
        return above && below;
    }
};

template <Scalar T>
struct StateDependentProfile {
    std::vector<StateEvent<T>> events;

    const StateEvent<T>& event_for(const T& x) const {
        for (const auto& e : events) {
            if (e.contains(x)) return e;
        }
        detail::fail_precondition("amount lies outside every event");
    }
};

/// Partitions [-w, inf) into the maximal intervals of constant average utility.
/// A breakpoint joins the event on its continuity side; 0 opens the first gain
/// event.
template <Scalar T>
StateDependentProfile<T> derive_state_profile(const AlmostLinearUtility<T>& u) {
    const int n = u.loss_count();
    const int m = u.gain_count();
    StateDependentProfile<T> profile;

    for (int j = n; j >= 1; --j) {
        StateEvent<T> e;
        e.label = -j;
        e.slope = u.loss_slopes()[static_cast<std::size_t>(j - 1)];
        e.lower = u.loss_breakpoints()[static_cast<std::size_t>(j - 1)];
        e.lower_closed = j == n || u.loss_sides()[static_cast<std::size_t>(j - 1)] == Side::Right;
        e.upper = j == 1 ? T(0) : u.loss_breakpoints()[static_cast<std::size_t>(j - 2)];
        e.upper_closed = j > 1 && u.loss_sides()[static_cast<std::size_t>(j - 2)] == Side::Left;
        profile.events.push_back(std::move(e));
    }
    for (int k = 1; k <= m; ++k) {
        StateEvent<T> e;
        e.label = k - 1;
        e.slope = u.gain_slopes()[static_cast<std::size_t>(k - 1)];
        e.lower = k == 1 ? T(0) : u.gain_breakpoints()[static_cast<std::size_t>(k - 2)];
        e.lower_closed = k == 1 || u.gain_sides()[static_cast<std::size_t>(k - 2)] == Side::Right;
        if (k < m) {
            e.upper = u.gain_breakpoints()[static_cast<std::size_t>(k - 1)];
            e.upper_closed = u.gain_sides()[static_cast<std::size_t>(k - 1)] == Side::Left;
        }
        profile.events.push_back(std::move(e));
    }
    return profile;
}

namespace detail {

template <Scalar T>
BreakpointInfo<T> admissible_breakpoint(const AlmostLinearUtility<T>& u, int k, const T& delta) {
    BreakpointInfo<T> info = u.breakpoint(k);
    if (!(delta > T(0))) fail_precondition("perturbation must be positive");
    if (!(info.lower < info.location - delta) || (info.upper && !(info.location + delta < *info.upper))) {
        fail_precondition("perturbation " + to_decimal_string(to_double(delta)) +
                          " leaves the segments adjacent to breakpoint " + std::to_string(k));
    }
    return info;
}

/// Expected utility of x_k - delta and x_k + delta, each with probability 1/2.
template <Scalar T>
T perturbation_expected_utility(const AlmostLinearUtility<T>& u, const BreakpointInfo<T>& info, const T& delta) {
    return (u.evaluate(info.location - delta) + u.evaluate(info.location + delta)) / T(2);
}

}  // namespace detail

/// Attitude towards the even-odds PORA x_k +/- delta: Loving when its expected
/// utility exceeds u(x_k), Averse when it falls short. The value chosen at the
/// breakpoint decides: the larger admissible product (right side) gives
/// Averse, the smaller (left side) Loving, on both the gain and loss side.
template <Scalar T>
RiskAttitude risk_attitude_at_breakpoint(const AlmostLinearUtility<T>& u, int k, const T& delta) {
    const BreakpointInfo<T> info = detail::admissible_breakpoint(u, k, delta);
    const T eu = detail::perturbation_expected_utility(u, info, delta);
    const int cmp = compare_values(eu, u.evaluate(info.location));
    const RiskAttitude attitude =
        cmp > 0 ? RiskAttitude::Loving : (cmp < 0 ? RiskAttitude::Averse : RiskAttitude::Neutral);

    const RiskAttitude expected = info.left_slope == info.right_slope ? RiskAttitude::Neutral
                                  : info.side == Side::Right         ? RiskAttitude::Averse
                                                                     : RiskAttitude::Loving;
    if (attitude != expected) {
        detail::fail_internal("attitude at breakpoint " + std::to_string(k) + " contradicts its continuity side");
    }
    return attitude;
}

/// Certainty equivalent of x_k +/- delta under the two adjacent segment
/// slopes: (u_a + u_b)/2 * CE = EU. Lies above x_k at gain breakpoints and
/// below x_k at loss breakpoints (equal to x_k when the slopes coincide).
template <Scalar T>
T perturbation_certainty_equivalent(const AlmostLinearUtility<T>& u, int k, const T& delta) {
    const BreakpointInfo<T> info = detail::admissible_breakpoint(u, k, delta);
    const T eu = (info.left_slope * (info.location - delta) + info.right_slope * (info.location + delta)) / T(2);
    const T ce = eu / ((info.left_slope + info.right_slope) / T(2));

    const int cmp = compare_values(ce, info.location);
    const int expected = info.left_slope == info.right_slope ? 0 : (info.location > T(0) ? 1 : -1);
    if (cmp != expected) {
        detail::fail_internal("certainty equivalent at breakpoint " + std::to_string(k) +
                              " is on the wrong side of the breakpoint");
    }
    return ce;
}

/// A quarter of the narrower adjacent segment (the left one when the right
/// segment is unbounded); always admissible.
template <Scalar T>
T default_perturbation(const AlmostLinearUtility<T>& u, int k) {
    const BreakpointInfo<T> info = u.breakpoint(k);
    T width = info.location - info.lower;
    if (info.upper && *info.upper - info.location < width) width = *info.upper - info.location;
    return width / T(4);
}

}  // namespace linutil
