// analysis.hpp
//
// Regret-bound evaluation, the closed-form tail probability of the median
// index, and comparison helpers for aggregated results.
#pragma once

#include "environment.hpp"
#include "simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace anchor_bandits {

/// omega = V + mu_off - mu_on. Positive when the shifted offline mean
/// overestimates the arm.
constexpr double effective_discrepancy(double v_bound, double mu_off, double mu_on) noexcept {
    return v_bound + mu_off - mu_on;
}

// Constants of the gap-dependent regret bound. `constant_term` has no
// derived value; 100 is an arbitrary default.
struct BoundParams {
    double suboptimal_log_offset{std::exp(6.0)};
    double suboptimal_scale{36.0};
    double optimal_scale{288.0};
    double optimal_log_offset{std::exp(32.0)};
    double constant_term{100.0};
    bool use_optimal_arm_constant{true};
};

struct ArmBound {
    double gap{0.0};
    double omega{0.0};
    std::uint64_t n_off{0};
    double suboptimal_term{0.0};  // clipped, before multiplying by the gap
    double optimal_term{0.0};     // clipped and scaled by c(N_opt)
    double constant_part{0.0};
    double contribution{0.0};     // gap * (sum of the three)
};

struct BoundReport {
    std::size_t optimal_arm{0};
    double optimal_arm_constant{1.0};
    std::vector<ArmBound> arms;
    double total{0.0};
};

/// c(N) = max{e^11, exp((28 + 16 sqrt 3) / (N + 1))} + 5, non-increasing in N.
inline double optimal_arm_constant(std::uint64_t n_optimal) {
    const double e = (28.0 + 16.0 * std::numbers::sqrt3) / static_cast<double>(n_optimal + 1);
    return std::max(std::exp(11.0), std::exp(e)) + 5.0;
}

inline BoundReport regret_upper_bound_report(const BanditInstance& instance,
                                             const std::vector<std::uint64_t>& offline_counts,
                                             std::uint64_t horizon, const BoundParams& params = {}) {
    if (horizon == 0) throw std::invalid_argument("regret bound: horizon must be >= 1");
    if (offline_counts.size() != instance.num_arms()) {
        throw std::invalid_argument("regret bound: offline_counts must have length K");
    }
    if (!(params.suboptimal_scale > 0.0 && params.optimal_scale > 0.0 &&
          params.suboptimal_log_offset > 0.0 && params.optimal_log_offset > 0.0 &&
          params.constant_term > 0.0)) {
        throw std::invalid_argument("regret bound: all scales must be > 0");
    }
    const GapInfo g = suboptimality_gaps(instance);
    BoundReport rep;
    rep.optimal_arm = g.optimal_arm;
    const auto n_opt = static_cast<double>(offline_counts[g.optimal_arm]);
    rep.optimal_arm_constant =
        params.use_optimal_arm_constant ? optimal_arm_constant(offline_counts[g.optimal_arm]) : 1.0;
    const auto T = static_cast<double>(horizon);

    for (std::size_t i = 0; i < instance.num_arms(); ++i) {
        const ArmSpec& a = instance.arm(i);
        ArmBound b;
        b.gap = g.gaps[i];
        b.omega = effective_discrepancy(a.v_bound, a.mu_off, a.mu_on);
        b.n_off = offline_counts[i];
        if (i != g.optimal_arm && b.gap > 0.0) {
            const double d2 = b.gap * b.gap;
            const double discount = std::max(1.0 - 3.0 * b.omega / b.gap, 0.0);
            const double first = params.suboptimal_scale * std::log(T * d2 + params.suboptimal_log_offset) / d2 -
                                 static_cast<double>(b.n_off) * discount;
            const double second =
                params.optimal_scale * std::log(T * d2 + params.optimal_log_offset) / d2 - n_opt;
            b.suboptimal_term = std::max(first, 0.0);
            b.optimal_term = rep.optimal_arm_constant * std::max(second, 0.0);
            b.constant_part = params.constant_term / d2;
            b.contribution = b.gap * (b.suboptimal_term + b.optimal_term + b.constant_part);
        }
        rep.total += b.contribution;
        rep.arms.push_back(b);
    }
    return rep;
}

/// Sum over suboptimal arms of the gap-dependent bound. Zero-gap arms
/// (including duplicates of the optimum) contribute nothing.
inline double regret_upper_bound(const BanditInstance& instance,
                                 const std::vector<std::uint64_t>& offline_counts,
                                 std::uint64_t horizon, const BoundParams& params = {}) {
    return regret_upper_bound_report(instance, offline_counts, horizon, params).total;
}

/// Pr(X > y) for X ~ N(mean, variance), via the complementary error function:
/// 0.5 * erfc((y - mean) / sqrt(2 variance)). erfc keeps full relative
/// precision in the upper tail, so the absolute error is a few ulps.
inline double gaussian_upper_tail(double mean, double variance, double y) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_upper_tail: variance must be > 0");
    return 0.5 * std::erfc((y - mean) / std::sqrt(2.0 * variance));
}

/// Pr(median(anchor, X_on, X_hyb) > y) for independent Gaussian samples.
/// If the anchor is at or below y both samples must exceed y; otherwise one
/// sample above y is enough.
inline double median_tail_probability(double anchor, double on_mean, double on_var,
                                      double hyb_mean_shifted, double hyb_var, double y) {
    const double p_on = gaussian_upper_tail(on_mean, on_var, y);
    const double p_hyb = gaussian_upper_tail(hyb_mean_shifted, hyb_var, y);
    if (anchor <= y) return p_on * p_hyb;
    return 1.0 - (1.0 - p_on) * (1.0 - p_hyb);
}

struct Comparison {
    double mean_difference{0.0};  // mean_a - mean_b at the final checkpoint
    double pooled_stderr{0.0};    // sqrt(se_a^2 + se_b^2)
    bool a_dominates{false};      // mean_a + 2 se_a < mean_b - 2 se_b
};

inline Comparison summarize_final(const AggregateResult& a, const AggregateResult& b) {
    if (a.runs != b.runs) throw std::invalid_argument("summarize_final: run counts differ");
    if (a.points.size() != b.points.size() || a.points.empty()) {
        throw std::invalid_argument("summarize_final: checkpoint grids differ");
    }
    const auto& fa = a.points.back();
    const auto& fb = b.points.back();
    if (fa.round != fb.round) throw std::invalid_argument("summarize_final: final rounds differ");
    Comparison c;
    c.mean_difference = fa.mean - fb.mean;
    c.pooled_stderr = std::sqrt(fa.std_error * fa.std_error + fb.std_error * fb.std_error);
    c.a_dominates = fa.mean + 2.0 * fa.std_error < fb.mean - 2.0 * fb.std_error;
    return c;
}

}  // namespace anchor_bandits
