// policies.hpp
//
// Index policies for offline-to-online stochastic bandits.
//
// Every policy keeps the same per-arm sufficient statistics (ArmStats) and
// derives its posterior means, variances and shift from them on demand:
//
//   online mean      s_on / (t_on + 1)                 variance 1 / (t_on + 1)
//   hybrid mean      (s_on + s_off) / (t_on + n_off + 1)
//                                                      variance 1 / (t_on + n_off + 1)
//   shift Z          n_off * V / (t_on + n_off)        (0 when both counts are 0)
//
// Keeping raw sums means the derived quantities are exact functions of the
// observed data; there are no recursive mean updates to drift.
//
// Random draws are taken from one stream per arm, arms visited in ascending
// order. Within an arm the online sample is drawn before the hybrid sample.
// With no offline data this makes AnchorTS and AnchorTSOnline consume their
// streams identically, so the two produce the same trajectory.
#pragma once

#include "environment.hpp"
#include "rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace anchor_bandits {

enum class PolicyKind { AnchorTS, AnchorTSOnline, VanillaTS, UCB1, HybridTS, HybridUCB, MinUCB };

inline constexpr std::array<PolicyKind, 7> kAllPolicies = {
    PolicyKind::AnchorTS, PolicyKind::AnchorTSOnline, PolicyKind::VanillaTS, PolicyKind::UCB1,
    PolicyKind::HybridTS, PolicyKind::HybridUCB,      PolicyKind::MinUCB,
};

constexpr std::string_view policy_name(PolicyKind kind) noexcept {
    switch (kind) {
        case PolicyKind::AnchorTS: return "anchor_ts";
        case PolicyKind::AnchorTSOnline: return "anchor_ts_online";
        case PolicyKind::VanillaTS: return "ts";
        case PolicyKind::UCB1: return "ucb1";
        case PolicyKind::HybridTS: return "hybrid_ts";
        case PolicyKind::HybridUCB: return "hybrid_ucb";
        case PolicyKind::MinUCB: return "min_ucb";
    }
    return "unknown";
}

inline std::optional<PolicyKind> parse_policy(std::string_view name) noexcept {
    for (auto k : kAllPolicies) {
        if (policy_name(k) == name) return k;
    }
    return std::nullopt;
}

/// Policies that never look at offline data.
constexpr bool is_pure_online(PolicyKind kind) noexcept {
    return kind == PolicyKind::AnchorTSOnline || kind == PolicyKind::VanillaTS ||
           kind == PolicyKind::UCB1;
}

struct PolicySpec {
    PolicyKind kind{PolicyKind::AnchorTS};
    double radius_scale{2.0};  // UCB-family exploration constant
};

struct ArmStats {
    std::uint64_t t_on{0};
    double s_on{0.0};
    std::uint64_t n_off{0};
    double s_off{0.0};
    double v_bound{0.0};

    double online_mean() const noexcept { return s_on / static_cast<double>(t_on + 1); }
    double online_variance() const noexcept { return 1.0 / static_cast<double>(t_on + 1); }

    double hybrid_mean() const noexcept {
        return (s_on + s_off) / static_cast<double>(t_on + n_off + 1);
    }
    double hybrid_variance() const noexcept {
        return 1.0 / static_cast<double>(t_on + n_off + 1);
    }

    // Right shift applied to the hybrid posterior; lies in [0, V].
    double shift() const noexcept {
        const std::uint64_t total = t_on + n_off;
        if (total == 0) return 0.0;
        if (t_on == 0) return v_bound;
        return static_cast<double>(n_off) * v_bound / static_cast<double>(total);
    }

    std::optional<double> offline_mean() const noexcept {
        if (n_off == 0) return std::nullopt;
        return s_off / static_cast<double>(n_off);
    }

    // Plain sample means used by the UCB family (undefined at zero count).
    double plain_online_mean() const noexcept { return s_on / static_cast<double>(t_on); }
    double plain_hybrid_mean() const noexcept {
        return (s_on + s_off) / static_cast<double>(t_on + n_off);
    }
};

/// Middle order statistic of three values. Always returns one of its inputs.
constexpr double median3(double a, double b, double c) noexcept {
    if (a > b) std::swap(a, b);
    if (b > c) std::swap(b, c);
    return a > b ? a : b;
}

/// Argmax with ties to the lowest index. +inf is allowed; NaN is not.
inline std::size_t select_arm(std::span<const double> indices) {
    if (indices.empty()) throw std::invalid_argument("select_arm: empty index list");
    std::size_t best = 0;
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (std::isnan(indices[i])) {
            throw std::logic_error("select_arm: NaN index for arm " + std::to_string(i + 1));
        }
        if (indices[i] > indices[best]) best = i;
    }
    return best;
}

class PolicyState {
public:
    PolicyState(PolicySpec spec, std::vector<ArmStats> arms)
        : spec_(spec), arms_(std::move(arms)) {}

    const PolicySpec& spec() const noexcept { return spec_; }
    PolicyKind kind() const noexcept { return spec_.kind; }
    std::size_t num_arms() const noexcept { return arms_.size(); }
    const std::vector<ArmStats>& arms() const noexcept { return arms_; }
    const ArmStats& arm(std::size_t i) const { return arms_.at(i); }
    /// 1-based round counter; the round about to be played.
    std::uint64_t round() const noexcept { return round_; }

    void record(std::size_t arm, double reward) {
        auto& a = arms_.at(arm);
        a.t_on += 1;
        a.s_on += reward;
        ++round_;
    }

    // Convenience for the BanditPolicy concept used by the simulator.
    std::size_t select(std::span<RngStream> arm_streams);
    void update(std::size_t arm, double reward) { record(arm, reward); }

private:
    PolicySpec spec_;
    std::vector<ArmStats> arms_;
    std::uint64_t round_{1};
};

inline PolicyState init_policy(PolicySpec spec, std::size_t num_arms, const OfflineDataset& offline,
                               std::span<const double> v_bounds) {
    if (offline.size() != num_arms || v_bounds.size() != num_arms) {
        throw std::invalid_argument("init_policy: offline data and v_bounds must have length K");
    }
    if (num_arms == 0) throw std::invalid_argument("init_policy: K must be >= 1");
    if (!(spec.radius_scale > 0.0)) {
        throw std::invalid_argument("init_policy: radius_scale must be > 0");
    }
    const bool online_only = is_pure_online(spec.kind);
    std::vector<ArmStats> arms(num_arms);
    for (std::size_t i = 0; i < num_arms; ++i) {
        if (!(v_bounds[i] >= 0.0)) throw std::invalid_argument("init_policy: v_bounds must be >= 0");
        arms[i].v_bound = v_bounds[i];
        if (!online_only) {
            arms[i].n_off = offline[i].n_off;
            arms[i].s_off = offline[i].sum_off;
        }
    }
    return PolicyState(spec, std::move(arms));
}

namespace detail {

inline void require_streams(const PolicyState& state, std::span<RngStream> streams) {
    if (streams.size() != state.num_arms()) {
        throw std::invalid_argument("policy indices: need one stream per arm");
    }
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double ucb_radius(double scale, std::uint64_t round, std::uint64_t count) {
    return std::sqrt(scale * std::log(static_cast<double>(round)) / static_cast<double>(count));
}

inline double online_ucb(const ArmStats& a, double scale, std::uint64_t round) {
    if (a.t_on == 0) return kInf;
    return a.plain_online_mean() + ucb_radius(scale, round, a.t_on);
}

inline double hybrid_ucb(const ArmStats& a, double scale, std::uint64_t round) {
    const std::uint64_t n = a.t_on + a.n_off;
    if (n == 0) return kInf;
    return a.plain_hybrid_mean() + ucb_radius(scale, round, n);
}

}  // namespace detail

/// Median-of-three index: median(online mean, online sample, shifted hybrid sample).
inline std::vector<double> anchor_ts_indices(const PolicyState& state, std::span<RngStream> streams) {
    if (state.kind() != PolicyKind::AnchorTS) {
        throw std::invalid_argument("anchor_ts_indices: policy is not anchor_ts");
    }
    detail::require_streams(state, streams);
    std::vector<double> out(state.num_arms());
    for (std::size_t i = 0; i < state.num_arms(); ++i) {
        const ArmStats& a = state.arm(i);
        const double anchor = a.online_mean();
        const double theta_on = sample_normal(streams[i], anchor, a.online_variance());
        const double theta_hyb =
            sample_normal(streams[i], a.hybrid_mean() + a.shift(), a.hybrid_variance());
        out[i] = median3(anchor, theta_on, theta_hyb);
    }
    return out;
}

inline std::vector<double> baseline_indices(const PolicyState& state, std::span<RngStream> streams) {
    if (state.kind() == PolicyKind::AnchorTS) {
        throw std::invalid_argument("baseline_indices: use anchor_ts_indices for anchor_ts");
    }
    detail::require_streams(state, streams);
    const double scale = state.spec().radius_scale;
    const std::uint64_t t = state.round();
    std::vector<double> out(state.num_arms());

    for (std::size_t i = 0; i < state.num_arms(); ++i) {
        const ArmStats& a = state.arm(i);
        switch (state.kind()) {
            case PolicyKind::VanillaTS:
                out[i] = sample_normal(streams[i], a.online_mean(), a.online_variance());
                break;
            case PolicyKind::AnchorTSOnline: {
                const double anchor = a.online_mean();
                const double first = sample_normal(streams[i], anchor, a.online_variance());
                const double second = sample_normal(streams[i], anchor, a.online_variance());
                out[i] = median3(anchor, first, second);
                break;
            }
            case PolicyKind::UCB1:
                out[i] = detail::online_ucb(a, scale, t);
                break;
            case PolicyKind::HybridTS:
                out[i] = sample_normal(streams[i], a.hybrid_mean(), a.hybrid_variance());
                break;
            case PolicyKind::HybridUCB:
                out[i] = detail::hybrid_ucb(a, scale, t);
                break;
            case PolicyKind::MinUCB: {
                const double u_on = detail::online_ucb(a, scale, t);
                const double u_hyb = detail::hybrid_ucb(a, scale, t) + a.shift();
                out[i] = std::min(u_on, u_hyb);
                break;
            }
            case PolicyKind::AnchorTS:
                break;  // rejected above
        }
    }
    return out;
}

inline std::vector<double> compute_indices(const PolicyState& state, std::span<RngStream> streams) {
    return state.kind() == PolicyKind::AnchorTS ? anchor_ts_indices(state, streams)
                                                : baseline_indices(state, streams);
}

/// Records the observed reward for the pulled arm and advances the round.
inline void update(PolicyState& state, std::size_t arm, double reward) {
    if (arm >= state.num_arms()) {
        throw std::out_of_range("update: arm index " + std::to_string(arm) + " out of range");
    }
    state.record(arm, reward);
}

inline std::size_t PolicyState::select(std::span<RngStream> arm_streams) {
    const auto indices = compute_indices(*this, arm_streams);
    return select_arm(indices);
}

}  // namespace anchor_bandits
