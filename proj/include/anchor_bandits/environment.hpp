// environment.hpp
//
// Ground-truth bandit instances, offline dataset generation and online reward
// sampling. Arms are indexed from 0 in the C++ API; configuration files and
// printed tables use 1-based arm numbers.
#pragma once

#include "rng.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace anchor_bandits {

enum class RewardKind { Gaussian, Bernoulli };

struct RewardFamily {
    RewardKind kind{RewardKind::Gaussian};
    double sigma{1.0};  // Gaussian only

    static RewardFamily gaussian(double sigma) { return {RewardKind::Gaussian, sigma}; }
    static RewardFamily bernoulli() { return {RewardKind::Bernoulli, 0.0}; }
};

struct ArmSpec {
    double mu_on{0.0};
    double mu_off{0.0};
    double v_bound{0.0};

    // |mu_off - mu_on| <= V, the assumption the bias bound is meant to encode.
    bool bias_within_bound() const noexcept {
        return std::abs(mu_off - mu_on) <= v_bound;
    }
};

class BanditInstance {
public:
    BanditInstance(std::vector<ArmSpec> arms, RewardFamily family)
        : arms_(std::move(arms)), family_(family) {
        if (arms_.empty()) throw std::invalid_argument("bandit instance needs K >= 1 arms");
        if (family_.kind == RewardKind::Gaussian && !(family_.sigma >= 0.0)) {
            throw std::invalid_argument("gaussian reward family needs sigma >= 0");
        }
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            const auto& a = arms_[i];
            if (!std::isfinite(a.mu_on) || !std::isfinite(a.mu_off)) {
                throw std::invalid_argument("arm " + std::to_string(i + 1) + ": means must be finite");
            }
            if (!(a.v_bound >= 0.0)) {
                throw std::invalid_argument("arm " + std::to_string(i + 1) + ": v_bound must be >= 0");
            }
            if (family_.kind == RewardKind::Bernoulli &&
                (a.mu_on < 0.0 || a.mu_on > 1.0 || a.mu_off < 0.0 || a.mu_off > 1.0)) {
                throw std::invalid_argument("arm " + std::to_string(i + 1) +
                                            ": bernoulli means must lie in [0, 1]");
            }
        }
    }

    std::size_t num_arms() const noexcept { return arms_.size(); }
    const std::vector<ArmSpec>& arms() const noexcept { return arms_; }
    const ArmSpec& arm(std::size_t i) const { return arms_.at(i); }
    const RewardFamily& family() const noexcept { return family_; }

    std::vector<double> v_bounds() const {
        std::vector<double> v;
        v.reserve(arms_.size());
        for (const auto& a : arms_) v.push_back(a.v_bound);
        return v;
    }

    /// One message per arm whose true bias exceeds its V. Not an error:
    /// sweeps over V deliberately produce such instances.
    std::vector<std::string> bias_warnings() const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < arms_.size(); ++i) {
            const auto& a = arms_[i];
            if (!a.bias_within_bound()) {
                std::ostringstream os;
                os << "arm " << i + 1 << ": |mu_off - mu_on| = " << std::abs(a.mu_off - a.mu_on)
                   << " exceeds V = " << a.v_bound;
                out.push_back(os.str());
            }
        }
        return out;
    }

private:
    std::vector<ArmSpec> arms_;
    RewardFamily family_;
};

struct CoveragePattern {
    enum class Kind { Uniform, HeavyOnArm };
    Kind kind{Kind::Uniform};
    std::size_t arm{0};     // HeavyOnArm only, 0-based
    double fraction{1.0};   // HeavyOnArm only, in (0, 1]

    static CoveragePattern uniform() { return {}; }
    static CoveragePattern heavy_on_arm(std::size_t arm, double fraction) {
        return {Kind::HeavyOnArm, arm, fraction};
    }
};

/// Sufficient statistics of one arm's logged data.
struct OfflineArm {
    std::uint64_t n_off{0};
    double sum_off{0.0};
};

using OfflineDataset = std::vector<OfflineArm>;

namespace detail {
inline void spread_evenly(std::vector<std::uint64_t>& counts, std::uint64_t amount,
                          const std::vector<std::size_t>& targets) {
    if (targets.empty()) return;
    const std::uint64_t n = targets.size();
    const std::uint64_t base = amount / n;
    const std::uint64_t rem = amount % n;
    for (std::uint64_t j = 0; j < n; ++j) {
        counts[targets[j]] += base + (j < rem ? 1 : 0);
    }
}
}  // namespace detail

/// Splits `total` offline samples over K arms. Remainders go one-per-arm to
/// the lowest indices. The result always sums to `total`.
inline std::vector<std::uint64_t> allocate_offline_counts(std::uint64_t total, std::size_t num_arms,
                                                          const CoveragePattern& pattern) {
    if (num_arms == 0) throw std::invalid_argument("allocate_offline_counts: K must be >= 1");
    std::vector<std::uint64_t> counts(num_arms, 0);
    std::vector<std::size_t> targets;

    if (pattern.kind == CoveragePattern::Kind::Uniform) {
        for (std::size_t i = 0; i < num_arms; ++i) targets.push_back(i);
        detail::spread_evenly(counts, total, targets);
        return counts;
    }

    if (pattern.arm >= num_arms) {
        throw std::invalid_argument("allocate_offline_counts: heavy arm index out of range");
    }
    if (!(pattern.fraction > 0.0 && pattern.fraction <= 1.0)) {
        throw std::invalid_argument("allocate_offline_counts: fraction must lie in (0, 1]");
    }
    if (num_arms == 1 && pattern.fraction < 1.0) {
        throw std::invalid_argument(
            "allocate_offline_counts: heavy coverage with K = 1 requires fraction = 1");
    }
    auto heavy = static_cast<std::uint64_t>(std::floor(pattern.fraction * static_cast<double>(total)));
    if (heavy > total) heavy = total;
    counts[pattern.arm] = heavy;
    for (std::size_t i = 0; i < num_arms; ++i) {
        if (i != pattern.arm) targets.push_back(i);
    }
    if (targets.empty()) {
        counts[pattern.arm] = total;
    } else {
        detail::spread_evenly(counts, total - heavy, targets);
    }
    return counts;
}

inline double draw_reward(const RewardFamily& family, double mean, RngStream& stream) {
    if (family.kind == RewardKind::Bernoulli) {
        return static_cast<double>(sample_bernoulli(stream, mean));
    }
    return mean + family.sigma * standard_normal(stream);
}

/// Draws counts[i] offline rewards with mean mu_off for each arm, arms in
/// ascending order, all from `stream`.
inline OfflineDataset generate_offline_dataset(const BanditInstance& instance,
                                               const std::vector<std::uint64_t>& counts,
                                               RngStream& stream) {
    if (counts.size() != instance.num_arms()) {
        throw std::invalid_argument("generate_offline_dataset: counts length must equal K");
    }
    OfflineDataset data(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double mean = instance.arm(i).mu_off;
        double sum = 0.0;
        for (std::uint64_t k = 0; k < counts[i]; ++k) {
            sum += draw_reward(instance.family(), mean, stream);
        }
        data[i] = {counts[i], sum};
    }
    return data;
}

inline double sample_reward(const BanditInstance& instance, std::size_t arm, RngStream& stream) {
    if (arm >= instance.num_arms()) {
        throw std::out_of_range("sample_reward: arm index " + std::to_string(arm) + " out of range");
    }
    return draw_reward(instance.family(), instance.arm(arm).mu_on, stream);
}

struct GapInfo {
    std::size_t optimal_arm{0};
    std::vector<double> gaps;
};

/// Optimal arm is the argmax of mu_on, ties to the lowest index.
inline GapInfo suboptimality_gaps(const BanditInstance& instance) {
    GapInfo info;
    const auto& arms = instance.arms();
    for (std::size_t i = 1; i < arms.size(); ++i) {
        if (arms[i].mu_on > arms[info.optimal_arm].mu_on) info.optimal_arm = i;
    }
    const double best = arms[info.optimal_arm].mu_on;
    info.gaps.reserve(arms.size());
    for (const auto& a : arms) info.gaps.push_back(best - a.mu_on);
    return info;
}

}  // namespace anchor_bandits
