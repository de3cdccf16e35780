// rng.hpp
//
// Deterministic, splittable random streams.
//
// Every random quantity in a simulation comes from an RngStream derived from a
// master seed and an ordered list of (name, index) labels. Nothing in the
// library touches a global generator, so an experiment is a pure function of
// its configuration.
//
// Generator:   xoshiro256** (Blackman & Vigna, 2018), 256-bit state.
// Derivation:  h0 = mix64(master ^ 0x6a09e667f3bcc909)
//              for each label: h = mix64(h ^ fnv1a64(name));
//                              h = mix64(h + (index + 1) * 0x9e3779b97f4a7c15)
//              state[0..3] = four successive SplitMix64 outputs seeded with h
// Uniforms:    next_uniform() = (next_u64() >> 11) * 2^-53, in [0, 1)
// Normal:      Box-Muller, cosine branch only. Exactly two 64-bit draws per
//              call, no cached second variate. Fixed forever: changing it
//              shifts every stream position and breaks stored trajectories.
// Bernoulli:   exactly one 64-bit draw per call.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace anchor_bandits {

struct Seed {
    std::uint64_t value{0};
};

struct StreamLabel {
    std::string name;
    std::uint64_t index{0};
};

namespace detail {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
    state += 0x9e3779b97f4a7c15ULL;
    return mix64(state);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// 64-bit FNV-1a. Used to fold label names into stream keys.
constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Single-owner random stream. Copying a stream duplicates its position.
class RngStream {
public:
    RngStream(Seed master, std::vector<StreamLabel> labels)
        : master_(master), labels_(std::move(labels)) {
        if (labels_.empty()) {
            throw std::invalid_argument("derive_stream: label list must be non-empty");
        }
        std::uint64_t h = detail::mix64(master_.value ^ 0x6a09e667f3bcc909ULL);
        for (const auto& label : labels_) {
            h = detail::mix64(h ^ fnv1a64(label.name));
            h = detail::mix64(h + (label.index + 1) * 0x9e3779b97f4a7c15ULL);
        }
        std::uint64_t sm = h;
        for (auto& word : state_) word = detail::splitmix64_next(sm);
    }

    std::uint64_t next_u64() noexcept {
        const std::uint64_t result = detail::rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = detail::rotl(state_[3], 45);
        return result;
    }

    /// Uniform on [0, 1) with 53 random bits.
    double next_uniform() noexcept {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform on (0, 1]; safe as a log argument.
    double next_open_uniform() noexcept {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    /// Stream derived from this one's origin with one more label appended.
    /// Does not depend on (or advance) the current position.
    RngStream child(std::string name, std::uint64_t index) const {
        auto labels = labels_;
        labels.push_back({std::move(name), index});
        return RngStream(master_, std::move(labels));
    }

    Seed master() const noexcept { return master_; }
    const std::vector<StreamLabel>& labels() const noexcept { return labels_; }

private:
    Seed master_;
    std::vector<StreamLabel> labels_;
    std::array<std::uint64_t, 4> state_{};
};

inline RngStream derive_stream(Seed master, std::vector<StreamLabel> labels) {
    return RngStream(master, std::move(labels));
}

inline RngStream derive_stream(Seed master, std::initializer_list<StreamLabel> labels) {
    return RngStream(master, std::vector<StreamLabel>(labels));
}

/// One N(0, 1) variate; consumes exactly two 64-bit draws.
inline double standard_normal(RngStream& stream) noexcept {
    const double u1 = stream.next_open_uniform();
    const double u2 = stream.next_uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline double sample_normal(RngStream& stream, double mean, double variance) {
    if (!(variance >= 0.0)) {
        throw std::invalid_argument("sample_normal: variance must be >= 0");
    }
    if (!std::isfinite(mean)) {
        throw std::invalid_argument("sample_normal: mean must be finite");
    }
    const double z = standard_normal(stream);
    return mean + std::sqrt(variance) * z;
}

inline int sample_bernoulli(RngStream& stream, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("sample_bernoulli: p must lie in [0, 1]");
    }
    return stream.next_uniform() < p ? 1 : 0;
}

}  // namespace anchor_bandits
