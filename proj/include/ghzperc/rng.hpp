#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>

namespace ghzperc {

/// SplitMix64 finalizer. Bijective 64-bit mixer used for seeding and
/// counter-based draws.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Converts the top 53 bits of a word into a double in [0, 1).
constexpr double to_unit_double(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Random stream fully determined by a (seed, stream) pair.
///
/// Sequential draws come from xoshiro256** whose state is expanded from the
/// pair with SplitMix64, so sequences are identical on every platform.
/// Distributions are implemented here rather than through <random>, whose
/// distribution algorithms are implementation-defined.
///
/// `uniform_at` gives counter-based draws that do not advance the stream;
/// they are used wherever a value must stay coupled to a fixed index
/// regardless of how many other draws happened (common random numbers).
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept
      : seed_(seed), stream_(stream) {
    key_ = mix64(seed ^ mix64(stream ^ 0x6a09e667f3bcc909ULL));
    std::uint64_t x = key_;
    for (auto& word : state_) {
      x += 0x9e3779b97f4a7c15ULL;
      word = mix64(x);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1).
  double uniform() noexcept { return to_unit_double((*this)()); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, bound); bound must be positive. Lemire's
  /// nearly-divisionless rejection method.
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Child stream with the same seed and a stream index derived from this
  /// stream's index and `child`. Does not advance this stream.
  RngStream fork(std::uint64_t child) const noexcept {
    return {seed_, mix64(stream_ ^ mix64(child + 0x3c6ef372fe94f82bULL))};
  }

  /// Counter-based uniform in [0, 1); pure function of (seed, stream, counter).
  double uniform_at(std::uint64_t counter) const noexcept {
    return to_unit_double(mix64(key_ ^ mix64(counter)));
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::array<std::uint64_t, 4> state_{};
};

/// Fisher-Yates shuffle driven by RngStream (std::shuffle's algorithm is
/// implementation-defined).
template <class RandomIt>
void shuffle(RandomIt first, RandomIt last, RngStream& rng) {
  const auto n = last - first;
  for (auto i = n - 1; i > 0; --i) {
    const auto j = static_cast<decltype(i)>(rng.below(static_cast<std::uint64_t>(i) + 1));
    using std::swap;
    swap(first[i], first[j]);
  }
}

}  // namespace ghzperc
