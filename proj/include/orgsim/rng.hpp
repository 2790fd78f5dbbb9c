#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

namespace orgsim {

// 64-bit FNV-1a over a byte string. Used for stable configuration and
// stream identifiers that must not change across platforms or builds.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t fnv1a64(std::uint64_t seed, std::string_view bytes);

// Counter-based random stream (splitmix64 core): draw i of stream k is
// mix(k + i * gamma), a pure function of (key, position). Streams are
// cheap values; fork(label) derives an independent child stream without
// touching the parent, so any tree of substreams keyed by
// (master seed, config, run, period, agent, ...) is reproducible
// regardless of evaluation order or thread count.
class RandomStream {
 public:
  RandomStream() = default;
  explicit RandomStream(std::uint64_t key) : key_(key) {}

  // Child stream identified by (this stream's key, label).
  RandomStream fork(std::uint64_t label) const;

  std::uint64_t key() const { return key_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_double();

  // Uniform on {0, ..., bound-1}, unbiased. bound must be positive.
  std::uint32_t next_below(std::uint32_t bound);

  bool bernoulli(double p) { return next_double() < p; }

  // Fisher-Yates. Draw order is fixed (descending positions).
  template <class Vec>
  void shuffle(Vec& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_below(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace orgsim
