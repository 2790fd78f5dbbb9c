#include "orgsim/rng.hpp"

#include "orgsim/errors.hpp"

namespace orgsim {

namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

}  // namespace

std::uint64_t fnv1a64(std::uint64_t seed, std::string_view bytes) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  return fnv1a64(0xcbf29ce484222325ull, bytes);
}

RandomStream RandomStream::fork(std::uint64_t label) const {
  return RandomStream(mix64(key_ + mix64(label + kGamma)));
}

std::uint64_t RandomStream::next_u64() {
  ++counter_;
  return mix64(key_ + counter_ * kGamma);
}

double RandomStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint32_t RandomStream::next_below(std::uint32_t bound) {
  if (bound == 0) throw DomainError("RandomStream::next_below: bound must be positive");
  // Lemire's unbiased bounded draw on the upper 32 bits.
  std::uint32_t x = static_cast<std::uint32_t>(next_u64() >> 32);
  std::uint64_t m = static_cast<std::uint64_t>(x) * bound;
  std::uint32_t low = static_cast<std::uint32_t>(m);
  if (low < bound) {
    const std::uint32_t floor = (0u - bound) % bound;  // 2^32 mod bound
    while (low < floor) {
      x = static_cast<std::uint32_t>(next_u64() >> 32);
      m = static_cast<std::uint64_t>(x) * bound;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

}  // namespace orgsim
