#pragma once

#include <cstdint>
#include <random>

namespace torusreg {

// splitmix64 round; used to derive well-separated child seeds/streams from
// small structured inputs (seed, tag, index).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
  return mix64(mix64(seed ^ mix64(tag)) + index);
}

// Deterministic, portable random source: a Mersenne Twister seeded through
// std::seed_seq from the (seed, stream) pair. Identical pairs give identical
// sequences on every platform; distinct streams are independent for all
// practical purposes.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream) {
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed & 0xffffffffULL),
        static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream & 0xffffffffULL),
        static_cast<std::uint32_t>(stream >> 32),
    };
    engine_.seed(seq);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  SeededRng substream(std::uint64_t s) const {
    return SeededRng(seed_, mix64(stream_ ^ mix64(s)));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace torusreg
