#pragma once

#include <cstdint>

namespace cfqkd {

// splitmix64 stream. Small state, full 64-bit output, and cheap keyed
// derivation, which is what the per-round substream scheme needs.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

  int bit() { return static_cast<int>(next() >> 63); }

  // uniform integer in [0, n)
  std::uint64_t below(std::uint64_t n) { return next() % n; }

 private:
  std::uint64_t state_;
};

// Independent substream key for round `index` of a session. Rounds may then
// be evaluated in any order or in parallel and still draw identical values.
inline std::uint64_t derive_stream_seed(std::uint64_t session_seed,
                                        std::uint64_t index) {
  SplitMix64 mixer(session_seed ^ (index * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  return mixer.next();
}

}  // namespace cfqkd
