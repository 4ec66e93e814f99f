#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace bdp {

// Philox4x32-10 counter-based generator. The 64-bit master seed forms
// the key; the 128-bit counter is split into a 64-bit draw index and a
// 64-bit stream id, so every Monte Carlo trial owns an independent
// stream addressed by (seed, trial index) with no sequential seeding.
// Output is a pure function of (key, counter): trials can run on any
// number of threads and still produce identical draws.
class Philox4x32 {
 public:
  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0, 0, static_cast<std::uint32_t>(stream),
             static_cast<std::uint32_t>(stream >> 32)} {}

  // One 128-bit block; advances the draw index.
  std::array<std::uint32_t, 4> block() {
    std::array<std::uint32_t, 4> c = ctr_;
    std::array<std::uint32_t, 2> k = key_;
    for (int round = 0; round < 9; ++round) {
      c = round_once(c, k);
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    c = round_once(c, k);
    if (++ctr_[0] == 0) ++ctr_[1];
    return c;
  }

  std::uint64_t next_u64() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    const auto b = block();
    spare_ = (static_cast<std::uint64_t>(b[3]) << 32) | b[2];
    have_ = true;
    return (static_cast<std::uint64_t>(b[1]) << 32) | b[0];
  }

  // Uniform strictly inside (0, 1).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double next_exponential(double rate) {
    return -std::log(next_unit()) / rate;
  }

  bool next_bernoulli(double p_true) { return next_unit() < p_true; }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> round_once(
      const std::array<std::uint32_t, 4>& c,
      const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0],
            static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1],
            static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::uint64_t spare_ = 0;
  bool have_ = false;
};

}  // namespace bdp
