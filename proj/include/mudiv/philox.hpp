#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit seed is the key. The 128-bit counter is split into a 64-bit
// stream index (high words) and a 64-bit draw index (low words), so stream b
// is the sequence philox(key=seed, ctr={draw, b}), draw = 0, 1, 2, ...
// Each counter value yields two 64-bit outputs.

#include <array>
#include <cstdint>
#include <limits>

namespace mudiv {

class Philox4x32 {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (next_ == 2) {
      const Block ctr{static_cast<std::uint32_t>(draw_), static_cast<std::uint32_t>(draw_ >> 32),
                      static_cast<std::uint32_t>(stream_),
                      static_cast<std::uint32_t>(stream_ >> 32)};
      const Block out = generate(ctr, key_);
      buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
      buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
      ++draw_;
      next_ = 0;
    }
    return buffer_[next_++];
  }

  /// The raw bijection: ten rounds of the Philox S-box under `key`.
  static constexpr Block generate(Block ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = Block{static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                  static_cast<std::uint32_t>(p1),
                  static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                  static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_;
  std::uint64_t stream_;
  std::uint64_t draw_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int next_ = 2;
};

}  // namespace mudiv
