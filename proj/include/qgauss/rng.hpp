#pragma once

#include <array>
#include <cstdint>

namespace qgauss {

// Philox4x32-10 counter-based generator. Output is a pure function of
// (key, counter), which is what makes sign sampling order independent.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  Counter operator()(Counter ctr) const;

  // Uniform double in [0, 1) drawn from the block at (a, b, c).
  double uniform(std::uint64_t a, std::uint64_t b, std::uint32_t c = 0) const;

  // 64 random bits from the block at (a, b, c).
  std::uint64_t bits(std::uint64_t a, std::uint64_t b, std::uint32_t c = 0) const;

 private:
  Key key_;
};

}  // namespace qgauss
