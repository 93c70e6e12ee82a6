#pragma once

#include <array>
#include <cstdint>

namespace sloc {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Every output block is a pure function of (key, counter), so a stream can be
/// indexed directly instead of advanced sequentially.
class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr const char* name = "philox4x32-10/v1";

  static Block generate(const Block& counter, const Key& key);

  explicit Philox4x32(std::uint64_t seed);

  /// Uniform double in [0, 1) built from 53 random bits of block `n`.
  double uniform(std::uint64_t n) const;

 private:
  Key key_;
};

}  // namespace sloc
