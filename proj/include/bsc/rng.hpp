#pragma once

#include <array>
#include <cstdint>

namespace bsc {

// Philox4x32-10 block function (Salmon et al., Random123).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key);
};

// Counter-based stream: the key is the 64-bit seed, the counter advances by
// one block per four 32-bit words. Two streams with different seeds never
// share state, so replication i can simply use seed base + i.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_{static_cast<std::uint32_t>(seed),
                                                 static_cast<std::uint32_t>(seed >> 32)} {}

  std::uint64_t next_u64();
  // Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double exponential(double rate);
  // Logistic(location, scale) by inversion.
  double logistic(double location, double scale);

 private:
  Philox4x32::Key key_;
  std::uint64_t block_index_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

}  // namespace bsc
