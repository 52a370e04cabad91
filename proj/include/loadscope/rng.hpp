#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <vector>

namespace loadscope {

/// xoshiro256** seeded through splitmix64. Every draw is defined here rather
/// than through <random> distributions, so sequences are identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  /// Student t with `df` degrees of freedom.
  double student_t(double df);
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stable 64-bit mix of a seed with task coordinates; used for per-task seeds
/// so parallel and serial runs draw identical streams.
std::uint64_t task_seed(std::uint64_t global_seed, std::initializer_list<std::uint64_t> parts);
std::uint64_t hash_string(std::string_view s);

}  // namespace loadscope
