#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace imbal {

// Master seed for every stochastic operation. Same seed + same inputs must
// give bit-identical outputs, so all randomness below is built from the
// standard-specified mt19937_64 engine with hand-rolled distributions
// (library distributions are not portable across implementations).
struct Seed {
  std::uint64_t value = 0;
};

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

// Mixes a master seed with integer or string labels. Used to derive
// independent sub-seeds, e.g. per (dataset, technique, repetition) cell or
// per forest member, so parallel work never shares RNG state.
inline std::uint64_t derive_seed(std::uint64_t master) {
  std::uint64_t s = master;
  return detail::splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t label) {
  std::uint64_t s = master ^ (0x9e3779b97f4a7c15ULL + label);
  std::uint64_t z = detail::splitmix64(s);
  s ^= z + label;
  return detail::splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view label) {
  // FNV-1a over the label, then mixed with the master.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return derive_seed(master, h);
}

template <typename First, typename Second, typename... Rest>
std::uint64_t derive_seed(std::uint64_t master, First first, Second second, Rest... rest) {
  return derive_seed(derive_seed(master, first), second, rest...);
}

template <typename... Labels>
Seed derive_seed(Seed master, Labels... labels) {
  return Seed{derive_seed(master.value, labels...)};
}

class Rng {
 public:
  explicit Rng(Seed seed) : engine_(seed.value) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform index in [0, n). Lemire-style multiply-shift; n must be > 0.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(
        (static_cast<unsigned __int128>(engine_()) * n) >> 64);
  }

  // Standard normal via Box-Muller. Two uniforms per draw, no caching, so
  // the output stream depends only on call order.
  double normal() {
    double u1 = uniform();
    double u2 = uniform();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Fisher-Yates shuffle of an index vector.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = uniform_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct indices from [0, n) via partial Fisher-Yates, in draw order.
  std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  // Weighted index draw; weights must be non-negative with positive sum.
  std::size_t weighted_index(const std::vector<double>& weights);

  // Independent child generator; advancing the child does not disturb the parent.
  Rng fork(std::uint64_t label) { return Rng(derive_seed(engine_(), label)); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace imbal
