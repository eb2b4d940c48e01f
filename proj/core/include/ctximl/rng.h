#ifndef CTXIML_RNG_H_
#define CTXIML_RNG_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace ctximl {

// Deterministic random streams. Each (seed, stream) pair names an
// independent generator, so work items seeded by their index give the same
// draws regardless of scheduling. Distributions are implemented here rather
// than through <random> adaptors, whose output is library-specific.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(Mix(seed, 0)) {}

  static Rng Stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t purpose = 0) {
    return Rng(Mix(Mix(seed, stream + 1), purpose + 1));
  }

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on {0, ..., n - 1}; n > 0. Rejection sampling, no modulo bias.
  std::uint64_t UniformIndex(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller.
  double Normal();

  bool Bernoulli(double p) { return Uniform() < p; }

  // k distinct indices from {0, ..., n - 1} in draw order (partial
  // Fisher-Yates).
  std::vector<std::size_t> SampleWithoutReplacement(std::size_t n, std::size_t k);

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[UniformIndex(i)]);
  }

  static std::uint64_t Mix(std::uint64_t a, std::uint64_t b);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace ctximl

#endif  // CTXIML_RNG_H_
