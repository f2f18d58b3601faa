#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace vcde {

// splitmix64 finalizer; used for content hashing and for deriving
// independent per-index RNG streams in parallel kernels.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return mix64(a ^ (0x9e3779b97f4a7c15ULL + (b << 6) + (b >> 2)) ^ mix64(b));
}

// Tiny counter-based generator for embarrassingly parallel Monte Carlo:
// one instance per sample index gives identical streams regardless of the
// number of threads.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform01() { return (next() >> 11) * 0x1.0p-53; }

private:
  std::uint64_t state_;
};

// Sequential RNG for the MCMC chain. The mt19937_64 engine is bit-exact by
// the standard; the distributions are hand-rolled because the std:: ones are
// implementation-defined and would break byte-for-byte chain reproducibility.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // in [0, 1)
  double uniform01() { return (eng_() >> 11) * 0x1.0p-53; }

  // uniform on {0, ..., n-1}, n >= 1; rejection sampling keeps it unbiased
  std::uint64_t uniform_int(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % n;
  }

  // standard normal, Box-Muller with a cached spare
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1, u2;
    do {
      u1 = uniform01();
    } while (u1 <= 0.0);
    u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  // Gamma(shape, 1), Marsaglia-Tsang; shape < 1 handled by the boost trick
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = std::max(uniform01(), 1e-300);
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Dirichlet(alpha) via normalized gammas
  std::vector<double> dirichlet(const std::vector<double>& alpha) {
    std::vector<double> out(alpha.size());
    double sum = 0.0;
    for (std::size_t k = 0; k < alpha.size(); ++k) {
      out[k] = gamma(alpha[k]);
      sum += out[k];
    }
    for (double& v : out) v /= sum;
    return out;
  }

private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace vcde
