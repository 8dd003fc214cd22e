#include "hypshadow/sampling.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace hypshadow {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 finalizer over a combined state
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> gaussian_direction(std::size_t n, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(mix_seed(seed, index));
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  double norm = 0;
  while (norm < 1e-6) {
    norm = 0;
    for (auto& x : v) {
      x = g(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (auto& x : v) x /= norm;
  return v;
}

RVector rational_direction(const std::vector<double>& d, int bits) {
  RVector r = round_dyadic(d, bits);
  if (is_zero(r)) {
    std::size_t big = 0;
    for (std::size_t i = 1; i < d.size(); ++i)
      if (std::abs(d[i]) > std::abs(d[big])) big = i;
    r[big] = d[big] < 0 ? -1 : 1;
  }
  return r;
}

double uniform01(std::uint64_t seed, std::uint64_t index) {
  return static_cast<double>(mix_seed(seed, index) >> 11) * 0x1.0p-53;
}

std::vector<std::vector<double>> sample_directions(std::size_t n, std::size_t count, std::uint64_t seed) {
  std::vector<std::vector<double>> out;
  out.reserve(count);
  if (n == 2) {
    const double phase = 2 * std::numbers::pi * uniform01(seed, 0) / static_cast<double>(count);
    for (std::size_t i = 0; i < count; ++i) {
      const double a = phase + 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
      out.push_back({std::cos(a), std::sin(a)});
    }
    return out;
  }
  if (n == 3) {
    // Fibonacci lattice, then a seeded rotation (axis-angle via Rodrigues).
    const std::vector<double> axis = gaussian_direction(3, seed, 0);
    const double angle = 2 * std::numbers::pi * uniform01(seed, 1);
    const double c = std::cos(angle), s = std::sin(angle);
    const double golden = std::numbers::pi * (3 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double z = 1 - (2 * static_cast<double>(i) + 1) / static_cast<double>(count);
      const double r = std::sqrt(std::max(0.0, 1 - z * z));
      const double phi = golden * static_cast<double>(i);
      const double p[3] = {r * std::cos(phi), r * std::sin(phi), z};
      const double kdotp = axis[0] * p[0] + axis[1] * p[1] + axis[2] * p[2];
      const double kxp[3] = {axis[1] * p[2] - axis[2] * p[1], axis[2] * p[0] - axis[0] * p[2],
                             axis[0] * p[1] - axis[1] * p[0]};
      std::vector<double> q(3);
      for (int k = 0; k < 3; ++k) q[static_cast<std::size_t>(k)] = p[k] * c + kxp[k] * s + axis[static_cast<std::size_t>(k)] * kdotp * (1 - c);
      out.push_back(std::move(q));
    }
    return out;
  }
  for (std::size_t i = 0; i < count; ++i) out.push_back(gaussian_direction(n, seed, i + 2));
  return out;
}

}  // namespace hypshadow
