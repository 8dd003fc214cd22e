#pragma once

// Deterministic direction sampling. Every sample is a pure function of
// (seed, index), so loops can be reordered or split without changing output.

#include "hypshadow/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace hypshadow {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index);

/// Unit Gaussian direction in R^n.
std::vector<double> gaussian_direction(std::size_t n, std::uint64_t seed, std::uint64_t index);

/// Dyadic rounding (2^-bits) of a direction; never the zero vector.
RVector rational_direction(const std::vector<double>& d, int bits = 24);

/// `count` directions: evenly spaced angles with a seeded phase in R^2,
/// a seeded-rotation Fibonacci sphere in R^3, Gaussian otherwise.
std::vector<std::vector<double>> sample_directions(std::size_t n, std::size_t count, std::uint64_t seed);

/// Uniform double in [0, 1) for (seed, index).
double uniform01(std::uint64_t seed, std::uint64_t index);

}  // namespace hypshadow
