#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "uconv/eigen_flow.hpp"
#include "uconv/linalg.hpp"

namespace uconv {

using Rng = std::mt19937_64;

/// Independent per-trial seed; stable across runs and worker counts.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Standard Gaussian real diagonal, Gaussian real and imaginary parts above it.
HermitianMatrix random_hermitian(int n, Rng& rng);

/// Haar-distributed unitary (QR of a complex Gaussian matrix, phases fixed).
UnitaryMatrix random_unitary(int n, Rng& rng);

/// max_i |e^{i t_i x} e^{iy} - 1| over the grid.
double max_distance(const HermitianMatrix& x, const HermitianMatrix& y, const std::vector<double>& grid);

/// Rescales (x, y) by one common factor so that the path on [0, 1] has
/// max_t |u(t) - 1| as close to `target` as bisection allows, never above it
/// on the given number of grid points.
GeodesicPath scale_to_radius(const HermitianMatrix& x, const HermitianMatrix& y, double target, int points);

/// Random Gaussian generators rescaled to the target radius.
GeodesicPath random_path(int n, double target, Rng& rng, int points = 401);

/// x = Q diag(a) Q*, y = Q diag(b) Q* for a Haar Q and Gaussian a, b.
std::pair<HermitianMatrix, HermitianMatrix> random_commuting_pair(int n, Rng& rng);

/// Strictly decreasing weights with consecutive gaps of at least min_gap.
RealVector random_strict_weights(int n, Rng& rng, double min_gap = 0.1);

}  // namespace uconv
