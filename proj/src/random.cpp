#include "uconv/random.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "uconv/errors.hpp"

namespace uconv {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

HermitianMatrix random_hermitian(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = normal(rng);
    for (int j = i + 1; j < n; ++j) {
      const double re = normal(rng);
      const double im = normal(rng);
      a(i, j) = Complex(re, im);
      a(j, i) = Complex(re, -im);
    }
  }
  return HermitianMatrix(a);
}

UnitaryMatrix random_unitary(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = Complex(normal(rng), normal(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return UnitaryMatrix(q);
}

double max_distance(const HermitianMatrix& x, const HermitianMatrix& y, const std::vector<double>& grid) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.matrix());
  const Matrix base = expm_i(y, 1.0).matrix();
  const Matrix& v = es.eigenvectors();
  double worst = 0.0;
  Eigen::ComplexSchur<Matrix> schur(x.size());
  for (double t : grid) {
    const Eigen::VectorXcd phases = (Complex(0.0, t) * es.eigenvalues().cast<Complex>()).array().exp().matrix();
    schur.compute(v * phases.asDiagonal() * v.adjoint() * base, false);
    for (Eigen::Index k = 0; k < schur.matrixT().rows(); ++k) {
      worst = std::max(worst, std::abs(schur.matrixT()(k, k) - 1.0));
    }
  }
  return worst;
}

GeodesicPath scale_to_radius(const HermitianMatrix& x, const HermitianMatrix& y, double target, int points) {
  if (!(target > 0.0 && target < 2.0)) throw ValidationError("target radius must lie in (0, 2)");
  const std::vector<double> fine = uniform_grid(0.0, 1.0, points);
  const std::vector<double> coarse = uniform_grid(0.0, 1.0, std::min(points, 101));
  auto scaled = [&](double c) { return std::pair{HermitianMatrix(c * x.matrix()), HermitianMatrix(c * y.matrix())}; };
  auto radius = [&](double c, const std::vector<double>& grid) {
    const auto [sx, sy] = scaled(c);
    return max_distance(sx, sy, grid);
  };

  double hi = 1.0;
  for (int it = 0; radius(hi, coarse) < target; ++it) {
    if (it > 60) throw NumericError("scale_to_radius: target radius not reachable");
    hi *= 2.0;
  }
  double lo = 0.0;
  while (hi - lo > 1e-12 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (radius(mid, coarse) <= target) lo = mid; else hi = mid;
  }
  // The fine grid can only see a larger maximum; shrink until it agrees.
  for (int it = 0; it < 100; ++it) {
    const double r = radius(lo, fine);
    if (r <= target) break;
    lo *= (target / r) * (1.0 - 1e-12);
  }
  const auto [sx, sy] = scaled(lo);
  return GeodesicPath(sx, sy, 0.0, 1.0);
}

GeodesicPath random_path(int n, double target, Rng& rng, int points) {
  const HermitianMatrix x = random_hermitian(n, rng);
  const HermitianMatrix y = random_hermitian(n, rng);
  return scale_to_radius(x, y, target, points);
}

std::pair<HermitianMatrix, HermitianMatrix> random_commuting_pair(int n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const Matrix q = random_unitary(n, rng).matrix();
  RealVector a(n), b(n);
  for (int i = 0; i < n; ++i) a(i) = normal(rng);
  for (int i = 0; i < n; ++i) b(i) = normal(rng);
  const Matrix x = q * a.cast<Complex>().asDiagonal() * q.adjoint();
  const Matrix y = q * b.cast<Complex>().asDiagonal() * q.adjoint();
  return {HermitianMatrix(x), HermitianMatrix(y)};
}

RealVector random_strict_weights(int n, Rng& rng, double min_gap) {
  std::uniform_real_distribution<double> step(min_gap, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  RealVector mu(n);
  mu(0) = normal(rng);
  for (int i = 1; i < n; ++i) mu(i) = mu(i - 1) - step(rng);
  return mu;
}

}  // namespace uconv
