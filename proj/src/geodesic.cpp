#include "uconv/geodesic.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "uconv/errors.hpp"

namespace uconv {

namespace {

double checked_distance(const RealVector& angles, const NormSpec& norm, double t, const Tolerances& tol) {
  const double limit = std::numbers::pi - tol.injectivity_margin;
  for (Eigen::Index k = 0; k < angles.size(); ++k) {
    if (std::abs(angles(k)) > limit) {
      throw InjectivityError("distance: principal log leaves the injectivity radius at t = " + std::to_string(t),
                             t);
    }
  }
  return evaluate_norm_spectrum(norm, angles);
}

}  // namespace

double distance_to_identity(const UnitaryMatrix& u, const NormSpec& norm, const Tolerances& tol) {
  validate(norm, u.size());
  const RealVector angles = hermitian_eigenvalues(principal_log_unitary(u, tol));
  return checked_distance(angles, norm, 0.0, tol);
}

DistanceProfile distance_profile(const GeodesicPath& path, const NormSpec& norm, int points, const Tolerances& tol) {
  if (points < 3) throw ValidationError("distance_profile: need at least 3 grid points");
  validate(norm, path.size());
  const SpectrumSamples s = sample_spectrum(path, points, tol);

  DistanceProfile p{path, norm, s.grid, {}, {}, {}, 0, 0};
  p.distances.reserve(s.grid.size());
  for (size_t i = 0; i < s.grid.size(); ++i) {
    const RealVector a = s.angles.row(static_cast<Eigen::Index>(i)).transpose();
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      if (std::abs(std::polar(1.0, a(k)) + 1.0) <= tol.gap) {
        throw BranchError("distance: eigenvalue at -1 at t = " + std::to_string(s.grid[i]), a(k));
      }
    }
    p.distances.push_back(checked_distance(a, norm, s.grid[i], tol));
    p.inside_ball.push_back(a.cwiseAbs().maxCoeff() < std::numbers::pi / 2);
  }

  // Angles move at speed at most |x|, so a sorted jump beyond |x| dt means an
  // eigenvalue went through -1: the log branch was left between the points.
  const double speed = hermitian_eigenvalues(path.x()).cwiseAbs().maxCoeff();
  const double dt = (path.t_max() - path.t_min()) / (points - 1);
  for (int i = 0; i + 1 < points; ++i) {
    const double jump = (s.angles.row(i + 1) - s.angles.row(i)).cwiseAbs().maxCoeff();
    if (jump > speed * dt + 1e-6) {
      const double t = s.grid[static_cast<size_t>(i + 1)];
      throw InjectivityError("distance: an eigenvalue crosses -1 before t = " + std::to_string(t) +
                                 "; the principal log leaves the injectivity radius",
                             t);
    }
  }

  int best_begin = 0, best_len = 0;
  for (int i = 0; i < points;) {
    if (!p.inside_ball[static_cast<size_t>(i)]) {
      ++i;
      continue;
    }
    int j = i;
    while (j < points && p.inside_ball[static_cast<size_t>(j)]) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_begin = i;
    }
    i = j;
  }
  if (best_len == 0) throw EmptySpectrumError("distance_profile: no grid point lies inside the sqrt(2) ball");
  p.segment_begin = best_begin;
  p.segment_end = best_begin + best_len;

  const std::span<const double> values(p.distances.data() + best_begin, static_cast<size_t>(best_len));
  const std::span<const double> grid(p.grid.data() + best_begin, static_cast<size_t>(best_len));
  const std::string label = "d(1, u(t)) " + describe(norm);
  if (best_len < 3) {
    p.certificate.label = label;
    p.certificate.grid.assign(grid.begin(), grid.end());
    p.certificate.values.assign(values.begin(), values.end());
    p.certificate.verdict = Verdict::indeterminate;
  } else {
    const int n = path.size();
    p.certificate = certify(values, grid, label, n * n, tol);
  }
  return p;
}

}  // namespace uconv
