#pragma once

#include <vector>

#include "uconv/config.hpp"
#include "uconv/linalg.hpp"

namespace uconv {

/// The geodesic segment t -> e^{itx} e^{iy} on [t_min, t_max].
class GeodesicPath {
 public:
  GeodesicPath(HermitianMatrix x, HermitianMatrix y, double t_min = 0.0, double t_max = 1.0);

  const HermitianMatrix& x() const { return x_; }
  const HermitianMatrix& y() const { return y_; }
  double t_min() const { return t_min_; }
  double t_max() const { return t_max_; }
  int size() const { return x_.size(); }

  // e^{itx} e^{iy} for any real t; evaluate() is the range-checked entry point.
  UnitaryMatrix at(double t) const;

 private:
  HermitianMatrix x_;
  HermitianMatrix y_;
  double t_min_;
  double t_max_;
  Matrix x_basis_;
  RealVector x_spectrum_;
  Matrix exp_iy_;
};

UnitaryMatrix evaluate(const GeodesicPath& path, double t);

/// G equally spaced points from a to b, endpoints exact.
std::vector<double> uniform_grid(double a, double b, int points);

/// Smoothly labeled eigen-data along a grid.
///
/// Row i of `angles` holds theta_k(t_i) for the labels fixed at t_min by the
/// sorted order; rows are not re-sorted. Angles stay in (-pi, pi].
struct EigenFrame {
  std::vector<double> grid;
  Eigen::MatrixXd angles;
  std::vector<Matrix> vectors;
  std::vector<bool> ball_ok;
  std::vector<double> min_gap;

  int points() const { return static_cast<int>(grid.size()); }
  int size() const { return static_cast<int>(angles.cols()); }
};

/// Riesz projection (1/2 pi i) \oint (lambda - u)^{-1} d lambda over a circle.
struct SpectralProjector {
  Matrix p;
  Complex center;
  double radius = 0.0;
  int nodes = 0;
};

SpectralProjector spectral_projector(const UnitaryMatrix& u, double angle, double radius,
                                     const Tolerances& tol = Tolerances{});

/// Unitary w = exp(0.5 log(e1 e0)), e_i = 2 p_i - 1, carrying ran(p0) onto ran(p1).
Matrix direct_rotation(const SpectralProjector& p0, const SpectralProjector& p1);

EigenFrame track_frame(const GeodesicPath& path, int points, const Tolerances& tol = Tolerances{});

/// theta_k' = <x v_k, v_k>.
RealVector first_variation(const EigenFrame& frame, const HermitianMatrix& x, int index,
                           const Tolerances& tol = Tolerances{});

/// sin(a - b) / |e^{ia} - e^{ib}|^2, which equals cot((a - b) / 2) / 2.
double variation_kernel(double theta_k, double theta_j);

/// theta_k'' = 2 sum_{j != k} kernel(theta_k, theta_j) |<x v_k, v_j>|^2.
RealVector second_variation(const EigenFrame& frame, const HermitianMatrix& x, int index,
                            const Tolerances& tol = Tolerances{});

/// Sum of the first m labels' second variations, computed from the cross
/// terms only (k <= m < j); the within-block terms cancel pairwise.
double partial_sum_second_variation(const EigenFrame& frame, const HermitianMatrix& x, int index,
                                    int m, const Tolerances& tol = Tolerances{});

/// Per-point eigensolves without transport: angles sorted non-increasing at
/// every grid point, together with |u(t) - 1|.
struct SpectrumSamples {
  std::vector<double> grid;
  Eigen::MatrixXd angles;
  std::vector<double> distance;
};

SpectrumSamples sample_spectrum(const GeodesicPath& path, const std::vector<double>& grid,
                                const Tolerances& tol = Tolerances{});
SpectrumSamples sample_spectrum(const GeodesicPath& path, int points,
                                const Tolerances& tol = Tolerances{});

}  // namespace uconv
