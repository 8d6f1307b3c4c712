#include "uconv/eigen_flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "uconv/errors.hpp"

namespace uconv {

namespace {

constexpr double kPi = 3.14159265358979323846;
const double kSqrt2 = std::sqrt(2.0);

SpectralProjector contour_projector(const Matrix& u, double angle, double radius,
                                    const RealVector& spectrum, const Tolerances& tol) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ValidationError("spectral_projector: radius must be positive");
  }
  const Complex center = std::polar(1.0, angle);
  int enclosed = 0;
  for (Eigen::Index k = 0; k < spectrum.size(); ++k) {
    const double d = std::abs(std::polar(1.0, spectrum(k)) - center);
    if (std::abs(d - radius) < tol.gap) {
      std::ostringstream msg;
      msg << "contour passes within " << std::abs(d - radius) << " of eigenangle " << spectrum(k);
      throw ConditioningError(msg.str());
    }
    if (d < radius) ++enclosed;
  }
  if (enclosed == 0) throw EmptySpectrumError("contour encloses no eigenvalue");

  const Eigen::Index n = u.rows();
  const Matrix id = Matrix::Identity(n, n);
  for (int nodes = tol.contour_nodes; nodes <= tol.contour_max_nodes; nodes *= 2) {
    Matrix p = Matrix::Zero(n, n);
    for (int j = 0; j < nodes; ++j) {
      const Complex offset = std::polar(radius, 2.0 * kPi * j / nodes);
      p += offset * (id * (center + offset) - u).partialPivLu().inverse();
    }
    p /= static_cast<double>(nodes);
    if ((p * p - p).norm() < tol.projector_idempotency) {
      const double trace_defect = std::abs(p.trace() - static_cast<double>(enclosed));
      if (trace_defect > 1e-6) {
        throw ConditioningError("contour projector trace does not match enclosed multiplicity");
      }
      return SpectralProjector{std::move(p), center, radius, nodes};
    }
  }
  throw ConditioningError("contour quadrature did not reach idempotency; contour too close to spectrum");
}

// Greedy maximum-overlap matching of labelled vectors to a new eigenbasis.
std::vector<int> match_labels(const Matrix& previous, const Matrix& current, double* worst) {
  const Eigen::Index n = previous.cols();
  const Eigen::MatrixXd overlap = (current.adjoint() * previous).cwiseAbs2();  // (j, k)
  std::vector<int> assignment(static_cast<size_t>(n), -1);
  std::vector<bool> used(static_cast<size_t>(n), false);
  *worst = 1.0;
  for (Eigen::Index round = 0; round < n; ++round) {
    double best = -1.0;
    Eigen::Index bj = 0, bk = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (assignment[static_cast<size_t>(k)] >= 0) continue;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        if (overlap(j, k) > best) {
          best = overlap(j, k);
          bj = j;
          bk = k;
        }
      }
    }
    assignment[static_cast<size_t>(bk)] = static_cast<int>(bj);
    used[static_cast<size_t>(bj)] = true;
    *worst = std::min(*worst, best);
  }
  return assignment;
}

struct TrackState {
  double t = 0.0;
  RealVector angles;
  Matrix vectors;
  std::vector<SpectralProjector> projectors;
  double gap = 0.0;
};

class FrameTracker {
 public:
  FrameTracker(const GeodesicPath& path, const Tolerances& tol) : path_(path), tol_(tol) {}

  TrackState start(double t) {
    const Matrix u = path_.at(t).matrix();
    const SpectralDecomposition sd = detail::normal_eig(u, tol_);
    TrackState s;
    s.t = t;
    s.gap = checked_gap(sd.angles, t, 0);
    s.angles = sd.angles;
    s.vectors = sd.vectors;
    const double radius = std::min(s.gap / 3.0, 0.1);
    for (Eigen::Index k = 0; k < sd.angles.size(); ++k) {
      s.projectors.push_back(contour_projector(u, sd.angles(k), radius, sd.angles, tol_));
    }
    return s;
  }

  TrackState advance(const TrackState& from, double t, int grid_index, int depth) {
    const Matrix u = path_.at(t).matrix();
    const SpectralDecomposition sd = detail::normal_eig(u, tol_);
    const double gap = checked_gap(sd.angles, t, grid_index);

    double worst = 0.0;
    const std::vector<int> label = match_labels(from.vectors, sd.vectors, &worst);
    if (worst < 0.5) return refine(from, t, grid_index, depth);

    const Eigen::Index n = sd.angles.size();
    const double radius = std::min(gap / 3.0, 0.1);
    TrackState next;
    next.t = t;
    next.gap = gap;
    next.angles.resize(n);
    next.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      const double angle = sd.angles(label[static_cast<size_t>(k)]);
      SpectralProjector p = contour_projector(u, angle, radius, sd.angles, tol_);
      Matrix w;
      try {
        w = direct_rotation(from.projectors[static_cast<size_t>(k)], p);
      } catch (const TransportBreakdownError&) {
        return refine(from, t, grid_index, depth);
      }
      Eigen::VectorXcd v = p.p * (w * from.vectors.col(k));
      v.normalize();
      next.angles(k) = angle;
      next.vectors.col(k) = v;
      next.projectors.push_back(std::move(p));
    }
    const double defect =
        (next.vectors.adjoint() * next.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
    if (defect > tol_.frame_orthonormality) {
      std::ostringstream msg;
      msg << "transported basis lost orthonormality (" << defect << ") at t = " << t;
      throw FrameCorruptionError(msg.str());
    }
    return next;
  }

 private:
  double checked_gap(const RealVector& angles, double t, int grid_index) const {
    const double gap = min_chord_gap(angles);
    if (gap <= tol_.gap) {
      std::ostringstream msg;
      msg << "eigenvalues collide (gap " << gap << ") at t = " << t;
      if (grid_index >= 0) msg << " (grid point " << grid_index << ")";
      msg << "; perturb the path to distinct eigenvalues first";
      throw DegenerateSpectrumError(msg.str(), grid_index, t, gap);
    }
    return gap;
  }

  TrackState refine(const TrackState& from, double t, int grid_index, int depth) {
    if (depth >= tol_.max_refine_depth) {
      std::ostringstream msg;
      msg << "eigenvector transport broke down between t = " << from.t << " and t = " << t
          << "; refine the grid by a factor 2";
      throw TransportBreakdownError(msg.str(), from.t, t);
    }
    const double mid = 0.5 * (from.t + t);
    const TrackState half = advance(from, mid, -1, depth + 1);
    return advance(half, t, grid_index, depth + 1);
  }

  const GeodesicPath& path_;
  const Tolerances& tol_;
};

Eigen::MatrixXcd coupling(const EigenFrame& frame, const HermitianMatrix& x, int index) {
  if (index < 0 || index >= frame.points()) throw RangeError("frame index out of range");
  if (x.size() != frame.size()) throw ValidationError("dimension mismatch between frame and x");
  const Matrix& v = frame.vectors[static_cast<size_t>(index)];
  return v.adjoint() * x.matrix() * v;  // (j, k) = <x v_k, v_j>
}

void require_gap(const EigenFrame& frame, int index, const Tolerances& tol) {
  const double gap = frame.min_gap[static_cast<size_t>(index)];
  if (gap <= tol.gap) {
    std::ostringstream msg;
    msg << "second variation undefined: eigenvalue gap " << gap << " at grid point " << index;
    throw DegenerateSpectrumError(msg.str(), index, frame.grid[static_cast<size_t>(index)], gap);
  }
}

}  // namespace

GeodesicPath::GeodesicPath(HermitianMatrix x, HermitianMatrix y, double t_min, double t_max)
    : x_(std::move(x)), y_(std::move(y)), t_min_(t_min), t_max_(t_max) {
  if (x_.size() != y_.size()) throw ValidationError("GeodesicPath: x and y differ in dimension");
  if (!(t_min_ < t_max_) || !std::isfinite(t_min_) || !std::isfinite(t_max_)) {
    throw ValidationError("GeodesicPath: need finite t_min < t_max");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(x_.matrix());
  if (es.info() != Eigen::Success) throw ConvergenceError("GeodesicPath: eigensolver failed");
  x_basis_ = es.eigenvectors();
  x_spectrum_ = es.eigenvalues();
  exp_iy_ = expm_i(y_, 1.0).matrix();
}

UnitaryMatrix GeodesicPath::at(double t) const {
  const Eigen::VectorXcd phases = (Complex(0.0, t) * x_spectrum_.cast<Complex>()).array().exp().matrix();
  return UnitaryMatrix::unchecked(x_basis_ * phases.asDiagonal() * x_basis_.adjoint() * exp_iy_);
}

UnitaryMatrix evaluate(const GeodesicPath& path, double t) {
  if (!(t >= path.t_min() && t <= path.t_max())) {
    std::ostringstream msg;
    msg << "t = " << t << " outside [" << path.t_min() << ", " << path.t_max() << "]";
    throw RangeError(msg.str());
  }
  return path.at(t);
}

std::vector<double> uniform_grid(double a, double b, int points) {
  if (points < 2) throw ValidationError("grid needs at least 2 points");
  std::vector<double> g(static_cast<size_t>(points));
  const double step = (b - a) / (points - 1);
  for (int i = 0; i < points; ++i) g[static_cast<size_t>(i)] = a + step * i;
  g.back() = b;
  return g;
}

SpectralProjector spectral_projector(const UnitaryMatrix& u, double angle, double radius,
                                     const Tolerances& tol) {
  const SpectralDecomposition sd = detail::normal_eig(u.matrix(), tol);
  return contour_projector(u.matrix(), angle, radius, sd.angles, tol);
}

Matrix direct_rotation(const SpectralProjector& p0, const SpectralProjector& p1) {
  if (p0.p.rows() != p1.p.rows()) throw ValidationError("direct_rotation: dimension mismatch");
  const Eigen::Index n = p0.p.rows();
  const double distance = op_norm(p1.p - p0.p);
  if (!(distance < 1.0)) {
    std::ostringstream msg;
    msg << "direct rotation needs |p1 - p0| < 1, got " << distance;
    throw TransportBreakdownError(msg.str(), 0.0, 0.0);
  }
  const Matrix id = Matrix::Identity(n, n);
  const Matrix reflection = (2.0 * p1.p - id) * (2.0 * p0.p - id);
  const SpectralDecomposition sd = detail::normal_eig(reflection, Tolerances{});
  const Eigen::VectorXcd half =
      (Complex(0.0, 0.5) * sd.angles.cast<Complex>()).array().exp().matrix();
  return sd.vectors * half.asDiagonal() * sd.vectors.adjoint();
}

EigenFrame track_frame(const GeodesicPath& path, int points, const Tolerances& tol) {
  const std::vector<double> grid = uniform_grid(path.t_min(), path.t_max(), points);
  const int n = path.size();

  EigenFrame frame;
  frame.grid = grid;
  frame.angles.resize(points, n);
  frame.vectors.reserve(static_cast<size_t>(points));

  FrameTracker tracker(path, tol);
  TrackState state = tracker.start(grid[0]);
  for (int i = 0; i < points; ++i) {
    if (i > 0) state = tracker.advance(state, grid[static_cast<size_t>(i)], i, 0);
    frame.angles.row(i) = state.angles.transpose();
    frame.vectors.push_back(state.vectors);
    frame.ball_ok.push_back(dist_to_identity(state.angles) < kSqrt2);
    frame.min_gap.push_back(state.gap);
  }
  return frame;
}

RealVector first_variation(const EigenFrame& frame, const HermitianMatrix& x, int index,
                           const Tolerances& tol) {
  const Matrix a = coupling(frame, x, index);
  RealVector d(a.rows());
  for (Eigen::Index k = 0; k < a.rows(); ++k) {
    if (std::abs(a(k, k).imag()) > tol.imag_part) {
      std::ostringstream msg;
      msg << "first variation has imaginary part " << a(k, k).imag() << " at grid point " << index;
      throw FrameCorruptionError(msg.str());
    }
    d(k) = a(k, k).real();
  }
  return d;
}

double variation_kernel(double theta_k, double theta_j) {
  return std::sin(theta_k - theta_j) / std::norm(std::polar(1.0, theta_k) - std::polar(1.0, theta_j));
}

RealVector second_variation(const EigenFrame& frame, const HermitianMatrix& x, int index,
                            const Tolerances& tol) {
  const Matrix a = coupling(frame, x, index);
  require_gap(frame, index, tol);
  const Eigen::Index n = a.rows();
  const auto theta = frame.angles.row(index);
  RealVector d = RealVector::Zero(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j == k) continue;
      d(k) += 2.0 * variation_kernel(theta(k), theta(j)) * std::norm(a(j, k));
    }
  }
  return d;
}

double partial_sum_second_variation(const EigenFrame& frame, const HermitianMatrix& x, int index,
                                    int m, const Tolerances& tol) {
  if (m < 1 || m > frame.size()) throw ValidationError("partial sum index m out of range");
  const Matrix a = coupling(frame, x, index);
  require_gap(frame, index, tol);
  const auto theta = frame.angles.row(index);
  double s = 0.0;
  for (int k = 0; k < m; ++k) {
    for (int j = m; j < frame.size(); ++j) {
      s += 2.0 * variation_kernel(theta(k), theta(j)) * std::norm(a(j, k));
    }
  }
  return s;
}

SpectrumSamples sample_spectrum(const GeodesicPath& path, const std::vector<double>& grid,
                                const Tolerances& tol) {
  SpectrumSamples s;
  s.grid = grid;
  s.angles.resize(static_cast<Eigen::Index>(grid.size()), path.size());
  s.distance.reserve(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    const RealVector a = detail::normal_eig(path.at(grid[i]).matrix(), tol).angles;
    s.angles.row(static_cast<Eigen::Index>(i)) = a.transpose();
    s.distance.push_back(dist_to_identity(a));
  }
  return s;
}

SpectrumSamples sample_spectrum(const GeodesicPath& path, int points, const Tolerances& tol) {
  return sample_spectrum(path, uniform_grid(path.t_min(), path.t_max(), points), tol);
}

}  // namespace uconv
