#include "uconv/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "uconv/errors.hpp"

namespace uconv {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_square_finite(const Matrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw ValidationError(std::string(what) + ": matrix must be square and non-empty");
  }
  if (!a.allFinite()) {
    throw ValidationError(std::string(what) + ": non-finite entry");
  }
}

// Largest-modulus entry made real positive; ties go to the first index.
void normalize_phase(Eigen::Ref<Eigen::VectorXcd> v) {
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > best_abs * (1.0 + 1e-12)) {
      best_abs = a;
      best = i;
    }
  }
  if (best_abs > 0.0) {
    v *= std::conj(v(best)) / best_abs;
    v(best) = best_abs;
  }
}

double first_nonzero_imag(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) > 1e-14) return v(i).imag();
  }
  return 0.0;
}

}  // namespace

double op_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

HermitianMatrix::HermitianMatrix(const Matrix& a, const Tolerances& tol) {
  require_square_finite(a, "HermitianMatrix");
  const Matrix skew = a - a.adjoint();
  const double defect = op_norm(skew);
  if (defect > tol.hermiticity * op_norm(a)) {
    std::ostringstream msg;
    msg << "matrix is not Hermitian: |A - A*| = " << defect;
    throw ValidationError(msg.str());
  }
  a_ = 0.5 * (a + a.adjoint());
}

HermitianMatrix HermitianMatrix::zero(int n) { return HermitianMatrix(Matrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::diagonal(const RealVector& d) {
  return HermitianMatrix(d.cast<Complex>().asDiagonal().toDenseMatrix());
}

UnitaryMatrix::UnitaryMatrix(const Matrix& u, const Tolerances& tol) {
  require_square_finite(u, "UnitaryMatrix");
  const Matrix defect = u.adjoint() * u - Matrix::Identity(u.rows(), u.cols());
  const double d = op_norm(defect);
  if (d > tol.unitarity) {
    std::ostringstream msg;
    msg << "matrix is not unitary: |U*U - 1| = " << d;
    throw ValidationError(msg.str());
  }
  u_ = u;
}

UnitaryMatrix UnitaryMatrix::identity(int n) { return unchecked(Matrix::Identity(n, n)); }

UnitaryMatrix UnitaryMatrix::unchecked(Matrix u) {
  UnitaryMatrix r;
  r.u_ = std::move(u);
  return r;
}

UnitaryMatrix expm_i(const HermitianMatrix& x, double t) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.matrix());
  if (es.info() != Eigen::Success) throw ConvergenceError("expm_i: Hermitian eigensolver failed");
  const Eigen::VectorXcd phases =
      (Complex(0.0, t) * es.eigenvalues().cast<Complex>()).array().exp().matrix();
  return UnitaryMatrix::unchecked(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

namespace detail {

SpectralDecomposition normal_eig(const Matrix& u, const Tolerances& tol) {
  const Eigen::Index n = u.rows();
  Eigen::ComplexSchur<Matrix> schur(u);
  if (schur.info() != Eigen::Success) {
    throw ConvergenceError("eigensolver failed to converge");
  }
  const Matrix& tri = schur.matrixT();
  Matrix q = schur.matrixU();

  RealVector raw(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    raw(k) = std::arg(tri(k, k));
    if (raw(k) <= -kPi) raw(k) = kPi;
    normalize_phase(q.col(k));
  }

  std::vector<Eigen::Index> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::vector<double> tie_key(static_cast<size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) tie_key[static_cast<size_t>(k)] = first_nonzero_imag(q.col(k));
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (raw(a) != raw(b)) return raw(a) > raw(b);
    return tie_key[static_cast<size_t>(a)] > tie_key[static_cast<size_t>(b)];
  });

  SpectralDecomposition sd;
  sd.angles.resize(n);
  sd.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<size_t>(k)];
    sd.angles(k) = raw(src);
    sd.vectors.col(k) = q.col(src);
  }

  double residual = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex lambda = std::polar(1.0, sd.angles(k));
    residual = std::max(residual, (u * sd.vectors.col(k) - lambda * sd.vectors.col(k)).norm());
  }
  if (residual > tol.eig_residual) {
    std::ostringstream msg;
    msg << "eigen-decomposition residual " << residual << " exceeds " << tol.eig_residual;
    throw ConvergenceError(msg.str());
  }
  return sd;
}

Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix r = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  r.topLeftCorner(a.rows(), a.cols()) = a;
  r.bottomRightCorner(b.rows(), b.cols()) = b;
  return r;
}

}  // namespace detail

SpectralDecomposition eig_unitary(const UnitaryMatrix& u, const Tolerances& tol) {
  SpectralDecomposition sd = detail::normal_eig(u.matrix(), tol);
  const Eigen::Index n = sd.vectors.cols();
  const double ortho =
      (sd.vectors.adjoint() * sd.vectors - Matrix::Identity(n, n)).cwiseAbs().maxCoeff();
  if (ortho > tol.orthonormality) {
    std::ostringstream msg;
    msg << "eigenbasis not orthonormal (defect " << ortho << ")";
    throw ConvergenceError(msg.str());
  }
  return sd;
}

HermitianMatrix principal_log_unitary(const UnitaryMatrix& u, const Tolerances& tol) {
  const SpectralDecomposition sd = eig_unitary(u, tol);
  for (Eigen::Index k = 0; k < sd.angles.size(); ++k) {
    if (std::abs(std::polar(1.0, sd.angles(k)) + 1.0) <= tol.gap) {
      std::ostringstream msg;
      msg << "principal log undefined: eigenangle " << sd.angles(k) << " is within "
          << tol.gap << " of pi";
      throw BranchError(msg.str(), sd.angles(k));
    }
  }
  const Matrix z = sd.vectors * sd.angles.cast<Complex>().asDiagonal() * sd.vectors.adjoint();
  return HermitianMatrix(0.5 * (z + z.adjoint()), tol);
}

double dist_to_identity(const RealVector& angles) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < angles.size(); ++k) {
    m = std::max(m, std::abs(std::sin(0.5 * angles(k))));
  }
  return 2.0 * m;
}

double dist_to_identity(const UnitaryMatrix& u) {
  return dist_to_identity(detail::normal_eig(u.matrix(), Tolerances{}).angles);
}

double commutator_norm(const HermitianMatrix& x, const HermitianMatrix& y) {
  if (x.size() != y.size()) throw ValidationError("commutator_norm: dimension mismatch");
  const Matrix c = x.matrix() * y.matrix() - y.matrix() * x.matrix();
  return c.norm();
}

RealVector hermitian_eigenvalues(const HermitianMatrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(x.matrix(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("Hermitian eigensolver failed");
  return es.eigenvalues().reverse();
}

double min_chord_gap(const RealVector& angles) {
  double gap = 2.0;
  for (Eigen::Index j = 0; j < angles.size(); ++j) {
    for (Eigen::Index k = j + 1; k < angles.size(); ++k) {
      gap = std::min(gap, std::abs(std::polar(1.0, angles(j)) - std::polar(1.0, angles(k))));
    }
  }
  return gap;
}

}  // namespace uconv
