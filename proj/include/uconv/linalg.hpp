#pragma once

#include <complex>

#include <Eigen/Dense>

#include "uconv/config.hpp"

namespace uconv {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

/// Largest singular value.
double op_norm(const Matrix& a);

/// Dense Hermitian matrix. Construction validates and stores (A + A*)/2.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(const Matrix& a, const Tolerances& tol = Tolerances{});

  static HermitianMatrix zero(int n);
  static HermitianMatrix diagonal(const RealVector& d);

  const Matrix& matrix() const { return a_; }
  int size() const { return static_cast<int>(a_.rows()); }

 private:
  Matrix a_;
};

/// Dense unitary matrix, validated against Tolerances::unitarity.
class UnitaryMatrix {
 public:
  UnitaryMatrix() = default;
  explicit UnitaryMatrix(const Matrix& u, const Tolerances& tol = Tolerances{});

  static UnitaryMatrix identity(int n);
  // Caller guarantees unitarity (products and exponentials of validated data).
  static UnitaryMatrix unchecked(Matrix u);

  const Matrix& matrix() const { return u_; }
  int size() const { return static_cast<int>(u_.rows()); }

 private:
  Matrix u_;
};

/// Eigenangles in (-pi, pi], sorted non-increasing, with an orthonormal
/// eigenbasis in the matching column order. Each column is scaled so that
/// its largest-modulus entry is real and positive.
struct SpectralDecomposition {
  RealVector angles;
  Matrix vectors;
};

UnitaryMatrix expm_i(const HermitianMatrix& x, double t);

/// Principal branch: returns z with e^{iz} = u and spectrum in (-pi, pi).
/// Throws BranchError when an eigenvalue lies within Tolerances::gap of -1.
HermitianMatrix principal_log_unitary(const UnitaryMatrix& u, const Tolerances& tol = Tolerances{});

SpectralDecomposition eig_unitary(const UnitaryMatrix& u, const Tolerances& tol = Tolerances{});

/// |u - 1| in operator norm, i.e. 2 max |sin(theta_k / 2)|.
double dist_to_identity(const UnitaryMatrix& u);
double dist_to_identity(const RealVector& angles);

/// Frobenius norm of xy - yx.
double commutator_norm(const HermitianMatrix& x, const HermitianMatrix& y);

/// Eigenvalues of a Hermitian matrix, sorted non-increasing.
RealVector hermitian_eigenvalues(const HermitianMatrix& x);

/// min_{j != k} |e^{i a_j} - e^{i a_k}|; 2 for a single angle.
double min_chord_gap(const RealVector& angles);

/// Maps an angle into (-pi, pi].
double wrap_angle(double a);

namespace detail {

// Schur-based spectral decomposition of a (numerically) normal matrix with
// no validation of unitarity. Residual is still checked.
SpectralDecomposition normal_eig(const Matrix& u, const Tolerances& tol);

Matrix block_diagonal(const Matrix& a, const Matrix& b);

}  // namespace detail

}  // namespace uconv
