#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uconv/config.hpp"
#include "uconv/eigen_flow.hpp"
#include "uconv/linalg.hpp"
#include "uconv/norms.hpp"

namespace uconv {

enum class Verdict { convex, concave, linear, nonconvex, indeterminate };

std::string to_string(Verdict v);

/// Discrete convexity test of a sampled scalar function on a uniform grid.
///
/// second_differences[i] = (f[i+2] - 2 f[i+1] + f[i]) / dt^2. Entries with
/// magnitude above the tolerance are grouped into runs of consecutive indices;
/// a run of length L counts as ceil(L/2) kinks (a corner between two grid
/// points shows up in two adjacent stencils).
struct ConvexityCertificate {
  std::string label;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<double> second_differences;
  double min_second_difference = 0.0;
  Verdict verdict = Verdict::indeterminate;
  std::optional<int> offending_index;
  int kinks = 0;
  bool piecewise_linear = false;  // kinks <= max_kinks
};

/// Verdicts: linear, convex, nonconvex (with offending index), or
/// indeterminate for non-finite samples. Never returns concave.
ConvexityCertificate certify(std::span<const double> values, std::span<const double> grid,
                             std::string label, int max_kinks = 0,
                             const Tolerances& tol = Tolerances{});

/// Concavity test: certifies the negated samples and reports concave where
/// that certificate is convex. A failure keeps the verdict nonconvex (of -f).
/// The returned samples and second differences are those of f itself.
ConvexityCertificate certify_concave(std::span<const double> values, std::span<const double> grid,
                                     std::string label, const Tolerances& tol = Tolerances{});

/// Row i: sums of the m largest entries of row i of `angles`, m = 1..n.
Eigen::MatrixXd partial_sums_sorted(const Eigen::MatrixXd& angles);
/// Row i, column m-1: sum of the sorted entries m..n (the tail sums).
Eigen::MatrixXd tail_sums_sorted(const Eigen::MatrixXd& angles);

/// s_m(t_i) from per-point re-sorted angles (order statistics, not labels).
Eigen::MatrixXd partial_angle_sums(const EigenFrame& frame);

/// rho(u) = u (+) conj(u).
UnitaryMatrix double_spectrum(const UnitaryMatrix& u);

/// The path t -> rho(u(t)) with generators x (+) -conj(x), y (+) -conj(y).
GeodesicPath doubled_path(const GeodesicPath& path);

/// Row i, column m-1: sum of the m largest singular values of the principal
/// log of u(t_i), read off the sorted angles of the doubled path.
/// Throws RadiusError at the first grid point with |u(t) - 1| >= sqrt(2).
Eigen::MatrixXd partial_singular_sums(const GeodesicPath& path, int points,
                                      const Tolerances& tol = Tolerances{});

struct PerturbationReport {
  HermitianMatrix z;
  double magnitude = 0.0;
  HermitianMatrix y_new;
  double min_gap_achieved = 0.0;
  int attempts = 0;
};

/// Replaces y by y_new with e^{i y_new} = e^{iz} e^{iy}, z trace-orthogonal
/// to x, so that u_new(t) has distinct eigenvalues on every grid point.
PerturbationReport perturb_to_distinct(const GeodesicPath& path, int points, std::uint64_t seed,
                                       const Tolerances& tol = Tolerances{});

struct CommutationReport {
  bool commute = false;
  double min_curvature = 0.0;
  double commutator_norm = 0.0;
  bool agree = false;  // certificate and commutator norm tell the same story
  ConvexityCertificate certificate;
};

/// Certifies f(t) = sum mu_k theta_(k)(t): for strictly decreasing mu this is
/// piecewise linear exactly when [x, y] = 0, and strictly convex otherwise.
CommutationReport detect_commutation(const GeodesicPath& path, int points, const CartanVector& mu,
                                     const Tolerances& tol = Tolerances{});

/// min over permutations s of sum |a_k - b_{s(k)}|^2 (n <= 8).
double permutation_matching_min(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b);

/// Eigenvalues of a normal matrix (complex Schur diagonal).
Eigen::VectorXcd normal_eigenvalues(const Matrix& a);

struct RadiusScanOptions {
  int grid = 401;
  int witness_trials = -1;          // < 0: same as trials
  double inside_min_radius = 0.05;
  double inside_max_radius = 1.40;  // strictly below sqrt(2)
  double outside_width = 0.3;       // witnesses searched in (sqrt(2), sqrt(2) + width)
  unsigned threads = 0;             // 0: hardware concurrency
};

struct ScanRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string region;  // "inside" or "outside"
  double radius = 0.0;
  std::vector<double> min_second_difference;  // per m = 1..n
  Verdict verdict = Verdict::indeterminate;
};

struct RadiusWitness {
  HermitianMatrix x;
  HermitianMatrix y;
  double radius = 0.0;
  double t_star = 0.0;
  int m = 0;
  double second_difference = 0.0;
  double second_difference_double_grid = 0.0;
  std::uint64_t seed = 0;
};

struct RadiusScanResult {
  int n = 0;
  int inside_trials = 0;
  int inside_violations = 0;
  int witness_trials_used = 0;
  std::optional<RadiusWitness> outside_example;
  std::vector<ScanRow> rows;
};

RadiusScanResult radius_scan(int n, int trials, std::uint64_t seed,
                             const RadiusScanOptions& options = RadiusScanOptions{},
                             const Tolerances& tol = Tolerances{});

}  // namespace uconv
