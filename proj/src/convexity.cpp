#include "uconv/convexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "uconv/errors.hpp"
#include "uconv/parallel.hpp"
#include "uconv/random.hpp"

namespace uconv {

namespace {

const double kSqrt2 = std::sqrt(2.0);

double step_of(std::span<const double> grid, const Tolerances& tol) {
  const auto g = static_cast<double>(grid.size());
  const double dt = (grid.back() - grid.front()) / (g - 1.0);
  if (!(dt > 0.0)) throw ValidationError("certify: grid must be strictly increasing");
  for (size_t i = 1; i < grid.size(); ++i) {
    if (std::abs((grid[i] - grid[i - 1]) - dt) > tol.grid_uniformity * dt + 4.0 * 2.2e-16 * std::abs(grid[i])) {
      throw ValidationError("certify: grid is not uniform at index " + std::to_string(i));
    }
  }
  return dt;
}

int count_kinks(const std::vector<double>& d2, double threshold) {
  int kinks = 0;
  int run = 0;
  for (double v : d2) {
    if (std::abs(v) > threshold) {
      ++run;
    } else {
      kinks += (run + 1) / 2;
      run = 0;
    }
  }
  return kinks + (run + 1) / 2;
}

void require_inside(const SpectrumSamples& s, const char* who) {
  for (size_t i = 0; i < s.distance.size(); ++i) {
    if (!(s.distance[i] < kSqrt2)) {
      throw RadiusError(std::string(who) + ": |u(t) - 1| >= sqrt(2) at t = " + std::to_string(s.grid[i]),
                        static_cast<int>(i), s.grid[i]);
    }
  }
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> out(static_cast<size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<size_t>(i)] = m(i, c);
  return out;
}

double grid_min_gap(const SpectrumSamples& s) {
  double gap = 2.0;
  for (Eigen::Index i = 0; i < s.angles.rows(); ++i) {
    gap = std::min(gap, min_chord_gap(s.angles.row(i).transpose()));
  }
  return gap;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::convex: return "convex";
    case Verdict::concave: return "concave";
    case Verdict::linear: return "linear";
    case Verdict::nonconvex: return "nonconvex";
    case Verdict::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

ConvexityCertificate certify(std::span<const double> values, std::span<const double> grid, std::string label,
                             int max_kinks, const Tolerances& tol) {
  if (values.size() != grid.size()) throw ValidationError("certify: values and grid differ in length");
  if (grid.size() < 3) throw ValidationError("certify: need at least 3 grid points");
  const double dt = step_of(grid, tol);

  ConvexityCertificate c;
  c.label = std::move(label);
  c.grid.assign(grid.begin(), grid.end());
  c.values.assign(values.begin(), values.end());
  const size_t g = values.size();
  c.second_differences.resize(g - 2);
  bool finite = true;
  for (size_t i = 0; i + 2 < g; ++i) {
    const double d = (values[i + 2] - 2.0 * values[i + 1] + values[i]) / (dt * dt);
    c.second_differences[i] = d;
    finite = finite && std::isfinite(d);
  }
  if (!finite) {
    c.min_second_difference = std::nan("");
    c.verdict = Verdict::indeterminate;
    return c;
  }
  const auto lo = std::min_element(c.second_differences.begin(), c.second_differences.end());
  c.min_second_difference = *lo;
  double max_abs = 0.0;
  for (double d : c.second_differences) max_abs = std::max(max_abs, std::abs(d));
  c.kinks = count_kinks(c.second_differences, tol.conv);
  c.piecewise_linear = c.kinks <= max_kinks;
  if (max_abs <= tol.conv) {
    c.verdict = Verdict::linear;
  } else if (*lo >= -tol.conv) {
    c.verdict = Verdict::convex;
  } else {
    c.verdict = Verdict::nonconvex;
    c.offending_index = static_cast<int>(lo - c.second_differences.begin());
  }
  return c;
}

ConvexityCertificate certify_concave(std::span<const double> values, std::span<const double> grid,
                                     std::string label, const Tolerances& tol) {
  std::vector<double> negated(values.begin(), values.end());
  for (double& v : negated) v = -v;
  ConvexityCertificate c = certify(negated, grid, std::move(label), 0, tol);
  c.values.assign(values.begin(), values.end());
  for (double& d : c.second_differences) d = -d;
  if (!c.second_differences.empty() && c.verdict != Verdict::indeterminate) {
    c.min_second_difference = *std::min_element(c.second_differences.begin(), c.second_differences.end());
  }
  if (c.verdict == Verdict::convex) c.verdict = Verdict::concave;
  return c;
}

Eigen::MatrixXd partial_sums_sorted(const Eigen::MatrixXd& angles) {
  Eigen::MatrixXd out(angles.rows(), angles.cols());
  std::vector<double> row(static_cast<size_t>(angles.cols()));
  for (Eigen::Index i = 0; i < angles.rows(); ++i) {
    for (Eigen::Index k = 0; k < angles.cols(); ++k) row[static_cast<size_t>(k)] = angles(i, k);
    std::sort(row.begin(), row.end(), std::greater<>());
    double acc = 0.0;
    for (Eigen::Index k = 0; k < angles.cols(); ++k) {
      acc += row[static_cast<size_t>(k)];
      out(i, k) = acc;
    }
  }
  return out;
}

Eigen::MatrixXd tail_sums_sorted(const Eigen::MatrixXd& angles) {
  Eigen::MatrixXd out(angles.rows(), angles.cols());
  std::vector<double> row(static_cast<size_t>(angles.cols()));
  for (Eigen::Index i = 0; i < angles.rows(); ++i) {
    for (Eigen::Index k = 0; k < angles.cols(); ++k) row[static_cast<size_t>(k)] = angles(i, k);
    std::sort(row.begin(), row.end(), std::greater<>());
    double acc = 0.0;
    for (Eigen::Index k = angles.cols() - 1; k >= 0; --k) {
      acc += row[static_cast<size_t>(k)];
      out(i, k) = acc;
    }
  }
  return out;
}

Eigen::MatrixXd partial_angle_sums(const EigenFrame& frame) { return partial_sums_sorted(frame.angles); }

UnitaryMatrix double_spectrum(const UnitaryMatrix& u) {
  return UnitaryMatrix::unchecked(detail::block_diagonal(u.matrix(), u.matrix().conjugate()));
}

GeodesicPath doubled_path(const GeodesicPath& path) {
  const Matrix& x = path.x().matrix();
  const Matrix& y = path.y().matrix();
  return GeodesicPath(HermitianMatrix(detail::block_diagonal(x, -x.conjugate())),
                      HermitianMatrix(detail::block_diagonal(y, -y.conjugate())), path.t_min(), path.t_max());
}

Eigen::MatrixXd partial_singular_sums(const GeodesicPath& path, int points, const Tolerances& tol) {
  const SpectrumSamples s = sample_spectrum(doubled_path(path), points, tol);
  require_inside(s, "partial_singular_sums");
  const Eigen::MatrixXd sums = partial_sums_sorted(s.angles);
  return sums.leftCols(path.size());
}

PerturbationReport perturb_to_distinct(const GeodesicPath& path, int points, std::uint64_t seed,
                                       const Tolerances& tol) {
  const SpectrumSamples base = sample_spectrum(path, points, tol);
  for (size_t i = 0; i < base.distance.size(); ++i) {
    if (!(base.distance[i] < kSqrt2 - tol.perturb_margin)) {
      throw RadiusError("perturb_to_distinct: path too close to the sqrt(2) boundary at t = " +
                            std::to_string(base.grid[i]),
                        static_cast<int>(i), base.grid[i]);
    }
  }

  const int n = path.size();
  PerturbationReport report;
  report.z = HermitianMatrix::zero(n);
  report.y_new = path.y();
  report.min_gap_achieved = grid_min_gap(base);
  report.attempts = 1;
  if (report.min_gap_achieved > tol.gap) return report;

  const Matrix& x = path.x().matrix();
  const double xx = (x * x).trace().real();
  const Matrix exp_iy = expm_i(path.y(), 1.0).matrix();
  Rng rng(seed);
  double smallest = report.min_gap_achieved;
  double eps = tol.perturb_initial;
  for (int attempt = 2; attempt <= tol.perturb_attempts; ++attempt, eps *= 0.5) {
    Matrix z = random_hermitian(n, rng).matrix();
    if (xx > 0.0) z -= ((z * x).trace().real() / xx) * x;
    const double norm = op_norm(z);
    if (!(norm > 0.0)) continue;
    z *= eps / norm;
    const HermitianMatrix zh(z);
    const UnitaryMatrix start = UnitaryMatrix::unchecked(expm_i(zh, 1.0).matrix() * exp_iy);
    HermitianMatrix y_new;
    try {
      y_new = principal_log_unitary(start, tol);
    } catch (const BranchError&) {
      continue;
    }
    const GeodesicPath candidate(path.x(), y_new, path.t_min(), path.t_max());
    const SpectrumSamples s = sample_spectrum(candidate, points, tol);
    const double gap = grid_min_gap(s);
    smallest = std::min(smallest, gap);
    const bool inside = std::all_of(s.distance.begin(), s.distance.end(), [](double d) { return d < kSqrt2; });
    if (gap > tol.gap && inside) {
      report.z = zh;
      report.magnitude = eps;
      report.y_new = y_new;
      report.min_gap_achieved = gap;
      report.attempts = attempt;
      return report;
    }
  }
  throw PerturbationError("perturb_to_distinct: no admissible perturbation in " +
                              std::to_string(tol.perturb_attempts) + " attempts",
                          smallest);
}

CommutationReport detect_commutation(const GeodesicPath& path, int points, const CartanVector& mu,
                                     const Tolerances& tol) {
  const int n = path.size();
  if (mu.size() != n) throw ValidationError("detect_commutation: mu has the wrong dimension");
  if (!mu.strictly_decreasing()) throw ValidationError("detect_commutation: mu must be strictly decreasing");
  const SpectrumSamples s = sample_spectrum(path, points, tol);
  require_inside(s, "detect_commutation");

  std::vector<double> f(s.grid.size());
  for (size_t i = 0; i < f.size(); ++i) {
    f[i] = mu.values().dot(s.angles.row(static_cast<Eigen::Index>(i)).transpose());
  }
  CommutationReport r;
  r.certificate = certify(f, s.grid, "f_mu", n * n, tol);
  r.commute = r.certificate.verdict != Verdict::nonconvex && r.certificate.verdict != Verdict::indeterminate &&
              r.certificate.piecewise_linear;
  r.min_curvature = r.certificate.min_second_difference;
  r.commutator_norm = commutator_norm(path.x(), path.y());
  r.agree = r.commute == (r.commutator_norm < 1e-8);
  return r;
}

double permutation_matching_min(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  if (a.size() != b.size()) throw ValidationError("permutation_matching_min: size mismatch");
  if (a.size() > 8) throw RangeError("permutation_matching_min: brute force limited to n <= 8");
  std::vector<int> perm(static_cast<size_t>(a.size()));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) acc += std::norm(a(k) - b(perm[static_cast<size_t>(k)]));
    best = std::min(best, acc);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Eigen::VectorXcd normal_eigenvalues(const Matrix& a) {
  Eigen::ComplexSchur<Matrix> schur(a, false);
  if (schur.info() != Eigen::Success) throw ConvergenceError("normal_eigenvalues: Schur iteration failed");
  return schur.matrixT().diagonal();
}

namespace {

struct TrialOutcome {
  ScanRow row;
  std::optional<RadiusWitness> witness;
};

TrialOutcome run_trial(int n, int index, std::uint64_t trial_seed, bool outside, const RadiusScanOptions& options,
                       const Tolerances& tol) {
  Rng rng(trial_seed);
  double target;
  if (outside) {
    std::uniform_real_distribution<double> pick(kSqrt2, kSqrt2 + options.outside_width);
    do target = pick(rng); while (!(target > kSqrt2));
  } else {
    std::uniform_real_distribution<double> pick(options.inside_min_radius, options.inside_max_radius);
    target = pick(rng);
  }
  const HermitianMatrix x = random_hermitian(n, rng);
  const HermitianMatrix y = random_hermitian(n, rng);
  const GeodesicPath path = scale_to_radius(x, y, target, options.grid);
  const SpectrumSamples s = sample_spectrum(path, options.grid, tol);
  const Eigen::MatrixXd sums = partial_sums_sorted(s.angles);

  TrialOutcome out;
  out.row.trial = index;
  out.row.seed = trial_seed;
  out.row.region = outside ? "outside" : "inside";
  out.row.radius = *std::max_element(s.distance.begin(), s.distance.end());
  out.row.verdict = Verdict::linear;
  int worst_m = -1;
  double worst = std::numeric_limits<double>::infinity();
  ConvexityCertificate worst_cert;
  for (int m = 1; m <= n; ++m) {
    ConvexityCertificate c = certify(column(sums, m - 1), s.grid, "s_" + std::to_string(m), 0, tol);
    out.row.min_second_difference.push_back(c.min_second_difference);
    // Row verdict: the worst over m, ordered linear < convex < nonconvex < indeterminate.
    auto rank = [](Verdict v) {
      return v == Verdict::linear ? 0 : v == Verdict::convex ? 1 : v == Verdict::nonconvex ? 2 : 3;
    };
    if (rank(c.verdict) > rank(out.row.verdict)) out.row.verdict = c.verdict;
    if (c.min_second_difference < worst) {
      worst = c.min_second_difference;
      worst_m = m;
      worst_cert = std::move(c);
    }
  }

  if (outside && out.row.radius > kSqrt2 && worst < -tol.witness_threshold) {
    const SpectrumSamples fine = sample_spectrum(path, 2 * options.grid - 1, tol);
    const Eigen::MatrixXd fine_sums = partial_sums_sorted(fine.angles);
    const ConvexityCertificate recheck = certify(column(fine_sums, worst_m - 1), fine.grid, "recheck", 0, tol);
    if (recheck.min_second_difference < -tol.witness_threshold) {
      RadiusWitness w;
      w.x = path.x();
      w.y = path.y();
      w.radius = out.row.radius;
      w.t_star = s.grid[static_cast<size_t>(*worst_cert.offending_index) + 1];
      w.m = worst_m;
      w.second_difference = worst;
      w.second_difference_double_grid = recheck.min_second_difference;
      w.seed = trial_seed;
      out.witness = w;
    }
  }
  return out;
}

}  // namespace

RadiusScanResult radius_scan(int n, int trials, std::uint64_t seed, const RadiusScanOptions& options,
                             const Tolerances& tol) {
  if (n < 2) throw ValidationError("radius_scan: n must be at least 2");
  if (trials < 0) throw ValidationError("radius_scan: trials must be non-negative");
  if (options.grid < 3) throw ValidationError("radius_scan: grid must have at least 3 points");
  if (!(options.inside_min_radius > 0.0 && options.inside_min_radius < options.inside_max_radius &&
        options.inside_max_radius < kSqrt2)) {
    throw ValidationError("radius_scan: inside radius range must lie in (0, sqrt(2))");
  }
  if (!(options.outside_width > 0.0 && kSqrt2 + options.outside_width < 2.0)) {
    throw ValidationError("radius_scan: outside width must keep radii below 2");
  }

  RadiusScanResult result;
  result.n = n;
  result.inside_trials = trials;
  std::vector<TrialOutcome> inside(static_cast<size_t>(trials));
  parallel_for(0, inside.size(), options.threads, [&](size_t i) {
    inside[i] = run_trial(n, static_cast<int>(i), derive_seed(seed, i), false, options, tol);
  });
  for (auto& o : inside) {
    if (o.row.verdict == Verdict::nonconvex || o.row.verdict == Verdict::indeterminate) ++result.inside_violations;
    result.rows.push_back(std::move(o.row));
  }

  const int budget = options.witness_trials < 0 ? trials : options.witness_trials;
  const size_t batch = std::max<size_t>(64, 8 * worker_count(options.threads));
  for (size_t start = 0; start < static_cast<size_t>(budget) && !result.outside_example; start += batch) {
    const size_t stop = std::min(static_cast<size_t>(budget), start + batch);
    std::vector<TrialOutcome> outside(stop - start);
    parallel_for(start, stop, options.threads, [&](size_t j) {
      outside[j - start] =
          run_trial(n, static_cast<int>(j), derive_seed(seed, (std::uint64_t{1} << 32) + j), true, options, tol);
    });
    for (auto& o : outside) {
      result.witness_trials_used = o.row.trial + 1;
      result.rows.push_back(std::move(o.row));
      if (o.witness) {
        result.outside_example = std::move(o.witness);
        break;
      }
    }
  }
  return result;
}

}  // namespace uconv
