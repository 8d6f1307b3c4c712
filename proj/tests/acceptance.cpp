// Runs the acceptance criteria and prints one PASS/FAIL line per criterion.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <numbers>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "uconv/cli.hpp"
#include "uconv/convexity.hpp"
#include "uconv/errors.hpp"
#include "uconv/geodesic.hpp"
#include "uconv/parallel.hpp"
#include "uconv/random.hpp"

using namespace uconv;

namespace {

const double pi = std::numbers::pi;
const double sqrt2 = std::sqrt(2.0);

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Lock-free running maximum.
void update_max(std::atomic<double>& m, double v) {
  double cur = m.load();
  while (v > cur && !m.compare_exchange_weak(cur, v)) {
  }
}

double wrapped(double a) { return std::abs(std::remainder(a, 2.0 * pi)); }

HermitianMatrix traceless(const HermitianMatrix& x) {
  const int n = x.size();
  return HermitianMatrix(Matrix(x.matrix() - (x.matrix().trace() / static_cast<double>(n)) * Matrix::Identity(n, n)));
}

// Trace identity residual over a sampled spectrum of the path.
double trace_residual(const GeodesicPath& p, const SpectrumSamples& s) {
  const double tx = p.x().matrix().trace().real(), ty = p.y().matrix().trace().real();
  double worst = 0.0;
  for (size_t i = 0; i < s.grid.size(); ++i) {
    worst = std::max(worst, wrapped(s.angles.row(static_cast<Eigen::Index>(i)).sum() - s.grid[i] * tx - ty));
  }
  return worst;
}

std::atomic<double> g_trace_residual{0.0};
std::atomic<int> g_trace_paths{0};

GeodesicPath separated_path(int n, Rng& rng, double min_gap) {
  for (;;) {
    const double radius = std::uniform_real_distribution<double>(0.3, 1.3)(rng);
    const GeodesicPath p = random_path(n, radius, rng, 101);
    const SpectrumSamples s = sample_spectrum(p, 101);
    double gap = 2.0;
    for (Eigen::Index i = 0; i < s.angles.rows(); ++i) gap = std::min(gap, min_chord_gap(s.angles.row(i).transpose()));
    if (gap > min_gap) return p;
  }
}

Outcome variation_fidelity() {
  Rng rng(derive_seed(1, 0));
  double e1 = 0.0, e2 = 0.0;
  const double h1 = 1e-5, h2 = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 3;
    const GeodesicPath path = separated_path(n, rng, 0.05);
    const HermitianMatrix& x = path.x();
    const Matrix xm = x.matrix(), ym = path.y().matrix();
    update_max(g_trace_residual, trace_residual(path, sample_spectrum(path, 101)));
    ++g_trace_paths;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
      const EigenFrame at = track_frame(GeodesicPath(x, path.y(), t - 1e-3, t + 1e-3), 3);
      const RealVector d1 = first_variation(at, x, 1);
      const RealVector d2 = second_variation(at, x, 1);
      const auto a = [&](double s) { return oracle::angles(oracle::path_point(xm, ym, s)); };
      const auto m1 = a(t - h1), p1 = a(t + h1);
      const auto m2 = a(t - h2), c2 = a(t), p2 = a(t + h2);
      for (int k = 0; k < n; ++k) {
        const size_t kk = static_cast<size_t>(k);
        e1 = std::max(e1, std::abs(d1(k) - oracle::central_first(m1[kk], p1[kk], h1)));
        e2 = std::max(e2, std::abs(d2(k) - oracle::central_second(m2[kk], c2[kk], p2[kk], h2)));
      }
    }
  }
  return {e1 <= 1e-6 && e2 <= 1e-4,
          fmt("100 paths x 5 points: max first-variation error %.2e (<= 1e-6), second %.2e (<= 1e-4)", e1, e2)};
}

std::vector<NormSpec> norm_zoo(int n, Rng& rng) {
  std::vector<NormSpec> zoo;
  for (int k = 1; k <= n; ++k) zoo.push_back(KyFan{k});
  RealVector alpha(n);
  for (int i = 0; i < n; ++i) alpha(i) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  alpha = CartanVector::sorted(alpha).values();
  alpha(0) += 0.1;
  zoo.push_back(Alpha{AlphaWeights(alpha)});
  for (double p : {1.0, 2.0, 4.0, kInfinity}) zoo.push_back(Schatten{p});
  RealVector mu = random_strict_weights(n, rng);
  mu.array() -= mu.mean();
  zoo.push_back(Orbit{CartanVector(mu)});
  return zoo;
}

Outcome convexity_inside_ball() {
  constexpr int kPaths = 1000, kGrid = 401;
  std::vector<int> bad(kPaths, 0), certs(kPaths, 0);
  std::vector<std::string> first_bad(kPaths);
  std::vector<double> radius(kPaths, 0.0);
  parallel_for(0, kPaths, 0, [&](std::size_t i) {
    Rng rng(derive_seed(2, i));
    const int n = 2 + static_cast<int>(i % 3);
    const double target = std::uniform_real_distribution<double>(0.05, 1.40)(rng);
    const GeodesicPath path = random_path(n, target, rng, kGrid);
    const SpectrumSamples s = sample_spectrum(path, kGrid);
    radius[i] = *std::max_element(s.distance.begin(), s.distance.end());
    update_max(g_trace_residual, trace_residual(path, s));
    ++g_trace_paths;
    auto check = [&](const ConvexityCertificate& c) {
      ++certs[i];
      if (c.verdict == Verdict::nonconvex || c.verdict == Verdict::indeterminate) {
        if (bad[i]++ == 0) first_bad[i] = c.label;
      }
    };
    const Eigen::MatrixXd sums = partial_sums_sorted(s.angles);
    const Eigen::MatrixXd sing = partial_singular_sums(path, kGrid);
    for (int m = 0; m < n; ++m) {
      std::vector<double> a(kGrid), b(kGrid);
      for (int r = 0; r < kGrid; ++r) {
        a[static_cast<size_t>(r)] = sums(r, m);
        b[static_cast<size_t>(r)] = sing(r, m);
      }
      check(certify(a, s.grid, "s_" + std::to_string(m + 1), n * n));
      check(certify(b, s.grid, "singular sum " + std::to_string(m + 1), n * n));
    }
    for (const NormSpec& norm : norm_zoo(n, rng)) {
      const DistanceProfile p = distance_profile(path, norm, kGrid);
      if (p.segment_begin != 0 || p.segment_end != kGrid) {
        if (bad[i]++ == 0) first_bad[i] = "profile left the ball";
      }
      check(p.certificate);
    }
  });
  int failures = 0, total = 0, first = -1;
  double rmax = 0.0;
  for (int i = 0; i < kPaths; ++i) {
    failures += bad[static_cast<size_t>(i)];
    total += certs[static_cast<size_t>(i)];
    rmax = std::max(rmax, radius[static_cast<size_t>(i)]);
    if (bad[static_cast<size_t>(i)] && first < 0) first = i;
  }
  std::string detail = fmt("%d paths, %d certificates, max |u(t)-1| = %.4f, nonconvex verdicts: %d", kPaths, total,
                           rmax, failures);
  if (first >= 0) detail += " (first: path " + std::to_string(first) + ", " + first_bad[static_cast<size_t>(first)] + ")";
  return {failures == 0 && rmax <= 1.40, detail};
}

Outcome optimality_witness() {
  const RadiusScanResult r = radius_scan(2, 1000, 7);
  if (!r.outside_example) return {false, fmt("no witness in %d outside trials", r.witness_trials_used)};
  const RadiusWitness& w = *r.outside_example;
  const GeodesicPath path(w.x, w.y);
  double min_g = 0.0, min_2g = 0.0, radius = 0.0;
  for (int points : {401, 801}) {
    const SpectrumSamples s = sample_spectrum(path, points);
    const Eigen::MatrixXd sums = partial_sums_sorted(s.angles);
    std::vector<double> s1(static_cast<size_t>(points));
    for (int i = 0; i < points; ++i) s1[static_cast<size_t>(i)] = sums(i, 0);
    const ConvexityCertificate c = certify(s1, s.grid, "s_1");
    (points == 401 ? min_g : min_2g) = c.min_second_difference;
    radius = std::max(radius, *std::max_element(s.distance.begin(), s.distance.end()));
  }
  const bool ok = radius > sqrt2 && radius < sqrt2 + 0.3 && min_g < -1e-4 && min_2g < -1e-4;
  return {ok, fmt("witness seed %llu: max |u(t)-1| = %.4f in (sqrt2, sqrt2+0.3), min d2 of s_1 = %.4e (G=401), "
                  "%.4e (G=801)",
                  static_cast<unsigned long long>(w.seed), radius, min_g, min_2g)};
}

Outcome trace_identity() {
  const double r = g_trace_residual.load();
  return {r <= 1e-8 && g_trace_paths.load() > 0,
          fmt("%d test paths, max |sum theta - t Tr x - Tr y| mod 2pi = %.2e (<= 1e-8)", g_trace_paths.load(), r)};
}

Outcome doubling() {
  Rng rng(derive_seed(5, 0));
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 5;
    const UnitaryMatrix u = random_unitary(n, rng);
    std::vector<double> merged;
    for (double a : oracle::angles(u.matrix())) {
      merged.push_back(std::abs(a));
      merged.push_back(-std::abs(a));
    }
    merged = oracle::sorted_desc(merged);
    const SpectralDecomposition d = eig_unitary(double_spectrum(u));
    for (size_t k = 0; k < merged.size(); ++k) {
      worst = std::max(worst, std::abs(std::polar(1.0, d.angles(static_cast<Eigen::Index>(k))) - std::polar(1.0, merged[k])));
    }
  }
  return {worst <= 1e-10, fmt("200 unitaries, max deviation from {+-sigma_i} = %.2e (<= 1e-10)", worst)};
}

Outcome commutation() {
  constexpr int kPairs = 500;
  std::vector<int> agree(kPairs, 0), strict_ok(kPairs, 1);
  std::vector<double> curvature(kPairs, kInfinity);
  parallel_for(0, kPairs, 0, [&](std::size_t i) {
    Rng rng(derive_seed(6, i));
    const int n = 2 + static_cast<int>(i % 3);
    const double radius = std::uniform_real_distribution<double>(0.3, 1.3)(rng);
    GeodesicPath p(HermitianMatrix::zero(n), HermitianMatrix::zero(n));
    if (i % 2 == 0) {
      auto [x, y] = random_commuting_pair(n, rng);
      p = scale_to_radius(x, y, radius, 401);
    } else {
      p = random_path(n, radius, rng, 401);
    }
    const CartanVector mu(random_strict_weights(n, rng));
    const CommutationReport r = detect_commutation(p, 401, mu);
    const bool truth = commutator_norm(p.x(), p.y()) < 1e-8;
    agree[i] = r.commute == truth ? 1 : 0;
    if (!truth) {
      curvature[i] = r.min_curvature;
      strict_ok[i] = r.min_curvature > 1e-6 ? 1 : 0;
    }
  });
  int agreed = 0, strict = 0;
  double min_curv = kInfinity;
  for (int i = 0; i < kPairs; ++i) {
    agreed += agree[static_cast<size_t>(i)];
    strict += strict_ok[static_cast<size_t>(i)];
    min_curv = std::min(min_curv, curvature[static_cast<size_t>(i)]);
  }
  return {agreed == kPairs && strict == kPairs,
          fmt("%d pairs (half commuting): agreement %d/%d, min strict-case curvature %.3e (> 1e-6)", kPairs, agreed,
              kPairs, min_curv)};
}

double reconstruction_error(const NormSpec& spec, Rng& rng, double& one_sided) {
  const PolarDualSample dual = polar_dual_boundary(spec, 3, 400);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const HermitianMatrix x = traceless(random_hermitian(3, rng));
    const double target = evaluate_norm(spec, x);
    const double sup = sup_family_norm(x, dual.points);
    one_sided = std::max(one_sided, sup - target);
    worst = std::max(worst, (target - sup) / target);
  }
  return worst;
}

Outcome reconstruction() {
  Rng rng(derive_seed(7, 0));
  double one_sided = -kInfinity;
  auto cv = [](std::initializer_list<double> v) {
    RealVector r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double a : v) r(i++) = a;
    return CartanVector(r);
  };
  // Symmetric traceless strictly sorted data for n = 3 is a multiple of (1, 0, -1).
  const double e_sym = reconstruction_error(SupFamily{{cv({1, 0, -1}), cv({0.6, 0, -0.6})}, false}, rng, one_sided);
  const double e_gen = reconstruction_error(SupFamily{{cv({1, 0, -1}), cv({1.5, -0.5, -1})}, false}, rng, one_sided);
  const double e_s2 = reconstruction_error(Schatten{2.0}, rng, one_sided);
  const double worst = std::max({e_sym, e_gen, e_s2});
  return {worst <= 0.01 && one_sided <= 1e-9,
          fmt("n=3, resolution 400, 200 x per norm: relative error %.2e / %.2e / %.2e (symmetric pair, general pair, "
              "Schatten 2; <= 1e-2), max sup - N = %.2e (<= 1e-9)",
              e_sym, e_gen, e_s2, one_sided)};
}

Outcome kostant() {
  Rng rng(derive_seed(8, 0));
  int ok = 0, oracle_ok = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 5;
    const HermitianMatrix x = random_hermitian(n, rng);
    const UnitaryMatrix u = random_unitary(n, rng);
    ok += kostant_membership(x, u) ? 1 : 0;
    // Independent check: partial sums of the sorted diagonal against the spectrum.
    const Matrix c = u.matrix() * x.matrix() * u.matrix().adjoint();
    std::vector<double> d, l;
    for (int k = 0; k < n; ++k) d.push_back(c(k, k).real());
    Eigen::SelfAdjointEigenSolver<Matrix> es(x.matrix());
    for (int k = 0; k < n; ++k) l.push_back(es.eigenvalues()(k));
    d = oracle::sorted_desc(d);
    l = oracle::sorted_desc(l);
    double sd = 0.0, sl = 0.0;
    bool maj = true;
    for (int k = 0; k < n; ++k) {
      sd += d[static_cast<size_t>(k)];
      sl += l[static_cast<size_t>(k)];
      if (k + 1 < n && sd > sl + 1e-9) maj = false;
    }
    if (std::abs(sd - sl) > 1e-9) maj = false;
    oracle_ok += maj ? 1 : 0;
  }
  return {ok == 1000 && oracle_ok == 1000,
          fmt("1000 (x, u) pairs: membership %d/1000, independent majorization check %d/1000", ok, oracle_ok)};
}

Outcome hoffman_wielandt() {
  std::mt19937 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  int ok = 0, exact = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    auto normal = [&] {
      Eigen::VectorXcd d(n);
      for (int k = 0; k < n; ++k) d(k) = Complex(g(rng), g(rng));
      const Matrix q = oracle::gaussian_unitary(n, rng);
      return Matrix(q * d.asDiagonal() * q.adjoint());
    };
    const Matrix a = normal(), b = normal();
    const Eigen::VectorXcd la = normal_eigenvalues(a), lb = normal_eigenvalues(b);
    const double best = permutation_matching_min(la, lb);
    double ref = kInfinity;
    oracle::for_each_permutation(n, [&](const std::vector<int>& p) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k) acc += std::norm(la(k) - lb(p[static_cast<size_t>(k)]));
      ref = std::min(ref, acc);
    });
    exact += std::abs(best - ref) <= 1e-12 * std::max(1.0, ref) ? 1 : 0;
    ok += best <= (a - b).squaredNorm() * (1.0 + 1e-12) ? 1 : 0;
  }
  return {ok == 200 && exact == 200,
          fmt("200 normal pairs, n <= 4: bound holds %d/200, enumeration matches brute force %d/200", ok, exact)};
}

Outcome determinism() {
  const std::string dir = UCONV_TEST_DATA;
  const auto tmp = std::filesystem::temp_directory_path() / "uconv_acceptance_samples.csv";
  {
    std::ofstream f(tmp);
    f << "t,value\n";
    for (int i = 0; i <= 50; ++i) f << i / 50.0 << "," << std::cosh(i / 50.0) << "\n";
  }
  const std::vector<std::vector<std::string>> commands = {
      {"analyze", dir + "/pauli.json"},
      {"analyze", dir + "/commuting_diagonal.json", "--format", "csv"},
      {"distance", dir + "/pauli.json", "--norm", R"({"type": "schatten", "p": 1})"},
      {"certify", tmp.string(), "--expect", "convex"},
      {"perturb", dir + "/repeated_y.json", "--seed", "11"},
      {"radius-scan", "--n", "2", "--trials", "300", "--seed", "7", "--format", "json"},
      {"radius-scan", "--n", "3", "--trials", "100", "--seed", "3"},
      {"commute", dir + "/pauli.json", "--mu", "[1, -1]"},
      {"norms", "--matrix", dir + "/pauli.json", "--norm", R"({"type": "kyfan", "k": 1})"},
  };
  int same = 0;
  std::string first_diff;
  for (const auto& args : commands) {
    std::ostringstream o1, e1, o2, e2;
    const int c1 = run_cli(args, o1, e1);
    const int c2 = run_cli(args, o2, e2);
    if (c1 == c2 && o1.str() == o2.str() && e1.str() == e2.str()) {
      ++same;
    } else if (first_diff.empty()) {
      first_diff = args[0];
    }
  }
  // Worker count must not change the result either.
  std::ostringstream a, b, e;
  run_cli({"radius-scan", "--n", "2", "--trials", "300", "--seed", "7", "--threads", "1"}, a, e);
  run_cli({"radius-scan", "--n", "2", "--trials", "300", "--seed", "7", "--threads", "4"}, b, e);
  const bool threads_same = a.str() == b.str();
  std::filesystem::remove(tmp);
  std::string detail = fmt("%d/%zu commands byte-identical on re-run; 1 vs 4 threads identical: %s", same,
                           commands.size(), threads_same ? "yes" : "no");
  if (!first_diff.empty()) detail += " (first difference: " + first_diff + ")";
  return {same == static_cast<int>(commands.size()) && threads_same, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;  // <= 0: no runtime limit
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "variation formula fidelity", 60.0, variation_fidelity},
      {2, "convexity inside the optimal ball", 600.0, convexity_inside_ball},
      {3, "optimality witness outside the ball", 0.0, optimality_witness},
      {4, "trace identity", 0.0, trace_identity},
      {5, "spectrum doubling", 0.0, doubling},
      {6, "commutation biconditional", 0.0, commutation},
      {7, "sup-family reconstruction", 120.0, reconstruction},
      {8, "Kostant majorization", 0.0, kostant},
      {9, "Hoffman-Wielandt brute force", 0.0, hoffman_wielandt},
      {10, "CLI determinism", 0.0, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_s > 0.0 && secs >= c.limit_s) {
      o.pass = false;
      o.detail += fmt("; runtime over the %.0f s limit", c.limit_s);
    }
    std::printf("%s  %2d  %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
