#include <doctest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "uconv/eigen_flow.hpp"
#include "uconv/errors.hpp"
#include "uconv/random.hpp"

using namespace uconv;
using oracle::Complex;

namespace {

const double pi = std::numbers::pi;

HermitianMatrix diag(std::initializer_list<double> d) {
  RealVector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v(i++) = x;
  return HermitianMatrix::diagonal(v);
}

// Random inside-ball path whose spectrum stays well separated on the grid.
GeodesicPath separated_path(int n, Rng& rng, double min_gap, int points = 101) {
  for (;;) {
    std::uniform_real_distribution<double> r(0.3, 1.3);
    const GeodesicPath p = random_path(n, r(rng), rng, points);
    const SpectrumSamples s = sample_spectrum(p, points);
    double gap = 2.0;
    for (Eigen::Index i = 0; i < s.angles.rows(); ++i) gap = std::min(gap, min_chord_gap(s.angles.row(i).transpose()));
    if (gap > min_gap) return p;
  }
}

}  // namespace

TEST_CASE("evaluate") {
  Rng rng(1);
  const HermitianMatrix x = random_hermitian(3, rng), y = random_hermitian(3, rng);
  const GeodesicPath path(x, y);
  CHECK(oracle::max_abs_diff(evaluate(path, 0.0).matrix(), oracle::expi(y.matrix(), 1.0)) < 1e-12);
  CHECK(oracle::max_abs_diff(evaluate(path, 0.37).matrix(), oracle::path_point(x.matrix(), y.matrix(), 0.37)) < 1e-11);
  CHECK_THROWS_AS(evaluate(path, 1.0001), RangeError);
  CHECK_THROWS_AS(evaluate(path, -0.1), RangeError);

  const HermitianMatrix d = diag({0.2, -0.5});
  const GeodesicPath same(d, d);
  const Matrix u = evaluate(same, 0.6).matrix();
  CHECK(std::abs(u(0, 0) - std::polar(1.0, 1.6 * 0.2)) < 1e-14);
  CHECK(std::abs(u(1, 1) - std::polar(1.0, -1.6 * 0.5)) < 1e-14);
  CHECK(std::abs(u(0, 1)) < 1e-15);

  CHECK_THROWS_AS(GeodesicPath(d, d, 1.0, 1.0), ValidationError);
  CHECK_THROWS_AS(GeodesicPath(d, diag({1, 2, 3})), ValidationError);
}

TEST_CASE("uniform_grid") {
  const std::vector<double> g = uniform_grid(0.25, 1.75, 7);
  CHECK(g.size() == 7);
  CHECK(g.front() == 0.25);
  CHECK(g.back() == 1.75);
  CHECK(g[3] == doctest::Approx(1.0));
}

TEST_CASE("spectral_projector examples") {
  const UnitaryMatrix u = expm_i(diag({0.5, -0.5}), 1.0);
  const SpectralProjector p = spectral_projector(u, 0.5, 0.3);
  Matrix expected = Matrix::Zero(2, 2);
  expected(0, 0) = 1.0;
  CHECK(oracle::max_abs_diff(p.p, expected) < 1e-10);

  const UnitaryMatrix w = expm_i(diag({0.1, 0.15, -1.0}), 1.0);
  const SpectralProjector two = spectral_projector(w, 0.12, 0.2);
  CHECK(std::abs(two.p.trace() - 2.0) < 1e-6);

  CHECK_THROWS_AS(spectral_projector(u, 0.5 + 2 * std::asin(0.15), 0.3), ConditioningError);
  CHECK_THROWS_AS(spectral_projector(u, 2.0, 0.3), EmptySpectrumError);
}

TEST_CASE("spectral_projector matches eigenvector outer products") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const UnitaryMatrix u = random_unitary(4, rng);
    const SpectralDecomposition d = eig_unitary(u);
    const double gap = min_chord_gap(d.angles);
    for (int k = 0; k < 4; ++k) {
      const SpectralProjector p = spectral_projector(u, d.angles(k), std::min(gap / 3, 0.1));
      const Matrix ref = d.vectors.col(k) * d.vectors.col(k).adjoint();
      CHECK(oracle::max_abs_diff(p.p, ref) < 1e-9);
      CHECK((p.p * p.p - p.p).cwiseAbs().maxCoeff() < 1e-8);
      CHECK((p.p - p.p.adjoint()).cwiseAbs().maxCoeff() < 1e-8);
      CHECK(std::abs(p.p.trace() - 1.0) < 1e-6);
    }
  }
}

TEST_CASE("direct_rotation") {
  const UnitaryMatrix u = expm_i(diag({0.5, -0.5}), 1.0);
  const SpectralProjector p0 = spectral_projector(u, 0.5, 0.3);
  CHECK(oracle::max_abs_diff(direct_rotation(p0, p0), Matrix::Identity(2, 2)) < 1e-12);

  // Rank one projectors onto e1 and (cos a, sin a): w is the Givens rotation by a.
  const double a = 0.2;
  Eigen::Vector2cd v(std::cos(a), std::sin(a));
  SpectralProjector q0 = p0, q1 = p0;
  q0.p = Matrix::Zero(2, 2);
  q0.p(0, 0) = 1.0;
  q1.p = v * v.adjoint();
  const Matrix w = direct_rotation(q0, q1);
  Matrix givens(2, 2);
  givens << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  CHECK(oracle::max_abs_diff(w, givens) < 1e-12);

  const Matrix e0 = 2.0 * q0.p - Matrix::Identity(2, 2);
  const Matrix e1 = 2.0 * q1.p - Matrix::Identity(2, 2);
  CHECK(oracle::max_abs_diff(w * e0 * w.adjoint(), e1) < 1e-8);
  CHECK((w.adjoint() * w - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::Vector2cd x(Complex(0.3, 0.4), Complex(-0.5, 0.1));
  CHECK((w * x).norm() == doctest::Approx(x.norm()));

  SpectralProjector orth = q0;
  orth.p = Matrix::Zero(2, 2);
  orth.p(1, 1) = 1.0;
  CHECK_THROWS_AS(direct_rotation(q0, orth), TransportBreakdownError);
}

TEST_CASE("track_frame follows crossings of commuting paths linearly") {
  const HermitianMatrix x = diag({0.61, -0.2, 0.1});
  const HermitianMatrix y = diag({-0.3, 0.35, 0.0537});
  const GeodesicPath path(x, y);
  const EigenFrame f = track_frame(path, 401);
  // Sorted labels at t = 0: 0.35, 0.0537, -0.3 carry slopes -0.2, 0.1, 0.61.
  const double slope[3] = {-0.2, 0.1, 0.61};
  const double start[3] = {0.35, 0.0537, -0.3};
  for (int i = 0; i < f.points(); ++i) {
    for (int k = 0; k < 3; ++k) CHECK(std::abs(f.angles(i, k) - (start[k] + slope[k] * f.grid[static_cast<size_t>(i)])) < 1e-12);
  }
}

TEST_CASE("track_frame agrees with per-point eigensolves") {
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 3;
    const GeodesicPath path = separated_path(n, rng, 0.01, 200);
    const EigenFrame f = track_frame(path, 200);
    REQUIRE(f.points() == 200);

    const SpectralDecomposition d0 = eig_unitary(evaluate(path, path.t_min()));
    for (int k = 0; k < n; ++k) CHECK(f.angles(0, k) == doctest::Approx(d0.angles(k)).epsilon(1e-12));

    const double xnorm = hermitian_eigenvalues(path.x()).cwiseAbs().maxCoeff();
    const double dt = f.grid[1] - f.grid[0];
    const double tr_x = path.x().matrix().trace().real(), tr_y = path.y().matrix().trace().real();
    double offset0 = 0.0;
    for (int i = 0; i < f.points(); ++i) {
      const double t = f.grid[static_cast<size_t>(i)];
      std::vector<double> got(static_cast<size_t>(n));
      for (int k = 0; k < n; ++k) got[static_cast<size_t>(k)] = f.angles(i, k);
      const std::vector<double> ref = oracle::angles(oracle::path_point(path.x().matrix(), path.y().matrix(), t));
      got = oracle::sorted_desc(got);
      for (int k = 0; k < n; ++k) CHECK(std::abs(got[static_cast<size_t>(k)] - ref[static_cast<size_t>(k)]) < 1e-9);

      const Matrix& v = f.vectors[static_cast<size_t>(i)];
      CHECK((v.adjoint() * v - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-9);
      const Matrix u = evaluate(path, t).matrix();
      for (int k = 0; k < n; ++k) CHECK((u * v.col(k) - std::polar(1.0, f.angles(i, k)) * v.col(k)).norm() < 1e-8);
      if (i > 0) {
        for (int k = 0; k < n; ++k) {
          CHECK(std::abs(wrap_angle(f.angles(i, k) - f.angles(i - 1, k))) <= xnorm * dt + 1e-6);
        }
      }
      // Trace identity with a constant winding offset.
      const double off = f.angles.row(i).sum() - t * tr_x - tr_y;
      if (i == 0) {
        offset0 = off;
        CHECK(std::abs(std::remainder(off, 2 * pi)) < 1e-8);
      } else {
        CHECK(std::abs(off - offset0) < 1e-8);
      }
      CHECK(f.ball_ok[static_cast<size_t>(i)] == (dist_to_identity(UnitaryMatrix::unchecked(u)) < std::sqrt(2.0)));
    }
  }
}

TEST_CASE("track_frame rejects collisions") {
  const GeodesicPath path(diag({0.5, -0.5}), diag({-0.25, 0.25}));
  try {
    track_frame(path, 101);
    FAIL("expected DegenerateSpectrumError");
  } catch (const DegenerateSpectrumError& e) {
    CHECK(e.t == doctest::Approx(0.5));
    CHECK(e.index == 50);
  }
  CHECK_THROWS_AS(track_frame(path, 1), ValidationError);
}

TEST_CASE("variation kernel cotangent form") {
  Rng rng(2);
  std::uniform_real_distribution<double> a(-pi, pi);
  for (int trial = 0; trial < 1000; ++trial) {
    const double p = a(rng), q = a(rng);
    if (std::abs(std::polar(1.0, p) - std::polar(1.0, q)) < 1e-3) continue;
    const double cot = 0.5 / std::tan(0.5 * (p - q));
    CHECK(std::abs(variation_kernel(p, q) - cot) < 1e-12 * std::max(1.0, std::abs(cot)));
    CHECK(variation_kernel(p, q) == doctest::Approx(-variation_kernel(q, p)).epsilon(1e-14));
  }
}

TEST_CASE("variations of a commuting path") {
  const HermitianMatrix x = diag({0.61, -0.2, 0.1});
  const GeodesicPath path(x, diag({-0.3, 0.35, 0.0537}));
  const EigenFrame f = track_frame(path, 101);
  const RealVector d1 = first_variation(f, x, 7);
  CHECK(std::abs(d1(0) + 0.2) < 1e-12);
  CHECK(std::abs(d1(1) - 0.1) < 1e-12);
  CHECK(std::abs(d1(2) - 0.61) < 1e-12);
  const RealVector d2 = second_variation(f, x, 7);
  CHECK(d2.cwiseAbs().maxCoeff() < 1e-12);
  CHECK_THROWS_AS(first_variation(f, x, 101), RangeError);
}

TEST_CASE("variation formulas match finite differences") {
  Rng rng(33);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 3;
    const GeodesicPath path = separated_path(n, rng, 0.05);
    const double t = 0.2 + 0.05 * trial;
    const HermitianMatrix& x = path.x();

    const EigenFrame at = track_frame(GeodesicPath(x, path.y(), t - 1e-3, t + 1e-3), 3);
    const RealVector d1 = first_variation(at, x, 1);
    const RealVector d2 = second_variation(at, x, 1);
    CHECK(std::abs(d1.sum() - x.matrix().trace().real()) < 1e-12);
    CHECK(std::abs(d2.sum()) < 1e-10);

    const double h1 = 1e-5, h2 = 1e-4;
    const EigenFrame f1 = track_frame(GeodesicPath(x, path.y(), t - h1, t + h1), 3);
    const EigenFrame f2 = track_frame(GeodesicPath(x, path.y(), t - h2, t + h2), 3);
    for (int k = 0; k < n; ++k) {
      CHECK(std::abs(d1(k) - oracle::central_first(f1.angles(0, k), f1.angles(2, k), h1)) < 1e-6);
      CHECK(std::abs(d2(k) - oracle::central_second(f2.angles(0, k), f2.angles(1, k), f2.angles(2, k), h2)) < 1e-4);
    }
  }
}

TEST_CASE("partial sums of second variations keep only cross terms") {
  Rng rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + trial % 4;
    const GeodesicPath path = separated_path(n, rng, 1e-3, 41);
    const EigenFrame f = track_frame(path, 41);
    const HermitianMatrix& x = path.x();
    for (int i = 0; i < f.points(); i += 10) {
      const RealVector d2 = second_variation(f, x, i);
      const Matrix& v = f.vectors[static_cast<size_t>(i)];
      const Matrix xv = v.adjoint() * x.matrix() * v;
      double running = 0.0;
      for (int m = 1; m <= n; ++m) {
        running += d2(m - 1);
        const double cross = partial_sum_second_variation(f, x, i, m);
        CHECK(std::abs(cross - running) < 1e-9);
        if (f.ball_ok[static_cast<size_t>(i)]) CHECK(cross >= -1e-12);

        // Within-block terms cancel pairwise.
        double block = 0.0;
        for (int k = 0; k < m; ++k)
          for (int j = 0; j < m; ++j)
            if (j != k) block += variation_kernel(f.angles(i, k), f.angles(i, j)) * std::norm(xv(k, j));
        CHECK(std::abs(block) <= 1e-12);
      }
      CHECK(std::abs(partial_sum_second_variation(f, x, i, n)) < 1e-12);
    }
    CHECK_THROWS_AS(partial_sum_second_variation(f, x, 0, 0), ValidationError);
    CHECK_THROWS_AS(partial_sum_second_variation(f, x, 0, n + 1), ValidationError);
  }
}

TEST_CASE("sample_spectrum") {
  Rng rng(9);
  const GeodesicPath path = random_path(3, 1.0, rng, 51);
  const SpectrumSamples s = sample_spectrum(path, 51);
  double worst = 0.0;
  for (int i = 0; i < 51; ++i) {
    CHECK(s.angles(i, 0) >= s.angles(i, 1));
    CHECK(s.angles(i, 1) >= s.angles(i, 2));
    worst = std::max(worst, s.distance[static_cast<size_t>(i)]);
  }
  CHECK(worst <= 1.0);
  CHECK(worst > 1.0 - 1e-6);
}
