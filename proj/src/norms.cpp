#include "uconv/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>

#include "uconv/errors.hpp"

namespace uconv {

namespace {

RealVector sorted_desc(RealVector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  return v;
}

RealVector abs_sorted_desc(const RealVector& v) { return sorted_desc(v.cwiseAbs()); }

void require_size(int got, int want, const char* what) {
  if (got != want) {
    std::ostringstream msg;
    msg << what << ": dimension mismatch (" << got << " vs " << want << ")";
    throw ValidationError(msg.str());
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Fundamental weights of su(n): (1,..,1,0,..,0) - k/n, unit length.
std::vector<RealVector> chamber_rays(int n) {
  std::vector<RealVector> rays;
  for (int k = 1; k < n; ++k) {
    RealVector w = RealVector::Constant(n, -static_cast<double>(k) / n);
    w.head(k).array() += 1.0;
    rays.push_back(w.normalized());
  }
  return rays;
}

struct SupportOracle {
  const NormSpec& spec;

  // <c, d> / N(c), or -inf when the norm degenerates at c.
  double ratio(const RealVector& c, const RealVector& d) const {
    const double nc = evaluate_norm_spectrum(spec, c);
    if (!(nc > 0.0) || !std::isfinite(nc)) return -kInfinity;
    return c.dot(d) / nc;
  }
};

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-15) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return std::max({f(a), f(b), fc, fd});
}

// Weights on the chamber rays -> unit direction.
RealVector direction_from_weights(const std::vector<RealVector>& rays, const RealVector& w) {
  RealVector d = RealVector::Zero(rays.front().size());
  for (size_t i = 0; i < rays.size(); ++i) d += w(static_cast<Eigen::Index>(i)) * rays[i];
  return d.normalized();
}

// Deterministic low-discrepancy weights on the simplex (additive recurrence).
std::vector<RealVector> simplex_samples(int dim, int count) {
  std::vector<RealVector> out;
  for (int v = 0; v < dim; ++v) out.push_back(RealVector::Unit(dim, v));
  if (dim == 1) return out;
  // Generalized golden ratio for dim - 1 coordinates.
  double g = 2.0;
  for (int it = 0; it < 50; ++it) g = std::pow(1.0 + g, 1.0 / dim);
  RealVector alpha(dim - 1);
  for (int j = 0; j < dim - 1; ++j) alpha(j) = std::fmod(std::pow(1.0 / g, j + 1), 1.0);
  for (int i = 1; static_cast<int>(out.size()) < count; ++i) {
    std::vector<double> cuts{0.0, 1.0};
    for (int j = 0; j < dim - 1; ++j) cuts.push_back(std::fmod(0.5 + alpha(j) * i, 1.0));
    std::sort(cuts.begin(), cuts.end());
    RealVector w(dim);
    for (int j = 0; j < dim; ++j) w(j) = cuts[static_cast<size_t>(j + 1)] - cuts[static_cast<size_t>(j)];
    out.push_back(w);
  }
  return out;
}

// Golden-section minimum of a convex function on [a, b].
double golden_min(const std::function<double(double)>& f, double a, double b) {
  return -golden_max([&](double x) { return -f(x); }, a, b);
}

// Dual symmetric gauge on all of R^n (Cartan of u(n)); nullopt when the
// spec is not a norm on R^n.
std::optional<double> full_dual(const NormSpec& spec, const RealVector& v) {
  if (const auto* s = std::get_if<Schatten>(&spec)) {
    const double q = s->p == 1.0 ? kInfinity : std::isinf(s->p) ? 1.0 : s->p / (s->p - 1.0);
    return schatten_spectrum(v, q);
  }
  if (const auto* k = std::get_if<KyFan>(&spec)) {
    const RealVector a = v.cwiseAbs();
    return std::max(a.maxCoeff(), a.sum() / k->k);
  }
  if (const auto* al = std::get_if<Alpha>(&spec)) {
    const RealVector a = abs_sorted_desc(v);
    double best = 0.0, sv = 0.0, sa = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      sv += a(i);
      sa += al->weights.values()(i);
      best = std::max(best, sv / sa);
    }
    return best;
  }
  return std::nullopt;
}

// Exact support h(d) = max <c, d> over the traceless unit ball, d traceless
// and sorted. The dual of a restriction is the quotient of the dual:
// h(d) = min_g N*(d + g 1), convex in g with minimizer in [-d_1, -d_n].
std::optional<double> exact_support(const NormSpec& spec, const RealVector& d) {
  const int n = static_cast<int>(d.size());
  if (std::holds_alternative<Schatten>(spec) || std::holds_alternative<KyFan>(spec) ||
      std::holds_alternative<Alpha>(spec)) {
    auto f = [&](double g) { return *full_dual(spec, (d.array() + g).matrix()); };
    return golden_min(f, -d.maxCoeff(), -d.minCoeff());
  }
  // Orbit data: the polar body is the convex hull of the Weyl orbits, so on
  // the chamber the ball is the polytope {<c, mu_i> <= 1, c_j >= c_j+1,
  // sum c = 0}; enumerate its vertices.
  std::vector<RealVector> family;
  if (const auto* o = std::get_if<Orbit>(&spec)) family.push_back(o->mu.values());
  if (const auto* f = std::get_if<SupFamily>(&spec)) {
    if (f->unitary_reading) return std::nullopt;
    for (const CartanVector& mu : f->family) family.push_back(mu.values());
  }
  if (family.empty()) return std::nullopt;
  std::vector<RealVector> rows;
  std::vector<double> rhs;
  for (const RealVector& mu : family) {
    rows.push_back(mu);
    rhs.push_back(1.0);
  }
  for (int j = 0; j + 1 < n; ++j) {
    RealVector wall = RealVector::Zero(n);
    wall(j) = -1.0;
    wall(j + 1) = 1.0;
    rows.push_back(wall);
    rhs.push_back(0.0);
  }
  const int m = static_cast<int>(rows.size());
  double best = -kInfinity;
  std::vector<int> pick(static_cast<size_t>(n - 1));
  std::function<void(int, int)> choose = [&](int start, int depth) {
    if (depth == n - 1) {
      Eigen::MatrixXd a(n, n);
      RealVector b(n);
      for (int r = 0; r < n - 1; ++r) {
        a.row(r) = rows[static_cast<size_t>(pick[static_cast<size_t>(r)])].transpose();
        b(r) = rhs[static_cast<size_t>(pick[static_cast<size_t>(r)])];
      }
      a.row(n - 1).setOnes();
      b(n - 1) = 0.0;
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (lu.rank() < n) return;
      const RealVector c = lu.solve(b);
      for (int r = 0; r < m; ++r) {
        if (rows[static_cast<size_t>(r)].dot(c) > rhs[static_cast<size_t>(r)] + 1e-12) return;
      }
      best = std::max(best, c.dot(d));
      return;
    }
    for (int r = start; r < m; ++r) {
      pick[static_cast<size_t>(depth)] = r;
      choose(r + 1, depth + 1);
    }
  };
  choose(0, 0);
  if (!std::isfinite(best)) return std::nullopt;
  return best;
}

}  // namespace

AlphaWeights::AlphaWeights(RealVector alpha) : alpha_(std::move(alpha)) {
  if (alpha_.size() == 0) throw ValidationError("alpha weights must be non-empty");
  for (Eigen::Index i = 0; i < alpha_.size(); ++i) {
    if (!std::isfinite(alpha_(i)) || alpha_(i) < 0.0) throw ValidationError("alpha weights must be finite and >= 0");
    if (i > 0 && alpha_(i) > alpha_(i - 1)) throw ValidationError("alpha weights must be non-increasing");
  }
  if (!(alpha_(0) > 0.0)) throw ValidationError("alpha_1 must be positive");
}

CartanVector::CartanVector(RealVector v) : v_(std::move(v)) {
  if (v_.size() == 0) throw ValidationError("Cartan vector must be non-empty");
  for (Eigen::Index i = 0; i < v_.size(); ++i) {
    if (!std::isfinite(v_(i))) throw ValidationError("Cartan vector has a non-finite entry");
    if (i > 0 && v_(i) > v_(i - 1)) throw ValidationError("Cartan vector must be sorted non-increasing");
  }
  traceless_ = std::abs(v_.sum()) <= 1e-12 * std::max(1.0, v_.cwiseAbs().maxCoeff());
}

CartanVector CartanVector::sorted(RealVector v) { return CartanVector(sorted_desc(std::move(v))); }

bool CartanVector::strictly_decreasing() const {
  for (Eigen::Index i = 1; i < v_.size(); ++i) {
    if (!(v_(i) < v_(i - 1))) return false;
  }
  return true;
}

bool CartanVector::symmetric(double tol) const {
  const Eigen::Index n = v_.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v_(i) + v_(n - 1 - i)) > tol * std::max(1.0, std::abs(v_(i)))) return false;
  }
  return true;
}

void validate(const NormSpec& spec, int n) {
  std::visit(Overloaded{
                 [&](const KyFan& s) {
                   if (s.k < 1 || (n > 0 && s.k > n)) throw ValidationError("Ky-Fan index k out of range");
                 },
                 [&](const Alpha& s) {
                   if (n > 0) require_size(s.weights.size(), n, "alpha norm");
                 },
                 [&](const Schatten& s) {
                   if (!(s.p >= 1.0)) throw ValidationError("Schatten exponent must be >= 1");
                 },
                 [&](const Orbit& s) {
                   if (n > 0) require_size(s.mu.size(), n, "orbit norm");
                 },
                 [&](const SupFamily& s) {
                   if (s.family.empty()) throw ValidationError("sup family must be non-empty");
                   for (const CartanVector& mu : s.family) {
                     if (n > 0) require_size(mu.size(), n, "sup family");
                     if (mu.size() != s.family.front().size()) throw ValidationError("sup family members differ in size");
                     if (s.unitary_reading) AlphaWeights{mu.values()};
                   }
                 },
             },
             spec);
}

std::string describe(const NormSpec& spec) {
  std::ostringstream out;
  std::visit(Overloaded{
                 [&](const KyFan& s) { out << "kyfan(" << s.k << ")"; },
                 [&](const Alpha& s) { out << "alpha(" << s.weights.values().transpose() << ")"; },
                 [&](const Schatten& s) {
                   out << "schatten(";
                   if (std::isinf(s.p)) out << "inf"; else out << s.p;
                   out << ")";
                 },
                 [&](const Orbit& s) { out << (s.mu.symmetric() ? "orbit(" : "orbit-finsler(") << s.mu.values().transpose() << ")"; },
                 [&](const SupFamily& s) { out << "supfamily[" << s.family.size() << "]"; },
             },
             spec);
  return out.str();
}

bool is_finsler_only(const NormSpec& spec) {
  if (const auto* o = std::get_if<Orbit>(&spec)) return !o->mu.symmetric();
  if (const auto* f = std::get_if<SupFamily>(&spec)) {
    if (f->unitary_reading) return false;
    return std::any_of(f->family.begin(), f->family.end(), [](const CartanVector& m) { return !m.symmetric(); });
  }
  return false;
}

RealVector singular_values(const HermitianMatrix& x) { return abs_sorted_desc(hermitian_eigenvalues(x)); }

double ky_fan_spectrum(const RealVector& eigenvalues, int k) {
  if (k < 1 || k > eigenvalues.size()) throw ValidationError("Ky-Fan index k out of range");
  return abs_sorted_desc(eigenvalues).head(k).sum();
}

double alpha_norm_spectrum(const RealVector& eigenvalues, const AlphaWeights& alpha) {
  require_size(alpha.size(), static_cast<int>(eigenvalues.size()), "alpha norm");
  return alpha.values().dot(abs_sorted_desc(eigenvalues));
}

double schatten_spectrum(const RealVector& eigenvalues, double p) {
  if (!(p >= 1.0)) throw ValidationError("Schatten exponent must be >= 1");
  const RealVector s = eigenvalues.cwiseAbs();
  const double top = s.size() ? s.maxCoeff() : 0.0;
  if (std::isinf(p)) return top;
  if (top == 0.0) return 0.0;
  return top * std::pow((s / top).array().pow(p).sum(), 1.0 / p);
}

double orbit_norm_spectrum(const RealVector& eigenvalues, const CartanVector& mu) {
  require_size(mu.size(), static_cast<int>(eigenvalues.size()), "orbit norm");
  return sorted_desc(eigenvalues).dot(mu.values());
}

double ky_fan(const HermitianMatrix& x, int k) { return ky_fan_spectrum(hermitian_eigenvalues(x), k); }

double alpha_norm(const HermitianMatrix& x, const AlphaWeights& alpha) {
  return alpha_norm_spectrum(hermitian_eigenvalues(x), alpha);
}

double schatten(const HermitianMatrix& x, double p) { return schatten_spectrum(hermitian_eigenvalues(x), p); }

double orbit_norm(const HermitianMatrix& x, const CartanVector& mu) {
  return orbit_norm_spectrum(hermitian_eigenvalues(x), mu);
}

RearrangementResult rearrangement_sup(const RealVector& x, const RealVector& y) {
  require_size(static_cast<int>(x.size()), static_cast<int>(y.size()), "rearrangement_sup");
  const Eigen::Index n = x.size();
  if (n > 8) return {sorted_desc(x).dot(sorted_desc(y)), false};
  std::vector<Eigen::Index> perm(static_cast<size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  double best = -kInfinity;
  do {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) s += x(i) * y(perm[static_cast<size_t>(i)]);
    best = std::max(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {best, true};
}

bool kostant_membership(const HermitianMatrix& x, const UnitaryMatrix& u, const Tolerances& tol) {
  require_size(x.size(), u.size(), "kostant_membership");
  const RealVector lambda = hermitian_eigenvalues(x);
  const Matrix conj = u.matrix() * x.matrix() * u.matrix().adjoint();
  const RealVector diag = sorted_desc(conj.diagonal().real());
  const double scale = tol.majorization * std::max(1.0, lambda.cwiseAbs().maxCoeff());
  double partial_diag = 0.0, partial_lambda = 0.0;
  for (Eigen::Index k = 0; k < lambda.size(); ++k) {
    partial_diag += diag(k);
    partial_lambda += lambda(k);
    if (partial_diag > partial_lambda + scale) return false;
  }
  return std::abs(partial_diag - partial_lambda) <= scale;
}

double sup_family_norm_spectrum(const RealVector& eigenvalues, const std::vector<CartanVector>& family,
                                bool unitary_reading) {
  if (family.empty()) throw ValidationError("sup family must be non-empty");
  double best = -kInfinity;
  for (const CartanVector& mu : family) {
    const double v = unitary_reading ? alpha_norm_spectrum(eigenvalues, AlphaWeights(mu.values()))
                                     : orbit_norm_spectrum(eigenvalues, mu);
    best = std::max(best, v);
  }
  return best;
}

double sup_family_norm(const HermitianMatrix& x, const std::vector<CartanVector>& family,
                       bool unitary_reading) {
  return sup_family_norm_spectrum(hermitian_eigenvalues(x), family, unitary_reading);
}

double evaluate_norm_spectrum(const NormSpec& spec, const RealVector& eigenvalues) {
  return std::visit(Overloaded{
                        [&](const KyFan& s) { return ky_fan_spectrum(eigenvalues, s.k); },
                        [&](const Alpha& s) { return alpha_norm_spectrum(eigenvalues, s.weights); },
                        [&](const Schatten& s) { return schatten_spectrum(eigenvalues, s.p); },
                        [&](const Orbit& s) { return orbit_norm_spectrum(eigenvalues, s.mu); },
                        [&](const SupFamily& s) {
                          return sup_family_norm_spectrum(eigenvalues, s.family, s.unitary_reading);
                        },
                    },
                    spec);
}

double evaluate_norm(const NormSpec& spec, const HermitianMatrix& x) {
  return evaluate_norm_spectrum(spec, hermitian_eigenvalues(x));
}

PolarDualSample polar_dual_boundary(const NormSpec& spec, int n, int resolution) {
  if (n < 2) throw ValidationError("polar dual needs n >= 2 (traceless chamber is trivial for n = 1)");
  if (resolution < 2) throw ValidationError("polar dual resolution must be >= 2");
  validate(spec, n);
  const SupportOracle oracle{spec};
  const std::vector<RealVector> rays = chamber_rays(n);

  std::vector<RealVector> directions;
  std::function<double(const RealVector&)> support;

  if (n == 2) {
    directions.push_back(rays[0]);
    support = [&](const RealVector& d) { return oracle.ratio(d, d); };
  } else if (n == 3) {
    const RealVector& ea = rays[0];
    const RealVector eb = (rays[1] - rays[1].dot(ea) * ea).normalized();
    const double span = std::acos(std::clamp(rays[0].dot(rays[1]), -1.0, 1.0));
    auto arc = [ea, eb](double phi) -> RealVector { return std::cos(phi) * ea + std::sin(phi) * eb; };
    std::vector<double> phis;
    for (int i = 0; i < resolution; ++i) phis.push_back(span * i / (resolution - 1));
    for (double phi : phis) directions.push_back(arc(phi));
    // The ball is convex and d lies in the chamber, so phi -> <c(phi), d>/N(c(phi))
    // is unimodal on the chamber arc: coarse scan, then golden section.
    support = [&, arc, phis, span](const RealVector& d) {
      auto g = [&](double phi) { return oracle.ratio(arc(phi), d); };
      size_t best = 0;
      double best_val = -kInfinity;
      for (size_t i = 0; i < phis.size(); ++i) {
        const double v = g(phis[i]);
        if (v > best_val) {
          best_val = v;
          best = i;
        }
      }
      const double lo = phis[best > 0 ? best - 1 : 0];
      const double hi = phis[std::min(best + 1, phis.size() - 1)];
      return std::max({best_val, golden_max(g, lo, std::min(hi, span)), oracle.ratio(d, d)});
    };
  } else {
    const int dim = n - 1;
    const std::vector<RealVector> weights = simplex_samples(dim, resolution);
    for (const RealVector& w : weights) directions.push_back(direction_from_weights(rays, w));
    // Coarse maximum over the sample set, then a compass search on the weights.
    support = [&, weights, dim](const RealVector& d) {
      RealVector best_w = weights.front();
      double best_val = -kInfinity;
      for (const RealVector& w : weights) {
        const double v = oracle.ratio(direction_from_weights(rays, w), d);
        if (v > best_val) {
          best_val = v;
          best_w = w;
        }
      }
      for (double step = 0.05; step > 1e-13; step *= 0.5) {
        bool improved = true;
        while (improved) {
          improved = false;
          for (int j = 0; j < dim; ++j) {
            for (double sgn : {1.0, -1.0}) {
              RealVector w = best_w;
              w(j) = std::max(0.0, w(j) + sgn * step);
              if (w.sum() <= 0.0) continue;
              w /= w.sum();
              const double v = oracle.ratio(direction_from_weights(rays, w), d);
              if (v > best_val) {
                best_val = v;
                best_w = w;
                improved = true;
              }
            }
          }
        }
      }
      return std::max(best_val, oracle.ratio(d, d));
    };
  }

  PolarDualSample out;
  for (const RealVector& d : directions) {
    const double nd = evaluate_norm_spectrum(spec, d);
    const std::optional<double> exact = exact_support(spec, d);
    const double h = exact ? *exact : support(d);
    if (!(nd > 0.0) || !std::isfinite(nd) || !(h > 0.0) || !std::isfinite(h)) {
      ++out.skipped;
      continue;
    }
    RealVector mu = d / h;
    // Rounding can leave entries unsorted by an ulp on chamber walls.
    out.points.push_back(CartanVector::sorted(std::move(mu)));
  }
  return out;
}

}  // namespace uconv
