#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "uconv/config.hpp"
#include "uconv/linalg.hpp"

namespace uconv {

/// Weights alpha_1 >= ... >= alpha_n >= 0 with alpha_1 > 0.
class AlphaWeights {
 public:
  explicit AlphaWeights(RealVector alpha);
  const RealVector& values() const { return alpha_; }
  int size() const { return static_cast<int>(alpha_.size()); }

 private:
  RealVector alpha_;
};

/// A point of the positive Weyl chamber: a real vector sorted non-increasing.
///
/// For su(n) the Cartan subalgebra is modeled as real diagonals paired by the
/// trace form <a, b> = sum a_i b_i; the Weyl group acts by permutations.
class CartanVector {
 public:
  /// Throws ValidationError unless v is sorted non-increasing.
  explicit CartanVector(RealVector v);
  static CartanVector sorted(RealVector v);

  const RealVector& values() const { return v_; }
  int size() const { return static_cast<int>(v_.size()); }
  bool traceless() const { return traceless_; }
  bool strictly_decreasing() const;
  /// -v is a permutation of v; exactly the case where the orbit norm is a norm.
  bool symmetric(double tol = 1e-12) const;

 private:
  RealVector v_;
  bool traceless_ = false;
};

struct KyFan {
  int k = 1;
};
struct Alpha {
  AlphaWeights weights;
};
struct Schatten {
  double p = 2.0;  // infinity allowed
};
struct Orbit {
  CartanVector mu;
};
struct SupFamily {
  std::vector<CartanVector> family;
  bool unitary_reading = false;  // members read as alpha weights on singular values
};

using NormSpec = std::variant<KyFan, Alpha, Schatten, Orbit, SupFamily>;

/// Validates parameters against dimension n (or only intrinsically when n == 0).
void validate(const NormSpec& spec, int n = 0);
std::string describe(const NormSpec& spec);
/// Positively homogeneous only (orbit data that is not symmetric).
bool is_finsler_only(const NormSpec& spec);

RealVector singular_values(const HermitianMatrix& x);
double ky_fan(const HermitianMatrix& x, int k);
double alpha_norm(const HermitianMatrix& x, const AlphaWeights& alpha);
double schatten(const HermitianMatrix& x, double p);
double orbit_norm(const HermitianMatrix& x, const CartanVector& mu);

/// Spectrum-level versions; `eigenvalues` may be in any order.
double ky_fan_spectrum(const RealVector& eigenvalues, int k);
double alpha_norm_spectrum(const RealVector& eigenvalues, const AlphaWeights& alpha);
double schatten_spectrum(const RealVector& eigenvalues, double p);
double orbit_norm_spectrum(const RealVector& eigenvalues, const CartanVector& mu);

struct RearrangementResult {
  double value = 0.0;
  bool exhaustive = false;  // false: n > 8, sorted pairing used
};

/// max over permutations s of sum x_i y_{s(i)}.
RearrangementResult rearrangement_sup(const RealVector& x, const RealVector& y);

/// Whether diag(u x u*) is majorized by the spectrum of x.
bool kostant_membership(const HermitianMatrix& x, const UnitaryMatrix& u,
                        const Tolerances& tol = Tolerances{});

/// max over the family of orbit norms (alpha norms in the unitary reading).
double sup_family_norm(const HermitianMatrix& x, const std::vector<CartanVector>& family,
                       bool unitary_reading = false);
double sup_family_norm_spectrum(const RealVector& eigenvalues, const std::vector<CartanVector>& family,
                                bool unitary_reading = false);

double evaluate_norm(const NormSpec& spec, const HermitianMatrix& x);
double evaluate_norm_spectrum(const NormSpec& spec, const RealVector& eigenvalues);

struct PolarDualSample {
  std::vector<CartanVector> points;
  int skipped = 0;
};

/// Samples the boundary of the polar dual of the norm's unit ball inside the
/// traceless positive chamber: for each sampled unit direction d returns
/// d / h(d), h the support function of the ball restricted to the chamber.
PolarDualSample polar_dual_boundary(const NormSpec& spec, int n, int resolution);

constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace uconv
