#pragma once

#include <vector>

#include "uconv/config.hpp"
#include "uconv/convexity.hpp"
#include "uconv/eigen_flow.hpp"
#include "uconv/norms.hpp"

namespace uconv {

/// Norm of -i log(u) for the principal log. Throws BranchError near -1 and
/// InjectivityError once an angle exceeds pi - injectivity_margin.
double distance_to_identity(const UnitaryMatrix& u, const NormSpec& norm, const Tolerances& tol = Tolerances{});

struct DistanceProfile {
  GeodesicPath path;
  NormSpec norm;
  std::vector<double> grid;
  std::vector<double> distances;
  std::vector<bool> inside_ball;  // max |theta| < pi/2, i.e. |u(t) - 1| < sqrt(2)
  ConvexityCertificate certificate;
  int segment_begin = 0;  // certified sub-grid [segment_begin, segment_end)
  int segment_end = 0;
};

/// Distances along the grid; the certificate covers the longest contiguous
/// inside-ball run (the first one on ties) and allows n^2 kinks before the
/// piecewise-linear flag drops. Runs shorter than 3 points are indeterminate.
DistanceProfile distance_profile(const GeodesicPath& path, const NormSpec& norm, int points,
                                 const Tolerances& tol = Tolerances{});

}  // namespace uconv
