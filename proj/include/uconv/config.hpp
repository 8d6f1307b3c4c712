#pragma once

#include <string>

namespace uconv {

/// Every numerical threshold used by the library, in one record.
///
/// Nothing reads a global copy: callers pass the record explicitly and the
/// default-constructed value carries the documented defaults.
struct Tolerances {
  double hermiticity = 1e-12;           // relative to the operator norm
  double unitarity = 1e-10;             // |U*U - 1|
  double gap = 1e-8;                    // minimal chordal eigenvalue gap
  double eig_residual = 1e-9;           // |U v - e^{i theta} v|
  double orthonormality = 1e-10;        // eigenbasis columns
  double frame_orthonormality = 1e-9;   // transported bases
  double projector_idempotency = 1e-10; // |P^2 - P| for contour projectors
  int contour_nodes = 64;
  int contour_max_nodes = 1 << 16;
  int max_refine_depth = 20;
  double imag_part = 1e-8;              // first variation must be real
  double conv = 1e-7;                   // normalized second differences
  double grid_uniformity = 1e-12;       // relative to the step
  double perturb_margin = 1e-3;
  double perturb_initial = 1e-3;
  int perturb_attempts = 50;
  double dual = 1e-6;
  double majorization = 1e-9;
  double injectivity_margin = 1e-6;
  double witness_threshold = 1e-4;
};

/// Reads a flat JSON object of named tolerances on top of the defaults.
/// Unknown keys are rejected.
Tolerances load_tolerances(const std::string& path);

}  // namespace uconv
