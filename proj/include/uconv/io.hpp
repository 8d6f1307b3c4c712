#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "uconv/config.hpp"
#include "uconv/convexity.hpp"
#include "uconv/eigen_flow.hpp"
#include "uconv/geodesic.hpp"
#include "uconv/linalg.hpp"
#include "uconv/norms.hpp"

namespace uconv::io {

using Json = nlohmann::ordered_json;

// Matrices: {"n": int, "re": [[...]], "im": [[...]]}, row-major.
Json to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);
/// Accepts a missing "im" (real matrix) or an "im" holding only the upper
/// triangle (row i has n - i entries); the lower triangle is then conjugated.
HermitianMatrix hermitian_from_json(const Json& j, const Tolerances& tol = Tolerances{});

// Paths: {"x": matrix, "y": matrix, "t_min": r, "t_max": r}; t bounds default to [0, 1].
Json to_json(const GeodesicPath& path);
GeodesicPath path_from_json(const Json& j, const Tolerances& tol = Tolerances{});

Json to_json(const EigenFrame& frame, bool with_vectors = false);
Json to_json(const ConvexityCertificate& c);
Json to_json(const PerturbationReport& r);
Json to_json(const CommutationReport& r);
Json to_json(const DistanceProfile& p);
Json to_json(const RadiusWitness& w);
Json to_json(const RadiusScanResult& r);

// NormSpec: {"type": "kyfan"|"alpha"|"schatten"|"orbit"|"supfamily", ...}.
//   kyfan {"k"}, alpha {"weights"}, schatten {"p": number or "inf"},
//   orbit {"mu"}, supfamily {"family": [[...], ...], "unitary": bool}.
Json to_json(const NormSpec& spec);
NormSpec norm_from_json(const Json& j);

Json to_json(const Tolerances& tol);
Tolerances tolerances_from_json(const Json& j);

/// One header row, then trial,region,seed,radius,min_d2_m1..min_d2_mn,verdict.
void write_scan_csv(std::ostream& out, const RadiusScanResult& r);

/// Two-column CSV with a header row ("t,value" or any two names).
struct Samples {
  std::vector<double> t;
  std::vector<double> value;
};
Samples read_samples_csv(std::istream& in);

/// Throws ValidationError with the file name on failure.
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace uconv::io
