#include "uconv/config.hpp"

#include <cmath>
#include <variant>

#include "uconv/errors.hpp"
#include "uconv/io.hpp"

namespace uconv {

namespace {

using Field = std::variant<double Tolerances::*, int Tolerances::*>;

struct Key {
  const char* name;
  Field field;
};

const Key kKeys[] = {
    {"hermiticity_tol", &Tolerances::hermiticity},
    {"unitarity_tol", &Tolerances::unitarity},
    {"gap_tol", &Tolerances::gap},
    {"eig_residual_tol", &Tolerances::eig_residual},
    {"orthonormality_tol", &Tolerances::orthonormality},
    {"frame_orthonormality_tol", &Tolerances::frame_orthonormality},
    {"projector_idempotency_tol", &Tolerances::projector_idempotency},
    {"contour_nodes", &Tolerances::contour_nodes},
    {"contour_max_nodes", &Tolerances::contour_max_nodes},
    {"max_refine_depth", &Tolerances::max_refine_depth},
    {"imag_part_tol", &Tolerances::imag_part},
    {"conv_tol", &Tolerances::conv},
    {"grid_uniformity_tol", &Tolerances::grid_uniformity},
    {"perturb_margin", &Tolerances::perturb_margin},
    {"perturb_initial", &Tolerances::perturb_initial},
    {"perturb_attempts", &Tolerances::perturb_attempts},
    {"dual_tol", &Tolerances::dual},
    {"majorization_tol", &Tolerances::majorization},
    {"injectivity_margin", &Tolerances::injectivity_margin},
    {"witness_threshold", &Tolerances::witness_threshold},
};

}  // namespace

namespace io {

Json to_json(const Tolerances& tol) {
  Json j = Json::object();
  for (const Key& k : kKeys) {
    std::visit([&](auto member) { j[k.name] = tol.*member; }, k.field);
  }
  return j;
}

Tolerances tolerances_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("tolerance config must be a JSON object");
  Tolerances tol;
  for (const auto& [name, value] : j.items()) {
    const Key* key = nullptr;
    for (const Key& k : kKeys) {
      if (name == k.name) key = &k;
    }
    if (!key) throw ValidationError("unknown tolerance key: " + name);
    if (!value.is_number()) throw ValidationError("tolerance " + name + " must be a number");
    std::visit(
        [&](auto member) {
          using T = std::remove_reference_t<decltype(tol.*member)>;
          const double v = value.get<double>();
          if constexpr (std::is_same_v<T, int>) {
            if (v != std::floor(v) || v < 1) throw ValidationError("tolerance " + name + " must be a positive integer");
            tol.*member = static_cast<int>(v);
          } else {
            if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("tolerance " + name + " must be positive");
            tol.*member = v;
          }
        },
        key->field);
  }
  return tol;
}

}  // namespace io

Tolerances load_tolerances(const std::string& path) { return io::tolerances_from_json(io::read_json_file(path)); }

}  // namespace uconv
