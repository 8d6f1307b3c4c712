#include "uconv/io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "uconv/errors.hpp"

namespace uconv::io {

namespace {

Json real_rows(const Eigen::MatrixXd& a) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vec(const RealVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

RealVector vec_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw ValidationError(std::string(what) + " must be an array of numbers");
  RealVector v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(std::string(what) + " must be an array of numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

double number(const Json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) throw ValidationError(std::string("missing number \"") + key + "\"");
  return j[key].get<double>();
}

int dimension(const Json& j) {
  if (!j.is_object()) throw ValidationError("matrix must be a JSON object");
  if (!j.contains("n") || !j["n"].is_number_integer()) throw ValidationError("matrix needs an integer \"n\"");
  const int n = j["n"].get<int>();
  if (n < 1) throw ValidationError("matrix dimension must be positive");
  if (!j.contains("re") || !j["re"].is_array() || j["re"].size() != static_cast<size_t>(n)) {
    throw ValidationError("matrix \"re\" must have n rows");
  }
  return n;
}

Eigen::MatrixXd full_rows(const Json& rows, int n, const char* what) {
  Eigen::MatrixXd a(n, n);
  for (int i = 0; i < n; ++i) {
    const Json& row = rows[static_cast<size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<size_t>(n)) {
      throw ValidationError(std::string("matrix \"") + what + "\" rows must have n entries");
    }
    for (int k = 0; k < n; ++k) {
      if (!row[static_cast<size_t>(k)].is_number()) throw ValidationError("matrix entries must be numbers");
      a(i, k) = row[static_cast<size_t>(k)].get<double>();
    }
  }
  return a;
}

}  // namespace

Json to_json(const Matrix& a) {
  Json j;
  j["n"] = a.rows();
  j["re"] = real_rows(a.real());
  j["im"] = real_rows(a.imag());
  return j;
}

Matrix matrix_from_json(const Json& j) {
  const int n = dimension(j);
  Matrix a = full_rows(j["re"], n, "re").cast<Complex>();
  if (j.contains("im")) {
    if (!j["im"].is_array() || j["im"].size() != static_cast<size_t>(n)) {
      throw ValidationError("matrix \"im\" must have n rows");
    }
    a += Complex(0.0, 1.0) * full_rows(j["im"], n, "im").cast<Complex>();
  }
  return a;
}

HermitianMatrix hermitian_from_json(const Json& j, const Tolerances& tol) {
  const int n = dimension(j);
  const Eigen::MatrixXd re = full_rows(j["re"], n, "re");
  Eigen::MatrixXd im = Eigen::MatrixXd::Zero(n, n);
  if (j.contains("im")) {
    const Json& rows = j["im"];
    if (!rows.is_array() || rows.size() != static_cast<size_t>(n)) {
      throw ValidationError("matrix \"im\" must have n rows");
    }
    bool upper = true;
    for (int i = 0; i < n; ++i) upper = upper && rows[static_cast<size_t>(i)].size() == static_cast<size_t>(n - i);
    if (upper && n > 1) {
      for (int i = 0; i < n; ++i) {
        for (int k = i; k < n; ++k) {
          const Json& v = rows[static_cast<size_t>(i)][static_cast<size_t>(k - i)];
          if (!v.is_number()) throw ValidationError("matrix entries must be numbers");
          im(i, k) = v.get<double>();
          if (k != i) im(k, i) = -im(i, k);
        }
      }
    } else {
      im = full_rows(rows, n, "im");
    }
  }
  Matrix a = re.cast<Complex>() + Complex(0.0, 1.0) * im.cast<Complex>();
  return HermitianMatrix(a, tol);
}

Json to_json(const GeodesicPath& path) {
  Json j;
  j["x"] = to_json(path.x().matrix());
  j["y"] = to_json(path.y().matrix());
  j["t_min"] = path.t_min();
  j["t_max"] = path.t_max();
  return j;
}

GeodesicPath path_from_json(const Json& j, const Tolerances& tol) {
  if (!j.is_object() || !j.contains("x") || !j.contains("y")) {
    throw ValidationError("path must be an object with \"x\" and \"y\"");
  }
  const double t_min = j.contains("t_min") ? number(j, "t_min") : 0.0;
  const double t_max = j.contains("t_max") ? number(j, "t_max") : 1.0;
  HermitianMatrix x = hermitian_from_json(j["x"], tol);
  HermitianMatrix y = hermitian_from_json(j["y"], tol);
  if (x.size() != y.size()) throw ValidationError("path: x and y differ in dimension");
  return GeodesicPath(std::move(x), std::move(y), t_min, t_max);
}

Json to_json(const EigenFrame& frame, bool with_vectors) {
  Json j;
  j["grid"] = frame.grid;
  j["angles"] = real_rows(frame.angles);
  Json ball = Json::array();
  for (bool b : frame.ball_ok) ball.push_back(b);
  j["ball_ok"] = std::move(ball);
  j["min_gap"] = frame.min_gap;
  if (with_vectors) {
    Json vs = Json::array();
    for (const Matrix& v : frame.vectors) vs.push_back(to_json(v));
    j["vectors"] = std::move(vs);
  }
  return j;
}

Json to_json(const ConvexityCertificate& c) {
  Json j;
  j["label"] = c.label;
  j["verdict"] = to_string(c.verdict);
  j["min_second_difference"] = c.min_second_difference;
  j["offending_index"] = c.offending_index ? Json(*c.offending_index) : Json(nullptr);
  j["kinks"] = c.kinks;
  j["piecewise_linear"] = c.piecewise_linear;
  j["grid"] = c.grid;
  j["values"] = c.values;
  j["second_differences"] = c.second_differences;
  return j;
}

Json to_json(const PerturbationReport& r) {
  Json j;
  j["magnitude"] = r.magnitude;
  j["min_gap_achieved"] = r.min_gap_achieved;
  j["attempts"] = r.attempts;
  j["z"] = to_json(r.z.matrix());
  j["y_new"] = to_json(r.y_new.matrix());
  return j;
}

Json to_json(const CommutationReport& r) {
  Json j;
  j["commute"] = r.commute;
  j["min_curvature"] = r.min_curvature;
  j["commutator_norm"] = r.commutator_norm;
  j["agree"] = r.agree;
  j["certificate"] = to_json(r.certificate);
  return j;
}

Json to_json(const DistanceProfile& p) {
  Json j;
  j["norm"] = to_json(p.norm);
  j["finsler_only"] = is_finsler_only(p.norm);
  j["path"] = to_json(p.path);
  j["grid"] = p.grid;
  j["distances"] = p.distances;
  Json ball = Json::array();
  for (bool b : p.inside_ball) ball.push_back(b);
  j["inside_ball"] = std::move(ball);
  j["segment"] = {{"begin", p.segment_begin}, {"end", p.segment_end}};
  j["certificate"] = to_json(p.certificate);
  return j;
}

Json to_json(const RadiusWitness& w) {
  Json j;
  j["seed"] = w.seed;
  j["radius"] = w.radius;
  j["t_star"] = w.t_star;
  j["m"] = w.m;
  j["second_difference"] = w.second_difference;
  j["second_difference_double_grid"] = w.second_difference_double_grid;
  j["x"] = to_json(w.x.matrix());
  j["y"] = to_json(w.y.matrix());
  return j;
}

Json to_json(const RadiusScanResult& r) {
  Json j;
  j["n"] = r.n;
  j["inside_trials"] = r.inside_trials;
  j["inside_violations"] = r.inside_violations;
  j["witness_trials_used"] = r.witness_trials_used;
  j["outside_example"] = r.outside_example ? to_json(*r.outside_example) : Json(nullptr);
  Json rows = Json::array();
  for (const ScanRow& row : r.rows) {
    rows.push_back({{"trial", row.trial},
                    {"region", row.region},
                    {"seed", row.seed},
                    {"radius", row.radius},
                    {"min_second_difference", row.min_second_difference},
                    {"verdict", to_string(row.verdict)}});
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const NormSpec& spec) {
  struct Visitor {
    Json operator()(const KyFan& s) const { return {{"type", "kyfan"}, {"k", s.k}}; }
    Json operator()(const Alpha& s) const { return {{"type", "alpha"}, {"weights", vec(s.weights.values())}}; }
    Json operator()(const Schatten& s) const {
      return {{"type", "schatten"}, {"p", std::isinf(s.p) ? Json("inf") : Json(s.p)}};
    }
    Json operator()(const Orbit& s) const { return {{"type", "orbit"}, {"mu", vec(s.mu.values())}}; }
    Json operator()(const SupFamily& s) const {
      Json family = Json::array();
      for (const CartanVector& mu : s.family) family.push_back(vec(mu.values()));
      return {{"type", "supfamily"}, {"family", std::move(family)}, {"unitary", s.unitary_reading}};
    }
  };
  return std::visit(Visitor{}, spec);
}

NormSpec norm_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) {
    throw ValidationError("norm must be an object with a string \"type\"");
  }
  const std::string type = j["type"].get<std::string>();
  NormSpec spec;
  if (type == "kyfan") {
    if (!j.contains("k") || !j["k"].is_number_integer()) throw ValidationError("kyfan norm needs an integer \"k\"");
    spec = KyFan{j["k"].get<int>()};
  } else if (type == "alpha") {
    if (!j.contains("weights")) throw ValidationError("alpha norm needs \"weights\"");
    spec = Alpha{AlphaWeights(vec_from_json(j["weights"], "weights"))};
  } else if (type == "schatten") {
    if (!j.contains("p")) throw ValidationError("schatten norm needs \"p\"");
    const Json& p = j["p"];
    if (p.is_string() && (p == "inf" || p == "infinity")) {
      spec = Schatten{kInfinity};
    } else if (p.is_number()) {
      spec = Schatten{p.get<double>()};
    } else {
      throw ValidationError("schatten \"p\" must be a number or \"inf\"");
    }
  } else if (type == "orbit") {
    if (!j.contains("mu")) throw ValidationError("orbit norm needs \"mu\"");
    spec = Orbit{CartanVector(vec_from_json(j["mu"], "mu"))};
  } else if (type == "supfamily") {
    if (!j.contains("family") || !j["family"].is_array()) throw ValidationError("supfamily norm needs \"family\"");
    SupFamily s;
    for (const Json& mu : j["family"]) s.family.emplace_back(vec_from_json(mu, "family member"));
    if (j.contains("unitary")) {
      if (!j["unitary"].is_boolean()) throw ValidationError("supfamily \"unitary\" must be a boolean");
      s.unitary_reading = j["unitary"].get<bool>();
    }
    spec = std::move(s);
  } else {
    throw ValidationError("unknown norm type: " + type);
  }
  validate(spec);
  return spec;
}

void write_scan_csv(std::ostream& out, const RadiusScanResult& r) {
  out << "trial,region,seed,radius";
  for (int m = 1; m <= r.n; ++m) out << ",min_d2_m" << m;
  out << ",verdict\n";
  std::ostringstream line;
  line << std::setprecision(17);
  for (const ScanRow& row : r.rows) {
    line.str("");
    line << row.trial << ',' << row.region << ',' << row.seed << ',' << row.radius;
    for (double d : row.min_second_difference) line << ',' << d;
    line << ',' << to_string(row.verdict) << '\n';
    out << line.str();
  }
}

Samples read_samples_csv(std::istream& in) {
  Samples s;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    if (!header) {
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ValidationError("CSV line " + std::to_string(lineno) + ": expected t,value");
    try {
      size_t used = 0;
      const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      const double t = std::stod(a, &used);
      if (a.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("t");
      const double v = std::stod(b, &used);
      if (b.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument("value");
      s.t.push_back(t);
      s.value.push_back(v);
    } catch (const std::logic_error&) {
      throw ValidationError("CSV line " + std::to_string(lineno) + ": not a number");
    }
  }
  if (!header) throw ValidationError("CSV input is empty");
  return s;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) {
  try {
    return Json::parse(read_text_file(path));
  } catch (const Json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

}  // namespace uconv::io
