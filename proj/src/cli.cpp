#include "uconv/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include <CLI11.hpp>

#include "uconv/convexity.hpp"
#include "uconv/errors.hpp"
#include "uconv/geodesic.hpp"
#include "uconv/io.hpp"

namespace uconv {

namespace {

using io::Json;

struct Globals {
  int grid = 401;
  std::uint64_t seed = 0;
  std::string tol_config;
  std::string out_file;
  std::string format;  // empty: command default
  Tolerances tol;
};

struct Result {
  std::string text;
  int code = kExitOk;
};

Json header(const char* command) {
  Json j;
  j["version"] = kVersion;
  j["command"] = command;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void merge(Json& into, const Json& from) {
  for (const auto& [k, v] : from.items()) into[k] = v;
}

std::string format_or(const Globals& g, const char* fallback) {
  const std::string f = g.format.empty() ? fallback : g.format;
  if (f != "json" && f != "csv") throw ValidationError("--format must be json or csv");
  return f;
}

void require_json(const Globals& g, const char* command) {
  if (format_or(g, "json") != "json") throw ValidationError(std::string(command) + " supports only --format json");
}

void check_grid(const Globals& g) {
  if (g.grid < 3) throw ValidationError("--grid must be at least 3");
}

Json inline_or_file(const std::string& text) {
  if (!text.empty() && text.front() == '@') return io::read_json_file(text.substr(1));
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("cannot parse inline JSON: " + std::string(e.what()));
  }
}

std::vector<double> column(const Eigen::MatrixXd& m, Eigen::Index c) {
  std::vector<double> out(static_cast<size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<size_t>(i)] = m(i, c);
  return out;
}

std::ostringstream csv_stream() {
  std::ostringstream s;
  s << std::setprecision(17);
  return s;
}

// analyze -----------------------------------------------------------------

Result analyze(const Globals& g, const std::string& path_file, bool with_vectors) {
  check_grid(g);
  const std::string format = format_or(g, "json");
  const GeodesicPath path = io::path_from_json(io::read_json_file(path_file), g.tol);
  const int n = path.size();
  const EigenFrame frame = track_frame(path, g.grid, g.tol);
  const Eigen::MatrixXd sums = partial_angle_sums(frame);
  const Eigen::MatrixXd tails = tail_sums_sorted(frame.angles);
  bool inside = true;
  for (bool b : frame.ball_ok) inside = inside && b;

  bool rejected = false;
  Json partial = Json::array(), tail = Json::array();
  for (int m = 1; m <= n; ++m) {
    const auto c = certify(column(sums, m - 1), frame.grid, "s_" + std::to_string(m), n * n, g.tol);
    const auto t = certify_concave(column(tails, m - 1), frame.grid, "tail_" + std::to_string(m), g.tol);
    rejected = rejected || (inside && (c.verdict == Verdict::nonconvex || t.verdict == Verdict::nonconvex));
    partial.push_back(io::to_json(c));
    tail.push_back(io::to_json(t));
  }
  Json singular = nullptr;
  if (inside) {
    const Eigen::MatrixXd sv = partial_singular_sums(path, g.grid, g.tol);
    singular = Json::array();
    for (int m = 1; m <= n; ++m) {
      const auto c = certify(column(sv, m - 1), frame.grid, "sigma_" + std::to_string(m), n * n, g.tol);
      rejected = rejected || c.verdict == Verdict::nonconvex;
      singular.push_back(io::to_json(c));
    }
  }

  const double tr_x = path.x().matrix().trace().real();
  const double tr_y = path.y().matrix().trace().real();
  double trace_residual = 0.0;
  for (int i = 0; i < frame.points(); ++i) {
    const double d = sums(i, n - 1) - frame.grid[static_cast<size_t>(i)] * tr_x - tr_y;
    trace_residual = std::max(trace_residual, std::abs(std::remainder(d, 2.0 * std::numbers::pi)));
  }

  Result r;
  r.code = rejected ? kExitRejected : kExitOk;
  if (format == "csv") {
    auto s = csv_stream();
    s << "t";
    for (int m = 1; m <= n; ++m) s << ",s_" << m;
    s << '\n';
    for (int i = 0; i < frame.points(); ++i) {
      s << frame.grid[static_cast<size_t>(i)];
      for (int m = 0; m < n; ++m) s << ',' << sums(i, m);
      s << '\n';
    }
    r.text = s.str();
    return r;
  }
  Json j = header("analyze");
  j["n"] = n;
  j["inside_ball"] = inside;
  j["trace_identity_residual"] = trace_residual;
  j["partial_sums"] = std::move(partial);
  j["tail_sums"] = std::move(tail);
  j["singular_sums"] = std::move(singular);
  j["frame"] = io::to_json(frame, with_vectors);
  r.text = dump(j);
  return r;
}

// distance ----------------------------------------------------------------

Result distance(const Globals& g, const std::string& path_file, const std::string& norm_text) {
  check_grid(g);
  const std::string format = format_or(g, "json");
  const GeodesicPath path = io::path_from_json(io::read_json_file(path_file), g.tol);
  const NormSpec norm = io::norm_from_json(inline_or_file(norm_text));
  const DistanceProfile p = distance_profile(path, norm, g.grid, g.tol);
  Result r;
  r.code = p.certificate.verdict == Verdict::nonconvex ? kExitRejected : kExitOk;
  if (format == "csv") {
    auto s = csv_stream();
    s << "t,distance,inside_ball\n";
    for (size_t i = 0; i < p.grid.size(); ++i) {
      s << p.grid[i] << ',' << p.distances[i] << ',' << (p.inside_ball[i] ? 1 : 0) << '\n';
    }
    r.text = s.str();
    return r;
  }
  Json j = header("distance");
  merge(j, io::to_json(p));
  r.text = dump(j);
  return r;
}

// certify -----------------------------------------------------------------

Result certify_samples(const Globals& g, const std::string& input, const std::string& label,
                       const std::string& expect, int max_kinks) {
  const std::string format = format_or(g, "json");
  io::Samples s;
  if (input == "-") {
    s = io::read_samples_csv(std::cin);
  } else {
    std::istringstream in(io::read_text_file(input));
    s = io::read_samples_csv(in);
  }
  if (max_kinks < 0) throw ValidationError("--max-kinks must be non-negative");
  const ConvexityCertificate c = expect == "concave" ? certify_concave(s.value, s.t, label, g.tol)
                                                     : certify(s.value, s.t, label, max_kinks, g.tol);
  Result r;
  if (!expect.empty()) {
    const bool ok = expect == "convex"    ? (c.verdict == Verdict::convex || c.verdict == Verdict::linear)
                    : expect == "concave" ? (c.verdict == Verdict::concave || c.verdict == Verdict::linear)
                                          : c.verdict == Verdict::linear;
    if (!ok) r.code = kExitRejected;
  }
  if (format == "csv") {
    auto out = csv_stream();
    out << "t,value,second_difference\n";
    for (size_t i = 0; i < c.grid.size(); ++i) {
      out << c.grid[i] << ',' << c.values[i] << ',';
      if (i >= 1 && i + 1 < c.grid.size()) out << c.second_differences[i - 1];
      out << '\n';
    }
    r.text = out.str();
    return r;
  }
  Json j = header("certify");
  j["certificate"] = io::to_json(c);
  r.text = dump(j);
  return r;
}

// perturb -----------------------------------------------------------------

Result perturb(const Globals& g, const std::string& path_file) {
  check_grid(g);
  require_json(g, "perturb");
  const GeodesicPath path = io::path_from_json(io::read_json_file(path_file), g.tol);
  const PerturbationReport rep = perturb_to_distinct(path, g.grid, g.seed, g.tol);
  Json j = header("perturb");
  j["seed"] = g.seed;
  j["report"] = io::to_json(rep);
  j["path"] = io::to_json(GeodesicPath(path.x(), rep.y_new, path.t_min(), path.t_max()));
  return {dump(j), kExitOk};
}

// radius-scan -------------------------------------------------------------

Result scan(const Globals& g, int n, int trials, int witness_trials, unsigned threads, std::ostream& err) {
  check_grid(g);
  const std::string format = format_or(g, "csv");
  RadiusScanOptions options;
  options.grid = g.grid;
  options.witness_trials = witness_trials;
  options.threads = threads;
  const RadiusScanResult res = radius_scan(n, trials, g.seed, options, g.tol);
  Result r;
  r.code = res.inside_violations > 0 ? kExitRejected : kExitOk;
  if (format == "csv") {
    std::ostringstream s;
    io::write_scan_csv(s, res);
    r.text = s.str();
    err << "inside_violations=" << res.inside_violations << " witness="
        << (res.outside_example ? "trial " + std::to_string(res.witness_trials_used - 1) : std::string("none"))
        << '\n';
    return r;
  }
  Json j = header("radius-scan");
  j["seed"] = g.seed;
  j["grid"] = g.grid;
  merge(j, io::to_json(res));
  r.text = dump(j);
  return r;
}

// commute -----------------------------------------------------------------

Result commute(const Globals& g, const std::string& path_file, const std::string& mu_text) {
  check_grid(g);
  require_json(g, "commute");
  const GeodesicPath path = io::path_from_json(io::read_json_file(path_file), g.tol);
  const Json mu_json = inline_or_file(mu_text);
  if (!mu_json.is_array()) throw ValidationError("--mu must be a JSON array");
  RealVector mu(static_cast<Eigen::Index>(mu_json.size()));
  for (size_t i = 0; i < mu_json.size(); ++i) {
    if (!mu_json[i].is_number()) throw ValidationError("--mu entries must be numbers");
    mu(static_cast<Eigen::Index>(i)) = mu_json[i].get<double>();
  }
  const CommutationReport rep = detect_commutation(path, g.grid, CartanVector(mu), g.tol);
  Json j = header("commute");
  merge(j, io::to_json(rep));
  return {dump(j), rep.agree ? kExitOk : kExitRejected};
}

// norms -------------------------------------------------------------------

Result norms(const Globals& g, const std::string& matrix_file, const std::vector<std::string>& specs) {
  const std::string format = format_or(g, "json");
  const HermitianMatrix x = io::hermitian_from_json(io::read_json_file(matrix_file), g.tol);
  if (specs.empty()) throw ValidationError("norms: give at least one --norm");
  Json values = Json::array();
  auto s = csv_stream();
  s << "norm,value\n";
  for (const std::string& text : specs) {
    const NormSpec spec = io::norm_from_json(inline_or_file(text));
    validate(spec, x.size());
    const double v = evaluate_norm(spec, x);
    values.push_back({{"norm", io::to_json(spec)}, {"value", v}, {"finsler_only", is_finsler_only(spec)}});
    s << '"' << describe(spec) << "\"," << v << '\n';
  }
  if (format == "csv") return {s.str(), kExitOk};
  Json j = header("norms");
  j["n"] = x.size();
  j["values"] = std::move(values);
  return {dump(j), kExitOk};
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geodesic convexity toolkit for the unitary group", "uconv"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--grid", g.grid, "Grid points on [t_min, t_max]")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--tol-config", g.tol_config, "JSON file of named tolerances");
  app.add_option("--out", g.out_file, "Write output to FILE instead of stdout");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string path_file, norm_text, input, label = "f", expect, matrix_file, mu_text;
  std::vector<std::string> norm_list;
  bool with_vectors = false;
  int max_kinks = 0, n = 0, trials = 1000, witness_trials = -1;
  unsigned threads = 0;

  auto* an = app.add_subcommand("analyze", "Track eigenangles and certify all partial sums");
  an->add_option("path,--path", path_file, "Path JSON file")->required();
  an->add_flag("--vectors", with_vectors, "Include eigenvectors in the frame output");

  auto* di = app.add_subcommand("distance", "Distance profile d(1, u(t)) for a norm");
  di->add_option("path,--path", path_file, "Path JSON file")->required();
  di->add_option("--norm", norm_text, "Norm JSON (inline or @file)")->required();

  auto* ce = app.add_subcommand("certify", "Certify convexity of CSV samples t,value");
  ce->add_option("input,--input", input, "CSV file, or - for stdin")->required();
  ce->add_option("--label", label, "Label of the sampled function")->capture_default_str();
  ce->add_option("--expect", expect, "Expected shape; exit 4 if rejected")
      ->check(CLI::IsMember({"convex", "concave", "linear"}));
  ce->add_option("--max-kinks", max_kinks, "Kinks allowed for the piecewise-linear flag")->capture_default_str();

  auto* pe = app.add_subcommand("perturb", "Perturb y so the path has distinct eigenvalues");
  pe->add_option("path,--path", path_file, "Path JSON file")->required();

  auto* rs = app.add_subcommand("radius-scan", "Random convexity scan inside and outside the sqrt(2) ball");
  rs->add_option("--n", n, "Matrix dimension")->required();
  rs->add_option("--trials", trials, "Inside-ball trials")->capture_default_str();
  rs->add_option("--witness-trials", witness_trials, "Outside search budget (negative: same as trials)")
      ->capture_default_str();
  rs->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();

  auto* co = app.add_subcommand("commute", "Commutation detector from strict convexity");
  co->add_option("path,--path", path_file, "Path JSON file")->required();
  co->add_option("--mu", mu_text, "Strictly decreasing weights, JSON array")->required();

  auto* no = app.add_subcommand("norms", "Evaluate norms of a Hermitian matrix");
  no->add_option("matrix,--matrix", matrix_file, "Matrix JSON file")->required();
  no->add_option("--norm", norm_list, "Norm JSON (inline or @file); repeatable")->required();

  std::vector<std::string> argv_store{"uconv"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (!g.tol_config.empty()) g.tol = load_tolerances(g.tol_config);
    Result r;
    if (an->parsed()) r = analyze(g, path_file, with_vectors);
    else if (di->parsed()) r = distance(g, path_file, norm_text);
    else if (ce->parsed()) r = certify_samples(g, input, label, expect, max_kinks);
    else if (pe->parsed()) r = perturb(g, path_file);
    else if (rs->parsed()) r = scan(g, n, trials, witness_trials, threads, err);
    else if (co->parsed()) r = commute(g, path_file, mu_text);
    else r = norms(g, matrix_file, norm_list);

    if (g.out_file.empty()) {
      out << r.text;
    } else {
      std::ofstream f(g.out_file, std::ios::binary);
      if (!f) throw ValidationError("cannot write " + g.out_file);
      f << r.text;
    }
    if (r.code == kExitRejected) err << "rejected: a certified property failed\n";
    return r.code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

}  // namespace uconv
