#include "dwv/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dwv {
namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& path, const std::string& what) {
  throw ParamError("config field \"" + path + "\": " + what);
}

void expect_keys(const json& obj, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known)
      field_error(path.empty() ? it.key() : path + "." + it.key(),
                  "unknown key");
  }
}

double get_num(const json& obj, const std::string& path, const char* key,
               double dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_number()) field_error(path + key, "expected a number");
  return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key,
            int dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_number_integer()) field_error(path + key, "expected an integer");
  return v.get<int>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& dflt) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  if (!v.is_string()) field_error(path + key, "expected a string");
  return v.get<std::string>();
}

GridRange get_grid(const json& obj, const std::string& path, const char* key,
                   GridRange dflt, int min_n) {
  if (!obj.contains(key)) return dflt;
  const json& v = obj.at(key);
  std::string p = path + key;
  if (!v.is_object()) field_error(p, "expected an object {lo, hi, n}");
  expect_keys(v, p, {"lo", "hi", "n"});
  GridRange g;
  g.lo = get_num(v, p + ".", "lo", dflt.lo);
  g.hi = get_num(v, p + ".", "hi", dflt.hi);
  g.n = get_int(v, p + ".", "n", dflt.n);
  if (!(g.lo > 0.0)) field_error(p + ".lo", "must be positive (log-spaced)");
  if (!(g.hi > g.lo)) field_error(p + ".hi", "must exceed lo");
  if (g.n < min_n)
    field_error(p + ".n", "needs at least " + std::to_string(min_n) + " samples");
  return g;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

CoefficientFamily FamilySpec::build() const {
  if (kind == "polynomial")
    return CoefficientFamily::polynomial(alpha, beta, gamma, kappa, smoothness,
                                         bumps);
  if (kind == "exponential")
    return CoefficientFamily::exponential(q, r, kappa, smoothness, bumps);
  if (kind == "super-exponential")
    return CoefficientFamily::super_exponential(q, r, kappa, smoothness,
                                                bumps);
  throw ParamError("config field \"family.kind\": unknown family \"" + kind +
                   "\"");
}

DataProfile ExperimentConfig::profile(const std::string& which) const {
  if (which == "gaussian") return DataProfile::gaussian();
  if (which == "zero") return DataProfile::zero();
  if (which == "indicator") return DataProfile::indicator(indicator_radius);
  throw ParamError("config field \"data\": unknown profile \"" + which + "\"");
}

std::vector<double> ExperimentConfig::times() const {
  return log_grid(t_grid.lo, t_grid.hi, t_grid.n);
}

std::vector<double> ExperimentConfig::radii() const {
  return log_grid(xi_grid.lo, xi_grid.hi, xi_grid.n);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (root.is_discarded()) throw ParamError("config: malformed JSON");
  if (!root.is_object()) throw ParamError("config: top level must be an object");
  expect_keys(root, "",
              {"name", "family", "zones", "t_grid", "xi_grid", "tol", "sigma",
               "dim", "m", "data0", "data1", "indicator_radius", "horizon",
               "out_dir", "jobs"});

  ExperimentConfig c;
  c.name = get_str(root, "", "name", c.name);

  if (root.contains("family")) {
    const json& f = root.at("family");
    if (!f.is_object()) field_error("family", "expected an object");
    expect_keys(f, "family",
                {"kind", "alpha", "beta", "gamma", "q", "r", "kappa",
                 "smoothness", "bumps"});
    c.family.kind = get_str(f, "family.", "kind", c.family.kind);
    c.family.alpha = get_num(f, "family.", "alpha", c.family.alpha);
    c.family.beta = get_num(f, "family.", "beta", c.family.beta);
    c.family.gamma = get_num(f, "family.", "gamma", c.family.gamma);
    c.family.q = get_num(f, "family.", "q", c.family.q);
    c.family.r = get_num(f, "family.", "r", c.family.r);
    c.family.kappa = get_num(f, "family.", "kappa", c.family.kappa);
    c.family.smoothness = get_int(f, "family.", "smoothness", c.family.smoothness);
    c.family.bumps = get_int(f, "family.", "bumps", c.family.bumps);
    if (c.family.kind != "polynomial" && c.family.kind != "exponential" &&
        c.family.kind != "super-exponential")
      field_error("family.kind",
                  "must be polynomial, exponential or super-exponential");
    if (c.family.smoothness < 1) field_error("family.smoothness", "must be >= 1");
    if (c.family.bumps < 0) field_error("family.bumps", "must be >= 0");
  }

  if (root.contains("zones")) {
    const json& z = root.at("zones");
    if (!z.is_object()) field_error("zones", "expected an object");
    expect_keys(z, "zones", {"N", "eps", "d0"});
    c.zones.N = get_num(z, "zones.", "N", c.zones.N);
    c.zones.eps = get_num(z, "zones.", "eps", c.zones.eps);
    c.zones.d0 = get_num(z, "zones.", "d0", c.zones.d0);
    if (!(c.zones.N >= 1.0)) field_error("zones.N", "must be >= 1");
    if (!(c.zones.eps > 0.0 && c.zones.eps < 0.5))
      field_error("zones.eps", "must lie in (0, 1/2)");
    if (!(c.zones.d0 > 0.0)) field_error("zones.d0", "must be positive");
  }

  c.t_grid = get_grid(root, "", "t_grid", c.t_grid, 8);
  c.xi_grid = get_grid(root, "", "xi_grid", c.xi_grid, 8);
  if (c.xi_grid.n % 2 == 0)
    field_error("xi_grid.n", "must be odd (radial composite Simpson)");
  c.tol = get_num(root, "", "tol", c.tol);
  if (!(c.tol > 0.0 && c.tol <= 1e-2))
    field_error("tol", "must lie in (0, 1e-2]");
  c.sigma = get_num(root, "", "sigma", c.sigma);
  c.dim = get_int(root, "", "dim", c.dim);
  if (c.dim < 1) field_error("dim", "must be >= 1");
  c.m = get_num(root, "", "m", c.m);
  if (!(c.m >= 1.0 && c.m <= 2.0)) field_error("m", "must lie in [1, 2]");
  c.data0 = get_str(root, "", "data0", c.data0);
  c.data1 = get_str(root, "", "data1", c.data1);
  for (const auto* d : {&c.data0, &c.data1})
    if (*d != "gaussian" && *d != "zero" && *d != "indicator")
      field_error(d == &c.data0 ? "data0" : "data1",
                  "must be gaussian, zero or indicator");
  c.indicator_radius = get_num(root, "", "indicator_radius", c.indicator_radius);
  if (!(c.indicator_radius > 0.0))
    field_error("indicator_radius", "must be positive");
  c.horizon = get_num(root, "", "horizon", c.horizon);
  if (!(c.horizon > 1.0)) field_error("horizon", "must exceed 1");
  c.out_dir = get_str(root, "", "out_dir", c.out_dir);
  c.jobs = get_int(root, "", "jobs", c.jobs);
  if (c.jobs < 1) field_error("jobs", "must be >= 1");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParamError("config: cannot open \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string canonical_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "name=" << c.name << ";family.kind=" << c.family.kind
     << ";family.alpha=" << fmt(c.family.alpha)
     << ";family.beta=" << fmt(c.family.beta)
     << ";family.gamma=" << fmt(c.family.gamma)
     << ";family.q=" << fmt(c.family.q) << ";family.r=" << fmt(c.family.r)
     << ";family.kappa=" << fmt(c.family.kappa)
     << ";family.smoothness=" << c.family.smoothness
     << ";family.bumps=" << c.family.bumps << ";zones.N=" << fmt(c.zones.N)
     << ";zones.eps=" << fmt(c.zones.eps) << ";zones.d0=" << fmt(c.zones.d0)
     << ";t_grid=" << fmt(c.t_grid.lo) << "," << fmt(c.t_grid.hi) << ","
     << c.t_grid.n << ";xi_grid=" << fmt(c.xi_grid.lo) << ","
     << fmt(c.xi_grid.hi) << "," << c.xi_grid.n << ";tol=" << fmt(c.tol)
     << ";sigma=" << fmt(c.sigma) << ";dim=" << c.dim << ";m=" << fmt(c.m)
     << ";data0=" << c.data0 << ";data1=" << c.data1
     << ";indicator_radius=" << fmt(c.indicator_radius)
     << ";horizon=" << fmt(c.horizon);
  // out_dir and jobs affect placement and scheduling, never the numbers;
  // they stay out of the hash so moved outputs remain traceable.
  return os.str();
}

std::uint64_t config_hash(const ExperimentConfig& c) {
  return fnv1a64(canonical_text(c));
}

}  // namespace dwv
