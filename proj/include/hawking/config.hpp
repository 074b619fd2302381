#pragma once

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "hawking/errors.hpp"
#include "hawking/expansion.hpp"
#include "hawking/format.hpp"
#include "hawking/geodesics.hpp"
#include "hawking/manifold.hpp"
#include "hawking/optimizer.hpp"
#include "hawking/surface.hpp"

namespace hawking {

using Json = nlohmann::ordered_json;

struct ManifoldConfig {
  std::string kind = "euclidean";
  double radius = 1.0;          // round_sphere, hyperbolic
  double mass = 1.0;            // schwarzschild
  double horizon_margin = 1.05;  // schwarzschild
  Polynomial3 phi;              // conformal
  std::array<Polynomial3, 6> h;  // polynomial_perturbation, order xx xy xz yy yz zz
  double chart_radius = 0.0;     // conformal, polynomial_perturbation; 0 selects the kind default
  double injectivity = 0.0;
  Vec3 point = Vec3::Zero();
};

struct SurfaceConfig {
  int n_theta = 24;
  int n_phi = 48;
  DiffScheme scheme = DiffScheme::Spectral;
};

struct ExpansionConfig {
  PerturbationMode mode = PerturbationMode::Optimal;
  double rho0 = 0.2;
  int levels = 6;
  double ratio = 0.5;
  double K = 0.0;
  double rho = 0.1;   // single radius for bartnik and optimize
  double rbar = 1.0;  // validity radius for the Bartnik bound
};

struct CheckTolerances {
  Tolerances fit;
  double integrals = 1e-12;
  double curvature = 1e-9;
  double area = 1e-8;
  double optimizer_slack = 1e-8;
  double el_order = 0.9;
  double el_floor = 1e-8;
};

struct RunConfig {
  ManifoldConfig manifold;
  GeodesicConfig geodesics;
  SurfaceConfig surface;
  ExpansionConfig expansion;
  OptimizeConfig optimizer;
  CheckTolerances tolerances;
  std::string output_dir = "out";
};

namespace detail {

inline void reject_unknown(const Json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : j.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read(const Json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("bad value for " + where + "." + key);
  }
}

inline Vec3 read_vec3(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) throw ConfigError(where + " must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw ConfigError(where + " must be an array of 3 numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

inline Polynomial3 read_polynomial(const Json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + " must be an array of terms");
  Polynomial3 p;
  for (const auto& t : j) {
    reject_unknown(t, where + "[]", {"coeff", "powers"});
    Monomial m;
    read(t, "coeff", m.coeff, where);
    if (!t.contains("powers") || !t["powers"].is_array() || t["powers"].size() != 3)
      throw ConfigError(where + " term needs powers [i, j, k]");
    for (int i = 0; i < 3; ++i) {
      const Json& e = t["powers"][i];
      if (!e.is_number_integer() || e.get<int>() < 0) throw ConfigError(where + " powers must be non-negative integers");
      m.powers[i] = e.get<int>();
    }
    p.terms.push_back(m);
  }
  return p;
}

inline Json write_polynomial(const Polynomial3& p) {
  Json a = Json::array();
  for (const auto& m : p.terms) a.push_back(Json{{"coeff", m.coeff}, {"powers", {m.powers[0], m.powers[1], m.powers[2]}}});
  return a;
}

inline constexpr const char* kSlotNames[6] = {"xx", "xy", "xz", "yy", "yz", "zz"};

inline PerturbationMode parse_mode(const std::string& s) {
  if (s == "optimal") return PerturbationMode::Optimal;
  if (s == "unperturbed") return PerturbationMode::Unperturbed;
  if (s == "generalized") return PerturbationMode::Generalized;
  throw ConfigError("unknown expansion mode '" + s + "'");
}

inline DiffScheme parse_scheme(const std::string& s) {
  if (s == "spectral") return DiffScheme::Spectral;
  if (s == "fd4") return DiffScheme::FiniteDifference4;
  throw ConfigError("unknown surface scheme '" + s + "'");
}

}  // namespace detail

inline ManifoldConfig parse_manifold(const Json& j) {
  ManifoldConfig m;
  if (!j.is_object()) throw ConfigError("manifold must be a JSON object");
  detail::read(j, "kind", m.kind, "manifold");
  const std::string& k = m.kind;
  if (k == "euclidean") {
    detail::reject_unknown(j, "manifold", {"kind", "point"});
  } else if (k == "round_sphere" || k == "hyperbolic") {
    detail::reject_unknown(j, "manifold", {"kind", "point", "radius"});
    detail::read(j, "radius", m.radius, "manifold");
  } else if (k == "schwarzschild") {
    detail::reject_unknown(j, "manifold", {"kind", "point", "mass", "horizon_margin"});
    detail::read(j, "mass", m.mass, "manifold");
    detail::read(j, "horizon_margin", m.horizon_margin, "manifold");
  } else if (k == "conformal") {
    detail::reject_unknown(j, "manifold", {"kind", "point", "phi", "chart_radius", "injectivity"});
    if (j.contains("phi")) m.phi = detail::read_polynomial(j["phi"], "manifold.phi");
    detail::read(j, "chart_radius", m.chart_radius, "manifold");
    detail::read(j, "injectivity", m.injectivity, "manifold");
  } else if (k == "polynomial_perturbation") {
    detail::reject_unknown(j, "manifold", {"kind", "point", "h", "chart_radius", "injectivity"});
    if (j.contains("h")) {
      const Json& h = j["h"];
      detail::reject_unknown(h, "manifold.h", {"xx", "xy", "xz", "yy", "yz", "zz"});
      for (int s = 0; s < 6; ++s)
        if (h.contains(detail::kSlotNames[s]))
          m.h[s] = detail::read_polynomial(h[detail::kSlotNames[s]], std::string("manifold.h.") + detail::kSlotNames[s]);
    }
    detail::read(j, "chart_radius", m.chart_radius, "manifold");
    detail::read(j, "injectivity", m.injectivity, "manifold");
  } else {
    throw ConfigError("unknown manifold kind '" + k + "'");
  }
  if (j.contains("point")) m.point = detail::read_vec3(j["point"], "manifold.point");
  return m;
}

inline Json write_manifold(const ManifoldConfig& m) {
  Json j;
  j["kind"] = m.kind;
  if (m.kind == "round_sphere" || m.kind == "hyperbolic") {
    j["radius"] = m.radius;
  } else if (m.kind == "schwarzschild") {
    j["mass"] = m.mass;
    j["horizon_margin"] = m.horizon_margin;
  } else if (m.kind == "conformal") {
    j["phi"] = detail::write_polynomial(m.phi);
    j["chart_radius"] = m.chart_radius;
    j["injectivity"] = m.injectivity;
  } else if (m.kind == "polynomial_perturbation") {
    Json h;
    for (int s = 0; s < 6; ++s) h[detail::kSlotNames[s]] = detail::write_polynomial(m.h[s]);
    j["h"] = h;
    j["chart_radius"] = m.chart_radius;
    j["injectivity"] = m.injectivity;
  }
  j["point"] = {m.point[0], m.point[1], m.point[2]};
  return j;
}

inline MetricField make_metric(const ManifoldConfig& m) {
  auto positive = [](double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string("manifold.") + what + " must be positive");
  };
  if (m.kind == "euclidean") return metrics::Euclidean{};
  if (m.kind == "round_sphere") {
    positive(m.radius, "radius");
    return metrics::RoundSphere(m.radius);
  }
  if (m.kind == "hyperbolic") {
    positive(m.radius, "radius");
    return metrics::Hyperbolic(m.radius);
  }
  if (m.kind == "schwarzschild") {
    positive(m.mass, "mass");
    if (!(m.horizon_margin > 1.0)) throw ConfigError("manifold.horizon_margin must exceed 1");
    metrics::Schwarzschild s;
    s.mass = m.mass;
    s.horizon_margin = m.horizon_margin;
    return s;
  }
  if (m.kind == "conformal") {
    metrics::Conformal c;
    c.phi = m.phi;
    if (m.chart_radius > 0.0) c.chart_radius = m.chart_radius;
    if (m.injectivity > 0.0) c.injectivity = m.injectivity;
    return c;
  }
  if (m.kind == "polynomial_perturbation") {
    metrics::PolynomialPerturbation p;
    for (int s = 0; s < 6; ++s)
      if (m.h[s].degree() > 4) throw ConfigError("polynomial_perturbation entries must have degree <= 4");
    p.h = m.h;
    if (m.chart_radius > 0.0) p.chart_radius = m.chart_radius;
    if (m.injectivity > 0.0) p.injectivity = m.injectivity;
    return p;
  }
  throw ConfigError("unknown manifold kind '" + m.kind + "'");
}

inline RunConfig parse_config(const Json& j) {
  RunConfig c;
  detail::reject_unknown(j, "config",
                         {"manifold", "geodesics", "surface", "expansion", "optimizer", "tolerances", "output"});
  if (j.contains("manifold")) c.manifold = parse_manifold(j["manifold"]);

  if (j.contains("geodesics")) {
    const Json& g = j["geodesics"];
    detail::reject_unknown(g, "geodesics", {"rel_tol", "abs_tol", "max_steps", "uniform_steps", "min_uniform_steps"});
    detail::read(g, "rel_tol", c.geodesics.rel_tol, "geodesics");
    detail::read(g, "abs_tol", c.geodesics.abs_tol, "geodesics");
    detail::read(g, "max_steps", c.geodesics.max_steps, "geodesics");
    detail::read(g, "uniform_steps", c.geodesics.uniform_steps, "geodesics");
    detail::read(g, "min_uniform_steps", c.geodesics.min_uniform_steps, "geodesics");
  }
  if (j.contains("surface")) {
    const Json& s = j["surface"];
    detail::reject_unknown(s, "surface", {"n_theta", "n_phi", "scheme"});
    detail::read(s, "n_theta", c.surface.n_theta, "surface");
    detail::read(s, "n_phi", c.surface.n_phi, "surface");
    std::string scheme = to_string(c.surface.scheme);
    detail::read(s, "scheme", scheme, "surface");
    c.surface.scheme = detail::parse_scheme(scheme);
  }
  if (j.contains("expansion")) {
    const Json& e = j["expansion"];
    detail::reject_unknown(e, "expansion", {"mode", "rho0", "levels", "ratio", "K", "rho", "rbar"});
    std::string mode = to_string(c.expansion.mode);
    detail::read(e, "mode", mode, "expansion");
    c.expansion.mode = detail::parse_mode(mode);
    detail::read(e, "rho0", c.expansion.rho0, "expansion");
    detail::read(e, "levels", c.expansion.levels, "expansion");
    detail::read(e, "ratio", c.expansion.ratio, "expansion");
    detail::read(e, "K", c.expansion.K, "expansion");
    detail::read(e, "rho", c.expansion.rho, "expansion");
    detail::read(e, "rbar", c.expansion.rbar, "expansion");
  }
  if (j.contains("optimizer")) {
    const Json& o = j["optimizer"];
    detail::reject_unknown(o, "optimizer",
                           {"max_degree", "max_iters", "initial_step", "shrink", "armijo", "gradient_step",
                            "gradient_tol", "area_tol", "seed"});
    detail::read(o, "max_degree", c.optimizer.max_degree, "optimizer");
    detail::read(o, "max_iters", c.optimizer.max_iters, "optimizer");
    detail::read(o, "initial_step", c.optimizer.initial_step, "optimizer");
    detail::read(o, "shrink", c.optimizer.shrink, "optimizer");
    detail::read(o, "armijo", c.optimizer.armijo, "optimizer");
    detail::read(o, "gradient_step", c.optimizer.gradient_step, "optimizer");
    detail::read(o, "gradient_tol", c.optimizer.gradient_tol, "optimizer");
    detail::read(o, "area_tol", c.optimizer.area_tol, "optimizer");
    detail::read(o, "seed", c.optimizer.seed, "optimizer");
  }
  if (j.contains("tolerances")) {
    const Json& t = j["tolerances"];
    detail::reject_unknown(t, "tolerances",
                           {"c3_abs", "c3_rel", "c5_abs", "c5_rel", "integrals", "curvature", "area",
                            "optimizer_slack", "el_order", "el_floor"});
    detail::read(t, "c3_abs", c.tolerances.fit.c3_abs, "tolerances");
    detail::read(t, "c3_rel", c.tolerances.fit.c3_rel, "tolerances");
    detail::read(t, "c5_abs", c.tolerances.fit.c5_abs, "tolerances");
    detail::read(t, "c5_rel", c.tolerances.fit.c5_rel, "tolerances");
    detail::read(t, "integrals", c.tolerances.integrals, "tolerances");
    detail::read(t, "curvature", c.tolerances.curvature, "tolerances");
    detail::read(t, "area", c.tolerances.area, "tolerances");
    detail::read(t, "optimizer_slack", c.tolerances.optimizer_slack, "tolerances");
    detail::read(t, "el_order", c.tolerances.el_order, "tolerances");
    detail::read(t, "el_floor", c.tolerances.el_floor, "tolerances");
  }
  if (j.contains("output")) {
    const Json& o = j["output"];
    detail::reject_unknown(o, "output", {"dir"});
    detail::read(o, "dir", c.output_dir, "output");
  }
  if (c.expansion.levels < 1 || !(c.expansion.rho0 > 0) || !(c.expansion.ratio > 0 && c.expansion.ratio < 1))
    throw ConfigError("expansion needs levels >= 1, rho0 > 0 and ratio in (0, 1)");
  if (c.geodesics.max_steps < 1 || !(c.geodesics.rel_tol > 0) || !(c.geodesics.abs_tol > 0))
    throw ConfigError("geodesics tolerances and max_steps must be positive");
  return c;
}

inline Json serialize_config(const RunConfig& c) {
  Json j;
  j["manifold"] = write_manifold(c.manifold);
  j["geodesics"] = {{"rel_tol", c.geodesics.rel_tol},
                    {"abs_tol", c.geodesics.abs_tol},
                    {"max_steps", c.geodesics.max_steps},
                    {"uniform_steps", c.geodesics.uniform_steps},
                    {"min_uniform_steps", c.geodesics.min_uniform_steps}};
  j["surface"] = {{"n_theta", c.surface.n_theta}, {"n_phi", c.surface.n_phi}, {"scheme", to_string(c.surface.scheme)}};
  j["expansion"] = {{"mode", to_string(c.expansion.mode)},
                    {"rho0", c.expansion.rho0},
                    {"levels", c.expansion.levels},
                    {"ratio", c.expansion.ratio},
                    {"K", c.expansion.K},
                    {"rho", c.expansion.rho},
                    {"rbar", c.expansion.rbar}};
  j["optimizer"] = {{"max_degree", c.optimizer.max_degree},
                    {"max_iters", c.optimizer.max_iters},
                    {"initial_step", c.optimizer.initial_step},
                    {"shrink", c.optimizer.shrink},
                    {"armijo", c.optimizer.armijo},
                    {"gradient_step", c.optimizer.gradient_step},
                    {"gradient_tol", c.optimizer.gradient_tol},
                    {"area_tol", c.optimizer.area_tol},
                    {"seed", c.optimizer.seed}};
  j["tolerances"] = {{"c3_abs", c.tolerances.fit.c3_abs},
                     {"c3_rel", c.tolerances.fit.c3_rel},
                     {"c5_abs", c.tolerances.fit.c5_abs},
                     {"c5_rel", c.tolerances.fit.c5_rel},
                     {"integrals", c.tolerances.integrals},
                     {"curvature", c.tolerances.curvature},
                     {"area", c.tolerances.area},
                     {"optimizer_slack", c.tolerances.optimizer_slack},
                     {"el_order", c.tolerances.el_order},
                     {"el_floor", c.tolerances.el_floor}};
  j["output"] = {{"dir", c.output_dir}};
  return j;
}

// Pretty JSON with every floating point value written as %.17g.
inline void write_json(std::ostream& os, const Json& j, int indent = 0) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) os << ",\n";
        first = false;
        os << inner << Json(key).dump() << ": ";
        write_json(os, value, indent + 2);
      }
      os << '\n' << pad << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) os << ",\n";
        os << inner;
        write_json(os, j[i], indent + 2);
      }
      os << '\n' << pad << ']';
      return;
    }
    case Json::value_t::number_float: {
      const double x = j.get<double>();
      if (std::isfinite(x))
        os << num(x);
      else
        os << "null";
      return;
    }
    default:
      os << j.dump();
  }
}

inline std::string to_text(const Json& j) {
  std::ostringstream os;
  write_json(os, j);
  os << '\n';
  return os.str();
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

}  // namespace hawking
