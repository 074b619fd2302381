#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hawking/config.hpp"
#include "hawking/expansion.hpp"
#include "hawking/harmonics.hpp"
#include "hawking/optimizer.hpp"
#include "hawking/sphere_grid.hpp"
#include "hawking/surface.hpp"

namespace hawking {

inline constexpr const char* kToolName = "hawking-lab";
inline constexpr const char* kToolVersion = "1.0.0";

enum ExitCode : int { kExitOk = 0, kExitCheckFailed = 1, kExitConfig = 2, kExitNumerical = 3 };

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CommandOutput {
  std::string command;
  Json results;
  std::vector<Check> checks;
  std::map<std::string, std::string> files;  // extra CSV outputs, by file name

  void check(std::string name, double value, double tolerance, bool pass) {
    checks.push_back({std::move(name), value, tolerance, pass});
  }
  bool pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

namespace detail {

inline Json mat_json(const Mat3& m) {
  Json a = Json::array();
  for (int i = 0; i < 3; ++i) a.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return a;
}

inline Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

inline double rel_err(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

inline LadderConfig ladder_config(const RunConfig& c) {
  LadderConfig l;
  l.rho0 = c.expansion.rho0;
  l.levels = c.expansion.levels;
  l.ratio = c.expansion.ratio;
  return l;
}

}  // namespace detail

inline Json curvature_json(const CurvaturePacket& cp) {
  return Json{{"point", detail::vec_json(cp.point)},
              {"metric", detail::mat_json(cp.metric)},
              {"frame", detail::mat_json(cp.frame)},
              {"ricci", detail::mat_json(cp.ricci)},
              {"scalar", cp.scalar},
              {"traceless", detail::mat_json(cp.traceless)},
              {"traceless_norm_sq", cp.traceless_norm2},
              {"scalar_gradient", detail::vec_json(cp.grad_scalar)},
              {"scalar_laplacian", cp.laplacian_scalar}};
}

// Quadrature identities for the coordinate functions of the unit sphere.
inline CommandOutput cmd_integrals_check(const RunConfig& cfg) {
  CommandOutput out;
  out.command = "integrals-check";
  const SphereGrid grid = build_grid(cfg.surface.n_theta, cfg.surface.n_phi);
  const double tol = cfg.tolerances.integrals;
  const double four_pi = 4.0 * std::numbers::pi;
  auto moment = [&](auto&& f) {
    std::vector<double> v(grid.size());
    for (int n = 0; n < grid.size(); ++n) v[n] = f(grid.directions[n]);
    return integrate(grid, v);
  };
  double worst = 0.0;
  auto relative = [&](const std::string& name, double value, double ref) {
    const double e = detail::rel_err(value, ref);
    worst = std::max(worst, e);
    out.check(name, e, tol, e <= tol);
  };
  auto absolute = [&](const std::string& name, double value) {
    const double e = std::abs(value) / four_pi;
    worst = std::max(worst, e);
    out.check(name, e, tol, e <= tol);
  };
  const char* axis = "xyz";
  relative("area", moment([](const Vec3&) { return 1.0; }), four_pi);
  for (int a = 0; a < 3; ++a) {
    const std::string s(1, axis[a]);
    absolute("first_moment_" + s, moment([a](const Vec3& x) { return x[a]; }));
    relative("second_moment_" + s, moment([a](const Vec3& x) { return x[a] * x[a]; }), four_pi / 3.0);
    relative("fourth_moment_" + s, moment([a](const Vec3& x) { return std::pow(x[a], 4); }), four_pi / 5.0);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b) {
      const std::string s = std::string(1, axis[a]) + axis[b];
      relative("mixed_moment_" + s, moment([a, b](const Vec3& x) { return x[a] * x[a] * x[b] * x[b]; }),
               four_pi / 15.0);
      absolute("cross_moment_" + s, moment([a, b](const Vec3& x) { return x[a] * x[b]; }));
    }
  out.results = {{"n_theta", grid.n_theta}, {"n_phi", grid.n_phi}, {"max_error", worst}};
  return out;
}

inline CommandOutput cmd_curvature(const RunConfig& cfg) {
  CommandOutput out;
  out.command = "curvature";
  const MetricField metric = make_metric(cfg.manifold);
  const Vec3 p = cfg.manifold.point;
  metric.check_domain(p);
  const CurvaturePacket cp = curvature_packet(metric, p);
  out.results = curvature_json(cp);
  out.results["kind"] = metric.kind_name();
  const double tol = cfg.tolerances.curvature;

  const double sc_scale = std::max(1.0, std::abs(cp.scalar));
  const double trace_err = std::abs(cp.ricci.trace() - cp.scalar) / sc_scale;
  out.check("ricci_trace", trace_err, tol, trace_err <= tol);
  const double s_trace = std::abs(cp.traceless.trace()) / sc_scale;
  out.check("traceless_trace", s_trace, tol, s_trace <= tol);
  const double ric2 = cp.ricci.squaredNorm();
  const double norm_err = std::abs(cp.traceless_norm2 - (ric2 - cp.scalar * cp.scalar / 3.0)) / std::max(1.0, ric2);
  out.check("traceless_norm_identity", norm_err, tol, norm_err <= tol);
  const Eigen::LLT<Mat3> llt(cp.metric);
  const bool spd = llt.info() == Eigen::Success;
  out.check("metric_positive_definite", spd ? 0.0 : 1.0, 0.0, spd);
  const double ortho = (cp.frame.transpose() * cp.metric * cp.frame - Mat3::Identity()).cwiseAbs().maxCoeff();
  out.check("frame_orthonormal", ortho, tol, ortho <= tol);
  if (metric.is_builtin()) {
    const double K = metric.model_curvature();
    double worst = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c)
          for (int d = 0; d < 3; ++d) {
            if (metric.kind_name() == "schwarzschild") continue;
            const double model = K * ((a == c) * (b == d) - (a == d) * (b == c));
            worst = std::max(worst, std::abs(cp.riemann[a][b][c][d] - model));
          }
    if (metric.kind_name() != "schwarzschild") out.check("constant_curvature", worst, 1e-7, worst <= 1e-7);
  }
  return out;
}

inline CommandOutput cmd_expansion(const RunConfig& cfg) {
  CommandOutput out;
  out.command = "expansion";
  const MetricField metric = make_metric(cfg.manifold);
  const Vec3 p = cfg.manifold.point;
  metric.check_domain(p);
  const SphereGrid grid = build_grid(cfg.surface.n_theta, cfg.surface.n_phi);
  const SurfaceEvaluator ev(grid, cfg.surface.scheme, cfg.geodesics);
  const PerturbationMode mode = cfg.expansion.mode;
  const double K = cfg.expansion.K;
  const Ladder lad = radius_ladder(ev, metric, p, mode, detail::ladder_config(cfg), K);
  const ExpansionFit fit = fit_coefficients(lad.radii(), lad.masses());
  const CurvaturePacket cp = curvature_packet(metric, p);
  const PredictedCoefficients pred = predicted_coefficients(cp, mode, K);
  const ComparisonRecord cmp = compare_report(fit, pred, cfg.tolerances.fit);

  std::ostringstream csv;
  csv << "rho,area,willmore,hawking,predicted_leading\n";
  for (const auto& s : lad.samples)
    csv << num(s.rho) << ',' << num(s.area) << ',' << num(s.willmore) << ',' << num(s.hawking) << ','
        << num(s.predicted) << '\n';
  out.files["expansion.csv"] = csv.str();

  const auto e = ev.evaluate(metric, p, lad.samples.front().rho,
                             mode_profile(ev, cp, mode, lad.samples.front().rho), lad.K);
  std::ostringstream surf;
  export_surface_csv(surf, e.surface, e.geometry);
  out.files["expansion_surface.csv"] = surf.str();
  std::ostringstream coeffs;
  export_coefficients_csv(coeffs, optimal_perturbation(cp).wbar);
  out.files["expansion_wbar.csv"] = coeffs.str();

  Json samples = Json::array();
  for (const auto& s : lad.samples)
    samples.push_back({{"rho", s.rho}, {"area", s.area}, {"willmore", s.willmore}, {"hawking", s.hawking}});
  out.results = {{"mode", to_string(mode)},
                 {"K", lad.K},
                 {"samples", samples},
                 {"fit", {{"c3", fit.c3}, {"c5", fit.c5}, {"c6", fit.c6}, {"condition", fit.condition},
                          {"rms_residual", fit.rms_residual}}},
                 {"predicted", {{"c3", pred.c3}, {"c5", pred.c5}, {"willmore_c2", pred.willmore_c2},
                                {"willmore_c4", pred.willmore_c4}}},
                 {"comparison", {{"delta_c3", cmp.delta_c3}, {"rel_c3", cmp.rel_c3}, {"delta_c5", cmp.delta_c5},
                                 {"rel_c5", cmp.rel_c5}}}};
  const Tolerances& t = cfg.tolerances.fit;
  out.check("c3", std::abs(cmp.delta_c3), std::max(t.c3_abs, t.c3_rel * std::abs(pred.c3)), cmp.pass_c3);
  out.check("c5", std::abs(cmp.delta_c5), std::max(t.c5_abs, t.c5_rel * std::abs(pred.c5)), cmp.pass_c5);
  out.check("fit_condition", fit.condition, 1e8, fit.condition <= 1e8);
  return out;
}

inline CommandOutput cmd_optimize(const RunConfig& cfg) {
  CommandOutput out;
  out.command = "optimize";
  const MetricField metric = make_metric(cfg.manifold);
  const Vec3 p = cfg.manifold.point;
  metric.check_domain(p);
  const SphereGrid grid = build_grid(cfg.surface.n_theta, cfg.surface.n_phi);
  const SurfaceEvaluator ev(grid, cfg.surface.scheme, cfg.geodesics);
  const double rho = cfg.expansion.rho;
  const CurvaturePacket cp = curvature_packet(metric, p);
  const OptimalPerturbation op = optimal_perturbation(cp);
  const HawkingReport closed = ev.mass(metric, p, rho, op.values(ev.transform(), rho));
  const OptimizeResult res = maximize_hawking(ev, metric, p, closed.area, cfg.optimizer);

  std::ostringstream trace;
  trace << "iteration,hawking,rho,gradient_norm,step\n";
  for (const auto& r : res.trace)
    trace << r.iteration << ',' << num(r.hawking) << ',' << num(r.rho) << ',' << num(r.gradient_norm) << ','
          << num(r.step) << '\n';
  out.files["optimize_trace.csv"] = trace.str();
  std::ostringstream coeffs;
  export_coefficients_csv(coeffs, res.w_star);
  out.files["optimize_coefficients.csv"] = coeffs.str();

  Json l2 = Json::array();
  for (int m = -2; m <= 2; ++m)
    l2.push_back({{"m", m}, {"optimized", res.w_star.coeff(2, m)}, {"closed_form", rho * rho * op.wbar.coeff(2, m)}});
  out.results = {{"label", "restricted sup-Hawking estimate"},
                 {"target_area", res.target_area},
                 {"area", res.area},
                 {"rho_star", res.rho_star},
                 {"m_H_star", res.m_H_star},
                 {"m_H_initial", res.m_H_initial},
                 {"m_H_closed_form", closed.hawking_mass},
                 {"iterations", res.iterations},
                 {"gradient_norm", res.gradient_norm},
                 {"converged", res.converged},
                 {"lambda", res.lambda},
                 {"lambda_closed_form", op.lambda},
                 {"el_residual_norm", res.el_residual_norm},
                 {"l2_coefficients", l2}};

  const double drift = std::abs(res.area / res.target_area - 1.0);
  out.check("area_constraint", drift, cfg.tolerances.area, drift <= cfg.tolerances.area);
  double kernel = 0.0;
  for (int l = 0; l < 2 && l <= res.w_star.max_degree; ++l)
    for (int m = -l; m <= l; ++m) kernel = std::max(kernel, std::abs(res.w_star.coeff(l, m)));
  out.check("kernel_free", kernel, 0.0, kernel == 0.0);
  bool ascent = true;
  for (size_t i = 1; i < res.trace.size(); ++i) ascent = ascent && res.trace[i].hawking >= res.trace[i - 1].hawking;
  out.check("ascent", ascent ? 0.0 : 1.0, 0.0, ascent);
  const double gap = closed.hawking_mass - res.m_H_star;
  out.check("beats_closed_form", gap, cfg.tolerances.optimizer_slack, gap <= cfg.tolerances.optimizer_slack);
  out.check("converged", res.gradient_norm, cfg.optimizer.gradient_tol, res.converged);
  return out;
}

inline CommandOutput cmd_bartnik(const RunConfig& cfg) {
  CommandOutput out;
  out.command = "bartnik";
  const MetricField metric = make_metric(cfg.manifold);
  const Vec3 p = cfg.manifold.point;
  metric.check_domain(p);
  const CurvaturePacket cp = curvature_packet(metric, p);
  const BartnikBound b = bartnik_lower_bound(cp, cfg.expansion.rho, cfg.expansion.rbar);
  out.results = {{"point", detail::vec_json(b.point)},
                 {"rho", b.rho},
                 {"validity_radius", b.validity_radius},
                 {"leading", b.leading},
                 {"next", b.next},
                 {"bound", b.value},
                 {"remainder", b.remainder},
                 {"curvature", curvature_json(cp)}};
  out.check("scalar_nonnegative", cp.scalar, 0.0, b.scalar_nonnegative);
  return out;
}

// Area-constrained Euler-Lagrange residual of the closed-form perturbation
// along the radius ladder, scaled by rho^3 to compare with H^3.
inline CommandOutput cmd_el_residual(const RunConfig& cfg) {
  CommandOutput out;
  out.command = "el-residual";
  const MetricField metric = make_metric(cfg.manifold);
  const Vec3 p = cfg.manifold.point;
  metric.check_domain(p);
  const SphereGrid grid = build_grid(cfg.surface.n_theta, cfg.surface.n_phi);
  const SurfaceEvaluator ev(grid, cfg.surface.scheme, cfg.geodesics);
  const CurvaturePacket cp = curvature_packet(metric, p);
  const OptimalPerturbation op = optimal_perturbation(cp);
  const LadderConfig lc = detail::ladder_config(cfg);
  if (lc.levels < 3) throw ConfigError("el-residual needs at least 3 ladder levels");
  if (lc.rho0 >= metric.injectivity_bound(p)) throw RadiusOutOfRange("ladder start radius beyond injectivity bound");

  std::ostringstream csv;
  csv << "rho,residual_sup,relative_residual,lambda_fit\n";
  std::vector<double> radii, rel;
  Json rows = Json::array();
  double worst = 0.0;
  for (double rho : ladder_radii(lc)) {
    const std::vector<double> w = mode_profile(ev, cp, cfg.expansion.mode, rho);
    const auto e = ev.evaluate(metric, p, rho, w);
    const double sup = sup_norm(willmore_el_residual(ev.differentiator(), metric, e.surface, op.lambda));
    const double r = sup * rho * rho * rho;
    const double lam = lagrange_multiplier_estimate(ev, metric, p, rho, w);
    radii.push_back(rho);
    rel.push_back(r);
    worst = std::max(worst, r);
    csv << num(rho) << ',' << num(sup) << ',' << num(r) << ',' << num(lam) << '\n';
    rows.push_back({{"rho", rho}, {"residual_sup", sup}, {"relative_residual", r}, {"lambda_fit", lam}});
  }
  out.files["el_residual.csv"] = csv.str();
  bool positive = true;
  for (double r : rel) positive = positive && r > 0.0;
  const SlopeFit sf = positive ? loglog_slope(radii, rel) : SlopeFit{};
  out.results = {{"lambda", op.lambda}, {"ladder", rows}, {"order", sf.slope}, {"r_squared", sf.r_squared},
                 {"max_relative_residual", worst}};
  const bool at_floor = worst <= cfg.tolerances.el_floor;
  const bool decays = sf.slope >= cfg.tolerances.el_order && sf.r_squared >= 0.99;
  out.check("el_residual_order", at_floor ? std::numeric_limits<double>::infinity() : sf.slope,
            cfg.tolerances.el_order, at_floor || decays);
  return out;
}

inline const std::map<std::string, std::function<CommandOutput(const RunConfig&)>>& command_table() {
  static const std::map<std::string, std::function<CommandOutput(const RunConfig&)>> table = {
      {"integrals-check", cmd_integrals_check}, {"curvature", cmd_curvature}, {"expansion", cmd_expansion},
      {"optimize", cmd_optimize},               {"bartnik", cmd_bartnik},     {"el-residual", cmd_el_residual}};
  return table;
}

inline Json report_json(const CommandOutput& out, const RunConfig& cfg) {
  Json checks = Json::array();
  for (const auto& c : out.checks)
    checks.push_back({{"name", c.name}, {"value", c.value}, {"tolerance", c.tolerance}, {"pass", c.pass}});
  return Json{{"tool", kToolName},
              {"version", kToolVersion},
              {"command", out.command},
              {"config", serialize_config(cfg)},
              {"results", out.results},
              {"checks", checks},
              {"status", out.pass() ? "pass" : "fail"}};
}

// Runs one command, writes <command>.json and any CSV files into out_dir,
// prints the report to `os` and failing check names to `err`.
inline int run_command(const std::string& command, const RunConfig& cfg, const std::string& out_dir,
                       std::ostream& os, std::ostream& err) {
  const auto& table = command_table();
  const auto it = table.find(command);
  if (it == table.end()) {
    err << "error: unknown command '" << command << "'\n";
    return kExitConfig;
  }
  CommandOutput out;
  try {
    out = it->second(cfg);
  } catch (const ConfigError& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.code() << ": " << e.what() << '\n';
    return kExitNumerical;
  }
  const std::string text = to_text(report_json(out, cfg));
  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    std::ofstream(std::filesystem::path(out_dir) / (command + ".json"), std::ios::binary) << text;
    for (const auto& [name, content] : out.files)
      std::ofstream(std::filesystem::path(out_dir) / name, std::ios::binary) << content;
  }
  os << text;
  for (const auto& c : out.checks)
    if (!c.pass) err << "FAILED " << c.name << " value=" << num(c.value) << " tolerance=" << num(c.tolerance) << '\n';
  return out.pass() ? kExitOk : kExitCheckFailed;
}

}  // namespace hawking
