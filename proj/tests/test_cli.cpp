#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hawking/cli.hpp"

using namespace hawking;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

RunConfig config_from(const std::string& text) { return parse_config(Json::parse(text)); }

struct Invocation {
  int code = 0;
  std::string out, err;
};

Invocation run(const std::string& command, const RunConfig& cfg, const std::string& dir = "") {
  std::ostringstream os, es;
  Invocation r;
  r.code = run_command(command, cfg, dir, os, es);
  r.out = os.str();
  r.err = es.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hawking_cli_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, DefaultsRoundTrip) {
  const RunConfig c;
  const std::string a = to_text(serialize_config(c));
  const std::string b = to_text(serialize_config(parse_config(serialize_config(c))));
  EXPECT_EQ(a, b);
}

TEST(Config, SampleConfigsRoundTrip) {
  for (const auto& entry : fs::directory_iterator(HAWKING_CONFIG_DIR)) {
    const RunConfig c = load_config(entry.path().string());
    const Json j = serialize_config(c);
    EXPECT_EQ(to_text(j), to_text(serialize_config(parse_config(j)))) << entry.path();
    EXPECT_EQ(j, serialize_config(parse_config(j))) << entry.path();
  }
}

TEST(Config, PolynomialRoundTrip) {
  const RunConfig c = config_from(R"({"manifold": {"kind": "polynomial_perturbation",
      "h": {"xx": [{"coeff": 0.1, "powers": [0, 2, 0]}], "yz": [{"coeff": -0.02, "powers": [1, 0, 3]}]},
      "point": [0.1, 0.2, 0.3]}})");
  EXPECT_EQ(c.manifold.h[4].terms.size(), 1u);
  EXPECT_EQ(serialize_config(c), serialize_config(parse_config(serialize_config(c))));
  EXPECT_EQ(make_metric(c.manifold).kind_name(), "polynomial_perturbation");
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(config_from(R"({"surfaces": {}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"surface": {"n_thetas": 8}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"manifold": {"kind": "euclidean", "mass": 1}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"manifold": {"kind": "schwarzschild", "radius": 1}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"optimizer": {"seed": 1, "learning_rate": 2}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"manifold": {"kind": "conformal", "phi": [{"coeff": 1, "power": [1, 0, 0]}]}})"),
               ConfigError);
}

TEST(Config, BadValuesRejected) {
  EXPECT_THROW(config_from(R"({"manifold": {"kind": "torus"}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"expansion": {"mode": "best"}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"surface": {"scheme": "fd2"}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"surface": {"n_theta": "many"}})"), ConfigError);
  EXPECT_THROW(config_from(R"({"manifold": {"kind": "euclidean", "point": [1, 2]}})"), ConfigError);
  EXPECT_THROW(make_metric(config_from(R"({"manifold": {"kind": "schwarzschild", "mass": -1}})").manifold),
               ConfigError);
  EXPECT_THROW(make_metric(config_from(R"({"manifold": {"kind": "polynomial_perturbation",
      "h": {"xx": [{"coeff": 1, "powers": [5, 0, 0]}]}}})").manifold),
               ConfigError);
}

TEST(Report, FloatsUseSeventeenDigits) {
  Json j = {{"a", 0.1}, {"b", 3}, {"c", "x"}, {"d", Json::array({1.0 / 3.0})}};
  EXPECT_EQ(to_text(j), "{\n  \"a\": 0.10000000000000001,\n  \"b\": 3,\n  \"c\": \"x\",\n  \"d\": [\n    "
                        "0.33333333333333331\n  ]\n}\n");
}

TEST(Commands, IntegralsCheck) {
  RunConfig c;
  c.surface.n_theta = 32;
  c.surface.n_phi = 64;
  const Invocation r = run("integrals-check", c);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"max_error\""), std::string::npos);
  c.surface.n_theta = 4;
  const Invocation coarse = run("integrals-check", c);
  EXPECT_EQ(coarse.code, kExitNumerical);
  EXPECT_NE(coarse.err.find("GridTooCoarse"), std::string::npos);
}

TEST(Commands, Curvature) {
  RunConfig c;
  Invocation r = run("curvature", c);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"scalar\": 0,"), std::string::npos);
  c = config_from(R"({"manifold": {"kind": "round_sphere", "point": [0, 0, 0]}})");
  r = run("curvature", c);
  EXPECT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("\"scalar\": 6,"), std::string::npos);
  c = config_from(R"({"manifold": {"kind": "schwarzschild", "point": [4, 0, 0]}})");
  const CommandOutput out = cmd_curvature(c);
  EXPECT_NEAR(out.results["traceless_norm_sq"].get<double>(), 6.0 / 4096, 1e-15);
  EXPECT_NEAR(out.results["scalar"].get<double>(), 0.0, 1e-14);
  c = config_from(R"({"manifold": {"kind": "schwarzschild", "point": [1, 0, 0]}})");
  EXPECT_EQ(run("curvature", c).code, kExitNumerical);
}

TEST(Commands, ExpansionFlatPasses) {
  RunConfig c = config_from(R"({"surface": {"n_theta": 12, "n_phi": 24}, "expansion": {"rho0": 0.4}})");
  const CommandOutput out = cmd_expansion(c);
  EXPECT_TRUE(out.pass());
  EXPECT_NEAR(out.results["fit"]["c3"].get<double>(), 0.0, 1e-9);
  EXPECT_NEAR(out.results["fit"]["c5"].get<double>(), 0.0, 1e-9);
  const std::string& csv = out.files.at("expansion.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "rho,area,willmore,hawking,predicted_leading");
}

TEST(Commands, ExpansionFitFailureExitsOne) {
  // A c3 tolerance of zero cannot be met by a numerical fit on S^3.
  RunConfig c = config_from(R"({"manifold": {"kind": "round_sphere"}, "surface": {"n_theta": 12, "n_phi": 24},
      "tolerances": {"c3_abs": 0, "c3_rel": 0}})");
  const Invocation r = run("expansion", c);
  EXPECT_EQ(r.code, kExitCheckFailed);
  EXPECT_NE(r.err.find("FAILED c3"), std::string::npos);
}

TEST(Commands, Bartnik) {
  RunConfig c = config_from(R"({"manifold": {"kind": "schwarzschild", "point": [4, 0, 0]},
      "expansion": {"rho": 0.1, "rbar": 1}})");
  const CommandOutput out = cmd_bartnik(c);
  EXPECT_GT(out.results["bound"].get<double>(), 0.0);
  c.expansion.rho = 0.6;
  const Invocation r = run("bartnik", c);
  EXPECT_EQ(r.code, kExitNumerical);
  EXPECT_NE(r.err.find("RadiusOutOfRange"), std::string::npos);
}

TEST(Commands, OptimizeAndElResidualOnFlat) {
  RunConfig c = config_from(R"({"surface": {"n_theta": 12, "n_phi": 24}, "expansion": {"rho": 0.3, "rho0": 0.4}})");
  const CommandOutput o = cmd_optimize(c);
  EXPECT_TRUE(o.pass());
  EXPECT_LE(o.results["m_H_star"].get<double>(), 1e-9);
  const CommandOutput e = cmd_el_residual(c);
  EXPECT_TRUE(e.pass());
}

TEST(Commands, UnknownCommand) { EXPECT_EQ(run("plot", RunConfig{}).code, kExitConfig); }

TEST(Commands, OutputsAreByteIdentical) {
  RunConfig c = config_from(R"({"manifold": {"kind": "schwarzschild", "point": [4, 0, 0]},
      "surface": {"n_theta": 12, "n_phi": 24}, "expansion": {"rho0": 0.4, "levels": 5}})");
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  for (const char* cmd : {"curvature", "expansion", "el-residual"}) {
    EXPECT_EQ(run(cmd, c, a.string()).code, kExitOk) << cmd;
    EXPECT_EQ(run(cmd, c, b.string()).code, kExitOk) << cmd;
  }
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    EXPECT_EQ(slurp(entry.path()), slurp(b / entry.path().filename())) << entry.path();
    ++files;
  }
  EXPECT_EQ(files, 7);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Executable, ExitCodes) {
  const fs::path dir = scratch("exe");
  fs::create_directories(dir);
  const std::string exe = HAWKING_LAB_EXE;
  auto sh = [&](const std::string& args) {
    const std::string cmd = exe + " " + args + " > " + (dir / "stdout").string() + " 2> " + (dir / "stderr").string();
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };
  EXPECT_EQ(sh("integrals-check --config " + std::string(HAWKING_CONFIG_DIR) + "/integrals.json --out " +
               (dir / "ok").string()),
            0);
  EXPECT_TRUE(fs::exists(dir / "ok" / "integrals-check.json"));
  const std::string report = slurp(dir / "ok" / "integrals-check.json");
  EXPECT_NE(report.find("\"version\": \"1.0.0\""), std::string::npos);
  EXPECT_NE(report.find("\"config\""), std::string::npos);
  EXPECT_NE(report.find("\"checks\""), std::string::npos);

  std::ofstream(dir / "strict.json") << R"({"surface": {"n_theta": 32, "n_phi": 64}, "tolerances": {"integrals": 1e-30}})";
  EXPECT_EQ(sh("integrals-check --config " + (dir / "strict.json").string() + " --out " + (dir / "s").string()), 1);
  EXPECT_NE(slurp(dir / "stderr").find("FAILED "), std::string::npos);

  std::ofstream(dir / "bad.json") << R"({"surface": {"n_theta": 32, "colour": 1}})";
  EXPECT_EQ(sh("curvature --config " + (dir / "bad.json").string()), 2);
  EXPECT_NE(slurp(dir / "stderr").find("ConfigError"), std::string::npos);
  EXPECT_EQ(sh("curvature"), 2);
  EXPECT_EQ(sh("frobnicate --config " + (dir / "bad.json").string()), 2);
  fs::remove_all(dir);
}
