#include "dmn/io.hpp"

#include <fstream>

#include "json.hpp"

namespace dmn {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return j;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << j.dump(2) << "\n";
}

void check_version(const json& j, const std::string& path) {
  if (!j.contains("version") || j["version"].get<int>() != 1) {
    throw ConfigError(path + ": missing or unsupported version (expected 1)");
  }
}

// Tensor-component keys in Mandel order; shear values are scaled by sqrt(2)
// on the way in.
constexpr const char* kComponents[6] = {"11", "22", "33", "23", "13", "12"};

HardeningLaw parse_hardening(const json& j, const std::string& path) {
  if (j.contains("points")) {
    PiecewiseLinearHardening h;
    for (const auto& p : j["points"]) {
      h.points.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
    }
    if (h.points.size() < 2) {
      throw ConfigError(path + ": piecewise hardening needs >= 2 points");
    }
    return h;
  }
  ExponentialHardening h;
  try {
    h.sigma_y0 = j.at("sigma_y").get<double>();
    h.sigma_u = j.at("sigma_u").get<double>();
    h.E_h = j.at("E_h").get<double>();
    h.a = j.at("a").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": hardening block: " + e.what());
  }
  return h;
}

PhaseSpec parse_phase(const json& j, const std::string& path) {
  PhaseSpec ph;
  try {
    if (j.contains("orthotropic")) {
      const auto& o = j["orthotropic"];
      ph.material = make_elastic_orthotropic(
          o.at("E1").get<double>(), o.at("E2").get<double>(),
          o.at("E3").get<double>(), o.at("G23").get<double>(),
          o.at("G13").get<double>(), o.at("G12").get<double>(),
          o.at("nu21").get<double>(), o.at("nu31").get<double>(),
          o.at("nu32").get<double>());
    } else {
      const auto& e = j.at("elastic");
      double E = e.at("E").get<double>();
      double nu = e.at("nu").get<double>();
      if (j.contains("hardening")) {
        ph.material = make_plastic(E, nu, parse_hardening(j["hardening"], path));
      } else {
        ph.material = make_elastic_isotropic(E, nu);
      }
    }
    if (j.contains("cohesive")) {
      const auto& c = j["cohesive"];
      ph.breakable = true;
      ph.cohesive.t_c = c.at("t_c").get<double>();
      ph.cohesive.G_c = c.at("G_c").get<double>();
      ph.cohesive.beta = c.at("beta").get<double>();
      ph.cohesive.tau = c.at("tau").get<double>();
      if (c.contains("K")) ph.cohesive.K = c["K"].get<double>();
      if (c.contains("kappa")) ph.cohesive.kappa = c["kappa"].get<double>();
      if (ph.cohesive.t_c <= 0.0 || ph.cohesive.G_c <= 0.0 ||
          ph.cohesive.beta <= 0.0 || ph.cohesive.tau <= 0.0) {
        throw ConfigError(path + ": cohesive constants must be positive");
      }
      if (ph.cohesive.d_f() <= ph.cohesive.d_c()) {
        throw ConfigError(path + ": cohesive law needs d_f > d_c");
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": phase block: " + e.what());
  }
  return ph;
}

ScaleTensor parse_macro_cell(const json& j, const std::string& path) {
  if (j.contains("h")) {
    double h = j["h"].get<double>();
    if (h <= 0.0) throw ConfigError(path + ": macro cell h must be > 0");
    return sphere_scale_tensor(h);
  }
  if (j.contains("lengths")) {
    const auto& l = j["lengths"];
    if (l.size() != 3) throw ConfigError(path + ": lengths needs 3 entries");
    Mat3 A = Mat3::Zero();
    for (int i = 0; i < 3; ++i) {
      double h = l[i].get<double>();
      if (h <= 0.0) throw ConfigError(path + ": lengths must be > 0");
      A(i, i) = 4.0 / (h * h);
    }
    return A;
  }
  if (j.contains("tensor")) {
    Mat3 A;
    const auto& t = j["tensor"];
    if (t.size() != 3) throw ConfigError(path + ": tensor needs 3 rows");
    for (int i = 0; i < 3; ++i) {
      for (int k = 0; k < 3; ++k) A(i, k) = t[i][k].get<double>();
    }
    EigSym3 eig = eig_sym3(A, 1e-9);
    if (eig.values(2) <= 0.0) {
      throw ConfigError(path + ": macro scale tensor must be SPD");
    }
    return A;
  }
  throw ConfigError(path + ": macro_cell needs h, lengths, or tensor");
}

LoadSegment parse_segment(const json& j, const std::string& path) {
  LoadSegment seg;
  seg.steps = j.value("steps", 1);
  seg.duration = j.value("dt", 1.0);
  if (seg.steps < 1 || seg.duration <= 0.0) {
    throw ConfigError(path + ": segment needs steps >= 1 and dt > 0");
  }
  auto apply = [&](const json& block, bool is_strain) {
    for (int m = 0; m < 6; ++m) {
      if (!block.contains(kComponents[m])) continue;
      double v = block[kComponents[m]].get<double>();
      seg.strain_control[m] = is_strain;
      seg.target(m) = m < 3 ? v : kSqrt2 * v;
    }
  };
  if (j.contains("stress")) apply(j["stress"], false);
  if (j.contains("strain")) apply(j["strain"], true);
  for (int m = 0; m < 6; ++m) {
    if (j.contains("strain") && j["strain"].contains(kComponents[m]) &&
        j.contains("stress") && j["stress"].contains(kComponents[m])) {
      throw ConfigError(path + ": component " + kComponents[m] +
                        " is both strain and stress controlled");
    }
  }
  return seg;
}

}  // namespace

NetworkParams load_params(const std::string& path) {
  json j = read_json(path);
  check_version(j, path);
  NetworkParams p;
  try {
    p.depth = j.at("depth").get<int>();
    p.z = j.at("z").get<std::vector<double>>();
    p.phase = j.at("phase").get<std::vector<int>>();
    for (const auto& a : j.at("angles")) {
      p.angles.emplace_back(a.at(0).get<double>(), a.at(1).get<double>(),
                            a.at(2).get<double>());
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return p;
}

void save_params(const NetworkParams& params, const std::string& path) {
  json j;
  j["version"] = 1;
  j["depth"] = params.depth;
  j["z"] = params.z;
  j["phase"] = params.phase;
  json angles = json::array();
  for (const auto& a : params.angles) {
    angles.push_back({a(0), a(1), a(2)});
  }
  j["angles"] = angles;
  write_json(j, path);
}

PlanarParams load_planar_params(const std::string& path) {
  json j = read_json(path);
  check_version(j, path);
  PlanarParams p;
  try {
    p.depth = j.at("depth").get<int>();
    p.z = j.at("z").get<std::vector<double>>();
    p.theta = j.at("theta").get<std::vector<double>>();
    p.phase = j.at("phase").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return p;
}

void save_planar_params(const PlanarParams& params, const std::string& path) {
  json j;
  j["version"] = 1;
  j["depth"] = params.depth;
  j["z"] = params.z;
  j["theta"] = params.theta;
  j["phase"] = params.phase;
  write_json(j, path);
}

RunConfig load_run_config(const std::string& path) {
  json j = read_json(path);
  check_version(j, path);
  RunConfig cfg;
  try {
    cfg.params_path = j.at("parameters").get<std::string>();
    for (const auto& ph : j.at("phases")) {
      cfg.phases.push_back(parse_phase(ph, path));
    }
    cfg.A_macro = parse_macro_cell(j.at("macro_cell"), path);
    for (const auto& seg : j.at("load_path")) {
      cfg.path.push_back(parse_segment(seg, path));
    }
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (cfg.phases.empty()) throw ConfigError(path + ": no phases defined");
  if (cfg.path.empty()) throw ConfigError(path + ": empty load path");
  return cfg;
}

}  // namespace dmn
