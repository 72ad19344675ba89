/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tsalink/error.hpp"
#include "tsalink/pipeline.hpp"

namespace tsalink {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kArcsec = kDeg / 3600.0;

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ParseError("config: '" + where + "' must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!ok.count(key)) throw ParseError("config: unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number()) throw ParseError(std::string("config: '") + key + "' must be a number");
  return v.get<double>();
}

double get_positive(const json& obj, const char* key, double fallback) {
  const double v = get_number(obj, key, fallback);
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ParseError(std::string("config: '") + key + "' must be positive and finite");
  }
  return v;
}

bool get_bool(const json& obj, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_boolean()) throw ParseError(std::string("config: '") + key + "' must be a boolean");
  return obj.at(key).get<bool>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_string()) throw ParseError(std::string("config: '") + key + "' must be a string");
  return obj.at(key).get<std::string>();
}

}  // namespace

AssessmentConfig RunConfig::assessment() const {
  AssessmentConfig a;
  a.mu = mu;
  a.rho_min = rho_min;
  a.rho_max = rho_max;
  a.tau_sp = tau_sp;
  a.tau_L2 = tau_L2;
  return a;
}

double RunConfig::epoch_of(double mjd) const {
  return mode == Mode::Geocentric ? mjd * kSecondsPerDay : mjd;
}

RunConfig default_config(Mode mode) {
  RunConfig cfg;
  cfg.mode = mode;
  if (mode == Mode::Geocentric) {
    cfg.mu = kMuEarth;
    cfg.rho_min = 100.0;
    cfg.rho_max = 500000.0;
    cfg.j2_cfg.mu = kMuEarth;
    cfg.stations["default"] = Station{};
  } else {
    cfg.mu = kMuSun;
    cfg.rho_min = 1e-3;
    cfg.rho_max = 100.0;
  }
  return cfg;
}

RunConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config: ") + e.what());
  }
  check_keys(root, "config",
             {"mode", "mu", "rho_min", "rho_max", "tolerances", "fit", "j2", "ephemeris", "stations",
              "penalty_threshold", "output", "plot", "threads"});

  const std::string mode = get_string(root, "mode", "heliocentric");
  RunConfig cfg;
  if (mode == "heliocentric") {
    cfg = default_config(Mode::Heliocentric);
  } else if (mode == "geocentric") {
    cfg = default_config(Mode::Geocentric);
  } else {
    throw ParseError("config: mode must be 'heliocentric' or 'geocentric'");
  }

  cfg.mu = get_positive(root, "mu", cfg.mu);
  cfg.j2_cfg.mu = cfg.mu;
  cfg.rho_min = get_positive(root, "rho_min", cfg.rho_min);
  cfg.rho_max = get_positive(root, "rho_max", cfg.rho_max);
  if (!(cfg.rho_min < cfg.rho_max)) throw ParseError("config: rho_min must be below rho_max");

  if (root.contains("tolerances")) {
    const json& t = root.at("tolerances");
    check_keys(t, "tolerances", {"tau_x", "tau_defl", "defl_escalate", "tau_sp", "tau_L2", "eps_deg", "imag_tol"});
    cfg.linkage.tau_x = get_positive(t, "tau_x", cfg.linkage.tau_x);
    cfg.linkage.tau_defl = get_positive(t, "tau_defl", cfg.linkage.tau_defl);
    cfg.linkage.defl_escalate = get_positive(t, "defl_escalate", cfg.linkage.defl_escalate);
    cfg.linkage.eps_deg = get_positive(t, "eps_deg", cfg.linkage.eps_deg);
    cfg.linkage.imag_tol = get_positive(t, "imag_tol", cfg.linkage.imag_tol);
    cfg.tau_sp = get_positive(t, "tau_sp", cfg.tau_sp);
    cfg.tau_L2 = get_positive(t, "tau_L2", cfg.tau_L2);
  }

  if (root.contains("fit")) {
    const json& f = root.at("fit");
    check_keys(f, "fit", {"sigma_ra_arcsec", "sigma_dec_arcsec"});
    cfg.fit.default_sigma_alpha = get_positive(f, "sigma_ra_arcsec", cfg.fit.default_sigma_alpha / kArcsec) * kArcsec;
    cfg.fit.default_sigma_delta = get_positive(f, "sigma_dec_arcsec", cfg.fit.default_sigma_delta / kArcsec) * kArcsec;
  }

  if (root.contains("j2")) {
    const json& j = root.at("j2");
    check_keys(j, "j2", {"enabled", "j2", "r_body", "max_iter", "tol_rho", "branch", "branch_fallback", "damping"});
    cfg.j2 = get_bool(j, "enabled", cfg.j2);
    cfg.j2_cfg.j2 = get_number(j, "j2", cfg.j2_cfg.j2);
    if (cfg.j2_cfg.j2 < 0.0) throw ParseError("config: j2 must be non-negative");
    cfg.j2_cfg.r_body = get_positive(j, "r_body", cfg.j2_cfg.r_body);
    const double iters = get_number(j, "max_iter", cfg.j2_cfg.max_iter);
    if (iters < 1.0 || iters != std::floor(iters)) throw ParseError("config: max_iter must be an integer >= 1");
    cfg.j2_cfg.max_iter = static_cast<int>(iters);
    cfg.j2_cfg.tol_rho = get_positive(j, "tol_rho", cfg.j2_cfg.tol_rho);
    const std::string branch = get_string(j, "branch", "p1");
    if (branch == "p1") {
      cfg.j2_cfg.branch = J2Branch::P1;
    } else if (branch == "p2") {
      cfg.j2_cfg.branch = J2Branch::P2;
    } else {
      throw ParseError("config: j2.branch must be 'p1' or 'p2'");
    }
    cfg.j2_cfg.branch_fallback = get_bool(j, "branch_fallback", cfg.j2_cfg.branch_fallback);
    cfg.j2_cfg.damping = get_bool(j, "damping", cfg.j2_cfg.damping);
  }

  const std::string eph = get_string(root, "ephemeris", "file");
  if (eph == "file") {
    cfg.ephemeris = EphemerisSource::File;
  } else if (eph == "builtin-circular") {
    cfg.ephemeris = EphemerisSource::BuiltinCircular;
  } else {
    throw ParseError("config: ephemeris must be 'file' or 'builtin-circular'");
  }

  if (root.contains("stations")) {
    const json& st = root.at("stations");
    if (!st.is_object()) throw ParseError("config: 'stations' must be an object");
    for (const auto& [id, s] : st.items()) {
      check_keys(s, "stations." + id, {"latitude_deg", "longitude_deg", "radius"});
      Station station;
      station.latitude = get_number(s, "latitude_deg", 0.0) * kDeg;
      station.longitude = get_number(s, "longitude_deg", 0.0) * kDeg;
      station.radius = get_positive(s, "radius", cfg.j2_cfg.r_body);
      if (std::abs(station.latitude) > std::numbers::pi / 2) {
        throw ParseError("config: station '" + id + "' latitude outside [-90, 90]");
      }
      cfg.stations[id] = station;
    }
  }

  cfg.penalty_threshold = get_positive(root, "penalty_threshold", cfg.penalty_threshold);

  if (root.contains("output")) {
    const json& o = root.at("output");
    check_keys(o, "output", {"format", "include_covariance"});
    if (get_string(o, "format", "json") != "json") throw ParseError("config: output.format must be 'json'");
    cfg.include_covariance = get_bool(o, "include_covariance", cfg.include_covariance);
  }
  if (root.contains("plot")) {
    const json& p = root.at("plot");
    check_keys(p, "plot", {"rho_max", "samples"});
    cfg.plot_rho_max = get_number(p, "rho_max", cfg.plot_rho_max);
    cfg.plot_samples = static_cast<int>(get_positive(p, "samples", cfg.plot_samples));
  }
  const double threads = get_positive(root, "threads", cfg.threads);
  cfg.threads = static_cast<int>(threads);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

}  // namespace tsalink
