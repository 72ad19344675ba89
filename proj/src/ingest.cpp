/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "tsalink/error.hpp"
#include "tsalink/pipeline.hpp"

namespace tsalink {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kArcsec = kDeg / 3600.0;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string where(const std::filesystem::path& path, int line) {
  return path.string() + ":" + std::to_string(line) + ": ";
}

double to_double(const std::string& cell, const std::filesystem::path& path, int line, const char* field) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw ParseError(where(path, line) + "invalid number '" + cell + "' for " + field);
  }
  return v;
}

// Calls row(cells, line) for each data row after checking the header.
template <class F>
void read_csv(const std::filesystem::path& path, const std::vector<std::string>& header, F&& row) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::string line;
  int lineno = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::vector<std::string> cells = split(t);
    if (!seen_header) {
      if (lineno == 1 && cells.size() >= 1 && cells[0].rfind("\xEF\xBB\xBF", 0) == 0) {
        cells[0] = cells[0].substr(3);
      }
      if (cells != header) {
        std::string expected;
        for (std::size_t k = 0; k < header.size(); ++k) expected += (k ? "," : "") + header[k];
        throw ParseError(where(path, lineno) + "expected header '" + expected + "'");
      }
      seen_header = true;
      continue;
    }
    if (cells.size() != header.size()) {
      throw ParseError(where(path, lineno) + "expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(cells.size()));
    }
    row(cells, lineno);
  }
  if (!seen_header) throw ParseError(where(path, lineno) + "missing header");
}

ObserverState hermite(const StateRow& a, const StateRow& b, double t, const RunConfig& cfg) {
  const double t0 = cfg.epoch_of(a.mjd), t1 = cfg.epoch_of(b.mjd);
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  ObserverState o;
  o.q = (2 * s3 - 3 * s2 + 1) * a.q + (s3 - 2 * s2 + s) * h * a.qdot + (-2 * s3 + 3 * s2) * b.q +
        (s3 - s2) * h * b.qdot;
  o.qdot = ((6 * s2 - 6 * s) * a.q + (3 * s2 - 4 * s + 1) * h * a.qdot + (-6 * s2 + 6 * s) * b.q +
            (3 * s2 - 2 * s) * h * b.qdot) /
           h;
  o.epoch = t;
  return o;
}

}  // namespace

std::vector<ObservationRow> read_observations(const std::filesystem::path& path) {
  std::vector<ObservationRow> rows;
  read_csv(path,
           {"arc_id", "station_id", "mjd", "ra_deg", "dec_deg", "sigma_ra_arcsec", "sigma_dec_arcsec"},
           [&](const std::vector<std::string>& c, int line) {
             ObservationRow r;
             r.arc_id = c[0];
             r.station_id = c[1];
             if (r.arc_id.empty()) throw ParseError(where(path, line) + "empty arc_id");
             r.mjd = to_double(c[2], path, line, "mjd");
             r.ra_deg = to_double(c[3], path, line, "ra_deg");
             r.dec_deg = to_double(c[4], path, line, "dec_deg");
             r.sigma_ra_arcsec = c[5].empty() ? 0.0 : to_double(c[5], path, line, "sigma_ra_arcsec");
             r.sigma_dec_arcsec = c[6].empty() ? 0.0 : to_double(c[6], path, line, "sigma_dec_arcsec");
             if (std::abs(r.dec_deg) > 90.0) throw ParseError(where(path, line) + "dec_deg outside [-90, 90]");
             r.line = line;
             rows.push_back(r);
           });
  return rows;
}

std::vector<StateRow> read_states(const std::filesystem::path& path) {
  std::vector<StateRow> rows;
  read_csv(path, {"station_id", "mjd", "x", "y", "z", "vx", "vy", "vz"},
           [&](const std::vector<std::string>& c, int line) {
             StateRow r;
             r.station_id = c[0];
             r.mjd = to_double(c[1], path, line, "mjd");
             r.q = Vec3(to_double(c[2], path, line, "x"), to_double(c[3], path, line, "y"),
                        to_double(c[4], path, line, "z"));
             r.qdot = Vec3(to_double(c[5], path, line, "vx"), to_double(c[6], path, line, "vy"),
                           to_double(c[7], path, line, "vz"));
             r.line = line;
             rows.push_back(r);
           });
  return rows;
}

void write_states(const std::filesystem::path& path, const std::vector<StateRow>& rows) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  out << "station_id,mjd,x,y,z,vx,vy,vz\n";
  char buf[512];
  for (const StateRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.station_id.c_str(),
                  r.mjd, r.q.x(), r.q.y(), r.q.z(), r.qdot.x(), r.qdot.y(), r.qdot.z());
    out << buf;
  }
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::vector<Arc> ingest(const std::vector<ObservationRow>& rows, const std::vector<StateRow>* states,
                        const RunConfig& cfg) {
  std::vector<Arc> arcs;
  std::map<std::string, std::size_t> index;
  for (const ObservationRow& r : rows) {
    auto [it, inserted] = index.try_emplace(r.arc_id, arcs.size());
    if (inserted) {
      Arc a;
      a.id = r.arc_id;
      a.station_id = r.station_id;
      arcs.push_back(a);
    }
    Arc& arc = arcs[it->second];
    if (arc.station_id != r.station_id) {
      throw ParseError("line " + std::to_string(r.line) + ": arc '" + arc.id + "' mixes stations '" +
                       arc.station_id + "' and '" + r.station_id + "'");
    }
    if (!arc.rows.empty() && !(r.mjd > arc.rows.back().mjd)) {
      throw ParseError("line " + std::to_string(r.line) + ": epochs of arc '" + arc.id +
                       "' are not strictly increasing");
    }
    arc.rows.push_back(r);
  }
  for (const Arc& a : arcs) {
    if (a.rows.size() < 2) {
      throw ParseError("line " + std::to_string(a.rows.front().line) + ": arc '" + a.id +
                       "' has fewer than 2 observations");
    }
  }

  // observer state tables per station, sorted by epoch
  std::map<std::string, std::vector<StateRow>> table;
  if (cfg.ephemeris == EphemerisSource::File) {
    if (states == nullptr) throw ParseError("no observer states supplied and builtin ephemeris not selected");
    for (const StateRow& s : *states) table[s.station_id].push_back(s);
    for (auto& [id, v] : table) {
      std::sort(v.begin(), v.end(), [](const StateRow& a, const StateRow& b) { return a.mjd < b.mjd; });
    }
    std::vector<std::string> missing;
    for (const Arc& a : arcs) {
      const auto it = table.find(a.station_id);
      for (const ObservationRow& r : a.rows) {
        const bool covered = it != table.end() &&
                             std::any_of(it->second.begin(), it->second.end(),
                                         [&](const StateRow& s) { return s.mjd == r.mjd; });
        if (!covered) {
          std::ostringstream m;
          m.precision(15);
          m << a.station_id << "@" << r.mjd << " (line " << r.line << ")";
          missing.push_back(m.str());
        }
      }
    }
    if (!missing.empty()) {
      std::string msg = "observer states missing for " + std::to_string(missing.size()) + " epoch(s):";
      for (const std::string& m : missing) msg += " " + m;
      throw ParseError(msg);
    }
  } else if (cfg.mode == Mode::Geocentric) {
    for (const Arc& a : arcs) {
      if (!cfg.stations.count(a.station_id) && !cfg.stations.count("default")) {
        throw ParseError("no builtin station geometry for station '" + a.station_id + "'");
      }
    }
  }

  auto observer_at = [&](const Arc& a, double mjd) -> ObserverState {
    if (cfg.ephemeris == EphemerisSource::BuiltinCircular) {
      if (cfg.mode == Mode::Heliocentric) return circular_earth(mjd);
      const auto it = cfg.stations.find(a.station_id);
      return rotating_station(mjd, it != cfg.stations.end() ? it->second : cfg.stations.at("default"));
    }
    const std::vector<StateRow>& v = table.at(a.station_id);
    const auto hi = std::lower_bound(v.begin(), v.end(), mjd,
                                     [](const StateRow& s, double t) { return s.mjd < t; });
    if (hi != v.end() && hi->mjd == mjd) {
      return ObserverState{hi->q, hi->qdot, cfg.epoch_of(mjd)};
    }
    if (hi == v.begin() || hi == v.end()) throw ParseError("observer states do not bracket arc '" + a.id + "'");
    return hermite(*(hi - 1), *hi, cfg.epoch_of(mjd), cfg);
  };

  for (Arc& a : arcs) {
    std::vector<AngularObservation> obs;
    for (const ObservationRow& r : a.rows) {
      obs.push_back(AngularObservation{cfg.epoch_of(r.mjd), r.ra_deg * kDeg, r.dec_deg * kDeg,
                                       r.sigma_ra_arcsec * kArcsec, r.sigma_dec_arcsec * kArcsec});
    }
    double mean_mjd = 0.0;
    for (const ObservationRow& r : a.rows) mean_mjd += r.mjd;
    mean_mjd /= static_cast<double>(a.rows.size());
    try {
      a.attributable = fit_attributable(obs, cfg.fit);
      a.observer = observer_at(a, mean_mjd);
      a.observer.epoch = a.attributable->epoch;
    } catch (const Error& e) {
      a.attributable.reset();
      a.fit_error = e.what();
    }
  }
  return arcs;
}

PairList read_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  PairList out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const std::vector<std::string> c = split(t);
    if (c.size() != 2 || c[0].empty() || c[1].empty()) {
      throw ParseError(where(path, lineno) + "expected 'arc1,arc2'");
    }
    if (out.empty() && c[0] == "arc1" && c[1] == "arc2") continue;
    out.emplace_back(c[0], c[1]);
  }
  return out;
}

PairList all_pairs(const std::vector<Arc>& arcs) {
  PairList out;
  for (std::size_t i = 0; i < arcs.size(); ++i) {
    for (std::size_t j = i + 1; j < arcs.size(); ++j) out.emplace_back(arcs[i].id, arcs[j].id);
  }
  return out;
}

}  // namespace tsalink
