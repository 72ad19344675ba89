/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
#pragma once

// Batch front-end: configuration, CSV ingestion, per-pair linkage and the
// JSON report.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tsalink/assessment.hpp"
#include "tsalink/attributable.hpp"
#include "tsalink/ephemeris.hpp"
#include "tsalink/j2.hpp"
#include "tsalink/linkage.hpp"
#include "tsalink/prefilter.hpp"

namespace tsalink {

enum class Mode { Heliocentric, Geocentric };
enum class EphemerisSource { File, BuiltinCircular };

struct RunConfig {
  Mode mode = Mode::Heliocentric;
  double mu = kMuSun;
  double rho_min = 1e-3;
  double rho_max = 100.0;
  LinkageConfig linkage;
  double tau_sp = 1e-2;
  double tau_L2 = 1e-2;
  FitOptions fit;
  bool j2 = false;
  J2Config j2_cfg;
  EphemerisSource ephemeris = EphemerisSource::File;
  /// Geocentric builtin stations by id; "default" is used for unknown ids.
  std::map<std::string, Station> stations;
  /// Best accepted penalty above this marks the pair an unlikely link.
  double penalty_threshold = 5.0;
  bool include_covariance = true;
  /// Upper range for plot sampling; 0 picks one from the solutions.
  double plot_rho_max = 0.0;
  int plot_samples = 400;
  int threads = 1;

  AssessmentConfig assessment() const;
  /// Epoch (time unit of mu) for an MJD.
  double epoch_of(double mjd) const;
};

/// Defaults for the given mode (mu, ranges, J2 constants).
RunConfig default_config(Mode mode);

/// Loads a JSON configuration. Throws ParseError on malformed input,
/// unknown keys or non-positive tolerances.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& json_text);

struct ObservationRow {
  std::string arc_id;
  std::string station_id;
  double mjd = 0.0;
  double ra_deg = 0.0;
  double dec_deg = 0.0;
  double sigma_ra_arcsec = 0.0;
  double sigma_dec_arcsec = 0.0;
  int line = 0;
};

struct StateRow {
  std::string station_id;
  double mjd = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
  int line = 0;
};

/// Line-numbered ParseError on malformed rows or a wrong header.
std::vector<ObservationRow> read_observations(const std::filesystem::path& path);
std::vector<StateRow> read_states(const std::filesystem::path& path);
void write_states(const std::filesystem::path& path, const std::vector<StateRow>& rows);

struct Arc {
  std::string id;
  std::string station_id;
  std::vector<ObservationRow> rows;
  std::optional<Attributable> attributable;
  ObserverState observer;
  std::string fit_error;
};

/// Groups rows by arc (input order), fits attributables and attaches the
/// observer state at each mean epoch. Missing state coverage throws
/// ParseError listing the offending epochs.
std::vector<Arc> ingest(const std::vector<ObservationRow>& rows, const std::vector<StateRow>* states,
                        const RunConfig& cfg);

using PairList = std::vector<std::pair<std::string, std::string>>;

/// CSV of arc id pairs, optional header "arc1,arc2".
PairList read_pairs(const std::filesystem::path& path);

/// Every unordered pair in arc order.
PairList all_pairs(const std::vector<Arc>& arcs);

struct J2Summary {
  std::vector<J2SeedResult> seeds;
};

struct PairReport {
  std::string pair_id;
  std::string arc1, arc2;
  /// "linked", "prefilter_rejected", "skipped", "error"
  std::string status;
  std::string error;
  std::optional<PrefilterDecision> prefilter;
  std::optional<ConicClass> conic;
  std::optional<LinkageResult> linkage;
  std::vector<LinkageSolution> solutions;
  std::optional<J2Summary> j2;
  bool unlikely_link = false;
  std::optional<std::pair<Attributable, Attributable>> attributables;
  std::pair<ObserverState, ObserverState> observers;
};

struct BatchOptions {
  bool j2 = false;
  bool prefilter = true;
};

/// Runs every pair; failures stay inside the pair's report. Reports follow
/// the order of `pairs`.
std::vector<PairReport> run_linkage_batch(const std::vector<Arc>& arcs, const PairList& pairs,
                                          const RunConfig& cfg, const BatchOptions& opts);

/// One pair (attributables and observers given).
PairReport run_pair(const Attributable& a1, const Attributable& a2, const ObserverState& o1,
                    const ObserverState& o2, const RunConfig& cfg, const BatchOptions& opts);

/// Serialized report array (stable key order, 2-space indent).
std::string reports_to_json(const std::vector<PairReport>& reports, const RunConfig& cfg);
std::string report_to_json(const PairReport& report, const RunConfig& cfg);

/// Zero sets of q, p1, p2 on a grid plus root markers, two CSVs per pair.
void write_plot_data(const std::filesystem::path& dir, const std::vector<PairReport>& reports,
                     const RunConfig& cfg);

}  // namespace tsalink
