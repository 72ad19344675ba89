/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
// Command-line front-end. Exit codes: 0 success, 1 other failure,
// 2 parse error, 3 no runnable pairs.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "tsalink/tsalink.h"

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitParse = 2;
constexpr int kExitNoPairs = 3;

int exit_code(tsl_status s) {
  switch (s) {
    case TSL_OK: return 0;
    case TSL_ERR_PARSE: return kExitParse;
    case TSL_ERR_NO_PAIRS: return kExitNoPairs;
    default: return kExitFailure;
  }
}

int report(tsl_status s, const char* what) {
  std::fprintf(stderr, "tsalink: %s: %s\n", what, tsl_last_error());
  return exit_code(s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linkage of too-short arcs of optical observations"};
  app.set_version_flag("--version", tsl_version());
  app.require_subcommand(1);

  CLI::App* link = app.add_subcommand("link", "link every arc pair and write a JSON report");
  std::string obs, states, ephemeris, config, pairs, plot, out;
  bool j2 = false, no_prefilter = false;
  link->add_option("--obs", obs, "observations CSV")->required()->check(CLI::ExistingFile);
  auto* st = link->add_option("--states", states, "observer states CSV")->check(CLI::ExistingFile);
  link->add_option("--ephemeris", ephemeris, "analytic observer model")
      ->check(CLI::IsMember({"builtin-circular"}))
      ->excludes(st);
  link->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  link->add_option("--pairs", pairs, "CSV of arc id pairs (default: all pairs)")->check(CLI::ExistingFile);
  link->add_flag("--j2", j2, "iterate the linkage under secular J2 drift");
  link->add_flag("--no-prefilter", no_prefilter, "skip the conic/range-box screening");
  link->add_option("--plot", plot, "directory for curve and root CSVs");
  link->add_option("--out", out, "report path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  tsl_config* cfg = nullptr;
  tsl_status s = tsl_config_load(config.c_str(), &cfg);
  if (s != TSL_OK) return report(s, "config");

  tsl_batch* batch = nullptr;
  s = tsl_batch_load(cfg, obs.c_str(), states.empty() ? nullptr : states.c_str(), ephemeris.empty() ? 0 : 1,
                     pairs.empty() ? nullptr : pairs.c_str(), &batch);
  tsl_config_destroy(cfg);
  if (s != TSL_OK) return report(s, "input");

  unsigned flags = (j2 ? TSL_FLAG_J2 : 0u) | (no_prefilter ? TSL_FLAG_NO_PREFILTER : 0u);
  int code = 0;
  s = tsl_batch_run(batch, flags);
  if (s != TSL_OK && s != TSL_ERR_NO_PAIRS) {
    code = report(s, "run");
  } else if (s == TSL_ERR_NO_PAIRS) {
    code = report(s, "run");
    tsl_batch_write_report(batch, out.c_str());
  } else if ((s = tsl_batch_write_report(batch, out.c_str())) != TSL_OK) {
    code = report(s, "report");
  } else if (!plot.empty() && (s = tsl_batch_write_plots(batch, plot.c_str())) != TSL_OK) {
    code = report(s, "plot");
  }
  tsl_batch_destroy(batch);
  return code;
}
