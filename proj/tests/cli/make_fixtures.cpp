/*
 * Copyright 2026 The tsalink Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */
// Writes the input files used by the command-line and C API tests.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>

#include "support/synthetic.hpp"

using namespace tsalink;
using namespace tsalink::testing;
namespace fs = std::filesystem;

namespace {

void text(const fs::path& p, const char* body) {
  std::ofstream out(p);
  out << body;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: tsalink_make_fixtures DIR\n";
    return 1;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir);

  std::mt19937_64 gen(5);
  const double mjd1 = 60000.0, gap = 25.0;
  std::vector<ObservationRow> rows;
  for (int k = 0; k < 3; ++k) {
    const State6 s0 = keplerian_to_cartesian(random_elements(gen, mjd1), kMuSun);
    const std::string name = "o" + std::to_string(k);
    for (const char* tag : {"a", "b"}) {
      const double mid = tag[0] == 'a' ? mjd1 : mjd1 + gap;
      auto r = arc_rows(s0, name + tag, "500", mid, 4, 0.01);
      rows.insert(rows.end(), r.begin(), r.end());
    }
  }
  write_observations(dir / "obs.csv", rows);
  write_states(dir / "states.csv", state_rows(rows));

  text(dir / "config.json", "{\n  \"mode\": \"heliocentric\",\n  \"rho_min\": 0.001,\n  \"rho_max\": 100\n}\n");
  text(dir / "pairs.csv", "arc1,arc2\no0a,o0b\no1a,o1b\no0a,o2b\n");
  text(dir / "self_pairs.csv", "arc1,arc2\no0a,o0a\no1b,o1b\n");
  text(dir / "bad_obs.csv",
       "arc_id,station_id,mjd,ra_deg,dec_deg,sigma_ra_arcsec,sigma_dec_arcsec\n"
       "A,500,60000.0,10.5,-3.25,0.5,0.4\n"
       "A,500,60000.01,not-a-number,-3.2,0.5,0.4\n");
  text(dir / "bad_config.json", "{\n  \"mode\": \"heliocentric\",\n  \"rho_maximum\": 100\n}\n");
  return 0;
}
