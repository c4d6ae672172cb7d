#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stabreg/experiment.hpp"
#include "stabreg/simulate.hpp"
#include "stabreg/stability.hpp"

namespace stabreg {

// Writes via a sibling temp file and rename, so readers never observe a
// partial document.
void write_text_atomic(const std::string& path, const std::string& content);

std::string format_double(double v);

// Comment header stamped on experiment CSVs: tool version, fingerprint of the
// config document, and the base seed.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t base_seed = 0;
};

std::string region_csv(const Region2D& region);
std::string reserve_csv(const std::vector<std::pair<double, double>>& theta_eps);
std::string trace_csv(const Trace& tr);
std::string ramp_csv(const RampReport& report, const Provenance& prov);
std::string delay_csv(const DelayReport& report, const Provenance& prov);

// Overlayed region polygons on a fixed square canvas, axes included.
std::string region_svg(const std::vector<std::pair<std::string, Region2D>>& named);

}  // namespace stabreg
