#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stabreg/control.hpp"
#include "stabreg/experiment.hpp"
#include "stabreg/simulate.hpp"

namespace stabreg {

// Parsed controller block; `type` is one of bp, pwbp, lescbp, fixed, sfronly.
struct ControllerSpec {
  std::string type = "bp";
  bool allow_all_red = false;
  double alpha = 0.05;
  double beta = 0.1;
  FixedPlan plan;
  // sfronly: ability used to build the schedule; negative means "use the
  // predictor's theta". The schedule comes from the reserve program at the
  // scenario's base demand.
  double sfronly_theta = -1.0;
};

struct ParsedConfig {
  int schema_version = 1;
  Scenario scenario;
  ControllerSpec controller;
  std::string raw;  // exact document text, fingerprinted into reports
};

// Reads and validates a JSON scenario document. Errors carry the file path
// and the offending field.
ParsedConfig load_config_file(const std::string& path);
ParsedConfig parse_config(const std::string& text, const std::string& origin);

// Instantiates the configured controller against `net`, which must outlive
// it. sfronly solves the reserve program here to obtain its schedule.
std::unique_ptr<Controller> make_controller(const ControllerSpec& spec,
                                            const Scenario& scn, const Network& net);

// Factory form for replicated experiments; captures everything by value
// except the network, which each replication passes in.
ControllerFactory controller_factory(const ControllerSpec& spec, const Scenario& scn);

}  // namespace stabreg
