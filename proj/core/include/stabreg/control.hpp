#pragma once

#include <memory>
#include <vector>

#include "stabreg/network.hpp"
#include "stabreg/rng.hpp"
#include "stabreg/sfr.hpp"
#include "stabreg/stability.hpp"

namespace stabreg {

// Everything a policy may look at when picking phases for one interval.
// Queue and s_hat follow the dense movement order; `revealed` carries, per
// node, the local joint-value index disclosed to rate-conditioned policies
// (-1 when hidden) and is ignored by prediction-driven ones.
struct ControlInput {
  long t = 0;
  std::vector<double> queue;
  std::vector<double> s_hat;
  std::vector<int> revealed;
};

class Controller {
 public:
  enum class Info { Prediction, NodeReveal };

  virtual ~Controller() = default;
  virtual Info info() const { return Info::Prediction; }
  virtual const char* name() const = 0;
  virtual void reset() {}
  // One phase index per node; -1 keeps the whole node red.
  virtual std::vector<int> decide(const ControlInput& in, Rng& rng) = 0;
};

struct BpOptions {
  bool allow_all_red = false;  // rest the node when every phase scores <= 0
};

struct PwbpOptions {
  double jam_spacing_m = 7.0;
  bool allow_all_red = false;
};

struct LescbpOptions {
  double alpha = 0.05;
  double beta = 0.1;
  double jam_spacing_m = 7.0;
  // The live policy holds the running phase on an exact score tie; switching
  // on ties instead makes alpha = 0 reproduce the plain queue policy.
  bool hold_on_tie = true;
};

struct FixedSegment {
  int phase = 0;  // -1 clears the node for the segment
  long intervals = 1;
};

struct FixedPlan {
  std::vector<std::vector<FixedSegment>> per_node;
  std::vector<long> offset;  // empty means all zero
};

std::unique_ptr<Controller> make_bp(const Network& net, BpOptions opts = {});
std::unique_ptr<Controller> make_pwbp(const Network& net, PwbpOptions opts = {});
std::unique_ptr<Controller> make_lescbp(const Network& net, LescbpOptions opts = {});
std::unique_ptr<Controller> make_fixed(const Network& net, FixedPlan plan);

// Randomized stationary policy realizing a green-ratio schedule: each node
// independently samples a phase from the mixture matching its revealed local
// value, or from the fallback mixture when hidden. Mixture slack rests the
// node, so delivered green never exceeds the scheduled ratios.
std::unique_ptr<Controller> make_sfr_only(const Network& net, const SfrModel& model,
                                          const GreenSchedule& schedule);

struct GreenDecomposition {
  std::vector<double> pi;  // one weight per listed phase, pi >= 0, sum <= 1
  double residual = 0;     // total absolute gap between the mixture and g
};

// Least-residual expression of a node's green-ratio vector as a phase
// mixture; exact (residual ~ 0) whenever g lies in the phase polytope.
GreenDecomposition decompose_green_ratios(const Network& net, int node_index,
                                          const std::vector<double>& g_node);

}  // namespace stabreg
