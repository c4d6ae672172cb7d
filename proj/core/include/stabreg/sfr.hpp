#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "stabreg/rng.hpp"

namespace stabreg {

// Discrete distribution of one movement's imminent service rate
// (vehicles per interval under green).
struct SfrEntry {
  std::vector<double> support;  // strictly increasing, nonnegative
  std::vector<double> prob;     // same size, sums to 1
};

// Indexed like the network's dense movement order.
struct SfrModel {
  std::vector<SfrEntry> per_movement;
};

// Throws ConfigError on empty, negative, unsorted, or unnormalized entries.
void validate_sfr(const SfrModel& model);

std::vector<double> mean_sfr(const SfrModel& model);

struct JointValue {
  std::size_t index = 0;
  double prob = 0;
  std::vector<double> s;  // full length; movements outside the mask sit at their mean
};

inline constexpr std::size_t kJointCap = 4096;

// Product enumeration over the masked movements (all movements when mask is
// null), first masked movement cycling fastest. Throws ConfigError when the
// product exceeds `cap`.
std::vector<JointValue> enumerate_joint_values(const SfrModel& model,
                                               const std::vector<int>* mask = nullptr,
                                               std::size_t cap = kJointCap);

// Independent draw per movement.
std::vector<double> sample_joint(const SfrModel& model, Rng& rng);

// Index of a full joint value's restriction to `movs` within the enumeration
// over that mask, so per-node tables can be addressed from a global draw.
std::size_t restrict_joint_index(const SfrModel& model, const std::vector<int>& movs,
                                 std::size_t global_index);

enum class GuessStrategy { MeanPoint, Empirical };

struct Predictor {
  double theta = 1.0;            // probability a movement's rate is revealed
  GuessStrategy guess = GuessStrategy::MeanPoint;
  double band = 1.0;             // width of the correctness window; 0 = exact match
};

struct PredictionOutcome {
  std::vector<double> s_hat;
  std::vector<std::uint8_t> hit;  // bookkeeping only; controllers never see it
};

// Per movement: with probability theta reveal the realized rate, otherwise
// substitute the guess. Both guess strategies leave the prediction unbiased.
PredictionOutcome predict(const Predictor& pred, const SfrModel& model,
                          const std::vector<double>& truth, Rng& rng);

// A prediction scores correct when it falls within the half-open window
// [s - band/2, s + band/2) around the realized rate; band 0 means equality.
bool prediction_correct(double s_hat, double s_true, double band);

// Closed-form expected correctness rate per movement; `accuracy_from_ability`
// averages it across movements. Throws ConfigError when the band is wide
// enough to cover two support points at once.
std::vector<double> accuracy_per_movement(const Predictor& pred, const SfrModel& model);
double accuracy_from_ability(const Predictor& pred, const SfrModel& model);

}  // namespace stabreg
