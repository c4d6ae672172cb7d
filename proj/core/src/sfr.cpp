#include "stabreg/sfr.hpp"

#include <cmath>
#include <string>

#include "stabreg/errors.hpp"

namespace stabreg {

namespace {
constexpr double kProbTol = 1e-9;

double draw_from(const SfrEntry& e, Rng& rng) {
  double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cum = 0;
  for (std::size_t y = 0; y < e.support.size(); ++y) {
    cum += e.prob[y];
    if (u < cum) return e.support[y];
  }
  return e.support.back();
}
}  // namespace

void validate_sfr(const SfrModel& model) {
  if (model.per_movement.empty()) throw ConfigError("sfr: no movements");
  for (std::size_t m = 0; m < model.per_movement.size(); ++m) {
    const SfrEntry& e = model.per_movement[m];
    std::string where = "sfr[" + std::to_string(m) + "]";
    if (e.support.empty() || e.support.size() != e.prob.size())
      throw ConfigError(where + ": support and probs must be nonempty and equal length");
    double sum = 0;
    for (std::size_t y = 0; y < e.support.size(); ++y) {
      if (e.support[y] < 0 || !std::isfinite(e.support[y]))
        throw ConfigError(where + ": support rates must be finite and nonnegative");
      if (y > 0 && e.support[y] <= e.support[y - 1])
        throw ConfigError(where + ": support must be strictly increasing");
      if (e.prob[y] < -kProbTol || e.prob[y] > 1 + kProbTol)
        throw ConfigError(where + ": probabilities outside [0, 1]");
      sum += e.prob[y];
    }
    if (std::fabs(sum - 1.0) > kProbTol)
      throw ConfigError(where + ": probabilities sum to " + std::to_string(sum));
  }
}

std::vector<double> mean_sfr(const SfrModel& model) {
  std::vector<double> out;
  out.reserve(model.per_movement.size());
  for (const SfrEntry& e : model.per_movement) {
    double s = 0;
    for (std::size_t y = 0; y < e.support.size(); ++y) s += e.support[y] * e.prob[y];
    out.push_back(s);
  }
  return out;
}

std::vector<JointValue> enumerate_joint_values(const SfrModel& model,
                                               const std::vector<int>* mask,
                                               std::size_t cap) {
  const std::size_t M = model.per_movement.size();
  std::vector<int> all;
  if (mask == nullptr) {
    all.resize(M);
    for (std::size_t m = 0; m < M; ++m) all[m] = static_cast<int>(m);
    mask = &all;
  }
  std::size_t count = 1;
  for (int m : *mask) {
    if (m < 0 || static_cast<std::size_t>(m) >= M)
      throw ConfigError("joint enumeration: mask movement out of range");
    std::size_t sz = model.per_movement[m].support.size();
    if (count > cap / sz + 1) count = cap + 1;  // overflow guard
    else count *= sz;
    if (count > cap)
      throw ConfigError("joint enumeration exceeds cap of " + std::to_string(cap) + " values");
  }

  std::vector<double> base = mean_sfr(model);
  std::vector<JointValue> out;
  out.reserve(count);
  std::vector<std::size_t> digit(mask->size(), 0);
  for (std::size_t idx = 0; idx < count; ++idx) {
    JointValue jv;
    jv.index = idx;
    jv.prob = 1.0;
    jv.s = base;
    for (std::size_t k = 0; k < mask->size(); ++k) {
      const SfrEntry& e = model.per_movement[(*mask)[k]];
      jv.s[(*mask)[k]] = e.support[digit[k]];
      jv.prob *= e.prob[digit[k]];
    }
    out.push_back(std::move(jv));
    // first masked movement cycles fastest
    for (std::size_t k = 0; k < mask->size(); ++k) {
      if (++digit[k] < model.per_movement[(*mask)[k]].support.size()) break;
      digit[k] = 0;
    }
  }
  return out;
}

std::vector<double> sample_joint(const SfrModel& model, Rng& rng) {
  std::vector<double> s(model.per_movement.size());
  for (std::size_t m = 0; m < model.per_movement.size(); ++m)
    s[m] = draw_from(model.per_movement[m], rng);
  return s;
}

std::size_t restrict_joint_index(const SfrModel& model, const std::vector<int>& movs,
                                 std::size_t global_index) {
  // Digits of the global index in the mixed-radix system where movement 0
  // cycles fastest, recombined over the mask in the same order.
  std::size_t local = 0;
  std::size_t local_stride = 1;
  std::size_t seen = 0;
  std::size_t stride = 1;
  for (std::size_t m = 0; m < model.per_movement.size(); ++m) {
    const std::size_t size = model.per_movement[m].support.size();
    if (seen < movs.size() && static_cast<std::size_t>(movs[seen]) == m) {
      local += ((global_index / stride) % size) * local_stride;
      local_stride *= size;
      ++seen;
    }
    stride *= size;
  }
  if (seen != movs.size())
    throw ConfigError("restrict_joint_index: mask is not an ascending movement subset");
  return local;
}

PredictionOutcome predict(const Predictor& pred, const SfrModel& model,
                          const std::vector<double>& truth, Rng& rng) {
  if (truth.size() != model.per_movement.size())
    throw ConfigError("predict: truth vector size mismatch");
  std::vector<double> means;  // only needed for the point guess
  if (pred.guess == GuessStrategy::MeanPoint) means = mean_sfr(model);
  PredictionOutcome out;
  out.s_hat.resize(truth.size());
  out.hit.resize(truth.size());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t m = 0; m < truth.size(); ++m) {
    if (unit(rng) < pred.theta) {
      out.s_hat[m] = truth[m];
      out.hit[m] = 1;
    } else {
      out.hit[m] = 0;
      out.s_hat[m] = pred.guess == GuessStrategy::MeanPoint ? means[m]
                                                            : draw_from(model.per_movement[m], rng);
    }
  }
  return out;
}

bool prediction_correct(double s_hat, double s_true, double band) {
  if (band == 0.0) return s_hat == s_true;
  return s_hat >= s_true - band / 2 && s_hat < s_true + band / 2;
}

std::vector<double> accuracy_per_movement(const Predictor& pred, const SfrModel& model) {
  validate_sfr(model);
  if (pred.theta < 0 || pred.theta > 1) throw ConfigError("predictor: theta outside [0, 1]");
  if (pred.band < 0) throw ConfigError("predictor: band must be nonnegative");
  std::vector<double> means = mean_sfr(model);
  std::vector<double> out;
  out.reserve(model.per_movement.size());
  for (std::size_t m = 0; m < model.per_movement.size(); ++m) {
    const SfrEntry& e = model.per_movement[m];
    for (std::size_t y = 1; y < e.support.size(); ++y)
      if (pred.band > e.support[y] - e.support[y - 1] + 1e-12)
        throw ConfigError("predictor: band wider than the gap between support rates");
    // Expected correctness of the guess, weighted by the truth distribution.
    double guess_ok = 0;
    for (std::size_t y = 0; y < e.support.size(); ++y) {
      double py = e.prob[y];
      if (pred.guess == GuessStrategy::MeanPoint) {
        guess_ok += py * (prediction_correct(means[m], e.support[y], pred.band) ? 1.0 : 0.0);
      } else {
        for (std::size_t z = 0; z < e.support.size(); ++z)
          if (prediction_correct(e.support[z], e.support[y], pred.band)) guess_ok += py * e.prob[z];
      }
    }
    out.push_back(pred.theta + (1 - pred.theta) * guess_ok);
  }
  return out;
}

double accuracy_from_ability(const Predictor& pred, const SfrModel& model) {
  std::vector<double> per = accuracy_per_movement(pred, model);
  double s = 0;
  for (double v : per) s += v;
  return s / static_cast<double>(per.size());
}

}  // namespace stabreg
