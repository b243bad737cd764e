#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "martvar/common.hpp"

namespace martvar {

using Label = std::string;
using LabelSet = std::vector<Label>;
using LabelSetPtr = std::shared_ptr<const LabelSet>;

/// Finite probability distribution over an ordered label set.
///
/// Immutable. Construction validates: labels distinct, probabilities
/// nonnegative, total mass within 1e-12 of 1. Zero entries are allowed
/// (point masses are distributions too); renormalization never happens
/// implicitly, use renormalized() when you mean it.
///
/// The label set is shared between instances so that trees with thousands of
/// nodes over the same support do not copy label strings per node.
class Distribution {
 public:
  Distribution(LabelSet labels, std::vector<double> probs);
  Distribution(LabelSetPtr labels, std::vector<double> probs);

  /// Uniform distribution on labels "0".."d-1".
  static Distribution uniform(std::size_t d);

  /// Point mass on labels[index].
  static Distribution point_mass(LabelSetPtr labels, std::size_t index);

  const LabelSet& labels() const { return *labels_; }
  const LabelSetPtr& labels_ptr() const { return labels_; }
  const std::vector<double>& probs() const { return probs_; }
  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }

  /// True when both distributions use the same ordered label set.
  bool same_support(const Distribution& other) const;

  /// Rescales mass to sum exactly to 1 (explicit opt-in; throws on zero mass).
  Distribution renormalized() const;

  nlohmann::json to_json() const;
  static Distribution from_json(const nlohmann::json& j);

 private:
  LabelSetPtr labels_;
  std::vector<double> probs_;
};

/// Shannon entropy in nats; 0 log 0 = 0.
double entropy(const Distribution& p);

/// Total variation in L1 form: sum_x |p(x) - q(x)|. Requires same support.
double l1_distance(const Distribution& p, const Distribution& q);

/// Kullback-Leibler divergence D(p||q) in nats.
///
/// Absolute continuity failures (q(x)=0 < p(x)) are not exceptional: they are
/// reported as an infinite-divergence result so callers can branch on it.
struct KlResult {
  bool finite;
  double nats;  // +infinity when !finite
};
KlResult kl_divergence(const Distribution& p, const Distribution& q);

/// Product distribution on the product label set, flattened row-major (p's
/// labels outer, q's inner). Product labels are "(a,b)" pairs.
Distribution tensor(const Distribution& p, const Distribution& q);

/// For a nonnegative random variable Z given by (weights, values) with
/// weights a probability vector: returns (E|Z - EZ|, sqrt(2 EZ) *
/// sqrt(E[Z ln Z] - EZ ln EZ)), with 0 ln 0 = 0 and the radicand clamped
/// at 0 against roundoff. The first component never exceeds the second;
/// this is the mean-absolute-deviation analogue of Pinsker's inequality.
std::pair<double, double> mean_abs_deviation_entropy_bound(const std::vector<double>& weights,
                                                           const std::vector<double>& values);

}  // namespace martvar
