#include "martvar/distribution.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>
#include <utility>

namespace martvar {

namespace {

void validate(const LabelSet& labels, const std::vector<double>& probs) {
  if (labels.size() != probs.size())
    throw std::invalid_argument("distribution: labels and probs differ in length");
  if (labels.empty()) throw std::invalid_argument("distribution: empty support");
  for (double v : probs) {
    if (!(v >= 0.0))  // catches negatives and NaN
      throw std::invalid_argument("distribution: negative or NaN probability");
  }
  double total = stable_sum(probs);
  if (std::abs(total - 1.0) > kSumTolerance)
    throw std::invalid_argument("distribution: mass sums to " + format_double(total) +
                                ", expected 1 within 1e-12");
  std::unordered_set<std::string> seen;
  seen.reserve(labels.size());
  for (const auto& l : labels) {
    if (!seen.insert(l).second)
      throw std::invalid_argument("distribution: duplicate label '" + l + "'");
  }
}

}  // namespace

Distribution::Distribution(LabelSet labels, std::vector<double> probs)
    : Distribution(std::make_shared<const LabelSet>(std::move(labels)), std::move(probs)) {}

Distribution::Distribution(LabelSetPtr labels, std::vector<double> probs)
    : labels_(std::move(labels)), probs_(std::move(probs)) {
  validate(*labels_, probs_);
}

Distribution Distribution::uniform(std::size_t d) {
  if (d == 0) throw std::invalid_argument("uniform: empty support");
  LabelSet labels(d);
  for (std::size_t i = 0; i < d; ++i) labels[i] = std::to_string(i);
  return Distribution(std::move(labels), std::vector<double>(d, 1.0 / static_cast<double>(d)));
}

Distribution Distribution::point_mass(LabelSetPtr labels, std::size_t index) {
  if (index >= labels->size()) throw std::invalid_argument("point_mass: index out of range");
  std::vector<double> probs(labels->size(), 0.0);
  probs[index] = 1.0;
  return Distribution(std::move(labels), std::move(probs));
}

bool Distribution::same_support(const Distribution& other) const {
  return labels_ == other.labels_ || *labels_ == *other.labels_;
}

Distribution Distribution::renormalized() const {
  double total = stable_sum(probs_);
  if (total <= 0.0) throw std::domain_error("renormalized: zero total mass");
  std::vector<double> probs = probs_;
  for (auto& v : probs) v /= total;
  return Distribution(labels_, std::move(probs));
}

nlohmann::json Distribution::to_json() const {
  return nlohmann::json{{"labels", *labels_}, {"probs", probs_}};
}

Distribution Distribution::from_json(const nlohmann::json& j) {
  return Distribution(j.at("labels").get<LabelSet>(), j.at("probs").get<std::vector<double>>());
}

double entropy(const Distribution& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) h -= v * std::log(v);
  }
  // Clamp the -0.0 that a pure point mass produces.
  return h <= 0.0 ? 0.0 : h;
}

double l1_distance(const Distribution& p, const Distribution& q) {
  if (!p.same_support(q)) throw std::domain_error("l1_distance: mismatched supports");
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
  return s;
}

KlResult kl_divergence(const Distribution& p, const Distribution& q) {
  if (!p.same_support(q)) throw std::domain_error("kl_divergence: mismatched supports");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;  // 0 log(0/q) = 0
    if (q[i] == 0.0) return {false, std::numeric_limits<double>::infinity()};
    d += p[i] * std::log(p[i] / q[i]);
  }
  return {true, d < 0.0 ? 0.0 : d};
}

std::pair<double, double> mean_abs_deviation_entropy_bound(const std::vector<double>& weights,
                                                           const std::vector<double>& values) {
  if (weights.size() != values.size() || weights.empty())
    throw std::invalid_argument("mean_abs_deviation_entropy_bound: bad input lengths");
  double wsum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mean_abs_deviation_entropy_bound: bad weight");
    wsum += w;
  }
  if (std::abs(wsum - 1.0) > 1e-9)
    throw std::invalid_argument("mean_abs_deviation_entropy_bound: weights must sum to 1");

  auto xlogx = [](double x) { return x > 0.0 ? x * std::log(x) : 0.0; };
  double mean = 0.0, mean_zlogz = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0))
      throw std::invalid_argument("mean_abs_deviation_entropy_bound: negative value");
    mean += weights[i] * values[i];
    mean_zlogz += weights[i] * xlogx(values[i]);
  }
  double lhs = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) lhs += weights[i] * std::abs(values[i] - mean);
  // E[Z ln Z] >= EZ ln EZ by convexity; tiny negative radicands are roundoff
  double radicand = mean_zlogz - xlogx(mean);
  if (radicand < 0.0) radicand = 0.0;
  double rhs = std::sqrt(2.0 * mean) * std::sqrt(radicand);
  return {lhs, rhs};
}

Distribution tensor(const Distribution& p, const Distribution& q) {
  const std::size_t np = p.size(), nq = q.size();
  LabelSet labels;
  labels.reserve(np * nq);
  std::vector<double> probs;
  probs.reserve(np * nq);
  for (std::size_t i = 0; i < np; ++i) {
    for (std::size_t j = 0; j < nq; ++j) {
      labels.push_back("(" + p.labels()[i] + "," + q.labels()[j] + ")");
      probs.push_back(p[i] * q[j]);
    }
  }
  return Distribution(std::move(labels), std::move(probs));
}

}  // namespace martvar
