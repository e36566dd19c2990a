#include "lowres/filter_model.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "lowres/concurrency.h"
#include "lowres/error.h"
#include "lowres/rng.h"

namespace lowres {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sparse_dot(std::span<const double> w, const SparseVector& x) {
  double z = 0.0;
  for (const auto& [id, v] : x.entries())
    if (id < w.size()) z += w[id] * v;
  return z;
}

}  // namespace

double FilterModel::margin(const SparseVector& features) const {
  return sparse_dot(weights, features) + bias;
}

double FilterModel::prob_parallel(const SparseVector& features) const {
  return sigmoid(margin(features));
}

std::string FilterModel::to_json() const {
  nlohmann::ordered_json j;
  j["feature_names"] = feature_names;
  j["weights"] = weights;
  j["bias"] = bias;
  return j.dump(2);
}

FilterModel FilterModel::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("filter model: ") + e.what());
  }
  FilterModel m;
  try {
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.weights = j.at("weights").get<std::vector<double>>();
    m.bias = j.at("bias").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("filter model: ") + e.what());
  }
  if (m.feature_names.size() != m.weights.size())
    throw ParseError("filter model: feature_names and weights differ in length");
  for (double w : m.weights)
    if (!std::isfinite(w)) throw ParseError("filter model: non-finite weight");
  if (!std::isfinite(m.bias)) throw ParseError("filter model: non-finite bias");
  return m;
}

double LogisticObjective::loss(std::span<const double> w, double b) const {
  double sum = 0.0;
  for (const auto& ex : data_) {
    const double z = sparse_dot(w, ex.features) + b;
    sum += softplus(z) - (ex.label ? z : 0.0);
  }
  double reg = 0.0;
  for (double x : w) reg += x * x;
  return sum / static_cast<double>(data_.size()) + 0.5 * l2_ * reg;
}

void LogisticObjective::gradient(std::span<const double> w, double b,
                                 std::span<const std::size_t> subset,
                                 std::vector<double>& grad_w, double& grad_b) const {
  grad_w.assign(dim_, 0.0);
  grad_b = 0.0;
  auto accumulate = [&](const LabeledFeatures& ex) {
    const double z = sparse_dot(w, ex.features) + b;
    const double r = sigmoid(z) - static_cast<double>(ex.label);
    for (const auto& [id, v] : ex.features.entries())
      if (id < dim_) grad_w[id] += r * v;
    grad_b += r;
  };
  std::size_t n;
  if (subset.empty()) {
    for (const auto& ex : data_) accumulate(ex);
    n = data_.size();
  } else {
    for (std::size_t i : subset) accumulate(data_[i]);
    n = subset.size();
  }
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < dim_; ++k) grad_w[k] = grad_w[k] * inv + l2_ * w[k];
  grad_b *= inv;
}

TrainReport train_filter(std::span<const LabeledFeatures> labeled,
                         std::vector<std::string> feature_names,
                         const TrainOptions& options) {
  std::size_t positives = 0;
  for (const auto& ex : labeled) positives += ex.label ? 1 : 0;
  if (positives == 0 || positives == labeled.size())
    throw DegenerateLabels("training data needs both parallel and misaligned examples");
  if (options.batch_size == 0) throw InvalidArgument("batch_size must be positive");

  const std::size_t dim = feature_names.size();
  LogisticObjective objective(labeled, dim, options.l2);
  std::vector<double> w(dim, 0.0), grad;
  double b = 0.0, grad_b = 0.0;
  double lr = options.lr;
  double current = objective.loss(w, b);

  TrainReport report;
  std::vector<std::size_t> order(labeled.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(options.seed);
  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform(i)]);
    std::vector<double> w_next = w;
    double b_next = b;
    for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
      const std::size_t stop = std::min(order.size(), start + options.batch_size);
      objective.gradient(w_next, b_next,
                         std::span<const std::size_t>(order.data() + start, stop - start),
                         grad, grad_b);
      for (std::size_t k = 0; k < dim; ++k) w_next[k] -= lr * grad[k];
      b_next -= lr * grad_b;
    }
    const double next = objective.loss(w_next, b_next);
    if (next <= current) {
      w = std::move(w_next);
      b = b_next;
      current = next;
    } else {
      lr *= 0.5;
    }
    report.loss_history.push_back(current);
  }
  report.model.feature_names = std::move(feature_names);
  report.model.weights = std::move(w);
  report.model.bias = b;
  return report;
}

FilterDecision filter_parallel(std::span<const SentencePair> pairs, const FilterModel& model,
                               const Lexicon& lexicon, double threshold, unsigned threads) {
  const Lexicon inverse = lexicon.inverted();
  FilterDecision d;
  d.p_noisy.resize(pairs.size());
  parallel_for(pairs.size(), threads, [&](std::size_t i) {
    d.p_noisy[i] = 1.0 - model.prob_parallel(pair_features(pairs[i], lexicon, inverse));
  });
  for (std::size_t i = 0; i < pairs.size(); ++i)
    (d.p_noisy[i] > threshold ? d.removed : d.kept).push_back(i);
  return d;
}

TrainReport train_filter_on_clean(std::span<const SentencePair> clean, const Lexicon& lexicon,
                                  double swap_rate, const TrainOptions& options) {
  const auto noisy = make_noisy_training(clean, swap_rate, options.seed);
  const Lexicon inverse = lexicon.inverted();
  std::vector<LabeledFeatures> data;
  data.reserve(noisy.size());
  for (const auto& lp : noisy)
    data.push_back({pair_features(lp.pair, lexicon, inverse), lp.label});
  return train_filter(data, pair_feature_names(), options);
}

}  // namespace lowres
