#ifndef LOWRES_FILTER_MODEL_H_
#define LOWRES_FILTER_MODEL_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lowres/parallel_corpus.h"
#include "lowres/relevance.h"

namespace lowres {

// Logistic model over sparse features: P(parallel | f) = sigmoid(w.f + b).
struct FilterModel {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;

  double margin(const SparseVector& features) const;
  double prob_parallel(const SparseVector& features) const;

  std::string to_json() const;
  static FilterModel from_json(const std::string& text);
};

double sigmoid(double z);

struct LabeledFeatures {
  SparseVector features;
  int label = 1;  // 1 parallel, 0 misaligned
};

// Mean log-loss plus (l2 / 2) * |w|^2; the bias is not regularized.
class LogisticObjective {
 public:
  LogisticObjective(std::span<const LabeledFeatures> data, std::size_t dim, double l2)
      : data_(data), dim_(dim), l2_(l2) {}

  double loss(std::span<const double> w, double b) const;
  // Gradient over a subset of examples (all when `subset` is empty). The
  // regularizer is added once regardless of subset size.
  void gradient(std::span<const double> w, double b, std::span<const std::size_t> subset,
                std::vector<double>& grad_w, double& grad_b) const;

  std::size_t dim() const { return dim_; }

 private:
  std::span<const LabeledFeatures> data_;
  std::size_t dim_;
  double l2_;
};

struct TrainOptions {
  double l2 = 1e-4;
  std::size_t epochs = 100;
  double lr = 0.5;
  std::size_t batch_size = 32;
  std::uint64_t seed = 1;
};

struct TrainReport {
  FilterModel model;
  // Full-data loss after every epoch; non-increasing because an epoch that
  // raises the loss is rolled back and the learning rate halved.
  std::vector<double> loss_history;
};

// Mini-batch gradient descent with a seeded shuffle. Throws DegenerateLabels
// when one class is absent.
TrainReport train_filter(std::span<const LabeledFeatures> labeled,
                         std::vector<std::string> feature_names,
                         const TrainOptions& options = {});

struct FilterDecision {
  std::vector<std::size_t> kept;     // indices into the input
  std::vector<std::size_t> removed;
  std::vector<double> p_noisy;       // per input pair
};

// A pair is removed iff 1 - P(parallel) > threshold.
FilterDecision filter_parallel(std::span<const SentencePair> pairs, const FilterModel& model,
                               const Lexicon& lexicon, double threshold = 0.5,
                               unsigned threads = 1);

// Builds noisy training data from a clean corpus and fits the filter.
TrainReport train_filter_on_clean(std::span<const SentencePair> clean, const Lexicon& lexicon,
                                  double swap_rate, const TrainOptions& options);

}  // namespace lowres

#endif  // LOWRES_FILTER_MODEL_H_
