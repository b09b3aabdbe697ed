#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "todi/matrix.hpp"

namespace todi {

// Probabilities are clamped below at this value before any logarithm.
inline constexpr double kProbFloor = 1e-12;

// A categorical distribution over a finite vocabulary. Log-probabilities are
// the source of truth; probs()[i] == exp(log_probs()[i]).
class VocabDist {
 public:
  // Max-shifted softmax of `logits / temperature`.
  static VocabDist from_logits(std::span<const double> logits, double temperature = 1.0);
  // Accepts an externally supplied probability vector (may contain exact
  // zeros); clamps at kProbFloor and renormalizes.
  static VocabDist from_probs(std::span<const double> probs);

  std::size_t size() const { return probs_.size(); }
  std::span<const double> probs() const { return probs_; }
  std::span<const double> log_probs() const { return log_probs_; }
  double prob(std::size_t i) const { return probs_[i]; }
  double log_prob(std::size_t i) const { return log_probs_[i]; }

  bool operator==(const VocabDist&) const = default;

 private:
  VocabDist(std::vector<double> probs, std::vector<double> log_probs)
      : probs_(std::move(probs)), log_probs_(std::move(log_probs)) {}

  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// One distribution per sequence position.
using DistSeq = std::vector<VocabDist>;

// Unnormalized student scores for a sequence plus the loss mask.
struct LogitSeq {
  Matrix logits;
  Mask mask;
};

// Natural log of r = p_i / q_i, always formed as a difference of logs.
struct ProbRatio {
  double log_r = 0.0;
};

VocabDist softmax(std::span<const double> row);

// Row-wise softmax of a logit matrix.
DistSeq softmax_rows(const Matrix& logits, double temperature = 1.0);

ProbRatio log_ratio(const VocabDist& p, const VocabDist& q, std::size_t i);

// Pearson correlation of two equal-length samples. Throws
// DegenerateStatistic when either side has zero variance.
double pearson_correlation(std::span<const double> a, std::span<const double> b);

// Pearson correlation of (p_{t,i}, q_{t,i}) over all unmasked (t, i) pairs.
// Throws DegenerateStatistic when either side has zero variance.
double pearson_similarity(const DistSeq& p, const DistSeq& q, const Mask& mask);

// Throws InvalidInput unless both sequences are T x V and mask has length T.
void check_shapes(const DistSeq& p, const DistSeq& q, const Mask& mask);

}  // namespace todi
