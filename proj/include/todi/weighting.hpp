#pragma once

#include <cmath>
#include <limits>

#include "todi/dist.hpp"
#include "todi/matrix.hpp"

namespace todi {

// Sentinel beta selecting the hard indicator weight (the beta -> inf limit).
inline constexpr double kStepBeta = std::numeric_limits<double>::infinity();

// Per-(t, i) mixing weights between forward and reverse KL.
//
// The matrix is materialized from p and q before any gradient is formed and
// is only ever read as data afterwards, so no derivative flows through it.
struct TokenWeightMatrix {
  Matrix alpha;
  double beta = 1.0;
  static constexpr bool grad_constant = true;
};

// Logistic function without overflow for large |x|.
inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// sigma(beta * log_r). beta may be negative (reversed weighting) or zero
// (fixed 1/2). Throws InvalidParameter for non-finite beta and InvalidInput
// for non-finite log_r.
double alpha(ProbRatio r, double beta);

// Indicator weight 1[p > q] with ties mapped to 1/2.
double step_alpha(ProbRatio r);

// Elementwise alpha over unmasked rows; masked rows hold 0.5. beta equal to
// kStepBeta dispatches to step_weight.
TokenWeightMatrix alpha_matrix(const DistSeq& p, const DistSeq& q, double beta, const Mask& mask);

TokenWeightMatrix step_weight(const DistSeq& p, const DistSeq& q);
TokenWeightMatrix step_weight(const DistSeq& p, const DistSeq& q, const Mask& mask);

}  // namespace todi
