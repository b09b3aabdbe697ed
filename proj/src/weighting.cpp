#include "todi/weighting.hpp"

#include "todi/error.hpp"

namespace todi {

double alpha(ProbRatio r, double beta) {
  if (!std::isfinite(beta)) throw InvalidParameter("alpha: beta must be finite (use step_weight for the limit)");
  if (!std::isfinite(r.log_r)) throw InvalidInput("alpha: non-finite log ratio");
  if (beta == 0.0) return 0.5;
  return stable_sigmoid(beta * r.log_r);
}

double step_alpha(ProbRatio r) {
  if (r.log_r > 0.0) return 1.0;
  if (r.log_r < 0.0) return 0.0;
  return 0.5;
}

TokenWeightMatrix alpha_matrix(const DistSeq& p, const DistSeq& q, double beta, const Mask& mask) {
  if (beta == kStepBeta) return step_weight(p, q, mask);
  if (!std::isfinite(beta)) throw InvalidParameter("alpha_matrix: beta must be finite or +inf");
  check_shapes(p, q, mask);
  const std::size_t cols = p.empty() ? 0 : p.front().size();
  TokenWeightMatrix w{Matrix(p.size(), cols, 0.5), beta};
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    if (p[t].size() != cols) throw InvalidInput("alpha_matrix: ragged vocabulary");
    for (std::size_t i = 0; i < cols; ++i) w.alpha(t, i) = alpha(log_ratio(p[t], q[t], i), beta);
  }
  return w;
}

TokenWeightMatrix step_weight(const DistSeq& p, const DistSeq& q) {
  return step_weight(p, q, Mask(p.size(), true));
}

TokenWeightMatrix step_weight(const DistSeq& p, const DistSeq& q, const Mask& mask) {
  check_shapes(p, q, mask);
  const std::size_t cols = p.empty() ? 0 : p.front().size();
  TokenWeightMatrix w{Matrix(p.size(), cols, 0.5), kStepBeta};
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    if (p[t].size() != cols) throw InvalidInput("step_weight: ragged vocabulary");
    for (std::size_t i = 0; i < cols; ++i) w.alpha(t, i) = step_alpha(log_ratio(p[t], q[t], i));
  }
  return w;
}

}  // namespace todi
