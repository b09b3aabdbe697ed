#pragma once

#include <cmath>
#include <functional>

#include "todi/dist.hpp"
#include "todi/divergence.hpp"
#include "todi/matrix.hpp"
#include "todi/weighting.hpp"

namespace todi {

// Partial derivatives of the per-token divergences with respect to q_i,
// treating each q_i as a free coordinate.
double grad_fkl_q(double p, double q);
double grad_rkl_q(double p, double q);
double grad_jeffreys_q(double p, double q);
// alpha is a constant: the weight contributes no derivative of its own.
double grad_todi_q(double p, double q, double alpha);

// Log-space forms used by the matrix routines. Same values as above.
namespace kernel {

inline double d_fkl(double p, double q) { return -p / q; }
inline double d_rkl(double lp, double lq) { return (lq - lp) + 1.0; }
inline double d_js(double p, double q, double lq) { return 0.5 * (lq - std::log(0.5 * (p + q))); }
inline double d_tvd(double p, double q) { return q > p ? 0.5 : (q < p ? -0.5 : 0.0); }
inline double d_skl(double p, double q, double lambda) { return -p * (1.0 - lambda) / (lambda * p + (1.0 - lambda) * q); }
inline double d_srkl(double p, double q, double lq, double lambda) {
  const double m = (1.0 - lambda) * p + lambda * q;
  return (lq - std::log(m)) + 1.0 - lambda * q / m;
}

}  // namespace kernel

// Derivatives of a sequence loss: w.r.t. the student probabilities and, after
// the softmax chain rule, w.r.t. the student logits. Masked rows are zero.
struct GradMatrix {
  Matrix d_loss_d_q;
  Matrix d_loss_d_logits;
};

// dL/dq for `total_divergence(spec, p, q, mask, norm)`. For token-weighted
// kinds alpha is materialized first and then consumed as data.
Matrix divergence_grad_q(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q, const Mask& mask,
                         Normalization norm = Normalization::Sum);

// dL/dq for `weighted_total(weights, p, q, mask, norm)`.
Matrix weighted_grad_q(const TokenWeightMatrix& weights, const DistSeq& p, const DistSeq& q, const Mask& mask,
                       Normalization norm = Normalization::Sum);

// Softmax Jacobian per row: g_k = q_k * (u_k - sum_j q_j u_j).
Matrix chain_to_logits(const Matrix& d_loss_d_q, const DistSeq& q);

// Both gradient levels in one call.
GradMatrix divergence_gradient(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q, const Mask& mask,
                               Normalization norm = Normalization::Sum);

inline constexpr double kDefaultFdStep = 1e-6;

// Central differences (L(z + h e_k) - L(z - h e_k)) / 2h for every logit.
// step must lie in [1e-8, 1e-4]. Throws OracleFailure on a non-finite loss.
using LogitLoss = std::function<double(const Matrix&)>;
Matrix fd_oracle(const LogitLoss& loss, const LogitSeq& logits, double step = kDefaultFdStep);

}  // namespace todi
