#include "todi/gradients.hpp"

#include <string>

#include "todi/error.hpp"

namespace todi {

double grad_fkl_q(double p, double q) { return kernel::d_fkl(p, q); }

double grad_rkl_q(double p, double q) { return kernel::d_rkl(std::log(p), std::log(q)); }

double grad_jeffreys_q(double p, double q) { return -p / q + std::log(q / p) + 1.0; }

double grad_todi_q(double p, double q, double alpha) {
  return alpha * grad_fkl_q(p, q) + (1.0 - alpha) * grad_rkl_q(p, q);
}

namespace {

std::size_t count_active(const Mask& mask) {
  std::size_t n = 0;
  for (bool m : mask) n += m ? 1 : 0;
  return n;
}

double row_scale(const Mask& mask, Normalization norm) {
  if (norm == Normalization::Sum) return 1.0;
  const std::size_t n = count_active(mask);
  return n == 0 ? 0.0 : 1.0 / static_cast<double>(n);
}

void fill_row(const DivergenceSpec& spec, const VocabDist& p, const VocabDist& q, std::span<double> out,
              double scale) {
  const auto pp = p.probs();
  const auto lp = p.log_probs();
  const auto qq = q.probs();
  const auto lq = q.log_probs();
  const std::size_t v = pp.size();
  switch (spec.kind) {
    case Kind::FKL:
      for (std::size_t i = 0; i < v; ++i) out[i] = scale * kernel::d_fkl(pp[i], qq[i]);
      break;
    case Kind::RKL:
      for (std::size_t i = 0; i < v; ++i) out[i] = scale * kernel::d_rkl(lp[i], lq[i]);
      break;
    case Kind::Jeffreys:
      for (std::size_t i = 0; i < v; ++i) {
        out[i] = scale * (kernel::d_fkl(pp[i], qq[i]) + kernel::d_rkl(lp[i], lq[i]));
      }
      break;
    case Kind::JS:
      for (std::size_t i = 0; i < v; ++i) out[i] = scale * kernel::d_js(pp[i], qq[i], lq[i]);
      break;
    case Kind::TVD:
      for (std::size_t i = 0; i < v; ++i) out[i] = scale * kernel::d_tvd(pp[i], qq[i]);
      break;
    case Kind::SKL: {
      const double lambda = *spec.lambda;
      for (std::size_t i = 0; i < v; ++i) out[i] = scale * kernel::d_skl(pp[i], qq[i], lambda);
      break;
    }
    case Kind::SRKL: {
      const double lambda = *spec.lambda;
      for (std::size_t i = 0; i < v; ++i) out[i] = scale * kernel::d_srkl(pp[i], qq[i], lq[i], lambda);
      break;
    }
    case Kind::FixedMix: {
      const double w = *spec.mix_ratio;
      for (std::size_t i = 0; i < v; ++i) {
        out[i] = scale * (w * kernel::d_fkl(pp[i], qq[i]) + (1.0 - w) * kernel::d_rkl(lp[i], lq[i]));
      }
      break;
    }
    case Kind::ToDi:
    case Kind::GeneralizedToDi:
      // Handled through a materialized weight matrix.
      throw InvalidInput("fill_row: token-weighted kinds need explicit weights");
  }
}

void fill_weighted_row(std::span<const double> a, const VocabDist& p, const VocabDist& q, std::span<double> out,
                       double scale) {
  const auto pp = p.probs();
  const auto lp = p.log_probs();
  const auto qq = q.probs();
  const auto lq = q.log_probs();
  for (std::size_t i = 0; i < pp.size(); ++i) {
    out[i] = scale * (a[i] * kernel::d_fkl(pp[i], qq[i]) + (1.0 - a[i]) * kernel::d_rkl(lp[i], lq[i]));
  }
}

std::size_t width(const DistSeq& p) { return p.empty() ? 0 : p.front().size(); }

}  // namespace

Matrix weighted_grad_q(const TokenWeightMatrix& weights, const DistSeq& p, const DistSeq& q, const Mask& mask,
                       Normalization norm) {
  check_shapes(p, q, mask);
  const std::size_t cols = width(p);
  if (weights.alpha.rows() != p.size() || weights.alpha.cols() != cols) {
    throw InvalidInput("weighted_grad_q: weight matrix shape mismatch");
  }
  const double scale = row_scale(mask, norm);
  Matrix g(p.size(), cols);
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    if (p[t].size() != cols) throw InvalidInput("weighted_grad_q: ragged vocabulary");
    fill_weighted_row(weights.alpha.row(t), p[t], q[t], g.row(t), scale);
  }
  return g;
}

Matrix divergence_grad_q(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q, const Mask& mask,
                         Normalization norm) {
  spec.validate();
  if (spec.token_weighted()) {
    const TokenWeightMatrix w = alpha_matrix(p, q, spec.weight_beta(), mask);
    return weighted_grad_q(w, p, q, mask, norm);
  }
  check_shapes(p, q, mask);
  const std::size_t cols = width(p);
  const double scale = row_scale(mask, norm);
  Matrix g(p.size(), cols);
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    if (p[t].size() != cols) throw InvalidInput("divergence_grad_q: ragged vocabulary");
    fill_row(spec, p[t], q[t], g.row(t), scale);
  }
  return g;
}

Matrix chain_to_logits(const Matrix& d_loss_d_q, const DistSeq& q) {
  if (d_loss_d_q.rows() != q.size()) throw InvalidInput("chain_to_logits: row count mismatch");
  Matrix g(d_loss_d_q.rows(), d_loss_d_q.cols());
  for (std::size_t t = 0; t < q.size(); ++t) {
    if (q[t].size() != d_loss_d_q.cols()) throw InvalidInput("chain_to_logits: vocabulary mismatch");
    const auto u = d_loss_d_q.row(t);
    const auto qq = q[t].probs();
    double dot = 0.0;
    for (std::size_t j = 0; j < qq.size(); ++j) dot += qq[j] * u[j];
    auto out = g.row(t);
    for (std::size_t k = 0; k < qq.size(); ++k) out[k] = qq[k] * (u[k] - dot);
  }
  return g;
}

GradMatrix divergence_gradient(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q, const Mask& mask,
                               Normalization norm) {
  Matrix dq = divergence_grad_q(spec, p, q, mask, norm);
  Matrix dz = chain_to_logits(dq, q);
  // A masked row of dq is already zero, and so is its image under the Jacobian.
  return {std::move(dq), std::move(dz)};
}

Matrix fd_oracle(const LogitLoss& loss, const LogitSeq& logits, double step) {
  if (!(step >= 1e-8 && step <= 1e-4)) throw InvalidParameter("fd_oracle: step must lie in [1e-8, 1e-4]");
  Matrix z = logits.logits;
  Matrix g(z.rows(), z.cols());
  for (std::size_t t = 0; t < z.rows(); ++t) {
    for (std::size_t k = 0; k < z.cols(); ++k) {
      const double saved = z(t, k);
      z(t, k) = saved + step;
      const double up = loss(z);
      z(t, k) = saved - step;
      const double down = loss(z);
      z(t, k) = saved;
      if (!std::isfinite(up) || !std::isfinite(down)) {
        throw OracleFailure("fd_oracle: non-finite loss at (" + std::to_string(t) + ", " + std::to_string(k) + ")");
      }
      g(t, k) = (up - down) / (2.0 * step);
    }
  }
  return g;
}

}  // namespace todi
