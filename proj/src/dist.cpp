#include "todi/dist.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "todi/error.hpp"

namespace todi {

namespace {

const double kLogFloor = std::log(kProbFloor);

}  // namespace

VocabDist VocabDist::from_logits(std::span<const double> logits, double temperature) {
  if (logits.size() < 2) throw InvalidInput("softmax: vocabulary must have at least 2 entries");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw InvalidParameter("softmax: temperature must be finite and > 0");
  }
  double mx = -INFINITY;
  for (double z : logits) {
    if (!std::isfinite(z)) throw InvalidInput("softmax: non-finite logit");
    mx = std::max(mx, z);
  }
  const double inv_t = 1.0 / temperature;
  double sum = 0.0;
  for (double z : logits) sum += std::exp((z - mx) * inv_t);
  const double lse = std::log(sum);

  std::vector<double> lp(logits.size());
  std::vector<double> pr(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    lp[i] = std::max((logits[i] - mx) * inv_t - lse, kLogFloor);
    pr[i] = std::exp(lp[i]);
  }
  return VocabDist(std::move(pr), std::move(lp));
}

VocabDist VocabDist::from_probs(std::span<const double> probs) {
  if (probs.size() < 2) throw InvalidInput("distribution must have at least 2 entries");
  double sum = 0.0;
  for (double v : probs) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0 + 1e-9) {
      throw InvalidInput("probability out of range: " + std::to_string(v));
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw InvalidInput("probabilities sum to " + std::to_string(sum) + ", expected 1");
  }
  std::vector<double> pr(probs.begin(), probs.end());
  double clamped = 0.0;
  for (double& v : pr) {
    v = std::max(v, kProbFloor);
    clamped += v;
  }
  std::vector<double> lp(pr.size());
  const double log_total = std::log(clamped);
  for (std::size_t i = 0; i < pr.size(); ++i) {
    lp[i] = std::log(pr[i]) - log_total;
    pr[i] = std::exp(lp[i]);
  }
  return VocabDist(std::move(pr), std::move(lp));
}

VocabDist softmax(std::span<const double> row) { return VocabDist::from_logits(row); }

DistSeq softmax_rows(const Matrix& logits, double temperature) {
  DistSeq out;
  out.reserve(logits.rows());
  for (std::size_t t = 0; t < logits.rows(); ++t) {
    out.push_back(VocabDist::from_logits(logits.row(t), temperature));
  }
  return out;
}

ProbRatio log_ratio(const VocabDist& p, const VocabDist& q, std::size_t i) {
  if (i >= p.size() || i >= q.size()) throw InvalidInput("log_ratio: index out of range");
  return {p.log_prob(i) - q.log_prob(i)};
}

void check_shapes(const DistSeq& p, const DistSeq& q, const Mask& mask) {
  if (p.size() != q.size() || mask.size() != p.size()) {
    throw InvalidInput("shape mismatch: p has " + std::to_string(p.size()) + " rows, q has " +
                       std::to_string(q.size()) + ", mask has " + std::to_string(mask.size()));
  }
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (p[t].size() != q[t].size()) {
      throw InvalidInput("shape mismatch: vocabulary sizes differ at row " + std::to_string(t));
    }
  }
}

double pearson_correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidInput("pearson: samples differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw InvalidInput("pearson: need at least 2 values");
  // Two-pass: means first, then centred moments.
  double sum_a = 0.0;
  double sum_b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (!std::isfinite(a[k]) || !std::isfinite(b[k])) throw InvalidInput("pearson: non-finite value");
    sum_a += a[k];
    sum_b += b[k];
  }
  const double mean_a = sum_a / static_cast<double>(n);
  const double mean_b = sum_b / static_cast<double>(n);

  double cov = 0.0;
  double var_a = 0.0;
  double var_b = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double da = a[k] - mean_a;
    const double db = b[k] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  // Constant samples still leave round-off residue of order n * (eps * mean)^2.
  auto degenerate = [n](double var, double mean) {
    const double scale = 64.0 * 2.220446049250313e-16 * std::max(std::abs(mean), 1e-300);
    return var <= static_cast<double>(n) * scale * scale;
  };
  if (degenerate(var_a, mean_a) || degenerate(var_b, mean_b)) {
    throw DegenerateStatistic("pearson: zero variance");
  }
  return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

double pearson_similarity(const DistSeq& p, const DistSeq& q, const Mask& mask) {
  check_shapes(p, q, mask);
  std::vector<double> a;
  std::vector<double> b;
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    a.insert(a.end(), p[t].probs().begin(), p[t].probs().end());
    b.insert(b.end(), q[t].probs().begin(), q[t].probs().end());
  }
  return pearson_correlation(a, b);
}

}  // namespace todi
