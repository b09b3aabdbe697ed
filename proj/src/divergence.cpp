#include "todi/divergence.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "todi/error.hpp"

namespace todi {

namespace {

struct KindName {
  Kind kind;
  std::string_view name;
};

constexpr std::array<KindName, 10> kKindNames{{
    {Kind::FKL, "fkl"},
    {Kind::RKL, "rkl"},
    {Kind::JS, "js"},
    {Kind::TVD, "tvd"},
    {Kind::SKL, "skl"},
    {Kind::SRKL, "srkl"},
    {Kind::FixedMix, "fixed_mix"},
    {Kind::Jeffreys, "jeffreys"},
    {Kind::ToDi, "todi"},
    {Kind::GeneralizedToDi, "generalized_todi"},
}};

void check_index(const VocabDist& p, const VocabDist& q, std::size_t i) {
  if (p.size() != q.size()) throw InvalidInput("vocabulary sizes differ");
  if (i >= p.size()) throw InvalidInput("token index out of range");
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw InvalidParameter("skew lambda must lie in (0, 1)");
}

// Sum of token contributions at one position, single pass over the vocabulary.
double position_total(const DivergenceSpec& spec, const VocabDist& p, const VocabDist& q) {
  const auto pp = p.probs();
  const auto lp = p.log_probs();
  const auto qq = q.probs();
  const auto lq = q.log_probs();
  const std::size_t v = pp.size();
  double acc = 0.0;
  switch (spec.kind) {
    case Kind::FKL:
      for (std::size_t i = 0; i < v; ++i) acc += kernel::fkl(pp[i], lp[i], qq[i], lq[i]);
      break;
    case Kind::RKL:
      for (std::size_t i = 0; i < v; ++i) acc += kernel::rkl(pp[i], lp[i], qq[i], lq[i]);
      break;
    case Kind::JS:
      for (std::size_t i = 0; i < v; ++i) acc += kernel::js(pp[i], lp[i], qq[i], lq[i]);
      break;
    case Kind::TVD:
      for (std::size_t i = 0; i < v; ++i) acc += kernel::tvd(pp[i], qq[i]);
      break;
    case Kind::SKL: {
      const double lambda = *spec.lambda;
      for (std::size_t i = 0; i < v; ++i) acc += kernel::skl(pp[i], lp[i], qq[i], lq[i], lambda);
      break;
    }
    case Kind::SRKL: {
      const double lambda = *spec.lambda;
      for (std::size_t i = 0; i < v; ++i) acc += kernel::srkl(pp[i], lp[i], qq[i], lq[i], lambda);
      break;
    }
    case Kind::FixedMix: {
      const double w = *spec.mix_ratio;
      for (std::size_t i = 0; i < v; ++i) acc += kernel::mix(w, pp[i], lp[i], qq[i], lq[i]);
      break;
    }
    case Kind::Jeffreys:
      for (std::size_t i = 0; i < v; ++i) acc += kernel::jeffreys(pp[i], lp[i], qq[i], lq[i]);
      break;
    case Kind::ToDi:
    case Kind::GeneralizedToDi: {
      const double beta = spec.weight_beta();
      for (std::size_t i = 0; i < v; ++i) {
        const ProbRatio r{lp[i] - lq[i]};
        const double a = beta == kStepBeta ? step_alpha(r) : alpha(r, beta);
        acc += kernel::mix(a, pp[i], lp[i], qq[i], lq[i]);
      }
      break;
    }
  }
  return acc;
}

double finish(double sum, std::size_t active, Normalization norm) {
  if (norm == Normalization::Mean) return active == 0 ? 0.0 : sum / static_cast<double>(active);
  return sum;
}

}  // namespace

DivergenceSpec DivergenceSpec::of(Kind kind) {
  DivergenceSpec s{kind, {}, {}, {}};
  switch (kind) {
    case Kind::SKL:
    case Kind::SRKL: s.lambda = kDefaultSkew; break;
    case Kind::FixedMix: s.mix_ratio = kDefaultMixRatio; break;
    case Kind::GeneralizedToDi: s.beta = kDefaultBeta; break;
    default: break;
  }
  return s;
}

void DivergenceSpec::validate() const {
  const bool wants_lambda = kind == Kind::SKL || kind == Kind::SRKL;
  const bool wants_mix = kind == Kind::FixedMix;
  const bool wants_beta = kind == Kind::GeneralizedToDi;
  const std::string label(to_string(kind));
  if (lambda.has_value() != wants_lambda) {
    throw InvalidParameter(wants_lambda ? label + " requires lambda" : "lambda does not apply to " + label);
  }
  if (mix_ratio.has_value() != wants_mix) {
    throw InvalidParameter(wants_mix ? label + " requires mix_ratio" : "mix_ratio does not apply to " + label);
  }
  if (beta.has_value() != wants_beta) {
    throw InvalidParameter(wants_beta ? label + " requires beta" : "beta does not apply to " + label);
  }
  if (lambda) check_lambda(*lambda);
  if (mix_ratio && !(*mix_ratio >= 0.0 && *mix_ratio <= 1.0)) {
    throw InvalidParameter("mix_ratio must lie in [0, 1]");
  }
  if (beta && !std::isfinite(*beta) && *beta != kStepBeta) {
    throw InvalidParameter("beta must be finite or +inf (step weight)");
  }
}

double DivergenceSpec::weight_beta() const {
  if (kind == Kind::GeneralizedToDi) return beta.value_or(kDefaultBeta);
  return kDefaultBeta;
}

std::string_view to_string(Kind kind) {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

Kind kind_from_string(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& kn : kKindNames) {
    if (kn.name == lower) return kn.kind;
  }
  std::string msg = "unsupported kind '" + std::string(name) + "'; supported kinds:";
  for (const auto& kn : kKindNames) msg += " " + std::string(kn.name);
  throw ConfigError(msg);
}

const std::vector<Kind>& all_kinds() {
  static const std::vector<Kind> kinds = [] {
    std::vector<Kind> out;
    for (const auto& kn : kKindNames) out.push_back(kn.kind);
    return out;
  }();
  return kinds;
}

std::string describe(const DivergenceSpec& spec) {
  auto num = [](double v) {
    if (v == kStepBeta) return std::string("inf");
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  std::string out(to_string(spec.kind));
  if (spec.lambda) out += "(lambda=" + num(*spec.lambda) + ")";
  if (spec.mix_ratio) out += "(mix_ratio=" + num(*spec.mix_ratio) + ")";
  if (spec.beta) out += "(beta=" + num(*spec.beta) + ")";
  return out;
}

double token_fkl(const VocabDist& p, const VocabDist& q, std::size_t i) {
  check_index(p, q, i);
  return kernel::fkl(p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i));
}

double token_rkl(const VocabDist& p, const VocabDist& q, std::size_t i) {
  check_index(p, q, i);
  return kernel::rkl(p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i));
}

double token_js(const VocabDist& p, const VocabDist& q, std::size_t i) {
  check_index(p, q, i);
  return kernel::js(p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i));
}

double token_tvd(const VocabDist& p, const VocabDist& q, std::size_t i) {
  check_index(p, q, i);
  return kernel::tvd(p.prob(i), q.prob(i));
}

double token_skl(const VocabDist& p, const VocabDist& q, std::size_t i, double lambda) {
  check_index(p, q, i);
  check_lambda(lambda);
  return kernel::skl(p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i), lambda);
}

double token_srkl(const VocabDist& p, const VocabDist& q, std::size_t i, double lambda) {
  check_index(p, q, i);
  check_lambda(lambda);
  return kernel::srkl(p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i), lambda);
}

double token_fixed_mix(const VocabDist& p, const VocabDist& q, std::size_t i, double mix_ratio) {
  check_index(p, q, i);
  if (!(mix_ratio >= 0.0 && mix_ratio <= 1.0)) throw InvalidParameter("mix_ratio must lie in [0, 1]");
  return kernel::mix(mix_ratio, p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i));
}

double token_jeffreys(const VocabDist& p, const VocabDist& q, std::size_t i) {
  check_index(p, q, i);
  return kernel::jeffreys(p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i));
}

double token_todi(const VocabDist& p, const VocabDist& q, std::size_t i, double beta) {
  check_index(p, q, i);
  const ProbRatio r = log_ratio(p, q, i);
  const double a = beta == kStepBeta ? step_alpha(r) : alpha(r, beta);
  return kernel::mix(a, p.prob(i), p.log_prob(i), q.prob(i), q.log_prob(i));
}

double token_divergence(const DivergenceSpec& spec, const VocabDist& p, const VocabDist& q, std::size_t i) {
  spec.validate();
  switch (spec.kind) {
    case Kind::FKL: return token_fkl(p, q, i);
    case Kind::RKL: return token_rkl(p, q, i);
    case Kind::JS: return token_js(p, q, i);
    case Kind::TVD: return token_tvd(p, q, i);
    case Kind::SKL: return token_skl(p, q, i, *spec.lambda);
    case Kind::SRKL: return token_srkl(p, q, i, *spec.lambda);
    case Kind::FixedMix: return token_fixed_mix(p, q, i, *spec.mix_ratio);
    case Kind::Jeffreys: return token_jeffreys(p, q, i);
    case Kind::ToDi:
    case Kind::GeneralizedToDi: return token_todi(p, q, i, spec.weight_beta());
  }
  throw InvalidInput("unknown divergence kind");
}

TokenLossMatrix token_loss_matrix(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q,
                                  const Mask& mask) {
  spec.validate();
  check_shapes(p, q, mask);
  const std::size_t cols = p.empty() ? 0 : p.front().size();
  TokenLossMatrix out{Matrix(p.size(), cols)};
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    if (p[t].size() != cols) throw InvalidInput("token_loss_matrix: ragged vocabulary");
    for (std::size_t i = 0; i < cols; ++i) out.values(t, i) = token_divergence(spec, p[t], q[t], i);
  }
  return out;
}

std::vector<double> position_totals(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q,
                                    const Mask& mask) {
  spec.validate();
  check_shapes(p, q, mask);
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (mask[t]) out[t] = position_total(spec, p[t], q[t]);
  }
  return out;
}

std::vector<double> weighted_position_totals(const TokenWeightMatrix& weights, const DistSeq& p, const DistSeq& q,
                                             const Mask& mask) {
  check_shapes(p, q, mask);
  if (weights.alpha.rows() != p.size()) throw InvalidInput("weighted totals: weight matrix has wrong row count");
  std::vector<double> out(p.size(), 0.0);
  for (std::size_t t = 0; t < p.size(); ++t) {
    if (!mask[t]) continue;
    if (weights.alpha.cols() != p[t].size()) throw InvalidInput("weighted totals: weight matrix has wrong width");
    const auto pp = p[t].probs();
    const auto lp = p[t].log_probs();
    const auto qq = q[t].probs();
    const auto lq = q[t].log_probs();
    const auto a = weights.alpha.row(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < pp.size(); ++i) acc += kernel::mix(a[i], pp[i], lp[i], qq[i], lq[i]);
    out[t] = acc;
  }
  return out;
}

namespace {

double reduce(const std::vector<double>& rows, const Mask& mask, Normalization norm) {
  double sum = 0.0;
  std::size_t active = 0;
  for (std::size_t t = 0; t < rows.size(); ++t) {
    if (!mask[t]) continue;
    sum += rows[t];
    ++active;
  }
  return finish(sum, active, norm);
}

}  // namespace

double total_divergence(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q, const Mask& mask,
                        Normalization norm) {
  return reduce(position_totals(spec, p, q, mask), mask, norm);
}

double weighted_total(const TokenWeightMatrix& weights, const DistSeq& p, const DistSeq& q, const Mask& mask,
                      Normalization norm) {
  return reduce(weighted_position_totals(weights, p, q, mask), mask, norm);
}

}  // namespace todi
