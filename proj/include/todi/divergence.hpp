#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "todi/dist.hpp"
#include "todi/matrix.hpp"
#include "todi/weighting.hpp"

namespace todi {

enum class Kind { FKL, RKL, JS, TVD, SKL, SRKL, FixedMix, Jeffreys, ToDi, GeneralizedToDi };

inline constexpr double kDefaultSkew = 0.1;
inline constexpr double kDefaultMixRatio = 0.5;
inline constexpr double kDefaultBeta = 1.0;

// Which divergence to compute and its parameters. A parameter is set exactly
// when the kind uses it: lambda for SKL/SRKL, mix_ratio for FixedMix, beta for
// GeneralizedToDi. ToDi is the beta = 1 member of the family.
struct DivergenceSpec {
  Kind kind = Kind::FKL;
  std::optional<double> lambda;
  std::optional<double> mix_ratio;
  std::optional<double> beta;

  // Fills the kind's parameter with its default.
  static DivergenceSpec of(Kind kind);
  static DivergenceSpec skl(double lambda) { return {Kind::SKL, lambda, {}, {}}; }
  static DivergenceSpec srkl(double lambda) { return {Kind::SRKL, lambda, {}, {}}; }
  static DivergenceSpec fixed_mix(double ratio) { return {Kind::FixedMix, {}, ratio, {}}; }
  static DivergenceSpec generalized_todi(double beta) { return {Kind::GeneralizedToDi, {}, {}, beta}; }

  // Throws InvalidParameter when the presence rules or ranges are violated.
  void validate() const;

  // True for kinds whose per-token weight comes from the weighting module.
  bool token_weighted() const { return kind == Kind::ToDi || kind == Kind::GeneralizedToDi; }
  // beta actually used by token-weighted kinds (1 for plain ToDi).
  double weight_beta() const;

  bool operator==(const DivergenceSpec&) const = default;
};

std::string_view to_string(Kind kind);
// Case-insensitive. Throws ConfigError naming every supported kind.
Kind kind_from_string(std::string_view name);
const std::vector<Kind>& all_kinds();
// Short label, e.g. "generalized_todi(beta=-1)".
std::string describe(const DivergenceSpec& spec);

enum class Normalization {
  Sum,   // plain double sum over t and i
  Mean,  // divided by the number of unmasked positions
};

// Scalar kernels on (p_i, ln p_i, q_i, ln q_i). All logarithms are taken from
// the supplied log-probabilities; no quotient of probabilities is ever logged.
namespace kernel {

inline double fkl(double p, double lp, double /*q*/, double lq) { return p * (lp - lq); }
inline double rkl(double /*p*/, double lp, double q, double lq) { return q * (lq - lp); }
inline double jeffreys(double p, double lp, double q, double lq) { return (p - q) * (lp - lq); }

inline double js(double p, double lp, double q, double lq) {
  const double lm = std::log(0.5 * (p + q));
  return 0.5 * p * (lp - lm) + 0.5 * q * (lq - lm);
}

inline double tvd(double p, double q) { return 0.5 * std::abs(p - q); }

inline double skl(double p, double lp, double q, double /*lq*/, double lambda) {
  return p * (lp - std::log(lambda * p + (1.0 - lambda) * q));
}

inline double srkl(double p, double /*lp*/, double q, double lq, double lambda) {
  return q * (lq - std::log((1.0 - lambda) * p + lambda * q));
}

inline double mix(double weight, double p, double lp, double q, double lq) {
  return weight * fkl(p, lp, q, lq) + (1.0 - weight) * rkl(p, lp, q, lq);
}

}  // namespace kernel

// Per-token contributions D^{(t,i)} at a single position.
double token_fkl(const VocabDist& p, const VocabDist& q, std::size_t i);
double token_rkl(const VocabDist& p, const VocabDist& q, std::size_t i);
double token_js(const VocabDist& p, const VocabDist& q, std::size_t i);
double token_tvd(const VocabDist& p, const VocabDist& q, std::size_t i);
double token_skl(const VocabDist& p, const VocabDist& q, std::size_t i, double lambda);
double token_srkl(const VocabDist& p, const VocabDist& q, std::size_t i, double lambda);
double token_fixed_mix(const VocabDist& p, const VocabDist& q, std::size_t i, double mix_ratio);
double token_jeffreys(const VocabDist& p, const VocabDist& q, std::size_t i);
// alpha * D_FKL + (1 - alpha) * D_RKL with alpha = sigma(beta * log r).
double token_todi(const VocabDist& p, const VocabDist& q, std::size_t i, double beta = kDefaultBeta);
// Dispatch on spec.kind.
double token_divergence(const DivergenceSpec& spec, const VocabDist& p, const VocabDist& q, std::size_t i);

// D^{(t,i)} for every position; masked rows are zero.
struct TokenLossMatrix {
  Matrix values;
};

TokenLossMatrix token_loss_matrix(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q,
                                  const Mask& mask);

// Per-position sums over the vocabulary (one entry per row, masked rows 0).
std::vector<double> position_totals(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q,
                                    const Mask& mask);
std::vector<double> weighted_position_totals(const TokenWeightMatrix& weights, const DistSeq& p, const DistSeq& q,
                                             const Mask& mask);

double total_divergence(const DivergenceSpec& spec, const DistSeq& p, const DistSeq& q, const Mask& mask,
                        Normalization norm = Normalization::Sum);

// Token-weighted total with caller-supplied weights held fixed. Used to
// evaluate the ToDi objective at perturbed students without recomputing alpha.
double weighted_total(const TokenWeightMatrix& weights, const DistSeq& p, const DistSeq& q, const Mask& mask,
                      Normalization norm = Normalization::Sum);

}  // namespace todi
