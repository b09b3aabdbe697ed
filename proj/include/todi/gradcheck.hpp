#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "todi/divergence.hpp"
#include "todi/gradients.hpp"

namespace todi {

// Pass criterion: |analytic - fd| <= max(kGradRelTol * |fd|, kGradAbsTol).
inline constexpr double kGradRelTol = 1e-5;
inline constexpr double kGradAbsTol = 1e-8;

struct GradcheckResult {
  std::string kind;
  double max_rel_err = 0.0;  // max |a - f| / max(|f|, kGradAbsTol / kGradRelTol)
  bool pass = false;
};

struct GradcheckOptions {
  int instances = 100;
  std::size_t positions = 8;
  std::size_t vocab = 32;
  std::uint64_t seed = 20240601;
  double step = kDefaultFdStep;
};

// Divergences exercised by the end-to-end check: every kind, plus the
// generalized weight at beta in {-1, 0, 2, inf}.
std::vector<DivergenceSpec> gradcheck_specs();

// Scalar loss of the logits for `spec`. Token-weighted kinds evaluate with
// `frozen` weights when given, otherwise with weights recomputed from the
// perturbed student.
double logit_loss(const DivergenceSpec& spec, const DistSeq& teacher, const Matrix& student_logits, const Mask& mask,
                  const TokenWeightMatrix* frozen = nullptr);

// Normalized error between an analytic and an oracle gradient; <= kGradRelTol
// means every entry passes.
double max_relative_error(const Matrix& analytic, const Matrix& oracle);

// The sequence loss is a sum of independent per-position terms, so dL/dz_{t,k}
// is the derivative of position t's term alone. Differencing each term on its
// own keeps the round-off of the other positions out of the quotient.
// Masked positions contribute nothing and come back as zero rows.
Matrix fd_oracle_by_position(const DivergenceSpec& spec, const DistSeq& teacher, const LogitSeq& student,
                             const TokenWeightMatrix* frozen, double step = kDefaultFdStep);

// Analytic logit gradients against the freeze-alpha finite-difference oracle on
// seeded random (positions x vocab) instances. Odd instances mask the last row.
GradcheckResult gradcheck(const DivergenceSpec& spec, const GradcheckOptions& options = {});
std::vector<GradcheckResult> gradcheck_all(const GradcheckOptions& options = {});

// {"instances": N, "seed": S, "pass": bool, "results": [{kind, max_rel_err, pass}, ...]}
std::string gradcheck_report_json(const std::vector<GradcheckResult>& results, const GradcheckOptions& options);

}  // namespace todi
