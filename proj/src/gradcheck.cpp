#include "todi/gradcheck.hpp"

#include <algorithm>
#include <optional>
#include <random>

#include <json.hpp>

namespace todi {

std::vector<DivergenceSpec> gradcheck_specs() {
  return {
      DivergenceSpec::of(Kind::FKL),
      DivergenceSpec::of(Kind::RKL),
      DivergenceSpec::of(Kind::JS),
      DivergenceSpec::of(Kind::TVD),
      DivergenceSpec::skl(kDefaultSkew),
      DivergenceSpec::srkl(kDefaultSkew),
      DivergenceSpec::fixed_mix(0.3),
      DivergenceSpec::of(Kind::Jeffreys),
      DivergenceSpec::of(Kind::ToDi),
      DivergenceSpec::generalized_todi(-1.0),
      DivergenceSpec::generalized_todi(0.0),
      DivergenceSpec::generalized_todi(2.0),
      DivergenceSpec::generalized_todi(kStepBeta),
  };
}

double logit_loss(const DivergenceSpec& spec, const DistSeq& teacher, const Matrix& student_logits, const Mask& mask,
                  const TokenWeightMatrix* frozen) {
  const DistSeq q = softmax_rows(student_logits);
  if (spec.token_weighted() && frozen) return weighted_total(*frozen, teacher, q, mask);
  return total_divergence(spec, teacher, q, mask);
}

double max_relative_error(const Matrix& analytic, const Matrix& oracle) {
  const double floor = kGradAbsTol / kGradRelTol;
  double worst = 0.0;
  for (std::size_t k = 0; k < analytic.data().size(); ++k) {
    const double a = analytic.data()[k];
    const double f = oracle.data()[k];
    worst = std::max(worst, std::abs(a - f) / std::max(std::abs(f), floor));
  }
  return worst;
}

Matrix fd_oracle_by_position(const DivergenceSpec& spec, const DistSeq& teacher, const LogitSeq& student,
                             const TokenWeightMatrix* frozen, double step) {
  const std::size_t rows = student.logits.rows();
  const std::size_t cols = student.logits.cols();
  Matrix out(rows, cols);
  for (std::size_t t = 0; t < rows; ++t) {
    if (!student.mask[t]) continue;
    const DistSeq p_row{teacher[t]};
    LogitSeq row{Matrix(1, cols), Mask{true}};
    std::copy(student.logits.row(t).begin(), student.logits.row(t).end(), row.logits.row(0).begin());
    std::optional<TokenWeightMatrix> w_row;
    if (frozen) {
      w_row = TokenWeightMatrix{Matrix(1, cols), frozen->beta};
      std::copy(frozen->alpha.row(t).begin(), frozen->alpha.row(t).end(), w_row->alpha.row(0).begin());
    }
    const TokenWeightMatrix* w_ptr = w_row ? &*w_row : nullptr;
    const Matrix g = fd_oracle([&](const Matrix& z) { return logit_loss(spec, p_row, z, row.mask, w_ptr); }, row, step);
    std::copy(g.row(0).begin(), g.row(0).end(), out.row(t).begin());
  }
  return out;
}

GradcheckResult gradcheck(const DivergenceSpec& spec, const GradcheckOptions& options) {
  GradcheckResult res{describe(spec), 0.0, true};
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> logit(0.0, 2.0);
  for (int n = 0; n < options.instances; ++n) {
    LogitSeq teacher_logits{Matrix(options.positions, options.vocab), Mask(options.positions, true)};
    LogitSeq student{Matrix(options.positions, options.vocab), Mask(options.positions, true)};
    for (double& z : teacher_logits.logits.data()) z = logit(rng);
    for (double& z : student.logits.data()) z = logit(rng);
    if (n % 2 == 1) student.mask.back() = false;

    const DistSeq p = softmax_rows(teacher_logits.logits);
    const DistSeq q = softmax_rows(student.logits);
    const Matrix analytic = divergence_gradient(spec, p, q, student.mask).d_loss_d_logits;

    std::optional<TokenWeightMatrix> frozen;
    if (spec.token_weighted()) frozen = alpha_matrix(p, q, spec.weight_beta(), student.mask);
    const Matrix oracle = fd_oracle_by_position(spec, p, student, frozen ? &*frozen : nullptr, options.step);
    res.max_rel_err = std::max(res.max_rel_err, max_relative_error(analytic, oracle));
  }
  res.pass = res.max_rel_err <= kGradRelTol;
  return res;
}

std::vector<GradcheckResult> gradcheck_all(const GradcheckOptions& options) {
  std::vector<GradcheckResult> out;
  for (const auto& spec : gradcheck_specs()) out.push_back(gradcheck(spec, options));
  return out;
}

std::string gradcheck_report_json(const std::vector<GradcheckResult>& results, const GradcheckOptions& options) {
  nlohmann::ordered_json j;
  j["instances"] = options.instances;
  j["seed"] = options.seed;
  bool all = true;
  j["results"] = nlohmann::ordered_json::array();
  for (const auto& r : results) {
    all = all && r.pass;
    j["results"].push_back({{"kind", r.kind}, {"max_rel_err", r.max_rel_err}, {"pass", r.pass}});
  }
  j["pass"] = all;
  return j.dump(2) + "\n";
}

}  // namespace todi
