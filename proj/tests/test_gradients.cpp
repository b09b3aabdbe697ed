#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "todi/error.hpp"
#include "todi/gradcheck.hpp"
#include "todi/gradients.hpp"

using namespace todi;

namespace {

LogitSeq random_logits(std::mt19937_64& rng, std::size_t t, std::size_t v) {
  std::normal_distribution<double> g(0.0, 2.0);
  LogitSeq s{Matrix(t, v), Mask(t, true)};
  for (double& z : s.logits.data()) z = g(rng);
  return s;
}

}  // namespace

TEST_CASE("scalar gradient examples") {
  CHECK(std::abs(grad_fkl_q(0.6, 0.2) + 3.0) <= 4.5e-16);
  CHECK(grad_fkl_q(0.3, 0.3) == -1.0);
  CHECK(std::abs(grad_rkl_q(0.6, 0.2) - (std::log(1.0 / 3.0) + 1.0)) < 1e-12);
  CHECK(grad_rkl_q(0.3, 0.3) == 1.0);
  CHECK(grad_jeffreys_q(0.3, 0.3) == 0.0);
  CHECK(std::abs(grad_jeffreys_q(0.6, 0.2) - (-3.0 + std::log(1.0 / 3.0) + 1.0)) < 1e-12);
}

TEST_CASE("todi gradient treats alpha as a constant") {
  CHECK(grad_todi_q(0.6, 0.2, 1.0) == grad_fkl_q(0.6, 0.2));
  CHECK(grad_todi_q(0.6, 0.2, 0.0) == grad_rkl_q(0.6, 0.2));
  const double g = grad_todi_q(0.6, 0.2, 0.75);
  CHECK(std::abs(g - (0.75 * -3.0 + 0.25 * (std::log(1.0 / 3.0) + 1.0))) < 1e-12);
  CHECK(std::abs(g - (-2.274653)) < 1e-6);
  CHECK(std::abs(g - grad_jeffreys_q(0.6, 0.2)) > 0.5);
}

TEST_CASE("matrix gradient matches the scalar forms") {
  const DistSeq p{VocabDist::from_probs(std::vector<double>{0.6, 0.4})};
  const DistSeq q{VocabDist::from_probs(std::vector<double>{0.2, 0.8})};
  const Mask m{true};
  const auto todi = divergence_grad_q(DivergenceSpec::of(Kind::ToDi), p, q, m);
  CHECK(std::abs(todi(0, 0) - grad_todi_q(0.6, 0.2, 0.75)) < 1e-12);
  CHECK(std::abs(todi(0, 1) - grad_todi_q(0.4, 0.8, 1.0 / 3.0)) < 1e-12);
  const auto jef = divergence_grad_q(DivergenceSpec::of(Kind::Jeffreys), p, q, m);
  CHECK(std::abs(jef(0, 0) - grad_jeffreys_q(0.6, 0.2)) < 1e-12);
  const auto mean = divergence_grad_q(DivergenceSpec::of(Kind::FKL), p, q, m, Normalization::Mean);
  CHECK(std::abs(mean(0, 0) + 3.0) < 1e-12);
}

TEST_CASE("chain rule") {
  const auto q = softmax_rows(Matrix(1, 4));
  Matrix u(1, 4);
  for (std::size_t k = 0; k < 4; ++k) u(0, k) = 2.5;
  const auto g = chain_to_logits(u, q);
  for (double x : g.data()) CHECK(std::abs(x) < 1e-15);

  Matrix bad(2, 4);
  CHECK_THROWS_AS(chain_to_logits(bad, q), InvalidInput);
}

TEST_CASE("masked rows have zero gradient") {
  std::mt19937_64 rng(21);
  auto t = random_logits(rng, 3, 5), s = random_logits(rng, 3, 5);
  s.mask[1] = false;
  const auto g = divergence_gradient(DivergenceSpec::of(Kind::ToDi), softmax_rows(t.logits), softmax_rows(s.logits),
                                     s.mask);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(g.d_loss_d_q(1, k) == 0.0);
    CHECK(g.d_loss_d_logits(1, k) == 0.0);
  }
}

TEST_CASE("fd_oracle on a quadratic") {
  std::mt19937_64 rng(22);
  const auto s = random_logits(rng, 3, 4);
  const LogitLoss sq = [](const Matrix& z) {
    double acc = 0.0;
    for (double x : z.data()) acc += x * x;
    return acc;
  };
  const auto g = fd_oracle(sq, s);
  for (std::size_t k = 0; k < g.data().size(); ++k) CHECK(std::abs(g.data()[k] - 2.0 * s.logits.data()[k]) < 1e-8);

  CHECK_THROWS_AS(fd_oracle(sq, s, 1e-2), InvalidParameter);
  const LogitLoss bad = [](const Matrix&) { return std::nan(""); };
  CHECK_THROWS_AS(fd_oracle(bad, s), OracleFailure);
}

TEST_CASE("analytic logit gradients match the oracle on random rows") {
  std::mt19937_64 rng(23);
  for (const auto& spec : gradcheck_specs()) {
    INFO(describe(spec));
    auto t = random_logits(rng, 4, 10), s = random_logits(rng, 4, 10);
    s.mask[3] = false;
    const auto p = softmax_rows(t.logits), q = softmax_rows(s.logits);
    const auto a = divergence_gradient(spec, p, q, s.mask).d_loss_d_logits;
    std::optional<TokenWeightMatrix> frozen;
    if (spec.token_weighted()) frozen = alpha_matrix(p, q, spec.weight_beta(), s.mask);
    const auto f = fd_oracle_by_position(spec, p, s, frozen ? &*frozen : nullptr);
    CHECK(max_relative_error(a, f) <= kGradRelTol);
    // The whole-sequence oracle is the same derivative, just noisier.
    const auto whole = fd_oracle(
        [&](const Matrix& z) { return logit_loss(spec, p, z, s.mask, frozen ? &*frozen : nullptr); }, s);
    CHECK(max_relative_error(a, whole) <= 1e-4);
  }
}

TEST_CASE("detaching alpha changes the gradient but not the value") {
  std::mt19937_64 rng(24);
  const auto t = random_logits(rng, 2, 8), s = random_logits(rng, 2, 8);
  const auto p = softmax_rows(t.logits), q = softmax_rows(s.logits);
  const auto todi = DivergenceSpec::of(Kind::ToDi), jef = DivergenceSpec::of(Kind::Jeffreys);
  CHECK(std::abs(total_divergence(todi, p, q, s.mask) - total_divergence(jef, p, q, s.mask)) < 1e-12);
  const auto gt = divergence_gradient(todi, p, q, s.mask).d_loss_d_logits;
  const auto gj = divergence_gradient(jef, p, q, s.mask).d_loss_d_logits;
  double diff = 0.0;
  for (std::size_t k = 0; k < gt.data().size(); ++k) diff = std::max(diff, std::abs(gt.data()[k] - gj.data()[k]));
  CHECK(diff > 1e-3);

  // Without freezing, the ToDi loss is Jeffreys, so its FD gradient is Jeffreys'.
  const auto live = fd_oracle([&](const Matrix& z) { return logit_loss(todi, p, z, s.mask); }, s);
  CHECK(max_relative_error(gj, live) <= 1e-4);
}

TEST_CASE("gradcheck report") {
  GradcheckOptions o;
  o.instances = 4;
  const auto results = gradcheck_all(o);
  CHECK(results.size() == gradcheck_specs().size());
  for (const auto& r : results) {
    INFO(r.kind);
    CHECK(r.pass);
  }
  const auto json = gradcheck_report_json(results, o);
  CHECK(json.find("\"pass\": true") != std::string::npos);
  CHECK(json.find("\"instances\": 4") != std::string::npos);
}
