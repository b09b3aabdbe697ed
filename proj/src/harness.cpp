#include "todi/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <random>
#include <thread>

#include "todi/gradients.hpp"
#include "todi/io.hpp"

namespace todi::harness {

// ---------------------------------------------------------------------------
// TinyLM

std::size_t TinyLM::contexts() const {
  std::size_t n = 1;
  for (int j = 0; j < order; ++j) n *= static_cast<std::size_t>(vocab);
  return n;
}

std::span<double> TinyLM::row(std::size_t ctx) {
  return {table.data() + ctx * static_cast<std::size_t>(vocab), static_cast<std::size_t>(vocab)};
}

std::span<const double> TinyLM::row(std::size_t ctx) const {
  return {table.data() + ctx * static_cast<std::size_t>(vocab), static_cast<std::size_t>(vocab)};
}

VocabDist TinyLM::conditional(std::size_t ctx) const { return VocabDist::from_logits(row(ctx), temperature); }

DistSeq TinyLM::all_conditionals() const {
  DistSeq out;
  out.reserve(contexts());
  for (std::size_t c = 0; c < contexts(); ++c) out.push_back(conditional(c));
  return out;
}

std::size_t TinyLM::context_at(std::span<const int> tokens, std::size_t pos) const {
  std::size_t ctx = 0;
  for (std::size_t j = pos - static_cast<std::size_t>(order); j < pos; ++j) {
    ctx = ctx * static_cast<std::size_t>(vocab) + static_cast<std::size_t>(tokens[j]);
  }
  return ctx;
}

TinyLM make_student(int vocab, int order, double temperature) {
  if (vocab < 2 || order < 0) throw InvalidParameter("student needs vocab >= 2 and order >= 0");
  TinyLM m{order, vocab, temperature, {}};
  m.table.assign(m.contexts() * static_cast<std::size_t>(vocab), 0.0);
  return m;
}

// ---------------------------------------------------------------------------
// Teachers

namespace {

constexpr std::array<std::pair<TeacherKind, std::string_view>, 3> kTeacherKinds{{
    {TeacherKind::MixtureMarkov, "mixture_markov"},
    {TeacherKind::RandomSparse, "random_sparse"},
    {TeacherKind::Peaked, "peaked"},
}};

bool has_multimodal_context(const TinyLM& m) {
  for (std::size_t c = 0; c < m.contexts(); ++c) {
    const VocabDist d = m.conditional(c);
    int big = 0;
    for (double v : d.probs()) big += v >= 0.2 ? 1 : 0;
    if (big >= 2) return true;
  }
  return false;
}

bool all_peaked(const TinyLM& m) {
  for (std::size_t c = 0; c < m.contexts(); ++c) {
    const VocabDist d = m.conditional(c);
    if (*std::max_element(d.probs().begin(), d.probs().end()) < 0.9) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(TeacherKind k) {
  for (const auto& [kind, name] : kTeacherKinds) {
    if (kind == k) return name;
  }
  return "unknown";
}

TeacherKind teacher_kind_from_string(std::string_view s) {
  for (const auto& [kind, name] : kTeacherKinds) {
    if (name == s) return kind;
  }
  throw ConfigError("unknown teacher_kind '" + std::string(s) + "'; expected mixture_markov, random_sparse or peaked");
}

TinyLM make_teacher(TeacherKind kind, int vocab, int order, std::uint64_t seed) {
  if (vocab < 8) throw InvalidParameter("teacher needs vocab >= 8");
  if (order < 0 || order > 2) throw InvalidParameter("teacher order must be 0, 1 or 2");
  TinyLM m = make_student(vocab, order);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, vocab - 1);
  const double log_v = std::log(static_cast<double>(vocab));

  switch (kind) {
    case TeacherKind::MixtureMarkov: {
      // Each context mixes two preferred successors over a noisy background.
      std::normal_distribution<double> noise(0.0, 0.5);
      const double boost = log_v + 0.5;
      for (std::size_t c = 0; c < m.contexts(); ++c) {
        auto r = m.row(c);
        for (double& z : r) z = noise(rng);
        const int a = pick(rng);
        int b = pick(rng);
        while (b == a) b = pick(rng);
        r[static_cast<std::size_t>(a)] += boost;
        r[static_cast<std::size_t>(b)] += boost;
      }
      break;
    }
    case TeacherKind::RandomSparse: {
      // Mass concentrated on a few random successors per context.
      std::normal_distribution<double> support_logit(0.0, 1.0);
      const int support = std::max(3, vocab / 4);
      for (int attempt = 0;; ++attempt) {
        for (std::size_t c = 0; c < m.contexts(); ++c) {
          auto r = m.row(c);
          std::fill(r.begin(), r.end(), -log_v);
          for (int s = 0; s < support; ++s) r[static_cast<std::size_t>(pick(rng))] = log_v + support_logit(rng);
        }
        if (has_multimodal_context(m)) break;
        if (attempt >= 100) throw InvalidParameter("random_sparse: could not produce a multimodal context");
      }
      break;
    }
    case TeacherKind::Peaked: {
      std::normal_distribution<double> noise(0.0, 0.1);
      // exp(0.4) bounds the background weight, so the peak keeps >= 0.9.
      const double boost = std::log(9.0 * std::exp(0.4) * static_cast<double>(vocab - 1));
      for (std::size_t c = 0; c < m.contexts(); ++c) {
        auto r = m.row(c);
        for (double& z : r) z = std::clamp(noise(rng), -0.4, 0.4);
        r[static_cast<std::size_t>(pick(rng))] += boost + 0.8;
      }
      if (!all_peaked(m)) throw InvalidParameter("peaked: construction missed the 0.9 target");
      return m;
    }
  }
  if (!has_multimodal_context(m)) throw InvalidParameter("teacher has no multimodal context for this vocab");
  return m;
}

// ---------------------------------------------------------------------------
// Corpus

namespace {

int sample_token(const VocabDist& d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double x = u(rng);
  double acc = 0.0;
  const auto pr = d.probs();
  for (std::size_t i = 0; i < pr.size(); ++i) {
    acc += pr[i];
    if (x < acc) return static_cast<int>(i);
  }
  return static_cast<int>(pr.size() - 1);
}

}  // namespace

Corpus sample_corpus(const TinyLM& teacher, int n_seq, int seq_len, std::uint64_t seed) {
  if (n_seq < 1) throw InvalidParameter("n_seq must be >= 1");
  if (seq_len < teacher.order + 1) throw InvalidParameter("seq_len must be >= order + 1");
  const DistSeq cond = teacher.all_conditionals();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> start(0, teacher.vocab - 1);
  Corpus corpus;
  corpus.sequences.reserve(static_cast<std::size_t>(n_seq));
  for (int s = 0; s < n_seq; ++s) {
    Sequence seq(static_cast<std::size_t>(seq_len));
    for (int t = 0; t < teacher.order; ++t) seq[static_cast<std::size_t>(t)] = start(rng);
    for (std::size_t t = static_cast<std::size_t>(teacher.order); t < seq.size(); ++t) {
      seq[t] = sample_token(cond[teacher.context_at(seq, t)], rng);
    }
    corpus.sequences.push_back(std::move(seq));
  }
  return corpus;
}

std::vector<double> stationary_unigram(const TinyLM& model) {
  const DistSeq cond = model.all_conditionals();
  const std::size_t n_ctx = model.contexts();
  const auto v = static_cast<std::size_t>(model.vocab);
  if (model.order == 0) return {cond[0].probs().begin(), cond[0].probs().end()};

  // Power iteration on the context chain: (a_1..a_k) -> (a_2..a_k, x).
  std::vector<double> pi(n_ctx, 1.0 / static_cast<double>(n_ctx));
  std::vector<double> next(n_ctx);
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t c = 0; c < n_ctx; ++c) {
      const std::size_t shifted = (c * v) % n_ctx;
      const auto pr = cond[c].probs();
      for (std::size_t x = 0; x < v; ++x) next[shifted + x] += pi[c] * pr[x];
    }
    double delta = 0.0;
    for (std::size_t c = 0; c < n_ctx; ++c) delta += std::abs(next[c] - pi[c]);
    pi.swap(next);
    if (delta < 1e-15) break;
  }
  std::vector<double> unigram(v, 0.0);
  for (std::size_t c = 0; c < n_ctx; ++c) {
    const auto pr = cond[c].probs();
    for (std::size_t x = 0; x < v; ++x) unigram[x] += pi[c] * pr[x];
  }
  return unigram;
}

// ---------------------------------------------------------------------------
// Training

namespace {

constexpr std::array<std::pair<OptimizerKind, std::string_view>, 2> kOptimizers{{
    {OptimizerKind::SGD, "sgd"},
    {OptimizerKind::Adam, "adam"},
}};

}  // namespace

std::string_view to_string(OptimizerKind k) {
  for (const auto& [kind, name] : kOptimizers) {
    if (kind == k) return name;
  }
  return "unknown";
}

OptimizerKind optimizer_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  for (const auto& [kind, name] : kOptimizers) {
    if (name == lower) return kind;
  }
  throw ConfigError("unknown optimizer '" + std::string(s) + "'; expected sgd or adam");
}

void TrainConfig::validate() const {
  spec.validate();
  if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidParameter("lr must be > 0");
  if (epochs < 1) throw InvalidParameter("epochs must be >= 1");
  if (!(ce_mix >= 0.0 && ce_mix <= 1.0)) throw InvalidParameter("ce_mix must lie in [0, 1]");
  if (batch_size < 1) throw InvalidParameter("batch_size must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InvalidParameter("adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw InvalidParameter("adam_eps must be > 0");
  if (!(temperature > 0.0) || !std::isfinite(temperature)) throw InvalidParameter("temperature must be > 0");
  if (teacher_vocab < 8) throw InvalidParameter("teacher_vocab must be >= 8");
  if (teacher_order < 0 || teacher_order > 2) throw InvalidParameter("teacher_order must be 0, 1 or 2");
  if (n_seq < 1) throw InvalidParameter("n_seq must be >= 1");
  if (seq_len < teacher_order + 1) throw InvalidParameter("seq_len must be >= teacher_order + 1");
}

BatchObjective batch_objective(const TinyLM& student, const DistSeq& teacher_conditionals, const Corpus& corpus,
                               std::span<const std::size_t> sequence_ids, const TrainConfig& config,
                               const TokenWeightMatrix* frozen) {
  const std::size_t n_ctx = student.contexts();
  const auto v = static_cast<std::size_t>(student.vocab);
  if (teacher_conditionals.size() != n_ctx) throw InvalidInput("teacher and student contexts differ");

  // Positions sharing a context share p and q, so both losses reduce to
  // per-context counts: how often each context occurs and which token follows.
  std::vector<double> ctx_count(n_ctx, 0.0);
  Matrix next_count(n_ctx, v);
  std::size_t positions = 0;
  for (std::size_t id : sequence_ids) {
    const Sequence& seq = corpus.sequences.at(id);
    for (std::size_t t = static_cast<std::size_t>(student.order); t < seq.size(); ++t) {
      const std::size_t c = student.context_at(seq, t);
      ctx_count[c] += 1.0;
      next_count(c, static_cast<std::size_t>(seq[t])) += 1.0;
      ++positions;
    }
  }
  BatchObjective out;
  out.grad.assign(student.table.size(), 0.0);
  if (positions == 0) return out;
  const double inv_n = 1.0 / static_cast<double>(positions);

  const DistSeq q = student.all_conditionals();
  Mask mask(n_ctx);
  for (std::size_t c = 0; c < n_ctx; ++c) mask[c] = ctx_count[c] > 0.0;

  // Knowledge-distillation term.
  const DivergenceSpec& spec = config.spec;
  std::vector<double> kd_rows;
  Matrix kd_dq;
  if (spec.token_weighted()) {
    out.weights = frozen ? *frozen : alpha_matrix(teacher_conditionals, q, spec.weight_beta(), mask);
    kd_rows = weighted_position_totals(out.weights, teacher_conditionals, q, mask);
    kd_dq = weighted_grad_q(out.weights, teacher_conditionals, q, mask);
  } else {
    kd_rows = position_totals(spec, teacher_conditionals, q, mask);
    kd_dq = divergence_grad_q(spec, teacher_conditionals, q, mask);
  }
  for (std::size_t c = 0; c < n_ctx; ++c) {
    const double w = ctx_count[c] * inv_n;
    out.kd += w * kd_rows[c];
    for (double& g : kd_dq.row(c)) g *= w;
  }
  const Matrix kd_dz = chain_to_logits(kd_dq, q);

  // Cross-entropy on the sampled next tokens: d/dz = count * q - histogram.
  const double ce_w = config.ce_mix;
  const double kd_w = 1.0 - config.ce_mix;
  const double inv_temp = 1.0 / student.temperature;
  for (std::size_t c = 0; c < n_ctx; ++c) {
    if (!mask[c]) continue;
    const auto lq = q[c].log_probs();
    const auto qq = q[c].probs();
    auto g = std::span<double>(out.grad).subspan(c * v, v);
    for (std::size_t x = 0; x < v; ++x) {
      const double hist = next_count(c, x);
      out.ce -= hist * lq[x] * inv_n;
      const double d_ce = (ctx_count[c] * qq[x] - hist) * inv_n;
      g[x] = (ce_w * d_ce + kd_w * kd_dz(c, x)) * inv_temp;
    }
  }
  out.loss = ce_w * out.ce + kd_w * out.kd;
  return out;
}

EpochRecord evaluate(const TinyLM& student, const TinyLM& teacher, const Corpus& corpus, const TrainConfig& config) {
  const DistSeq p = teacher.all_conditionals();
  const DistSeq q = student.all_conditionals();
  const Mask all(p.size(), true);
  std::vector<std::size_t> ids(corpus.sequences.size());
  std::iota(ids.begin(), ids.end(), std::size_t{0});
  EpochRecord rec;
  rec.train_loss = batch_objective(student, p, corpus, ids, config).loss;
  rec.fkl_to_teacher = total_divergence(DivergenceSpec::of(Kind::FKL), p, q, all, Normalization::Mean);
  rec.rkl_to_teacher = total_divergence(DivergenceSpec::of(Kind::RKL), p, q, all, Normalization::Mean);
  try {
    rec.pearson = pearson_similarity(p, q, all);
  } catch (const DegenerateStatistic&) {
    // A uniform student has no variance to correlate with.
    rec.pearson = 0.0;
  }
  return rec;
}

namespace {

bool finite(const EpochRecord& r) {
  return std::isfinite(r.train_loss) && std::isfinite(r.fkl_to_teacher) && std::isfinite(r.rkl_to_teacher) &&
         std::isfinite(r.pearson);
}

class Optimizer {
 public:
  Optimizer(const TrainConfig& c, std::size_t n) : cfg_(c), m_(n, 0.0), v_(n, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grad) {
    if (cfg_.optimizer == OptimizerKind::SGD) {
      for (std::size_t k = 0; k < params.size(); ++k) params[k] -= cfg_.lr * grad[k];
      return;
    }
    ++t_;
    const double b1 = cfg_.adam_beta1;
    const double b2 = cfg_.adam_beta2;
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
      m_[k] = b1 * m_[k] + (1.0 - b1) * grad[k];
      v_[k] = b2 * v_[k] + (1.0 - b2) * grad[k] * grad[k];
      const double m_hat = m_[k] / c1;
      const double v_hat = v_[k] / c2;
      params[k] -= cfg_.lr * m_hat / (std::sqrt(v_hat) + cfg_.adam_eps);
    }
  }

 private:
  const TrainConfig& cfg_;
  std::vector<double> m_;
  std::vector<double> v_;
  long long t_ = 0;
};

}  // namespace

TrainRun train(TinyLM student_init, const TinyLM& teacher, const Corpus& corpus, const TrainConfig& config) {
  config.validate();
  if (student_init.vocab != teacher.vocab || student_init.order != teacher.order) {
    throw InvalidInput("student and teacher must share vocabulary size and context order");
  }
  TrainRun run{config, {}, {}, std::move(student_init)};
  TinyLM& student = run.final_student;
  const DistSeq p = teacher.all_conditionals();
  Optimizer opt(config, student.table.size());

  std::vector<std::size_t> order(corpus.sequences.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  const auto batch = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochRecord rec = evaluate(student, teacher, corpus, config);
    rec.epoch = epoch;
    if (!finite(rec)) throw TrainingAborted("non-finite metrics at epoch " + std::to_string(epoch), run.trace);
    run.trace.push_back(rec);

    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const BatchObjective obj =
          batch_objective(student, p, corpus, std::span<const std::size_t>(order).subspan(start, end - start), config);
      if (!std::isfinite(obj.loss)) {
        throw TrainingAborted("non-finite loss during epoch " + std::to_string(epoch), run.trace);
      }
      opt.step(student.table, obj.grad);
      for (double z : student.table) {
        if (!std::isfinite(z)) throw TrainingAborted("non-finite parameter during epoch " + std::to_string(epoch), run.trace);
      }
    }
  }
  run.final_metrics = evaluate(student, teacher, corpus, config);
  run.final_metrics.epoch = config.epochs;
  if (!finite(run.final_metrics)) throw TrainingAborted("non-finite final metrics", run.trace);
  return run;
}

TrainRun run_experiment(const TrainConfig& config) {
  config.validate();
  const TinyLM teacher =
      make_teacher(config.teacher_kind, config.teacher_vocab, config.teacher_order, config.teacher_seed);
  const Corpus corpus = sample_corpus(teacher, config.n_seq, config.seq_len, config.seed);
  TinyLM student = make_student(config.teacher_vocab, config.teacher_order, config.temperature);
  TinyLM teacher_at_t = teacher;
  teacher_at_t.temperature = config.temperature;
  return train(std::move(student), teacher_at_t, corpus, config);
}

void write_trace_csv(std::ostream& out, const std::vector<EpochRecord>& trace) {
  out << "epoch,train_loss,fkl_to_teacher,rkl_to_teacher,pearson\n";
  for (const auto& r : trace) {
    out << r.epoch << ',' << io::format_double(r.train_loss) << ',' << io::format_double(r.fkl_to_teacher) << ','
        << io::format_double(r.rkl_to_teacher) << ',' << io::format_double(r.pearson) << '\n';
  }
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

MetricSummary summarize(const std::vector<double>& xs) {
  if (xs.empty()) return {NAN, NAN};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

const char* kSweepHeader =
    "config,spec,runs,failed,status,train_loss_mean,train_loss_std,fkl_mean,fkl_std,rkl_mean,rkl_std,"
    "pearson_mean,pearson_std";

}  // namespace

std::vector<SweepRow> sweep(const std::vector<NamedConfig>& configs, const std::vector<std::uint64_t>& seeds,
                            unsigned threads) {
  if (configs.empty() || seeds.empty()) throw InvalidInput("sweep needs at least one config and one seed");
  const std::size_t n_jobs = configs.size() * seeds.size();
  std::vector<std::optional<EpochRecord>> results(n_jobs);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < n_jobs; job = next++) {
      TrainConfig cfg = configs[job / seeds.size()].config;
      cfg.seed = seeds[job % seeds.size()];
      try {
        results[job] = run_experiment(cfg).final_metrics;
      } catch (const Error&) {
        results[job].reset();
      }
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n_jobs));
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < threads; ++w) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<SweepRow> rows;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    SweepRow row;
    row.name = configs[c].name;
    row.spec = describe(configs[c].config.spec);
    std::vector<double> loss, fkl, rkl, pear;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& r = results[c * seeds.size() + s];
      ++row.runs;
      if (!r) {
        ++row.failed;
        continue;
      }
      loss.push_back(r->train_loss);
      fkl.push_back(r->fkl_to_teacher);
      rkl.push_back(r->rkl_to_teacher);
      pear.push_back(r->pearson);
    }
    row.train_loss = summarize(loss);
    row.fkl = summarize(fkl);
    row.rkl = summarize(rkl);
    row.pearson = summarize(pear);
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << kSweepHeader << '\n';
  auto f = io::format_double;
  for (const auto& r : rows) {
    out << r.name << ',' << r.spec << ',' << r.runs << ',' << r.failed << ',' << (r.failed > 0 ? "failed" : "ok")
        << ',' << f(r.train_loss.mean) << ',' << f(r.train_loss.stddev) << ',' << f(r.fkl.mean) << ','
        << f(r.fkl.stddev) << ',' << f(r.rkl.mean) << ',' << f(r.rkl.stddev) << ',' << f(r.pearson.mean) << ','
        << f(r.pearson.stddev) << '\n';
  }
}

std::vector<SweepRow> read_sweep_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || io::trim(line) != kSweepHeader) throw InvalidInput("sweep CSV: unexpected header");
  auto num = [](const std::string& s) { return s == "nan" ? NAN : io::parse_double(s); };
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (io::trim(line).empty()) continue;
    const auto f = io::split(io::trim(line), ',');
    if (f.size() != 13) throw InvalidInput("sweep CSV: expected 13 fields");
    SweepRow r;
    r.name = f[0];
    r.spec = f[1];
    r.runs = static_cast<int>(io::parse_int(f[2]));
    r.failed = static_cast<int>(io::parse_int(f[3]));
    r.train_loss = {num(f[5]), num(f[6])};
    r.fkl = {num(f[7]), num(f[8])};
    r.rkl = {num(f[9]), num(f[10])};
    r.pearson = {num(f[11]), num(f[12])};
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<CompareRow> compare(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b) {
  std::vector<CompareRow> out;
  for (const auto& ra : a) {
    const auto it = std::find_if(b.begin(), b.end(), [&](const SweepRow& rb) { return rb.name == ra.name; });
    if (it == b.end()) continue;
    auto add = [&](const char* metric, double va, double vb, bool higher_better) {
      std::string winner = "tie";
      if (va != vb && !std::isnan(va) && !std::isnan(vb)) {
        winner = ((va > vb) == higher_better) ? "a" : "b";
      }
      out.push_back({ra.name, metric, va, vb, winner});
    };
    add("train_loss", ra.train_loss.mean, it->train_loss.mean, false);
    add("fkl_to_teacher", ra.fkl.mean, it->fkl.mean, false);
    add("rkl_to_teacher", ra.rkl.mean, it->rkl.mean, false);
    add("pearson", ra.pearson.mean, it->pearson.mean, true);
  }
  return out;
}

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "config,metric,a,b,winner\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.metric << ',' << io::format_double(r.a) << ',' << io::format_double(r.b) << ','
        << r.winner << '\n';
  }
}

}  // namespace todi::harness
