#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "todi/dist.hpp"
#include "todi/divergence.hpp"
#include "todi/error.hpp"
#include "todi/weighting.hpp"

namespace todi::harness {

// Tabular k-th order Markov language model. Row c of the table holds the
// logits of the next-token distribution given context c, where the context
// index of tokens (a_1 .. a_k) is sum_j a_j * V^(k-j).
struct TinyLM {
  int order = 1;
  int vocab = 16;
  double temperature = 1.0;
  std::vector<double> table;

  std::size_t contexts() const;
  std::size_t parameter_count() const { return table.size(); }
  std::span<double> row(std::size_t ctx);
  std::span<const double> row(std::size_t ctx) const;
  VocabDist conditional(std::size_t ctx) const;
  DistSeq all_conditionals() const;
  // Context formed by the k tokens preceding position `pos` of `tokens`.
  std::size_t context_at(std::span<const int> tokens, std::size_t pos) const;

  bool operator==(const TinyLM&) const = default;
};

// All-zero logits: uniform conditionals.
TinyLM make_student(int vocab, int order, double temperature = 1.0);

enum class TeacherKind { MixtureMarkov, RandomSparse, Peaked };
std::string_view to_string(TeacherKind k);
TeacherKind teacher_kind_from_string(std::string_view s);

// Deterministic given seed. mixture_markov and random_sparse guarantee at
// least one context with two probabilities >= 0.2; peaked guarantees every
// context has a maximum probability >= 0.9. Requires vocab >= 8, order <= 2.
TinyLM make_teacher(TeacherKind kind, int vocab, int order, std::uint64_t seed);

using Sequence = std::vector<int>;

struct Corpus {
  std::vector<Sequence> sequences;
};

// Ancestral sampling. The first `order` tokens of each sequence are uniform.
Corpus sample_corpus(const TinyLM& teacher, int n_seq, int seq_len, std::uint64_t seed);

// Exact unigram marginal of the stationary k-order chain.
std::vector<double> stationary_unigram(const TinyLM& model);

enum class OptimizerKind { SGD, Adam };
std::string_view to_string(OptimizerKind k);
OptimizerKind optimizer_from_string(std::string_view s);

struct TrainConfig {
  DivergenceSpec spec = DivergenceSpec::of(Kind::ToDi);
  int epochs = 200;
  double lr = 1e-2;
  OptimizerKind optimizer = OptimizerKind::Adam;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  int batch_size = 32;
  std::uint64_t seed = 10;
  double ce_mix = 0.5;
  // Scenario: which teacher to distil from and how much data to sample.
  TeacherKind teacher_kind = TeacherKind::MixtureMarkov;
  int teacher_vocab = 16;
  int teacher_order = 1;
  std::uint64_t teacher_seed = 3;
  int n_seq = 256;
  int seq_len = 32;
  double temperature = 1.0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double fkl_to_teacher = 0.0;
  double rkl_to_teacher = 0.0;
  double pearson = 0.0;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainRun {
  TrainConfig config;
  // trace[e] is measured at the start of epoch e, before its updates.
  std::vector<EpochRecord> trace;
  // Measured after the last epoch.
  EpochRecord final_metrics;
  TinyLM final_student;
};

class TrainingAborted : public Error {
 public:
  TrainingAborted(const std::string& what, std::vector<EpochRecord> trace)
      : Error(what), trace_(std::move(trace)) {}
  const std::vector<EpochRecord>& trace() const { return trace_; }

 private:
  std::vector<EpochRecord> trace_;
};

// Objective on a set of sequences:
//   ce_mix * CE(ground truth) + (1 - ce_mix) * KD(spec),
// both averaged over predicted positions. grad has the shape of the student
// table. When `frozen` is given (rows indexed by context) it replaces the
// token weights of ToDi kinds; otherwise they are computed from the current
// student and returned in `weights`.
struct BatchObjective {
  double loss = 0.0;
  double ce = 0.0;
  double kd = 0.0;
  std::vector<double> grad;
  TokenWeightMatrix weights;
};

BatchObjective batch_objective(const TinyLM& student, const DistSeq& teacher_conditionals, const Corpus& corpus,
                               std::span<const std::size_t> sequence_ids, const TrainConfig& config,
                               const TokenWeightMatrix* frozen = nullptr);

// fkl/rkl averaged over every context; pearson over all (context, token) pairs.
EpochRecord evaluate(const TinyLM& student, const TinyLM& teacher, const Corpus& corpus, const TrainConfig& config);

TrainRun train(TinyLM student_init, const TinyLM& teacher, const Corpus& corpus, const TrainConfig& config);

// Builds the teacher and corpus described by `config`, starts from a zero
// student, and trains.
TrainRun run_experiment(const TrainConfig& config);

void write_trace_csv(std::ostream& out, const std::vector<EpochRecord>& trace);

struct NamedConfig {
  std::string name;
  TrainConfig config;
};

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation over seeds
};

struct SweepRow {
  std::string name;
  std::string spec;
  int runs = 0;
  int failed = 0;
  MetricSummary train_loss;
  MetricSummary fkl;
  MetricSummary rkl;
  MetricSummary pearson;
};

// Every config is run once per seed (the seed replaces config.seed). Runs are
// independent and may execute on `threads` workers (0 = hardware concurrency);
// rows come back in config order regardless.
std::vector<SweepRow> sweep(const std::vector<NamedConfig>& configs, const std::vector<std::uint64_t>& seeds,
                            unsigned threads = 0);

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_sweep_csv(std::istream& in);

struct CompareRow {
  std::string name;
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  std::string winner;  // "a", "b" or "tie"
};

// Joins two sweep tables on config name. Lower is better for losses and
// divergences, higher for pearson.
std::vector<CompareRow> compare(const std::vector<SweepRow>& a, const std::vector<SweepRow>& b);
void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);

}  // namespace todi::harness
