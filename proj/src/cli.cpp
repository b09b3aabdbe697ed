#include "todi/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "todi/config.hpp"
#include "todi/error.hpp"
#include "todi/gradcheck.hpp"
#include "todi/harness.hpp"
#include "todi/io.hpp"
#include "todi/toy.hpp"

namespace todi::cli {

namespace fs = std::filesystem;

std::string manifest_path(const std::string& output) { return output + ".manifest.json"; }

std::string to_json(const RunManifest& m) {
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_digest"] = m.config_digest;
  j["seed"] = m.seed;
  j["artifact_version"] = m.artifact_version;
  j["outputs"] = m.outputs;
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.artifact_version = j.at("artifact_version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("manifest JSON: ") + e.what());
  }
}

void write_manifest(const RunManifest& m) {
  for (const auto& out : m.outputs) io::write_file(manifest_path(out), to_json(m));
}

namespace {

struct Options {
  // toy
  std::string toy_kind;
  std::size_t toy_vocab = 50;
  std::uint64_t toy_seed = 7;
  std::string toy_out;
  // gradcheck
  int gc_instances = 100;
  std::uint64_t gc_seed = GradcheckOptions{}.seed;
  std::string gc_out;
  // train
  std::string train_config;
  std::string train_out;
  std::optional<std::uint64_t> train_seed;
  // sweep
  std::string sweep_dir;
  std::string sweep_seeds = "10,20,30,40,50";
  std::string sweep_out;
  unsigned sweep_threads = 0;
  // compare
  std::string cmp_a;
  std::string cmp_b;
  std::string cmp_out;
};

std::string keys_footer() {
  std::string s = "Config keys (train, sweep):";
  for (const auto& k : config::config_keys()) s += " " + k;
  s += "\nEnvironment: TODI_SEED overrides the config seed; --seed overrides both.";
  return s;
}

std::unique_ptr<CLI::App> build_app(Options& o) {
  auto app = std::make_unique<CLI::App>("Token-wise distillation divergences: analysis and desk-scale training",
                                        "todi");
  app->require_subcommand(1);
  app->footer(keys_footer());

  auto* toy = app->add_subcommand("toy", "Per-index FKL/RKL gradient magnitudes on a toy teacher/student pair");
  toy->add_option("--kind", o.toy_kind, "bimodal_vs_unimodal | shifted_gaussians | random_dirichlet")->required();
  toy->add_option("--vocab", o.toy_vocab, "Vocabulary size (>= 4)")->capture_default_str();
  toy->add_option("--seed", o.toy_seed, "Scenario seed")->capture_default_str();
  toy->add_option("--out", o.toy_out, "Profile CSV path")->required();

  auto* gc = app->add_subcommand("gradcheck", "Analytic vs finite-difference logit gradients for every kind");
  gc->add_option("--instances", o.gc_instances, "Random instances per kind")->capture_default_str();
  gc->add_option("--seed", o.gc_seed, "Instance seed")->capture_default_str();
  gc->add_option("--out", o.gc_out, "Write the JSON report here instead of stdout");

  auto* train = app->add_subcommand("train", "Distil a tiny student from a synthetic teacher");
  train->add_option("--config", o.train_config, "key=value run config")->required();
  train->add_option("--out", o.train_out, "Per-epoch trace CSV")->required();
  train->add_option("--seed", o.train_seed, "Overrides the config seed and TODI_SEED");
  train->footer(keys_footer());

  auto* sw = app->add_subcommand("sweep", "Run every *.cfg in a directory over replicate seeds");
  sw->add_option("--configs", o.sweep_dir, "Directory of *.cfg files")->required();
  sw->add_option("--seeds", o.sweep_seeds, "Comma-separated replicate seeds")->capture_default_str();
  sw->add_option("--out", o.sweep_out, "Comparison table CSV")->required();
  sw->add_option("--threads", o.sweep_threads, "Worker threads (0 = all cores)")->capture_default_str();
  sw->footer(keys_footer());

  auto* cmp = app->add_subcommand("compare", "Join two sweep tables and report the winner per metric");
  cmp->add_option("a", o.cmp_a, "First sweep CSV")->required();
  cmp->add_option("b", o.cmp_b, "Second sweep CSV")->required();
  cmp->add_option("--out", o.cmp_out, "Output CSV")->required();
  return app;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& field : io::split(text, ',')) {
    if (io::trim(field).empty()) continue;
    long long v = 0;
    try {
      v = io::parse_int(field);
    } catch (const InvalidInput&) {
      throw ConfigError("bad seed '" + field + "' in seed list");
    }
    if (v < 0) throw ConfigError("seeds must be non-negative");
    seeds.push_back(static_cast<std::uint64_t>(v));
  }
  if (seeds.empty()) throw ConfigError("empty seed list");
  return seeds;
}

std::optional<std::uint64_t> env_seed() {
  const char* raw = std::getenv("TODI_SEED");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  long long v = 0;
  try {
    v = io::parse_int(raw);
  } catch (const InvalidInput&) {
    throw ConfigError(std::string("TODI_SEED is not an integer: '") + raw + "'");
  }
  if (v < 0) throw ConfigError("TODI_SEED must be non-negative");
  return static_cast<std::uint64_t>(v);
}

int run_toy(const Options& o, std::ostream& out) {
  const toy::Family family = [&] {
    try {
      return toy::family_from_string(o.toy_kind);
    } catch (const InvalidParameter& e) {
      throw ConfigError(e.what());
    }
  }();
  const toy::Scenario s = toy::make_toy(family, o.toy_vocab, o.toy_seed);
  const toy::Profile profile = toy::gradient_profile(s);
  std::ostringstream csv;
  toy::write_profile_csv(csv, profile);
  io::write_file(o.toy_out, csv.str());

  std::ostringstream resolved;
  resolved << "kind=" << toy::to_string(family) << "\nvocab=" << o.toy_vocab << "\nseed=" << o.toy_seed << "\n";
  write_manifest({"toy", config::sha256_hex(resolved.str()), o.toy_seed, kArtifactVersion, {o.toy_out}});

  const std::size_t bad = toy::dominance_violations(profile);
  out << "toy " << toy::to_string(family) << " V=" << o.toy_vocab << " seed=" << o.toy_seed << ": " << profile.size()
      << " rows, " << bad << " dominance violations\n";
  return bad == 0 ? kOk : kRuntimeError;
}

int run_gradcheck(const Options& o, std::ostream& out) {
  if (o.gc_instances < 1) throw ConfigError("--instances must be >= 1");
  GradcheckOptions opts;
  opts.instances = o.gc_instances;
  opts.seed = o.gc_seed;
  const auto results = gradcheck_all(opts);
  const std::string report = gradcheck_report_json(results, opts);
  if (o.gc_out.empty()) {
    out << report;
  } else {
    io::write_file(o.gc_out, report);
    std::ostringstream resolved;
    resolved << "instances=" << opts.instances << "\nseed=" << opts.seed << "\n";
    write_manifest({"gradcheck", config::sha256_hex(resolved.str()), opts.seed, kArtifactVersion, {o.gc_out}});
  }
  const bool ok = std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
  return ok ? kOk : kRuntimeError;
}

harness::TrainConfig load_config(const std::string& path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return config::parse_config(text);
}

int run_train(const Options& o, std::ostream& out, std::ostream& err) {
  harness::TrainConfig cfg = load_config(o.train_config);
  if (auto s = env_seed()) cfg.seed = *s;
  if (o.train_seed) cfg.seed = *o.train_seed;

  std::vector<harness::EpochRecord> trace;
  int code = kOk;
  try {
    trace = harness::run_experiment(cfg).trace;
  } catch (const harness::TrainingAborted& e) {
    err << "training aborted: " << e.what() << "\n";
    trace = e.trace();
    code = kRuntimeError;
  }
  std::ostringstream csv;
  harness::write_trace_csv(csv, trace);
  io::write_file(o.train_out, csv.str());
  write_manifest({"train", config::config_digest(cfg), cfg.seed, kArtifactVersion, {o.train_out}});
  if (code == kOk && !trace.empty()) {
    const auto& last = trace.back();
    out << "train " << describe(cfg.spec) << " seed=" << cfg.seed << ": epoch " << last.epoch
        << " fkl_to_teacher=" << io::format_double(last.fkl_to_teacher)
        << " pearson=" << io::format_double(last.pearson) << "\n";
  }
  return code;
}

int run_sweep(const Options& o, std::ostream& out) {
  if (!fs::is_directory(o.sweep_dir)) throw ConfigError("--configs must name a directory: " + o.sweep_dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(o.sweep_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".cfg") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no *.cfg files in " + o.sweep_dir);

  const std::vector<std::uint64_t> seeds = parse_seed_list(o.sweep_seeds);
  std::vector<harness::NamedConfig> configs;
  std::string resolved;
  for (const auto& f : files) {
    harness::NamedConfig nc{f.stem().string(), load_config(f.string())};
    resolved += "[" + nc.name + "]\n" + config::to_config_text(nc.config);
    configs.push_back(std::move(nc));
  }
  resolved += "seeds=" + o.sweep_seeds + "\n";

  const auto rows = harness::sweep(configs, seeds, o.sweep_threads);
  std::ostringstream csv;
  harness::write_sweep_csv(csv, rows);
  io::write_file(o.sweep_out, csv.str());
  write_manifest({"sweep", config::sha256_hex(resolved), seeds.front(), kArtifactVersion, {o.sweep_out}});

  int failed = 0;
  for (const auto& r : rows) failed += r.failed;
  out << "sweep: " << rows.size() << " configs x " << seeds.size() << " seeds, " << failed << " failed runs\n";
  return kOk;
}

int run_compare(const Options& o, std::ostream& out) {
  auto load = [](const std::string& path) {
    std::istringstream in(io::read_file(path));
    return harness::read_sweep_csv(in);
  };
  const auto a_text = io::read_file(o.cmp_a);
  const auto b_text = io::read_file(o.cmp_b);
  const auto rows = harness::compare(load(o.cmp_a), load(o.cmp_b));
  std::ostringstream csv;
  harness::write_compare_csv(csv, rows);
  io::write_file(o.cmp_out, csv.str());
  write_manifest({"compare", config::sha256_hex(a_text + "\n--\n" + b_text), 0, kArtifactVersion, {o.cmp_out}});

  int a_wins = 0;
  int b_wins = 0;
  for (const auto& r : rows) {
    a_wins += r.winner == "a" ? 1 : 0;
    b_wins += r.winner == "b" ? 1 : 0;
  }
  out << "compare: " << rows.size() << " metric rows, a wins " << a_wins << ", b wins " << b_wins << "\n";
  return kOk;
}

}  // namespace

std::string help_text() {
  Options o;
  return build_app(o)->help();
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  auto app = build_app(o);
  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.emplace_back("todi");
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());

  try {
    app->parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app->help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app->help();
    return kUsageError;
  }

  try {
    if (app->got_subcommand("toy")) return run_toy(o, out);
    if (app->got_subcommand("gradcheck")) return run_gradcheck(o, out);
    if (app->got_subcommand("train")) return run_train(o, out, err);
    if (app->got_subcommand("sweep")) return run_sweep(o, out);
    if (app->got_subcommand("compare")) return run_compare(o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  err << app->help();
  return kUsageError;
}

}  // namespace todi::cli
