#include "todi/config.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "todi/io.hpp"

namespace todi::config {

using harness::TrainConfig;

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "kind",         "lambda",       "mix_ratio",     "beta",       "epochs",     "lr",
      "optimizer",    "adam_beta1",   "adam_beta2",    "adam_eps",   "batch_size", "seed",
      "ce_mix",       "teacher_kind", "teacher_vocab", "teacher_order", "teacher_seed", "n_seq",
      "seq_len",      "temperature",
  };
  return keys;
}

namespace {

double as_double(const std::string& key, const std::string& value) {
  try {
    return io::parse_double(value);
  } catch (const InvalidInput&) {
    throw ConfigError("config key '" + key + "': expected a decimal number, got '" + value + "'");
  }
}

long long as_int(const std::string& key, const std::string& value) {
  try {
    return io::parse_int(value);
  } catch (const InvalidInput&) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
  }
}

int as_small_int(const std::string& key, const std::string& value) {
  const long long v = as_int(key, value);
  if (v < -1000000000LL || v > 1000000000LL) throw ConfigError("config key '" + key + "': value out of range");
  return static_cast<int>(v);
}

std::uint64_t as_seed(const std::string& key, const std::string& value) {
  const long long v = as_int(key, value);
  if (v < 0) throw ConfigError("config key '" + key + "': seeds must be non-negative");
  return static_cast<std::uint64_t>(v);
}

}  // namespace

TrainConfig parse_config(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body = line;
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    body = io::trim(body);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key(io::trim(body.substr(0, eq)));
    const std::string value(io::trim(body.substr(eq + 1)));
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      std::string msg = "unknown config key '" + key + "'; accepted keys:";
      for (const auto& k : keys) msg += " " + k;
      throw ConfigError(msg);
    }
    if (!kv.emplace(key, value).second) throw ConfigError("config key '" + key + "' given twice");
  }

  TrainConfig c;
  if (auto it = kv.find("kind"); it != kv.end()) c.spec = DivergenceSpec::of(kind_from_string(it->second));
  const Kind kind = c.spec.kind;
  const std::string kind_name(to_string(kind));
  if (auto it = kv.find("lambda"); it != kv.end()) {
    if (kind != Kind::SKL && kind != Kind::SRKL) throw ConfigError("lambda does not apply to kind " + kind_name);
    c.spec.lambda = as_double("lambda", it->second);
  }
  if (auto it = kv.find("mix_ratio"); it != kv.end()) {
    if (kind != Kind::FixedMix) throw ConfigError("mix_ratio does not apply to kind " + kind_name);
    c.spec.mix_ratio = as_double("mix_ratio", it->second);
  }
  if (auto it = kv.find("beta"); it != kv.end()) {
    if (kind != Kind::GeneralizedToDi) throw ConfigError("beta does not apply to kind " + kind_name);
    c.spec.beta = as_double("beta", it->second);
  }
  auto get = [&](const char* key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };
  if (auto v = get("epochs")) c.epochs = as_small_int("epochs", *v);
  if (auto v = get("lr")) c.lr = as_double("lr", *v);
  if (auto v = get("optimizer")) c.optimizer = harness::optimizer_from_string(*v);
  if (auto v = get("adam_beta1")) c.adam_beta1 = as_double("adam_beta1", *v);
  if (auto v = get("adam_beta2")) c.adam_beta2 = as_double("adam_beta2", *v);
  if (auto v = get("adam_eps")) c.adam_eps = as_double("adam_eps", *v);
  if (auto v = get("batch_size")) c.batch_size = as_small_int("batch_size", *v);
  if (auto v = get("seed")) c.seed = as_seed("seed", *v);
  if (auto v = get("ce_mix")) c.ce_mix = as_double("ce_mix", *v);
  if (auto v = get("teacher_kind")) c.teacher_kind = harness::teacher_kind_from_string(*v);
  if (auto v = get("teacher_vocab")) c.teacher_vocab = as_small_int("teacher_vocab", *v);
  if (auto v = get("teacher_order")) c.teacher_order = as_small_int("teacher_order", *v);
  if (auto v = get("teacher_seed")) c.teacher_seed = as_seed("teacher_seed", *v);
  if (auto v = get("n_seq")) c.n_seq = as_small_int("n_seq", *v);
  if (auto v = get("seq_len")) c.seq_len = as_small_int("seq_len", *v);
  if (auto v = get("temperature")) c.temperature = as_double("temperature", *v);

  try {
    c.validate();
  } catch (const InvalidParameter& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return c;
}

std::string to_config_text(const TrainConfig& c) {
  std::ostringstream out;
  auto f = io::format_double;
  out << "kind=" << to_string(c.spec.kind) << '\n';
  if (c.spec.lambda) out << "lambda=" << f(*c.spec.lambda) << '\n';
  if (c.spec.mix_ratio) out << "mix_ratio=" << f(*c.spec.mix_ratio) << '\n';
  if (c.spec.beta) out << "beta=" << f(*c.spec.beta) << '\n';
  out << "epochs=" << c.epochs << '\n'
      << "lr=" << f(c.lr) << '\n'
      << "optimizer=" << harness::to_string(c.optimizer) << '\n'
      << "adam_beta1=" << f(c.adam_beta1) << '\n'
      << "adam_beta2=" << f(c.adam_beta2) << '\n'
      << "adam_eps=" << f(c.adam_eps) << '\n'
      << "batch_size=" << c.batch_size << '\n'
      << "seed=" << c.seed << '\n'
      << "ce_mix=" << f(c.ce_mix) << '\n'
      << "teacher_kind=" << harness::to_string(c.teacher_kind) << '\n'
      << "teacher_vocab=" << c.teacher_vocab << '\n'
      << "teacher_order=" << c.teacher_order << '\n'
      << "teacher_seed=" << c.teacher_seed << '\n'
      << "n_seq=" << c.n_seq << '\n'
      << "seq_len=" << c.seq_len << '\n'
      << "temperature=" << f(c.temperature) << '\n';
  return out.str();
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("sha256: digest computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int k = 0; k < len; ++k) {
    out.push_back(kHex[digest[k] >> 4]);
    out.push_back(kHex[digest[k] & 0xF]);
  }
  return out;
}

std::string config_digest(const TrainConfig& config) { return sha256_hex(to_config_text(config)); }

}  // namespace todi::config
