#include "todi/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "todi/error.hpp"

namespace todi::io {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  const std::string_view s = trim(text);
  if (s == "inf" || s == "+inf") return INFINITY;
  if (s == "-inf") return -INFINITY;
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto res = std::from_chars(first, s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not a decimal number: '" + std::string(text) + "'");
  }
  return v;
}

long long parse_int(std::string_view text) {
  const std::string_view s = trim(text);
  long long v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw InvalidInput("not an integer: '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::string> split(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(line.substr(start));
      return out;
    }
    out.emplace_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const std::size_t b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const std::size_t e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

std::string to_json(const MaskedDistSeq& seq) {
  nlohmann::json j;
  j["probs"] = nlohmann::json::array();
  for (const auto& row : seq.rows) {
    j["probs"].push_back(std::vector<double>(row.probs().begin(), row.probs().end()));
  }
  j["mask"] = nlohmann::json::array();
  for (bool m : seq.mask) j["mask"].push_back(m);
  return j.dump();
}

MaskedDistSeq dist_seq_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidInput(std::string("distribution JSON: ") + e.what());
  }
  if (!j.contains("probs") || !j["probs"].is_array()) throw InvalidInput("distribution JSON: missing 'probs' array");
  MaskedDistSeq out;
  std::size_t width = 0;
  for (const auto& row : j["probs"]) {
    if (!row.is_array()) throw InvalidInput("distribution JSON: 'probs' must be an array of rows");
    const auto values = row.get<std::vector<double>>();
    if (out.rows.empty()) width = values.size();
    if (values.size() != width) throw InvalidInput("distribution JSON: ragged rows");
    out.rows.push_back(VocabDist::from_probs(values));
  }
  if (j.contains("mask")) {
    for (const auto& m : j["mask"]) out.mask.push_back(m.get<bool>());
    if (out.mask.size() != out.rows.size()) throw InvalidInput("distribution JSON: mask length differs from rows");
  } else {
    out.mask.assign(out.rows.size(), true);
  }
  return out;
}

void write_triples_csv(std::ostream& out, const Matrix& values) {
  out << "t,i,value\n";
  for (std::size_t t = 0; t < values.rows(); ++t) {
    for (std::size_t i = 0; i < values.cols(); ++i) {
      out << t << ',' << i << ',' << format_double(values(t, i)) << '\n';
    }
  }
}

void write_triples_csv(std::ostream& out, const DistSeq& seq) {
  out << "t,i,value\n";
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (std::size_t i = 0; i < seq[t].size(); ++i) {
      out << t << ',' << i << ',' << format_double(seq[t].prob(i)) << '\n';
    }
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace todi::io
