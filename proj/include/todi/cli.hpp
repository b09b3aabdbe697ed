#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace todi::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsageError = 1;
inline constexpr int kRuntimeError = 2;

// Written next to every output file as "<output>.manifest.json".
struct RunManifest {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::string artifact_version = kArtifactVersion;
  std::vector<std::string> outputs;
};

std::string manifest_path(const std::string& output);
std::string to_json(const RunManifest& m);
RunManifest manifest_from_json(const std::string& text);
void write_manifest(const RunManifest& m);

// Full help text, including the list of accepted config keys.
std::string help_text();

// Entry point shared by the executable and the tests. args excludes the
// program name. Returns kOk, kUsageError or kRuntimeError.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace todi::cli
