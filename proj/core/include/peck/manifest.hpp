#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace peck {

inline constexpr const char* kToolVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
std::string sha256_hex_file(const std::string& path);

// Reproducibility record for a CLI run: what went in, with what parameters,
// hashed byte-for-byte. Re-running an identical manifest must reproduce
// identical outputs.
struct RunManifest {
  std::string command;        // subcommand name
  std::string experiment_id;
  std::string layout_ref;     // preset name or file path
  std::vector<std::string> inputs;
  std::vector<std::string> input_sha256;
  std::string calibration_ref;
  double qc_likelihood = 0.6;
  double qc_fraction = 0.90;
  double bin_seconds = 300.0;
  int n_quad = 15;
  std::uint64_t seed = 0;
  std::string tool_version = kToolVersion;
  std::string content_hash;  // hash over input hashes + parameters

  // Fills input_sha256 from inputs and computes content_hash.
  void finalize();
};

std::string manifest_to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace peck
