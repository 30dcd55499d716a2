// File formats: channel spec parsing, JSON report rendering, the per-leaf
// CSV, and run manifests. All output is byte-deterministic for fixed inputs.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "polarlr/approximation.hpp"
#include "polarlr/channel_model.hpp"
#include "polarlr/construction.hpp"
#include "polarlr/metrics.hpp"
#include "polarlr/polarization.hpp"
#include "polarlr/sc_simulator.hpp"

namespace polarlr {

inline constexpr const char* kToolVersion = "1.0.0";

// Accepts one of
//   {"type":"bsc","p":P} {"type":"bec","eps":E}
//   {"type":"awgn","sigma":S,"levels":L}
//   {"type":"custom","rows":[[w0,w1],...]}
//   {"type":"lr","atoms":[[lr,mass],...]}
// Parse errors carry the position nlohmann reports.
ChannelSpec parse_channel_spec(const std::string& json_text);

// `arg` is inline JSON when it starts with '{', otherwise a file path.
ChannelSpec load_channel_spec(const std::string& arg);

std::string channel_spec_to_json(const ChannelSpec& spec);

std::string metrics_to_json(const ChannelMetrics& m);
std::string proposition_reports_to_json(const std::vector<PropositionReport>& reports);
std::string code_spec_to_json(const CodeSpec& code);
CodeSpec code_spec_from_json(const std::string& json_text);
std::string bler_to_json(const BlerStats& stats);
std::string trajectory_to_json(const TrappedTrajectory& t);

// One CSV row per leaf: path_bits,atom_count,i,z,q,p_less,p_eq,p_greater,pe.
std::string leaves_to_csv(const std::vector<SyntheticChannelRecord>& leaves);

struct RunManifest {
  std::string command;
  std::vector<std::pair<std::string, std::string>> parameters;
  std::uint64_t seed = 0;
  std::string version = kToolVersion;
  std::vector<std::pair<std::string, std::uint64_t>> input_digests;
  double duration_ms = 0.0;
};

std::string manifest_to_json(const RunManifest& m);

// FNV-1a over the file bytes.
std::uint64_t digest_file(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Shortest round-trip decimal formatting used in every text output.
std::string format_double(double v);

}  // namespace polarlr
