#include "polarlr/serialization.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace polarlr {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ChannelSpec parse_channel_spec(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("channel spec: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw std::invalid_argument("channel spec: expected an object with a \"type\" string");
  const std::string type = j["type"].get<std::string>();

  const auto need_number = [&](const char* field) {
    if (!j.contains(field) || !j[field].is_number()) {
      std::ostringstream os;
      os << "channel spec: \"" << type << "\" requires numeric field \"" << field
         << "\"";
      throw std::invalid_argument(os.str());
    }
    return j[field].get<double>();
  };

  ChannelSpec spec;
  if (type == "bsc") {
    spec.type = ChannelSpec::Type::kBsc;
    spec.p = need_number("p");
  } else if (type == "bec") {
    spec.type = ChannelSpec::Type::kBec;
    spec.eps = need_number("eps");
  } else if (type == "awgn") {
    spec.type = ChannelSpec::Type::kAwgn;
    spec.sigma = need_number("sigma");
    spec.levels = static_cast<int>(need_number("levels"));
  } else if (type == "custom") {
    spec.type = ChannelSpec::Type::kCustom;
    if (!j.contains("rows") || !j["rows"].is_array())
      throw std::invalid_argument("channel spec: \"custom\" requires array field \"rows\"");
    for (const auto& row : j["rows"]) {
      if (!row.is_array() || row.size() != 2)
        throw std::invalid_argument("channel spec: each row must be [w0, w1]");
      spec.rows.rows.emplace_back(row[0].get<double>(), row[1].get<double>());
    }
  } else if (type == "lr") {
    spec.type = ChannelSpec::Type::kLr;
    if (!j.contains("atoms") || !j["atoms"].is_array())
      throw std::invalid_argument("channel spec: \"lr\" requires array field \"atoms\"");
    for (const auto& atom : j["atoms"]) {
      if (!atom.is_array() || atom.size() != 2)
        throw std::invalid_argument("channel spec: each atom must be [lr, mass]");
      spec.atoms.push_back({atom[0].get<double>(), atom[1].get<double>()});
    }
  } else {
    throw std::invalid_argument("channel spec: unknown type \"" + type + "\"");
  }
  // Fail fast on invalid parameters.
  (void)spec.to_distribution();
  return spec;
}

ChannelSpec load_channel_spec(const std::string& arg) {
  std::string text = arg;
  if (arg.empty() || arg[0] != '{') text = read_text_file(arg);
  return parse_channel_spec(text);
}

std::string channel_spec_to_json(const ChannelSpec& spec) {
  ordered_json j;
  switch (spec.type) {
    case ChannelSpec::Type::kBsc:
      j["type"] = "bsc";
      j["p"] = spec.p;
      break;
    case ChannelSpec::Type::kBec:
      j["type"] = "bec";
      j["eps"] = spec.eps;
      break;
    case ChannelSpec::Type::kAwgn:
      j["type"] = "awgn";
      j["sigma"] = spec.sigma;
      j["levels"] = spec.levels;
      break;
    case ChannelSpec::Type::kCustom: {
      j["type"] = "custom";
      auto rows = ordered_json::array();
      for (const auto& [w0, w1] : spec.rows.rows) rows.push_back({w0, w1});
      j["rows"] = std::move(rows);
      break;
    }
    case ChannelSpec::Type::kLr: {
      j["type"] = "lr";
      auto atoms = ordered_json::array();
      for (const auto& a : spec.atoms) atoms.push_back({a.lr, a.mass});
      j["atoms"] = std::move(atoms);
      break;
    }
  }
  return j.dump();
}

std::string metrics_to_json(const ChannelMetrics& m) {
  ordered_json j;
  j["i"] = m.i;
  j["z"] = m.z;
  j["q"] = m.q;
  j["p_less"] = m.p_less;
  j["p_eq"] = m.p_eq;
  j["p_greater"] = m.p_greater;
  j["p_geq_half"] = m.p_geq_half;
  j["p_leq_half"] = m.p_leq_half;
  j["pe"] = m.pe;
  return j.dump(2);
}

std::string proposition_reports_to_json(
    const std::vector<PropositionReport>& reports) {
  auto arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json j;
    j["prop1_ok"] = r.prop1_ok;
    j["prop2_ok"] = r.prop2_ok;
    j["prop3_ok"] = r.prop3_ok;
    j["prop4_ok"] = r.prop4_ok;
    j["worst_margins"] = {{"prop1", r.margin1},
                          {"prop2", r.margin2},
                          {"prop3", r.margin3},
                          {"prop4", r.margin4}};
    j["details"] = r.details;
    arr.push_back(std::move(j));
  }
  return arr.dump(2);
}

std::string code_spec_to_json(const CodeSpec& code) {
  ordered_json j;
  j["n"] = code.n;
  j["k"] = code.k();
  j["info_set"] = code.info_set;
  j["metric_used"] = to_string(code.metric_used);
  j["union_bound"] = code.union_bound;
  return j.dump(2);
}

CodeSpec code_spec_from_json(const std::string& json_text) {
  ordered_json j;
  try {
    j = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("code spec: ") + e.what());
  }
  CodeSpec code;
  code.n = j.at("n").get<int>();
  code.block_length = 1 << code.n;
  code.info_set = j.at("info_set").get<std::vector<int>>();
  code.metric_used = parse_construction_metric(j.at("metric_used").get<std::string>());
  code.union_bound = j.value("union_bound", 0.0);
  std::sort(code.info_set.begin(), code.info_set.end());
  for (int i = 0; i < code.block_length; ++i)
    if (!std::binary_search(code.info_set.begin(), code.info_set.end(), i))
      code.frozen_set.push_back(i);
  if (static_cast<int>(code.info_set.size()) != j.at("k").get<int>())
    throw std::invalid_argument("code spec: k does not match info_set size");
  return code;
}

std::string bler_to_json(const BlerStats& stats) {
  ordered_json j;
  j["trials"] = stats.trials;
  j["block_errors"] = stats.block_errors;
  j["bit_errors"] = stats.bit_errors;
  j["bler"] = stats.bler;
  j["seed"] = stats.seed;
  return j.dump(2);
}

std::string trajectory_to_json(const TrappedTrajectory& t) {
  ordered_json j;
  auto nodes = ordered_json::array();
  for (const auto& level : t.levels)
    for (const auto& r : level) {
      ordered_json node;
      node["path_bits"] = r.path.bit_string();
      node["mismatch_mass"] = r.agreement.mismatch_mass;
      node["trapped_mass"] = r.agreement.trapped_mass;
      node["p_eq_exact"] = r.p_eq_exact;
      node["p_eq_approx"] = r.p_eq_approx;
      node["q_exact"] = r.q_exact;
      node["q_approx"] = r.q_approx;
      node["atom_count"] = r.atom_count;
      node["quantized"] = r.quantized;
      nodes.push_back(std::move(node));
    }
  j["nodes"] = std::move(nodes);
  auto summary = ordered_json::array();
  for (const auto& s : t.summary) {
    ordered_json lvl;
    lvl["level"] = s.level;
    lvl["max_trapped"] = s.max_trapped;
    lvl["mean_trapped"] = s.mean_trapped;
    lvl["max_mismatch"] = s.max_mismatch;
    lvl["mean_mismatch"] = s.mean_mismatch;
    summary.push_back(std::move(lvl));
  }
  j["summary"] = std::move(summary);
  return j.dump(2);
}

std::string leaves_to_csv(const std::vector<SyntheticChannelRecord>& leaves) {
  std::ostringstream os;
  os << "path_bits,atom_count,i,z,q,p_less,p_eq,p_greater,pe\n";
  for (const auto& r : leaves) {
    os << r.path.bit_string() << ',' << r.atom_count << ','
       << format_double(r.metrics.i) << ',' << format_double(r.metrics.z) << ','
       << format_double(r.metrics.q) << ',' << format_double(r.metrics.p_less)
       << ',' << format_double(r.metrics.p_eq) << ','
       << format_double(r.metrics.p_greater) << ','
       << format_double(r.metrics.pe) << '\n';
  }
  return os.str();
}

std::string manifest_to_json(const RunManifest& m) {
  ordered_json j;
  j["command"] = m.command;
  ordered_json params;
  for (const auto& [key, value] : m.parameters) params[key] = value;
  j["parameters"] = std::move(params);
  j["seed"] = m.seed;
  j["version"] = m.version;
  auto inputs = ordered_json::array();
  for (const auto& [path, digest] : m.input_digests) {
    ordered_json in;
    in["path"] = path;
    in["fnv1a64"] = digest;
    inputs.push_back(std::move(in));
  }
  j["inputs"] = std::move(inputs);
  j["duration_ms"] = m.duration_ms;
  return j.dump(2);
}

std::uint64_t digest_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("digest_file: cannot open " + path);
  std::uint64_t h = 0xCBF29CE484222325ULL;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

}  // namespace polarlr
