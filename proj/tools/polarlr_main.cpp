// polarlr: density evolution, verification, construction and simulation for
// polar codes over symmetric binary-input channels.
//
// Subcommands:
//   analyze    metrics of a root channel
//   evolve     full polarization tree, one CSV row per leaf
//   verify     transform inequality checks over random channels
//   construct  information/frozen set selection
//   compare    joint exact-vs-approximate evolution report
//   simulate   Monte-Carlo successive-cancellation BLER

#include <chrono>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "polarlr/rng.hpp"
#include "polarlr/serialization.hpp"

namespace {

using namespace polarlr;

struct CommonArgs {
  std::string channel;
  std::string out;
  int depth = 0;
  std::string kernel = "exact";
  int max_atoms = 0;
  std::uint64_t seed = 1;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
};

QuantizationBudget budget_from(int max_atoms) {
  return max_atoms > 0 ? QuantizationBudget::grid(max_atoms)
                       : QuantizationBudget::none();
}

// Output goes to --out when given (with a manifest sidecar), else stdout.
void deliver(const std::string& content, const CommonArgs& args,
             RunManifest manifest,
             std::chrono::steady_clock::time_point started) {
  if (args.out.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
    return;
  }
  write_text_file(args.out, content);
  manifest.duration_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                started)
          .count();
  if (!args.channel.empty() && args.channel[0] != '{')
    manifest.input_digests.emplace_back(args.channel, digest_file(args.channel));
  write_text_file(args.out + ".manifest.json", manifest_to_json(manifest));
}

RunManifest make_manifest(const std::string& command, const CommonArgs& args,
                          std::initializer_list<std::pair<std::string, std::string>>
                              extra = {}) {
  RunManifest m;
  m.command = command;
  m.seed = args.seed;
  if (!args.channel.empty()) m.parameters.emplace_back("channel", args.channel);
  m.parameters.emplace_back("kernel", args.kernel);
  m.parameters.emplace_back("depth", std::to_string(args.depth));
  m.parameters.emplace_back("max_atoms", std::to_string(args.max_atoms));
  m.parameters.emplace_back("seed", std::to_string(args.seed));
  m.parameters.emplace_back("threads", std::to_string(args.threads));
  for (const auto& [k, v] : extra) m.parameters.emplace_back(k, v);
  return m;
}

void add_common_flags(CLI::App* cmd, CommonArgs& args, bool with_channel = true) {
  if (with_channel)
    cmd->add_option("--channel", args.channel,
                    "channel spec: file path or inline JSON")
        ->required();
  cmd->add_option("--kernel", args.kernel,
                  "exact | minsum | perturbed:<gamma>");
  cmd->add_option("--max-atoms", args.max_atoms,
                  "alphabet budget per node (0 = unbounded)");
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--threads", args.threads, "worker threads");
  cmd->add_option("--out", args.out, "output path (default: stdout)");
}

int run(int argc, char** argv) {
  CLI::App app{"likelihood-ratio density evolution for polar codes"};
  app.require_subcommand(1);

  CommonArgs args;

  auto* analyze = app.add_subcommand("analyze", "metrics of a root channel");
  add_common_flags(analyze, args);

  auto* evolve = app.add_subcommand("evolve", "full polarization tree to CSV");
  add_common_flags(evolve, args);
  evolve->add_option("--depth", args.depth, "tree depth n")->required();

  int verify_count = 1000;
  auto* verify =
      app.add_subcommand("verify", "transform checks over random channels");
  add_common_flags(verify, args, /*with_channel=*/false);
  verify->add_option("--count", verify_count, "number of random channels");

  int construct_k = 0;
  std::string metric = "pe";
  auto* construct = app.add_subcommand("construct", "select information set");
  add_common_flags(construct, args);
  construct->add_option("--depth", args.depth, "tree depth n")->required();
  construct->add_option("-k,--info-bits", construct_k, "information set size")
      ->required();
  construct->add_option("--metric", metric, "pe | z | q");

  auto* compare =
      app.add_subcommand("compare", "joint exact-vs-approximate evolution");
  add_common_flags(compare, args);
  compare->add_option("--depth", args.depth, "tree depth n")->required();

  std::string code_path;
  long long trials = 1000;
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo SC decoding");
  add_common_flags(simulate, args);
  simulate->add_option("--code", code_path, "CodeSpec file from `construct`")
      ->required();
  simulate->add_option("--trials", trials, "number of trials");

  CLI11_PARSE(app, argc, argv);
  const auto started = std::chrono::steady_clock::now();
  args.threads = std::max(1, args.threads);

  if (analyze->parsed()) {
    const ChannelSpec spec = load_channel_spec(args.channel);
    const ChannelMetrics m = channel_metrics(spec.to_distribution());
    deliver(metrics_to_json(m), args, make_manifest("analyze", args), started);
    return 0;
  }

  if (evolve->parsed()) {
    const ChannelSpec spec = load_channel_spec(args.channel);
    EvolveOptions options;
    options.kernel = parse_kernel(args.kernel);
    options.budget = budget_from(args.max_atoms);
    options.threads = args.threads;
    const TreeResult tree =
        evolve_tree(spec.to_distribution(), args.depth, options);
    deliver(leaves_to_csv(tree.leaves()), args, make_manifest("evolve", args),
            started);
    return 0;
  }

  if (verify->parsed()) {
    const KernelId kernel = parse_kernel(args.kernel);
    std::vector<PropositionReport> reports;
    reports.reserve(static_cast<std::size_t>(verify_count));
    bool all_ok = true;
    for (int i = 0; i < verify_count; ++i) {
      const LRDistribution d =
          random_symmetric_distribution(mix_seed(args.seed, static_cast<std::uint64_t>(i)));
      reports.push_back(verify_propositions(d, kernel));
      all_ok = all_ok && reports.back().all_ok();
    }
    deliver(proposition_reports_to_json(reports), args,
            make_manifest("verify", args,
                          {{"count", std::to_string(verify_count)}}),
            started);
    if (!all_ok) {
      std::cerr << "verify: proposition violations found\n";
      return 1;
    }
    return 0;
  }

  if (construct->parsed()) {
    const ChannelSpec spec = load_channel_spec(args.channel);
    EvolveOptions options;
    options.kernel = parse_kernel(args.kernel);
    options.budget = budget_from(args.max_atoms);
    options.threads = args.threads;
    const TreeResult tree =
        evolve_tree(spec.to_distribution(), args.depth, options);
    const CodeSpec code =
        select_frozen(tree.leaves(), construct_k, parse_construction_metric(metric));
    deliver(code_spec_to_json(code), args,
            make_manifest("construct", args,
                          {{"k", std::to_string(construct_k)}, {"metric", metric}}),
            started);
    return 0;
  }

  if (compare->parsed()) {
    const ChannelSpec spec = load_channel_spec(args.channel);
    const KernelId kernel = parse_kernel(args.kernel);
    const KernelId approx =
        kernel.tag == KernelId::Tag::kExact ? KernelId::minsum() : kernel;
    const TrappedTrajectory t =
        trapped_mass_trajectory(spec.to_distribution(), args.depth, approx,
                                budget_from(args.max_atoms), args.threads);
    deliver(trajectory_to_json(t), args, make_manifest("compare", args), started);
    return 0;
  }

  if (simulate->parsed()) {
    const ChannelSpec spec = load_channel_spec(args.channel);
    const CodeSpec code = code_spec_from_json(read_text_file(code_path));
    const BlerStats stats = run_bler(code, spec, trials, parse_kernel(args.kernel),
                                     args.seed, args.threads);
    RunManifest manifest = make_manifest(
        "simulate", args,
        {{"code", code_path}, {"trials", std::to_string(trials)}});
    manifest.input_digests.emplace_back(code_path, digest_file(code_path));
    deliver(bler_to_json(stats), args, std::move(manifest), started);
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "polarlr: " << e.what() << '\n';
    return 1;
  }
}
