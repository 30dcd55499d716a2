#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "polarlr/channel_model.hpp"
#include "polarlr/construction.hpp"
#include "polarlr/polarization.hpp"
#include "polarlr/rng.hpp"
#include "polarlr/sc_simulator.hpp"

using namespace polarlr;

namespace {

ChannelSpec bec_spec(double eps) {
  ChannelSpec ch;
  ch.type = ChannelSpec::Type::kBec;
  ch.eps = eps;
  return ch;
}

ChannelSpec bsc_spec(double p) {
  ChannelSpec ch;
  ch.type = ChannelSpec::Type::kBsc;
  ch.p = p;
  return ch;
}

CodeSpec all_info(int n) {
  CodeSpec code;
  code.n = n;
  code.block_length = 1 << n;
  for (int i = 0; i < code.block_length; ++i) code.info_set.push_back(i);
  return code;
}

CodeSpec build_code(double eps, int n, int k) {
  EvolveOptions opt;
  const TreeResult tree = evolve_tree(make_bec(eps), n, opt);
  return select_frozen(tree.leaves(), k, ConstructionMetric::kPe);
}

}  // namespace

TEST_CASE("encode worked examples and the involution property") {
  CHECK(encode({1, 1}) == std::vector<std::uint8_t>{0, 1});
  CHECK(encode({1, 0}) == std::vector<std::uint8_t>{1, 0});
  CHECK(encode({0, 0, 0, 0}) == std::vector<std::uint8_t>{0, 0, 0, 0});
  CHECK_THROWS_AS(encode({1, 0, 1}), std::invalid_argument);

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 << (1 + rng.next_below(7));
    std::vector<std::uint8_t> u(static_cast<std::size_t>(n));
    for (auto& b : u) b = static_cast<std::uint8_t>(rng.next_bool());
    CHECK(encode(encode(u)) == u);
  }
}

TEST_CASE("sample_output per channel family") {
  const std::vector<std::uint8_t> zeros(64, 0);
  SUBCASE("BEC(1.0) erases everything") {
    const auto llr = sample_output(bec_spec(1.0), zeros, 5);
    for (double v : llr) CHECK(v == 0.0);
  }
  SUBCASE("BSC(0) saturates with matching signs") {
    std::vector<std::uint8_t> x(16, 0);
    x[3] = x[7] = 1;
    const auto llr = sample_output(bsc_spec(0.0), x, 5);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(llr[i] == (x[i] ? -kLlrSaturation : kLlrSaturation));
  }
  SUBCASE("BEC erasure fraction within 3 sigma, reproducible") {
    std::vector<std::uint8_t> x(10000, 0);
    const auto a = sample_output(bec_spec(0.5), x, 42);
    const auto b = sample_output(bec_spec(0.5), x, 42);
    CHECK(a == b);
    long long erased = 0;
    for (double v : a) erased += v == 0.0;
    CHECK(test_oracles::binomial_within(
        static_cast<double>(erased) / 1e4, 0.5, 10000, 3.0));
  }
  SUBCASE("AWGN is clamped and reproducible") {
    ChannelSpec awgn;
    awgn.type = ChannelSpec::Type::kAwgn;
    awgn.sigma = 0.2;
    const auto llr = sample_output(awgn, zeros, 9);
    for (double v : llr) CHECK(std::fabs(v) <= kLlrSaturation);
    CHECK(llr == sample_output(awgn, zeros, 9));
  }
  SUBCASE("channels without a sampling rule are rejected") {
    ChannelSpec lr;
    lr.type = ChannelSpec::Type::kLr;
    CHECK_THROWS_AS(sample_output(lr, zeros, 1), std::invalid_argument);
  }
}

TEST_CASE("sc_decode hand-worked examples") {
  SUBCASE("N=1 sign decision") {
    CodeSpec code = all_info(0);
    const auto u = sc_decode({3.0}, code, KernelId::exact());
    CHECK(u == std::vector<std::uint8_t>{0});
  }
  SUBCASE("N=2 frozen bit feeds the plus combine") {
    CodeSpec code;
    code.n = 1;
    code.block_length = 2;
    code.info_set = {1};
    DecisionLog log;
    const auto u = sc_decode({2.0, 2.0}, code, KernelId::exact(), 0, &log);
    CHECK(u == std::vector<std::uint8_t>{0, 0});
    REQUIRE(log.size() == 2);
    CHECK(log[0].frozen);
    CHECK(log[1].llr == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("N=2 all-info, min-sum and exact agree on the worked numbers") {
    CodeSpec code = all_info(1);
    for (const KernelId& kernel : {KernelId::minsum(), KernelId::exact()}) {
      DecisionLog log;
      const auto u = sc_decode({1.0, -3.0}, code, kernel, 0, &log);
      CHECK(u == std::vector<std::uint8_t>{1, 1});
      if (kernel.tag == KernelId::Tag::kMinsum) {
        CHECK(log[0].llr == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(log[1].llr == doctest::Approx(-4.0).epsilon(1e-12));
      }
    }
  }
  SUBCASE("length mismatch") {
    CodeSpec code = all_info(2);
    CHECK_THROWS_AS(sc_decode({1.0, 2.0}, code, KernelId::exact()),
                    std::invalid_argument);
  }
}

TEST_CASE("boxplus log-domain identities") {
  CHECK(boxplus_llr(0.0, 5.0) == 0.0);
  CHECK(boxplus_llr(40.0, 40.0) == doctest::Approx(40.0 - std::log(2.0) +
                                                   std::log1p(std::exp(-80.0)))
                                       .epsilon(1e-12));
  // sign multiplicativity
  CHECK(boxplus_llr(3.0, -2.0) < 0.0);
  CHECK(boxplus_llr(-3.0, -2.0) > 0.0);
  CHECK(std::fabs(boxplus_llr(3.0, 2.0)) <= 2.0);
}

TEST_CASE("run_bler basics") {
  SUBCASE("noiseless channel never errs") {
    const CodeSpec code = build_code(0.4, 6, 32);
    const BlerStats stats = run_bler(code, bsc_spec(0.0), 200, KernelId::exact(), 3);
    CHECK(stats.block_errors == 0);
    CHECK(stats.bler == 0.0);
  }
  SUBCASE("k=0 code cannot err") {
    const CodeSpec code = build_code(0.4, 4, 0);
    const BlerStats stats = run_bler(code, bec_spec(0.4), 100, KernelId::exact(), 3);
    CHECK(stats.block_errors == 0);
    CHECK(stats.bit_errors == 0);
  }
  SUBCASE("full erasure decides info bits by fair coin") {
    const int k = 4;
    const CodeSpec code = build_code(0.4, 4, k);
    const long long trials = 4000;
    const BlerStats stats =
        run_bler(code, bec_spec(1.0), trials, KernelId::exact(), 17);
    const double expect = 1.0 - std::pow(2.0, -k);
    CHECK(test_oracles::binomial_within(stats.bler, expect, trials, 3.0));
  }
  SUBCASE("deterministic and thread-count invariant") {
    const CodeSpec code = build_code(0.4, 6, 24);
    const BlerStats a = run_bler(code, bec_spec(0.4), 500, KernelId::exact(), 7, 1);
    const BlerStats b = run_bler(code, bec_spec(0.4), 500, KernelId::exact(), 7, 4);
    CHECK(a.block_errors == b.block_errors);
    CHECK(a.bit_errors == b.bit_errors);
    CHECK(a.bler == b.bler);
    const BlerStats c = run_bler(code, bec_spec(0.4), 500, KernelId::exact(), 8, 1);
    CHECK(a.block_errors != c.block_errors);  // different seed, different draw
  }
  CHECK_THROWS_AS(run_bler(build_code(0.4, 4, 4), bec_spec(0.4), 0,
                           KernelId::exact(), 1),
                  std::domain_error);
}

TEST_CASE("genie-aided rates match density evolution") {
  EvolveOptions opt;
  const TreeResult tree = evolve_tree(make_bec(0.4), 4, opt);
  const CodeSpec code = all_info(4);
  const long long trials = 30000;
  const GenieStats g = run_genie(code, bec_spec(0.4), trials, KernelId::exact(), 99);
  for (int i = 0; i < 16; ++i) {
    const double pe = tree.leaves()[static_cast<std::size_t>(i)].metrics.pe;
    const double p_eq = tree.leaves()[static_cast<std::size_t>(i)].metrics.p_eq;
    const double err = static_cast<double>(g.errors[static_cast<std::size_t>(i)]) / trials;
    const double era = static_cast<double>(g.erasures[static_cast<std::size_t>(i)]) / trials;
    CHECK(test_oracles::binomial_within(err, pe, trials, 3.5));
    CHECK(test_oracles::binomial_within(era, p_eq, trials, 3.5));
  }
}

TEST_CASE("genie on the BSC reproduces the tie structure of density evolution") {
  // Synthetic BSC channels carry real mass at L = 1; the decoder only sees it
  // when the boxplus kernel is exactly odd, so exact cancellations surface as
  // zeros. This pins the whole pipeline: transforms, indexing, tie handling.
  EvolveOptions opt;
  const TreeResult tree = evolve_tree(make_bsc(0.11), 4, opt);
  const CodeSpec code = all_info(4);
  const long long trials = 30000;
  std::vector<long long> ties(16, 0);
  GenieStats g;
  g.erasures.assign(16, 0);
  g.errors.assign(16, 0);
  const std::vector<std::uint8_t> zeros(16, 0);
  for (long long t = 0; t < trials; ++t) {
    const auto llr = sample_output(bsc_spec(0.11), zeros, mix_seed(7, t));
    DecisionLog log;
    sc_decode(llr, code, KernelId::exact(), mix_seed(7, t, 99), &log, &g);
    for (const auto& d : log)
      if (d.tie) ++ties[static_cast<std::size_t>(d.bit)];
  }
  for (int i = 0; i < 16; ++i) {
    const auto& m = tree.leaves()[static_cast<std::size_t>(i)].metrics;
    const double err = static_cast<double>(g.errors[static_cast<std::size_t>(i)]) / trials;
    const double tie = static_cast<double>(ties[static_cast<std::size_t>(i)]) / trials;
    CHECK(test_oracles::binomial_within(err, m.pe, trials, 3.5));
    CHECK(test_oracles::binomial_within(tie, m.p_eq, trials, 3.5));
  }
}

TEST_CASE("exact and min-sum decisions coincide on the BEC under consistent feedback") {
  const CodeSpec code = build_code(0.4, 5, 16);
  const std::vector<std::uint8_t> zeros(32, 0);
  for (int t = 0; t < 400; ++t) {
    const auto llr = sample_output(bec_spec(0.4), zeros, mix_seed(21, t));
    GenieStats ga, gb;
    ga.erasures.assign(32, 0);
    ga.errors.assign(32, 0);
    gb = ga;
    DecisionLog la, lb;
    sc_decode(llr, code, KernelId::exact(), mix_seed(21, t, 1), &la, &ga);
    sc_decode(llr, code, KernelId::minsum(), mix_seed(21, t, 1), &lb, &gb);
    REQUIRE(la.size() == lb.size());
    for (std::size_t i = 0; i < la.size(); ++i) {
      CHECK(la[i].value == lb[i].value);
      CHECK(la[i].tie == lb[i].tie);
    }
    // free-running decoders agree at least up to the first coin decision
    DecisionLog fa, fb;
    sc_decode(llr, code, KernelId::exact(), mix_seed(21, t, 1), &fa);
    sc_decode(llr, code, KernelId::minsum(), mix_seed(21, t, 1), &fb);
    for (std::size_t i = 0; i < fa.size(); ++i) {
      CHECK(fa[i].value == fb[i].value);
      CHECK(fa[i].tie == fb[i].tie);
      if (fa[i].tie) break;
    }
  }
}
