#include "desco/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace desco;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.bmax_list = {0, 1, 2, 3, 4};
  cfg.segment_len = 60;
  cfg.segments = 300;
  cfg.seed = 7;
  return cfg;
}

// Brute-force debt replay over the concatenated stream.
std::uint64_t debt_replay_losses(Rational R, const std::vector<std::pair<Slot, Slot>>& bursts, Slot horizon,
                                 Slot deadline) {
  std::set<Slot> er;
  for (const auto& [s, l] : bursts)
    for (Slot t = s; t < s + l; ++t) er.insert(t);
  const auto lg = rlc_decode_times(R, ErasurePattern(er, horizon), horizon, deadline);
  std::uint64_t n = 0;
  for (Slot s : lg.misses) n += er.count(s);
  return n;
}

}  // namespace

TEST(Sim, CsvRowFormat) {
  const LossRecord r{3, "desco", 2, 0.000125, 20000000, 2500, 1};
  EXPECT_EQ(csv_row(r), "3,desco,2,0.000125,20000000,2500,1");
  std::ostringstream os;
  write_csv(os, {r});
  EXPECT_EQ(os.str(), std::string(kCsvHeader) + "\n" + csv_row(r) + "\n");
  EXPECT_EQ(csv_row({0, "rlc", 1, 1.0 / 3.0, 3, 1, 9}), "0,rlc,1,0.333333333333,3,1,9");
}

TEST(Sim, ExperimentDeadlines) {
  EXPECT_EQ(experiment_deadline({1, 2, 2, 1}, 1), 2);
  EXPECT_EQ(experiment_deadline({1, 2, 2, 1}, 2), 5);
  EXPECT_EQ(experiment_deadline({2, 3, 3, 2}, 2), 7);
}

TEST(Sim, ConfigValidation) {
  auto bad = [](auto mutate) {
    ExperimentConfig c = small_config();
    mutate(c);
    return c;
  };
  EXPECT_NO_THROW(small_config().validate());
  EXPECT_THROW(bad([](auto& c) { c.b1 = 3; }).validate(), usage_error);
  EXPECT_THROW(bad([](auto& c) { c.a = 1; }).validate(), usage_error);
  EXPECT_THROW(bad([](auto& c) { c.segments = 0; }).validate(), usage_error);
  EXPECT_THROW(bad([](auto& c) { c.bmax_list = {60}; }).validate(), usage_error);
  EXPECT_THROW(bad([](auto& c) { c.schemes = {"mds"}; }).validate(), usage_error);
  EXPECT_THROW(bad([](auto& c) { c.users = {3}; }).validate(), usage_error);
  EXPECT_THROW(run_simulation(bad([](auto& c) {
                 c.a = 3;
                 c.b = 2;
                 c.b1 = 2;
               })),
               usage_error);  // ia needs integer alpha
}

TEST(Sim, RlcStreamLossesMatchesDebtReplay) {
  std::mt19937_64 g(1);
  for (auto R : {Rational(1, 2), Rational(2, 3), Rational(3, 4)})
    for (int trial = 0; trial < 60; ++trial) {
      std::vector<std::pair<Slot, Slot>> bursts;
      Slot t = static_cast<Slot>(g() % 5);
      while (t < 150) {
        const Slot l = 1 + static_cast<Slot>(g() % 6);
        bursts.push_back({t, l});
        t += l + static_cast<Slot>(g() % 12);  // gap may be zero
      }
      // Merge abutting bursts as the replay sees them.
      std::vector<std::pair<Slot, Slot>> merged;
      for (const auto& b : bursts)
        if (!merged.empty() && merged.back().first + merged.back().second == b.first)
          merged.back().second += b.second;
        else
          merged.push_back(b);
      const Slot deadline = 1 + static_cast<Slot>(g() % 8);
      ASSERT_EQ(rlc_stream_losses(R, bursts, deadline), debt_replay_losses(R, bursts, 400, deadline))
          << to_string(R) << " trial " << trial;
      ASSERT_EQ(rlc_stream_losses(R, merged, deadline), rlc_stream_losses(R, bursts, deadline));
    }
  EXPECT_THROW(rlc_stream_losses(Rational(1, 2), {{5, 2}, {3, 1}}, 3), usage_error);
}

TEST(Sim, ClusterModelMatchesFullStreamDecode) {
  // Clustered accounting agrees with decoding the whole concatenated stream.
  for (auto c : {make_desco(1, 2, 2, 1), make_desco(2, 3, 3, 2), ia_sco_build(1, 2, 2)}) {
    for (int u : {1, 2}) {
      const Slot d = experiment_deadline(c.params(), u);
      ClusterLossModel m(c, u, d, 5);
      ExperimentConfig cfg;
      cfg.segment_len = 12;
      cfg.segments = 40;
      cfg.seed = 11;
      const auto bursts = segment_bursts(cfg, c.params().B2() + 1);
      std::set<Slot> er;
      for (const auto& [s, l] : bursts)
        for (Slot t = s; t < s + l; ++t) er.insert(t);
      const Slot H = cfg.segment_len * static_cast<Slot>(cfg.segments) + 3 * d + 20;
      std::mt19937_64 g(3);
      SourceStream src(static_cast<std::size_t>(H));
      for (auto& x : src) {
        x.subs.resize(c.outer_sub_symbols());
        for (auto& v : x.subs) v = static_cast<Symbol>(g() % c.field()->order());
      }
      const auto rx = apply_pattern(ErasurePattern(er, H), desco_encode(c, src));
      const auto res = u == 1 ? decode_user1(c, rx) : decode_user2(c, rx);
      std::uint64_t direct = 0;
      for (Slot s : er)
        if (!res.log.recovered(s) || res.log.delay(s) > d) ++direct;
      EXPECT_EQ(m.total_lost(bursts), direct) << "user " << u;
    }
  }
}

TEST(Sim, ClusterGuardCoversCodeMemory) {
  const auto c = make_desco(2, 5, 2, 1);
  ClusterLossModel m(c, 2, 12, 1);
  Slot span = 0;
  for (const auto& comp : c.components()) span = std::max(span, comp.code->span() + comp.shift);
  EXPECT_GT(m.guard(), span);
}

TEST(Sim, DeterministicAndOrdered) {
  const auto cfg = small_config();
  const auto a = run_simulation(cfg);
  const auto b = run_simulation(cfg);
  std::ostringstream sa, sb;
  write_csv(sa, a);
  write_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  ASSERT_EQ(a.size(), 5u * 3u * 2u);
  EXPECT_EQ(a[0].b_max, 0);
  EXPECT_EQ(a[0].scheme, "desco");
  EXPECT_EQ(a[1].user, 2);
  EXPECT_EQ(a[2].scheme, "ia");
  EXPECT_EQ(a[6].b_max, 1);
  for (const auto& r : a) {
    EXPECT_EQ(r.symbols_total, 60u * 300u);
    if (r.b_max == 0) EXPECT_EQ(r.symbols_lost, 0u);
  }
}

TEST(Sim, DescoUserTwoLossFreeUpToB2) {
  const auto rows = run_simulation(small_config());
  for (const auto& r : rows) {
    if (r.scheme == "desco" && r.user == 2 && r.b_max <= 2) EXPECT_EQ(r.symbols_lost, 0u);
    if (r.scheme == "desco" && r.user == 1 && r.b_max <= 1) EXPECT_EQ(r.symbols_lost, 0u);
  }
}

TEST(Sim, VerifyReport) {
  const auto r = verify_codec(make_desco(1, 2, 2, 1), 12);
  EXPECT_TRUE(r.pass());
  EXPECT_EQ(r.max_delay1, 2);
  EXPECT_EQ(r.max_delay2, 5);
  EXPECT_EQ(r.bursts_checked, 12u * 3u);
}

TEST(Sim, BoundsReport) {
  const auto r = bounds_report(1, 2, 2, 4);
  EXPECT_EQ(r.bound, Rational(3, 5));
  EXPECT_EQ(r.rate, Rational(2, 3));
  EXPECT_EQ(r.optimal, 5);
  EXPECT_FALSE(r.feasible);
  EXPECT_TRUE(bounds_report(1, 2, 2, 5).feasible);
  EXPECT_EQ(bounds_report(1, 2, 2, 5).bound, Rational(2, 3));
  EXPECT_THROW(bounds_report(2, 2, 2, 5), usage_error);
}

TEST(Sim, PeriodicRecovery) {
  for (auto c : {make_desco(1, 2, 2, 1), make_desco(2, 5, 2, 1), make_desco(2, 3, 3, 2)}) {
    const auto r = periodic_recovery(c, 6);
    EXPECT_TRUE(r.pass()) << "overrun " << r.worst_overrun;
  }
}

TEST(Sim, DescoUserTwoLossMatchesClosedForm) {
  // Bursts up to B2 cost nothing, longer ones lose every symbol.
  ExperimentConfig cfg;
  cfg.schemes = {"desco"};
  cfg.users = {2};
  cfg.bmax_list = {2, 4, 6, 8};
  const Slot B2 = 2;
  const auto rows = run_simulation(cfg);
  for (const auto& r : rows) {
    double m1 = 0, m2 = 0;
    for (Slot L = 0; L <= r.b_max; ++L) {
      const double x = L > B2 ? static_cast<double>(L) : 0.0;
      m1 += x;
      m2 += x * x;
    }
    m1 /= static_cast<double>(r.b_max + 1);
    m2 /= static_cast<double>(r.b_max + 1);
    const double N = static_cast<double>(cfg.segments);
    const double se = std::sqrt(N * (m2 - m1 * m1));
    EXPECT_LE(std::abs(static_cast<double>(r.symbols_lost) - N * m1), 3 * se + 1e-9) << "b_max " << r.b_max;
  }
}

TEST(Sim, OverlongBurstLosesEverySymbolForUserTwo) {
  for (auto c : {make_desco(1, 2, 2, 1), make_desco(2, 5, 2, 1)}) {
    ClusterLossModel m(c, 2, c.deadline2(), 4);
    for (Slot L = c.params().B2() + 1; L <= c.params().B2() + 5; ++L) EXPECT_EQ(m.lost({{0, L}}), L);
  }
}
