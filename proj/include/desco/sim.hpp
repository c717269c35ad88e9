#pragma once

#include "desco/channel.hpp"
#include "desco/de_sco.hpp"
#include "desco/oracle.hpp"

#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace desco {

struct ExperimentConfig {
  unsigned b1 = 1, t1 = 2, a = 2, b = 1;
  std::vector<Slot> bmax_list{0, 1, 2, 3, 4, 5, 6, 7, 8};
  Slot segment_len = 2000;
  std::uint64_t segments = 10000;
  std::uint64_t seed = 1;
  std::vector<std::string> schemes{"desco", "ia", "rlc"};
  std::vector<int> users{1, 2};
  std::string out;

  void validate() const {
    if (b1 < 1 || t1 < b1) throw usage_error("need 1 <= b1 <= t1");
    if (b < 1 || a <= b) throw usage_error("need alpha = a/b > 1");
    if (segments < 1) throw usage_error("segments must be >= 1");
    if (segment_len < 1) throw usage_error("segment_len must be >= 1");
    for (Slot m : bmax_list)
      if (m < 0 || m >= segment_len) throw usage_error("b_max values must lie in [0, segment_len)");
    for (const auto& s : schemes)
      if (s != "desco" && s != "ia" && s != "rlc") throw usage_error("unknown scheme '" + s + "'");
    for (int u : users)
      if (u != 1 && u != 2) throw usage_error("users must be 1 or 2");
  }
};

struct LossRecord {
  Slot b_max = 0;
  std::string scheme;
  int user = 1;
  double loss_probability = 0;
  std::uint64_t symbols_total = 0;
  std::uint64_t symbols_lost = 0;
  std::uint64_t seed = 0;
};

inline constexpr const char* kCsvHeader = "b_max,scheme,user,loss_probability,symbols_total,symbols_lost,seed";

inline std::string csv_row(const LossRecord& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%lld,%s,%d,%.12g,%llu,%llu,%llu", static_cast<long long>(r.b_max), r.scheme.c_str(),
                r.user, r.loss_probability, static_cast<unsigned long long>(r.symbols_total),
                static_cast<unsigned long long>(r.symbols_lost), static_cast<unsigned long long>(r.seed));
  return buf;
}

inline void write_csv(std::ostream& os, const std::vector<LossRecord>& rows) {
  os << kCsvHeader << "\n";
  for (const auto& r : rows) os << csv_row(r) << "\n";
}

/// Deadline each user is held to in experiments: T1 and ceil(T2*).
inline Slot experiment_deadline(const DeScoParams& p, int user) {
  return user == 1 ? Slot{p.T1} : ceil(p.T2_star());
}

// ---- random linear code baseline -------------------------------------------

/// Deadline misses of the debt model over a sorted list of bursts. Debt is
/// kept in integer units of 1/den so the clearing slot is exact; the stream
/// is taken to continue erasure-free past the last burst.
inline std::uint64_t rlc_stream_losses(Rational R, const std::vector<std::pair<Slot, Slot>>& bursts, Slot deadline) {
  if (R <= Rational(0) || R >= Rational(1)) throw usage_error("rlc: need 0 < R < 1");
  const std::int64_t up = R.numerator(), down = R.denominator() - R.numerator();
  std::int64_t debt = 0;
  std::vector<std::pair<Slot, Slot>> pending;
  std::uint64_t lost = 0;
  Slot cur = 0;
  auto clear = [&](Slot at) {
    // slot x misses when at - x > deadline
    for (const auto& [s, l] : pending) {
      const Slot last_miss = at - deadline - 1;
      if (last_miss >= s) lost += static_cast<std::uint64_t>(std::min(l, last_miss - s + 1));
    }
    pending.clear();
    debt = 0;
  };
  for (const auto& [s, l] : bursts) {
    if (l <= 0) continue;
    if (s < cur) throw usage_error("rlc_stream_losses: bursts must be sorted and disjoint");
    const Slot gap = s - cur;
    if (debt > 0) {
      const Slot need = ceil_div(debt, down);
      if (need <= gap)
        clear(cur + need - 1);
      else
        debt -= gap * down;
    }
    debt += l * up;
    pending.push_back({s, l});
    cur = s + l;
  }
  if (debt > 0) clear(cur + ceil_div(debt, down) - 1);
  return lost;
}

// ---- DE-SCo / IA loss accounting by burst cluster --------------------------

/// Counts deadline misses for bursts that lie far enough apart to be decoded
/// independently. Each distinct cluster shape is decoded once on a local
/// stream of random data, and every recovered value is checked.
class ClusterLossModel {
 public:
  ClusterLossModel(const DeScoCodec& c, int user, Slot deadline, std::uint64_t seed)
      : c_(&c), user_(user), deadline_(deadline), rng_(seed) {
    Slot inner = 0;
    for (const auto& comp : c.components()) inner = std::max(inner, comp.code->span() + comp.shift);
    guard_ = ceil_div(inner + 1, Slot{c.expansion()}) + 1;
  }

  /// Bursts separated by at least this many clean outer slots never share an equation.
  Slot guard() const { return guard_; }

  /// Deadline misses among the erased slots of one cluster; bursts are
  /// (offset from the first start, length).
  Slot lost(const std::vector<std::pair<Slot, Slot>>& shape) {
    auto it = memo_.find(shape);
    if (it != memo_.end()) return it->second;
    const Slot v = decode(shape);
    memo_.emplace(shape, v);
    return v;
  }

  std::uint64_t total_lost(const std::vector<std::pair<Slot, Slot>>& bursts) {
    std::uint64_t sum = 0;
    std::vector<std::pair<Slot, Slot>> shape;
    Slot first = 0, end = 0;
    for (const auto& [s, l] : bursts) {
      if (l <= 0) continue;
      if (!shape.empty() && s - end >= guard_) {
        sum += static_cast<std::uint64_t>(lost(shape));
        shape.clear();
      }
      if (shape.empty()) first = s;
      if (!shape.empty() && shape.back().first + shape.back().second + first == s)
        shape.back().second += l;  // abutting bursts merge
      else
        shape.push_back({s - first, l});
      end = s + l;
    }
    if (!shape.empty()) sum += static_cast<std::uint64_t>(lost(shape));
    return sum;
  }

 private:
  Slot decode(const std::vector<std::pair<Slot, Slot>>& shape) {
    const Slot pre = guard_;
    const Slot span = shape.back().first + shape.back().second;
    const Slot horizon = pre + span + deadline_ + guard_ + 1;
    std::set<Slot> er;
    for (const auto& [o, l] : shape)
      for (Slot t = 0; t < l; ++t) er.insert(pre + o + t);
    const ErasurePattern pat(std::move(er), horizon);

    const auto& f = *c_->field();
    SourceStream src(static_cast<std::size_t>(horizon));
    for (auto& s : src) {
      s.subs.resize(c_->outer_sub_symbols());
      for (auto& v : s.subs) v = static_cast<Symbol>(uniform_below(rng_, f.order()));
    }
    const auto rx = apply_pattern(pat, desco_encode(*c_, src));
    const auto res = user_ == 1 ? decode_user1(*c_, rx) : decode_user2(*c_, rx);
    Slot miss = 0;
    for (Slot s : pat.slots()) {
      const Slot r = res.log.recovery[static_cast<std::size_t>(s)];
      if (r != kNever && res.stream[static_cast<std::size_t>(s)] != src[static_cast<std::size_t>(s)])
        throw decode_contradiction("simulation: decoder returned a wrong value at slot " + std::to_string(s));
      if (r == kNever || r - s > deadline_) ++miss;
    }
    return miss;
  }

  const DeScoCodec* c_;
  int user_;
  Slot deadline_;
  std::mt19937_64 rng_;
  Slot guard_ = 0;
  std::map<std::vector<std::pair<Slot, Slot>>, Slot> memo_;
};

inline std::vector<std::pair<Slot, Slot>> segment_bursts(const ExperimentConfig& cfg, Slot b_max) {
  std::vector<std::pair<Slot, Slot>> out;
  out.reserve(cfg.segments);
  for (std::uint64_t k = 0; k < cfg.segments; ++k) {
    const auto [st, len] = segment_burst(cfg.seed, k, cfg.segment_len, b_max);
    if (len > 0) out.push_back({static_cast<Slot>(k) * cfg.segment_len + st, len});
  }
  return out;
}

/// One record per (b_max, scheme, user), in config order.
inline std::vector<LossRecord> run_simulation(const ExperimentConfig& cfg) {
  cfg.validate();
  const DeScoParams p{cfg.b1, cfg.t1, cfg.a, cfg.b};
  const Rational R = p.rate();
  std::optional<DeScoCodec> desco, ia;
  for (const auto& s : cfg.schemes) {
    if (s == "desco" && !desco) desco = make_desco(cfg.b1, cfg.t1, cfg.a, cfg.b);
    if (s == "ia" && !ia) {
      if (cfg.b != 1) throw usage_error("the ia scheme needs an integer alpha");
      ia = ia_sco_build(cfg.b1, cfg.t1, cfg.a);
    }
  }
  std::map<std::pair<std::string, int>, ClusterLossModel> models;
  auto model = [&](const std::string& s, int u) -> ClusterLossModel& {
    auto it = models.find({s, u});
    if (it != models.end()) return it->second;
    const DeScoCodec& c = s == "desco" ? *desco : *ia;
    // Per-model data stream so results do not depend on sweep order.
    const std::uint64_t sub = cfg.seed ^ (s == "desco" ? 0x9E3779B97F4A7C15ull : 0xC2B2AE3D27D4EB4Full) ^ (u * 0x165667B1ull);
    return models.emplace(std::pair{s, u}, ClusterLossModel(c, u, experiment_deadline(p, u), sub)).first->second;
  };

  const std::uint64_t total = cfg.segments * static_cast<std::uint64_t>(cfg.segment_len);
  std::vector<LossRecord> out;
  for (Slot bm : cfg.bmax_list) {
    const auto bursts = segment_bursts(cfg, bm);
    for (const auto& s : cfg.schemes) {
      for (int u : cfg.users) {
        const Slot d = experiment_deadline(p, u);
        const std::uint64_t lost = s == "rlc" ? rlc_stream_losses(R, bursts, d) : model(s, u).total_lost(bursts);
        out.push_back({bm, s, u, static_cast<double>(lost) / static_cast<double>(total), total, lost, cfg.seed});
      }
    }
  }
  return out;
}

// ---- verification sweep -----------------------------------------------------

struct VerifyReport {
  Slot max_delay1 = 0, max_delay2 = 0;
  Slot expected1 = 0, expected2 = 0;
  std::uint64_t bursts_checked = 0;
  bool pass() const { return max_delay1 == expected1 && max_delay2 == expected2; }
};

/// Every burst of length 1..B_u starting in [0, window): decodes for user u
/// and records the largest delay. Wrong values throw.
inline VerifyReport verify_codec(const DeScoCodec& c, Slot window, std::uint64_t seed = 1) {
  VerifyReport rep;
  const auto& p = c.params();
  rep.expected1 = c.deadline1();
  rep.expected2 = c.deadline2();
  const Slot B2 = p.B2();
  const Slot horizon = window + B2 + rep.expected2 + 2;
  std::mt19937_64 g(seed);
  SourceStream src(static_cast<std::size_t>(horizon));
  for (auto& s : src) {
    s.subs.resize(c.outer_sub_symbols());
    for (auto& v : s.subs) v = static_cast<Symbol>(uniform_below(g, c.field()->order()));
  }
  const auto tx = desco_encode(c, src);
  for (int u : {1, 2}) {
    const Slot bu = u == 1 ? Slot{p.B1} : B2;
    Slot& worst = u == 1 ? rep.max_delay1 : rep.max_delay2;
    for (Slot len = 1; len <= bu; ++len) {
      for (Slot st = 0; st < window; ++st) {
        const auto rx = apply_pattern(single_burst(st, len, horizon), tx);
        const auto res = u == 1 ? decode_user1(c, rx) : decode_user2(c, rx);
        for (Slot s = st; s < st + len; ++s) {
          const Slot d = res.log.delay(s);
          if (d != kNever && res.stream[static_cast<std::size_t>(s)] != src[static_cast<std::size_t>(s)])
            throw decode_contradiction("verify: wrong value at slot " + std::to_string(s));
          worst = std::max(worst, d);
        }
        ++rep.bursts_checked;
      }
    }
  }
  return rep;
}

// ---- bounds -----------------------------------------------------------------

struct BoundsReport {
  Rational alpha, t2_star, rate, bound, capacity1, capacity2;
  Slot optimal = 0;
  bool feasible = false;
};

inline BoundsReport bounds_report(unsigned b1, unsigned t1, unsigned b2, unsigned t2) {
  if (b1 < 1 || t1 < b1) throw usage_error("need 1 <= b1 <= t1");
  if (b2 <= b1) throw usage_error("need b2 > b1");
  if (t2 < b2) throw usage_error("need t2 >= b2");
  BoundsReport r;
  r.alpha = Rational(b2, b1);
  r.t2_star = r.alpha * Rational(t1) + Rational(b1);
  r.rate = Rational(t1, t1 + b1);
  r.bound = rate_upper_bound(b1, b2, Rational(t2), t1);
  r.capacity1 = capacity(b1, t1);
  r.capacity2 = capacity(b2, t2);
  r.optimal = optimal_delay(b1, t1, r.alpha);
  r.feasible = Rational(t2) >= r.t2_star;
  return r;
}

// ---- periodic erasure channel ------------------------------------------------

struct PeriodicReport {
  Slot period = 0;
  unsigned periods = 0;
  /// Latest recovery time minus period end, over all periods (<= 0 on success).
  Slot worst_overrun = kNever;
  bool pass() const { return worst_overrun != kNever && worst_overrun <= 0; }
};

/// Joint decoding of both component codes on the periodic pattern with
/// burst B2 = alpha B1 and delay ceil(T2*); every erased slot of a period
/// must be recovered by the period's last slot.
inline PeriodicReport periodic_recovery(const DeScoCodec& c, unsigned periods, std::uint64_t seed = 1) {
  const auto& p = c.params();
  const unsigned T2 = static_cast<unsigned>(ceil(p.T2_star()));
  PeriodicReport rep;
  rep.period = periodic_period(p.B1, p.B2(), T2, PeriodicRegime::high_delay);
  rep.periods = periods;
  const auto pat = periodic_pattern(p.B1, p.B2(), T2, PeriodicRegime::high_delay, periods);
  std::mt19937_64 g(seed);
  SourceStream src(static_cast<std::size_t>(pat.horizon()));
  for (auto& s : src) {
    s.subs.resize(c.outer_sub_symbols());
    for (auto& v : s.subs) v = static_cast<Symbol>(uniform_below(g, c.field()->order()));
  }
  const auto rx = expand_received(c, apply_pattern(pat, desco_encode(c, src)));
  PeelingDecoder dec(c.components(), *c.field(), rx);
  dec.refine_all(0);
  const auto lg = collapse_log(c, dec.log(c.inner_deadline2()), c.deadline2());
  const auto got = collapse_source(c, dec.source_stream());
  Slot worst = std::numeric_limits<Slot>::min();
  for (Slot s : pat.slots()) {
    const Slot r = lg.recovery[static_cast<std::size_t>(s)];
    if (r == kNever) return rep;
    if (got[static_cast<std::size_t>(s)] != src[static_cast<std::size_t>(s)])
      throw decode_contradiction("periodic: wrong value at slot " + std::to_string(s));
    const Slot end = (s / rep.period + 1) * rep.period - 1;
    worst = std::max(worst, r - end);
  }
  rep.worst_overrun = worst;
  return rep;
}

}  // namespace desco
