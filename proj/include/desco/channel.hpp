#pragma once

#include "desco/types.hpp"

#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace desco {

/// Erased slots within [0, horizon).
class ErasurePattern {
 public:
  ErasurePattern() = default;
  ErasurePattern(std::set<Slot> erased, Slot horizon) : erased_(std::move(erased)), horizon_(horizon) {
    if (horizon_ < 0) throw usage_error("negative horizon");
    if (!erased_.empty() && (*erased_.begin() < 0 || *erased_.rbegin() >= horizon_))
      throw usage_error("erased slot outside horizon");
  }

  Slot horizon() const { return horizon_; }
  const std::set<Slot>& slots() const { return erased_; }
  bool erased(Slot s) const { return erased_.count(s) != 0; }
  std::size_t count() const { return erased_.size(); }
  bool empty() const { return erased_.empty(); }

  /// Maximal runs as (start, length).
  std::vector<std::pair<Slot, Slot>> bursts() const {
    std::vector<std::pair<Slot, Slot>> out;
    for (Slot s : erased_) {
      if (!out.empty() && out.back().first + out.back().second == s)
        ++out.back().second;
      else
        out.push_back({s, 1});
    }
    return out;
  }

  friend bool operator==(const ErasurePattern&, const ErasurePattern&) = default;

 private:
  std::set<Slot> erased_;
  Slot horizon_ = 0;
};

inline ErasurePattern single_burst(Slot start, Slot length, Slot horizon) {
  if (start < 0 || length < 0 || start + length > horizon) throw usage_error("single_burst: burst outside horizon");
  std::set<Slot> s;
  for (Slot t = start; t < start + length; ++t) s.insert(t);
  return {std::move(s), horizon};
}

enum class PeriodicRegime { high_delay, low_delay };

/// Each period opens with B2 erasures. Period (B2-B1)+T2 in the high-delay
/// regime and T+B2 in the low-delay regime, where T is passed as t_low.
inline ErasurePattern periodic_pattern(unsigned B1, unsigned B2, unsigned T2, PeriodicRegime regime, unsigned periods,
                                       unsigned t_low = 0) {
  if (B1 == 0 || B2 <= B1) throw usage_error("periodic_pattern: need B2 > B1 >= 1");
  Slot period = 0;
  if (regime == PeriodicRegime::high_delay) {
    period = Slot{B2} - B1 + T2;
  } else {
    if (t_low == 0) throw usage_error("periodic_pattern: low-delay regime needs T");
    period = Slot{t_low} + B2;
  }
  if (period <= Slot{B2}) throw usage_error("periodic_pattern: period shorter than burst");
  std::set<Slot> s;
  for (unsigned p = 0; p < periods; ++p)
    for (unsigned k = 0; k < B2; ++k) s.insert(Slot{p} * period + k);
  return {std::move(s), period * periods};
}

/// Period length used by periodic_pattern.
inline Slot periodic_period(unsigned B1, unsigned B2, unsigned T2, PeriodicRegime regime, unsigned t_low = 0) {
  return regime == PeriodicRegime::high_delay ? Slot{B2} - B1 + T2 : Slot{t_low} + B2;
}

/// Random stream for one segment: mt19937_64 keyed by (seed, segment).
inline std::mt19937_64 segment_rng(std::uint64_t seed, std::uint64_t segment) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(segment), static_cast<std::uint32_t>(segment >> 32)};
  return std::mt19937_64(seq);
}

/// Uniform integer in [0, n) from the top 53 bits of one draw.
inline std::uint64_t uniform_below(std::mt19937_64& g, std::uint64_t n) {
  const std::uint64_t u = g() >> 11;
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(u) * n) >> 53);
}

/// (start, length) of the burst in one segment, start relative to the segment.
inline std::pair<Slot, Slot> segment_burst(std::uint64_t seed, std::uint64_t segment, Slot segment_len, Slot b_max) {
  auto g = segment_rng(seed, segment);
  const Slot len = static_cast<Slot>(uniform_below(g, static_cast<std::uint64_t>(b_max) + 1));
  const Slot start = static_cast<Slot>(uniform_below(g, static_cast<std::uint64_t>(segment_len - len + 1)));
  return {start, len};
}

/// One burst per segment; length uniform on [0, b_max], start uniform over in-segment positions.
inline ErasurePattern segmented_bursts(Slot segment_len, Slot b_max, std::uint64_t segments, std::uint64_t seed) {
  if (b_max < 0 || b_max >= segment_len) throw usage_error("segmented_bursts: need 0 <= b_max < segment_len");
  std::set<Slot> s;
  for (std::uint64_t k = 0; k < segments; ++k) {
    const auto [st, len] = segment_burst(seed, k, segment_len, b_max);
    const Slot base = static_cast<Slot>(k) * segment_len;
    for (Slot t = 0; t < len; ++t) s.insert(base + st + t);
  }
  return {std::move(s), segment_len * static_cast<Slot>(segments)};
}

/// Masks erased slots.
template <class Sym>
std::vector<std::optional<Sym>> apply_pattern(const ErasurePattern& p, const std::vector<Sym>& stream) {
  if (static_cast<Slot>(stream.size()) < p.horizon()) throw usage_error("apply_pattern: stream shorter than horizon");
  std::vector<std::optional<Sym>> out;
  out.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (p.erased(static_cast<Slot>(i)))
      out.emplace_back(std::nullopt);
    else
      out.emplace_back(stream[i]);
  }
  return out;
}

/// "horizon H" line, then one "start:length" line per burst.
inline void write_pattern(std::ostream& os, const ErasurePattern& p) {
  os << "horizon " << p.horizon() << "\n";
  for (const auto& [s, l] : p.bursts()) os << s << ":" << l << "\n";
}

inline ErasurePattern read_pattern(std::istream& is, Slot default_horizon = -1) {
  std::string line;
  Slot horizon = default_horizon;
  std::set<Slot> s;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    if (line.rfind("horizon", 0) == 0) {
      std::string kw;
      if (!(ls >> kw >> horizon)) throw format_error("pattern line " + std::to_string(lineno) + ": bad horizon");
      continue;
    }
    Slot st = 0, len = 0;
    char colon = 0;
    if (!(ls >> st >> colon >> len) || colon != ':' || st < 0 || len < 0)
      throw format_error("pattern line " + std::to_string(lineno) + ": expected start:length");
    for (Slot t = st; t < st + len; ++t) s.insert(t);
  }
  if (horizon < 0) horizon = s.empty() ? 0 : *s.rbegin() + 1;
  if (!s.empty() && *s.rbegin() >= horizon) throw format_error("pattern: burst extends past horizon");
  return {std::move(s), horizon};
}

}  // namespace desco
