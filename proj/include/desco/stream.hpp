#pragma once

#include "desco/types.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

namespace desco {

/// One source symbol split into sub-symbols.
struct SourceSymbol {
  std::vector<Symbol> subs;
  friend bool operator==(const SourceSymbol&, const SourceSymbol&) = default;
};

/// What goes on the wire in one slot: source sub-symbols then parities.
struct ChannelSymbol {
  std::vector<Symbol> subs;
  std::vector<Symbol> parities;
  friend bool operator==(const ChannelSymbol&, const ChannelSymbol&) = default;
};

using SourceStream = std::vector<SourceSymbol>;
using ChannelStream = std::vector<ChannelSymbol>;
/// Channel output; nullopt marks an erasure.
using ReceivedStream = std::vector<std::optional<ChannelSymbol>>;

/// Recovery times from one decode run.
struct StreamLog {
  Slot deadline = 0;
  /// Per slot: time the whole source symbol was known, kNever if unrecovered.
  std::vector<Slot> recovery;
  /// Per erased slot: time of each sub-symbol.
  std::map<Slot, std::vector<Slot>> sub_times;
  /// Slots whose recovery time exceeds slot + deadline (or never recovered).
  std::vector<Slot> misses;

  Slot delay(Slot s) const {
    const Slot r = recovery.at(static_cast<std::size_t>(s));
    return r == kNever ? kNever : r - s;
  }
  bool recovered(Slot s) const { return recovery.at(static_cast<std::size_t>(s)) != kNever; }

  /// Largest delay over erased slots (kNever if any is unrecovered, 0 if none erased).
  Slot max_delay() const {
    Slot m = 0;
    for (const auto& [s, v] : sub_times) {
      const Slot d = delay(s);
      if (d == kNever) return kNever;
      m = std::max(m, d);
    }
    return m;
  }

  void finalize_misses() {
    misses.clear();
    for (std::size_t s = 0; s < recovery.size(); ++s)
      if (recovery[s] == kNever || recovery[s] > static_cast<Slot>(s) + deadline) misses.push_back(static_cast<Slot>(s));
  }
};

/// Which decoder step determined a sub-symbol, and from which parity.
struct TraceEvent {
  int step = 0;           // 0 for single-user decodes, 1..7 for the staged user-2 decoder
  int round = 0;          // recursion index inside step 5
  int component = 0;      // 1 = C1, 2 = C2 (single-user decodes use 1)
  unsigned row = 0;       // sub-symbol row
  Slot slot = 0;          // source slot of the sub-symbol
  Slot time = 0;          // slot at which it became known
  int parity = -1;        // parity index within the component, -1 if not applicable
  Slot parity_slot = 0;   // own-time index of that parity in its component stream
  Slot q_slot = 0;        // channel slot carrying it
  /// True for parity-recovery events (steps 1 and 3): row/slot unused.
  bool parity_event = false;
};

}  // namespace desco
