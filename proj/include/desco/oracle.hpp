#pragma once

#include "desco/de_sco.hpp"

#include <map>

namespace desco {

/// Earliest determination time of every erased sub-symbol under full
/// Gaussian elimination over all received channel symbols up to each slot.
/// Result maps slot -> per-row time (kNever if never pinned).
inline std::map<Slot, std::vector<Slot>> ml_sub_times(const std::vector<Component>& comps, const GaloisField& f,
                                                      const ReceivedStream& rx) {
  const unsigned R = comps.at(0).code->rows(), P = comps.at(0).code->parities();
  const Slot H = static_cast<Slot>(rx.size());
  std::map<Slot, std::size_t> base;
  std::vector<std::pair<Slot, unsigned>> unk;
  for (Slot s = 0; s < H; ++s)
    if (!rx[static_cast<std::size_t>(s)]) {
      base[s] = unk.size();
      for (unsigned r = 0; r < R; ++r) unk.push_back({s, r});
    }
  std::map<Slot, std::vector<Slot>> times;
  for (const auto& [s, i] : base) times[s] = std::vector<Slot>(R, kNever);
  if (unk.empty()) return times;

  std::vector<std::vector<std::vector<DiagonalCode::Term>>> terms;
  for (const auto& c : comps) {
    std::vector<std::vector<DiagonalCode::Term>> t;
    for (unsigned k = 0; k < P; ++k) t.push_back(c.code->terms(k));
    terms.push_back(std::move(t));
  }
  RowEchelon re(f, unk.size());
  std::size_t open = unk.size();
  for (Slot t = base.begin()->first; t < H && open > 0; ++t) {
    const auto& x = rx[static_cast<std::size_t>(t)];
    if (!x) continue;
    for (unsigned k = 0; k < P; ++k) {
      std::vector<Symbol> row(unk.size(), 0);
      Symbol rhs = x->parities[k];
      for (std::size_t c = 0; c < comps.size(); ++c)
        for (const auto& term : terms[c][k]) {
          const Slot s = t - comps[c].shift - term.lag;
          if (s < 0) continue;
          auto it = base.find(s);
          if (it != base.end()) {
            Symbol& cell = row[it->second + term.row];
            cell = f.add(cell, term.coeff);
          } else {
            rhs = f.sub(rhs, f.mul(term.coeff, (*rx[static_cast<std::size_t>(s)]).subs[term.row]));
          }
        }
      for (std::size_t col : re.add(std::move(row), rhs)) {
        times[unk[col].first][unk[col].second] = t;
        --open;
      }
    }
  }
  return times;
}

inline StreamLog ml_log(const std::map<Slot, std::vector<Slot>>& sub, Slot horizon, Slot deadline) {
  StreamLog lg;
  lg.deadline = deadline;
  lg.recovery.resize(static_cast<std::size_t>(horizon));
  for (Slot s = 0; s < horizon; ++s) lg.recovery[static_cast<std::size_t>(s)] = s;
  for (const auto& [s, v] : sub) {
    Slot w = 0;
    for (Slot t : v) w = std::max(w, t);
    lg.recovery[static_cast<std::size_t>(s)] = w;
    lg.sub_times[s] = v;
  }
  lg.finalize_misses();
  return lg;
}

/// Oracle recovery log for a single-user codec.
inline StreamLog ml_decode_times(const ScoCodec& c, const ErasurePattern& pat, const ChannelStream& tx) {
  const auto rx = apply_pattern(pat, tx);
  return ml_log(ml_sub_times(c.components(), *c.field(), rx), static_cast<Slot>(rx.size()), Slot{c.params().T});
}

/// Oracle recovery log for a two-user codec on the outer stream; `user`
/// only selects the deadline.
inline StreamLog ml_decode_times(const DeScoCodec& c, const ErasurePattern& pat, const ChannelStream& tx, int user) {
  const auto in = expand_received(c, apply_pattern(pat, tx));
  const auto lg = ml_log(ml_sub_times(c.components(), *c.field(), in), static_cast<Slot>(in.size()),
                         user == 1 ? c.inner_deadline1() : c.inner_deadline2());
  return collapse_log(c, lg, user == 1 ? c.deadline1() : c.deadline2());
}

// ---- information-debt model of a random linear code -----------------------

/// Debt in units where one channel symbol carries one unit and one source
/// symbol carries R units.
struct DebtState {
  Rational debt{0};
  std::vector<Slot> pending;
  std::map<Slot, Slot> decoded_at;
  /// Debt after each slot, for inspection.
  std::vector<Rational> trajectory;
};

inline DebtState rlc_debt(Rational R, const ErasurePattern& pat, Slot horizon) {
  if (R <= Rational(0) || R >= Rational(1)) throw usage_error("rlc: need 0 < R < 1");
  DebtState st;
  for (Slot t = 0; t < horizon; ++t) {
    if (pat.erased(t)) {
      st.debt += R;
      st.pending.push_back(t);
    } else {
      st.debt = std::max(Rational(0), st.debt - (Rational(1) - R));
      st.decoded_at[t] = t;
      if (st.debt <= Rational(0)) {
        for (Slot s : st.pending) st.decoded_at[s] = t;
        st.pending.clear();
      }
    }
    st.trajectory.push_back(st.debt);
  }
  return st;
}

/// Per-slot decode times under the debt model; slots pending at the horizon are kNever.
inline StreamLog rlc_decode_times(Rational R, const ErasurePattern& pat, Slot horizon, Slot deadline = 0) {
  const auto st = rlc_debt(R, pat, horizon);
  StreamLog lg;
  lg.deadline = deadline;
  lg.recovery.assign(static_cast<std::size_t>(horizon), kNever);
  for (const auto& [s, t] : st.decoded_at) lg.recovery[static_cast<std::size_t>(s)] = t;
  for (Slot s : pat.slots())
    if (s < horizon) lg.sub_times[s] = {lg.recovery[static_cast<std::size_t>(s)]};
  lg.finalize_misses();
  return lg;
}

/// Symbols of an isolated burst of length L that miss delay T.
inline Slot rlc_burst_losses(Rational R, Slot T, Slot L) {
  if (L <= 0) return 0;
  const Rational need = Rational(L) * R / (Rational(1) - R);
  const Slot nu = ceil(need);
  return std::clamp<Slot>(L - 1 + nu - T, 0, L);
}

/// Burst length above which the first symbol is said to miss delay T.
inline Slot rlc_perfect_threshold(Rational R, Slot T) { return ceil((Rational(1) - R) * Rational(T)); }

/// Largest burst the debt model recovers entirely within delay T.
inline Slot rlc_exact_threshold(Rational R, Slot T) { return floor((Rational(1) - R) * Rational(T + 1)); }

inline Rational rlc_partial_threshold_exact(unsigned B1, unsigned T1, unsigned B2) {
  if (T1 == 0) throw usage_error("rlc_partial_threshold: T1 must be positive");
  return Rational(B2) + Rational(B1 * B1, T1);
}

/// B2 + B1^2/T1, rounded down when fractional.
inline Slot rlc_partial_threshold(unsigned B1, unsigned T1, unsigned B2) {
  return floor(rlc_partial_threshold_exact(B1, T1, B2));
}

}  // namespace desco
