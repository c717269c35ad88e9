#pragma once

#include "desco/diagonal.hpp"

#include <set>
#include <utility>
#include <vector>

namespace desco {

/// Restrictions for one codeword solve.
struct SolveLimits {
  Slot q_lo = kAlways;      // usable parities must sit on channel slots in [q_lo, q_hi]
  Slot q_hi = kNever;
  std::vector<bool> rows;   // rows that may be solved for; empty = all
};

/// Codeword-by-codeword decoder over one or more diagonal codes whose
/// parity streams are summed (each delayed by its component shift).
///
/// Every erased sub-symbol carries the earliest slot at which it is known.
/// A parity of one component is usable once its channel slot is received and
/// every source sub-symbol of the other components in that slot is known.
class PeelingDecoder {
 public:
  PeelingDecoder(std::vector<Component> comps, const GaloisField& f, const ReceivedStream& rx)
      : comps_(std::move(comps)), f_(&f), rx_(&rx), horizon_(static_cast<Slot>(rx.size())) {
    if (comps_.empty()) throw usage_error("PeelingDecoder: no components");
    rows_ = comps_[0].code->rows();
    parities_ = comps_[0].code->parities();
    for (const auto& c : comps_) {
      if (c.code->rows() != rows_ || c.code->parities() != parities_)
        throw usage_error("PeelingDecoder: components disagree on shape");
      std::vector<std::vector<DiagonalCode::Term>> t;
      for (unsigned k = 0; k < parities_; ++k) t.push_back(c.code->terms(k));
      terms_.push_back(std::move(t));
    }
    index_.assign(rx.size(), -1);
    for (Slot s = 0; s < horizon_; ++s) {
      if (rx[static_cast<std::size_t>(s)]) continue;
      index_[static_cast<std::size_t>(s)] = static_cast<int>(states_.size());
      states_.push_back({s, std::vector<Slot>(rows_, kNever), std::vector<Symbol>(rows_, 0)});
    }
  }

  unsigned rows() const { return rows_; }
  Slot horizon() const { return horizon_; }
  std::size_t components() const { return comps_.size(); }
  const Component& component(std::size_t c) const { return comps_[c]; }

  bool erased(Slot s) const { return s >= 0 && s < horizon_ && index_[static_cast<std::size_t>(s)] >= 0; }

  /// (time known, value) of source sub-symbol s_row[s].
  std::pair<Slot, Symbol> source(unsigned row, Slot s) const {
    if (s < 0) return {kAlways, 0};
    if (s >= horizon_) return {kNever, 0};
    const int i = index_[static_cast<std::size_t>(s)];
    if (i >= 0) return {states_[static_cast<std::size_t>(i)].time[row], states_[static_cast<std::size_t>(i)].value[row]};
    return {s, (*rx_)[static_cast<std::size_t>(s)]->subs[row]};
  }

  /// (time usable, value) of parity k of component c at its own slot u.
  std::pair<Slot, Symbol> parity(std::size_t c, unsigned k, Slot u) const {
    const Slot t = u + comps_[c].shift;
    if (t < 0 || t >= horizon_ || erased(t)) return {kNever, 0};
    Symbol v = (*rx_)[static_cast<std::size_t>(t)]->parities[k];
    Slot when = t;
    for (std::size_t o = 0; o < comps_.size(); ++o) {
      if (o == c) continue;
      const Slot uo = t - comps_[o].shift;
      for (const auto& term : terms_[o][k]) {
        const auto [tm, val] = source(term.row, uo - term.lag);
        if (tm == kNever) return {kNever, 0};
        when = std::max(when, tm);
        v = f_->sub(v, f_->mul(term.coeff, val));
      }
    }
    return {when, v};
  }

  /// Anchors of component c whose codeword touches an erased slot, ascending.
  std::vector<Slot> anchors(std::size_t c) const {
    std::set<Slot> out;
    const DiagonalCode& d = *comps_[c].code;
    for (const auto& st : states_)
      for (unsigned r = 0; r < rows_; ++r) out.insert(d.anchor_of(r, st.slot));
    return {out.begin(), out.end()};
  }

  /// Solves one codeword; lowers recovery times it can improve.
  std::vector<TraceEvent> solve(std::size_t c, Slot tau, const SolveLimits& lim = {}, int step = 0) {
    const DiagonalCode& d = *comps_[c].code;
    const unsigned T = d.rows(), B = d.parities();
    std::vector<Slot> ia(T), pa(B);
    std::vector<Symbol> iv(T), pv(B);
    std::vector<bool> targets(T, false);
    bool any = false;
    for (unsigned m = 0; m < T; ++m) {
      const unsigned r = d.row_of(m);
      const Slot s = d.info_slot(tau, m);
      std::tie(ia[m], iv[m]) = source(r, s);
      if (erased(s) && (lim.rows.empty() || lim.rows[r])) targets[m] = any = true;
    }
    if (!any) return {};
    std::vector<Slot> qs(B);
    for (unsigned k = 0; k < B; ++k) {
      const Slot u = d.parity_slot(tau, k);
      qs[k] = u + comps_[c].shift;
      std::tie(pa[k], pv[k]) = parity(c, k, u);
      if (qs[k] < lim.q_lo || qs[k] > lim.q_hi) pa[k] = kNever;
    }
    const auto res = solve_codeword(d.code, ia, iv, pa, pv, targets);
    std::vector<TraceEvent> ev;
    for (unsigned m = 0; m < T; ++m) {
      if (!targets[m] || res.time[m] >= ia[m]) continue;
      const unsigned r = d.row_of(m);
      const Slot s = d.info_slot(tau, m);
      auto& st = states_[static_cast<std::size_t>(index_[static_cast<std::size_t>(s)])];
      if (st.time[r] != kNever && st.value[r] != res.value[m])
        throw decode_contradiction("two decoding routes disagree on a sub-symbol value");
      st.time[r] = res.time[m];
      st.value[r] = res.value[m];
      TraceEvent e;
      e.step = step;
      e.component = static_cast<int>(c) + 1;
      e.row = r;
      e.slot = s;
      e.time = res.time[m];
      e.parity = res.trigger[m];
      if (e.parity >= 0) {
        e.parity_slot = d.parity_slot(tau, static_cast<unsigned>(e.parity));
        e.q_slot = qs[static_cast<std::size_t>(e.parity)];
      }
      ev.push_back(e);
    }
    return ev;
  }

  /// Repeats codeword solves over the given components until nothing improves.
  std::vector<TraceEvent> refine(const std::vector<std::size_t>& which, int step = 0) {
    std::vector<TraceEvent> all;
    std::vector<std::vector<Slot>> anc;
    for (std::size_t c : which) anc.push_back(anchors(c));
    for (bool changed = true; changed;) {
      changed = false;
      for (std::size_t i = 0; i < which.size(); ++i)
        for (Slot tau : anc[i]) {
          auto ev = solve(which[i], tau, {}, step);
          if (!ev.empty()) {
            changed = true;
            all.insert(all.end(), ev.begin(), ev.end());
          }
        }
    }
    return all;
  }

  std::vector<TraceEvent> refine_all(int step = 0) {
    std::vector<std::size_t> w(comps_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = i;
    return refine(w, step);
  }

  /// Per-slot recovery log against a deadline.
  StreamLog log(Slot deadline) const {
    StreamLog lg;
    lg.deadline = deadline;
    lg.recovery.resize(static_cast<std::size_t>(horizon_));
    for (Slot s = 0; s < horizon_; ++s) lg.recovery[static_cast<std::size_t>(s)] = s;
    for (const auto& st : states_) {
      Slot worst = 0;
      for (Slot t : st.time) worst = std::max(worst, t);
      lg.recovery[static_cast<std::size_t>(st.slot)] = worst;
      lg.sub_times[st.slot] = st.time;
    }
    lg.finalize_misses();
    return lg;
  }

  /// Source stream with unrecovered sub-symbols left as zero.
  SourceStream source_stream() const {
    SourceStream out(static_cast<std::size_t>(horizon_));
    for (Slot s = 0; s < horizon_; ++s) {
      auto& dst = out[static_cast<std::size_t>(s)].subs;
      dst.resize(rows_);
      for (unsigned r = 0; r < rows_; ++r) {
        const auto [tm, v] = source(r, s);
        dst[r] = tm == kNever ? 0 : v;
      }
    }
    return out;
  }

 private:
  struct SlotState {
    Slot slot;
    std::vector<Slot> time;
    std::vector<Symbol> value;
  };

  std::vector<Component> comps_;
  const GaloisField* f_;
  const ReceivedStream* rx_;
  Slot horizon_;
  unsigned rows_ = 0, parities_ = 0;
  std::vector<std::vector<std::vector<DiagonalCode::Term>>> terms_;
  std::vector<int> index_;
  std::vector<SlotState> states_;
};

}  // namespace desco
