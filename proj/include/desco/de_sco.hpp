#pragma once

#include "desco/channel.hpp"
#include "desco/sco.hpp"

#include <numeric>

namespace desco {

/// {(B1, T1), (alpha B1, alpha T1 + B1)} with alpha = a/b.
struct DeScoParams {
  unsigned B1 = 1, T1 = 2, a = 2, b = 1;

  Rational alpha() const { return Rational(a, b); }
  unsigned B2() const { return B1 * a / b; }
  unsigned B0() const { return B1 / b; }
  unsigned T0() const { return T1 / b; }
  unsigned ell() const { return a - b; }
  Slot delta() const { return Slot{T1} + B1; }
  Rational T2_star() const { return alpha() * Rational(T1) + Rational(B1); }
  Rational rate() const { return Rational(T1, T1 + B1); }

  /// Throws unless the direct construction applies (no expansion needed).
  void validate() const {
    if (b < 1 || a <= b) throw usage_error("need a > b >= 1");
    if (std::gcd(a, b) != 1) throw usage_error("a/b must be in lowest terms");
    if (B1 < 1 || B1 > T1) throw usage_error("need 1 <= B1 <= T1");
    if (B1 % b) throw usage_error("B1 must be a multiple of b");
    if (T1 % b) throw usage_error("T1 must be a multiple of b; expand the source first");
  }
};

/// ceil(alpha T + B).
inline Slot optimal_delay(unsigned B, unsigned T, Rational alpha) {
  if (alpha <= Rational(1)) throw usage_error("optimal_delay: alpha must exceed 1");
  if ((alpha * Rational(B)).denominator() != 1) throw usage_error("optimal_delay: alpha*B must be an integer");
  return ceil(alpha * Rational(T) + Rational(B));
}

struct Expansion {
  DeScoParams expanded;
  unsigned n = 1;
};

/// Smallest n with n*alpha*T integral; parameters scaled by n.
inline Expansion source_expand(unsigned B, unsigned T, unsigned a, unsigned b) {
  if (b < 1 || a <= b) throw usage_error("source_expand: need a > b >= 1");
  unsigned n = 1;
  while ((std::uint64_t{n} * a * T) % b) ++n;
  return {{n * B, n * T, a, b}, n};
}

/// Converse bound on rate for user 2 delay T2. When T1 is given and
/// T2 < T1 + B1, the low-delay form T1/(T1 + B2) applies.
inline Rational rate_upper_bound(unsigned B1, unsigned B2, Rational T2, std::optional<unsigned> T1 = std::nullopt) {
  if (B2 <= B1) throw usage_error("rate_upper_bound: need B2 > B1");
  if (T1 && T2 < Rational(*T1 + B1)) return Rational(*T1, *T1 + B2);
  return Rational(1) - Rational(B2) / (Rational(B2 - B1) + T2);
}

enum class Scheme { desco, ia };

/// Two-user codec: C1 on the main diagonal, C2 shifted by Delta.
///
/// When T1 is not a multiple of b the codec runs on an expanded stream with n
/// inner slots per outer slot; all public encode/decode calls use outer slots.
class DeScoCodec {
 public:
  Scheme scheme() const { return scheme_; }
  /// Parameters as requested (outer stream).
  const DeScoParams& params() const { return outer_; }
  /// Parameters the component codes are built for.
  const DeScoParams& inner() const { return inner_; }
  unsigned expansion() const { return n_; }
  Slot shift() const { return shift_; }
  const FieldPtr& field() const { return field_; }
  const DiagonalCode& c1() const { return *c1_; }
  const DiagonalCode& c2() const { return *c2_; }
  std::vector<Component> components() const { return {{c1_.get(), 0}, {c2_.get(), shift_}}; }

  unsigned rows() const { return c1_->rows(); }
  unsigned parities() const { return c1_->parities(); }
  unsigned outer_sub_symbols() const { return n_ * rows(); }
  unsigned outer_parities() const { return n_ * parities(); }

  Slot deadline1() const { return outer_.T1; }
  Slot deadline2() const {
    if (scheme_ == Scheme::ia) return Slot{outer_.a / outer_.b} * outer_.T1 + outer_.T1;
    return ceil(outer_.T2_star());
  }
  Slot inner_deadline1() const { return inner_.T1; }
  Slot inner_deadline2() const {
    if (scheme_ == Scheme::ia) return deadline2();
    return ceil(inner_.T2_star());
  }

  friend DeScoCodec desco_build(const DeScoParams&, std::optional<FieldSpec>, std::optional<Matrix>);
  friend DeScoCodec ia_sco_build(unsigned, unsigned, unsigned, std::optional<FieldSpec>, std::optional<Matrix>);
  friend DeScoCodec make_desco(unsigned, unsigned, unsigned, unsigned, std::optional<FieldSpec>, std::optional<Matrix>);

 private:
  Scheme scheme_ = Scheme::desco;
  DeScoParams outer_, inner_;
  unsigned n_ = 1;
  Slot shift_ = 0;
  FieldPtr field_;
  std::shared_ptr<const DiagonalCode> c1_, c2_;
};

namespace detail {

inline BurstParityMatrix parity_for(unsigned T0, unsigned B0, const FieldPtr& f, const std::optional<Matrix>& H) {
  if (!H) return make_burst_parity(T0, B0, f);
  BurstParityMatrix bp{*H, T0, B0, f};
  if (H->rows != T0 - B0 || H->cols != B0 || !verify_burst_correcting(bp))
    throw construction_error("supplied H is not burst-correcting for these parameters");
  return bp;
}

}  // namespace detail

/// Default field: smallest GF(2^m) holding T0 + B0 distinct elements.
inline FieldSpec default_desco_field(const DeScoParams& p) { return default_field_for(p.T0() + p.B0()); }

/// Direct construction; requires T1 to be a multiple of b.
inline DeScoCodec desco_build(const DeScoParams& p, std::optional<FieldSpec> field = std::nullopt,
                              std::optional<Matrix> H = std::nullopt) {
  p.validate();
  DeScoCodec c;
  c.scheme_ = Scheme::desco;
  c.outer_ = c.inner_ = p;
  c.field_ = GaloisField::make(field.value_or(default_desco_field(p)));
  const auto bp = detail::parity_for(p.T0(), p.B0(), c.field_, H);
  c.c1_ = std::make_shared<const DiagonalCode>(DiagonalCode{LdBebcCode(bp), p.b, Orientation::main_diagonal});
  c.c2_ = std::make_shared<const DiagonalCode>(DiagonalCode{LdBebcCode(bp), p.ell(), Orientation::off_diagonal});
  c.shift_ = p.delta();
  return c;
}

/// Builds a DE-SCo for any a/b, expanding the source when T1 is not a multiple of b.
inline DeScoCodec make_desco(unsigned B, unsigned T, unsigned a, unsigned b, std::optional<FieldSpec> field = std::nullopt,
                             std::optional<Matrix> H = std::nullopt) {
  const DeScoParams outer{B, T, a, b};
  if (b < 1 || a <= b || std::gcd(a, b) != 1) throw usage_error("need a > b >= 1 in lowest terms");
  if (B % b) throw usage_error("B1 must be a multiple of b");
  if (T % b == 0) return desco_build(outer, field, H);
  const auto e = source_expand(B, T, a, b);
  DeScoCodec c = desco_build(e.expanded, field, H);
  c.outer_ = outer;
  c.n_ = e.n;
  return c;
}

/// Interference-avoidance baseline: C2 is the (alpha B, alpha T) code on the
/// main diagonal with stride alpha; its parities are delayed by T.
inline DeScoCodec ia_sco_build(unsigned B, unsigned T, unsigned alpha, std::optional<FieldSpec> field = std::nullopt,
                               std::optional<Matrix> H = std::nullopt) {
  if (alpha < 2) throw usage_error("ia_sco_build: alpha must be an integer >= 2");
  if (B < 1 || B > T) throw usage_error("need 1 <= B <= T");
  DeScoCodec c;
  c.scheme_ = Scheme::ia;
  c.outer_ = c.inner_ = DeScoParams{B, T, alpha, 1};
  c.field_ = GaloisField::make(field.value_or(default_field_for(T + B)));
  const auto bp = detail::parity_for(T, B, c.field_, H);
  c.c1_ = std::make_shared<const DiagonalCode>(DiagonalCode{LdBebcCode(bp), 1, Orientation::main_diagonal});
  c.c2_ = std::make_shared<const DiagonalCode>(DiagonalCode{LdBebcCode(bp), alpha, Orientation::main_diagonal});
  c.shift_ = T;
  return c;
}

// ---- outer <-> inner stream mapping -------------------------------------

inline SourceStream expand_source(const DeScoCodec& c, const SourceStream& outer) {
  const unsigned n = c.expansion(), R = c.rows();
  SourceStream in;
  in.reserve(outer.size() * n);
  for (const auto& s : outer) {
    if (s.subs.size() != n * R) throw usage_error("source symbol has wrong sub-symbol count");
    for (unsigned r = 0; r < n; ++r)
      in.push_back({std::vector<Symbol>(s.subs.begin() + r * R, s.subs.begin() + (r + 1) * R)});
  }
  return in;
}

inline SourceStream collapse_source(const DeScoCodec& c, const SourceStream& inner) {
  const unsigned n = c.expansion();
  SourceStream out(inner.size() / n);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (unsigned r = 0; r < n; ++r) {
      const auto& v = inner[i * n + r].subs;
      out[i].subs.insert(out[i].subs.end(), v.begin(), v.end());
    }
  return out;
}

inline ReceivedStream expand_received(const DeScoCodec& c, const ReceivedStream& outer) {
  const unsigned n = c.expansion(), R = c.rows(), P = c.parities();
  ReceivedStream in;
  in.reserve(outer.size() * n);
  for (const auto& x : outer)
    for (unsigned r = 0; r < n; ++r) {
      if (!x) {
        in.emplace_back(std::nullopt);
        continue;
      }
      if (x->subs.size() != n * R || x->parities.size() != n * P) throw usage_error("channel symbol has wrong width");
      in.emplace_back(ChannelSymbol{std::vector<Symbol>(x->subs.begin() + r * R, x->subs.begin() + (r + 1) * R),
                                    std::vector<Symbol>(x->parities.begin() + r * P, x->parities.begin() + (r + 1) * P)});
    }
  return in;
}

/// Inner-slot log mapped to outer slots: inner slot u is received in outer slot u/n.
inline StreamLog collapse_log(const DeScoCodec& c, const StreamLog& in, Slot outer_deadline) {
  const Slot n = c.expansion();
  if (n == 1) {
    StreamLog out = in;
    out.deadline = outer_deadline;
    out.finalize_misses();
    return out;
  }
  auto outer_time = [&](Slot u) { return u == kNever ? kNever : floor_div(u, n); };
  StreamLog out;
  out.deadline = outer_deadline;
  out.recovery.assign(in.recovery.size() / static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < out.recovery.size(); ++i) {
    Slot worst = static_cast<Slot>(i);
    for (Slot r = 0; r < n; ++r) {
      const Slot t = outer_time(in.recovery[i * static_cast<std::size_t>(n) + static_cast<std::size_t>(r)]);
      worst = (t == kNever || worst == kNever) ? kNever : std::max(worst, t);
    }
    out.recovery[i] = worst;
  }
  for (const auto& [u, times] : in.sub_times) {
    auto& v = out.sub_times[floor_div(u, n)];
    v.resize(static_cast<std::size_t>(n) * c.rows(), 0);
    for (unsigned r = 0; r < c.rows(); ++r)
      v[static_cast<std::size_t>(u % n) * c.rows() + r] = outer_time(times[r]);
  }
  out.finalize_misses();
  return out;
}

// ---- encoding -------------------------------------------------------------

inline ChannelStream desco_encode(const DeScoCodec& c, const SourceStream& outer) {
  const auto in = encode_stream(c.components(), *c.field(), expand_source(c, outer));
  const unsigned n = c.expansion();
  ChannelStream out(outer.size());
  for (std::size_t i = 0; i < out.size(); ++i)
    for (unsigned r = 0; r < n; ++r) {
      const auto& x = in[i * n + r];
      out[i].subs.insert(out[i].subs.end(), x.subs.begin(), x.subs.end());
      out[i].parities.insert(out[i].parities.end(), x.parities.begin(), x.parities.end());
    }
  return out;
}

/// Channel symbol for s_now given earlier source symbols (oldest first).
inline ChannelSymbol desco_encode_step(const DeScoCodec& c, const SourceStream& history, const SourceSymbol& s_now) {
  SourceStream all = history;
  all.push_back(s_now);
  return desco_encode(c, all).back();
}

// ---- decoding -------------------------------------------------------------

/// Output of a two-user decode on the outer stream; trace uses inner slots.
struct DeScoDecodeResult {
  SourceStream stream;
  StreamLog log;
  std::vector<TraceEvent> trace;
  /// Values of C1 parities rebuilt in step 3, keyed by (slot, index).
  std::map<std::pair<Slot, unsigned>, Symbol> step3_parities;
};

namespace detail {

inline DeScoDecodeResult finish(const DeScoCodec& c, const PeelingDecoder& dec, Slot inner_deadline,
                                Slot outer_deadline) {
  DeScoDecodeResult out;
  out.stream = collapse_source(c, dec.source_stream());
  out.log = collapse_log(c, dec.log(inner_deadline), outer_deadline);
  return out;
}

}  // namespace detail

/// User 1: C1 codewords only, C2 interference cancelled as sources become known.
inline DeScoDecodeResult decode_user1(const DeScoCodec& c, const ReceivedStream& rx) {
  const auto in = expand_received(c, rx);
  PeelingDecoder dec(c.components(), *c.field(), in);
  auto trace = dec.refine({0}, 0);
  auto out = detail::finish(c, dec, c.inner_deadline1(), c.deadline1());
  out.trace = std::move(trace);
  return out;
}

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw decoder_invariant_violation(what);
}

/// The six staged steps for a burst starting at inner slot `start`.
inline void staged_user2(const DeScoCodec& c, PeelingDecoder& dec, Slot start, Slot len, DeScoDecodeResult& out) {
  const DeScoParams& p = c.inner();
  const Slot B = p.B1, T = p.T1, B2 = p.B2(), b = p.b, l = p.ell();
  const Slot T2 = ceil(p.T2_star());
  const Slot i = start + B2;
  const Slot horizon = dec.horizon();
  const Slot calT = i - B2 + T2;
  const unsigned T0 = p.T0(), B0 = p.B0(), K = T0 - B0;
  // Guarantees are checked only for a single burst within contract and a long enough stream.
  const bool contract = len <= B2 && horizon > i - 1 + T2;
  const DiagonalCode& d1 = c.c1();
  const DiagonalCode& d2 = c.c2();

  std::vector<bool> nonurgent(T0, false), urgent(T0, false);
  for (unsigned r = 0; r < T0; ++r) (r < K ? nonurgent : urgent)[r] = true;

  auto add = [&](std::vector<TraceEvent> ev, int round = 0) {
    for (auto& e : ev) e.round = round;
    out.trace.insert(out.trace.end(), ev.begin(), ev.end());
  };

  // (1) C2 parities carried at t >= i + T, C1 part cancelled.
  for (Slot t = i + T; t < std::min(horizon, i + T2); ++t)
    for (unsigned k = 0; k < B0; ++k) {
      const auto [when, v] = dec.parity(1, k, t - c.shift());
      if (contract) require(when == t, "step 1: C2 parity not recoverable at its slot");
      if (when == kNever) continue;
      TraceEvent e;
      e.step = 1, e.component = 2, e.parity = static_cast<int>(k), e.parity_slot = t - c.shift(), e.q_slot = t,
      e.time = when, e.parity_event = true;
      out.trace.push_back(e);
    }

  const SolveLimits c2_lim{i + T, calT - 1, nonurgent};
  const SolveLimits c1_lim{i, i + T - 1, nonurgent};

  // (2) Non-urgent rows of C2 diagonals over the first (alpha-1)B erased slots.
  for (Slot j = i - B2; j <= i - B - 1; ++j) add(dec.solve(1, d2.anchor_from_label(j), c2_lim, 2));

  // (3) C1 parities at i .. i+T-1 once their C2 interference is known.
  for (Slot t = i; t <= i + T - 1; ++t)
    for (unsigned k = 0; k < B0; ++k) {
      const auto [when, v] = dec.parity(0, k, t);
      if (contract) require(when != kNever && when < calT, "step 3: C1 parity not recoverable");
      if (when == kNever) continue;
      out.step3_parities[{t, k}] = v;
      TraceEvent e;
      e.step = 3, e.component = 1, e.parity = static_cast<int>(k), e.parity_slot = t, e.q_slot = t, e.time = when,
      e.parity_event = true;
      out.trace.push_back(e);
    }

  // (4) Non-urgent rows of C1 diagonals over the last B erased slots.
  for (Slot j = i - B; j <= i - 1; ++j) add(dec.solve(0, d1.anchor_from_label(j), c1_lim, 4));

  // (5) Alternate between the two codes.
  for (Slot k = 1; k <= T - B - 1; ++k) {
    for (Slot j = i - B - (k - 1) * b - 1; j >= i - B - k * b; --j)
      add(dec.solve(0, d1.anchor_from_label(j), c1_lim, 5), static_cast<int>(k));
    for (Slot j = i - B + (k - 1) * l; j <= i - B + k * l - 1; ++j)
      add(dec.solve(1, d2.anchor_from_label(j), c2_lim, 5), static_cast<int>(k));
  }
  if (contract)
    for (Slot s = start; s < start + len; ++s)
      for (unsigned r = 0; r < K; ++r) {
        const Slot t = dec.source(r, s).first;
        require(t != kNever && t <= calT - 1, "step 5: non-urgent sub-symbol left after the recursion");
      }

  // (6) Urgent rows from C2 parities.
  const SolveLimits urg{i + T, kNever, urgent};
  for (Slot s = start; s < start + len; ++s)
    for (unsigned r = K; r < T0; ++r) add(dec.solve(1, d2.anchor_of(r, s), urg, 6));
  if (contract)
    for (Slot s = start; s < start + len; ++s)
      for (unsigned r = 0; r < T0; ++r) {
        const Slot t = dec.source(r, s).first;
        require(t != kNever && t <= s + T2, "step 6: sub-symbol misses its deadline");
      }
}

}  // namespace detail

/// User 2. For DE-SCo a single burst runs the six staged steps first (trace
/// steps 1-6); a final joint pass (step 7) lowers every time to the earliest
/// slot reachable by codeword-wise decoding. The IA baseline decodes C2 only.
inline DeScoDecodeResult decode_user2(const DeScoCodec& c, const ReceivedStream& rx) {
  const auto in = expand_received(c, rx);
  PeelingDecoder dec(c.components(), *c.field(), in);
  DeScoDecodeResult out;
  std::vector<Slot> er;
  for (Slot s = 0; s < static_cast<Slot>(in.size()); ++s)
    if (!in[static_cast<std::size_t>(s)]) er.push_back(s);
  const bool single = !er.empty() && er.back() - er.front() + 1 == static_cast<Slot>(er.size());
  std::vector<TraceEvent> refined;
  if (c.scheme() == Scheme::ia) {
    // The baseline receiver decodes its own code, cancelling C1 as it goes.
    refined = dec.refine({1}, 0);
  } else {
    if (single) detail::staged_user2(c, dec, er.front(), static_cast<Slot>(er.size()), out);
    refined = dec.refine_all(7);
  }
  out.trace.insert(out.trace.end(), refined.begin(), refined.end());
  auto fin = detail::finish(c, dec, c.inner_deadline2(), c.deadline2());
  out.stream = std::move(fin.stream);
  out.log = std::move(fin.log);
  return out;
}

}  // namespace desco
