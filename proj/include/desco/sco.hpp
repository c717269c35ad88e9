#pragma once

#include "desco/engine.hpp"

#include <deque>
#include <optional>
#include <utility>

namespace desco {

/// Burst B and delay T in slots; the code runs on T/step sub-symbols per slot.
struct ScoParams {
  unsigned B = 1;
  unsigned T = 1;
  unsigned step = 1;
  Orientation orientation = Orientation::main_diagonal;
  FieldSpec field = FieldSpec::binary(1);

  unsigned sub_symbols() const { return T / step; }
  unsigned parities_per_slot() const { return B / step; }

  void validate() const {
    if (step < 1) throw usage_error("step must be >= 1");
    if (B < 1 || B > T) throw usage_error("need 1 <= B <= T");
    if (B % step || T % step) throw usage_error("B and T must be multiples of step");
  }
};

/// Single-user capacity T/(T+B), zero when T < B.
inline Rational capacity(unsigned B, unsigned T) {
  if (T < B || T + B == 0) return Rational(0);
  return Rational(T, T + B);
}

/// (alpha B, alpha T) parameters built from (B, T) by interleaving with step alpha.
inline ScoParams vertical_interleave(const ScoParams& base, unsigned alpha) {
  if (alpha < 2) throw usage_error("vertical_interleave: alpha must be >= 2");
  ScoParams p = base;
  p.B = base.B * alpha;
  p.T = base.T * alpha;
  p.step = base.step * alpha;
  return p;
}

inline Slot memory_bound(const ScoParams& p) { return Slot{p.T}; }

/// Splits s into urgent and non-urgent parts in diagonal order.
inline std::pair<std::vector<Symbol>, std::vector<Symbol>> split_urgent(const ScoParams& p, const SourceSymbol& s) {
  const unsigned T0 = p.sub_symbols(), B0 = p.parities_per_slot();
  if (s.subs.size() != T0) throw usage_error("split_urgent: wrong sub-symbol count");
  std::vector<Symbol> u, n;
  for (unsigned m = 0; m < T0; ++m) {
    const unsigned r = p.orientation == Orientation::main_diagonal ? m : T0 - 1 - m;
    (m < B0 ? u : n).push_back(s.subs[r]);
  }
  return {u, n};
}

/// Encoder over summed component parity streams. Source before slot 0 is zero.
class StreamEncoder {
 public:
  StreamEncoder(std::vector<Component> comps, const GaloisField& f) : comps_(std::move(comps)), f_(&f) {
    rows_ = comps_.at(0).code->rows();
    parities_ = comps_.at(0).code->parities();
    for (const auto& c : comps_) window_ = std::max(window_, c.code->memory() + c.shift + 1);
  }

  ChannelSymbol push(const SourceSymbol& s) {
    if (s.subs.size() != rows_) throw usage_error("encoder: wrong sub-symbol count");
    hist_.push_back(s);
    if (static_cast<Slot>(hist_.size()) > window_) hist_.pop_front();
    ChannelSymbol x{s.subs, std::vector<Symbol>(parities_, 0)};
    const Slot now = static_cast<Slot>(hist_.size()) - 1;
    auto get = [&](unsigned row, Slot t) -> Symbol {
      if (t < 0 || t > now) return 0;
      return hist_[static_cast<std::size_t>(t)].subs[row];
    };
    for (const auto& c : comps_)
      for (unsigned k = 0; k < parities_; ++k)
        x.parities[k] = f_->add(x.parities[k], c.code->parity_at(k, now - c.shift, get));
    return x;
  }

 private:
  std::vector<Component> comps_;
  const GaloisField* f_;
  unsigned rows_ = 0, parities_ = 0;
  Slot window_ = 1;
  std::deque<SourceSymbol> hist_;
};

inline ChannelStream encode_stream(const std::vector<Component>& comps, const GaloisField& f, const SourceStream& src) {
  StreamEncoder enc(comps, f);
  ChannelStream out;
  out.reserve(src.size());
  for (const auto& s : src) out.push_back(enc.push(s));
  return out;
}

/// Single-user streaming codec.
class ScoCodec {
 public:
  ScoCodec(ScoParams p, std::optional<Matrix> H = std::nullopt) : params_(std::move(p)) {
    params_.validate();
    field_ = GaloisField::make(params_.field);
    const unsigned T0 = params_.sub_symbols(), B0 = params_.parities_per_slot();
    BurstParityMatrix bp = H ? BurstParityMatrix{*H, T0, B0, field_} : make_burst_parity(T0, B0, field_);
    if (H && (H->rows != T0 - B0 || H->cols != B0 || !verify_burst_correcting(bp)))
      throw construction_error("supplied H is not burst-correcting for these parameters");
    diag_ = std::make_shared<const DiagonalCode>(DiagonalCode{LdBebcCode(bp), params_.step, params_.orientation});
  }

  const ScoParams& params() const { return params_; }
  const DiagonalCode& diagonal() const { return *diag_; }
  const FieldPtr& field() const { return field_; }
  std::vector<Component> components() const { return {{diag_.get(), 0}}; }
  unsigned rows() const { return diag_->rows(); }
  unsigned parities() const { return diag_->parities(); }

 private:
  ScoParams params_;
  FieldPtr field_;
  std::shared_ptr<const DiagonalCode> diag_;
};

/// Channel symbol for s_now given the preceding source symbols (oldest first;
/// missing history is zero).
inline ChannelSymbol sco_encode_step(const ScoCodec& codec, const SourceStream& history, const SourceSymbol& s_now) {
  StreamEncoder enc(codec.components(), *codec.field());
  const std::size_t mem = static_cast<std::size_t>(memory_bound(codec.params()));
  const std::size_t skip = history.size() > mem ? history.size() - mem : 0;
  for (std::size_t i = skip; i < history.size(); ++i) enc.push(history[i]);
  return enc.push(s_now);
}

inline ChannelStream sco_encode(const ScoCodec& codec, const SourceStream& src) {
  return encode_stream(codec.components(), *codec.field(), src);
}

struct DecodeResult {
  SourceStream stream;
  StreamLog log;
  std::vector<TraceEvent> trace;
};

/// Decodes a received stream; losses are marked in the log, never thrown.
inline DecodeResult sco_decode(const ScoCodec& codec, const ReceivedStream& rx) {
  PeelingDecoder dec(codec.components(), *codec.field(), rx);
  DecodeResult out;
  out.trace = dec.refine_all(0);
  out.stream = dec.source_stream();
  out.log = dec.log(Slot{codec.params().T});
  return out;
}

}  // namespace desco
