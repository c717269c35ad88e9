#pragma once

#include "desco/bebc.hpp"
#include "desco/stream.hpp"

#include <vector>

namespace desco {

enum class Orientation { main_diagonal, off_diagonal };

/// An LD-BEBC laid along a strided diagonal of the sub-symbol grid.
///
/// A codeword anchored at tau holds information position m at slot
/// tau + m*stride in row m (main) or row T-1-m (off), and parity k at slot
/// tau + (T+k)*stride.
struct DiagonalCode {
  LdBebcCode code;
  unsigned stride = 1;
  Orientation orientation = Orientation::main_diagonal;

  struct Term {
    unsigned row;
    Slot lag;
    Symbol coeff;
    friend bool operator==(const Term&, const Term&) = default;
  };

  unsigned rows() const { return code.T(); }
  unsigned parities() const { return code.B(); }

  unsigned row_of(unsigned m) const {
    return orientation == Orientation::main_diagonal ? m : rows() - 1 - m;
  }
  unsigned position_of(unsigned row) const { return row_of(row); }
  Slot info_slot(Slot tau, unsigned m) const { return tau + Slot{m} * stride; }
  Slot parity_slot(Slot tau, unsigned k) const { return tau + Slot{rows() + k} * stride; }
  Slot anchor_of(unsigned row, Slot t) const { return t - Slot{position_of(row)} * stride; }
  Slot anchor_of_parity(unsigned k, Slot t) const { return t - Slot{rows() + k} * stride; }
  Slot memory() const { return Slot{rows()} * stride; }

  /// Diagonal label: slot of row 0.
  Slot label(Slot tau) const { return info_slot(tau, position_of(0)); }
  Slot anchor_from_label(Slot j) const { return anchor_of(0, j); }

  /// p_k[t] = sum over terms of coeff * s_row[t - lag].
  std::vector<Term> terms(unsigned k) const {
    std::vector<Term> out;
    for (unsigned m = 0; m < rows(); ++m) {
      const Symbol c = code.coeff(k, m);
      if (c != 0) out.push_back({row_of(m), Slot{rows() + k - m} * stride, c});
    }
    return out;
  }

  /// Largest source-to-parity lag over all parities.
  Slot span() const {
    Slot m = 0;
    for (unsigned k = 0; k < parities(); ++k)
      for (const auto& t : terms(k)) m = std::max(m, t.lag);
    return m;
  }

  /// Parity k at slot t via gather of the diagonal and block encode.
  template <class Get>
  Symbol parity_at(unsigned k, Slot t, Get&& get) const {
    const Slot tau = anchor_of_parity(k, t);
    std::vector<Symbol> b(rows());
    for (unsigned m = 0; m < rows(); ++m) b[m] = get(row_of(m), info_slot(tau, m));
    return ldbebc_parities(code, b)[k];
  }
};

/// A diagonal code whose parity stream is delayed by `shift` before combining.
struct Component {
  const DiagonalCode* code;
  Slot shift;
};

}  // namespace desco
