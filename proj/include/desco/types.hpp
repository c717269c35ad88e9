#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace desco {

/// Time index of a channel/source slot. Negative slots are before stream start.
using Slot = std::int64_t;

/// Raw field element value; interpretation depends on the owning field.
using Symbol = std::uint32_t;

using Rational = boost::rational<std::int64_t>;

/// Marker for "never determined" in recovery-time tables.
inline constexpr Slot kNever = std::numeric_limits<Slot>::max() / 4;
/// Availability time of symbols known before the stream starts.
inline constexpr Slot kAlways = std::numeric_limits<Slot>::min() / 4;

/// Caller violated a documented precondition.
struct usage_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Mathematical domain violation (e.g. inverse of zero).
struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

/// A code could not be constructed for the requested parameters.
struct construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A linear system turned out inconsistent. Never expected from a correct codec.
struct decode_contradiction : std::logic_error {
  using std::logic_error::logic_error;
};

/// The staged decoder could not complete a step that its proof guarantees.
struct decoder_invariant_violation : std::logic_error {
  using std::logic_error::logic_error;
};

/// Erasure burst longer than the code can correct.
struct unrecoverable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed stream, pattern or descriptor input.
struct format_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Slot floor_div(Slot a, Slot b) {
  Slot q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

inline Slot ceil_div(Slot a, Slot b) { return -floor_div(-a, b); }

inline Slot ceil(Rational r) { return ceil_div(r.numerator(), r.denominator()); }
inline Slot floor(Rational r) { return floor_div(r.numerator(), r.denominator()); }

inline std::string to_string(Rational r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

}  // namespace desco
