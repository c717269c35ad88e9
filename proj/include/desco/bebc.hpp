#pragma once

#include "desco/linalg.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace desco {

/// H of the systematic burst-erasure block code [I | H]; (T-B) x B.
struct BurstParityMatrix {
  Matrix H;
  unsigned T = 0;
  unsigned B = 0;
  FieldPtr field;

  unsigned K() const { return T - B; }
};

/// True iff [I | H] recovers every cyclic burst of B erasures.
inline bool verify_burst_correcting(const BurstParityMatrix& m) {
  const unsigned T = m.T, B = m.B, K = m.K();
  if (B == 0) return true;
  if (B > T) return false;
  const GaloisField& f = *m.field;
  for (unsigned s = 0; s < T; ++s) {
    std::vector<bool> erased(T, false);
    for (unsigned x = 0; x < B; ++x) erased[(s + x) % T] = true;
    std::vector<std::size_t> col(K, static_cast<std::size_t>(-1));
    std::size_t n = 0;
    for (unsigned j = 0; j < K; ++j)
      if (erased[j]) col[j] = n++;
    if (n == 0) continue;
    RowEchelon re(f, n);
    for (unsigned k = 0; k < B; ++k) {
      if (erased[K + k]) continue;
      std::vector<Symbol> row(n, 0);
      for (unsigned j = 0; j < K; ++j)
        if (erased[j]) row[col[j]] = m.H(j, k);
      re.add(std::move(row), 0);
    }
    if (re.rank() < n) return false;
  }
  return true;
}

namespace detail {

// Lexicographic (row-major) search; gives up after `budget` candidates.
inline std::optional<Matrix> search_parity(unsigned T, unsigned B, const FieldPtr& f, std::uint64_t budget) {
  const unsigned K = T - B;
  const std::size_t cells = std::size_t{K} * B;
  const std::uint32_t q = f->order();
  BurstParityMatrix cand{Matrix(K, B), T, B, f};
  for (std::uint64_t tried = 0; tried < budget; ++tried) {
    if (verify_burst_correcting(cand)) return cand.H;
    std::size_t i = cells;
    while (i > 0) {
      --i;
      if (++cand.H.data[i] < q) break;
      cand.H.data[i] = 0;
      if (i == 0) return std::nullopt;
    }
    if (cells == 0) return std::nullopt;
  }
  return std::nullopt;
}

// Cauchy block: H[j][k] = 1/(x_j - y_k), x_j = j, y_k = K + k. MDS when q >= T.
inline Matrix cauchy_parity(unsigned T, unsigned B, const GaloisField& f) {
  const unsigned K = T - B;
  Matrix h(K, B);
  for (unsigned j = 0; j < K; ++j)
    for (unsigned k = 0; k < B; ++k) h(j, k) = f.inv(f.sub(j % f.order(), (K + k) % f.order()));
  return h;
}

}  // namespace detail

/// Candidates examined by the lexicographic search before the Cauchy fallback.
inline constexpr std::uint64_t kParitySearchBudget = std::uint64_t{1} << 18;

/// Deterministic H for (T, B) over the given field.
///
/// The lexicographically smallest valid H is taken when the search finds one
/// within budget; otherwise a Cauchy (MDS) block is used, which needs q >= T.
inline BurstParityMatrix make_burst_parity(unsigned T, unsigned B, const FieldPtr& f) {
  if (!f) throw usage_error("make_burst_parity: null field");
  if (B < 1 || B > T) throw usage_error("make_burst_parity: need 1 <= B <= T");
  const unsigned K = T - B;
  if (K == 0) return {Matrix(0, B), T, B, f};
  if (auto h = detail::search_parity(T, B, f, kParitySearchBudget)) return {*h, T, B, f};
  if (f->order() >= T) {
    BurstParityMatrix m{detail::cauchy_parity(T, B, *f), T, B, f};
    if (verify_burst_correcting(m)) return m;
  }
  throw construction_error("no burst-correcting H found for T=" + std::to_string(T) + ", B=" +
                           std::to_string(B) + " over " + f->spec().describe() +
                           "; a field of order >= " + std::to_string(T) + " always works");
}

/// (T+B, T) low-delay code: c = (u, n, u + n H), u = first B entries.
struct LdBebcCode {
  BurstParityMatrix parity;

  explicit LdBebcCode(BurstParityMatrix p) : parity(std::move(p)) {}

  unsigned T() const { return parity.T; }
  unsigned B() const { return parity.B; }
  unsigned length() const { return parity.T + parity.B; }
  const GaloisField& field() const { return *parity.field; }

  /// Coefficient of information position m in parity k.
  Symbol coeff(unsigned k, unsigned m) const {
    if (m < B()) return m == k ? 1 : 0;
    return parity.H(m - B(), k);
  }
};

inline LdBebcCode make_ldbebc(unsigned T, unsigned B, const FieldPtr& f) {
  return LdBebcCode(make_burst_parity(T, B, f));
}

inline std::vector<Symbol> ldbebc_parities(const LdBebcCode& code, const std::vector<Symbol>& b) {
  if (b.size() != code.T()) throw usage_error("ldbebc_encode: expected " + std::to_string(code.T()) + " symbols");
  const GaloisField& f = code.field();
  std::vector<Symbol> p(code.B(), 0);
  for (unsigned k = 0; k < code.B(); ++k)
    for (unsigned m = 0; m < code.T(); ++m) p[k] = f.add(p[k], f.mul(code.coeff(k, m), b[m]));
  return p;
}

inline std::vector<Symbol> ldbebc_encode(const LdBebcCode& code, const std::vector<Symbol>& b) {
  std::vector<Symbol> c = b;
  const auto p = ldbebc_parities(code, b);
  c.insert(c.end(), p.begin(), p.end());
  return c;
}

inline std::vector<FieldElement> ldbebc_encode(const LdBebcCode& code, const std::vector<FieldElement>& b) {
  std::vector<Symbol> raw;
  for (const auto& e : b) {
    if (!(e.field()->spec() == code.field().spec())) throw usage_error("operands belong to different fields");
    raw.push_back(e.value());
  }
  std::vector<FieldElement> out;
  for (Symbol v : ldbebc_encode(code, raw)) out.emplace_back(v, code.parity.field);
  return out;
}

/// Per-position outcome of an earliest-determination solve.
struct CodewordSolve {
  std::vector<Slot> time;     // kNever if not determined
  std::vector<Symbol> value;  // valid where time != kNever
  std::vector<int> trigger;   // parity index that completed the solve, -1 if received
};

/// Earliest time each information entry of one codeword is determined.
///
/// Entries become available at the given times (kNever = never). Only
/// positions flagged in `targets` are solved; others are treated as
/// unknown until their own availability time.
inline CodewordSolve solve_codeword(const LdBebcCode& code, const std::vector<Slot>& info_avail,
                                    const std::vector<Symbol>& info_val, const std::vector<Slot>& par_avail,
                                    const std::vector<Symbol>& par_val, const std::vector<bool>& targets) {
  const unsigned T = code.T(), B = code.B();
  const GaloisField& f = code.field();
  CodewordSolve out{info_avail, info_val, std::vector<int>(T, -1)};
  std::vector<Slot> cand;
  for (Slot t : info_avail)
    if (t != kNever) cand.push_back(t);
  for (Slot t : par_avail)
    if (t != kNever) cand.push_back(t);
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  auto open = [&](Slot t) {
    for (unsigned m = 0; m < T; ++m)
      if (targets[m] && out.time[m] > t) return true;
    return false;
  };

  for (Slot t : cand) {
    if (!open(t)) break;
    std::vector<std::size_t> col(T, static_cast<std::size_t>(-1));
    std::size_t n = 0;
    for (unsigned m = 0; m < T; ++m)
      if (info_avail[m] > t) col[m] = n++;
    RowEchelon re(f, n);
    std::vector<int> used;
    for (unsigned k = 0; k < B; ++k) {
      if (par_avail[k] > t) continue;
      std::vector<Symbol> row(n, 0);
      Symbol rhs = par_val[k];
      for (unsigned m = 0; m < T; ++m) {
        const Symbol c = code.coeff(k, m);
        if (c == 0) continue;
        if (col[m] != static_cast<std::size_t>(-1))
          row[col[m]] = c;
        else
          rhs = f.sub(rhs, f.mul(c, info_val[m]));
      }
      re.add(std::move(row), rhs);
      used.push_back(static_cast<int>(k));
    }
    for (unsigned m = 0; m < T; ++m) {
      if (!targets[m] || out.time[m] <= t || col[m] == static_cast<std::size_t>(-1)) continue;
      if (!re.pinned(col[m])) continue;
      out.time[m] = t;
      out.value[m] = re.value(col[m]);
      int trig = -1;
      for (int k : used)
        if (par_avail[k] == t) {
          trig = k;
          break;
        }
      if (trig < 0)
        for (int k : used)
          if (code.coeff(k, m) != 0) {
            trig = k;
            break;
          }
      out.trigger[m] = trig;
    }
  }
  return out;
}

/// Decoded information vector plus the codeword index at which each entry was known.
struct LdBebcDecoded {
  std::vector<Symbol> b;
  std::vector<unsigned> delays;
};

inline LdBebcDecoded ldbebc_decode(const LdBebcCode& code, const std::vector<std::optional<Symbol>>& received,
                                   unsigned burst_start) {
  const unsigned T = code.T(), B = code.B(), N = T + B;
  if (received.size() != N) throw usage_error("ldbebc_decode: expected " + std::to_string(N) + " entries");
  std::vector<unsigned> er;
  for (unsigned i = 0; i < N; ++i)
    if (!received[i]) er.push_back(i);
  if (!er.empty()) {
    if (er.back() - er.front() + 1 != er.size()) throw usage_error("ldbebc_decode: erasures are not contiguous");
    if (er.front() != burst_start) throw usage_error("ldbebc_decode: burst_start does not match erasures");
    if (er.size() > B) throw unrecoverable_error("ldbebc_decode: burst longer than B");
  }
  std::vector<Slot> ia(T), pa(B);
  std::vector<Symbol> iv(T, 0), pv(B, 0);
  for (unsigned m = 0; m < T; ++m) {
    ia[m] = received[m] ? Slot{m} : kNever;
    iv[m] = received[m].value_or(0);
  }
  for (unsigned k = 0; k < B; ++k) {
    pa[k] = received[T + k] ? Slot{T + k} : kNever;
    pv[k] = received[T + k].value_or(0);
  }
  const auto s = solve_codeword(code, ia, iv, pa, pv, std::vector<bool>(T, true));
  LdBebcDecoded out;
  for (unsigned m = 0; m < T; ++m) {
    if (s.time[m] == kNever) throw unrecoverable_error("ldbebc_decode: position not recoverable");
    out.b.push_back(s.value[m]);
    out.delays.push_back(static_cast<unsigned>(s.time[m]));
  }
  return out;
}

}  // namespace desco
