#pragma once

#include "desco/gf.hpp"

#include <optional>
#include <vector>

namespace desco {

/// Dense row-major matrix over a field.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<Symbol> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0) {}

  Symbol& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  Symbol operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

inline std::vector<Symbol> mat_vec(const GaloisField& f, const Matrix& a, const std::vector<Symbol>& x) {
  if (x.size() != a.cols) throw usage_error("mat_vec: dimension mismatch");
  std::vector<Symbol> y(a.rows, 0);
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) y[r] = f.add(y[r], f.mul(a(r, c), x[c]));
  return y;
}

/// Incremental reduced row echelon form of an augmented system.
///
/// Equations arrive one at a time; after each one the caller can ask which
/// unknowns are pinned (uniquely determined regardless of the free ones).
class RowEchelon {
 public:
  RowEchelon(const GaloisField& f, std::size_t unknowns)
      : f_(&f), n_(unknowns), pivot_row_(unknowns, npos), pinned_(unknowns, false) {}

  std::size_t unknowns() const { return n_; }
  std::size_t rank() const { return rows_.size(); }

  /// Adds coeffs*x = rhs. Returns the columns that became pinned.
  std::vector<std::size_t> add(std::vector<Symbol> coeffs, Symbol rhs) {
    if (coeffs.size() != n_) throw usage_error("RowEchelon::add: dimension mismatch");
    for (std::size_t c = 0; c < n_; ++c) {
      if (coeffs[c] == 0 || pivot_row_[c] == npos) continue;
      const Row& p = rows_[pivot_row_[c]];
      const Symbol k = f_->neg(coeffs[c]);
      f_->axpy(coeffs, k, p.coeffs);
      rhs = f_->add(rhs, f_->mul(k, p.rhs));
    }
    std::size_t piv = 0;
    while (piv < n_ && coeffs[piv] == 0) ++piv;
    if (piv == n_) {
      if (rhs != 0) throw decode_contradiction("inconsistent linear system");
      return {};
    }
    const Symbol s = f_->inv(coeffs[piv]);
    for (auto& v : coeffs) v = f_->mul(v, s);
    rhs = f_->mul(rhs, s);
    for (auto& r : rows_) {
      if (r.coeffs[piv] == 0) continue;
      const Symbol k = f_->neg(r.coeffs[piv]);
      f_->axpy(r.coeffs, k, coeffs);
      r.rhs = f_->add(r.rhs, f_->mul(k, rhs));
    }
    pivot_row_[piv] = rows_.size();
    rows_.push_back({std::move(coeffs), rhs, piv});

    std::vector<std::size_t> fresh;
    for (const auto& r : rows_) {
      if (pinned_[r.pivot]) continue;
      bool unit = true;
      for (std::size_t c = 0; c < n_ && unit; ++c)
        if (c != r.pivot && r.coeffs[c] != 0) unit = false;
      if (unit) {
        pinned_[r.pivot] = true;
        fresh.push_back(r.pivot);
      }
    }
    return fresh;
  }

  bool pinned(std::size_t c) const { return c < pinned_.size() && pinned_[c]; }

  /// Value of a pinned unknown.
  Symbol value(std::size_t c) const {
    if (!pinned(c)) throw usage_error("RowEchelon::value: unknown is not pinned");
    return rows_[pivot_row_[c]].rhs;
  }

 private:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  struct Row {
    std::vector<Symbol> coeffs;
    Symbol rhs;
    std::size_t pivot;
  };

  const GaloisField* f_;
  std::size_t n_;
  std::vector<std::size_t> pivot_row_;
  std::vector<Row> rows_;
  std::vector<bool> pinned_;
};

/// Result of solving A x = y. Unknowns not pinned are free.
struct LinearSolution {
  std::vector<std::optional<Symbol>> values;

  bool unique() const {
    for (const auto& v : values)
      if (!v) return false;
    return true;
  }
  std::vector<std::size_t> free_unknowns() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!values[i]) out.push_back(i);
    return out;
  }
};

inline LinearSolution solve_linear(const GaloisField& f, const Matrix& a, const std::vector<Symbol>& y) {
  if (y.size() != a.rows) throw usage_error("solve_linear: dimension mismatch");
  RowEchelon re(f, a.cols);
  for (std::size_t r = 0; r < a.rows; ++r)
    re.add(std::vector<Symbol>(a.data.begin() + r * a.cols, a.data.begin() + (r + 1) * a.cols), y[r]);
  LinearSolution out;
  out.values.resize(a.cols);
  for (std::size_t c = 0; c < a.cols; ++c)
    if (re.pinned(c)) out.values[c] = re.value(c);
  return out;
}

/// Element-typed front end.
inline std::optional<std::vector<FieldElement>> solve_linear(const std::vector<std::vector<FieldElement>>& a,
                                                             const std::vector<FieldElement>& y,
                                                             std::vector<std::size_t>* free_out = nullptr) {
  if (a.size() != y.size()) throw usage_error("solve_linear: dimension mismatch");
  if (y.empty()) return std::vector<FieldElement>{};
  const FieldPtr& fp = y.front().field();
  const std::size_t n = a.front().size();
  Matrix m(a.size(), n);
  std::vector<Symbol> rhs(y.size());
  for (std::size_t r = 0; r < a.size(); ++r) {
    if (a[r].size() != n) throw usage_error("solve_linear: ragged matrix");
    for (std::size_t c = 0; c < n; ++c) {
      if (!(a[r][c].field()->spec() == fp->spec())) throw usage_error("operands belong to different fields");
      m(r, c) = a[r][c].value();
    }
    if (!(y[r].field()->spec() == fp->spec())) throw usage_error("operands belong to different fields");
    rhs[r] = y[r].value();
  }
  const auto sol = solve_linear(*fp, m, rhs);
  if (free_out) *free_out = sol.free_unknowns();
  if (!sol.unique()) return std::nullopt;
  std::vector<FieldElement> out;
  for (const auto& v : sol.values) out.emplace_back(*v, fp);
  return out;
}

}  // namespace desco
