#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "emt/dual.hpp"
#include "emt/errors.hpp"

namespace emt {

/// (upper, lower) index counts. Stored tensors keep their upper slots first;
/// derivative slots added by partial/covariant differentiation go last.
struct Valence {
  int upper = 0;
  int lower = 0;

  int rank() const { return upper + lower; }
  friend bool operator==(const Valence&, const Valence&) = default;
};

/// Dense multi-index array over a chart of dimension n, shape n^(r+s).
template <class S>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, Valence valence)
      : dim_(dim), valence_(valence), data_(extent(dim, valence.rank()), S(0.0)) {}

  int dim() const { return dim_; }
  Valence valence() const { return valence_; }
  int rank() const { return valence_.rank(); }
  std::size_t size() const { return data_.size(); }

  template <std::integral... I>
  S& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <std::integral... I>
  const S& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  S& at(std::span<const int> idx) { return data_[offset_of(idx)]; }
  const S& at(std::span<const int> idx) const { return data_[offset_of(idx)]; }

  S& flat(std::size_t i) { return data_[i]; }
  const S& flat(std::size_t i) const { return data_[i]; }

  std::span<S> data() { return data_; }
  std::span<const S> data() const { return data_; }

  static std::size_t extent(int dim, int rank) {
    std::size_t n = 1;
    for (int i = 0; i < rank; ++i) n *= static_cast<std::size_t>(dim);
    return n;
  }

 private:
  template <class... I>
  std::size_t offset(I... idx) const {
    std::size_t off = 0;
    ((off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx)), ...);
    return off;
  }

  std::size_t offset_of(std::span<const int> idx) const {
    std::size_t off = 0;
    for (int i : idx) off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(i);
    return off;
  }

  int dim_ = 0;
  Valence valence_{};
  std::vector<S> data_;
};

using TensorValue = Tensor<double>;

/// Unpack a flat offset into its multi-index.
inline void unflatten(std::size_t flat, int dim, std::span<int> idx) {
  for (std::size_t k = idx.size(); k-- > 0;) {
    idx[k] = static_cast<int>(flat % static_cast<std::size_t>(dim));
    flat /= static_cast<std::size_t>(dim);
  }
}

template <class S>
Tensor<double> primal(const Tensor<S>& t) {
  Tensor<double> out(t.dim(), t.valence());
  for (std::size_t i = 0; i < t.size(); ++i) out.flat(i) = value_of(t.flat(i));
  return out;
}

/// Outermost value slot of a dual-valued tensor.
template <class S>
Tensor<S> value_part(const Tensor<Dual<S>>& t) {
  Tensor<S> out(t.dim(), t.valence());
  for (std::size_t i = 0; i < t.size(); ++i) out.flat(i) = t.flat(i).v;
  return out;
}

/// Promote a tensor one dual level with zero derivative.
template <class S>
Tensor<Dual<S>> lift(const Tensor<S>& t) {
  Tensor<Dual<S>> out(t.dim(), t.valence());
  for (std::size_t i = 0; i < t.size(); ++i) out.flat(i) = Dual<S>(t.flat(i), S(0.0));
  return out;
}

inline double max_abs(const Tensor<double>& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

inline double max_abs_diff(const Tensor<double>& a, const Tensor<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.flat(i) - b.flat(i)));
  return m;
}

/// Largest |T^ab - T^ba| / 2 of a rank-2 tensor.
inline double antisymmetric_part(const Tensor<double>& t) {
  double m = 0.0;
  for (int a = 0; a < t.dim(); ++a)
    for (int b = a + 1; b < t.dim(); ++b) m = std::max(m, 0.5 * std::abs(t(a, b) - t(b, a)));
  return m;
}

namespace detail {

template <class S>
struct Lu {
  std::vector<S> a;  // packed LU factors, row-major
  std::vector<int> perm;
  int sign = 1;
  double condition = 1.0;
  bool singular = false;
};

template <class S>
Lu<S> lu_factor(const Tensor<S>& m) {
  const int n = m.dim();
  Lu<S> lu;
  lu.a.assign(m.data().begin(), m.data().end());
  lu.perm.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) lu.perm[static_cast<std::size_t>(i)] = i;
  double scale = 0.0;
  for (const auto& x : m.data()) scale = std::max(scale, std::abs(value_of(x)));
  double pmax = 0.0;
  double pmin = std::numeric_limits<double>::infinity();
  auto at = [&](int r, int c) -> S& { return lu.a[static_cast<std::size_t>(r * n + c)]; };
  for (int k = 0; k < n; ++k) {
    int piv = k;
    double best = std::abs(value_of(at(k, k)));
    for (int r = k + 1; r < n; ++r) {
      const double cand = std::abs(value_of(at(r, k)));
      if (cand > best) {
        best = cand;
        piv = r;
      }
    }
    pmax = std::max(pmax, best);
    pmin = std::min(pmin, best);
    if (best <= 1e-14 * scale || best == 0.0) {
      lu.singular = true;
      lu.condition = std::numeric_limits<double>::infinity();
      return lu;
    }
    if (piv != k) {
      for (int c = 0; c < n; ++c) std::swap(at(k, c), at(piv, c));
      std::swap(lu.perm[static_cast<std::size_t>(k)], lu.perm[static_cast<std::size_t>(piv)]);
      lu.sign = -lu.sign;
    }
    for (int r = k + 1; r < n; ++r) {
      at(r, k) = at(r, k) / at(k, k);
      for (int c = k + 1; c < n; ++c) at(r, c) -= at(r, k) * at(k, c);
    }
  }
  lu.condition = pmax / pmin;
  return lu;
}

}  // namespace detail

/// Determinant of a square rank-2 tensor (LU with partial pivoting on the
/// primal values). Returns 0 for numerically singular input.
template <class S>
S determinant(const Tensor<S>& m) {
  auto lu = detail::lu_factor(m);
  if (lu.singular) return S(0.0);
  const int n = m.dim();
  S det(static_cast<double>(lu.sign));
  for (int k = 0; k < n; ++k) det *= lu.a[static_cast<std::size_t>(k * n + k)];
  return det;
}

/// Inverse of a square rank-2 tensor; the result has the opposite valence.
template <class S>
Tensor<S> inverse(const Tensor<S>& m) {
  const int n = m.dim();
  auto lu = detail::lu_factor(m);
  if (lu.singular) {
    throw SingularMetricError("matrix is singular to working precision (condition estimate " +
                                  std::to_string(lu.condition) + ")",
                              lu.condition);
  }
  auto at = [&](int r, int c) -> const S& { return lu.a[static_cast<std::size_t>(r * n + c)]; };
  Tensor<S> inv(n, Valence{m.valence().lower, m.valence().upper});
  std::vector<S> col(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = S(lu.perm[static_cast<std::size_t>(i)] == j ? 1.0 : 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < i; ++k) col[static_cast<std::size_t>(i)] -= at(i, k) * col[static_cast<std::size_t>(k)];
    for (int i = n - 1; i >= 0; --i) {
      for (int k = i + 1; k < n; ++k) col[static_cast<std::size_t>(i)] -= at(i, k) * col[static_cast<std::size_t>(k)];
      col[static_cast<std::size_t>(i)] = col[static_cast<std::size_t>(i)] / at(i, i);
    }
    for (int i = 0; i < n; ++i) inv(i, j) = col[static_cast<std::size_t>(i)];
  }
  return inv;
}

/// Condition estimate (pivot ratio) of a square matrix, for diagnostics.
inline double condition_estimate(const Tensor<double>& m) { return detail::lu_factor(m).condition; }

}  // namespace emt
