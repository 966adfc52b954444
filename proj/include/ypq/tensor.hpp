#pragma once

// Dense tensors and differential forms at a point.
//
// Component convention: a p-form stores all dim^p index tuples, and
// dx^1 ^ dx^2 has component +1 at (1,2) and -1 at (2,1). With this
// convention (v _| w)_{b..} = v^a w_{a b..} and dw = (p+1) Alt(dw).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "ypq/dual.hpp"
#include "ypq/error.hpp"

namespace ypq {

inline constexpr int kMaxRank = 8;
using MultiIndex = std::array<int, kMaxRank>;

namespace detail {

inline std::size_t ipow(int base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= static_cast<std::size_t>(base);
  return r;
}

struct Permutation {
  MultiIndex map{};
  int sign = 1;
};

inline std::vector<Permutation> make_permutations(int k) {
  std::vector<Permutation> out;
  MultiIndex p{};
  for (int i = 0; i < k; ++i) p[i] = i;
  do {
    Permutation perm;
    perm.map = p;
    int inversions = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j)
        if (p[i] > p[j]) ++inversions;
    perm.sign = inversions % 2 == 0 ? 1 : -1;
    out.push_back(perm);
  } while (std::next_permutation(p.begin(), p.begin() + k));
  return out;
}

inline const std::vector<Permutation>& permutations(int k) {
  static const auto table = [] {
    std::vector<std::vector<Permutation>> t;
    for (int i = 0; i <= kMaxRank; ++i) t.push_back(make_permutations(i));
    return t;
  }();
  return table.at(k);
}

// Strictly increasing k-tuples from {0..n-1}.
inline std::vector<MultiIndex> combinations(int n, int k) {
  std::vector<MultiIndex> out;
  if (k > n) return out;
  MultiIndex c{};
  for (int i = 0; i < k; ++i) c[i] = i;
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - k + i) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
  }
  return out;
}

// Non-decreasing k-tuples from {0..n-1}.
inline std::vector<MultiIndex> multisets(int n, int k) {
  std::vector<MultiIndex> out;
  MultiIndex c{};
  if (k == 0) {
    out.push_back(c);
    return out;
  }
  while (true) {
    out.push_back(c);
    int i = k - 1;
    while (i >= 0 && c[i] == n - 1) --i;
    if (i < 0) break;
    ++c[i];
    for (int j = i + 1; j < k; ++j) c[j] = c[i];
  }
  return out;
}

inline std::size_t flat_of(const int* idx, int rank, int dim) {
  std::size_t f = 0;
  for (int i = 0; i < rank; ++i) f = f * static_cast<std::size_t>(dim) + static_cast<std::size_t>(idx[i]);
  return f;
}

inline MultiIndex decode(std::size_t flat, int rank, int dim) {
  MultiIndex idx{};
  for (int i = rank - 1; i >= 0; --i) {
    idx[i] = static_cast<int>(flat % static_cast<std::size_t>(dim));
    flat /= static_cast<std::size_t>(dim);
  }
  return idx;
}

template <class S, class T>
concept ScalarFor = std::is_arithmetic_v<S> || std::is_same_v<S, T>;

}  // namespace detail

enum class Valence { Up, Down };

template <class T>
class Tensor {
 public:
  Tensor() = default;
  Tensor(int dim, std::vector<Valence> slots)
      : dim_(dim), slots_(std::move(slots)), comps_(detail::ipow(dim, rank()), T{}) {
    if (rank() > kMaxRank) throw Error(ErrorCode::DegreeOverflow, "tensor rank too large");
  }
  static Tensor covariant(int dim, int rank) {
    return Tensor(dim, std::vector<Valence>(static_cast<std::size_t>(rank), Valence::Down));
  }

  int dim() const { return dim_; }
  int rank() const { return static_cast<int>(slots_.size()); }
  const std::vector<Valence>& slots() const { return slots_; }
  int covariant_rank() const {
    return static_cast<int>(std::count(slots_.begin(), slots_.end(), Valence::Down));
  }
  int contravariant_rank() const { return rank() - covariant_rank(); }
  bool fully_covariant() const { return covariant_rank() == rank(); }

  std::size_t size() const { return comps_.size(); }
  T& operator[](std::size_t f) { return comps_[f]; }
  const T& operator[](std::size_t f) const { return comps_[f]; }

  template <class... I>
  T& operator()(I... idx) {
    const int a[] = {static_cast<int>(idx)...};
    return comps_[detail::flat_of(a, static_cast<int>(sizeof...(I)), dim_)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    const int a[] = {static_cast<int>(idx)...};
    return comps_[detail::flat_of(a, static_cast<int>(sizeof...(I)), dim_)];
  }
  const T& at(const MultiIndex& idx) const { return comps_[detail::flat_of(idx.data(), rank(), dim_)]; }
  T& at(const MultiIndex& idx) { return comps_[detail::flat_of(idx.data(), rank(), dim_)]; }

  std::span<const T> components() const { return comps_; }

  Tensor& operator+=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  Tensor& operator-=(const Tensor& o) {
    check_same(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  template <detail::ScalarFor<T> S>
  Tensor& operator*=(const S& s) {
    for (auto& c : comps_) c = c * s;
    return *this;
  }

 private:
  void check_same(const Tensor& o) const {
    if (o.dim_ != dim_ || o.slots_ != slots_) throw Error(ErrorCode::DimensionMismatch, "tensor shape");
  }

  int dim_ = 0;
  std::vector<Valence> slots_;
  std::vector<T> comps_;
};

template <class T>
Tensor<T> operator+(Tensor<T> a, const Tensor<T>& b) {
  return a += b;
}
template <class T>
Tensor<T> operator-(Tensor<T> a, const Tensor<T>& b) {
  return a -= b;
}
template <class T, detail::ScalarFor<T> S>
Tensor<T> operator*(const S& s, Tensor<T> t) {
  return t *= s;
}

template <class T>
class DifferentialForm {
 public:
  DifferentialForm() = default;
  DifferentialForm(int dim, int degree) : dim_(dim), degree_(degree) {
    if (degree < 0 || degree > dim) throw Error(ErrorCode::DegreeOverflow, "form degree out of range");
    comps_.assign(detail::ipow(dim, degree), T{});
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return comps_.size(); }

  T& operator[](std::size_t f) { return comps_[f]; }
  const T& operator[](std::size_t f) const { return comps_[f]; }

  template <class... I>
  const T& operator()(I... idx) const {
    static_assert(sizeof...(I) > 0);
    const int a[] = {static_cast<int>(idx)...};
    return comps_[detail::flat_of(a, static_cast<int>(sizeof...(I)), dim_)];
  }
  const T& at(const MultiIndex& idx) const { return comps_[detail::flat_of(idx.data(), degree_, dim_)]; }
  T& at(const MultiIndex& idx) { return comps_[detail::flat_of(idx.data(), degree_, dim_)]; }
  // Degree-0 value.
  const T& scalar() const { return comps_.at(0); }

  std::span<const T> components() const { return comps_; }

  // Adds coef * dx^{i0} ^ dx^{i1} ^ ... ; repeated indices contribute nothing.
  void add_term(const T& coef, std::initializer_list<int> indices) {
    if (static_cast<int>(indices.size()) != degree_) throw Error(ErrorCode::DegreeMismatch, "term degree");
    MultiIndex base{};
    std::copy(indices.begin(), indices.end(), base.begin());
    add_antisymmetric(coef, base);
  }
  template <detail::ScalarFor<T> S>
  void add_term(const S& coef, std::initializer_list<int> indices)
    requires(!std::is_same_v<S, T>)
  {
    add_term(T(coef), indices);
  }

  // Writes value at the sorted tuple `base` and its signed permutations.
  void add_antisymmetric(const T& coef, const MultiIndex& base) {
    for (int i = 0; i < degree_; ++i)
      for (int j = i + 1; j < degree_; ++j)
        if (base[i] == base[j]) return;
    for (const auto& perm : detail::permutations(degree_)) {
      MultiIndex idx{};
      for (int i = 0; i < degree_; ++i) idx[i] = base[perm.map[i]];
      if (perm.sign > 0)
        at(idx) += coef;
      else
        at(idx) -= coef;
    }
  }
  void set_antisymmetric(const T& value, const MultiIndex& base) {
    for (const auto& perm : detail::permutations(degree_)) {
      MultiIndex idx{};
      for (int i = 0; i < degree_; ++i) idx[i] = base[perm.map[i]];
      at(idx) = perm.sign > 0 ? value : T{} - value;
    }
  }

  DifferentialForm& operator+=(const DifferentialForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] += o.comps_[i];
    return *this;
  }
  DifferentialForm& operator-=(const DifferentialForm& o) {
    check_same(o);
    for (std::size_t i = 0; i < comps_.size(); ++i) comps_[i] -= o.comps_[i];
    return *this;
  }
  template <detail::ScalarFor<T> S>
  DifferentialForm& operator*=(const S& s) {
    for (auto& c : comps_) c = c * s;
    return *this;
  }

  Tensor<T> to_tensor() const {
    Tensor<T> t = Tensor<T>::covariant(dim_, degree_);
    for (std::size_t i = 0; i < comps_.size(); ++i) t[i] = comps_[i];
    return t;
  }

 private:
  void check_same(const DifferentialForm& o) const {
    if (o.dim_ != dim_ || o.degree_ != degree_) throw Error(ErrorCode::DimensionMismatch, "form shape");
  }

  int dim_ = 0;
  int degree_ = 0;
  std::vector<T> comps_;
};

template <class T>
DifferentialForm<T> operator+(DifferentialForm<T> a, const DifferentialForm<T>& b) {
  return a += b;
}
template <class T>
DifferentialForm<T> operator-(DifferentialForm<T> a, const DifferentialForm<T>& b) {
  return a -= b;
}
template <class T, detail::ScalarFor<T> S>
DifferentialForm<T> operator*(const S& s, DifferentialForm<T> f) {
  return f *= s;
}

template <class T>
double max_abs(std::span<const T> values) {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(value_of(v)));
  return m;
}
template <class T>
double max_abs(const DifferentialForm<T>& f) {
  return max_abs(f.components());
}
template <class T>
double max_abs(const Tensor<T>& t) {
  return max_abs(t.components());
}

template <class T>
double max_abs_diff(const DifferentialForm<T>& a, const DifferentialForm<T>& b) {
  return max_abs(a - b);
}

// Worst violation of w(.., i, .., j, ..) = -w(.., j, .., i, ..).
template <class T>
double antisymmetry_defect(const DifferentialForm<T>& f) {
  double worst = 0.0;
  const int k = f.degree();
  for (std::size_t flat = 0; flat < f.size(); ++flat) {
    const MultiIndex idx = detail::decode(flat, k, f.dim());
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) {
        MultiIndex sw = idx;
        std::swap(sw[i], sw[j]);
        worst = std::max(worst, std::abs(value_of(f[flat]) + value_of(f.at(sw))));
      }
  }
  return worst;
}

template <class T>
DifferentialForm<T> wedge(const DifferentialForm<T>& a, const DifferentialForm<T>& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "wedge of forms in different dimensions");
  const int p = a.degree(), q = b.degree(), k = p + q, n = a.dim();
  if (k > n) throw Error(ErrorCode::DegreeOverflow, "wedge degree exceeds dimension");
  DifferentialForm<T> out(n, k);
  if (k == 0) {
    out[0] = a[0] * b[0];
    return out;
  }
  for (const auto& I : detail::combinations(n, k)) {
    T acc{};
    // split positions of I into a p-subset (for a) and its complement (for b)
    for (unsigned mask = 0; mask < (1u << k); ++mask) {
      if (__builtin_popcount(mask) != p) continue;
      MultiIndex J{}, K{};
      int nj = 0, nk = 0, inversions = 0;
      for (int pos = 0; pos < k; ++pos) {
        if (mask & (1u << pos)) {
          J[nj++] = I[pos];
          inversions += nk;  // elements of K placed before this one
        } else {
          K[nk++] = I[pos];
        }
      }
      const T term = a.at(J) * b.at(K);
      if (inversions % 2 == 0)
        acc += term;
      else
        acc -= term;
    }
    out.set_antisymmetric(acc, I);
  }
  return out;
}

template <class T>
DifferentialForm<T> wedge_power(const DifferentialForm<T>& a, int k) {
  if (k < 1) throw Error(ErrorCode::DegreeOverflow, "wedge power must be positive");
  DifferentialForm<T> out = a;
  for (int i = 1; i < k; ++i) out = wedge(out, a);
  return out;
}

// (v _| w)_{b2..bp} = v^a w_{a b2..bp}
template <class T, class Vec>
DifferentialForm<T> interior_product(const Vec& v, const DifferentialForm<T>& w) {
  if (static_cast<int>(std::size(v)) != w.dim()) throw Error(ErrorCode::DimensionMismatch, "vector dimension");
  if (w.degree() == 0) throw Error(ErrorCode::ZeroDegree, "interior product of a 0-form");
  const int n = w.dim(), p = w.degree();
  DifferentialForm<T> out(n, p - 1);
  const std::size_t stride = out.size();
  for (std::size_t f = 0; f < stride; ++f) {
    T acc{};
    for (int a = 0; a < n; ++a) acc += v[a] * w[static_cast<std::size_t>(a) * stride + f];
    out[f] = acc;
  }
  return out;
}

// Projection onto the totally antisymmetric part, with 1/r! normalization.
template <class T>
DifferentialForm<T> antisymmetrize(const Tensor<T>& t) {
  if (!t.fully_covariant()) throw Error(ErrorCode::MixedValence, "antisymmetrize needs a covariant tensor");
  const int k = t.rank(), n = t.dim();
  DifferentialForm<T> out(n, k);
  if (k == 0) {
    out[0] = t[0];
    return out;
  }
  const auto& perms = detail::permutations(k);
  const double norm = 1.0 / static_cast<double>(perms.size());
  for (const auto& I : detail::combinations(n, k)) {
    T acc{};
    for (const auto& perm : perms) {
      MultiIndex idx{};
      for (int i = 0; i < k; ++i) idx[i] = I[perm.map[i]];
      if (perm.sign > 0)
        acc += t.at(idx);
      else
        acc -= t.at(idx);
    }
    out.set_antisymmetric(acc * norm, I);
  }
  return out;
}

template <class T>
Tensor<T> symmetrize(const Tensor<T>& t) {
  if (!t.fully_covariant()) throw Error(ErrorCode::MixedValence, "symmetrize needs a covariant tensor");
  const int k = t.rank(), n = t.dim();
  Tensor<T> out(n, t.slots());
  if (k == 0) {
    out[0] = t[0];
    return out;
  }
  const auto& perms = detail::permutations(k);
  const double norm = 1.0 / static_cast<double>(perms.size());
  for (const auto& I : detail::multisets(n, k)) {
    T acc{};
    for (const auto& perm : perms) {
      MultiIndex idx{};
      for (int i = 0; i < k; ++i) idx[i] = I[perm.map[i]];
      acc += t.at(idx);
    }
    acc = acc * norm;
    for (const auto& perm : perms) {
      MultiIndex idx{};
      for (int i = 0; i < k; ++i) idx[i] = I[perm.map[i]];
      out.at(idx) = acc;
    }
  }
  return out;
}

// Trace over one contravariant and one covariant slot.
template <class T>
Tensor<T> contract(const Tensor<T>& t, int slot_up, int slot_down) {
  const int k = t.rank(), n = t.dim();
  if (slot_up < 0 || slot_up >= k || slot_down < 0 || slot_down >= k || slot_up == slot_down ||
      t.slots()[slot_up] != Valence::Up || t.slots()[slot_down] != Valence::Down) {
    throw Error(ErrorCode::BadSlots, "contraction needs one Up and one Down slot");
  }
  std::vector<Valence> slots;
  for (int i = 0; i < k; ++i)
    if (i != slot_up && i != slot_down) slots.push_back(t.slots()[i]);
  Tensor<T> out(n, slots);
  for (std::size_t f = 0; f < out.size(); ++f) {
    const MultiIndex rest = detail::decode(f, k - 2, n);
    MultiIndex full{};
    for (int i = 0, j = 0; i < k; ++i)
      if (i != slot_up && i != slot_down) full[i] = rest[j++];
    T acc{};
    for (int a = 0; a < n; ++a) {
      full[slot_up] = a;
      full[slot_down] = a;
      acc += t.at(full);
    }
    out[f] = acc;
  }
  return out;
}

// Index inclusion into a higher-dimensional chart: new index = old + offset.
template <class T>
DifferentialForm<T> embed(const DifferentialForm<T>& w, int new_dim, int offset) {
  if (w.dim() + offset > new_dim) throw Error(ErrorCode::DimensionMismatch, "embedding does not fit");
  DifferentialForm<T> out(new_dim, w.degree());
  for (std::size_t f = 0; f < w.size(); ++f) {
    MultiIndex idx = detail::decode(f, w.degree(), w.dim());
    for (int i = 0; i < w.degree(); ++i) idx[i] += offset;
    out.at(idx) = w[f];
  }
  return out;
}

// Restriction to the index window [offset, offset + new_dim).
template <class T>
DifferentialForm<T> restrict_to(const DifferentialForm<T>& w, int new_dim, int offset) {
  DifferentialForm<T> out(new_dim, w.degree());
  for (std::size_t f = 0; f < out.size(); ++f) {
    MultiIndex idx = detail::decode(f, w.degree(), new_dim);
    for (int i = 0; i < w.degree(); ++i) idx[i] += offset;
    out[f] = w.at(idx);
  }
  return out;
}

template <class T>
DifferentialForm<T> basis_form(int dim, std::initializer_list<int> indices) {
  DifferentialForm<T> f(dim, static_cast<int>(indices.size()));
  if (indices.size() == 0) {
    f[0] = T(1.0);
    return f;
  }
  f.add_term(T(1.0), indices);
  return f;
}

// Value part of a form with dual-number components.
template <class T, int N>
DifferentialForm<T> value_part(const DifferentialForm<Dual<T, N>>& f) {
  DifferentialForm<T> out(f.dim(), f.degree());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f[i].v;
  return out;
}

}  // namespace ypq
