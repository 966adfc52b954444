#pragma once

// Metric providers for Y(p,q) and its metric cone, with the Levi-Civita
// connection, curvature, Hodge theory and covariant derivatives of form
// fields. All derivatives come from forward-mode dual numbers; metrics and
// fields are templates over the scalar type so they can be nested.
//
// Conventions:
//   Gamma^l_{mn}   = 1/2 g^{lr} (d_m g_{rn} + d_n g_{rm} - d_r g_{mn})
//   R^r_{smn}      = d_m Gamma^r_{ns} - d_n Gamma^r_{ms}
//                    + Gamma^r_{ml} Gamma^l_{ns} - Gamma^r_{nl} Gamma^l_{ms}
//   Ric_{sn}       = R^r_{srn}
//   (d*w)_{b..}    = -g^{la} (nabla w)_{l; a b..}
//   orientation    = coordinate order (theta, phi, y, beta, psi'),
//                    with r prepended on the cone.

#include <array>
#include <cmath>
#include <concepts>
#include <string_view>
#include <utility>

#include "ypq/chart.hpp"
#include "ypq/dual.hpp"
#include "ypq/error.hpp"
#include "ypq/tensor.hpp"

namespace ypq {

template <class T, std::size_t N>
using Point = std::array<T, N>;
template <class T, std::size_t N>
using Matrix = std::array<std::array<T, N>, N>;

enum class MetricLabel { Ypq, Cone };

namespace detail {

template <class T, std::size_t N>
void add_outer(Matrix<T, N>& g, const T& coef, const std::array<T, N>& v) {
  for (int i = 0; i < static_cast<int>(N); ++i) {
    if (value_of(v[i]) == 0.0 && !is_dual_v<T>) continue;
    const T ci = coef * v[i];
    g[i][i] += ci * v[i];
    for (int j = i + 1; j < static_cast<int>(N); ++j) {
      const T t = ci * v[j];
      g[i][j] += t;
      g[j][i] += t;
    }
  }
}

template <class T, std::size_t N>
Matrix<T, N> zero_matrix() {
  Matrix<T, N> m;
  for (auto& row : m) row.fill(T{});
  return m;
}

}  // namespace detail

// Lower Cholesky factor; a non-positive pivot means the metric is not
// positive definite there.
template <class T, std::size_t N>
Matrix<T, N> cholesky(const Matrix<T, N>& g) {
  using std::sqrt;
  Matrix<T, N> L = detail::zero_matrix<T, N>();
  for (int j = 0; j < static_cast<int>(N); ++j) {
    T s = g[j][j];
    for (int k = 0; k < j; ++k) s -= L[j][k] * L[j][k];
    if (!(value_of(s) > 0.0)) throw Error(ErrorCode::SingularMetric, "metric is not positive definite");
    L[j][j] = sqrt(s);
    for (int i = j + 1; i < static_cast<int>(N); ++i) {
      T t = g[i][j];
      for (int k = 0; k < j; ++k) t -= L[i][k] * L[j][k];
      L[i][j] = t / L[j][j];
    }
  }
  return L;
}

template <class T, std::size_t N>
Matrix<T, N> invert_spd(const Matrix<T, N>& g) {
  const Matrix<T, N> L = cholesky(g);
  Matrix<T, N> Li = detail::zero_matrix<T, N>();
  for (int i = 0; i < static_cast<int>(N); ++i) {
    Li[i][i] = T(1.0) / L[i][i];
    for (int j = 0; j < i; ++j) {
      T s{};
      for (int k = j; k < i; ++k) s += L[i][k] * Li[k][j];
      Li[i][j] = (T{} - s) / L[i][i];
    }
  }
  Matrix<T, N> inv = detail::zero_matrix<T, N>();
  for (int i = 0; i < static_cast<int>(N); ++i)
    for (int j = 0; j <= i; ++j) {
      T s{};
      for (int k = i; k < static_cast<int>(N); ++k) s += Li[k][i] * Li[k][j];
      inv[i][j] = s;
      inv[j][i] = s;
    }
  return inv;
}

template <class T, std::size_t N>
T sqrt_det(const Matrix<T, N>& g) {
  const Matrix<T, N> L = cholesky(g);
  T d(1.0);
  for (int i = 0; i < static_cast<int>(N); ++i) d = d * L[i][i];
  return d;
}

// ---------------------------------------------------------------------------
// Metric providers

// ds^2 of Y(p,q) in (theta, phi, y, beta, psi'), obtained from the original
// (theta, phi, y, alpha, psi) line element by alpha = -beta/6 - psi'/6.
// Valid for both c = 0 and c = 1.
template <class T>
Matrix<T, 5> metric_from_original_chart(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  const T& th = x[0];
  const T& y = x[2];
  const T ct = cos(th), st = sin(th);
  const double c = prm.c;
  const T w = w_of(prm, y), q = q_of(prm, y);
  const T f = (prm.a * c - 2.0 * y + c * y * y) / (6.0 * (prm.a - y * y));
  auto g = detail::zero_matrix<T, 5>();
  const T base = (1.0 - c * y) / 6.0;
  g[0][0] += base;
  g[1][1] += base * st * st;
  g[2][2] += 1.0 / (w * q);
  const T zero{};
  // d psi - cos(theta) d phi
  detail::add_outer<T, 5>(g, q / 9.0, {zero, T{} - ct, zero, zero, T(1.0)});
  // d alpha + f (d psi - cos(theta) d phi)
  detail::add_outer<T, 5>(g, w, {zero, T{} - f * ct, zero, T(-1.0 / 6.0), f - 1.0 / 6.0});
  return g;
}

// The primed-chart line element for c = 1:
//   (1-y)/6 (dth^2 + sin^2 th dph^2) + dy^2/p + p/36 (dbe + cos th dph)^2
//   + 1/9 (dps' - cos th dph + y (dbe + cos th dph))^2
template <class T>
Matrix<T, 5> metric_primed_chart(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  const T& th = x[0];
  const T& y = x[2];
  const T ct = cos(th), st = sin(th);
  const T p = p_of(prm, y);
  auto g = detail::zero_matrix<T, 5>();
  const T base = (1.0 - y) / 6.0;
  g[0][0] += base;
  g[1][1] += base * st * st;
  g[2][2] += 1.0 / p;
  const T zero{};
  detail::add_outer<T, 5>(g, p / 36.0, {zero, ct, zero, T(1.0), zero});
  detail::add_outer<T, 5>(g, T(1.0 / 9.0), {zero, (y - 1.0) * ct, zero, y, T(1.0)});
  return g;
}

// Inverse of the above from its dual frame. Inverting numerically near the
// poles loses most digits (cond(g) ~ 1/sin^2 th).
template <class T>
Matrix<T, 5> inverse_primed_chart(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  const T& th = x[0];
  const T& y = x[2];
  const T ct = cos(th), st = sin(th);
  const T p = p_of(prm, y);
  const T base = (1.0 - y) / 6.0;
  auto gi = detail::zero_matrix<T, 5>();
  const T zero{};
  const T one(1.0);
  gi[0][0] += 1.0 / base;
  gi[2][2] += p;
  gi[4][4] += 9.0;
  detail::add_outer<T, 5>(gi, 1.0 / (base * st * st), {zero, one, zero, T{} - ct, ct});
  detail::add_outer<T, 5>(gi, 36.0 / p, {zero, zero, zero, one, T{} - y});
  return gi;
}

class YpqMetric {
 public:
  static constexpr int dim = 5;

  explicit YpqMetric(const YpqParams& prm, double margin = 1e-3)
      : params_(prm), domain_(compute_domain(prm, margin)) {}

  const YpqParams& params() const { return params_; }
  const ChartDomain& domain() const { return domain_; }
  MetricLabel label() const { return MetricLabel::Ypq; }
  double einstein_constant() const { return 4.0; }  // Ric = 2n g with n = 2

  template <class T>
  Matrix<T, 5> operator()(const Point<T, 5>& x) const {
    if (!in_interior(domain_, value_of(x[0]), value_of(x[2]))) {
      throw Error(ErrorCode::PointOutOfDomain, "point outside the Y(p,q) chart");
    }
    return params_.c == 1 ? metric_primed_chart(params_, x) : metric_from_original_chart(params_, x);
  }

  template <class T>
  Matrix<T, 5> inverse(const Point<T, 5>& x) const {
    if (params_.c != 1) return invert_spd((*this)(x));
    if (!in_interior(domain_, value_of(x[0]), value_of(x[2]))) {
      throw Error(ErrorCode::PointOutOfDomain, "point outside the Y(p,q) chart");
    }
    return inverse_primed_chart(params_, x);
  }

 private:
  YpqParams params_;
  ChartDomain domain_;
};

// g_cone = dr^2 + r^2 g_S in (r, theta, phi, y, beta, psi').
class ConeMetric {
 public:
  static constexpr int dim = 6;

  explicit ConeMetric(const YpqParams& prm, double margin = 1e-3) : base_(prm, margin) {}
  explicit ConeMetric(YpqMetric base) : base_(std::move(base)) {}

  const YpqMetric& base() const { return base_; }
  const YpqParams& params() const { return base_.params(); }
  MetricLabel label() const { return MetricLabel::Cone; }
  double einstein_constant() const { return 0.0; }

  template <class T>
  Matrix<T, 6> operator()(const Point<T, 6>& x) const {
    if (!(value_of(x[0]) > 0.0)) throw Error(ErrorCode::PointOutOfDomain, "cone radius must be positive");
    const Point<T, 5> b{x[1], x[2], x[3], x[4], x[5]};
    const Matrix<T, 5> gb = base_(b);
    auto g = detail::zero_matrix<T, 6>();
    g[0][0] = T(1.0);
    const T r2 = x[0] * x[0];
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) g[i + 1][j + 1] = r2 * gb[i][j];
    return g;
  }

  template <class T>
  Matrix<T, 6> inverse(const Point<T, 6>& x) const {
    if (!(value_of(x[0]) > 0.0)) throw Error(ErrorCode::PointOutOfDomain, "cone radius must be positive");
    const Point<T, 5> b{x[1], x[2], x[3], x[4], x[5]};
    const Matrix<T, 5> gb = base_.inverse(b);
    auto gi = detail::zero_matrix<T, 6>();
    gi[0][0] = T(1.0);
    const T r2 = x[0] * x[0];
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) gi[i + 1][j + 1] = gb[i][j] / r2;
    return gi;
  }

 private:
  YpqMetric base_;
};

// Base metric with a constant added to one component pair; a non-Einstein
// negative control.
template <class Base>
class PerturbedMetric {
 public:
  static constexpr int dim = Base::dim;

  PerturbedMetric(Base base, int i, int j, double eps) : base_(std::move(base)), i_(i), j_(j), eps_(eps) {}

  const Base& base() const { return base_; }
  MetricLabel label() const { return base_.label(); }
  double einstein_constant() const { return base_.einstein_constant(); }

  template <class T>
  Matrix<T, dim> operator()(const Point<T, dim>& x) const {
    Matrix<T, dim> g = base_(x);
    g[i_][j_] += eps_;
    if (i_ != j_) g[j_][i_] += eps_;
    return g;
  }

 private:
  Base base_;
  int i_, j_;
  double eps_;
};

template <class M>
concept MetricProvider = requires(const M& m, const Point<double, M::dim>& x) {
  { M::dim } -> std::convertible_to<int>;
  { m(x) } -> std::same_as<Matrix<double, M::dim>>;
  { m.einstein_constant() } -> std::convertible_to<double>;
};

inline Matrix<double, 5> metric_ypq(const YpqParams& prm, const ChartPoint& pt) {
  return YpqMetric(prm)(pt.coords());
}
inline Matrix<double, 6> metric_cone(const YpqParams& prm, const ConePoint& cpt) {
  return ConeMetric(prm)(cpt.coords());
}

template <MetricProvider M, class T>
Matrix<T, M::dim> inverse_metric(const M& metric, const Point<T, M::dim>& x) {
  if constexpr (requires { metric.inverse(x); }) {
    return metric.inverse(x);
  } else {
    return invert_spd(metric(x));
  }
}

// Value, gradient and Hessian of every metric component.
template <int N>
struct Jet2 {
  Matrix<double, N> value;
  std::array<Matrix<double, N>, N> gradient;                     // [k][i][j] = d_k g_ij
  std::array<std::array<Matrix<double, N>, N>, N> hessian;       // [k][l][i][j]
};

template <MetricProvider M>
Jet2<M::dim> metric_jet2(const M& metric, const Point<double, M::dim>& x) {
  constexpr int N = M::dim;
  using D1 = Dual<double, N>;
  using D2 = Dual<D1, N>;
  Point<D2, N> xd;
  for (int i = 0; i < static_cast<int>(N); ++i) {
    xd[i].v = D1(x[i]);
    xd[i].v.d[i] = 1.0;
    xd[i].d[i] = D1(1.0);
  }
  const auto g = metric(xd);
  Jet2<N> jet;
  for (int i = 0; i < static_cast<int>(N); ++i)
    for (int j = 0; j < static_cast<int>(N); ++j) {
      jet.value[i][j] = g[i][j].v.v;
      for (int k = 0; k < static_cast<int>(N); ++k) {
        jet.gradient[k][i][j] = g[i][j].v.d[k];
        for (int l = 0; l < static_cast<int>(N); ++l) jet.hessian[k][l][i][j] = g[i][j].d[k].d[l];
      }
    }
  return jet;
}

// ---------------------------------------------------------------------------
// Connection and curvature

template <MetricProvider M, class T>
Tensor<T> christoffel(const M& metric, const Point<T, M::dim>& x) {
  constexpr int N = M::dim;
  const auto gd = metric(seed(x));
  Matrix<T, N> g;
  std::array<Matrix<T, N>, N> dg;  // dg[k][i][j] = d_k g_ij
  for (int i = 0; i < static_cast<int>(N); ++i)
    for (int j = 0; j < static_cast<int>(N); ++j) {
      g[i][j] = gd[i][j].v;
      for (int k = 0; k < static_cast<int>(N); ++k) dg[k][i][j] = gd[i][j].d[k];
    }
  const Matrix<T, N> gi = inverse_metric(metric, x);
  // first kind: [r; m n] = 1/2 (d_m g_rn + d_n g_rm - d_r g_mn)
  Tensor<T> first = Tensor<T>::covariant(N, 3);
  for (int r = 0; r < static_cast<int>(N); ++r)
    for (int m = 0; m < static_cast<int>(N); ++m)
      for (int n = m; n < static_cast<int>(N); ++n) {
        const T v = 0.5 * (dg[m][r][n] + dg[n][r][m] - dg[r][m][n]);
        first(r, m, n) = v;
        first(r, n, m) = v;
      }
  Tensor<T> gam(N, {Valence::Up, Valence::Down, Valence::Down});
  for (int l = 0; l < static_cast<int>(N); ++l)
    for (int m = 0; m < static_cast<int>(N); ++m)
      for (int n = m; n < static_cast<int>(N); ++n) {
        T s{};
        for (int r = 0; r < static_cast<int>(N); ++r) s += gi[l][r] * first(r, m, n);
        gam(l, m, n) = s;
        gam(l, n, m) = s;
      }
  return gam;
}

template <MetricProvider M, class T>
Tensor<T> riemann(const M& metric, const Point<T, M::dim>& x) {
  constexpr int N = M::dim;
  const auto gd = christoffel(metric, seed(x));
  Tensor<T> G(N, {Valence::Up, Valence::Down, Valence::Down});
  for (std::size_t f = 0; f < G.size(); ++f) G[f] = gd[f].v;
  auto dG = [&](int k, int r, int a, int b) -> const T& { return gd(r, a, b).d[k]; };
  Tensor<T> R(N, {Valence::Up, Valence::Down, Valence::Down, Valence::Down});
  for (int r = 0; r < static_cast<int>(N); ++r)
    for (int s = 0; s < static_cast<int>(N); ++s)
      for (int m = 0; m < static_cast<int>(N); ++m)
        for (int n = m + 1; n < static_cast<int>(N); ++n) {
          T v = dG(m, r, n, s) - dG(n, r, m, s);
          for (int l = 0; l < static_cast<int>(N); ++l) v += G(r, m, l) * G(l, n, s) - G(r, n, l) * G(l, m, s);
          R(r, s, m, n) = v;
          R(r, s, n, m) = T{} - v;
        }
  return R;
}

template <MetricProvider M, class T>
Tensor<T> ricci(const M& metric, const Point<T, M::dim>& x) {
  return contract(riemann(metric, x), 0, 2);
}

// max |Ric - lambda g| with lambda = 4 on Y(p,q) and 0 on the cone.
template <MetricProvider M>
double einstein_residual(const M& metric, const Point<double, M::dim>& x) {
  constexpr int N = M::dim;
  const Tensor<double> ric = ricci(metric, x);
  const auto g = metric(x);
  const double lam = metric.einstein_constant();
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(N); ++i)
    for (int j = 0; j < static_cast<int>(N); ++j) worst = std::max(worst, std::abs(ric(i, j) - lam * g[i][j]));
  return worst;
}

// max |d_l g_mn - Gamma^r_{lm} g_rn - Gamma^r_{ln} g_mr|
template <MetricProvider M>
double metric_compatibility_residual(const M& metric, const Point<double, M::dim>& x) {
  constexpr int N = M::dim;
  const auto gd = metric(seed(x));
  const Tensor<double> G = christoffel(metric, x);
  double worst = 0.0;
  for (int l = 0; l < static_cast<int>(N); ++l)
    for (int m = 0; m < static_cast<int>(N); ++m)
      for (int n = 0; n < static_cast<int>(N); ++n) {
        double v = gd[m][n].d[l];
        for (int r = 0; r < static_cast<int>(N); ++r) v -= G(r, l, m) * gd[r][n].v + G(r, l, n) * gd[m][r].v;
        worst = std::max(worst, std::abs(v));
      }
  return worst;
}

// ---------------------------------------------------------------------------
// Form fields

enum class FormName {
  Eta,
  Sigma,
  Psi,
  Phi1,
  Phi2,
  Xi,
  Upsilon,
  OmegaCone,
  ReDvCone,
  ImDvCone,
  Custom,
};

inline std::string_view to_string(FormName n) {
  switch (n) {
    case FormName::Eta: return "eta";
    case FormName::Sigma: return "sigma";
    case FormName::Psi: return "Psi";
    case FormName::Phi1: return "Phi1";
    case FormName::Phi2: return "Phi2";
    case FormName::Xi: return "Xi";
    case FormName::Upsilon: return "Upsilon";
    case FormName::OmegaCone: return "Omega_cone";
    case FormName::ReDvCone: return "Re_dV_cone";
    case FormName::ImDvCone: return "Im_dV_cone";
    case FormName::Custom: return "custom";
  }
  return "?";
}

// A p-form field on a Dim-dimensional chart. `eval` is a generic callable
// accepting Point<T, Dim> for any scalar T, so fields can be differentiated
// to any order.
template <int Dim, class Eval>
struct FormField {
  static constexpr int dim = Dim;
  FormName name = FormName::Custom;
  int degree = 0;
  Eval eval;

  template <class T>
  DifferentialForm<T> operator()(const Point<T, Dim>& x) const {
    DifferentialForm<T> w = eval(x);
    if (w.degree() != degree || w.dim() != Dim) throw Error(ErrorCode::DegreeMismatch, "field evaluator degree");
    return w;
  }
};

template <int Dim, class Eval>
FormField<Dim, Eval> make_field(FormName name, int degree, Eval eval) {
  return FormField<Dim, Eval>{name, degree, std::move(eval)};
}

template <class T, std::size_t N>
struct FormJet {
  DifferentialForm<T> value;
  Tensor<T> gradient;  // gradient(l, a, b, ..) = d_l w_{ab..}
};

template <class F, class T>
FormJet<T, F::dim> form_jet(const F& field, const Point<T, F::dim>& x) {
  constexpr int N = F::dim;
  const auto wd = field(seed(x));
  FormJet<T, N> jet{DifferentialForm<T>(N, wd.degree()), Tensor<T>::covariant(N, wd.degree() + 1)};
  const std::size_t stride = wd.size();
  for (std::size_t f = 0; f < stride; ++f) {
    jet.value[f] = wd[f].v;
    for (int l = 0; l < static_cast<int>(N); ++l) jet.gradient[static_cast<std::size_t>(l) * stride + f] = wd[f].d[l];
  }
  return jet;
}

// dw = (p+1) Alt(dw); metric-free.
template <class F, class T>
DifferentialForm<T> exterior_derivative(const F& field, const Point<T, F::dim>& x) {
  const auto jet = form_jet(field, x);
  DifferentialForm<T> d = antisymmetrize(jet.gradient);
  d *= static_cast<double>(jet.value.degree() + 1);
  return d;
}

template <class F>
auto d_field(const F& field) {
  return make_field<F::dim>(FormName::Custom, field.degree + 1,
                            [field](const auto& x) { return exterior_derivative(field, x); });
}

// (nabla w)_{l; a b..} = d_l w_{ab..} - sum_i Gamma^r_{l a_i} w_{..r..}
template <MetricProvider M, class F, class T>
Tensor<T> covariant_derivative_form(const M& metric, const F& field, const Point<T, M::dim>& x) {
  static_assert(F::dim == M::dim, "field and metric dimensions differ");
  constexpr int N = M::dim;
  const auto jet = form_jet(field, x);
  const Tensor<T> G = christoffel(metric, x);
  const int p = jet.value.degree();
  Tensor<T> out = jet.gradient;
  for (std::size_t f = 0; f < out.size(); ++f) {
    const MultiIndex idx = detail::decode(f, p + 1, N);
    const int l = idx[0];
    T corr{};
    for (int i = 1; i <= p; ++i) {
      MultiIndex w{};
      for (int k = 1; k <= p; ++k) w[k - 1] = idx[k];
      for (int r = 0; r < static_cast<int>(N); ++r) {
        w[i - 1] = r;
        corr += G(r, l, idx[i]) * jet.value.at(w);
      }
    }
    out[f] -= corr;
  }
  return out;
}

// -g^{la} (nabla w)_{l; a ..}
template <class T, std::size_t N>
DifferentialForm<T> codifferential_from(const Tensor<T>& nabla, const Matrix<T, N>& gi) {
  const int p = nabla.rank() - 1;
  if (p < 1) throw Error(ErrorCode::ZeroDegree, "codifferential of a 0-form");
  DifferentialForm<T> out(N, p - 1);
  const std::size_t stride = out.size();
  for (std::size_t f = 0; f < stride; ++f) {
    T acc{};
    for (int l = 0; l < static_cast<int>(N); ++l)
      for (int a = 0; a < static_cast<int>(N); ++a)
        acc += gi[l][a] * nabla[(static_cast<std::size_t>(l) * N + a) * stride + f];
    out[f] = T{} - acc;
  }
  return out;
}

template <MetricProvider M, class F, class T>
DifferentialForm<T> codifferential(const M& metric, const F& field, const Point<T, M::dim>& x) {
  const Tensor<T> nabla = covariant_derivative_form(metric, field, x);
  return codifferential_from<T, M::dim>(nabla, inverse_metric(metric, x));
}

// ---------------------------------------------------------------------------
// Musical isomorphisms, volume and Hodge star

template <MetricProvider M, class T>
DifferentialForm<T> flat(const M& metric, const Point<T, M::dim>& x, const std::array<T, M::dim>& v) {
  constexpr int N = M::dim;
  const auto g = metric(x);
  DifferentialForm<T> out(N, 1);
  for (int i = 0; i < static_cast<int>(N); ++i) {
    T s{};
    for (int j = 0; j < static_cast<int>(N); ++j) s += g[i][j] * v[j];
    out[i] = s;
  }
  return out;
}

template <MetricProvider M, class T>
std::array<T, M::dim> sharp(const M& metric, const Point<T, M::dim>& x, const DifferentialForm<T>& w) {
  constexpr int N = M::dim;
  if (w.degree() != 1 || w.dim() != N) throw Error(ErrorCode::DimensionMismatch, "sharp needs a 1-form");
  const auto gi = inverse_metric(metric, x);
  std::array<T, N> v{};
  for (int i = 0; i < static_cast<int>(N); ++i)
    for (int j = 0; j < static_cast<int>(N); ++j) v[i] += gi[i][j] * w[j];
  return v;
}

// sqrt(det g) dx^1 ^ .. ^ dx^n
template <MetricProvider M, class T>
DifferentialForm<T> volume_form(const M& metric, const Point<T, M::dim>& x) {
  constexpr int N = M::dim;
  DifferentialForm<T> vol(N, N);
  MultiIndex base{};
  for (int i = 0; i < static_cast<int>(N); ++i) base[i] = i;
  vol.set_antisymmetric(sqrt_det(metric(x)), base);
  return vol;
}

template <MetricProvider M>
auto volume_field(const M& metric) {
  return make_field<M::dim>(FormName::Custom, M::dim, [metric](const auto& x) { return volume_form(metric, x); });
}

namespace detail {

inline int levi_civita(const MultiIndex& idx, int n) {
  int inversions = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (idx[i] == idx[j]) return 0;
      if (idx[i] > idx[j]) ++inversions;
    }
  return inversions % 2 == 0 ? 1 : -1;
}

}  // namespace detail

// (*w)_{nu..} = (1/p!) sqrt(g) eps_{mu.. nu..} w^{mu..}
template <MetricProvider M>
DifferentialForm<double> hodge_star(const M& metric, const DifferentialForm<double>& w, const Point<double, M::dim>& x) {
  constexpr int N = M::dim;
  if (w.dim() != N) throw Error(ErrorCode::DimensionMismatch, "hodge star dimension");
  const auto g = metric(x);
  const auto gi = inverse_metric(metric, x);
  const double vol = sqrt_det(g);
  const int p = w.degree();
  // raise every index
  DifferentialForm<double> up = w;
  for (int slot = 0; slot < p; ++slot) {
    DifferentialForm<double> next(N, p);
    for (std::size_t f = 0; f < next.size(); ++f) {
      MultiIndex idx = detail::decode(f, p, N);
      const int target = idx[slot];
      double s = 0.0;
      for (int a = 0; a < static_cast<int>(N); ++a) {
        idx[slot] = a;
        s += gi[target][a] * up.at(idx);
      }
      next[f] = s;
    }
    up = std::move(next);
  }
  double pfact = 1.0;
  for (int i = 2; i <= p; ++i) pfact *= i;
  DifferentialForm<double> out(N, N - p);
  for (std::size_t fo = 0; fo < out.size(); ++fo) {
    const MultiIndex nu = detail::decode(fo, N - p, N);
    double s = 0.0;
    for (std::size_t fi = 0; fi < up.size(); ++fi) {
      if (up[fi] == 0.0) continue;
      const MultiIndex mu = detail::decode(fi, p, N);
      MultiIndex all{};
      for (int i = 0; i < p; ++i) all[i] = mu[i];
      for (int i = 0; i < N - p; ++i) all[p + i] = nu[i];
      const int eps = detail::levi_civita(all, N);
      if (eps != 0) s += eps * up[fi];
    }
    out[fo] = vol * s / pfact;
  }
  return out;
}

}  // namespace ypq
