#pragma once

// Closed-form evaluators for the named forms on Y(p,q) (c = 1) and its
// Calabi-Yau cone, the cone lift of a form, and the Killing-Yano residuals.
//
// Chart indices: base (theta 0, phi 1, y 2, beta 3, psi' 4);
//                cone (r 0, theta 1, phi 2, y 3, beta 4, psi' 5).

#include <cmath>
#include <utility>

#include "ypq/chart.hpp"
#include "ypq/geometry.hpp"
#include "ypq/tensor.hpp"

namespace ypq {

// A complex form as a pair of real forms.
template <class T>
struct ComplexForm {
  DifferentialForm<T> re;
  DifferentialForm<T> im;
};

template <class T>
ComplexForm<T> wedge(const ComplexForm<T>& a, const ComplexForm<T>& b) {
  return {wedge(a.re, b.re) - wedge(a.im, b.im), wedge(a.re, b.im) + wedge(a.im, b.re)};
}

// (c_re + i c_im) * w
template <class T>
ComplexForm<T> scale(const T& c_re, const T& c_im, const ComplexForm<T>& w) {
  return {c_re * w.re - c_im * w.im, c_re * w.im + c_im * w.re};
}

template <class T>
ComplexForm<T> conj(ComplexForm<T> w) {
  w.im *= -1.0;
  return w;
}

inline void require_c1(const YpqParams& prm) {
  if (prm.c != 1) throw Error(ErrorCode::UnsupportedC, "explicit Killing forms are defined for c = 1 only");
}

namespace idx {
inline constexpr int th = 0, ph = 1, y = 2, be = 3, ps = 4;
// cone chart
inline constexpr int r = 0, cth = 1, cph = 2, cy = 3, cbe = 4, cps = 5;
}  // namespace idx

// sigma = 1/3 [ -cos(theta) dphi + y (dbeta + cos(theta) dphi) ]
template <class T>
DifferentialForm<T> eval_sigma(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  require_c1(prm);
  const T ct = cos(x[idx::th]);
  const T& y = x[idx::y];
  DifferentialForm<T> s(5, 1);
  s[idx::ph] = (y - 1.0) * ct / 3.0;
  s[idx::be] = y / 3.0;
  return s;
}

// eta = 1/3 dpsi' + sigma
template <class T>
DifferentialForm<T> eval_eta(const YpqParams& prm, const Point<T, 5>& x) {
  DifferentialForm<T> e = eval_sigma(prm, x);
  e[idx::ps] += T(1.0 / 3.0);
  return e;
}

template <class T>
DifferentialForm<T> eval_psi(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  using namespace idx;
  require_c1(prm);
  const T ct = cos(x[th]), st = sin(x[th]);
  const T& yv = x[y];
  const double k = 1.0 / 9.0;
  DifferentialForm<T> w(5, 3);
  w.add_term(k * (1.0 - yv) * st, {th, ph, ps});
  w.add_term(T(k), {y, be, ps});
  w.add_term(k * ct, {y, ph, ps});
  w.add_term(-k * ct, {y, be, ph});
  w.add_term(k * (1.0 - yv) * yv * st, {be, th, ph});
  return w;
}

template <class T>
DifferentialForm<T> eval_phi_k(const YpqParams& prm, const Point<T, 5>& x, int k);

namespace detail {

// sqrt((1 - y) / (6 p(y)))
template <class T>
T kahler_prefactor(const YpqParams& prm, const T& y) {
  using std::sqrt;
  return sqrt((1.0 - y) / (6.0 * p_of(prm, y)));
}

// The two brackets shared by Xi and Upsilon:
//   A = -dy^dth + p/6 sin(th) dbe^dph
//   B = -sin(th) dy^dph - p/6 dbe^dth + p/6 cos(th) dth^dph
template <class T>
std::pair<DifferentialForm<T>, DifferentialForm<T>> xi_brackets(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  using namespace idx;
  const T ct = cos(x[th]), st = sin(x[th]);
  const T p6 = p_of(prm, x[y]) / 6.0;
  DifferentialForm<T> A(5, 2), B(5, 2);
  A.add_term(T(-1.0), {y, th});
  A.add_term(p6 * st, {be, ph});
  B.add_term(T{} - st, {y, ph});
  B.add_term(T{} - p6, {be, th});
  B.add_term(p6 * ct, {th, ph});
  return {A, B};
}

}  // namespace detail

// Xi = f (cos psi' A - sin psi' B)
template <class T>
DifferentialForm<T> eval_xi(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  require_c1(prm);
  const auto [A, B] = detail::xi_brackets(prm, x);
  const T f = detail::kahler_prefactor(prm, x[idx::y]);
  const T cp = cos(x[idx::ps]), sp = sin(x[idx::ps]);
  return (f * cp) * A - (f * sp) * B;
}

// Upsilon = f (cos psi' B + sin psi' A)
template <class T>
DifferentialForm<T> eval_upsilon(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  require_c1(prm);
  const auto [A, B] = detail::xi_brackets(prm, x);
  const T f = detail::kahler_prefactor(prm, x[idx::y]);
  const T cp = cos(x[idx::ps]), sp = sin(x[idx::ps]);
  return (f * cp) * B + (f * sp) * A;
}

// dV_EK = f (dth + i sin th dph) ^ (dy + i p/6 (dbe + cos th dph)), on the
// (theta, phi, y, beta) block of the 5-dimensional chart.
template <class T>
ComplexForm<T> eval_base_volume(const YpqParams& prm, const Point<T, 5>& x) {
  using std::cos;
  using std::sin;
  using namespace idx;
  require_c1(prm);
  const T ct = cos(x[th]), st = sin(x[th]);
  const T p6 = p_of(prm, x[y]) / 6.0;
  ComplexForm<T> a{DifferentialForm<T>(5, 1), DifferentialForm<T>(5, 1)};
  a.re[th] = T(1.0);
  a.im[ph] = st;
  ComplexForm<T> b{DifferentialForm<T>(5, 1), DifferentialForm<T>(5, 1)};
  b.re[y] = T(1.0);
  b.im[be] = p6;
  b.im[ph] = p6 * ct;
  ComplexForm<T> v = wedge(a, b);
  const T f = detail::kahler_prefactor(prm, x[y]);
  v.re *= f;
  v.im *= f;
  return v;
}

// Omega_cone = r^2 (1-y)/6 sin th dth^dph + r^2/6 dy^(dbe + cos th dph)
//            + r/3 dr^[y dbe + dps' - (1-y) cos th dph]
template <class T>
DifferentialForm<T> eval_kahler_cone(const YpqParams& prm, const Point<T, 6>& x) {
  using std::cos;
  using std::sin;
  using namespace idx;
  require_c1(prm);
  const T& rr = x[r];
  const T& yv = x[cy];
  const T ct = cos(x[cth]), st = sin(x[cth]);
  const T r2 = rr * rr;
  DifferentialForm<T> w(6, 2);
  w.add_term(r2 * (1.0 - yv) / 6.0 * st, {cth, cph});
  w.add_term(r2 / 6.0, {cy, cbe});
  w.add_term(r2 / 6.0 * ct, {cy, cph});
  w.add_term(rr / 3.0 * yv, {r, cbe});
  w.add_term(rr / 3.0, {r, cps});
  w.add_term(T{} - rr / 3.0 * (1.0 - yv) * ct, {r, cph});
  return w;
}

// dV_cone = e^{i psi'} r^2 dV_EK ^ (dr + i r eta), as (Re, Im).
template <class T>
ComplexForm<T> eval_complex_volume(const YpqParams& prm, const Point<T, 6>& x) {
  using std::cos;
  using std::sin;
  using namespace idx;
  require_c1(prm);
  const T& rr = x[r];
  const T& yv = x[cy];
  const T ct = cos(x[cth]), st = sin(x[cth]);
  const T p6 = p_of(prm, yv) / 6.0;
  auto one_form = [] { return ComplexForm<T>{DifferentialForm<T>(6, 1), DifferentialForm<T>(6, 1)}; };
  ComplexForm<T> a = one_form();
  a.re[cth] = T(1.0);
  a.im[cph] = st;
  ComplexForm<T> b = one_form();
  b.re[cy] = T(1.0);
  b.im[cbe] = p6;
  b.im[cph] = p6 * ct;
  ComplexForm<T> c = one_form();
  c.re[r] = T(1.0);
  c.im[cbe] = rr / 3.0 * yv;
  c.im[cps] = rr / 3.0;
  c.im[cph] = T{} - rr / 3.0 * (1.0 - yv) * ct;
  const ComplexForm<T> v = wedge(wedge(a, b), c);
  const T amp = rr * rr * detail::kahler_prefactor(prm, yv);
  return scale(amp * cos(x[cps]), amp * sin(x[cps]), v);
}

// ---------------------------------------------------------------------------
// Cone lift: w^C = r^p dr ^ w + r^{p+1}/(p+1) dw

template <class F, class T>
DifferentialForm<T> cone_lift_at(const F& field, const Point<T, 6>& x) {
  static_assert(F::dim == 5, "cone lift acts on 5-dimensional fields");
  const int p = field.degree;
  const Point<T, 5> b{x[1], x[2], x[3], x[4], x[5]};
  const DifferentialForm<T> w = field(b);
  const DifferentialForm<T> dw = exterior_derivative(field, b);
  const T& rr = x[0];
  T rp(1.0);
  for (int i = 0; i < p; ++i) rp = rp * rr;
  DifferentialForm<T> out = rp * wedge(basis_form<T>(6, {0}), embed(w, 6, 1));
  out += (rp * rr / static_cast<double>(p + 1)) * embed(dw, 6, 1);
  return out;
}

template <class F>
auto cone_lift(const F& field) {
  return make_field<6>(FormName::Custom, field.degree + 1,
                       [field](const auto& x) { return cone_lift_at(field, x); });
}

template <class F>
DifferentialForm<double> cone_lift(const F& field, const ConePoint& cpt) {
  return cone_lift_at(field, cpt.coords());
}

// ---------------------------------------------------------------------------
// Named form catalog bound to a parameter set with c = 1.

class FormCatalog {
 public:
  explicit FormCatalog(const YpqParams& prm) : params_(prm) { require_c1(prm); }

  const YpqParams& params() const { return params_; }

  auto eta() const {
    return make_field<5>(FormName::Eta, 1, [p = params_](const auto& x) { return eval_eta(p, x); });
  }
  auto sigma() const {
    return make_field<5>(FormName::Sigma, 1, [p = params_](const auto& x) { return eval_sigma(p, x); });
  }
  auto psi() const {
    return make_field<5>(FormName::Psi, 3, [p = params_](const auto& x) { return eval_psi(p, x); });
  }
  // (d eta)^k, k = 1, 2
  auto phi(int k) const {
    if (k != 1 && k != 2) throw Error(ErrorCode::DegreeOverflow, "Phi_k needs k in {1, 2}");
    return make_field<5>(k == 1 ? FormName::Phi1 : FormName::Phi2, 2 * k,
                         [p = params_, k](const auto& x) { return eval_phi_k(p, x, k); });
  }
  auto xi() const {
    return make_field<5>(FormName::Xi, 2, [p = params_](const auto& x) { return eval_xi(p, x); });
  }
  auto upsilon() const {
    return make_field<5>(FormName::Upsilon, 2, [p = params_](const auto& x) { return eval_upsilon(p, x); });
  }
  auto omega_cone() const {
    return make_field<6>(FormName::OmegaCone, 2, [p = params_](const auto& x) { return eval_kahler_cone(p, x); });
  }
  auto re_dv_cone() const {
    return make_field<6>(FormName::ReDvCone, 3,
                         [p = params_](const auto& x) { return eval_complex_volume(p, x).re; });
  }
  auto im_dv_cone() const {
    return make_field<6>(FormName::ImDvCone, 3,
                         [p = params_](const auto& x) { return eval_complex_volume(p, x).im; });
  }

 private:
  YpqParams params_;
};

template <class T>
DifferentialForm<T> eval_phi_k(const YpqParams& prm, const Point<T, 5>& x, int k) {
  const DifferentialForm<T> deta = exterior_derivative(FormCatalog(prm).eta(), x);
  return wedge_power(deta, k);
}

// ---------------------------------------------------------------------------
// Residual checkers

namespace detail {

// Slice (nabla w)_{k; ...} for a fixed derivative direction k.
template <class T>
DifferentialForm<T> direction_slice(const Tensor<T>& nabla, int k, int dim, int degree) {
  DifferentialForm<T> out(dim, degree);
  const std::size_t stride = out.size();
  for (std::size_t f = 0; f < stride; ++f) out[f] = nabla[static_cast<std::size_t>(k) * stride + f];
  return out;
}

template <class T, std::size_t N>
DifferentialForm<T> row_one_form(const Matrix<T, N>& g, int k) {
  DifferentialForm<T> out(N, 1);
  for (int j = 0; j < static_cast<int>(N); ++j) out[j] = g[k][j];
  return out;
}

}  // namespace detail

// max over basis X of | nabla_X w - 1/(p+1) X _| dw + 1/(n-p+1) X^flat ^ d*w |
template <MetricProvider M, class F>
double cky_residual(const M& metric, const F& field, const Point<double, M::dim>& x) {
  constexpr int n = M::dim;
  const int p = field.degree;
  const Tensor<double> nabla = covariant_derivative_form(metric, field, x);
  const DifferentialForm<double> dw = exterior_derivative(field, x);
  const auto g = metric(x);
  const DifferentialForm<double> dstar = codifferential_from<double, n>(nabla, inverse_metric(metric, x));
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    std::array<double, n> e{};
    e[k] = 1.0;
    DifferentialForm<double> term = detail::direction_slice(nabla, k, n, p);
    term -= (1.0 / (p + 1)) * interior_product(e, dw);
    term += (1.0 / (n - p + 1)) * wedge(detail::row_one_form<double, n>(g, k), dstar);
    worst = std::max(worst, max_abs(term));
  }
  return worst;
}

// max over basis X of | nabla_X (dw) - c X^flat ^ w |
template <MetricProvider M, class F>
double sky_residual(const M& metric, const F& field, double c_const, const Point<double, M::dim>& x) {
  constexpr int n = M::dim;
  const int p = field.degree;
  const Tensor<double> nabla_d = covariant_derivative_form(metric, d_field(field), x);
  const DifferentialForm<double> w = field(x);
  const auto g = metric(x);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    DifferentialForm<double> term = detail::direction_slice(nabla_d, k, n, p + 1);
    term -= c_const * wedge(detail::row_one_form<double, n>(g, k), w);
    worst = std::max(worst, max_abs(term));
  }
  return worst;
}

// max |nabla w|
template <MetricProvider M, class F>
double parallel_residual(const M& metric, const F& field, const Point<double, M::dim>& x) {
  return max_abs(covariant_derivative_form(metric, field, x));
}

template <MetricProvider M, class F>
double coclosed_residual(const M& metric, const F& field, const Point<double, M::dim>& x) {
  // long double: g^{ab} ~ 1/sin^2 th multiplies the covariant derivative
  Point<long double, M::dim> xl;
  for (int i = 0; i < M::dim; ++i) xl[i] = x[i];
  const auto d = codifferential(metric, field, xl);
  long double worst = 0.0L;
  for (std::size_t f = 0; f < d.size(); ++f) worst = std::max(worst, std::abs(d[f]));
  return static_cast<double>(worst);
}

template <class F>
double closed_residual(const F& field, const Point<double, F::dim>& x) {
  return max_abs(exterior_derivative(field, x));
}

}  // namespace ypq
