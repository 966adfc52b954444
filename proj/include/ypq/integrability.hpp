#pragma once

// Stackel-Killing tensors built from pairs of Killing forms, the geodesic
// Hamiltonian flow on Y(p,q), its first integrals, conservation drift and
// functional-independence rank.
//
// Phase space is (theta, phi, y, beta, psi'; P_theta, P_phi, P_y, P_beta,
// P_psi'). The SU(2) fibre momentum entering J^2 is P_psi' - P_beta, which
// is the momentum conjugate to psi at fixed alpha in the original chart.

#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ypq/chart.hpp"
#include "ypq/forms.hpp"
#include "ypq/geometry.hpp"
#include "ypq/ode.hpp"
#include "ypq/tensor.hpp"

namespace ypq {

using PhaseVector = std::array<double, 10>;

struct PhaseState {
  ChartPoint point;
  std::array<double, 5> momenta{};  // P_theta, P_phi, P_y, P_beta, P_psi'

  PhaseVector to_array() const {
    const auto x = point.coords();
    PhaseVector z{};
    for (int i = 0; i < 5; ++i) {
      z[i] = x[i];
      z[5 + i] = momenta[i];
    }
    return z;
  }
  static PhaseState from_array(const PhaseVector& z) {
    PhaseState s;
    s.point = ChartPoint::from_coords({z[0], z[1], z[2], z[3], z[4]});
    for (int i = 0; i < 5; ++i) s.momenta[i] = z[5 + i];
    return s;
  }
};

struct ConservedSet {
  double H = 0.0;
  double P_phi = 0.0;
  double P_beta = 0.0;
  double P_psi = 0.0;
  double J2 = 0.0;
  std::vector<std::pair<std::string, double>> quadratics;
};

// ---------------------------------------------------------------------------
// Stackel-Killing tensors

// Raises every index but the first: out(a, b.., ) = w_{a c..} g^{cb} ..
template <class T, std::size_t N>
Tensor<T> raise_trailing(const DifferentialForm<T>& w, const Matrix<T, N>& gi) {
  const int n = static_cast<int>(N), r = w.degree();
  std::vector<Valence> slots(static_cast<std::size_t>(r), Valence::Up);
  slots[0] = Valence::Down;
  Tensor<T> cur(n, slots);
  for (std::size_t f = 0; f < cur.size(); ++f) cur[f] = w[f];
  for (int slot = 1; slot < r; ++slot) {
    Tensor<T> next(n, slots);
    for (std::size_t f = 0; f < next.size(); ++f) {
      MultiIndex idx = detail::decode(f, r, n);
      const int target = idx[slot];
      T s{};
      for (int a = 0; a < n; ++a) {
        idx[slot] = a;
        s += gi[target][a] * cur.at(idx);
      }
      next[f] = s;
    }
    cur = std::move(next);
  }
  return cur;
}

// K_{mn} = w_{m l..} s_n^{l..} + s_{m l..} w_n^{l..}
template <class T, std::size_t N>
Tensor<T> stackel_tensor(const DifferentialForm<T>& w, const DifferentialForm<T>& s, const Matrix<T, N>& gi) {
  if (w.degree() != s.degree()) throw Error(ErrorCode::DegreeMismatch, "Killing forms of different degree");
  if (w.degree() < 1) throw Error(ErrorCode::ZeroDegree, "Stackel tensor needs forms of degree >= 1");
  const int n = static_cast<int>(N);
  const Tensor<T> s_up = raise_trailing(s, gi);
  const Tensor<T> w_up = raise_trailing(w, gi);
  const std::size_t stride = detail::ipow(n, w.degree() - 1);
  Tensor<T> K = Tensor<T>::covariant(n, 2);
  for (int m = 0; m < n; ++m)
    for (int nn = m; nn < n; ++nn) {
      T acc{};
      const std::size_t om = static_cast<std::size_t>(m) * stride, on = static_cast<std::size_t>(nn) * stride;
      for (std::size_t t = 0; t < stride; ++t) acc += w[om + t] * s_up[on + t] + s[om + t] * w_up[on + t];
      K(m, nn) = acc;
      K(nn, m) = acc;
    }
  return K;
}

struct StackelTensor {
  Tensor<double> components;
  std::string provenance;
};

// Rank-2 Stackel-Killing field K^(w,s) for two Killing forms of equal degree.
template <MetricProvider M, class F1, class F2>
class StackelField {
 public:
  static constexpr int dim = M::dim;

  StackelField(M metric, F1 w, F2 s, std::string provenance)
      : metric_(std::move(metric)), w_(std::move(w)), s_(std::move(s)), provenance_(std::move(provenance)) {
    if (w_.degree != s_.degree) throw Error(ErrorCode::DegreeMismatch, "Killing forms of different degree");
  }

  const std::string& provenance() const { return provenance_; }

  template <class T>
  Tensor<T> operator()(const Point<T, dim>& x) const {
    return stackel_tensor(w_(x), s_(x), inverse_metric(metric_, x));
  }

 private:
  M metric_;
  F1 w_;
  F2 s_;
  std::string provenance_;
};

template <MetricProvider M, class F1, class F2>
StackelTensor stackel_from_pair(const M& metric, const F1& w, const F2& s, const Point<double, M::dim>& x) {
  const std::string label = std::string("(") + std::string(to_string(w.name)) + "," +
                            std::string(to_string(s.name)) + ")";
  StackelField<M, F1, F2> field(metric, w, s, label);
  return {field(x), label};
}

// max | nabla_(l K_mn) | for a rank-2 symmetric tensor field. Evaluated in
// long double: near the poles the coordinate components of K and Gamma are
// ~1/sin^2 th and cancel down to O(1).
template <MetricProvider M, class KField>
double killing_tensor_residual(const M& metric, const KField& kfield, const Point<double, M::dim>& x) {
  using L = long double;
  constexpr int N = M::dim;
  Point<L, N> xl;
  for (int i = 0; i < N; ++i) xl[i] = x[i];
  const auto Kd = kfield(seed(xl));
  const Tensor<L> G = christoffel(metric, xl);
  Tensor<L> K = Tensor<L>::covariant(N, 2);
  for (std::size_t f = 0; f < K.size(); ++f) K[f] = Kd[f].v;
  Tensor<double> nabla = Tensor<double>::covariant(N, 3);
  for (int l = 0; l < N; ++l)
    for (int m = 0; m < N; ++m)
      for (int n = 0; n < N; ++n) {
        L v = Kd(m, n).d[l];
        for (int r = 0; r < N; ++r) v -= G(r, l, m) * K(r, n) + G(r, l, n) * K(m, r);
        nabla(l, m, n) = static_cast<double>(v);
      }
  return max_abs(symmetrize(nabla));
}

// ---------------------------------------------------------------------------
// Geodesic system

// J^2 = P_th^2 + (P_ph + cos th P_chi)^2 / sin^2 th + P_chi^2, P_chi = P_psi' - P_beta
template <class T>
T total_angular_momentum(const std::array<T, 10>& z) {
  using std::cos;
  using std::sin;
  const T pchi = z[9] - z[8];
  const T st = sin(z[0]);
  const T a = z[6] + cos(z[0]) * pchi;
  return z[5] * z[5] + a * a / (st * st) + pchi * pchi;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<PhaseState> states;
  bool domain_exit = false;
  double exit_time = std::numeric_limits<double>::quiet_NaN();
  OdeStats stats;
};

struct DriftReport {
  std::vector<std::string> labels;
  std::vector<double> max_drift;
};

struct RankResult {
  int rank = 0;
  int rank_loose = 0;  // cutoff x 10
  int rank_tight = 0;  // cutoff / 10
  std::vector<double> singular_values;
  bool degenerate = false;
  std::string note;
};

template <MetricProvider M = YpqMetric>
class GeodesicSystem {
  static_assert(M::dim == 5, "geodesics live on the 5-dimensional chart");

 public:
  static constexpr int kClassical = 5;

  GeodesicSystem(M metric, const YpqParams& prm, double margin = 1e-3)
      : metric_(std::move(metric)), params_(prm), domain_(compute_domain(prm, margin)) {
    if (prm.c == 1) forms_.emplace(prm);
  }
  explicit GeodesicSystem(const YpqParams& prm, double margin = 1e-3)
    requires std::same_as<M, YpqMetric>
      : GeodesicSystem(YpqMetric(prm, margin), prm, margin) {}

  const M& metric() const { return metric_; }
  const YpqParams& params() const { return params_; }
  const ChartDomain& domain() const { return domain_; }
  bool has_quadratics() const { return forms_.has_value(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> l{"H", "P_phi", "P_beta", "P_psi", "J2"};
    if (has_quadratics()) {
      for (const char* q : {"Q_Psi_Psi", "Q_Xi_Xi", "Q_Upsilon_Upsilon", "Q_Xi_Upsilon"}) l.emplace_back(q);
    }
    return l;
  }
  std::size_t size() const { return labels().size(); }

  template <class T>
  T hamiltonian(const std::array<T, 10>& z) const {
    const Point<T, 5> x{z[0], z[1], z[2], z[3], z[4]};
    const auto gi = inverse_metric(metric_, x);
    T h{};
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) h += gi[i][j] * z[5 + i] * z[5 + j];
    return 0.5 * h;
  }

  // H, P_phi, P_beta, P_psi, J2, then K^{mn} p_m p_n for (Psi,Psi),
  // (Xi,Xi), (Upsilon,Upsilon), (Xi,Upsilon).
  template <class T>
  std::vector<T> invariants(const std::array<T, 10>& z) const {
    const Point<T, 5> x{z[0], z[1], z[2], z[3], z[4]};
    const auto gi = inverse_metric(metric_, x);
    std::array<T, 5> v{};
    T h{};
    for (int i = 0; i < 5; ++i) {
      for (int j = 0; j < 5; ++j) v[i] += gi[i][j] * z[5 + j];
      h += v[i] * z[5 + i];
    }
    std::vector<T> out{0.5 * h, z[6], z[8], z[9], total_angular_momentum(z)};
    if (!forms_) return out;
    const auto psi = forms_->psi()(x);
    const auto xi = forms_->xi()(x);
    const auto ups = forms_->upsilon()(x);
    auto quad = [&](const DifferentialForm<T>& a, const DifferentialForm<T>& b) {
      const Tensor<T> K = stackel_tensor(a, b, gi);
      T q{};
      for (int m = 0; m < 5; ++m)
        for (int n = 0; n < 5; ++n) q += K(m, n) * v[m] * v[n];
      return q;
    };
    out.push_back(quad(psi, psi));
    out.push_back(quad(xi, xi));
    out.push_back(quad(ups, ups));
    out.push_back(quad(xi, ups));
    return out;
  }

  // Plain doubles are evaluated in long double; see jacobian().
  std::vector<double> invariants(const PhaseVector& z) const {
    const auto vals = invariants(extend(z));
    return std::vector<double>(vals.begin(), vals.end());
  }
  std::vector<double> invariants(const PhaseState& s) const { return invariants(s.to_array()); }

  ConservedSet conserved_set(const PhaseState& s) const {
    const auto v = invariants(s);
    ConservedSet cs{v[0], v[1], v[2], v[3], v[4], {}};
    const auto names = labels();
    for (std::size_t i = kClassical; i < v.size(); ++i) cs.quadratics.emplace_back(names[i], v[i]);
    return cs;
  }

  // Rows: invariants; columns: d/dz over the 10 phase coordinates.
  std::vector<PhaseVector> jacobian(const PhaseVector& z) const {
    const auto jl = jacobian_ld(z);
    std::vector<PhaseVector> jac(jl.size());
    for (std::size_t i = 0; i < jl.size(); ++i)
      for (int k = 0; k < 10; ++k) jac[i][k] = static_cast<double>(jl[i][k]);
    return jac;
  }

  // {H, Q} for every invariant Q.
  std::vector<double> poisson_with_hamiltonian(const PhaseState& s) const {
    const auto jac = jacobian_ld(s.to_array());
    const auto& dh = jac[0];
    std::vector<double> out;
    for (const auto& dq : jac) {
      long double b = 0.0L;
      for (int i = 0; i < 5; ++i) b += dh[i] * dq[5 + i] - dh[5 + i] * dq[i];
      out.push_back(static_cast<double>(b));
    }
    return out;
  }

  // dx/dt = g^{-1} p, dp/dt = -dH/dx
  PhaseVector rhs(const PhaseVector& z) const {
    using D = Dual<double, 5>;
    const auto xd = seed(Point<double, 5>{z[0], z[1], z[2], z[3], z[4]});
    const auto gi = inverse_metric(metric_, xd);
    PhaseVector out{};
    D h{};
    for (int i = 0; i < 5; ++i) {
      D vi{};
      for (int j = 0; j < 5; ++j) vi += gi[i][j] * z[5 + j];
      out[i] = vi.v;
      h += vi * z[5 + i];
    }
    for (int k = 0; k < 5; ++k) out[5 + k] = -0.5 * h.d[k];
    return out;
  }

  Trajectory integrate(const PhaseState& s0, double t_end, const OdeOptions& opt = {}) const {
    if (!in_interior(domain_, s0.point.theta, s0.point.y)) {
      throw Error(ErrorCode::PointOutOfDomain, "initial state outside the chart");
    }
    Trajectory tr;
    auto f = [this](double, const PhaseVector& z) { return rhs(z); };
    auto observe = [&](double t, const PhaseVector& z) {
      tr.times.push_back(t);
      tr.states.push_back(PhaseState::from_array(z));
      if (t > 0.0 && !within_margin(domain_, z[0], z[2])) {
        tr.domain_exit = true;
        tr.exit_time = t;
        return false;
      }
      return true;
    };
    tr.stats = integrate_dop853<10>(f, 0.0, s0.to_array(), t_end, opt, observe);
    return tr;
  }

  // max_t |Q(t) - Q(0)| / max(1, |Q(0)|) per invariant.
  DriftReport drift(const Trajectory& tr) const {
    DriftReport rep{labels(), {}};
    if (tr.states.empty()) throw Error(ErrorCode::BadInitialState, "empty trajectory");
    const auto q0 = invariants(tr.states.front());
    rep.max_drift.assign(q0.size(), 0.0);
    for (const auto& s : tr.states) {
      const auto q = invariants(s);
      for (std::size_t i = 0; i < q.size(); ++i)
        rep.max_drift[i] = std::max(rep.max_drift[i], std::abs(q[i] - q0[i]) / std::max(1.0, std::abs(q0[i])));
    }
    return rep;
  }

  RankResult rank(const PhaseState& s, const std::vector<int>& subset, double rel_cutoff = 1e-8) const {
    const auto jac = jacobian(s.to_array());
    Eigen::MatrixXd J(static_cast<Eigen::Index>(subset.size()), 10);
    for (std::size_t i = 0; i < subset.size(); ++i) {
      const int row = subset[i];
      if (row < 0 || row >= static_cast<int>(jac.size())) throw Error(ErrorCode::BadConfig, "invariant index");
      for (int k = 0; k < 10; ++k) J(static_cast<Eigen::Index>(i), k) = jac[static_cast<std::size_t>(row)][k];
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    RankResult res;
    const auto& sv = svd.singularValues();
    res.singular_values.assign(sv.data(), sv.data() + sv.size());
    const double top = sv.size() > 0 ? sv(0) : 0.0;
    auto count = [&](double cut) {
      return static_cast<int>(std::count_if(res.singular_values.begin(), res.singular_values.end(),
                                            [&](double v) { return v > cut * top; }));
    };
    res.rank = count(rel_cutoff);
    res.rank_loose = count(rel_cutoff * 10.0);
    res.rank_tight = count(rel_cutoff / 10.0);
    if (top == 0.0) {
      res.degenerate = true;
      res.note = "all invariant gradients vanish";
    } else if (std::any_of(s.momenta.begin(), s.momenta.end(), [](double p) { return std::abs(p) < 1e-12; })) {
      res.degenerate = true;
      res.note = "state has a vanishing momentum component";
    } else if (res.rank_loose != res.rank || res.rank_tight != res.rank) {
      res.degenerate = true;
      res.note = "rank changes when the cutoff is scaled by 10";
    }
    return res;
  }

 private:
  static std::array<long double, 10> extend(const PhaseVector& z) {
    std::array<long double, 10> zl;
    for (int i = 0; i < 10; ++i) zl[i] = z[i];
    return zl;
  }

  // Near the poles the gradients are ~1/sin th and {H, Q} cancels from
  // ~1/sin^2 th down to zero; double precision leaves ~1e-8 there.
  std::vector<std::array<long double, 10>> jacobian_ld(const PhaseVector& z) const {
    const auto vals = invariants(seed(extend(z)));
    std::vector<std::array<long double, 10>> jac(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i)
      for (int k = 0; k < 10; ++k) jac[i][k] = vals[i].d[k];
    return jac;
  }

  M metric_;
  YpqParams params_;
  ChartDomain domain_;
  std::optional<FormCatalog> forms_;
};

// Generic phase state: interior point, momentum direction with |P_i| drawn
// from [0.2, 1] and random signs, then rescaled to unit speed (H = 1/2).
template <MetricProvider M>
PhaseState sample_phase_state(const GeodesicSystem<M>& sys, std::mt19937_64& rng) {
  PhaseState s;
  s.point = sample_point(sys.domain(), rng);
  std::uniform_real_distribution<double> mag(0.2, 1.0);
  std::bernoulli_distribution sign(0.5);
  for (auto& p : s.momenta) p = sign(rng) ? mag(rng) : -mag(rng);
  const double scale = 1.0 / std::sqrt(2.0 * sys.hamiltonian(s.to_array()));
  for (auto& p : s.momenta) p *= scale;
  return s;
}

inline double hamiltonian(const YpqParams& prm, const PhaseState& s) {
  return GeodesicSystem<>(prm).hamiltonian(s.to_array());
}
inline ConservedSet conserved_set(const YpqParams& prm, const PhaseState& s) {
  return GeodesicSystem<>(prm).conserved_set(s);
}
inline PhaseVector geodesic_rhs(const YpqParams& prm, const PhaseState& s) {
  return GeodesicSystem<>(prm).rhs(s.to_array());
}
inline Trajectory integrate_geodesic(const YpqParams& prm, const PhaseState& s0, double t_end, double rtol = 1e-10) {
  OdeOptions opt;
  opt.rtol = rtol;
  return GeodesicSystem<>(prm).integrate(s0, t_end, opt);
}

}  // namespace ypq
