#pragma once

// Adaptive explicit Runge-Kutta integration with the Dormand-Prince 8(5,3)
// embedded pair (DOP853, Hairer-Norsett-Wanner). Coefficients below are the
// standard published tableau.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <utility>

#include "ypq/error.hpp"

namespace ypq {

struct OdeOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-3;
  long max_steps = 5'000'000;
};

enum class OdeStatus { Completed, Stopped };

struct OdeStats {
  OdeStatus status = OdeStatus::Completed;
  double t = 0.0;
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

namespace dop853 {

inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

}  // namespace dop853

// Integrates y' = rhs(t, y) from t0 to t_end (t_end >= t0). `observe(t, y)`
// is called on the initial state and after every accepted step; returning
// false stops the integration. `rhs` may throw ypq::Error for trial states
// outside its domain, which rejects the step and halves it.
template <std::size_t N, class Rhs, class Observer>
OdeStats integrate_dop853(Rhs&& rhs, double t0, std::array<double, N> y, double t_end, const OdeOptions& opt,
                          Observer&& observe) {
  using namespace dop853;
  using Vec = std::array<double, N>;
  OdeStats stats;
  stats.t = t0;
  if (!observe(t0, y)) {
    stats.status = OdeStatus::Stopped;
    return stats;
  }
  if (t_end <= t0) return stats;

  auto axpy = [](const Vec& base, double h, std::initializer_list<std::pair<double, const Vec*>> terms) {
    Vec out = base;
    for (std::size_t i = 0; i < N; ++i) {
      double s = 0.0;
      for (const auto& [c, k] : terms) s += c * (*k)[i];
      out[i] += h * s;
    }
    return out;
  };

  double t = t0;
  double h = std::min(opt.initial_step, t_end - t0);
  double facold = 1e-4;
  constexpr double safe = 0.9, fac1 = 0.333, fac2 = 6.0, beta = 0.0;
  constexpr double expo1 = 1.0 / 8.0 - beta * 0.2;
  constexpr double uround = 2.3e-16;

  Vec k1 = rhs(t, y);
  ++stats.evaluations;
  bool last_rejected = false;

  while (t < t_end) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw Error(ErrorCode::StepFailure, "maximum number of steps exceeded");
    }
    if (std::abs(h) <= 10.0 * uround * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::StepFailure, "step size underflow");
    }
    bool final_step = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      final_step = true;
    }

    Vec ynew, k4, k5;
    double err = 0.0;
    bool domain_fail = false;
    try {
      const Vec k2 = rhs(t + c2 * h, axpy(y, h, {{a21, &k1}}));
      const Vec k3 = rhs(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
      k4 = rhs(t + c4 * h, axpy(y, h, {{a41, &k1}, {a43, &k3}}));
      k5 = rhs(t + c5 * h, axpy(y, h, {{a51, &k1}, {a53, &k3}, {a54, &k4}}));
      const Vec k6 = rhs(t + c6 * h, axpy(y, h, {{a61, &k1}, {a64, &k4}, {a65, &k5}}));
      const Vec k7 = rhs(t + c7 * h, axpy(y, h, {{a71, &k1}, {a74, &k4}, {a75, &k5}, {a76, &k6}}));
      const Vec k8 = rhs(t + c8 * h, axpy(y, h, {{a81, &k1}, {a84, &k4}, {a85, &k5}, {a86, &k6}, {a87, &k7}}));
      const Vec k9 = rhs(t + c9 * h,
                         axpy(y, h, {{a91, &k1}, {a94, &k4}, {a95, &k5}, {a96, &k6}, {a97, &k7}, {a98, &k8}}));
      const Vec k10 = rhs(t + c10 * h, axpy(y, h,
                                            {{a101, &k1},
                                             {a104, &k4},
                                             {a105, &k5},
                                             {a106, &k6},
                                             {a107, &k7},
                                             {a108, &k8},
                                             {a109, &k9}}));
      const Vec k11 = rhs(t + c11 * h, axpy(y, h,
                                            {{a111, &k1},
                                             {a114, &k4},
                                             {a115, &k5},
                                             {a116, &k6},
                                             {a117, &k7},
                                             {a118, &k8},
                                             {a119, &k9},
                                             {a1110, &k10}}));
      const Vec k12 = rhs(t + h, axpy(y, h,
                                      {{a121, &k1},
                                       {a124, &k4},
                                       {a125, &k5},
                                       {a126, &k6},
                                       {a127, &k7},
                                       {a128, &k8},
                                       {a129, &k9},
                                       {a1210, &k10},
                                       {a1211, &k11}}));
      stats.evaluations += 11;

      double err5 = 0.0, err3 = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double incr = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] + b10 * k10[i] +
                            b11 * k11[i] + b12 * k12[i];
        ynew[i] = y[i] + h * incr;
        const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
        const double e3 = incr - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
        const double e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] + er10 * k10[i] +
                          er11 * k11[i] + er12 * k12[i];
        err3 += (e3 / sk) * (e3 / sk);
        err5 += (e5 / sk) * (e5 / sk);
      }
      double deno = err5 + 0.01 * err3;
      if (deno <= 0.0) deno = 1.0;
      err = std::abs(h) * err5 / std::sqrt(deno * static_cast<double>(N));
    } catch (const Error&) {
      domain_fail = true;
    }

    if (domain_fail || !std::isfinite(err)) {
      ++stats.rejected;
      h *= 0.5;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      ++stats.accepted;
      Vec k1new;
      try {
        k1new = rhs(t + h, ynew);
      } catch (const Error&) {
        ++stats.rejected;
        h *= 0.5;
        last_rejected = true;
        continue;
      }
      ++stats.evaluations;
      k1 = k1new;
      y = ynew;
      t = final_step ? t_end : t + h;
      stats.t = t;
      if (last_rejected) hnew = std::min(std::abs(hnew), std::abs(h));
      last_rejected = false;
      if (!observe(t, y)) {
        stats.status = OdeStatus::Stopped;
        return stats;
      }
      h = hnew;
    } else {
      hnew = h / std::min(1.0 / fac1, fac11 / safe);
      last_rejected = true;
      ++stats.rejected;
      h = hnew;
    }
  }
  return stats;
}

}  // namespace ypq
