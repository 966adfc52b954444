#pragma once

// Parameters and coordinate domain of the local Y(p,q) chart
// (theta, phi, y, beta, psi') and seeded interior sampling.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "ypq/error.hpp"

namespace ypq {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct YpqParams {
  double a = 0.5;
  int c = 1;

  // c = 0 is the homogeneous T^{1,1} limit; the explicit forms need c = 1.
  bool is_t11_limit() const { return c == 0; }
};

struct ChartDomain {
  double y1 = 0.0;
  double y2 = 0.0;
  double theta_min = 0.0;
  double theta_max = kPi;
  double margin = 1e-3;

  double y_lo() const { return y1 + margin * (y2 - y1); }
  double y_hi() const { return y2 - margin * (y2 - y1); }
  double theta_lo() const { return theta_min + margin; }
  double theta_hi() const { return theta_max - margin; }
};

struct ChartPoint {
  double theta = kPi / 2;
  double phi = 0.0;
  double y = 0.0;
  double beta = 0.0;
  double psi = 0.0;  // the primed fibre angle psi'

  std::array<double, 5> coords() const { return {theta, phi, y, beta, psi}; }
  static ChartPoint from_coords(const std::array<double, 5>& x) {
    return {x[0], x[1], x[2], x[3], x[4]};
  }
};

struct ConePoint {
  double r = 1.0;
  ChartPoint base;

  std::array<double, 6> coords() const {
    return {r, base.theta, base.phi, base.y, base.beta, base.psi};
  }
};

// Numerator of q(y): a - 3y^2 + 2c y^3.
template <class T>
T cubic(const YpqParams& prm, const T& y) {
  return prm.a - 3.0 * y * y + 2.0 * prm.c * y * y * y;
}

template <class T>
T w_of(const YpqParams& prm, const T& y) {
  return 2.0 * (prm.a - y * y) / (1.0 - prm.c * y);
}

template <class T>
T q_of(const YpqParams& prm, const T& y) {
  return cubic(prm, y) / (prm.a - y * y);
}

// p(y) = w(y) q(y) = 2 (a - 3y^2 + 2c y^3) / (1 - c y)
template <class T>
T p_of(const YpqParams& prm, const T& y) {
  return 2.0 * cubic(prm, y) / (1.0 - prm.c * y);
}

// Discriminant of 2c y^3 - 3y^2 + a (for c = 1: 108 a (1 - a)).
inline double cubic_discriminant(const YpqParams& prm) {
  const double A = 2.0 * prm.c, B = -3.0, C = 0.0, D = prm.a;
  return 18 * A * B * C * D - 4 * B * B * B * D + B * B * C * C - 4 * A * C * C * C -
         27 * A * A * D * D;
}

inline YpqParams validate_params(double a, double c) {
  if (c != 0.0 && c != 1.0) {
    throw Error(ErrorCode::UnsupportedC, "c must be 0 or 1");
  }
  YpqParams prm{a, static_cast<int>(c)};
  if (!std::isfinite(a)) throw Error(ErrorCode::ParamOutOfRange, "a is not finite");
  if (prm.c == 1) {
    if (!(a > 0.0 && a < 1.0) || !(cubic_discriminant(prm) > 0.0)) {
      throw Error(ErrorCode::ParamOutOfRange,
                  "c = 1 requires 0 < a < 1 (three distinct real roots)");
    }
  } else if (!(a > 0.0)) {
    throw Error(ErrorCode::ParamOutOfRange, "c = 0 requires a > 0");
  }
  return prm;
}

namespace detail {

// Safeguarded Newton on a sign-changing bracket [lo, hi].
inline double bracketed_newton(const YpqParams& prm, double lo, double hi) {
  auto f = [&](double y) { return cubic(prm, y); };
  auto df = [&](double y) { return -6.0 * y + 6.0 * prm.c * y * y; };
  double flo = f(lo);
  double x = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = d != 0.0 ? x - fx / d : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-17 * std::max(1.0, std::abs(x)) ||
        hi - lo <= 4e-16 * std::max(1.0, std::abs(x))) {
      x = next;
      break;
    }
    x = next;
  }
  // polish
  for (int it = 0; it < 3; ++it) {
    const double d = df(x);
    if (d == 0.0) break;
    const double next = x - f(x) / d;
    if (std::abs(f(next)) < std::abs(f(x))) x = next;
  }
  return x;
}

}  // namespace detail

// All real roots of a - 3y^2 + 2c y^3, ascending.
inline std::vector<double> cubic_roots(const YpqParams& prm) {
  const double reach = 1.0 + std::sqrt(std::abs(prm.a));
  const double lo = std::min(-1.0, -reach), hi = std::max(1.5, reach);
  std::vector<double> grid;
  constexpr int kCells = 50;
  for (int i = 0; i <= kCells; ++i) grid.push_back(lo + (hi - lo) * i / kCells);
  // critical points of the polynomial separate the roots
  grid.push_back(0.0);
  if (prm.c != 0) grid.push_back(1.0 / prm.c);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double f0 = cubic(prm, grid[i]), f1 = cubic(prm, grid[i + 1]);
    if (f0 == 0.0) {
      roots.push_back(grid[i]);
    } else if ((f0 < 0.0) != (f1 < 0.0) && f1 != 0.0) {
      roots.push_back(detail::bracketed_newton(prm, grid[i], grid[i + 1]));
    }
  }
  if (cubic(prm, grid.back()) == 0.0) roots.push_back(grid.back());
  return roots;
}

inline ChartDomain compute_domain(const YpqParams& prm, double margin = 1e-3) {
  const auto roots = cubic_roots(prm);
  const std::size_t expected = prm.c == 1 ? 3 : 2;
  if (roots.size() != expected) {
    throw Error(ErrorCode::RootFindingFailed, "unexpected number of real roots");
  }
  for (double r : roots) {
    if (!(std::abs(cubic(prm, r)) < 1e-12)) {
      throw Error(ErrorCode::RootFindingFailed, "root polishing did not converge");
    }
  }
  ChartDomain dom;
  dom.y1 = roots[0];
  dom.y2 = roots[1];
  dom.margin = margin;
  if (!(dom.y1 < 0.0 && 0.0 < dom.y2)) {
    throw Error(ErrorCode::RootFindingFailed, "roots do not straddle zero");
  }
  return dom;
}

inline bool in_interior(const ChartDomain& dom, double theta, double y) {
  return theta > dom.theta_min && theta < dom.theta_max && y > dom.y1 && y < dom.y2;
}

// True when the point lies inside the margin-shrunk sampling box.
inline bool within_margin(const ChartDomain& dom, double theta, double y) {
  return theta > dom.theta_lo() && theta < dom.theta_hi() && y > dom.y_lo() && y < dom.y_hi();
}

inline ChartPoint sample_point(const ChartDomain& dom, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> th(dom.theta_lo(), dom.theta_hi());
  std::uniform_real_distribution<double> yy(dom.y_lo(), dom.y_hi());
  std::uniform_real_distribution<double> ang(0.0, kTwoPi);
  ChartPoint pt;
  pt.theta = th(rng);
  pt.phi = ang(rng);
  pt.y = yy(rng);
  pt.beta = ang(rng);
  pt.psi = ang(rng);
  return pt;
}

inline ChartPoint sample_point(const ChartDomain& dom, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_point(dom, rng);
}

}  // namespace ypq
