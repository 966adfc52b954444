#pragma once

// Verification sweep, geodesic drift tables and rank summaries behind the
// command-line tool. Everything here is deterministic in (config, seed):
// sample points are drawn up front and workers write into pre-assigned slots.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "ypq/chart.hpp"
#include "ypq/forms.hpp"
#include "ypq/geometry.hpp"
#include "ypq/integrability.hpp"

namespace ypq {

struct RunConfig {
  double a = 0.5;
  int c = 1;
  std::uint64_t seed = 20240501;
  int n_points = 100;
  double tol = 1e-8;
  double t_end = 100.0;
  double rtol = 1e-10;
  double margin = 1e-3;
  std::string out;                  // empty: stdout
  std::vector<std::string> checks;  // empty: all
  bool timing = false;              // wall time makes reports non-reproducible, so opt-in
  int threads = 0;                  // 0: hardware concurrency
};

enum class CheckStatus { Pass, Fail, Skipped, Error };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
    case CheckStatus::Error: return "error";
  }
  return "?";
}

struct CheckRecord {
  std::string name;
  std::string group;
  std::string identity;
  int points = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Skipped;
  std::string message;
};

struct VerifyReport {
  RunConfig config;
  std::vector<CheckRecord> checks;
  std::optional<double> wall_seconds;

  bool all_passed() const {
    return std::none_of(checks.begin(), checks.end(), [](const CheckRecord& r) {
      return r.status == CheckStatus::Fail || r.status == CheckStatus::Error;
    });
  }
};

inline void validate_config(const RunConfig& cfg) {
  validate_params(cfg.a, cfg.c);
  if (cfg.n_points < 1) throw Error(ErrorCode::BadConfig, "points must be >= 1");
  if (!(cfg.tol > 0.0)) throw Error(ErrorCode::BadConfig, "tol must be positive");
  if (!(cfg.rtol > 0.0)) throw Error(ErrorCode::BadConfig, "rtol must be positive");
  if (!(cfg.t_end >= 0.0)) throw Error(ErrorCode::BadConfig, "t-end must be non-negative");
  if (!(cfg.margin > 0.0 && cfg.margin < 0.25)) throw Error(ErrorCode::BadConfig, "margin must lie in (0, 0.25)");
}

// Runs fn(i) for i in [0, n) across threads; callers write into slot i only.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  int nt = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  nt = std::min(nt, n);
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nt));
  for (int w = 0; w < nt; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += nt) fn(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace detail {

struct CheckSpec {
  std::string name;
  std::string group;
  std::string identity;
  double tolerance;
  bool needs_forms;
  std::function<double(int)> residual;  // residual at sample i
};

inline bool selected(const RunConfig& cfg, const CheckSpec& s) {
  if (cfg.checks.empty()) return true;
  return std::any_of(cfg.checks.begin(), cfg.checks.end(),
                     [&](const std::string& c) { return c == s.name || c == s.group; });
}

}  // namespace detail

inline const std::vector<std::string>& check_groups() {
  static const std::vector<std::string> g{"einstein", "compatibility", "killing", "parallel",
                                          "structure", "stackel", "poisson"};
  return g;
}

inline VerifyReport run_verify(const RunConfig& cfg) {
  validate_config(cfg);
  const auto start = std::chrono::steady_clock::now();
  const YpqParams prm{cfg.a, cfg.c};
  const YpqMetric g(prm, cfg.margin);
  const ConeMetric gc(g);
  const ChartDomain& dom = g.domain();
  const bool forms_ok = prm.c == 1;

  // Sample points: base chart, cone radius in (0.5, 2), phase states.
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> rad(0.5, 2.0);
  std::vector<Point<double, 5>> base;
  std::vector<Point<double, 6>> cone;
  for (int i = 0; i < cfg.n_points; ++i) {
    const ChartPoint pt = sample_point(dom, rng);
    base.push_back(pt.coords());
    cone.push_back(ConePoint{rad(rng), pt}.coords());
  }
  std::optional<GeodesicSystem<>> sys;
  std::vector<PhaseState> phase;
  if (forms_ok) {
    sys.emplace(prm, cfg.margin);
    std::mt19937_64 prng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int i = 0; i < cfg.n_points; ++i) phase.push_back(sample_phase_state(*sys, prng));
  }

  std::vector<detail::CheckSpec> specs;
  const double tol = cfg.tol;
  auto add = [&](std::string name, std::string group, std::string identity, double t, bool nf,
                 std::function<double(int)> f) {
    specs.push_back({std::move(name), std::move(group), std::move(identity), t, nf, std::move(f)});
  };

  add("einstein_base", "einstein", "max|Ric - 4 g|", tol, false,
      [&](int i) { return einstein_residual(g, base[i]); });
  add("einstein_cone", "einstein", "max|Ric(cone)|", tol, false,
      [&](int i) { return einstein_residual(gc, cone[i]); });
  add("metric_compatibility", "compatibility", "max|nabla g|", tol, false,
      [&](int i) { return metric_compatibility_residual(g, base[i]); });

  std::optional<FormCatalog> cat;
  if (forms_ok) cat.emplace(prm);
  // Deferred construction: lambdas only run when forms_ok.
  auto killing = [&](const std::string& label, auto field_of, bool coclosed, std::optional<double> sky_c) {
    add("cky_" + label, "killing", "conformal Killing-Yano equation", tol, true,
        [&, field_of](int i) { return cky_residual(g, field_of(), base[i]); });
    if (coclosed) {
      add("coclosed_" + label, "killing", "max|d* w|", 1e-9, true,
          [&, field_of](int i) { return coclosed_residual(g, field_of(), base[i]); });
    } else {
      add("closed_" + label, "killing", "max|d w|", 1e-9, true,
          [&, field_of](int i) { return closed_residual(field_of(), base[i]); });
    }
    if (sky_c) {
      const double cc = *sky_c;
      std::ostringstream id;
      id << "nabla_X dw = " << cc << " X^w";
      add("sky_" + label, "killing", id.str(), tol, true,
          [&, field_of, cc](int i) { return sky_residual(g, field_of(), cc, base[i]); });
    }
  };
  killing("Psi", [&] { return cat->psi(); }, true, -4.0);
  killing("Phi1", [&] { return cat->phi(1); }, false, std::nullopt);
  killing("Phi2", [&] { return cat->phi(2); }, false, std::nullopt);
  killing("Xi", [&] { return cat->xi(); }, true, -3.0);
  killing("Upsilon", [&] { return cat->upsilon(); }, true, -3.0);

  add("parallel_Omega_cone", "parallel", "max|nabla Omega|", tol, true,
      [&](int i) { return parallel_residual(gc, cat->omega_cone(), cone[i]); });
  add("parallel_Re_dV", "parallel", "max|nabla Re dV|", tol, true,
      [&](int i) { return parallel_residual(gc, cat->re_dv_cone(), cone[i]); });
  add("parallel_Im_dV", "parallel", "max|nabla Im dV|", tol, true,
      [&](int i) { return parallel_residual(gc, cat->im_dv_cone(), cone[i]); });
  add("parallel_lift_Psi", "parallel", "max|nabla Psi^C|", tol, true,
      [&](int i) { return parallel_residual(gc, cone_lift(cat->psi()), cone[i]); });
  add("parallel_lift_Xi", "parallel", "max|nabla Xi^C|", tol, true,
      [&](int i) { return parallel_residual(gc, cone_lift(cat->xi()), cone[i]); });
  add("parallel_lift_Upsilon", "parallel", "max|nabla Upsilon^C|", tol, true,
      [&](int i) { return parallel_residual(gc, cone_lift(cat->upsilon()), cone[i]); });
  add("lift_eta_is_Omega_cone", "parallel", "eta^C = Omega_cone", 1e-12, true,
      [&](int i) { return max_abs_diff(cone_lift_at(cat->eta(), cone[i]), eval_kahler_cone(prm, cone[i])); });

  add("d_sigma_is_2_Omega_EK", "structure", "d sigma = 2 Omega_EK", 1e-10, true, [&](int i) {
    Point<double, 6> unit = cone[i];
    unit[0] = 1.0;
    const auto omega_ek = restrict_to(eval_kahler_cone(prm, unit), 5, 1);
    return max_abs_diff(exterior_derivative(cat->sigma(), base[i]), 2.0 * omega_ek);
  });
  add("psi_is_eta_wedge_d_eta", "structure", "Psi = eta ^ d eta", 1e-10, true, [&](int i) {
    return max_abs_diff(cat->psi()(base[i]), wedge(cat->eta()(base[i]), exterior_derivative(cat->eta(), base[i])));
  });
  add("omega_cube_is_volume", "structure", "Omega^3 / 3! = vol(cone)", 1e-10, true, [&](int i) {
    const auto om = eval_kahler_cone(prm, cone[i]);
    return max_abs_diff((1.0 / 6.0) * wedge(wedge(om, om), om), volume_form(gc, cone[i]));
  });
  // dV ^ conj(dV) = -2i Re dV ^ Im dV; the ratio to vol must not depend on the point.
  std::vector<double> ratio(static_cast<std::size_t>(cfg.n_points), 0.0);
  add("dV_wedge_conj_dV_proportional", "structure", "dV ^ conj(dV) = k vol(cone)", 1e-9, true, [&](int i) {
    const auto v = eval_complex_volume(prm, cone[i]);
    const auto top = wedge(v.re, v.im);
    const double vol = volume_form(gc, cone[i])(0, 1, 2, 3, 4, 5);
    ratio[static_cast<std::size_t>(i)] = -2.0 * top(0, 1, 2, 3, 4, 5) / vol;
    return 0.0;  // spread is evaluated after the sweep
  });

  auto stackel = [&](const std::string& label, auto w_of, auto s_of) {
    add("stackel_" + label, "stackel", "max|nabla_(l K_mn)|", tol, true, [&, w_of, s_of](int i) {
      StackelField kf(g, w_of(), s_of(), label);
      return killing_tensor_residual(g, kf, base[i]);
    });
  };
  stackel("Psi_Psi", [&] { return cat->psi(); }, [&] { return cat->psi(); });
  stackel("Xi_Xi", [&] { return cat->xi(); }, [&] { return cat->xi(); });
  stackel("Upsilon_Upsilon", [&] { return cat->upsilon(); }, [&] { return cat->upsilon(); });
  stackel("Xi_Upsilon", [&] { return cat->xi(); }, [&] { return cat->upsilon(); });

  add("poisson_H_Q", "poisson", "max|{H, Q}| over the conserved set", 1e-9, true, [&](int i) {
    const auto pb = sys->poisson_with_hamiltonian(phase[static_cast<std::size_t>(i)]);
    double m = 0.0;
    for (double b : pb) m = std::max(m, std::abs(b));
    return m;
  });

  for (const auto& c : cfg.checks) {
    const bool known = std::any_of(specs.begin(), specs.end(),
                                   [&](const detail::CheckSpec& s) { return s.name == c || s.group == c; });
    if (!known) throw Error(ErrorCode::BadConfig, "unknown check: " + c);
  }

  VerifyReport rep;
  rep.config = cfg;
  for (const auto& s : specs) {
    if (!detail::selected(cfg, s)) continue;
    CheckRecord rec{s.name, s.group, s.identity, 0, 0.0, s.tolerance, CheckStatus::Skipped, {}};
    if (s.needs_forms && !forms_ok) {
      rec.message = "requires c = 1";
      rep.checks.push_back(rec);
      continue;
    }
    std::vector<double> res(static_cast<std::size_t>(cfg.n_points), 0.0);
    try {
      parallel_for(cfg.n_points, cfg.threads, [&](int i) { res[static_cast<std::size_t>(i)] = s.residual(i); });
      rec.points = cfg.n_points;
      rec.max_residual = *std::max_element(res.begin(), res.end());
      if (s.name == "dV_wedge_conj_dV_proportional") {
        const auto [lo, hi] = std::minmax_element(ratio.begin(), ratio.end());
        double mean = 0.0;
        for (double r : ratio) mean += r;
        mean /= static_cast<double>(ratio.size());
        rec.max_residual = (*hi - *lo) / std::abs(mean);
        std::ostringstream m;
        m.precision(17);
        m << "k = " << mean;
        rec.message = m.str();
      }
      rec.status = std::isfinite(rec.max_residual) && rec.max_residual < rec.tolerance ? CheckStatus::Pass
                                                                                        : CheckStatus::Fail;
    } catch (const std::exception& e) {
      rec.status = CheckStatus::Error;
      rec.message = e.what();
    }
    rep.checks.push_back(rec);
  }
  if (cfg.timing) rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

inline nlohmann::ordered_json params_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["a"] = cfg.a;
  j["c"] = cfg.c;
  j["margin"] = cfg.margin;
  return j;
}

inline nlohmann::ordered_json to_json(const VerifyReport& rep) {
  nlohmann::ordered_json j;
  j["params"] = params_json(rep.config);
  j["seed"] = rep.config.seed;
  j["points"] = rep.config.n_points;
  j["tol"] = rep.config.tol;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rep.checks) {
    nlohmann::ordered_json c;
    c["name"] = r.name;
    c["group"] = r.group;
    c["identity"] = r.identity;
    c["points"] = r.points;
    c["max_residual"] = r.max_residual;
    c["tolerance"] = r.tolerance;
    c["status"] = std::string(to_string(r.status));
    if (!r.message.empty()) c["message"] = r.message;
    arr.push_back(std::move(c));
  }
  j["checks"] = std::move(arr);
  j["passed"] = rep.all_passed();
  if (rep.wall_seconds) j["wall_seconds"] = *rep.wall_seconds;
  return j;
}

// ---------------------------------------------------------------------------
// Geodesic drift table

struct DriftTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  bool domain_exit = false;
  double exit_time = 0.0;
  std::size_t steps = 0;

  double max_drift() const {
    double m = 0.0;
    for (const auto& r : rows)
      for (std::size_t k = 1; k < r.size(); ++k) m = std::max(m, r[k]);
    return m;
  }
};

inline PhaseState default_phase_state(const GeodesicSystem<>& sys, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  return sample_phase_state(sys, rng);
}

inline DriftTable run_geodesic(const RunConfig& cfg, const std::optional<PhaseState>& state) {
  validate_config(cfg);
  const YpqParams prm{cfg.a, cfg.c};
  const GeodesicSystem<> sys(prm, cfg.margin);
  const PhaseState s0 = state ? *state : default_phase_state(sys, cfg.seed);
  if (!in_interior(sys.domain(), s0.point.theta, s0.point.y)) {
    throw Error(ErrorCode::BadInitialState, "initial state outside the chart");
  }
  OdeOptions opt;
  opt.rtol = cfg.rtol;
  const Trajectory tr = sys.integrate(s0, cfg.t_end, opt);
  DriftTable tab;
  tab.columns = {"t"};
  for (const auto& l : sys.labels()) tab.columns.push_back(l);
  const auto q0 = sys.invariants(s0);
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    std::vector<double> row{tr.times[k]};
    const auto q = sys.invariants(tr.states[k]);
    for (std::size_t i = 0; i < q.size(); ++i) row.push_back(std::abs(q[i] - q0[i]) / std::max(1.0, std::abs(q0[i])));
    tab.rows.push_back(std::move(row));
  }
  tab.domain_exit = tr.domain_exit;
  tab.exit_time = tr.exit_time;
  tab.steps = tr.stats.accepted;
  return tab;
}

inline void write_csv(std::ostream& os, const DriftTable& tab) {
  for (std::size_t i = 0; i < tab.columns.size(); ++i) os << (i ? "," : "") << tab.columns[i];
  os << '\n';
  char buf[64];
  for (const auto& r : tab.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", r[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
  if (tab.domain_exit) {
    std::snprintf(buf, sizeof buf, "%.17g", tab.exit_time);
    os << "# domain_exit,t=" << buf << '\n';
  }
}

// ---------------------------------------------------------------------------
// Rank summary

struct RankSample {
  PhaseState state;
  RankResult classical;
  RankResult full;
};

struct RankSummary {
  RunConfig config;
  std::vector<std::string> labels;
  std::vector<RankSample> samples;
  int modal_classical = 0;
  int modal_full = 0;
  int degenerate = 0;
  int generic = 0;
  bool classical_all_five = false;
};

inline int modal(const std::vector<int>& v) {
  std::map<int, int> count;
  for (int x : v) ++count[x];
  int best = 0, freq = -1;
  for (const auto& [k, n] : count)
    if (n > freq || (n == freq && k > best)) best = k, freq = n;
  return best;
}

inline RankSummary run_rank(const RunConfig& cfg, const std::optional<PhaseState>& state) {
  validate_config(cfg);
  const YpqParams prm{cfg.a, cfg.c};
  const GeodesicSystem<> sys(prm, cfg.margin);
  RankSummary sum;
  sum.config = cfg;
  sum.labels = sys.labels();
  std::vector<PhaseState> states;
  if (state) {
    states.push_back(*state);
  } else {
    std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    for (int i = 0; i < cfg.n_points; ++i) states.push_back(sample_phase_state(sys, rng));
  }
  std::vector<int> classical{0, 1, 2, 3, 4};
  std::vector<int> full(sys.size());
  for (std::size_t i = 0; i < full.size(); ++i) full[i] = static_cast<int>(i);
  sum.samples.resize(states.size());
  parallel_for(static_cast<int>(states.size()), cfg.threads, [&](int i) {
    const auto& s = states[static_cast<std::size_t>(i)];
    sum.samples[static_cast<std::size_t>(i)] = {s, sys.rank(s, classical), sys.rank(s, full)};
  });
  std::vector<int> rc, rf;
  bool all5 = true;
  for (const auto& s : sum.samples) {
    if (s.classical.degenerate || s.full.degenerate) {
      ++sum.degenerate;
      continue;
    }
    rc.push_back(s.classical.rank);
    rf.push_back(s.full.rank);
    all5 = all5 && s.classical.rank == 5;
  }
  sum.generic = static_cast<int>(rc.size());
  sum.modal_classical = rc.empty() ? 0 : modal(rc);
  sum.modal_full = rf.empty() ? 0 : modal(rf);
  sum.classical_all_five = !rc.empty() && all5;
  return sum;
}

inline nlohmann::ordered_json to_json(const RankSummary& sum) {
  auto rank_json = [](const RankResult& r) {
    nlohmann::ordered_json j;
    j["rank"] = r.rank;
    j["rank_cutoff_x10"] = r.rank_loose;
    j["rank_cutoff_div10"] = r.rank_tight;
    j["singular_values"] = r.singular_values;
    j["degenerate"] = r.degenerate;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
  };
  nlohmann::ordered_json j;
  j["params"] = params_json(sum.config);
  j["seed"] = sum.config.seed;
  j["points"] = static_cast<int>(sum.samples.size());
  j["cutoff"] = "1e-8 x largest singular value";
  j["invariants"] = sum.labels;
  nlohmann::ordered_json verdict;
  verdict["generic_states"] = sum.generic;
  verdict["degenerate_states"] = sum.degenerate;
  verdict["classical_modal_rank"] = sum.modal_classical;
  verdict["classical_rank_5_everywhere"] = sum.classical_all_five;
  verdict["full_modal_rank"] = sum.modal_full;
  verdict["quadratics_increase_rank"] = sum.modal_full > sum.modal_classical;
  verdict["superintegrable"] = sum.modal_full >= 6;
  j["verdict"] = std::move(verdict);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& s : sum.samples) {
    nlohmann::ordered_json e;
    e["state"] = s.state.to_array();
    e["classical"] = rank_json(s.classical);
    e["full"] = rank_json(s.full);
    arr.push_back(std::move(e));
  }
  j["samples"] = std::move(arr);
  return j;
}

}  // namespace ypq
