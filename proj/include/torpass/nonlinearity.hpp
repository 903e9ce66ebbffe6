#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "torpass/errors.hpp"
#include "torpass/grid.hpp"
#include "torpass/interp.hpp"
#include "torpass/reduce.hpp"

namespace torpass {

/// Bundled nonlinear data for -Delta_g u + V u = f(x,u) + g(x,u^2) u.
///
/// F is the u-primitive of f with F(x,0) = 0. For the built-in singular
/// families G is normalized as G(x,s) = -int_s^inf g(x,t) dt, the unique
/// primitive of g that is nonpositive and increasing; this reproduces the
/// Lichnerowicz energy term for the constraint-equation case. Evaluators are
/// pure functions of (node index, value) and safe to call concurrently.
struct NonlinearFamily {
  std::string name;
  int dim = 0;      // N, fixes the critical exponent
  double mu = 0.0;  // superquadraticity exponent (> 2)
  double growth_exponent = 0.0;  // declared growth of f, usually 2* - 1

  std::function<double(std::size_t, double)> f;  // f(x, u)
  std::function<double(std::size_t, double)> F;  // primitive in u
  std::function<double(std::size_t, double)> g;  // g(x, s), s > 0
  std::function<double(std::size_t, double)> G;  // primitive in s, G <= 0

  bool singular = false;  // true when g blows up as s -> 0+

  /// Closed-form description f = B(x) |u|^{q-2} u when available (used for
  /// exact C_delta fitting).
  struct PowerTerm {
    double q = 0.0;
    std::vector<double> B;
  };
  std::optional<PowerTerm> f_power;
};

namespace detail {

inline std::vector<double> coefficient_values(const ManifoldGrid& grid,
                                              const Field& c,
                                              const char* op) {
  require_on_grid(grid, c, op);
  return c.values;
}

inline double odd_power(double u, double q) {
  // |u|^{q-2} u, continuous at 0 for q > 2.
  if (u == 0.0) return 0.0;
  return std::pow(std::abs(u), q - 2.0) * u;
}

}  // namespace detail

/// Constraint-equation nonlinearity: f = B(x)|u|^{2*-2}u with the singular
/// term g(x,s) = A(x) s^{-(2*+2)/2}, G(x,s) = -(2A/2*) s^{-2*/2}. mu = 2*.
inline NonlinearFamily make_hebey_family(const ManifoldGrid& grid,
                                         const Field& A, const Field& B,
                                         int N) {
  if (N < 3) throw std::invalid_argument("make_hebey_family: need N >= 3");
  auto a = detail::coefficient_values(grid, A, "make_hebey_family");
  auto b = detail::coefficient_values(grid, B, "make_hebey_family");
  for (double v : a)
    if (v < 0.0)
      throw std::invalid_argument(
          "make_hebey_family: A must be >= 0 (otherwise G1/G2 fail)");
  const double p_crit = critical_exponent(N);

  NonlinearFamily fam;
  fam.name = "hebey";
  fam.dim = N;
  fam.mu = p_crit;
  fam.growth_exponent = p_crit - 1.0;
  bool any_a = false;
  for (double v : a) any_a = any_a || v > 0.0;
  fam.singular = any_a;
  fam.f = [b, p_crit](std::size_t i, double u) {
    return b[i] * detail::odd_power(u, p_crit);
  };
  fam.F = [b, p_crit](std::size_t i, double u) {
    return b[i] * std::pow(std::abs(u), p_crit) / p_crit;
  };
  fam.g = [a, p_crit](std::size_t i, double s) {
    return a[i] * std::pow(s, -(p_crit + 2.0) / 2.0);
  };
  fam.G = [a, p_crit](std::size_t i, double s) {
    return -(2.0 * a[i] / p_crit) * std::pow(s, -p_crit / 2.0);
  };
  fam.f_power = NonlinearFamily::PowerTerm{p_crit, b};
  return fam;
}

/// Electromagnetic extension: adds the second singular term
/// C(x) s^{-(p+2)/2} with primitive -(2C/p) s^{-p/2}, 2 < p < 2*.
inline NonlinearFamily make_em_family(const ManifoldGrid& grid, const Field& A,
                                      const Field& B, const Field& C, double p,
                                      int N) {
  const double p_crit = critical_exponent(N);
  if (!(p > 2.0 && p < p_crit))
    throw std::domain_error("make_em_family: need 2 < p < 2N/(N-2)");
  auto c = detail::coefficient_values(grid, C, "make_em_family");
  for (double v : c)
    if (v < 0.0) throw std::invalid_argument("make_em_family: C must be >= 0");

  NonlinearFamily fam = make_hebey_family(grid, A, B, N);
  fam.name = "em";
  bool any_c = false;
  for (double v : c) any_c = any_c || v > 0.0;
  fam.singular = fam.singular || any_c;
  auto g0 = fam.g;
  auto G0 = fam.G;
  fam.g = [g0, c, p](std::size_t i, double s) {
    return g0(i, s) + c[i] * std::pow(s, -(p + 2.0) / 2.0);
  };
  fam.G = [G0, c, p](std::size_t i, double s) {
    return G0(i, s) - (2.0 * c[i] / p) * std::pow(s, -p / 2.0);
  };
  return fam;
}

/// Subcritical testbed: f = B(x)|u|^{q-2}u with 2 < q <= 2*, and
/// g(x,s) = A(x) s^{-r} with r > 1 so that the tail primitive converges:
/// G = -A s^{1-r}/(r-1). mu = q.
inline NonlinearFamily make_power_family(const ManifoldGrid& grid,
                                         const Field& B, double q,
                                         const Field& A, double r, int N) {
  const double p_crit = critical_exponent(N);
  if (!(q > 2.0 && q <= p_crit))
    throw std::domain_error("make_power_family: need 2 < q <= 2N/(N-2)");
  if (!(r > 1.0))
    throw std::domain_error(
        "make_power_family: need r > 1 (tail integral of g must converge)");
  auto a = detail::coefficient_values(grid, A, "make_power_family");
  auto b = detail::coefficient_values(grid, B, "make_power_family");
  for (double v : a)
    if (v < 0.0) throw std::invalid_argument("make_power_family: A must be >= 0");
  for (double v : b)
    if (v < 0.0) throw std::invalid_argument("make_power_family: B must be >= 0");

  NonlinearFamily fam;
  fam.name = "power";
  fam.dim = N;
  fam.mu = q;
  fam.growth_exponent = p_crit - 1.0;
  bool any_a = false;
  for (double v : a) any_a = any_a || v > 0.0;
  fam.singular = any_a;
  fam.f = [b, q](std::size_t i, double u) {
    return b[i] * detail::odd_power(u, q);
  };
  fam.F = [b, q](std::size_t i, double u) {
    return b[i] * std::pow(std::abs(u), q) / q;
  };
  fam.g = [a, r](std::size_t i, double s) { return a[i] * std::pow(s, -r); };
  fam.G = [a, r](std::size_t i, double s) {
    return -a[i] * std::pow(s, 1.0 - r) / (r - 1.0);
  };
  fam.f_power = NonlinearFamily::PowerTerm{q, b};
  return fam;
}

/// Table-driven nonlinearity. The f table samples (u, f) on u >= 0 starting
/// at (0, 0) and is extended oddly; beyond the last sample f is held
/// constant. The g table samples (s, g) on s > 0, must end with g = 0, is
/// clamped below its first abscissa, and G(s) = -int_s^{s_max} g dt.
inline NonlinearFamily make_table_family(int N, double mu,
                                         std::vector<double> fu,
                                         std::vector<double> fv,
                                         std::vector<double> gs,
                                         std::vector<double> gv) {
  if (fu.empty() || fu.front() != 0.0 || fv.front() != 0.0)
    throw ConfigError("make_table_family: f table must start at (0, 0)");
  if (!gs.empty() && gv.back() != 0.0)
    throw ConfigError("make_table_family: g table must end with g = 0");
  if (!(mu > 2.0)) throw ConfigError("make_table_family: need mu > 2");

  MonotoneCubic f_interp(std::move(fu), std::move(fv));
  std::optional<MonotoneCubic> g_interp;
  if (!gs.empty()) g_interp.emplace(std::move(gs), std::move(gv));

  NonlinearFamily fam;
  fam.name = "custom-table";
  fam.dim = N;
  fam.mu = mu;
  fam.growth_exponent = critical_exponent(N) - 1.0;
  fam.singular = false;
  fam.f = [f_interp](std::size_t, double u) {
    const double v = f_interp(std::abs(u));
    return u < 0.0 ? -v : v;
  };
  fam.F = [f_interp](std::size_t, double u) {
    return f_interp.integral_from_min(std::abs(u));
  };
  if (g_interp) {
    const MonotoneCubic gi = *g_interp;
    const double tail = gi.integral_from_min(gi.x_max());
    fam.g = [gi](std::size_t, double s) { return gi(s); };
    fam.G = [gi, tail](std::size_t, double s) {
      return gi.integral_from_min(s) - tail;
    };
  } else {
    fam.g = [](std::size_t, double) { return 0.0; };
    fam.G = [](std::size_t, double) { return 0.0; };
  }
  return fam;
}

// ---------------------------------------------------------------------------
// Hypothesis auditing
// ---------------------------------------------------------------------------

enum class Verdict { pass, fail, indeterminate };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "indeterminate";
  }
}

struct HypothesisEntry {
  std::string id;       // "F1".."F3", "G1".."G4"
  Verdict verdict = Verdict::indeterminate;
  double margin = 0.0;  // measured margin, sign convention per check
  std::size_t worst_node = 0;
  double worst_value = 0.0;  // u or s at the worst sample
  std::string detail;
};

struct AssumptionReport {
  std::vector<HypothesisEntry> entries;  // exactly one per hypothesis

  const HypothesisEntry& get(const std::string& id) const {
    for (const auto& e : entries)
      if (e.id == id) return e;
    throw std::logic_error("AssumptionReport: unknown hypothesis " + id);
  }

  bool all_determinate_pass() const {
    for (const auto& e : entries)
      if (e.verdict == Verdict::fail) return false;
    return true;
  }
};

/// Default log-spaced u ladder spanning [1e-6, 1e3].
inline std::vector<double> default_u_samples(int count = 46) {
  std::vector<double> u(count);
  for (int i = 0; i < count; ++i)
    u[i] = std::pow(10.0, -6.0 + 9.0 * i / (count - 1));
  return u;
}

/// Default log-spaced s ladder spanning [1e-12, 1e3]; decreasing tail probes
/// the (G4) blow-up.
inline std::vector<double> default_s_samples(int count = 61) {
  std::vector<double> s(count);
  for (int i = 0; i < count; ++i)
    s[i] = std::pow(10.0, -12.0 + 15.0 * i / (count - 1));
  return s;
}

/// Audit (F1)-(F3) and (G1)-(G4) by sampling every grid node against the
/// given value ladders. Failures are verdicts, never exceptions. The Hoelder
/// continuity requirements in (F1)/(G1) cannot be certified by sampling and
/// are assumed; details say so.
inline AssumptionReport check_assumptions(const NonlinearFamily& fam,
                                          const ManifoldGrid& grid,
                                          std::vector<double> u_samples = {},
                                          std::vector<double> s_samples = {}) {
  if (u_samples.empty()) u_samples = default_u_samples();
  if (s_samples.empty()) s_samples = default_s_samples();
  std::sort(u_samples.begin(), u_samples.end());
  std::sort(s_samples.begin(), s_samples.end());
  const std::size_t n = grid.node_count();

  AssumptionReport rep;

  // (F1): |f(x,u)| <= M (1 + |u|^{2*-1}) with finite M, f odd in u.
  {
    HypothesisEntry e{.id = "F1"};
    double worst_ratio = 0.0;
    double top_ratio = 0.0, mid_ratio = 0.0;
    double odd_defect = 0.0;
    const double ge = fam.growth_exponent;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < u_samples.size(); ++j) {
        const double u = u_samples[j];
        const double fv = fam.f(i, u);
        const double ratio = std::abs(fv) / (1.0 + std::pow(u, ge));
        if (ratio > worst_ratio) {
          worst_ratio = ratio;
          e.worst_node = i;
          e.worst_value = u;
        }
        if (j == u_samples.size() - 1) top_ratio = std::max(top_ratio, ratio);
        if (j == u_samples.size() / 2) mid_ratio = std::max(mid_ratio, ratio);
        odd_defect = std::max(odd_defect, std::abs(fam.f(i, -u) + fv));
      }
    }
    e.margin = worst_ratio;
    const bool bounded =
        std::isfinite(worst_ratio) &&
        (top_ratio <= 1.5 * std::max(mid_ratio, 1e-300) || top_ratio < 1e-12);
    const bool odd_ok = odd_defect <= 1e-10 * (1.0 + worst_ratio);
    e.verdict = (bounded && odd_ok) ? Verdict::pass : Verdict::fail;
    e.detail = bounded
                   ? (odd_ok ? "growth bound and oddness hold on samples; "
                               "Hoelder continuity in x assumed"
                             : "f is not odd in u")
                   : "growth ratio still increasing at the largest samples "
                     "(supercritical growth)";
    rep.entries.push_back(std::move(e));
  }

  // (F2): f(x,u) = o(u) as u -> 0, checked as a vanishing trend of
  // max_x |f|/|u| along the decreasing u ladder.
  {
    HypothesisEntry e{.id = "F2"};
    std::vector<double> ratios;  // over increasing u
    for (double u : u_samples) {
      double r = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        r = std::max(r, std::abs(fam.f(i, u)) / u);
      ratios.push_back(r);
    }
    const double at_umin = ratios.front();
    bool decreasing_toward_zero = true;
    for (std::size_t j = 1; j < std::min<std::size_t>(ratios.size(), 12); ++j)
      if (ratios[j - 1] > ratios[j] * (1.0 + 1e-9) + 1e-300)
        decreasing_toward_zero = false;
    e.margin = at_umin;
    e.worst_value = u_samples.front();
    if (at_umin < 1e-3 && decreasing_toward_zero) {
      e.verdict = Verdict::pass;
      e.detail = "max |f|/|u| vanishes along the ladder";
    } else if (!decreasing_toward_zero) {
      e.verdict = Verdict::fail;
      e.detail = "max |f|/|u| does not decrease as u -> 0";
    } else {
      e.verdict = Verdict::indeterminate;
      e.detail = "trend decreasing but above threshold 1e-3 at u = 1e-6";
    }
    rep.entries.push_back(std::move(e));
  }

  // (F3): f(x,u) u >= mu F(x,u) >= 0.
  {
    HypothesisEntry e{.id = "F3"};
    double min_ar = std::numeric_limits<double>::infinity();
    double min_F = std::numeric_limits<double>::infinity();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (double u : u_samples) {
        const double fu = fam.f(i, u) * u;
        const double Fv = fam.F(i, u);
        scale = std::max(scale, std::abs(fu));
        if (fu - fam.mu * Fv < min_ar) {
          min_ar = fu - fam.mu * Fv;
          e.worst_node = i;
          e.worst_value = u;
        }
        min_F = std::min(min_F, Fv);
      }
    }
    e.margin = min_ar;
    const double tol = 1e-9 * (1.0 + scale);
    e.verdict = (min_ar >= -tol && min_F >= -tol) ? Verdict::pass : Verdict::fail;
    e.detail = "min(f u - mu F) over samples; F >= 0 also required";
    rep.entries.push_back(std::move(e));
  }

  // (G1): G(x,s) <= 0.
  {
    HypothesisEntry e{.id = "G1"};
    double max_G = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i)
      for (double s : s_samples) {
        const double Gv = fam.G(i, s);
        if (Gv > max_G) {
          max_G = Gv;
          e.worst_node = i;
          e.worst_value = s;
        }
      }
    e.margin = max_G;
    e.verdict = (max_G <= 1e-12) ? Verdict::pass : Verdict::fail;
    e.detail = "max G over samples (must be <= 0); Hoelder continuity in x "
               "assumed";
    rep.entries.push_back(std::move(e));
  }

  // (G2): G increasing, g decreasing in s.
  {
    HypothesisEntry e{.id = "G2"};
    double worst = 0.0;  // most negative monotonicity margin
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 1; j < s_samples.size(); ++j) {
        const double dG = fam.G(i, s_samples[j]) - fam.G(i, s_samples[j - 1]);
        const double dg = fam.g(i, s_samples[j - 1]) - fam.g(i, s_samples[j]);
        const double m = std::min(dG, dg);
        if (m < worst) {
          worst = m;
          e.worst_node = i;
          e.worst_value = s_samples[j];
        }
      }
    }
    e.margin = worst;
    e.verdict = (worst >= -1e-10) ? Verdict::pass : Verdict::fail;
    e.detail = "monotonicity margins of G (increasing) and g (decreasing)";
    rep.entries.push_back(std::move(e));
  }

  // (G3): G(., s) integrable; automatic on a grid unless values overflow.
  {
    HypothesisEntry e{.id = "G3"};
    double max_int = 0.0;
    bool finite = true;
    for (double s : {s_samples.front(), s_samples[s_samples.size() / 2],
                     s_samples.back()}) {
      const double v = pairwise_sum(n, [&](std::size_t i) {
        return std::abs(fam.G(i, s)) * grid.volume_weights[i];
      });
      finite = finite && std::isfinite(v);
      max_int = std::max(max_int, v);
    }
    e.margin = max_int;
    e.verdict = finite ? Verdict::pass : Verdict::fail;
    e.detail = "int |G(x,s)| dv_g finite at sampled s";
    rep.entries.push_back(std::move(e));
  }

  // (G4): min_x g(x,s) -> infinity as s -> 0+, checked as monotone growth
  // along the decreasing tail plus a threshold at the smallest sample.
  {
    HypothesisEntry e{.id = "G4"};
    std::vector<double> mins;
    for (double s : s_samples) {
      double m = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) m = std::min(m, fam.g(i, s));
      mins.push_back(m);
    }
    bool growing = true;
    for (std::size_t j = 1; j < std::min<std::size_t>(mins.size(), 12); ++j)
      if (mins[j - 1] < mins[j] * (1.0 - 1e-12))
        growing = false;
    e.margin = mins.front();
    e.worst_value = s_samples.front();
    if (growing && mins.front() > 1e6) {
      e.verdict = Verdict::pass;
      e.detail = "min g grows without bound along s -> 0+";
    } else if (!growing || mins.front() <= mins.back() + 1e-300) {
      e.verdict = Verdict::fail;
      e.detail = "min g does not blow up as s -> 0+";
    } else {
      e.verdict = Verdict::indeterminate;
      e.detail = "growing trend but below threshold 1e6 at s = 1e-12";
    }
    rep.entries.push_back(std::move(e));
  }

  return rep;
}

}  // namespace torpass
