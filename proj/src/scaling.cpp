#include "mipt/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <set>
#include <string>

#include <Eigen/Dense>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_spline.h>

#include "mipt/errors.hpp"
#include "mipt/parallel.hpp"
#include "mipt/rng.hpp"

namespace mipt {

namespace detail {

double interp_linear(std::span<const double> xs, std::span<const double> ys, double x) {
  if (xs.size() == 1) return ys[0];
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t hi = static_cast<std::size_t>(it - xs.begin());
  hi = std::clamp<std::size_t>(hi, 1, xs.size() - 1);
  const std::size_t lo = hi - 1;
  const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
  return ys[lo] + w * (ys[hi] - ys[lo]);
}

}  // namespace detail

namespace {

constexpr double kPenalty = 1e30;

void silence_gsl() {
  static const bool once = [] {
    gsl_set_error_handler_off();
    return true;
  }();
  (void)once;
}

struct SplineFree {
  void operator()(gsl_spline* s) const { gsl_spline_free(s); }
};
struct AccelFree {
  void operator()(gsl_interp_accel* a) const { gsl_interp_accel_free(a); }
};

/// One size's data plus a natural cubic spline of S(p) for the S_c anchor.
class PreparedCurve {
 public:
  PreparedCurve(const EntropyCurve& c, const std::optional<Interval>& window)
      : L_(c.L), p_all_(c.p_values), s_all_(c.mean_entropy) {
    c.validate();
    for (double e : c.std_err) var_all_.push_back(e * e);
    if (c.size() < 3) {
      throw DegenerateFitError("curve L = " + std::to_string(c.L) + " has fewer than 3 points");
    }
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (window && !window->contains(c.p_values[k])) continue;
      p_.push_back(c.p_values[k]);
      s_.push_back(c.mean_entropy[k]);
      var_.push_back(c.std_err[k] * c.std_err[k]);
    }
    spline_.reset(gsl_spline_alloc(gsl_interp_cspline, p_all_.size()));
    accel_.reset(gsl_interp_accel_alloc());
    if (gsl_spline_init(spline_.get(), p_all_.data(), s_all_.data(), p_all_.size()) !=
        GSL_SUCCESS) {
      throw NumericalError("cubic spline initialization failed");
    }
  }

  int L() const noexcept { return L_; }
  double p_min() const noexcept { return p_all_.front(); }
  double p_max() const noexcept { return p_all_.back(); }

  double anchor(double p) const {
    double out = 0.0;
    if (gsl_spline_eval_e(spline_.get(), p, accel_.get(), &out) != GSL_SUCCESS) {
      throw DomainError("p_c = " + std::to_string(p) + " outside the p range of L = " +
                        std::to_string(L_));
    }
    return out;
  }

  // Variance of the anchor, taken as the interpolated point variance at p.
  double anchor_var(double p) const { return detail::interp_linear(p_all_, var_all_, p); }

  const std::vector<double>& p() const noexcept { return p_; }
  const std::vector<double>& s() const noexcept { return s_; }
  const std::vector<double>& var() const noexcept { return var_; }

 private:
  int L_;
  std::vector<double> p_all_;
  std::vector<double> s_all_;
  std::vector<double> var_all_;
  std::vector<double> p_;
  std::vector<double> s_;
  std::vector<double> var_;
  std::unique_ptr<gsl_spline, SplineFree> spline_;
  std::unique_ptr<gsl_interp_accel, AccelFree> accel_;
};

std::vector<PreparedCurve> prepare(std::span<const EntropyCurve> curves,
                                   const std::optional<Interval>& window) {
  silence_gsl();
  std::set<int> sizes;
  for (const auto& c : curves) sizes.insert(c.L);
  if (curves.size() < 3 || sizes.size() != curves.size()) {
    throw DegenerateFitError("data collapse needs at least 3 curves of distinct L");
  }
  std::vector<PreparedCurve> out;
  out.reserve(curves.size());
  for (const auto& c : curves) out.emplace_back(c, window);
  return out;
}

double residual(const std::vector<PreparedCurve>& prepared, double p_c, double nu) {
  if (!(nu > 0.0)) throw DomainError("nu must be positive");
  const std::size_t n = prepared.size();
  std::vector<std::vector<double>> xs(n);
  std::vector<std::vector<double>> ys(n);
  std::vector<double> anchor_var(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& c = prepared[i];
    if (p_c < c.p_min() || p_c > c.p_max()) {
      throw DomainError("p_c = " + std::to_string(p_c) + " outside the p range of L = " +
                        std::to_string(c.L()));
    }
    const double scale = std::pow(static_cast<double>(c.L()), 1.0 / nu);
    const double s_c = c.anchor(p_c);
    anchor_var[i] = c.anchor_var(p_c);
    xs[i].reserve(c.p().size());
    ys[i].reserve(c.p().size());
    for (std::size_t k = 0; k < c.p().size(); ++k) {
      xs[i].push_back((c.p()[k] - p_c) * scale);
      ys[i].push_back(c.s()[k] - s_c);
    }
  }

  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || xs[j].size() < 2) continue;
      const auto& xj = xs[j];
      for (std::size_t k = 0; k < xs[i].size(); ++k) {
        const double x = xs[i][k];
        if (x < xj.front() || x > xj.back()) continue;
        const double y_pred = detail::interp_linear(xj, ys[j], x);
        const double v_pred = detail::interp_linear(xj, prepared[j].var(), x);
        const double denom = prepared[i].var()[k] + anchor_var[i] + v_pred + anchor_var[j];
        if (!(denom > 0.0)) continue;
        const double r = ys[i][k] - y_pred;
        sum += r * r / denom;
        ++count;
      }
    }
  }
  if (count < 5) {
    throw DegenerateFitError("only " + std::to_string(count) +
                             " comparable points in the collapse (need 5)");
  }
  return sum / static_cast<double>(count);
}

double safe_residual(const std::vector<PreparedCurve>& prepared, double p_c, double nu) {
  try {
    return residual(prepared, p_c, nu);
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  } catch (const DegenerateFitError&) {
    return std::numeric_limits<double>::infinity();
  }
}

struct Optimum {
  double p_c = 0.0;
  double nu = 0.0;
  double quality = std::numeric_limits<double>::infinity();
  bool converged = true;
};

struct SimplexContext {
  const std::vector<PreparedCurve>* prepared;
  Interval p_c_range;
  Interval nu_range;
};

double simplex_objective(const gsl_vector* v, void* params) {
  const auto* ctx = static_cast<const SimplexContext*>(params);
  const double p_c = gsl_vector_get(v, 0);
  const double nu = gsl_vector_get(v, 1);
  if (!ctx->p_c_range.contains(p_c) || !ctx->nu_range.contains(nu)) return kPenalty;
  const double q = safe_residual(*ctx->prepared, p_c, nu);
  return std::isfinite(q) ? q : kPenalty;
}

Optimum optimize(const std::vector<PreparedCurve>& prepared, const FitOptions& opt) {
  const int n_pc = std::max(opt.grid_p_c, 2);
  const int n_nu = std::max(opt.grid_nu, 2);
  const double d_pc = opt.p_c_range.width() / (n_pc - 1);
  const double d_nu = opt.nu_range.width() / (n_nu - 1);

  Optimum grid;
  for (int i = 0; i < n_pc; ++i) {
    const double p_c = opt.p_c_range.lo + i * d_pc;
    for (int j = 0; j < n_nu; ++j) {
      const double nu = opt.nu_range.lo + j * d_nu;
      const double q = safe_residual(prepared, p_c, nu);
      if (q < grid.quality) grid = {p_c, nu, q, true};
    }
  }
  if (!std::isfinite(grid.quality)) {
    throw DegenerateFitError("collapse objective is undefined over the whole fit range");
  }

  SimplexContext ctx{&prepared, opt.p_c_range, opt.nu_range};
  gsl_multimin_function fn{&simplex_objective, 2, &ctx};
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2),
                                                            &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2),
                                                               &gsl_vector_free);
  gsl_vector_set(x.get(), 0, grid.p_c);
  gsl_vector_set(x.get(), 1, grid.nu);
  gsl_vector_set(step.get(), 0, 0.5 * d_pc);
  gsl_vector_set(step.get(), 1, 0.5 * d_nu);

  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> solver(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2),
      &gsl_multimin_fminimizer_free);
  gsl_multimin_fminimizer_set(solver.get(), &fn, x.get(), step.get());

  for (int iter = 0; iter < 1000; ++iter) {
    if (gsl_multimin_fminimizer_iterate(solver.get()) != GSL_SUCCESS) break;
    const double size = gsl_multimin_fminimizer_size(solver.get());
    if (gsl_multimin_test_size(size, 1e-8) == GSL_SUCCESS) break;
  }

  Optimum best;
  best.p_c = gsl_vector_get(solver->x, 0);
  best.nu = gsl_vector_get(solver->x, 1);
  best.quality = solver->fval;
  if (!(best.quality < grid.quality)) {
    grid.converged = false;
    return grid;
  }
  return best;
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

namespace detail {

double collapse_residual(std::span<const EntropyCurve> curves, double p_c, double nu,
                         const std::optional<Interval>& p_data_range) {
  const auto prepared = prepare(curves, p_data_range);
  return residual(prepared, p_c, nu);
}

}  // namespace detail

bool has_size_dependence(std::span<const EntropyCurve> curves) {
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const auto& a = curves[i];
      const auto& b = curves[j];
      if (a.L == b.L || b.size() == 0) continue;
      double chi2 = 0.0;
      std::size_t n = 0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double p = a.p_values[k];
        if (p < b.p_values.front() || p > b.p_values.back()) continue;
        const double sb = detail::interp_linear(b.p_values, b.mean_entropy, p);
        const double eb = detail::interp_linear(b.p_values, b.std_err, p);
        const double diff = a.mean_entropy[k] - sb;
        const double var = a.std_err[k] * a.std_err[k] + eb * eb;
        if (var > 0.0) {
          chi2 += diff * diff / var;
        } else if (diff != 0.0) {
          return true;
        }
        ++n;
      }
      if (n > 0) {
        const double reduced = chi2 / static_cast<double>(n);
        if (reduced > 1.0 + 3.0 * std::sqrt(2.0 / static_cast<double>(n))) return true;
      }
    }
  }
  return false;
}

double collapse_quality(std::span<const EntropyCurve> curves, double p_c, double nu) {
  const auto prepared = prepare(curves, std::nullopt);
  if (!has_size_dependence(curves)) {
    throw DegenerateFitError("curves of different L are statistically indistinguishable");
  }
  return residual(prepared, p_c, nu);
}

CollapseFit fit_collapse(std::span<const EntropyCurve> curves, const FitOptions& options) {
  if (!(options.p_c_range.width() > 0.0) || !(options.nu_range.width() > 0.0)) {
    throw DomainError("fit ranges must be non-empty");
  }
  if (!(options.nu_range.lo > 0.0)) throw DomainError("nu range must be positive");
  const auto prepared = prepare(curves, options.p_data_range);
  if (!has_size_dependence(curves)) {
    throw DegenerateFitError("curves of different L are statistically indistinguishable");
  }

  const Optimum best = optimize(prepared, options);

  CollapseFit fit;
  fit.p_c = best.p_c;
  fit.nu = best.nu;
  fit.quality = best.quality;
  fit.converged = best.converged;
  for (const auto& c : curves) fit.sizes_used.push_back(c.L);
  std::sort(fit.sizes_used.begin(), fit.sizes_used.end());

  const auto n_boot = static_cast<std::size_t>(std::max(options.n_bootstrap, 0));
  std::vector<double> boot_pc(n_boot, best.p_c);
  std::vector<double> boot_nu(n_boot, best.nu);
  parallel_for(n_boot, options.workers, [&](std::size_t b) {
    Rng rng(derive_seed(options.seed, {b}));
    std::vector<EntropyCurve> resampled(curves.begin(), curves.end());
    for (auto& c : resampled) {
      for (std::size_t k = 0; k < c.size(); ++k) {
        c.mean_entropy[k] += c.std_err[k] * rng.normal();
      }
    }
    try {
      const auto prep = prepare(resampled, options.p_data_range);
      const Optimum o = optimize(prep, options);
      boot_pc[b] = o.p_c;
      boot_nu[b] = o.nu;
    } catch (const DegenerateFitError&) {
      // A resample that cannot be fitted keeps the central estimate.
    }
  });
  fit.n_bootstrap = static_cast<int>(n_boot);
  fit.p_c_err = sample_std(boot_pc);
  fit.nu_err = sample_std(boot_nu);
  return fit;
}

std::vector<CollapsedPoint> collapsed_points(std::span<const EntropyCurve> curves, double p_c,
                                             double nu) {
  const auto prepared = prepare(curves, std::nullopt);
  std::vector<CollapsedPoint> out;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const double scale = std::pow(static_cast<double>(c.L), 1.0 / nu);
    const double s_c = prepared[i].anchor(p_c);
    for (std::size_t k = 0; k < c.size(); ++k) {
      out.push_back({c.L, c.p_values[k], (c.p_values[k] - p_c) * scale,
                     c.mean_entropy[k] - s_c, c.std_err[k]});
    }
  }
  return out;
}

CrossingEstimate crossing_estimate(std::span<const EntropyCurve> curves) {
  if (curves.size() < 2) throw DegenerateFitError("crossing estimate needs at least 2 sizes");
  CrossingEstimate est;
  for (std::size_t i = 0; i < curves.size(); ++i) {
    for (std::size_t j = i + 1; j < curves.size(); ++j) {
      const auto& a = curves[i];
      const auto& b = curves[j];
      a.validate();
      b.validate();
      if (a.size() == 0 || b.size() == 0) continue;
      const double lo = std::max(a.p_values.front(), b.p_values.front());
      const double hi = std::min(a.p_values.back(), b.p_values.back());
      std::vector<double> grid;
      for (double p : a.p_values)
        if (p >= lo && p <= hi) grid.push_back(p);
      for (double p : b.p_values)
        if (p >= lo && p <= hi) grid.push_back(p);
      std::sort(grid.begin(), grid.end());
      grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
      if (grid.empty()) continue;

      const double shift = std::log(static_cast<double>(b.L)) - std::log(static_cast<double>(a.L));
      std::vector<double> d(grid.size());
      for (std::size_t k = 0; k < grid.size(); ++k) {
        d[k] = detail::interp_linear(a.p_values, a.mean_entropy, grid[k]) -
               detail::interp_linear(b.p_values, b.mean_entropy, grid[k]) + shift;
      }
      for (std::size_t k = 0; k < grid.size(); ++k) {
        if (d[k] == 0.0) {
          est.crossings.push_back(grid[k]);
        } else if (k + 1 < grid.size() && d[k + 1] != 0.0 && (d[k] < 0.0) != (d[k + 1] < 0.0)) {
          const double w = d[k] / (d[k] - d[k + 1]);
          est.crossings.push_back(grid[k] + w * (grid[k + 1] - grid[k]));
        }
      }
    }
  }
  if (est.crossings.empty()) {
    throw NoCrossingError("no pair of shifted entropy curves intersects");
  }
  std::vector<double> sorted = est.crossings;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  est.p_c_approx = m % 2 == 1 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  est.band = {sorted.front(), sorted.back()};
  return est;
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::volume:
      return "volume";
    case Regime::critical:
      return "critical";
    case Regime::area:
      return "area";
  }
  return "unknown";
}

RegimeFit classify_regime(std::span<const EntropyCurve> curves, double p) {
  if (curves.size() < 4) throw DegenerateFitError("regime classification needs at least 4 sizes");
  const auto n = static_cast<Eigen::Index>(curves.size());
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& c = curves[static_cast<std::size_t>(i)];
    c.validate();
    if (c.size() == 0 || p < c.p_values.front() || p > c.p_values.back()) {
      throw DomainError("p = " + std::to_string(p) + " outside the p range of L = " +
                        std::to_string(c.L));
    }
    const double L = static_cast<double>(c.L);
    X(i, 0) = L;
    X(i, 1) = std::log(L);
    X(i, 2) = 1.0;
    y(i) = detail::interp_linear(c.p_values, c.mean_entropy, p);
    const double se = detail::interp_linear(c.p_values, c.std_err, p);
    w(i) = 1.0 / std::max(se * se, 1e-24);
  }
  const Eigen::Matrix3d normal = X.transpose() * w.asDiagonal() * X;
  const Eigen::Vector3d rhs = X.transpose() * w.asDiagonal() * y;
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(normal);
  const Eigen::Vector3d beta = ldlt.solve(rhs);
  const Eigen::Matrix3d cov = ldlt.solve(Eigen::Matrix3d::Identity());

  RegimeFit fit;
  fit.a = beta(0);
  fit.b = beta(1);
  fit.c = beta(2);
  fit.a_err = std::sqrt(std::max(cov(0, 0), 0.0));
  fit.b_err = std::sqrt(std::max(cov(1, 1), 0.0));
  if (fit.a > 3.0 * fit.a_err) {
    fit.regime = Regime::volume;
  } else if (std::abs(fit.a) <= 2.0 * fit.a_err && std::abs(fit.b) <= 2.0 * fit.b_err) {
    fit.regime = Regime::area;
  } else {
    fit.regime = Regime::critical;
  }
  return fit;
}

}  // namespace mipt
