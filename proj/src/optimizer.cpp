#include "psl/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "psl/error.hpp"

namespace psl {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::fabs(v));
  return s;
}

// Minimizer of the cubic interpolant through (a, fa, ga) and (b, fb, gb);
// falls back to bisection when the interpolant is degenerate.
double cubic_min(double a, double fa, double ga, double b, double fb, double gb) {
  const double d1 = ga + gb - 3.0 * (fa - fb) / (a - b);
  const double disc = d1 * d1 - ga * gb;
  if (disc < 0.0 || !std::isfinite(disc)) return 0.5 * (a + b);
  const double d2 = std::copysign(std::sqrt(disc), b - a);
  const double denom = gb - ga + 2.0 * d2;
  if (denom == 0.0) return 0.5 * (a + b);
  double t = b - (b - a) * (gb + d2 - d1) / denom;
  if (!std::isfinite(t)) return 0.5 * (a + b);
  return t;
}

struct LineEval {
  double alpha = 0.0;
  double f = 0.0;
  double dphi = 0.0;  // directional derivative at alpha
};

class LineSearch {
 public:
  LineSearch(const Objective& f, std::span<const double> x,
             std::span<const double> d, std::vector<double>& x_trial,
             std::vector<double>& g_trial)
      : f_(f), x_(x), d_(d), x_trial_(x_trial), g_trial_(g_trial) {}

  LineEval eval(double alpha) {
    for (std::size_t i = 0; i < x_.size(); ++i) x_trial_[i] = x_[i] + alpha * d_[i];
    const double fv = f_(x_trial_, g_trial_);
    ++evals_;
    LineEval e{alpha, fv, dot(g_trial_, d_)};
    if (std::isfinite(fv) && (!best_valid_ || fv < best_.f)) {
      best_ = e;
      best_valid_ = true;
    }
    return e;
  }

  int evals() const { return evals_; }
  bool best_valid() const { return best_valid_; }
  const LineEval& best() const { return best_; }

 private:
  const Objective& f_;
  std::span<const double> x_;
  std::span<const double> d_;
  std::vector<double>& x_trial_;
  std::vector<double>& g_trial_;
  int evals_ = 0;
  LineEval best_{};
  bool best_valid_ = false;
};

// Strong-Wolfe line search (bracket + zoom with safeguarded cubic steps,
// Nocedal & Wright Algs. 3.5/3.6). Returns true when a Wolfe point was
// accepted; the accepted trial state is left in x_trial/g_trial.
bool wolfe_search(LineSearch& ls, double f0, double dphi0, double alpha_init,
                  const MinimizeOptions& opts, LineEval& out) {
  const double c1 = opts.wolfe_c1;
  const double c2 = opts.wolfe_c2;
  const int max_steps = opts.max_line_search_steps;

  auto zoom = [&](LineEval lo, LineEval hi) -> bool {
    for (int i = ls.evals(); i < max_steps; ++i) {
      double a = cubic_min(lo.alpha, lo.f, lo.dphi, hi.alpha, hi.f, hi.dphi);
      const double left = std::min(lo.alpha, hi.alpha);
      const double right = std::max(lo.alpha, hi.alpha);
      const double margin = 0.1 * (right - left);
      if (!(a > left + margin && a < right - margin)) a = 0.5 * (left + right);
      LineEval e = ls.eval(a);
      if (!std::isfinite(e.f)) {
        hi = e;  // shrink toward lo
        hi.alpha = a;
        continue;
      }
      if (e.f > f0 + c1 * a * dphi0 || e.f >= lo.f) {
        hi = e;
      } else {
        if (std::fabs(e.dphi) <= -c2 * dphi0) {
          out = e;
          return true;
        }
        if (e.dphi * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = e;
      }
      if (std::fabs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::fabs(lo.alpha))) break;
    }
    return false;
  };

  LineEval prev{0.0, f0, dphi0};
  double alpha = alpha_init;
  for (int i = 0; i < max_steps; ++i) {
    LineEval e = ls.eval(alpha);
    if (!std::isfinite(e.f)) {
      // Overshot into non-finite territory: back off.
      alpha *= 0.25;
      continue;
    }
    if (e.f > f0 + c1 * alpha * dphi0 || (i > 0 && e.f >= prev.f)) return zoom(prev, e);
    if (std::fabs(e.dphi) <= -c2 * dphi0) {
      out = e;
      return true;
    }
    if (e.dphi >= 0.0) return zoom(e, prev);
    prev = e;
    alpha = std::min(alpha * 2.5, 1e12);
  }
  return false;
}

}  // namespace

MinimizeResult minimize(const Objective& f, std::vector<double> x0,
                        const MinimizeOptions& opts) {
  const std::size_t n = x0.size();
  MinimizeResult res;
  res.x_star = std::move(x0);

  std::vector<double> g(n), g_new(n), d(n), x_trial(n), g_trial(n);
  double fx = f(res.x_star, g);
  if (!std::isfinite(fx)) throw NumericalError("objective not finite at starting point");
  res.f_history.push_back(fx);

  const int restart_every = opts.restart_interval > 0
                                ? opts.restart_interval
                                : static_cast<int>(std::max<std::size_t>(n, 1));

  for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
  double g_inf = inf_norm(g);
  double dphi = -dot(g, g);
  double alpha_prev = 0.0, dphi_prev = 0.0;
  int since_restart = 0;

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    if (g_inf <= opts.grad_tol) {
      res.status = MinimizeStatus::converged;
      res.f_star = fx;
      res.iterations = iter;
      res.grad_inf_norm = g_inf;
      return res;
    }

    if (dphi >= 0.0) {  // safeguard: never search along an ascent direction
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dphi = -dot(g, g);
      since_restart = 0;
    }

    double alpha0;
    if (alpha_prev > 0.0 && dphi < 0.0) {
      alpha0 = alpha_prev * dphi_prev / dphi;  // first-order extrapolation
      if (!(alpha0 > 1e-14 && alpha0 < 1e12)) alpha0 = 1.0;
    } else {
      alpha0 = std::min(1.0, 1.0 / std::max(1e-12, g_inf));
    }

    LineSearch ls(f, res.x_star, d, x_trial, g_trial);
    LineEval accepted;
    const bool ok = wolfe_search(ls, fx, dphi, alpha0, opts, accepted);
    if (!ok) {
      // No Wolfe point within budget: fall back to the best strictly
      // decreasing point seen, otherwise stop with the current iterate.
      if (ls.best_valid() && ls.best().f < fx) {
        accepted = ls.best();
        for (std::size_t i = 0; i < n; ++i) x_trial[i] = res.x_star[i] + accepted.alpha * d[i];
        f(x_trial, g_trial);
      } else {
        res.status = MinimizeStatus::line_search_failed;
        res.f_star = fx;
        res.iterations = iter;
        res.grad_inf_norm = g_inf;
        return res;
      }
    }

    std::copy(x_trial.begin(), x_trial.end(), res.x_star.begin());
    std::copy(g_trial.begin(), g_trial.end(), g_new.begin());
    fx = accepted.f;
    res.f_history.push_back(fx);
    alpha_prev = accepted.alpha;
    dphi_prev = dphi;
    ++since_restart;

    // Hager-Zhang beta with the standard lower truncation
    // (Hager & Zhang 2005, CG_DESCENT).
    double beta = 0.0;
    if (since_restart < restart_every) {
      double dy = 0.0, yy = 0.0, yg = 0.0, dg = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double y = g_new[i] - g[i];
        dy += d[i] * y;
        yy += y * y;
        yg += y * g_new[i];
        dg += d[i] * g_new[i];
      }
      if (std::fabs(dy) > 1e-300) {
        const double bhz = (yg - 2.0 * dg * yy / dy) / dy;
        const double d_norm = std::sqrt(dot(d, d));
        const double g_norm = std::sqrt(dot(g, g));
        const double eta = -1.0 / (d_norm * std::min(0.01, g_norm));
        beta = std::max(bhz, eta);
      }
    } else {
      since_restart = 0;
    }

    for (std::size_t i = 0; i < n; ++i) d[i] = -g_new[i] + beta * d[i];
    std::swap(g, g_new);
    g_inf = inf_norm(g);
    dphi = dot(d, g);
    if (dphi >= -1e-12 * std::sqrt(dot(d, d)) * std::sqrt(dot(g, g))) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
      dphi = -dot(g, g);
      since_restart = 0;
    }
  }

  res.status = g_inf <= opts.grad_tol ? MinimizeStatus::converged : MinimizeStatus::max_iters;
  res.f_star = fx;
  res.iterations = opts.max_iters;
  res.grad_inf_norm = g_inf;
  return res;
}

std::vector<double> finite_diff_gradient(
    const std::function<double(std::span<const double>)>& f,
    std::span<const double> x, double h) {
  std::vector<double> xp(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double orig = xp[k];
    xp[k] = orig + h;
    const double fp = f(xp);
    xp[k] = orig - h;
    const double fm = f(xp);
    xp[k] = orig;
    grad[k] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace psl
