#include "nlos/inverse/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "nlos/core/error.hpp"

namespace nlos {

namespace {

struct Probe {
  double alpha;
  double f;
  double slope;  // directional derivative along d
  Eigen::VectorXd g;
};

class LineSearch {
 public:
  LineSearch(const ObjectiveFn& f, const Eigen::VectorXd& x, const Eigen::VectorXd& d, double f0, double slope0,
             const LbfgsConfig& cfg, int& evaluations)
      : f_(f), x_(x), d_(d), f0_(f0), slope0_(slope0), cfg_(cfg), evals_(evaluations) {}

  /// Strong-Wolfe step; on failure returns the best sufficient-decrease probe seen, if any.
  std::optional<Probe> run(double alpha) {
    Probe prev{0.0, f0_, slope0_, {}};
    for (int i = 0; i < cfg_.max_line_search; ++i) {
      Probe cur = eval(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + cfg_.c1 * alpha * slope0_ || (i > 0 && cur.f >= prev.f)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -cfg_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      remember(cur);
      prev = cur;
      alpha *= 2.0;
    }
    return best_;
  }

 private:
  Probe eval(double alpha) {
    Probe p;
    p.alpha = alpha;
    p.g.resize(x_.size());
    p.f = f_(x_ + alpha * d_, p.g);
    ++evals_;
    p.slope = std::isfinite(p.f) ? p.g.dot(d_) : std::numeric_limits<double>::quiet_NaN();
    return p;
  }

  void remember(const Probe& p) {
    if (p.alpha > 0.0 && std::isfinite(p.f) && p.f <= f0_ + cfg_.c1 * p.alpha * slope0_ && (!best_ || p.f < best_->f)) best_ = p;
  }

  std::optional<Probe> zoom(Probe lo, Probe hi) {
    for (int i = 0; i < cfg_.max_line_search; ++i) {
      const double width = hi.alpha - lo.alpha;
      double alpha = 0.5 * (lo.alpha + hi.alpha);
      if (std::isfinite(hi.f)) {
        // minimizer of the quadratic through f(lo), f'(lo), f(hi)
        const double denom = 2.0 * (hi.f - lo.f - lo.slope * width);
        if (denom > 0.0) alpha = lo.alpha - lo.slope * width * width / denom;
      }
      const double a = std::min(lo.alpha, hi.alpha);
      const double b = std::max(lo.alpha, hi.alpha);
      alpha = std::clamp(alpha, a + 0.1 * (b - a), b - 0.1 * (b - a));
      if (b - a <= 1e-16 * std::max(1.0, b)) break;
      Probe cur = eval(alpha);
      if (!std::isfinite(cur.f) || cur.f > f0_ + cfg_.c1 * alpha * slope0_ || cur.f >= lo.f) {
        hi = cur;
      } else {
        if (std::abs(cur.slope) <= -cfg_.c2 * slope0_) return cur;
        remember(cur);
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = cur;
      }
    }
    remember(lo);
    return best_;
  }

  const ObjectiveFn& f_;
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& d_;
  double f0_;
  double slope0_;
  const LbfgsConfig& cfg_;
  int& evals_;
  std::optional<Probe> best_;
};

}  // namespace

LbfgsResult lbfgs_minimize(const ObjectiveFn& f, const Eigen::VectorXd& x0, const LbfgsConfig& cfg) {
  NLOS_REQUIRE(cfg.memory >= 1 && cfg.max_iterations >= 0 && cfg.max_line_search >= 1, "invalid L-BFGS config");
  NLOS_REQUIRE(0.0 < cfg.c1 && cfg.c1 < cfg.c2 && cfg.c2 < 1.0, "L-BFGS needs 0 < c1 < c2 < 1");
  LbfgsResult r;
  r.x = x0;
  r.gradient.resize(x0.size());
  r.value = f(r.x, r.gradient);
  r.evaluations = 1;
  if (!std::isfinite(r.value) || !r.gradient.allFinite()) {
    r.line_search_failed = true;
    r.message = "objective is not finite at the starting point";
    return r;
  }
  std::deque<Eigen::VectorXd> S, Y;
  std::deque<double> rho;
  for (;;) {
    const double gnorm = r.gradient.norm();
    if (gnorm <= cfg.gradient_tolerance * std::max(1.0, std::abs(r.value))) {
      r.converged = true;
      r.message = "gradient tolerance reached";
      return r;
    }
    if (r.iterations >= cfg.max_iterations) {
      r.message = "iteration limit reached";
      return r;
    }
    // two-loop recursion
    Eigen::VectorXd q = r.gradient;
    std::vector<double> a(S.size());
    for (std::size_t i = S.size(); i-- > 0;) {
      a[i] = rho[i] * S[i].dot(q);
      q -= a[i] * Y[i];
    }
    if (!S.empty()) q *= S.back().dot(Y.back()) / Y.back().squaredNorm();
    for (std::size_t i = 0; i < S.size(); ++i) {
      const double b = rho[i] * Y[i].dot(q);
      q += (a[i] - b) * S[i];
    }
    Eigen::VectorXd d = -q;
    double slope = r.gradient.dot(d);
    if (!(slope < 0.0)) {
      S.clear();
      Y.clear();
      rho.clear();
      d = -r.gradient;
      slope = -gnorm * gnorm;
    }
    const double alpha0 = S.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;
    LineSearch ls(f, r.x, d, r.value, slope, cfg, r.evaluations);
    const auto step = ls.run(alpha0);
    if (!step) {
      r.line_search_failed = true;
      r.message = "line search found no sufficient decrease";
      return r;
    }
    Eigen::VectorXd s = step->alpha * d;
    Eigen::VectorXd y = step->g - r.gradient;
    r.x += s;
    const double f_prev = r.value;
    r.value = step->f;
    r.gradient = step->g;
    ++r.iterations;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      S.push_back(std::move(s));
      Y.push_back(std::move(y));
      rho.push_back(1.0 / sy);
      if (static_cast<int>(S.size()) > cfg.memory) {
        S.pop_front();
        Y.pop_front();
        rho.pop_front();
      }
    }
    if (f_prev - r.value <= 1e-15 * std::max(1.0, std::abs(f_prev)) && r.value == 0.0) {
      r.converged = true;
      r.message = "objective reached zero";
      return r;
    }
  }
}

}  // namespace nlos
