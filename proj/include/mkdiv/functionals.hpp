#pragma once

// Elicitable functionals T(F), the Bayes-act search argmin_z E_F[S(z, Y)], and
// empirical checks of the risk-measure axioms.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mkdiv/distributions.hpp"
#include "mkdiv/error.hpp"
#include "mkdiv/numeric.hpp"
#include "mkdiv/scores.hpp"

namespace mkdiv {

namespace functional {
struct Mean {};
struct Quantile {
  double alpha;
};
struct Expectile {
  double alpha;
};
struct Shortfall {
  LossFunction loss;
};
struct LambdaQuantile {
  StepFunction lambda;
};
struct Entropic {
  double gamma;
};
}  // namespace functional

class Functional {
 public:
  using Kind = std::variant<functional::Mean, functional::Quantile, functional::Expectile, functional::Shortfall,
                            functional::LambdaQuantile, functional::Entropic>;

  static Functional mean() { return Functional(functional::Mean{}); }
  static Functional quantile(double alpha) { return Functional(functional::Quantile{check_level(alpha)}); }
  static Functional expectile(double alpha) { return Functional(functional::Expectile{check_level(alpha)}); }
  static Functional shortfall(LossFunction loss) { return Functional(functional::Shortfall{loss}); }
  static Functional lambda_quantile(StepFunction lambda) {
    return Functional(functional::LambdaQuantile{std::move(lambda)});
  }
  static Functional entropic(double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("functional:entropic requires gamma > 0");
    return Functional(functional::Entropic{gamma});
  }

  const Kind& kind() const { return kind_; }

  std::string name() const {
    return std::visit(
        [](const auto& k) -> std::string {
          using T = std::decay_t<decltype(k)>;
          if constexpr (std::is_same_v<T, functional::Mean>) return "mean";
          else if constexpr (std::is_same_v<T, functional::Quantile>) return "quantile(" + format_number(k.alpha) + ")";
          else if constexpr (std::is_same_v<T, functional::Expectile>) return "expectile(" + format_number(k.alpha) + ")";
          else if constexpr (std::is_same_v<T, functional::Shortfall>) return "shortfall(" + k.loss.name() + ")";
          else if constexpr (std::is_same_v<T, functional::LambdaQuantile>) return "lambda";
          else return "entropic(" + format_number(k.gamma) + ")";
        },
        kind_);
  }

 private:
  explicit Functional(Kind k) : kind_(std::move(k)) {}
  static double check_level(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("functional level alpha must lie in (0,1)");
    return alpha;
  }
  Kind kind_;
};

/// Quadrature settings for parametric inputs; empirical inputs are exact.
struct EvalOptions {
  std::size_t grid_size = kDefaultGridSize;
  double delta = kDefaultDelta;
};

namespace detail {

inline double expectation(std::span<const double> ys, auto&& f) {
  std::vector<double> terms(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) terms[i] = f(ys[i]);
  return mean_of(terms);
}

inline double expectile_residual(std::span<const double> ys, double alpha, double z) {
  return expectation(ys, [&](double y) { return y > z ? alpha * (y - z) : -(1.0 - alpha) * (z - y); });
}

inline double solve_expectile(std::span<const double> ys, double alpha) {
  auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  if (*mn == *mx) return *mn;
  return bisect_decreasing([&](double z) { return expectile_residual(ys, alpha, z); }, *mn, *mx);
}

inline double solve_shortfall(std::span<const double> ys, const LossFunction& loss) {
  auto residual = [&](double x) {
    const double r = expectation(ys, [&](double w) { return loss(w - x); });
    if (!std::isfinite(r)) throw MomentError("shortfall: E[l(W - x)] is not finite");
    return r;
  };
  auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  if (*mn == *mx) return *mn;
  // l(w - min) >= 0 and l(w - max) <= 0 pointwise, so [min, max] brackets the root.
  return bisect_decreasing(residual, *mn, *mx);
}

inline double entropic_value(std::span<const double> ys, double gamma) {
  const double top = *std::max_element(ys.begin(), ys.end());
  const double m = expectation(ys, [&](double y) { return std::exp(gamma * (y - top)); });
  const double v = top + std::log(m) / gamma;
  if (!std::isfinite(v)) throw MomentError("entropic: exponential moment is not finite");
  return v;
}

/// First point where F exceeds the step function; requires the set
/// {y : F(y) > Lambda(y)} to be a single up-set.
inline double lambda_crossing(const Distribution& dist, const StepFunction& lambda) {
  const auto& bps = lambda.breakpoints();
  const auto& lv = lambda.levels();
  std::optional<double> first;
  for (std::size_t k = 0; k < lv.size(); ++k) {
    const double lo = k == 0 ? -kInf : bps[k - 1];
    const double hi = k < bps.size() ? bps[k] : kInf;
    // On [lo, hi) the level is constant, so {F > level} is [upper_quantile(level), inf).
    const double start = std::max(lo, dist.upper_quantile(lv[k]));
    const bool nonempty = start < hi;
    if (!first) {
      if (nonempty) first = start;
    } else if (!(start <= lo)) {
      throw AmbiguityError("lambda quantile: cdf crosses the level function more than once (near " +
                           format_number(lo) + ")");
    }
  }
  if (!first) throw AmbiguityError("lambda quantile: cdf never exceeds the level function");
  return *first;
}

}  // namespace detail

inline double evaluate(const Functional& t, const Distribution& dist, const EvalOptions& opt = {}) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, functional::Mean>) {
          const double m = dist.closed_form_mean();
          if (!std::isfinite(m)) throw MomentError("mean: not finite");
          return m;
        } else if constexpr (std::is_same_v<T, functional::Quantile>) {
          return dist.quantile(k.alpha);
        } else if constexpr (std::is_same_v<T, functional::Expectile>) {
          const auto ys = support_points(dist, opt.grid_size, opt.delta);
          return detail::solve_expectile(ys, k.alpha);
        } else if constexpr (std::is_same_v<T, functional::Shortfall>) {
          const auto ys = support_points(dist, opt.grid_size, opt.delta);
          return detail::solve_shortfall(ys, k.loss);
        } else if constexpr (std::is_same_v<T, functional::LambdaQuantile>) {
          return detail::lambda_crossing(dist, k.lambda);
        } else {
          const auto ys = support_points(dist, opt.grid_size, opt.delta);
          return detail::entropic_value(ys, k.gamma);
        }
      },
      t.kind());
}

/// z -> E_F[S(z, Y)] on the support representation of `dist`; +inf where the
/// score is undefined for some outcome.
inline double expected_score(const Score& s, std::span<const double> ys, double z) {
  std::vector<double> terms(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) {
    if (!s.in_domain(z, ys[i])) return kInf;
    terms[i] = s(z, ys[i]);
  }
  return mean_of(terms);
}

/// Grid search over `steps` equally spaced reports in [z_lo, z_hi], refined by
/// golden section on the bracket around the best grid point. Grid ties go to
/// the smallest z.
inline double argmin_expected_score(const Score& s, const Distribution& dist, double z_lo, double z_hi,
                                    std::size_t steps, const EvalOptions& opt = {}) {
  if (!(z_lo < z_hi)) throw DomainError("argmin_expected_score: requires z_lo < z_hi");
  if (steps < 2) throw DomainError("argmin_expected_score: requires steps >= 2");
  const auto ys = support_points(dist, opt.grid_size, opt.delta);
  const double h = (z_hi - z_lo) / static_cast<double>(steps - 1);
  auto z_at = [&](std::size_t k) { return k + 1 == steps ? z_hi : z_lo + h * static_cast<double>(k); };
  std::size_t best = 0;
  double best_val = kInf;
  for (std::size_t k = 0; k < steps; ++k) {
    const double v = expected_score(s, ys, z_at(k));
    if (v < best_val) {
      best_val = v;
      best = k;
    }
  }
  if (!std::isfinite(best_val)) {
    throw EvaluationError("argmin_expected_score: expected score is not finite anywhere on the grid");
  }
  const double a = z_at(best == 0 ? 0 : best - 1);
  const double b = z_at(std::min(best + 1, steps - 1));
  const double refined = golden_section([&](double z) { return expected_score(s, ys, z); }, a, b, 1e-13);
  return expected_score(s, ys, refined) <= best_val ? refined : z_at(best);
}

struct AxiomFinding {
  std::string axiom;
  bool passed = true;
  // First violation, if any.
  std::size_t pair_index = 0;
  double parameter = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

struct AxiomReport {
  std::string functional;
  std::vector<AxiomFinding> findings;  ///< translation, homogeneity, convexity, monotonicity

  bool passed(const std::string& axiom) const {
    for (const auto& f : findings) {
      if (f.axiom == axiom) return f.passed;
    }
    return false;
  }
};

struct AxiomOptions {
  std::vector<double> shifts{-1.5, 0.75, 3.0};
  std::vector<double> scales{0.5, 2.0, 3.5};
  std::vector<double> mixes{0.25, 0.5, 0.75};
  double tol = 1e-9;
  EvalOptions eval{};
};

/// Empirical check of translation invariance, positive homogeneity, convexity
/// (X and Y coupled elementwise) and monotonicity (X <= max(X, Y)).
inline AxiomReport check_axioms(const Functional& t,
                                std::span<const std::pair<std::vector<double>, std::vector<double>>> pairs,
                                const AxiomOptions& opt = {}) {
  AxiomReport report;
  report.functional = t.name();
  AxiomFinding translation{"translation_invariance"};
  AxiomFinding homogeneity{"positive_homogeneity"};
  AxiomFinding convexity{"convexity"};
  AxiomFinding monotonicity{"monotonicity"};

  auto T = [&](const std::vector<double>& xs) { return evaluate(t, from_samples(xs), opt.eval); };
  auto record = [&](AxiomFinding& f, std::size_t idx, double param, double lhs, double rhs, bool ok) {
    if (!ok && f.passed) {
      f.passed = false;
      f.pair_index = idx;
      f.parameter = param;
      f.lhs = lhs;
      f.rhs = rhs;
    }
  };
  auto tol = [&](double a, double b) { return opt.tol * (1.0 + std::max(std::abs(a), std::abs(b))); };

  for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
    const auto& [x, y] = pairs[idx];
    if (x.empty() || x.size() != y.size()) {
      throw DomainError("check_axioms: sample pair " + std::to_string(idx) + " is empty or misaligned");
    }
    const double tx = T(x);
    const double ty = T(y);
    const std::size_t n = x.size();
    std::vector<double> w(n);

    for (double m : opt.shifts) {
      for (std::size_t i = 0; i < n; ++i) w[i] = x[i] + m;
      const double lhs = T(w);
      const double rhs = tx + m;
      record(translation, idx, m, lhs, rhs, std::abs(lhs - rhs) <= tol(lhs, rhs));
    }
    for (double lam : opt.scales) {
      for (std::size_t i = 0; i < n; ++i) w[i] = lam * x[i];
      const double lhs = T(w);
      const double rhs = lam * tx;
      record(homogeneity, idx, lam, lhs, rhs, std::abs(lhs - rhs) <= tol(lhs, rhs));
    }
    for (double lam : opt.mixes) {
      for (std::size_t i = 0; i < n; ++i) w[i] = lam * x[i] + (1.0 - lam) * y[i];
      const double lhs = T(w);
      const double rhs = lam * tx + (1.0 - lam) * ty;
      record(convexity, idx, lam, lhs, rhs, lhs <= rhs + tol(lhs, rhs));
    }
    for (std::size_t i = 0; i < n; ++i) w[i] = std::max(x[i], y[i]);
    const double tmax = T(w);
    record(monotonicity, idx, 0.0, tx, tmax, tx <= tmax + tol(tx, tmax));
    record(monotonicity, idx, 1.0, ty, tmax, ty <= tmax + tol(ty, tmax));
  }
  report.findings = {translation, homogeneity, convexity, monotonicity};
  return report;
}

}  // namespace mkdiv
