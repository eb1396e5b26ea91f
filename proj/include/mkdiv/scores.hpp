#pragma once

// Scoring functions S(z, y) used as transport costs c(z1, z2) = S(z2, z1),
// together with the coupling each family is known to make optimal.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mkdiv/error.hpp"
#include "mkdiv/generators.hpp"
#include "mkdiv/numeric.hpp"

namespace mkdiv {

enum class Coupling { comonotonic, antitonic };

inline Coupling flip(Coupling c) {
  return c == Coupling::comonotonic ? Coupling::antitonic : Coupling::comonotonic;
}

inline std::string to_string(Coupling c) {
  return c == Coupling::comonotonic ? "comonotonic" : "antitonic";
}

/// Strictly monotone real map with a closed-form inverse.
class MonotoneMap {
 public:
  enum class Kind { identity, cube, exp, log, reciprocal, negate, scaled_exp, scaled_log };

  static MonotoneMap identity() { return MonotoneMap(Kind::identity); }
  static MonotoneMap cube() { return MonotoneMap(Kind::cube); }
  static MonotoneMap exp() { return MonotoneMap(Kind::exp); }
  static MonotoneMap log() { return MonotoneMap(Kind::log); }
  /// x -> 1/x on (0, inf); decreasing.
  static MonotoneMap reciprocal() { return MonotoneMap(Kind::reciprocal); }
  static MonotoneMap negate() { return MonotoneMap(Kind::negate); }
  /// x -> exp(gamma x)
  static MonotoneMap scaled_exp(double gamma) { return MonotoneMap(Kind::scaled_exp, checked(gamma)); }
  /// x -> log(x) / gamma
  static MonotoneMap scaled_log(double gamma) { return MonotoneMap(Kind::scaled_log, checked(gamma)); }

  Kind kind() const { return kind_; }
  double param() const { return param_; }

  bool increasing() const { return kind_ != Kind::reciprocal && kind_ != Kind::negate; }

  std::string name() const {
    switch (kind_) {
      case Kind::identity: return "identity";
      case Kind::cube: return "cube";
      case Kind::exp: return "exp";
      case Kind::log: return "log";
      case Kind::reciprocal: return "reciprocal";
      case Kind::negate: return "negate";
      case Kind::scaled_exp: return "exp(" + format_number(param_) + "x)";
      case Kind::scaled_log: return "log(x)/" + format_number(param_);
    }
    return "?";
  }

  bool in_domain(double x) const {
    if (!std::isfinite(x)) return false;
    switch (kind_) {
      case Kind::log:
      case Kind::reciprocal:
      case Kind::scaled_log: return x > 0.0;
      default: return true;
    }
  }

  /// Domain of the inverse, i.e. the range of the map.
  bool in_range(double y) const {
    if (!std::isfinite(y)) return false;
    switch (kind_) {
      case Kind::exp:
      case Kind::reciprocal:
      case Kind::scaled_exp: return y > 0.0;
      default: return true;
    }
  }

  double operator()(double x) const {
    switch (kind_) {
      case Kind::identity: return x;
      case Kind::cube: return x * x * x;
      case Kind::exp: return std::exp(x);
      case Kind::log: return std::log(x);
      case Kind::reciprocal: return 1.0 / x;
      case Kind::negate: return -x;
      case Kind::scaled_exp: return std::exp(param_ * x);
      case Kind::scaled_log: return std::log(x) / param_;
    }
    return x;
  }

  double inverse(double y) const {
    switch (kind_) {
      case Kind::identity: return y;
      case Kind::cube: return std::cbrt(y);
      case Kind::exp: return std::log(y);
      case Kind::log: return std::exp(y);
      case Kind::reciprocal: return 1.0 / y;
      case Kind::negate: return -y;
      case Kind::scaled_exp: return std::log(y) / param_;
      case Kind::scaled_log: return std::exp(param_ * y);
    }
    return y;
  }

  friend bool operator==(const MonotoneMap&, const MonotoneMap&) = default;

 private:
  explicit MonotoneMap(Kind k, double p = 0.0) : kind_(k), param_(p) {}
  static double checked(double gamma) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("map scale must be > 0");
    return gamma;
  }
  Kind kind_;
  double param_;
};

/// Monotone right-continuous step function with values in (0,1):
/// levels[0] on (-inf, b_0), levels[k] on [b_{k-1}, b_k), levels.back() on [b_last, inf).
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> levels)
      : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
    if (levels_.size() != breakpoints_.size() + 1) {
      throw ConfigError("step function: need exactly one more level than breakpoints");
    }
    for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
      if (!std::isfinite(breakpoints_[i]) || (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1]))) {
        throw ConfigError("step function: breakpoints must be finite and strictly increasing");
      }
    }
    for (double l : levels_) {
      if (!(l > 0.0 && l < 1.0)) throw ConfigError("step function: levels must lie in (0,1)");
    }
    const bool up = std::is_sorted(levels_.begin(), levels_.end());
    const bool down = std::is_sorted(levels_.rbegin(), levels_.rend());
    if (!up && !down) throw ConfigError("step function: levels must be monotone");
  }

  static StepFunction constant(double level) { return StepFunction({}, {level}); }

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }

  double operator()(double s) const {
    const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s);
    return levels_[static_cast<std::size_t>(it - breakpoints_.begin())];
  }

  /// Exact integral of the step function over [a, b] (signed if a > b).
  double integral(double a, double b) const {
    if (a == b) return 0.0;
    if (a > b) return -integral(b, a);
    double total = 0.0;
    double lo = -kInf;
    for (std::size_t k = 0; k < levels_.size(); ++k) {
      const double hi = k < breakpoints_.size() ? breakpoints_[k] : kInf;
      const double left = std::max(lo, a);
      const double right = std::min(hi, b);
      if (right > left) total += levels_[k] * (right - left);
      lo = hi;
    }
    return total;
  }

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

/// Increasing loss l with l(w) < 0 for w < 0 and l(w) > 0 for w > 0, plus its
/// antiderivative L(t) = integral of l over [0, t].
class LossFunction {
 public:
  enum class Kind { linear, exponential, power };

  static LossFunction linear() { return LossFunction(Kind::linear, 1.0); }
  /// l(s) = exp(gamma s) - 1
  static LossFunction exponential(double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("loss:exponential requires gamma > 0");
    return LossFunction(Kind::exponential, gamma);
  }
  /// l(s) = sign(s) |s|^p
  static LossFunction power(double p) {
    if (!(p > 0.0)) throw ConfigError("loss:power requires p > 0");
    return LossFunction(Kind::power, p);
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }
  bool convex() const { return kind_ != Kind::power || param_ == 1.0; }

  std::string name() const {
    switch (kind_) {
      case Kind::linear: return "linear";
      case Kind::exponential: return "exponential(gamma=" + format_number(param_) + ")";
      case Kind::power: return "power(p=" + format_number(param_) + ")";
    }
    return "?";
  }

  double operator()(double s) const {
    switch (kind_) {
      case Kind::linear: return s;
      case Kind::exponential: return std::expm1(param_ * s);
      case Kind::power: return std::copysign(std::pow(std::abs(s), param_), s);
    }
    return s;
  }

  double antiderivative(double t) const {
    switch (kind_) {
      case Kind::linear: return 0.5 * t * t;
      case Kind::exponential: return (std::expm1(param_ * t) - param_ * t) / param_;
      case Kind::power: return std::pow(std::abs(t), param_ + 1.0) / (param_ + 1.0);
    }
    return 0.0;
  }

  friend bool operator==(const LossFunction&, const LossFunction&) = default;

 private:
  LossFunction(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

class Score;

namespace family {
struct Bregman {
  ConvexGenerator gen;
};
/// (1{y <= z} - alpha)(g(z) - g(y)), g increasing
struct Gpl {
  MonotoneMap g;
  double alpha;
};
struct LambdaQuantile {
  StepFunction lambda;
};
struct Expectile {
  ConvexGenerator gen;
  double alpha;
};
struct Shortfall {
  LossFunction loss;
};
/// phi(|z - y|) (alpha 1{y > z} + beta 1{y <= z}) with phi(x) = x^power
struct Decomposable {
  double power;
  double alpha;
  double beta;
};
/// B_phi(e^{gamma y}, e^{gamma z})
struct Entropic {
  ConvexGenerator gen;
  double gamma;
};
/// inner(g^{-1}(z), y)
struct Osband {
  std::shared_ptr<const Score> inner;
  MonotoneMap g;
};
/// inner(z, h(y))
struct DistTransform {
  std::shared_ptr<const Score> inner;
  MonotoneMap h;
};
}  // namespace family

/// A scoring function from one of the supported families. Cheap to copy;
/// composite scores share their inner score.
class Score {
 public:
  using Family = std::variant<family::Bregman, family::Gpl, family::LambdaQuantile, family::Expectile,
                              family::Shortfall, family::Decomposable, family::Entropic, family::Osband,
                              family::DistTransform>;

  static Score bregman(ConvexGenerator gen) { return Score(family::Bregman{gen}); }

  static Score gpl(MonotoneMap g, double alpha) {
    check_level(alpha, "gpl");
    if (!g.increasing()) throw ConfigError("score:gpl requires an increasing transform g");
    return Score(family::Gpl{g, alpha});
  }

  static Score lambda_quantile(StepFunction lambda) { return Score(family::LambdaQuantile{std::move(lambda)}); }

  static Score expectile(ConvexGenerator gen, double alpha) {
    check_level(alpha, "expectile");
    return Score(family::Expectile{gen, alpha});
  }

  static Score shortfall(LossFunction loss) { return Score(family::Shortfall{loss}); }

  static Score decomposable(double power, double alpha, double beta) {
    if (!(power >= 1.0)) throw ConfigError("score:decomposable requires phi(x) = x^p with p >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0 && beta >= 0.0 && beta <= 1.0)) {
      throw ConfigError("score:decomposable requires alpha, beta in [0,1]");
    }
    return Score(family::Decomposable{power, alpha, beta});
  }

  static Score entropic(ConvexGenerator gen, double gamma) {
    if (!(gamma > 0.0)) throw ConfigError("score:entropic requires gamma > 0");
    return Score(family::Entropic{gen, gamma});
  }

  Family const& family() const { return family_; }
  Coupling coupling() const { return coupling_; }

  /// Family label used in error messages and reports.
  std::string family_name() const;
  std::string name() const;

  /// S(z, y).
  double operator()(double z, double y) const;

  /// T(delta_y): the report that scores zero against the outcome y.
  double point_value(double y) const;

  /// Whether the pair (z, y) lies in the domain of this score.
  bool in_domain(double z, double y) const;

 private:
  explicit Score(Family f) : family_(std::move(f)), coupling_(Coupling::comonotonic) {}
  Score(Family f, Coupling c) : family_(std::move(f)), coupling_(c) {}

  static void check_level(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError(std::string("score:") + who + " requires alpha in (0,1)");
  }

  [[noreturn]] void domain_fail(double z, double y) const {
    throw DomainError("score " + family_name() + ": (z, y) = (" + format_number(z) + ", " + format_number(y) +
                      ") outside domain");
  }

  friend Score osband_transform(const Score& inner, MonotoneMap g);
  friend Score dist_transform(const Score& inner, MonotoneMap h);

  Family family_;
  Coupling coupling_;
};

/// S(z, y) = inner(g^{-1}(z), y). Elicits g(T); the coupling flips when g decreases.
inline Score osband_transform(const Score& inner, MonotoneMap g) {
  const Coupling c = g.increasing() ? inner.coupling() : flip(inner.coupling());
  return Score(family::Osband{std::make_shared<const Score>(inner), g}, c);
}

/// S(z, y) = inner(z, h(y)). Elicits T applied to h(Y); the coupling flips when h decreases.
inline Score dist_transform(const Score& inner, MonotoneMap h) {
  const Coupling c = h.increasing() ? inner.coupling() : flip(inner.coupling());
  return Score(family::DistTransform{std::make_shared<const Score>(inner), h}, c);
}

inline double score_eval(const Score& s, double z, double y) { return s(z, y); }

inline std::string Score::family_name() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Bregman>) return "bregman";
        else if constexpr (std::is_same_v<T, family::Gpl>) return "gpl";
        else if constexpr (std::is_same_v<T, family::LambdaQuantile>) return "lambda";
        else if constexpr (std::is_same_v<T, family::Expectile>) return "expectile";
        else if constexpr (std::is_same_v<T, family::Shortfall>) return "shortfall";
        else if constexpr (std::is_same_v<T, family::Decomposable>) return "decomposable";
        else if constexpr (std::is_same_v<T, family::Entropic>) return "entropic";
        else if constexpr (std::is_same_v<T, family::Osband>) return "osband";
        else return "disttransform";
      },
      family_);
}

inline std::string Score::name() const {
  return std::visit(
      [](const auto& f) -> std::string {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Bregman>) {
          return "bregman(" + f.gen.name() + ")";
        } else if constexpr (std::is_same_v<T, family::Gpl>) {
          return "gpl(" + f.g.name() + ", alpha=" + format_number(f.alpha) + ")";
        } else if constexpr (std::is_same_v<T, family::LambdaQuantile>) {
          return "lambda(" + std::to_string(f.lambda.levels().size()) + " levels)";
        } else if constexpr (std::is_same_v<T, family::Expectile>) {
          return "expectile(" + f.gen.name() + ", alpha=" + format_number(f.alpha) + ")";
        } else if constexpr (std::is_same_v<T, family::Shortfall>) {
          return "shortfall(" + f.loss.name() + ")";
        } else if constexpr (std::is_same_v<T, family::Decomposable>) {
          return "decomposable(p=" + format_number(f.power) + ", alpha=" + format_number(f.alpha) +
                 ", beta=" + format_number(f.beta) + ")";
        } else if constexpr (std::is_same_v<T, family::Entropic>) {
          return "entropic(" + f.gen.name() + ", gamma=" + format_number(f.gamma) + ")";
        } else if constexpr (std::is_same_v<T, family::Osband>) {
          return "osband(" + f.inner->name() + ", g=" + f.g.name() + ")";
        } else {
          return "disttransform(" + f.inner->name() + ", h=" + f.h.name() + ")";
        }
      },
      family_);
}

inline bool Score::in_domain(double z, double y) const {
  if (!std::isfinite(z) || !std::isfinite(y)) return false;
  return std::visit(
      [z, y](const auto& f) -> bool {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Bregman> || std::is_same_v<T, family::Expectile>) {
          return f.gen.in_domain(z) && f.gen.in_domain(y);
        } else if constexpr (std::is_same_v<T, family::Gpl>) {
          return f.g.in_domain(z) && f.g.in_domain(y);
        } else if constexpr (std::is_same_v<T, family::Entropic>) {
          return f.gen.in_domain(std::exp(f.gamma * z)) && f.gen.in_domain(std::exp(f.gamma * y));
        } else if constexpr (std::is_same_v<T, family::Osband>) {
          return f.g.in_range(z) && f.inner->in_domain(f.g.inverse(z), y);
        } else if constexpr (std::is_same_v<T, family::DistTransform>) {
          return f.h.in_domain(y) && f.inner->in_domain(z, f.h(y));
        } else {
          return true;
        }
      },
      family_);
}

inline double Score::operator()(double z, double y) const {
  if (!in_domain(z, y)) domain_fail(z, y);
  return std::visit(
      [z, y](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Bregman>) {
          return f.gen.bregman(y, z);
        } else if constexpr (std::is_same_v<T, family::Gpl>) {
          return ((y <= z ? 1.0 : 0.0) - f.alpha) * (f.g(z) - f.g(y));
        } else if constexpr (std::is_same_v<T, family::LambdaQuantile>) {
          return std::max(z - y, 0.0) - f.lambda.integral(y, z);
        } else if constexpr (std::is_same_v<T, family::Expectile>) {
          return std::abs((y <= z ? 1.0 : 0.0) - f.alpha) * f.gen.bregman(y, z);
        } else if constexpr (std::is_same_v<T, family::Shortfall>) {
          return f.loss.antiderivative(y - z);
        } else if constexpr (std::is_same_v<T, family::Decomposable>) {
          const double d = std::abs(z - y);
          const double pen = f.power == 1.0 ? d : std::pow(d, f.power);
          return pen * (y > z ? f.alpha : f.beta);
        } else if constexpr (std::is_same_v<T, family::Entropic>) {
          return f.gen.bregman(std::exp(f.gamma * y), std::exp(f.gamma * z));
        } else if constexpr (std::is_same_v<T, family::Osband>) {
          return (*f.inner)(f.g.inverse(z), y);
        } else {
          return (*f.inner)(z, f.h(y));
        }
      },
      family_);
}

inline double Score::point_value(double y) const {
  return std::visit(
      [y](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, family::Osband>) {
          return f.g(f.inner->point_value(y));
        } else if constexpr (std::is_same_v<T, family::DistTransform>) {
          return f.inner->point_value(f.h(y));
        } else {
          return y;
        }
      },
      family_);
}

struct Quadruple {
  double z1, z2, z1p, z2p;
};

struct SubmodularReport {
  bool submodular = true;
  std::optional<Quadruple> witness;
  double excess = 0.0;  ///< lhs - rhs at the witness
};

/// Checks c(z1 ^ z1', z2 ^ z2') + c(z1 v z1', z2 v z2') <= c(z1, z2) + c(z1', z2')
/// for the transport cost c(z1, z2) = S(z2, z1), with z1 drawn from `y_grid` and
/// z2 from `z_grid`. Only crossing pairs (z1 < z1', z2 > z2') can violate it.
inline SubmodularReport check_submodular(const Score& s, std::span<const double> z_grid,
                                         std::span<const double> y_grid) {
  SubmodularReport report;
  auto cost = [&s](double z1, double z2) { return s(z2, z1); };
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    for (std::size_t ip = i + 1; ip < y_grid.size(); ++ip) {
      for (std::size_t jp = 0; jp < z_grid.size(); ++jp) {
        for (std::size_t j = jp + 1; j < z_grid.size(); ++j) {
          const double z1 = y_grid[i], z1p = y_grid[ip];
          const double z2 = z_grid[j], z2p = z_grid[jp];
          const double a = cost(z1, z2p);
          const double b = cost(z1p, z2);
          const double c = cost(z1, z2);
          const double d = cost(z1p, z2p);
          const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d), 1.0});
          const double excess = (a + b) - (c + d);
          if (excess > 1e-12 * scale) {
            report.submodular = false;
            report.witness = Quadruple{z1, z2, z1p, z2p};
            report.excess = excess;
            return report;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace mkdiv
