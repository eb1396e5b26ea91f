#pragma once

// Convex generators (phi, phi', (phi')^-1) for Bregman divergences, and
// concave distortion functions described through their weight
// gamma(u) = left derivative of g at 1 - u.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "mkdiv/error.hpp"
#include "mkdiv/numeric.hpp"

namespace mkdiv {

class ConvexGenerator {
 public:
  enum class Kind { quadratic, quartic, exp, xlogx };

  constexpr explicit ConvexGenerator(Kind k = Kind::quadratic) : kind_(k) {}

  static constexpr ConvexGenerator quadratic() { return ConvexGenerator(Kind::quadratic); }
  static constexpr ConvexGenerator quartic() { return ConvexGenerator(Kind::quartic); }
  static constexpr ConvexGenerator exponential() { return ConvexGenerator(Kind::exp); }
  static constexpr ConvexGenerator xlogx() { return ConvexGenerator(Kind::xlogx); }

  Kind kind() const { return kind_; }
  // Every catalog entry is strictly convex.
  bool strict() const { return true; }

  std::string name() const {
    switch (kind_) {
      case Kind::quadratic: return "quadratic";
      case Kind::quartic: return "quartic";
      case Kind::exp: return "exp";
      case Kind::xlogx: return "xlogx";
    }
    return "?";
  }

  bool in_domain(double x) const {
    if (!std::isfinite(x)) return false;
    return kind_ != Kind::xlogx || x > 0.0;
  }

  void require_domain(double x) const {
    if (!in_domain(x)) {
      throw DomainError("phi:" + name() + ": argument " + format_number(x) + " outside domain");
    }
  }

  double phi(double x) const {
    require_domain(x);
    switch (kind_) {
      case Kind::quadratic: return x * x;
      case Kind::quartic: return (x * x) * (x * x);
      case Kind::exp: return std::exp(x);
      case Kind::xlogx: return x * std::log(x);
    }
    return 0.0;
  }

  double dphi(double x) const {
    require_domain(x);
    switch (kind_) {
      case Kind::quadratic: return 2.0 * x;
      case Kind::quartic: return 4.0 * x * x * x;
      case Kind::exp: return std::exp(x);
      case Kind::xlogx: return std::log(x) + 1.0;
    }
    return 0.0;
  }

  /// Open range of phi'; bounds are infinite where unbounded.
  std::pair<double, double> dphi_range() const {
    if (kind_ == Kind::exp) return {0.0, kInf};
    return {-kInf, kInf};
  }

  double inv_dphi(double y) const {
    const auto [lo, hi] = dphi_range();
    if (!(y > lo && y < hi) || !std::isfinite(y)) {
      throw RangeError("phi:" + name() + ": inv_dphi(" + format_number(y) + ") outside range (" +
                       format_number(lo) + ", " + format_number(hi) + ")");
    }
    switch (kind_) {
      case Kind::quadratic: return 0.5 * y;
      case Kind::quartic: return std::cbrt(0.25 * y);
      case Kind::exp: return std::log(y);
      case Kind::xlogx: return std::exp(y - 1.0);
    }
    return 0.0;
  }

  /// B(a, b) = phi(a) - phi(b) - phi'(b) (a - b).
  double bregman(double a, double b) const {
    require_domain(a);
    require_domain(b);
    if (a == b) return 0.0;
    switch (kind_) {
      case Kind::quadratic: return (a - b) * (a - b);
      case Kind::exp: return std::exp(b) * (std::expm1(a - b) - (a - b));
      case Kind::xlogx: return a * std::log(a / b) - a + b;
      case Kind::quartic: break;
    }
    const double v = phi(a) - phi(b) - dphi(b) * (a - b);
    return v < 0.0 ? 0.0 : v;
  }

  friend bool operator==(const ConvexGenerator&, const ConvexGenerator&) = default;

 private:
  Kind kind_;
};

inline double bregman(const ConvexGenerator& gen, double a, double b) { return gen.bregman(a, b); }
inline double inv_dphi(const ConvexGenerator& gen, double y) { return gen.inv_dphi(y); }

/// Concave distortion g on [0,1], represented by gamma(u) = d^-g(1 - u).
class Distortion {
 public:
  enum class Kind { identity, dual_power, tvar, power };

  static Distortion identity() { return Distortion(Kind::identity, 0.0); }
  /// g(x) = 1 - (1 - x)^k, k >= 1.
  static Distortion dual_power(double k) {
    if (!(k >= 1.0)) throw DomainError("distortion:dualpower requires k >= 1");
    return Distortion(Kind::dual_power, k);
  }
  /// g(x) = min(x / (1 - alpha), 1).
  static Distortion tvar(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("distortion:tvar requires alpha in (0,1)");
    return Distortion(Kind::tvar, alpha);
  }
  /// g(x) = x^c, 0 < c < 1; gamma is unbounded near u = 1.
  static Distortion power(double c) {
    if (!(c > 0.0 && c < 1.0)) throw DomainError("distortion:power requires c in (0,1)");
    return Distortion(Kind::power, c);
  }

  Kind kind() const { return kind_; }
  double param() const { return param_; }

  /// Strictly concave g. Non-strict entries are accepted but the worst-case
  /// optimiser is then not guaranteed unique.
  bool strict() const {
    switch (kind_) {
      case Kind::identity: return false;
      case Kind::dual_power: return param_ > 1.0;
      case Kind::tvar: return false;
      case Kind::power: return true;
    }
    return false;
  }

  std::string name() const {
    switch (kind_) {
      case Kind::identity: return "identity";
      case Kind::dual_power: return "dualpower(k=" + format_number(param_) + ")";
      case Kind::tvar: return "tvar(alpha=" + format_number(param_) + ")";
      case Kind::power: return "power(c=" + format_number(param_) + ")";
    }
    return "?";
  }

  double g(double x) const {
    switch (kind_) {
      case Kind::identity: return x;
      case Kind::dual_power: return 1.0 - std::pow(1.0 - x, param_);
      case Kind::tvar: return std::min(x / (1.0 - param_), 1.0);
      case Kind::power: return std::pow(x, param_);
    }
    return 0.0;
  }

  double weight(double u) const {
    if (!(u > 0.0 && u < 1.0)) {
      throw DomainError("distortion_weight: u = " + format_number(u) + " outside (0,1)");
    }
    switch (kind_) {
      case Kind::identity: return 1.0;
      case Kind::dual_power: return param_ * std::pow(u, param_ - 1.0);
      case Kind::tvar: return u >= param_ ? 1.0 / (1.0 - param_) : 0.0;
      case Kind::power: return param_ * std::pow(1.0 - u, param_ - 1.0);
    }
    return 0.0;
  }

  friend bool operator==(const Distortion&, const Distortion&) = default;

 private:
  Distortion(Kind k, double p) : kind_(k), param_(p) {}
  Kind kind_;
  double param_;
};

inline double distortion_weight(const Distortion& d, double u) { return d.weight(u); }

}  // namespace mkdiv
