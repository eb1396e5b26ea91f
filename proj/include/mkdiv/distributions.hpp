#pragma once

// Univariate distributions with cdf / left-continuous quantile evaluation, and
// the midpoint quantile grids every integral over (0,1) is computed on.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mkdiv/error.hpp"
#include "mkdiv/numeric.hpp"

namespace mkdiv {

struct Uniform {
  double a = 0.0;
  double b = 1.0;
};
struct Normal {
  double mu = 0.0;
  double sigma = 1.0;
};
struct LogNormal {
  double mu = 0.0;
  double sigma = 1.0;
};
struct Exponential {
  double rate = 1.0;
};
struct PointMass {
  double c = 0.0;
};
/// Equal-weight sample, stored sorted ascending.
struct Empirical {
  std::vector<double> values;
};

/// A distribution on the real line. Immutable once constructed.
class Distribution {
 public:
  using Kind = std::variant<Uniform, Normal, LogNormal, Exponential, PointMass, Empirical>;

  static Distribution uniform(double a, double b) {
    if (!(a < b)) throw DomainError("uniform: requires a < b");
    return Distribution(Uniform{a, b});
  }
  static Distribution normal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("normal: requires sigma > 0");
    return Distribution(Normal{mu, sigma});
  }
  static Distribution lognormal(double mu, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("lognormal: requires sigma > 0");
    return Distribution(LogNormal{mu, sigma});
  }
  static Distribution exponential(double rate) {
    if (!(rate > 0.0)) throw DomainError("exponential: requires rate > 0");
    return Distribution(Exponential{rate});
  }
  static Distribution point_mass(double c) { return Distribution(PointMass{c}); }

  const Kind& kind() const { return kind_; }
  bool is_empirical() const { return std::holds_alternative<Empirical>(kind_); }
  /// Sorted atoms; only valid for empirical distributions.
  const std::vector<double>& atoms() const { return std::get<Empirical>(kind_).values; }

  double cdf(double x) const;
  double quantile(double u) const;
  /// Right-continuous quantile inf{y : F(y) > u}.
  double upper_quantile(double u) const;
  /// Closed-form mean when it exists, otherwise NaN.
  double closed_form_mean() const;
  std::string name() const;

  friend Distribution from_samples(std::vector<double> values);

 private:
  explicit Distribution(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// Empirical distribution with equal weights; input order is irrelevant.
inline Distribution from_samples(std::vector<double> values) {
  if (values.empty()) throw IngestionError("from_samples: empty sample");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw IngestionError("from_samples: non-finite value at index " + std::to_string(i));
    }
  }
  std::sort(values.begin(), values.end());
  return Distribution(Empirical{std::move(values)});
}

inline double Distribution::cdf(double x) const {
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          if (x <= d.a) return 0.0;
          if (x >= d.b) return 1.0;
          return (x - d.a) / (d.b - d.a);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return normal_cdf((x - d.mu) / d.sigma);
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          if (x <= 0.0) return 0.0;
          return normal_cdf((std::log(x) - d.mu) / d.sigma);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return x <= 0.0 ? 0.0 : -std::expm1(-d.rate * x);
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return x >= d.c ? 1.0 : 0.0;
        } else {
          const auto it = std::upper_bound(d.values.begin(), d.values.end(), x);
          return static_cast<double>(it - d.values.begin()) /
                 static_cast<double>(d.values.size());
        }
      },
      kind_);
}

inline double Distribution::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("quantile: u = " + format_number(u) + " outside (0,1)");
  }
  return std::visit(
      [u](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return d.a + (d.b - d.a) * u;
        } else if constexpr (std::is_same_v<T, Normal>) {
          return d.mu + d.sigma * normal_quantile(u);
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          return std::exp(d.mu + d.sigma * normal_quantile(u));
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return -std::log1p(-u) / d.rate;
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return d.c;
        } else {
          // ceil(u n)-th order statistic
          const double n = static_cast<double>(d.values.size());
          auto k = static_cast<std::ptrdiff_t>(std::ceil(u * n)) - 1;
          k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(d.values.size()) - 1);
          return d.values[static_cast<std::size_t>(k)];
        }
      },
      kind_);
}

inline double Distribution::upper_quantile(double u) const {
  if (const auto* e = std::get_if<Empirical>(&kind_)) {
    const double n = static_cast<double>(e->values.size());
    const auto k = static_cast<std::size_t>(std::floor(u * n));
    if (k >= e->values.size()) return kInf;
    return e->values[k];
  }
  if (const auto* p = std::get_if<PointMass>(&kind_)) return u < 1.0 ? p->c : kInf;
  if (u >= 1.0) return kInf;
  if (u <= 0.0) {
    // lower end of the support
    if (const auto* un = std::get_if<Uniform>(&kind_)) return un->a;
    if (std::holds_alternative<Normal>(kind_)) return -kInf;
    return 0.0;
  }
  // continuous and strictly increasing on the support
  return quantile(u);
}

inline double Distribution::closed_form_mean() const {
  return std::visit(
      [](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return 0.5 * (d.a + d.b);
        } else if constexpr (std::is_same_v<T, Normal>) {
          return d.mu;
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          return std::exp(d.mu + 0.5 * d.sigma * d.sigma);
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return 1.0 / d.rate;
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return d.c;
        } else {
          return mean_of(d.values);
        }
      },
      kind_);
}

inline std::string Distribution::name() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Uniform>) {
          return "uniform(" + format_number(d.a) + "," + format_number(d.b) + ")";
        } else if constexpr (std::is_same_v<T, Normal>) {
          return "normal(" + format_number(d.mu) + "," + format_number(d.sigma) + ")";
        } else if constexpr (std::is_same_v<T, LogNormal>) {
          return "lognormal(" + format_number(d.mu) + "," + format_number(d.sigma) + ")";
        } else if constexpr (std::is_same_v<T, Exponential>) {
          return "exponential(" + format_number(d.rate) + ")";
        } else if constexpr (std::is_same_v<T, PointMass>) {
          return "point(" + format_number(d.c) + ")";
        } else {
          return "empirical(n=" + std::to_string(d.values.size()) + ")";
        }
      },
      kind_);
}

/// Discretised quantile function on the midpoint grid u_i = (i - 1/2) / M.
struct QuantileGrid {
  std::vector<double> nodes;
  double delta = 0.0;

  std::size_t size() const { return nodes.size(); }
  /// Midpoint abscissa of node i (0-based).
  double u(std::size_t i) const {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(nodes.size());
  }
  double mean() const { return mean_of(nodes); }
};

inline constexpr double kDefaultDelta = 1e-7;
inline constexpr std::size_t kDefaultGridSize = 10000;

inline void check_grid_params(std::size_t m, double delta) {
  if (m < 2) throw DomainError("quantile_grid: M must be >= 2");
  if (!(delta >= 0.0 && delta < 0.5 / static_cast<double>(m))) {
    throw DomainError("quantile_grid: delta must satisfy 0 <= delta < 1/(2M)");
  }
}

inline QuantileGrid quantile_grid(const Distribution& dist, std::size_t m, double delta = kDefaultDelta) {
  check_grid_params(m, delta);
  QuantileGrid g;
  g.delta = delta;
  g.nodes.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double u = std::clamp((static_cast<double>(i) + 0.5) / static_cast<double>(m), delta, 1.0 - delta);
    g.nodes[i] = dist.quantile(u);
  }
  return g;
}

/// Equal-weight support points representing `dist`: the atoms themselves for
/// empirical inputs, otherwise the midpoint quantile grid.
inline std::vector<double> support_points(const Distribution& dist, std::size_t m = kDefaultGridSize,
                                          double delta = kDefaultDelta) {
  if (dist.is_empirical()) return dist.atoms();
  if (const auto* p = std::get_if<PointMass>(&dist.kind())) return {p->c};
  return quantile_grid(dist, m, delta).nodes;
}

/// One numeric value per line; an optional first line `value` is skipped.
inline std::vector<double> read_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string token = line.substr(first, last - first + 1);
    if (values.empty() && line_no == 1 && token == "value") continue;
    try {
      values.push_back(parse_number(token));
    } catch (const ConfigError&) {
      throw IngestionError("'" + path + "' line " + std::to_string(line_no) + ": not a number: '" + token + "'");
    }
  }
  return values;
}

}  // namespace mkdiv
