#pragma once

// Small numerical kernels shared by every module: deterministic summation,
// bracketed root finding, golden-section refinement, the standard normal
// quantile, and a fixed-order parallel map.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "mkdiv/error.hpp"

namespace mkdiv {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Pairwise summation in index-ascending order. The split points depend only
/// on the length, so the result is bit-stable for a given input.
inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t kLeaf = 16;
  if (xs.size() <= kLeaf) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double mean_of(std::span<const double> xs) {
  return pairwise_sum(xs) / static_cast<double>(xs.size());
}

/// out[i] = f(i) for i in [0, n). Work is split into contiguous chunks across
/// `threads` workers; each slot is written by exactly one worker so the output
/// does not depend on the thread count. If any call throws, the exception from
/// the lowest failing index is rethrown.
template <class F>
std::vector<double> parallel_map(std::size_t n, unsigned threads, F&& f) {
  std::vector<double> out(n);
  if (threads <= 1 || n < 2 * static_cast<std::size_t>(threads)) {
    for (std::size_t i = 0; i < n; ++i) out[i] = f(i);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::size_t> error_index(threads, n);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(n, lo + chunk);
      for (std::size_t i = lo; i < hi; ++i) {
        try {
          out[i] = f(i);
        } catch (...) {
          errors[t] = std::current_exception();
          error_index[t] = i;
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (unsigned t = 0; t < threads; ++t) {
    if (errors[t]) std::rethrow_exception(errors[t]);
  }
  return out;
}

/// Bisection for the root of a non-increasing residual on [lo, hi] with
/// residual(lo) >= 0 >= residual(hi). Returns the smallest point found where
/// the residual is <= 0, to interval width `width`.
template <class F>
double bisect_decreasing(F&& residual, double lo, double hi, double width = 1e-12) {
  for (int it = 0; it < 400 && hi - lo > width * (1.0 + std::abs(lo) + std::abs(hi)) * 0.5; ++it) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (residual(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

/// Widen [lo, hi] geometrically until a non-increasing residual changes sign.
template <class F>
bool bracket_decreasing(F&& residual, double& lo, double& hi, int max_expansions = 200) {
  double span = std::max(hi - lo, 1.0);
  for (int k = 0; k < max_expansions; ++k) {
    const bool lo_ok = residual(lo) >= 0.0;
    const bool hi_ok = residual(hi) <= 0.0;
    if (lo_ok && hi_ok) return true;
    if (!lo_ok) lo -= span;
    if (!hi_ok) hi += span;
    span *= 2.0;
    if (!std::isfinite(lo) || !std::isfinite(hi)) return false;
  }
  return false;
}

/// Golden-section minimisation of a unimodal function on [a, b].
template <class F>
double golden_section(F&& f, double a, double b, double width = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 300 && b - a > width; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Standard normal quantile: Acklam's rational approximation followed by one
/// Halley step against erfc, which brings the error to a few ulps.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0,1)");
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                 -2.759285104469687e+02, 1.383577518672690e+02,
                                 -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                 -1.556989798598866e+02, 6.680131188771972e+01,
                                 -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                 -2.400758277161838e+00, -2.549732539343734e+00,
                                 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                 2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement; the upper tail is handled through symmetry so the
  // residual is computed without cancellation.
  const bool upper = p > 0.5;
  const double pt = upper ? 1.0 - p : p;
  const double xt = upper ? -x : x;
  const double e = 0.5 * std::erfc(-xt / std::sqrt(2.0)) - pt;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * xt * xt);
  const double refined = xt - u / (1.0 + 0.5 * xt * u);
  return upper ? -refined : refined;
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Parse a full string as a double; throws ConfigError naming the token.
inline double parse_number(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || token.empty()) {
    throw ConfigError("cannot parse number '" + token + "'");
  }
  return v;
}

}  // namespace mkdiv
