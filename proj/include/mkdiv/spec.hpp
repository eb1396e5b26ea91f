#pragma once

// Text specs for every configurable object, e.g.
//   uniform:a=0,b=1            phi:quadratic          distortion:tvar,alpha=0.9
//   score:gpl,alpha=0.9,g=identity                    functional:expectile,alpha=0.7
//   market:spd=lognormal:mu=0,sigma=0.2;r=0.01;T=1
// parse_spec / render_spec round-trip at the token level; the make_* factories
// build library objects and reject unknown keys.

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "mkdiv/distributions.hpp"
#include "mkdiv/error.hpp"
#include "mkdiv/functionals.hpp"
#include "mkdiv/generators.hpp"
#include "mkdiv/numeric.hpp"
#include "mkdiv/payoff.hpp"
#include "mkdiv/scores.hpp"

namespace mkdiv {

struct SpecString {
  std::string category;  ///< "score", "phi", ...; empty for distributions
  std::string kind;
  std::vector<std::pair<std::string, std::string>> params;

  friend bool operator==(const SpecString&, const SpecString&) = default;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

inline const std::set<std::string>& distribution_kinds() {
  static const std::set<std::string> k{"uniform", "normal", "lognormal", "exponential", "point", "empirical"};
  return k;
}

}  // namespace detail

/// Parses `category:kind[,key=value...]` or, for distributions,
/// `kind:key=value[,...]`. A bare token in an empirical spec is its path.
inline SpecString parse_spec(const std::string& text) {
  SpecString spec;
  const auto colon = text.find(':');
  if (colon == std::string::npos || colon == 0) throw ConfigError("malformed spec '" + text + "'");
  const std::string head = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);

  if (head == "market") {
    spec.category = "market";
    spec.kind = "market";
    for (const auto& part : detail::split(rest, ';')) {
      const auto eq = part.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("malformed market token '" + part + "'");
      spec.params.emplace_back(part.substr(0, eq), part.substr(eq + 1));
    }
    return spec;
  }

  std::vector<std::string> tokens;
  if (detail::distribution_kinds().count(head)) {
    spec.kind = head;
    if (!rest.empty()) tokens = detail::split(rest, ',');
  } else {
    spec.category = head;
    tokens = detail::split(rest, ',');
    spec.kind = tokens.front();
    tokens.erase(tokens.begin());
    if (spec.kind.empty()) throw ConfigError("missing kind in spec '" + text + "'");
  }
  for (const auto& tok : tokens) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) {
      if (spec.kind == "empirical" && !tok.empty()) {
        spec.params.emplace_back("path", tok);
        continue;
      }
      throw ConfigError("malformed token '" + tok + "' in spec '" + text + "'");
    }
    if (eq == 0) throw ConfigError("empty key in token '" + tok + "'");
    spec.params.emplace_back(tok.substr(0, eq), tok.substr(eq + 1));
  }
  return spec;
}

inline std::string render_spec(const SpecString& spec) {
  std::string out;
  if (spec.category == "market") {
    out = "market:";
    for (std::size_t i = 0; i < spec.params.size(); ++i) {
      if (i) out += ';';
      out += spec.params[i].first + "=" + spec.params[i].second;
    }
    return out;
  }
  if (spec.category.empty()) {
    out = spec.kind + ":";
  } else {
    out = spec.category + ":" + spec.kind;
    if (!spec.params.empty()) out += ",";
  }
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    if (i) out += ',';
    out += spec.params[i].first + "=" + spec.params[i].second;
  }
  return out;
}

/// Keyed access to spec parameters that tracks which keys were consumed.
class SpecParams {
 public:
  explicit SpecParams(const SpecString& spec) : spec_(spec) {
    for (const auto& [k, v] : spec.params) {
      if (!values_.emplace(k, v).second) throw ConfigError("duplicate key '" + k + "' in '" + render_spec(spec) + "'");
    }
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing key '" + key + "' in '" + render_spec(spec_) + "'");
    used_.insert(key);
    return it->second;
  }
  std::string text(const std::string& key, const std::string& fallback) {
    return has(key) ? text(key) : fallback;
  }
  double number(const std::string& key) {
    const std::string v = text(key);
    try {
      return parse_number(v);
    } catch (const ConfigError&) {
      throw ConfigError("bad number '" + key + "=" + v + "' in '" + render_spec(spec_) + "'");
    }
  }
  double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  /// Throws on any key nobody asked for.
  void finish() const {
    for (const auto& [k, v] : spec_.params) {
      if (!used_.count(k)) throw ConfigError("unknown key '" + k + "=" + v + "' in '" + render_spec(spec_) + "'");
    }
  }

 private:
  const SpecString& spec_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

namespace detail {
inline void expect_category(const SpecString& s, const std::string& cat) {
  if (s.category != cat) throw ConfigError("expected a '" + cat + ":' spec, got '" + render_spec(s) + "'");
}
}  // namespace detail

inline Distribution make_distribution(const SpecString& s) {
  if (!s.category.empty()) throw ConfigError("expected a distribution spec, got '" + render_spec(s) + "'");
  SpecParams p(s);
  Distribution d = Distribution::point_mass(0.0);
  if (s.kind == "uniform") {
    d = Distribution::uniform(p.number("a", 0.0), p.number("b", 1.0));
  } else if (s.kind == "normal") {
    d = Distribution::normal(p.number("mu", 0.0), p.number("sigma", 1.0));
  } else if (s.kind == "lognormal") {
    d = Distribution::lognormal(p.number("mu", 0.0), p.number("sigma", 1.0));
  } else if (s.kind == "exponential") {
    d = Distribution::exponential(p.number("rate", 1.0));
  } else if (s.kind == "point") {
    d = Distribution::point_mass(p.number("c"));
  } else if (s.kind == "empirical") {
    d = from_samples(read_values_csv(p.text("path")));
  } else {
    throw ConfigError("unknown distribution kind '" + s.kind + "'");
  }
  p.finish();
  return d;
}

inline ConvexGenerator make_generator_kind(const std::string& kind) {
  if (kind == "quadratic") return ConvexGenerator::quadratic();
  if (kind == "quartic") return ConvexGenerator::quartic();
  if (kind == "exp") return ConvexGenerator::exponential();
  if (kind == "xlogx") return ConvexGenerator::xlogx();
  throw ConfigError("unknown generator '" + kind + "'");
}

inline ConvexGenerator make_generator(const SpecString& s) {
  detail::expect_category(s, "phi");
  SpecParams(s).finish();
  return make_generator_kind(s.kind);
}

inline Distortion make_distortion(const SpecString& s) {
  detail::expect_category(s, "distortion");
  SpecParams p(s);
  Distortion d = Distortion::identity();
  if (s.kind == "identity") {
  } else if (s.kind == "dualpower") {
    d = Distortion::dual_power(p.number("k"));
  } else if (s.kind == "tvar") {
    d = Distortion::tvar(p.number("alpha"));
  } else if (s.kind == "power") {
    d = Distortion::power(p.number("c"));
  } else {
    throw ConfigError("unknown distortion '" + s.kind + "'");
  }
  p.finish();
  return d;
}

inline MonotoneMap make_map(const std::string& name) {
  if (name == "identity") return MonotoneMap::identity();
  if (name == "cube") return MonotoneMap::cube();
  if (name == "exp") return MonotoneMap::exp();
  if (name == "log") return MonotoneMap::log();
  if (name == "reciprocal") return MonotoneMap::reciprocal();
  if (name == "negate") return MonotoneMap::negate();
  throw ConfigError("unknown map '" + name + "'");
}

inline LossFunction make_loss(SpecParams& p) {
  const std::string kind = p.text("loss", "linear");
  if (kind == "linear") return LossFunction::linear();
  if (kind == "exponential") return LossFunction::exponential(p.number("gamma", 1.0));
  if (kind == "power") return LossFunction::power(p.number("p"));
  throw ConfigError("unknown loss '" + kind + "'");
}

/// {"breakpoints": [...], "levels": [...]}
inline StepFunction step_function_from_json(const nlohmann::json& j) {
  try {
    return StepFunction(j.at("breakpoints").get<std::vector<double>>(), j.at("levels").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("step function JSON: ") + e.what());
  }
}

inline StepFunction load_step_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError("'" + path + "': " + e.what());
  }
  return step_function_from_json(j);
}

namespace detail {
inline StepFunction make_lambda(SpecParams& p) {
  if (p.has("level")) return StepFunction::constant(p.number("level"));
  return load_step_function(p.text("file"));
}

inline double decomposable_power(SpecParams& p) {
  const std::string phi = p.text("phi", "quadratic");
  if (phi == "linear") return 1.0;
  if (phi == "quadratic") return 2.0;
  if (phi == "quartic") return 4.0;
  if (phi == "power") return p.number("p");
  throw ConfigError("unknown decomposable phi '" + phi + "'");
}
}  // namespace detail

inline Score make_score(const SpecString& s) {
  detail::expect_category(s, "score");
  SpecParams p(s);
  auto gen = [&p] { return make_generator_kind(p.text("phi", "quadratic")); };
  auto score = [&]() -> Score {
    if (s.kind == "bregman") return Score::bregman(gen());
    if (s.kind == "gpl") {
      const double alpha = p.number("alpha");
      return Score::gpl(make_map(p.text("g", "identity")), alpha);
    }
    if (s.kind == "expectile") {
      const double alpha = p.number("alpha");
      return Score::expectile(gen(), alpha);
    }
    if (s.kind == "shortfall") return Score::shortfall(make_loss(p));
    if (s.kind == "lambda") return Score::lambda_quantile(detail::make_lambda(p));
    if (s.kind == "decomposable") {
      const double power = detail::decomposable_power(p);
      const double alpha = p.number("alpha");
      const double beta = p.number("beta", 1.0 - alpha);
      return Score::decomposable(power, alpha, beta);
    }
    if (s.kind == "entropic") {
      const double gamma = p.number("gamma", 1.0);
      return Score::entropic(gen(), gamma);
    }
    if (s.kind == "osband") {
      const auto g = make_map(p.text("map"));
      return osband_transform(Score::bregman(gen()), g);
    }
    if (s.kind == "disttransform") {
      const auto h = make_map(p.text("map"));
      return dist_transform(Score::bregman(gen()), h);
    }
    throw ConfigError("unknown score '" + s.kind + "'");
  }();
  p.finish();
  return score;
}

inline Functional make_functional(const SpecString& s) {
  detail::expect_category(s, "functional");
  SpecParams p(s);
  auto f = [&]() -> Functional {
    if (s.kind == "mean") return Functional::mean();
    if (s.kind == "quantile") return Functional::quantile(p.number("alpha"));
    if (s.kind == "expectile") return Functional::expectile(p.number("alpha"));
    if (s.kind == "shortfall") return Functional::shortfall(make_loss(p));
    if (s.kind == "lambda") return Functional::lambda_quantile(detail::make_lambda(p));
    if (s.kind == "entropic") return Functional::entropic(p.number("gamma", 1.0));
    throw ConfigError("unknown functional '" + s.kind + "'");
  }();
  p.finish();
  return f;
}

inline MarketSpec make_market(const SpecString& s) {
  detail::expect_category(s, "market");
  SpecParams p(s);
  MarketSpec m;
  m.spd = make_distribution(parse_spec(p.text("spd")));
  m.rate = p.number("r", 0.0);
  m.horizon = p.number("T", 1.0);
  m.normalized = p.text("normalized", "false") == "true";
  p.finish();
  return m;
}

}  // namespace mkdiv
