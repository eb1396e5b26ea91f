#pragma once

// Command-line front end. Exit status: 0 success, 1 domain/config error,
// 2 verification failure.

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mkdiv/distributions.hpp"
#include "mkdiv/functionals.hpp"
#include "mkdiv/json_canonical.hpp"
#include "mkdiv/payoff.hpp"
#include "mkdiv/rng.hpp"
#include "mkdiv/robust.hpp"
#include "mkdiv/spec.hpp"
#include "mkdiv/transport.hpp"
#include "mkdiv/verify.hpp"

namespace mkdiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitVerificationFailed = 2;

struct RunConfig {
  std::string command;
  std::string score, functional, phi, distortion, from, to, ref, benchmark, market, dist;
  std::size_t grid_size = kDefaultGridSize;
  double delta = kDefaultDelta;
  double tol = 1e-8;
  double eps = 0.0;
  std::uint64_t seed = 7;
  unsigned threads = 1;
  std::size_t n_max = 8;
  std::size_t instances = 100;
  bool unequal = false;
  std::optional<double> z_lo, z_hi;
  std::size_t steps = 1000;
  double elicit_tol = 1e-5;
  std::size_t pairs = 50;
  std::size_t sample_size = 20;
  bool no_nodes = false;
  std::string nodes_csv;
  std::string out_path;
  std::string format = "json";

  GridOptions grid() const { return GridOptions{grid_size, delta, threads}; }
};

inline std::size_t default_grid_size() {
  if (const char* env = std::getenv("MKDIV_GRID_M")) {
    try {
      const double v = parse_number(env);
      if (v >= 2 && v == std::floor(v)) return static_cast<std::size_t>(v);
    } catch (const ConfigError&) {
    }
    throw ConfigError(std::string("MKDIV_GRID_M: bad value '") + env + "'");
  }
  return kDefaultGridSize;
}

namespace detail {

inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string nodes_csv(const QuantileGrid& g) {
  std::string out = "u,value\n";
  for (std::size_t i = 0; i < g.size(); ++i) out += fmt17(g.u(i)) + "," + fmt17(g.nodes[i]) + "\n";
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IngestionError("cannot write '" + path + "'");
  f << text;
}

inline nlohmann::json grid_json(const QuantileGrid& g, bool with_nodes) {
  nlohmann::json j;
  j["M"] = g.size();
  if (with_nodes) j["nodes"] = g.nodes;
  return j;
}

}  // namespace detail

struct Output {
  nlohmann::json json;
  std::string csv;  ///< used when format == csv
  int status = kExitOk;
};

inline Output run_divergence(const RunConfig& c) {
  const auto spec = parse_spec(c.score);
  const Score s = make_score(spec);
  const Distribution f1 = make_distribution(parse_spec(c.from));
  const Distribution f2 = make_distribution(parse_spec(c.to));
  Output o;
  const double v = mk_divergence(s, f1, f2, c.grid());
  const bool exact = f1.is_empirical() && f2.is_empirical();
  o.json["value"] = v;
  o.json["coupling"] = to_string(s.coupling());
  o.json["score"] = render_spec(spec);
  o.json["grid"] = {{"M", exact ? 0 : c.grid_size}, {"delta", c.delta}, {"exact_atoms", exact}};
  o.csv = "value,coupling\n" + detail::fmt17(v) + "," + to_string(s.coupling()) + "\n";
  return o;
}

inline Output run_verify(const RunConfig& c) {
  const auto spec = parse_spec(c.score);
  const Score s = make_score(spec);
  if (c.n_max < 2 || c.n_max > kOracleCapacity / (c.unequal ? 2 : 1)) {
    throw ConfigError("verify: --n must lie in [2, " + std::to_string(kOracleCapacity / (c.unequal ? 2 : 1)) + "]");
  }
  const auto rep = certify_coupling(s, c.n_max, c.instances, c.seed, c.unequal);
  Output o;
  o.json["score"] = render_spec(spec);
  o.json["coupling"] = to_string(s.coupling());
  o.json["instances"] = rep.instances;
  o.json["n_max"] = c.n_max;
  o.json["seed"] = c.seed;
  o.json["oracle"] = c.unequal ? "lp" : "assignment";
  o.json["max_deviation"] = rep.max_deviation;
  o.json["max_sorted_deviation"] = rep.max_sorted_deviation;
  o.json["tolerance"] = rep.tolerance;
  o.json["pass"] = rep.passed();
  o.csv = "max_deviation,pass\n" + detail::fmt17(rep.max_deviation) + "," + (rep.passed() ? "true" : "false") + "\n";
  o.status = rep.passed() ? kExitOk : kExitVerificationFailed;
  return o;
}

inline Output run_worst_case(const RunConfig& c) {
  const ConvexGenerator gen = make_generator(parse_spec(c.phi));
  const Distortion d = make_distortion(parse_spec(c.distortion));
  const Distribution ref = make_distribution(parse_spec(c.ref));
  const auto sol = solve_worst_case(gen, d, ref, c.eps, c.grid(), c.tol);
  Output o;
  o.json["lambda_star"] = sol.lambda_star;
  o.json["worst_value"] = sol.worst_value;
  o.json["reference_value"] = sol.reference_value;
  o.json["epsilon"] = sol.epsilon;
  o.json["divergence"] = sol.divergence_at_solution;
  o.json["binding"] = sol.binding;
  o.json["truncation_delta"] = c.delta;
  o.json["warnings"] = sol.warnings;
  o.json["grid"] = detail::grid_json(sol.worst_quantile, !c.no_nodes);
  o.csv = detail::nodes_csv(sol.worst_quantile);
  if (!c.nodes_csv.empty()) detail::write_text(c.nodes_csv, o.csv);
  return o;
}

inline Output run_payoff(const RunConfig& c) {
  const ConvexGenerator gen = make_generator(parse_spec(c.phi));
  const Distribution bench = make_distribution(parse_spec(c.benchmark));
  const MarketSpec market = make_market(parse_spec(c.market));
  const auto sol = cheapest_payoff(gen, bench, market, c.eps, c.grid(), c.tol);
  Output o;
  o.json["lambda_star"] = sol.lambda_star;
  o.json["cost"] = sol.cost;
  o.json["benchmark_cost"] = sol.benchmark_cost;
  o.json["epsilon"] = sol.epsilon;
  o.json["divergence"] = sol.divergence_at_solution;
  o.json["binding"] = sol.binding;
  o.json["nonneg_violation"] = sol.nonneg_violation;
  o.json["grid"] = detail::grid_json(sol.payoff_quantile, !c.no_nodes);
  o.csv = detail::nodes_csv(sol.payoff_quantile);
  if (!c.nodes_csv.empty()) detail::write_text(c.nodes_csv, o.csv);
  return o;
}

inline Output run_elicit_check(const RunConfig& c) {
  const auto fspec = parse_spec(c.functional);
  const auto sspec = parse_spec(c.score);
  const Functional t = make_functional(fspec);
  const Score s = make_score(sspec);
  const Distribution dist = make_distribution(parse_spec(c.dist));
  const EvalOptions eo{c.grid_size, c.delta};
  const auto ys = support_points(dist, c.grid_size, c.delta);
  const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
  const double lo = c.z_lo.value_or(*mn - 1.0);
  const double hi = c.z_hi.value_or(*mx + 1.0);
  const double value = evaluate(t, dist, eo);
  const double arg = argmin_expected_score(s, dist, lo, hi, c.steps, eo);
  const double dev = std::abs(arg - value);
  Output o;
  o.json["functional"] = render_spec(fspec);
  o.json["score"] = render_spec(sspec);
  o.json["evaluate"] = value;
  o.json["argmin"] = arg;
  o.json["deviation"] = dev;
  o.json["tolerance"] = c.elicit_tol;
  o.json["pass"] = dev <= c.elicit_tol;
  o.csv = "evaluate,argmin,deviation\n" + detail::fmt17(value) + "," + detail::fmt17(arg) + "," + detail::fmt17(dev) + "\n";
  o.status = dev <= c.elicit_tol ? kExitOk : kExitVerificationFailed;
  return o;
}

/// Seeded sample pairs: X ~ U(-2, 2) and Y = 0.5 X + U(-2, 2) elementwise.
inline std::vector<std::pair<std::vector<double>, std::vector<double>>> random_sample_pairs(
    std::size_t pairs, std::size_t size, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<std::vector<double>, std::vector<double>>> out(pairs);
  for (auto& [x, y] : out) {
    x.resize(size);
    y.resize(size);
    for (std::size_t i = 0; i < size; ++i) {
      x[i] = rng.uniform(-2.0, 2.0);
      y[i] = 0.5 * x[i] + rng.uniform(-2.0, 2.0);
    }
  }
  return out;
}

inline Output run_axioms(const RunConfig& c) {
  const auto fspec = parse_spec(c.functional);
  const Functional t = make_functional(fspec);
  if (c.pairs == 0 || c.sample_size == 0) throw ConfigError("axioms: --pairs and --size must be positive");
  const auto pairs = random_sample_pairs(c.pairs, c.sample_size, c.seed);
  AxiomOptions ao;
  ao.eval = EvalOptions{c.grid_size, c.delta};
  const auto rep = check_axioms(t, pairs, ao);
  Output o;
  o.json["functional"] = render_spec(fspec);
  o.json["seed"] = c.seed;
  o.json["pairs"] = c.pairs;
  o.json["findings"] = nlohmann::json::array();
  o.csv = "axiom,passed\n";
  for (const auto& f : rep.findings) {
    nlohmann::json item{{"axiom", f.axiom}, {"passed", f.passed}};
    if (!f.passed) {
      item["witness"] = {{"pair", f.pair_index}, {"parameter", f.parameter}, {"lhs", f.lhs}, {"rhs", f.rhs}};
    }
    o.json["findings"].push_back(item);
    o.csv += f.axiom + "," + (f.passed ? "true" : "false") + "\n";
  }
  return o;
}

/// Parses `args` (without the program name), runs the command and writes its
/// artifact to `out` (or --out). Diagnostics go to `err`.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Monge-Kantorovich divergences induced by scoring functions"};
  app.require_subcommand(1);

  auto add_grid = [&c](CLI::App* sub) {
    sub->add_option("--M", c.grid_size, "quantile grid size");
    sub->add_option("--delta", c.delta, "tail truncation level");
    sub->add_option("--threads", c.threads, "worker threads for grid evaluation");
  };
  auto add_output = [&c](CLI::App* sub) {
    sub->add_option("--out", c.out_path, "write the result here instead of stdout");
    sub->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };

  auto* div = app.add_subcommand("divergence", "MK divergence between two distributions");
  div->add_option("--score", c.score)->required();
  div->add_option("--from", c.from)->required();
  div->add_option("--to", c.to)->required();
  add_grid(div);
  add_output(div);

  auto* ver = app.add_subcommand("verify", "closed-form coupling vs exact oracle on random instances");
  ver->add_option("--score", c.score)->required();
  ver->add_option("--n", c.n_max, "largest instance size");
  ver->add_option("--instances", c.instances);
  ver->add_option("--seed", c.seed);
  ver->add_flag("--unequal", c.unequal, "different atom counts per side (LP oracle)");
  add_output(ver);

  auto* wc = app.add_subcommand("worst-case", "worst-case distortion risk measure over a BW ball");
  wc->add_option("--phi", c.phi)->required();
  wc->add_option("--distortion", c.distortion)->required();
  wc->add_option("--ref", c.ref)->required();
  wc->add_option("--eps", c.eps)->required();
  wc->add_option("--tol", c.tol);
  wc->add_option("--nodes-csv", c.nodes_csv);
  wc->add_flag("--no-nodes", c.no_nodes);
  add_grid(wc);
  add_output(wc);

  auto* pay = app.add_subcommand("payoff", "cheapest payoff in a BW ball around a benchmark");
  pay->add_option("--phi", c.phi)->required();
  pay->add_option("--benchmark", c.benchmark)->required();
  pay->add_option("--market", c.market)->required();
  pay->add_option("--eps", c.eps)->required();
  pay->add_option("--tol", c.tol);
  pay->add_option("--nodes-csv", c.nodes_csv);
  pay->add_flag("--no-nodes", c.no_nodes);
  add_grid(pay);
  add_output(pay);

  auto* el = app.add_subcommand("elicit-check", "argmin of the expected score vs the functional");
  el->add_option("--functional", c.functional)->required();
  el->add_option("--score", c.score)->required();
  el->add_option("--dist", c.dist)->required();
  el->add_option("--zlo", c.z_lo);
  el->add_option("--zhi", c.z_hi);
  el->add_option("--steps", c.steps);
  el->add_option("--tol", c.elicit_tol);
  add_grid(el);
  add_output(el);

  auto* ax = app.add_subcommand("axioms", "empirical risk-measure axiom checks");
  ax->add_option("--functional", c.functional)->required();
  ax->add_option("--pairs", c.pairs);
  ax->add_option("--size", c.sample_size);
  ax->add_option("--seed", c.seed);
  add_grid(ax);
  add_output(ax);

  try {
    c.grid_size = default_grid_size();
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }

  try {
    Output o;
    if (div->parsed()) o = run_divergence(c);
    else if (ver->parsed()) o = run_verify(c);
    else if (wc->parsed()) o = run_worst_case(c);
    else if (pay->parsed()) o = run_payoff(c);
    else if (el->parsed()) o = run_elicit_check(c);
    else o = run_axioms(c);

    const std::string text = c.format == "csv" ? o.csv : canonical_json(o.json) + "\n";
    if (c.out_path.empty()) {
      out << text;
    } else {
      detail::write_text(c.out_path, text);
    }
    return o.status;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
}

}  // namespace mkdiv::cli
