#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sidewalk/analysis.hpp"
#include "sidewalk/dynamics.hpp"
#include "sidewalk/errors.hpp"
#include "sidewalk/generators.hpp"
#include "sidewalk/graph.hpp"
#include "sidewalk/measure.hpp"
#include "sidewalk/orientation.hpp"
#include "sidewalk/report.hpp"
#include "sidewalk/solver.hpp"
#include "sidewalk/version.hpp"

namespace {

using nlohmann::json;
using namespace sidewalk;

constexpr int kExitOk = 0;
constexpr int kExitBoundFailure = 1;
constexpr int kExitInputError = 2;
constexpr int kExitTruncated = 3;

struct CommonOptions {
  std::string input_file;
  std::string spec;
  std::string weights = "uniform";
  std::string out;
  bool timings = false;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Graph load_source(const CommonOptions& opt, json& input_json) {
  if (!opt.input_file.empty() && !opt.spec.empty())
    throw ValidationError("--input and --spec are mutually exclusive");
  if (!opt.input_file.empty()) {
    const std::string text = slurp(opt.input_file);
    input_json = {{"file", opt.input_file}, {"digest", fnv1a64_hex(text)}};
    return parse_edge_list(text);
  }
  if (!opt.spec.empty()) {
    input_json = {{"spec", opt.spec}};
    return build_instance(parse_generator_spec(opt.spec));
  }
  throw ValidationError("one of --input or --spec is required");
}

void emit(const CommonOptions& opt, json report, double seconds) {
  if (opt.timings) report["timings"] = {{"wall_seconds", seconds}};
  const std::string text = report.dump(2) + "\n";
  if (opt.out.empty())
    std::cout << text;
  else
    atomic_write_file(opt.out, text);
}

json orientation_json(const Orientation& o) {
  json out = json::array();
  for (EdgeId e = 0; e < o.graph().edge_count(); ++e)
    out.push_back(json::array({o.tail(e), o.head(e)}));
  return out;
}

json witness_json(const Graph& g, const VertexSet& witness, std::uint32_t k) {
  json subset = json::array();
  witness.for_each([&](Vertex v) { subset.push_back(v); });
  std::size_t edges = 0;
  for (const auto& [u, v] : g.edges())
    if (witness.contains(u) && witness.contains(v)) ++edges;
  const Rational density =
      Rational(static_cast<long>(edges)) / Rational(static_cast<long>(witness.size()));
  return {{"subset", std::move(subset)},
          {"size", witness.size()},
          {"edge_count", edges},
          {"density", to_string(density)},
          {"exceeds_k", edges > static_cast<std::size_t>(k) * witness.size()}};
}

json cover_json(const Graph& g, const SidewalkCover& cover, bool& all_ok) {
  json sizes = json::array();
  std::size_t covered = 0;
  all_ok = true;
  for (const auto& cls : cover.classes) {
    sizes.push_back(cls.size());
    covered += cls.size();
    if (!edge_class_is_sidewalk(g, cls)) all_ok = false;
  }
  const bool partition = covered == g.edge_count();
  if (!partition) all_ok = false;
  return {{"classes", cover.classes.size()},
          {"class_sizes", std::move(sizes)},
          {"partition_ok", partition},
          {"all_sidewalks", all_ok}};
}

int cmd_orient(const CommonOptions& opt, std::optional<std::uint32_t> k_opt) {
  const auto start = std::chrono::steady_clock::now();
  json report = make_report("orient");
  Graph g = load_source(opt, report["input"]);
  json results;
  int exit_code = kExitOk;

  if (k_opt) {
    report["parameters"] = {{"k", *k_opt}};
    results["mode"] = "fixed-k";
    const KOrientResult r = k_orient(g, *k_opt);
    results["feasible"] = r.feasible;
    if (r.feasible) {
      results["max_out_degree"] = r.orientation.max_out_degree();
      results["orientation"] = orientation_json(r.orientation);
      bool cover_ok = false;
      results["sidewalk_cover"] = cover_json(g, sidewalk_cover(g, r.orientation, *k_opt), cover_ok);
      if (!cover_ok) exit_code = kExitBoundFailure;
    } else {
      results["witness"] = witness_json(g, r.witness, *k_opt);
      if (!results["witness"]["exceeds_k"].get<bool>()) exit_code = kExitBoundFailure;
    }
  } else {
    results["mode"] = "minimize";
    const auto [number, o] = orientation_number(g);
    results["orientation_number"] = number;
    results["max_out_degree"] = o.max_out_degree();
    results["orientation"] = orientation_json(o);
    bool cover_ok = false;
    results["sidewalk_cover"] = cover_json(g, sidewalk_cover(g, o, number), cover_ok);
    if (!cover_ok) exit_code = kExitBoundFailure;
    if (g.edge_count() > 0) {
      const auto bound = edmonds_bound(g);
      const auto cert = max_density_subgraph(g, VertexMeasure::uniform(g.vertex_count()));
      results["edmonds_bound"] = bound;
      results["density"] = json_density_certificate(cert);
      results["density_ceiling"] = ceil_to_int(cert.density);
      if (bound != static_cast<std::int64_t>(number) ||
          ceil_to_int(cert.density) != static_cast<std::int64_t>(number))
        exit_code = kExitBoundFailure;
    }
  }
  report["results"] = std::move(results);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(opt, std::move(report), secs);
  return exit_code;
}

int cmd_simulate(const CommonOptions& opt, std::uint32_t k, bool k_given, std::uint32_t stages,
                 std::uint64_t seed, std::size_t budget, bool expansive,
                 const std::string& trace_path) {
  const auto start = std::chrono::steady_clock::now();
  json report = make_report("simulate");
  Graph g = load_source(opt, report["input"]);
  const WeightSpec wspec = parse_weight_spec(opt.weights);
  const VertexMeasure mu = gen_weights(g, wspec);

  if (expansive) {
    const auto d = g.regular_degree();
    if (!d) throw ValidationError("expansive mode needs a regular graph");
    if (wspec.profile != WeightProfile::kUniform)
      throw ValidationError("expansive mode runs under the uniform measure");
    const std::uint32_t forced = (*d + 1) / 2;
    if (k_given && k != forced)
      throw ValidationError("expansive mode fixes k = ceil(d/2) = " + std::to_string(forced));
    k = forced;
  } else if (!k_given) {
    throw ValidationError("--k is required unless --expansive is set");
  }

  report["parameters"] = {{"k", k},          {"stages", stages}, {"seed", seed},
                          {"weights", opt.weights}, {"budget", budget}, {"expansive", expansive}};

  const Orientation initial = Orientation::random(g, seed);
  json results;
  {
    const auto [over0, under0] = over_under_sets(g, initial, k);
    results["initial"] = {{"max_out_degree", initial.max_out_degree()},
                          {"mu_O", to_string(mu.mass(over0))},
                          {"mu_I", to_string(mu.mass(under0))},
                          {"min_chain", format_min_chain(shortest_augmenting_chain_length(g, initial, k))}};
  }

  Orientation final_o;
  DynamicsTrace trace;
  if (expansive) {
    ExpansiveResult r = run_expansive_dynamics(g, initial, stages, budget);
    final_o = std::move(r.orientation);
    trace = std::move(r.trace);
    results["used_reversal"] = r.used_reversal;
    results["finisher_flips"] = r.finisher_flips;
  } else {
    auto [o, t] = run_theorem_dynamics(g, mu, initial, k, stages, budget);
    final_o = std::move(o);
    trace = std::move(t);
  }

  const auto [over_f, under_f] = over_under_sets(g, final_o, k);
  results["final"] = {{"max_out_degree", final_o.max_out_degree()},
                      {"mu_O", to_string(mu.mass(over_f))},
                      {"mu_I", to_string(mu.mass(under_f))},
                      {"min_chain", format_min_chain(shortest_augmenting_chain_length(g, final_o, k))},
                      {"changed_edges", final_o.differing_edges(initial)}};

  results["trace"] = json_trace_summary(trace);

  bool all_hold = true;
  json lemma_checks = json::array();
  for (const StageMetrics& stage : trace.stages) {
    BoundCheck check = check_lemma_bound(stage, g.degree_bound(), trace.rho);
    all_hold = all_hold && check.holds;
    json row = json_bound_check(check);
    row["stage"] = stage.n;
    lemma_checks.push_back(std::move(row));
  }
  results["lemma_bound_checks"] = std::move(lemma_checks);

  if (trace.alpha) {
    json claim2 = json::array();
    for (const StageMetrics& stage : trace.stages) {
      const auto check = check_claim2_bound(stage, *trace.alpha, trace.rho, k);
      if (!check) continue;
      all_hold = all_hold && check->holds;
      json row = json_bound_check(*check);
      row["stage"] = stage.n;
      claim2.push_back(std::move(row));
    }
    results["claim2_checks"] = std::move(claim2);
    json envelope = json::array();
    for (const Rational& value : claim2_envelope(g, mu, k, stages)) envelope.push_back(to_string(value));
    results["claim2_envelope"] = std::move(envelope);
  }

  const DecayFit fit = fit_decay(trace, k);
  json fit_json;
  if (fit.fitted_rate) fit_json["fitted_rate"] = *fit.fitted_rate;
  else fit_json["fitted_rate"] = nullptr;
  if (fit.envelope_rate) fit_json["envelope_rate"] = to_string(*fit.envelope_rate);
  if (fit.hypothesis_rate) fit_json["hypothesis_rate"] = to_string(*fit.hypothesis_rate);
  results["decay_fit"] = std::move(fit_json);

  results["all_bounds_hold"] = all_hold;
  results["truncated"] = trace.truncated;
  report["results"] = std::move(results);

  if (!trace_path.empty()) atomic_write_file(trace_path, trace_to_csv(trace));

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(opt, std::move(report), secs);
  if (!all_hold) return kExitBoundFailure;
  if (trace.truncated) return kExitTruncated;
  return kExitOk;
}

int cmd_verify(const CommonOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  json report = make_report("verify");
  Graph g = load_source(opt, report["input"]);
  if (g.edge_count() == 0) throw ValidationError("verify needs at least one edge");

  json results;
  const auto [number, o] = orientation_number(g);
  results["orientation_number"] = number;
  results["max_out_degree"] = o.max_out_degree();
  const auto bound = edmonds_bound(g);
  results["edmonds_bound"] = bound;
  const auto cert = max_density_subgraph(g, VertexMeasure::uniform(g.vertex_count()));
  results["density"] = json_density_certificate(cert);
  const auto ceiling = ceil_to_int(cert.density);
  results["density_ceiling"] = ceiling;

  bool equal = bound == static_cast<std::int64_t>(number) && ceiling == static_cast<std::int64_t>(number);
  if (g.edge_count() <= 22) {
    const auto brute = brute_force_orientation_number(g);
    results["brute_force"] = brute;
    equal = equal && brute == number;
  } else {
    results["brute_force"] = "skipped";
  }
  results["equal"] = equal;
  report["results"] = std::move(results);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(opt, std::move(report), secs);
  return equal ? kExitOk : kExitBoundFailure;
}

int cmd_density(const CommonOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  json report = make_report("density");
  Graph g = load_source(opt, report["input"]);
  const VertexMeasure mu = gen_weights(g, parse_weight_spec(opt.weights));
  report["parameters"] = {{"weights", opt.weights}};

  json results;
  const auto cert = max_density_subgraph(g, mu);
  results["certificate"] = json_density_certificate(cert);
  results["alpha"] = to_string(cert.density);
  results["rho"] = to_string(cocycle_bound(g, mu));
  results["cost_lower_bound"] = cost_lower_bound(g, mu);
  report["results"] = std::move(results);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(opt, std::move(report), secs);
  return kExitOk;
}

int cmd_expansion(const CommonOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  json report = make_report("expansion");
  Graph g = load_source(opt, report["input"]);
  const VertexMeasure mu = gen_weights(g, parse_weight_spec(opt.weights));
  report["parameters"] = {{"weights", opt.weights}};

  json results;
  const ExpansionEstimate est = expansion_constant(g, mu);
  if (est.exact) {
    results["exact"] = to_string(*est.exact);
    json witness = json::array();
    est.witness->for_each([&](Vertex v) { witness.push_back(v); });
    results["witness"] = std::move(witness);
  } else {
    results["exact"] = nullptr;
  }
  results["lambda2"] = est.lambda2;
  results["spectral_lower"] = est.spectral_lower;
  if (const auto d = g.regular_degree(); d && est.lambda2 < static_cast<double>(*d))
    results["expansive_constant_c"] = static_cast<double>(*d) / (static_cast<double>(*d) - est.lambda2);
  report["results"] = std::move(results);

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  emit(opt, std::move(report), secs);
  return kExitOk;
}

int cmd_gen(const CommonOptions& opt, const std::string& weights_out) {
  if (opt.spec.empty()) throw ValidationError("gen needs --spec");
  Graph g = build_instance(parse_generator_spec(opt.spec));
  const std::string text = format_edge_list(g);
  if (opt.out.empty())
    std::cout << text;
  else
    atomic_write_file(opt.out, text);
  if (!weights_out.empty()) {
    const VertexMeasure mu = gen_weights(g, parse_weight_spec(opt.weights));
    atomic_write_file(weights_out, format_weights(mu));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact graph orientations, density certificates, and augmenting-chain dynamics"};
  app.require_subcommand(1);

  CommonOptions orient_opt, simulate_opt, verify_opt, density_opt, expansion_opt, gen_opt;

  auto add_common = [](CLI::App* cmd, CommonOptions& opt, bool with_weights) {
    cmd->add_option("--input", opt.input_file, "edge-list file");
    cmd->add_option("--spec", opt.spec, "generator spec, e.g. z2:n=10000,m=3,seed=7");
    cmd->add_option("--out", opt.out, "write the report here instead of stdout");
    cmd->add_flag("--timings", opt.timings, "include wall-clock timings in the report");
    if (with_weights)
      cmd->add_option("--weights", opt.weights,
                      "weight profile: uniform | two-level:r=R | random:r=R,seed=S");
  };

  auto* orient = app.add_subcommand("orient", "orient a graph with minimum or fixed out-degree bound");
  add_common(orient, orient_opt, false);
  std::uint32_t orient_k = 0;
  auto* orient_k_opt = orient->add_option("--k", orient_k, "fixed out-degree bound");

  auto* simulate = app.add_subcommand("simulate", "run the staged augmenting-chain dynamics");
  add_common(simulate, simulate_opt, true);
  std::uint32_t sim_k = 0, sim_stages = 8;
  std::uint64_t sim_seed = 0;
  std::size_t sim_budget = kDefaultChainBudget;
  bool sim_expansive = false;
  std::string sim_trace;
  auto* sim_k_opt = simulate->add_option("--k", sim_k, "out-degree threshold");
  simulate->add_option("--stages", sim_stages, "number of stages (chain length grows 1..stages)");
  simulate->add_option("--seed", sim_seed, "seed for the random initial orientation");
  simulate->add_option("--budget", sim_budget, "chain-pool budget in paths");
  simulate->add_flag("--expansive", sim_expansive, "regular-graph mode at k = ceil(d/2)");
  simulate->add_option("--trace", sim_trace, "write the CSV trace here");

  auto* verify = app.add_subcommand("verify", "cross-check solver, bound formula, density, and brute force");
  add_common(verify, verify_opt, false);

  auto* density = app.add_subcommand("density", "maximum density subgraph and cost lower bound");
  add_common(density, density_opt, true);

  auto* expansion = app.add_subcommand("expansion", "expansion constant (exact for small n, spectral otherwise)");
  add_common(expansion, expansion_opt, true);

  auto* gen = app.add_subcommand("gen", "emit a generated instance as an edge list");
  add_common(gen, gen_opt, true);
  std::string gen_weights_out;
  gen->add_option("--weights-out", gen_weights_out, "also write the weight file here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInputError;
  }

  try {
    if (orient->parsed())
      return cmd_orient(orient_opt,
                        orient_k_opt->count() ? std::optional<std::uint32_t>(orient_k) : std::nullopt);
    if (simulate->parsed())
      return cmd_simulate(simulate_opt, sim_k, sim_k_opt->count() > 0, sim_stages, sim_seed,
                          sim_budget, sim_expansive, sim_trace);
    if (verify->parsed()) return cmd_verify(verify_opt);
    if (density->parsed()) return cmd_density(density_opt);
    if (expansion->parsed()) return cmd_expansion(expansion_opt);
    if (gen->parsed()) return cmd_gen(gen_opt, gen_weights_out);
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTruncated;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}
