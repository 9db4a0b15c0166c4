// Copyright 2026 The clonegame Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// `clonegame` command line. run() is the whole program; main() only forwards
// argv so tests can drive it in-process.
//
// Exit codes: 0 ok, 2 bad input (error object on stdout), 3 resource cap.

#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "clonegame/cloning_game.hpp"
#include "clonegame/interchange.hpp"
#include "clonegame/parallel_repetition.hpp"
#include "clonegame/qpv_routing.hpp"
#include "clonegame/random.hpp"
#include "clonegame/random_oracle.hpp"
#include "clonegame/seesaw.hpp"

namespace clonegame::cli {

using ojson = nlohmann::ordered_json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitContract = 2;
inline constexpr int kExitResource = 3;

// ---------------------------------------------------------------------------
// Strategy files

/// {"k":K, "target":state|"epr", "shared_state":state|density,
///  "responses":{"x":[op per party]}}. Target defaults to the EPR pair.
inline std::pair<GameSpec, Strategy> cloning_strategy_from_json(const json &j) {
  if (!j.is_object() || !j.contains("shared_state")) throw ContractError("strategy file needs \"shared_state\"");
  const int k = j.value("k", 0);
  if (k < 1) throw ContractError("strategy file needs \"k\" >= 1");
  const bool epr = !j.contains("target") || j.at("target") == "epr";
  GameSpec spec = epr ? GameSpec::epr(k) : GameSpec(k, state_from_json(j.at("target")));
  Strategy s{density_from_json(j.at("shared_state")), {}};
  if (j.contains("responses")) {
    for (const auto &[key, ops] : j.at("responses").items()) {
      int x = -1;
      try {
        x = std::stoi(key);
      } catch (const std::exception &) {
      }
      if (x < 0 || x >= k || std::to_string(x) != key) throw ContractError("responses: '" + key + "' is not a question in 0..k-1");
      if (!ops.is_array() || ops.size() != static_cast<std::size_t>(k))
        throw ContractError("responses: each question needs one operator per party");
      std::vector<Operator> per;
      for (const auto &o : ops) per.push_back(operator_from_json(o));
      s.responses.emplace(x, std::move(per));
    }
  }
  return {std::move(spec), std::move(s)};
}

/// {"n":N, "shared_state":state|density, "responses_a":{"bits":op}, "responses_b":{...}}
inline std::pair<ParallelSpec, ParallelStrategy> parallel_strategy_from_json(const json &j) {
  if (!j.is_object() || !j.contains("shared_state")) throw ContractError("strategy file needs \"shared_state\"");
  const ParallelSpec spec(j.value("n", 0));
  ParallelStrategy s{density_from_json(j.at("shared_state")), {}, {}};
  auto read = [&](const char *key, std::map<BitString, Operator> &out) {
    if (!j.contains(key)) return;
    for (const auto &[x, v] : j.at(key).items()) {
      if (x.size() != static_cast<std::size_t>(spec.n())) throw ContractError(std::string(key) + ": '" + x + "' must have n bits");
      out.emplace(bits_from_string(x), operator_from_json(v));
    }
  };
  read("responses_a", s.responses_a);
  read("responses_b", s.responses_b);
  return {spec, std::move(s)};
}

// ---------------------------------------------------------------------------
// Output

inline void round_all(ojson &j) {
  if (j.is_number_float()) {
    j = round12(j.get<double>());
  } else if (j.is_structured()) {
    for (auto &e : j) round_all(e);
  }
}

inline std::string csv_cell(const ojson &v) {
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  }
  if (v.is_null()) return "";
  if (v.is_structured()) return csv_cell(ojson(v.dump()));
  return v.dump();
}

/// One row per record if the report has "records", else one row of its scalars.
inline std::string to_csv(const ojson &report) {
  std::vector<ojson> rows;
  if (report.contains("records")) {
    for (const auto &r : report.at("records")) rows.push_back(r);
  } else {
    rows.push_back(report);
  }
  std::ostringstream out;
  if (rows.empty()) return "";
  std::vector<std::string> keys;
  for (const auto &[k, v] : rows.front().items()) keys.push_back(k);
  for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
  out << '\n';
  for (const auto &r : rows) {
    for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << (r.contains(keys[i]) ? csv_cell(r.at(keys[i])) : "");
    out << '\n';
  }
  return out.str();
}

inline ojson state_report(const StateVector &v) { return ojson::parse(to_json(v, true).dump()); }

// ---------------------------------------------------------------------------
// Subcommands

struct Options {
  std::uint64_t seed = kDefaultSeed;
  std::string out = "json";
  double tol = 1e-9;
  std::string strategy;

  int k = 2;
  int n = 1;
  std::string target;
  std::string state;
  std::string mode = "bounds";
  std::string x, xp;

  std::string game = "cloning";
  std::optional<int> seeds;
  int iters = 500;
  std::size_t ancilla = 2;

  std::string attack = "nope_optimal";
  std::uint64_t rounds = 10000;
  bool purified = false;
  std::string transcript;

  std::string adversary = "route-v0";
  int ell = 8;
  std::optional<std::uint64_t> q;
  std::string rom_game = "game1";
  std::uint64_t runs = 10000;
};

inline GameSpec target_spec(const Options &o, bool random_default) {
  if (!o.target.empty()) return GameSpec(o.k, state_from_json(read_json_file(o.target)));
  if (!random_default) return GameSpec::epr(o.k);
  Rng rng = make_rng(o.seed, 0);
  return GameSpec(o.k, random_state(RegisterLayout::qubits({"R", "P"}), rng));
}

inline ojson cmd_value(const Options &o) {
  const GameSpec spec = target_spec(o, false);
  const GameValueReport r = game_value(spec);
  ojson j{{"k", o.k}, {"value", r.value}, {"operator_norm", r.operator_norm}, {"top_multiplicity", r.top_multiplicity}};
  if (o.target.empty()) {
    j["closed_form"] = epr_closed_form(o.k);
    j["matches_closed_form"] = std::abs(r.value - epr_closed_form(o.k)) <= o.tol;
  }
  return j;
}

inline ojson cmd_psi_value(const Options &o) {
  const GameSpec spec = target_spec(o, true);
  const GameValueReport r = game_value(spec);
  return {{"k", o.k},
          {"target_source", o.target.empty() ? "random" : "file"},
          {"value", r.value},
          {"operator_norm", r.operator_norm},
          {"top_multiplicity", r.top_multiplicity},
          {"target", state_report(spec.target())}};
}

inline ojson cmd_eval(const Options &o) {
  if (!o.strategy.empty()) {
    const auto [spec, s] = cloning_strategy_from_json(read_json_file(o.strategy));
    return {{"k", spec.k()}, {"source", "file"}, {"value", evaluate_strategy(spec, s)}};
  }
  const auto name = parse_named_state(o.state);
  if (!name) throw ContractError("eval needs --strategy PATH or --state ghz|w|guess|all_zero|optimal");
  const GameSpec spec = GameSpec::epr(o.k);
  return {{"k", o.k}, {"state", o.state}, {"value", evaluate_strategy(spec, trivial_strategy(named_state(*name, o.k)))}};
}

inline ojson cmd_optimal_state(const Options &o) {
  const StateVector psi = optimal_state(o.k);
  return {{"k", o.k},
          {"value", evaluate_strategy(GameSpec::epr(o.k), trivial_strategy(psi))},
          {"closed_form", epr_closed_form(o.k)},
          {"state", state_report(psi)}};
}

inline ojson overlap_record(const ParallelSpec &spec, BitString x, BitString xp) {
  const OverlapReport r = overlap_bound(spec, x, xp);
  ojson j{{"x", bits_to_string(x, spec.n())}, {"xp", bits_to_string(xp, spec.n())}, {"t", r.t},
          {"bound", r.bound}, {"role_bound", r.role_bound}};
  j["numeric"] = r.numeric ? ojson(*r.numeric) : ojson(nullptr);
  return j;
}

inline ojson cmd_parallel(const Options &o) {
  if (o.mode == "bounds") {
    ojson j{{"lower", std::pow(0.75, o.n)}, {"upper", analytic_upper_bound(o.n).closed_form}};
    if (o.seeds) {
      const SeesawConfig cfg{o.ancilla, o.ancilla, o.iters, o.tol, o.seed};
      const double best = seesaw_best(ParallelSpec(o.n), cfg, *o.seeds).best;
      return {{"n", o.n}, {"lower", j["lower"]}, {"upper", j["upper"]}, {"seesaw_best", best}, {"seeds", *o.seeds}, {"iters", o.iters}};
    }
    return j;
  }
  if (o.mode == "brute") {
    if (!o.strategy.empty()) {
      const auto [spec, s] = parallel_strategy_from_json(read_json_file(o.strategy));
      return {{"n", spec.n()}, {"source", "file"}, {"value", eval_parallel_strategy(spec, s)},
              {"upper", analytic_upper_bound(spec.n()).closed_form}};
    }
    const LowerBound lb = tensor_lower_bound(o.n);
    if (!lb.strategy) throw ResourceError("brute-force evaluation of the tensored strategy is limited to n <= 3");
    return {{"n", o.n}, {"source", "tensored-optimal"}, {"value", eval_parallel_strategy(ParallelSpec(o.n), *lb.strategy)},
            {"upper", analytic_upper_bound(o.n).closed_form}};
  }
  if (o.mode == "overlap") {
    if (!o.x.empty() || !o.xp.empty()) {
      if (o.x.size() != o.xp.size()) throw ContractError("--x and --xp must have the same length");
      const ParallelSpec spec(static_cast<int>(o.x.size()));
      return overlap_record(spec, bits_from_string(o.x), bits_from_string(o.xp));
    }
    const ParallelSpec spec(o.n);
    ojson recs = ojson::array();
    for (BitString x = 0; x < spec.num_questions(); ++x)
      for (BitString xp = 0; xp < spec.num_questions(); ++xp) recs.push_back(overlap_record(spec, x, xp));
    return {{"n", o.n}, {"records", recs}};
  }
  throw ContractError("--mode must be bounds, brute or overlap");
}

inline ojson cmd_seesaw(const Options &o) {
  const int seeds = o.seeds.value_or(1);
  if (seeds < 1) throw ContractError("--seeds must be at least 1");
  if (o.iters < 1) throw ContractError("--iters must be at least 1");
  ojson recs = ojson::array();
  double best = 0.0;
  std::optional<double> reference;
  if (o.game == "parallel") {
    const ParallelSpec spec(o.n);
    SeesawConfig cfg{o.ancilla, o.ancilla, o.iters, o.tol, o.seed};
    for (int s = 0; s < seeds; ++s) {
      const SeesawReport r = seesaw_optimize(spec, cfg, static_cast<std::uint64_t>(s));
      best = std::max(best, r.value);
      recs.push_back({{"seed_index", s}, {"value", r.value}, {"iterations", r.iterations}, {"converged", r.converged}});
    }
    reference = analytic_upper_bound(o.n).closed_form;
  } else if (o.game == "cloning" || o.game == "psi") {
    const GameSpec spec = target_spec(o, o.game == "psi");
    const std::vector<std::size_t> anc(static_cast<std::size_t>(o.k), o.ancilla);
    const SeesawProblem p = cloning_seesaw_problem(spec, anc);
    for (int s = 0; s < seeds; ++s) {
      Rng rng = make_rng(o.seed, static_cast<std::uint64_t>(s));
      const SeesawResult r = seesaw(p, o.iters, o.tol, rng);
      best = std::max(best, r.value);
      recs.push_back({{"seed_index", s}, {"value", r.value}, {"iterations", r.iterations}, {"converged", r.converged}});
    }
    reference = game_value(spec).value;
  } else {
    throw ContractError("--game must be cloning, psi or parallel");
  }
  ojson j{{"game", o.game}, {"best", best}, {"heuristic", true}};
  if (reference) j[o.game == "parallel" ? "upper" : "norm_value"] = *reference;
  j["records"] = recs;
  return j;
}

inline ojson cmd_qpv(const Options &o) {
  RoundConfig cfg{o.n, o.purified, o.seed};
  AttackModel attack;
  if (!o.strategy.empty()) {
    auto [n, a] = nope_attack_from_json(read_json_file(o.strategy));
    cfg.n = n;
    attack = AttackModel::with(std::move(a));
  } else if (o.attack == "none") {
    attack = AttackModel::honest();
  } else if (o.attack == "nope_optimal") {
    attack = nope_attack_strategy();
  } else {
    throw ContractError("--attack must be none or nope_optimal (or pass --strategy PATH)");
  }
  std::ofstream tfile;
  if (!o.transcript.empty()) {
    tfile.open(o.transcript);
    if (!tfile) throw ContractError("cannot write transcript '" + o.transcript + "'");
  }
  const SimulationReport r = simulate(cfg, attack, o.rounds, o.transcript.empty() ? nullptr : &tfile);
  ojson j{{"config", {{"n", cfg.n}, {"purified", cfg.purified}, {"seed", cfg.seed}}},
          {"attack", r.attack},
          {"rounds", r.rounds},
          {"accepted", r.accepted},
          {"accept_rate", r.rate},
          {"std_error", r.std_error},
          {"ci95", {r.ci95.low, r.ci95.high}}};
  j["exact"] = r.exact ? ojson(*r.exact) : ojson(nullptr);
  return j;
}

inline ojson cmd_rom(const Options &o) {
  auto adv = make_adversary(o.adversary);
  const std::uint64_t declared = adv->declared_queries();
  const bool unbounded = declared == std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t q_max = o.q ? *o.q : (unbounded ? 0 : declared);
  const HRoutingConfig cfg{o.ell, o.n, q_max, o.seed};
  const Epsilon eps = soundness_epsilon(static_cast<double>(unbounded ? q_max : declared), o.ell, o.n);
  ojson base{{"adversary", adv->name()}, {"ell", o.ell}, {"n", o.n}, {"q_max", q_max},
             {"epsilon", eps.value}, {"vacuous", eps.vacuous}, {"reprogram_bound", reprogram_distinguisher_bound(static_cast<double>(q_max), o.ell)}};
  auto record = [&](GameMode m) {
    const GameStats st = run_game(cfg, *adv, m, o.runs);
    return ojson{{"game", m == GameMode::game1 ? "game1" : "game3"},
                 {"runs", st.runs},
                 {"accepted", st.accepted},
                 {"rate", st.rate},
                 {"std_error", st.std_error},
                 {"budget_flags", st.budget_flags},
                 {"max_queries", st.max_queries}};
  };
  if (o.rom_game == "game1" || o.rom_game == "game3") {
    ojson r = record(o.rom_game == "game1" ? GameMode::game1 : GameMode::game3);
    for (const auto &[k, v] : r.items()) base[k] = v;
    return base;
  }
  if (o.rom_game == "both") {
    base["records"] = ojson::array({record(GameMode::game1), record(GameMode::game3)});
    return base;
  }
  if (o.rom_game == "game4") {
    const Game4Check c = game4_check(cfg, *adv, o.runs);
    base["game"] = "game4";
    base["runs"] = c.runs;
    base["mean"] = c.mean;
    base["std_error"] = c.std_error;
    base["bound"] = c.bound;
    base["within"] = c.within;
    return base;
  }
  throw ContractError("--game must be game1, game3, both or game4");
}

inline ojson cmd_epsilon(const Options &o) {
  const Epsilon e = soundness_epsilon(static_cast<double>(o.q.value_or(0)), o.ell, o.n);
  return {{"epsilon", e.value}, {"vacuous", e.vacuous}};
}

inline void print_error(std::ostream &out, const char *kind, const std::string &msg) {
  out << ojson{{"error", {{"kind", kind}, {"message", msg}}}}.dump() << '\n';
}

/// Runs one command line (without the program name).
inline int run(std::vector<std::string> args, std::ostream &out) {
  Options o;
  CLI::App app{"Cloning games, parallel repetition and routing position verification"};
  app.name("clonegame");
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--seed", o.seed, "RNG seed")->capture_default_str();
  app.add_option("--out", o.out, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--tol", o.tol, "tolerance")->capture_default_str();
  app.add_option("--strategy", o.strategy, "strategy or attack JSON file");

  auto *value = app.add_subcommand("value", "optimal value of the k-party cloning game");
  value->add_option("--k", o.k)->required()->check(CLI::PositiveNumber);
  value->add_option("--target", o.target, "target state JSON on two registers");

  auto *psi = app.add_subcommand("psi-value", "value for an arbitrary target state (seeded random if none given)");
  psi->add_option("--k", o.k)->check(CLI::PositiveNumber);
  psi->add_option("--target", o.target);

  auto *eval = app.add_subcommand("eval", "evaluate a strategy");
  eval->add_option("--k", o.k)->check(CLI::PositiveNumber);
  eval->add_option("--state", o.state, "ghz, w, guess, all_zero or optimal");

  auto *opt = app.add_subcommand("optimal-state", "the optimal shared state and its value");
  opt->add_option("--k", o.k)->required()->check(CLI::PositiveNumber);

  auto *par = app.add_subcommand("parallel", "n-fold parallel repetition");
  par->add_option("--n", o.n)->required()->check(CLI::PositiveNumber);
  par->add_option("--mode", o.mode)->check(CLI::IsMember({"bounds", "brute", "overlap"}));
  par->add_option("--x", o.x);
  par->add_option("--xp", o.xp);
  par->add_option("--seeds", o.seeds, "bounds mode: also run this many see-saw seeds");
  par->add_option("--iters", o.iters);
  par->add_option("--ancilla", o.ancilla)->check(CLI::PositiveNumber);

  auto *ss = app.add_subcommand("seesaw", "see-saw lower bound (heuristic)");
  ss->add_option("--game", o.game)->check(CLI::IsMember({"cloning", "psi", "parallel"}));
  ss->add_option("--k", o.k)->check(CLI::PositiveNumber);
  ss->add_option("--n", o.n)->check(CLI::PositiveNumber);
  ss->add_option("--target", o.target);
  ss->add_option("--seeds", o.seeds);
  ss->add_option("--iters", o.iters);
  ss->add_option("--ancilla", o.ancilla)->check(CLI::PositiveNumber);

  auto *qpv = app.add_subcommand("qpv", "simulate routing position verification");
  qpv->add_option("--n", o.n)->check(CLI::PositiveNumber);
  qpv->add_option("--attack", o.attack, "none or nope_optimal");
  qpv->add_option("--rounds", o.rounds)->check(CLI::PositiveNumber);
  qpv->add_flag("--purified", o.purified);
  qpv->add_option("--transcript", o.transcript, "write the per-round CSV here");

  auto *rom = app.add_subcommand("rom", "hash-derived routing games against a built-in adversary");
  rom->add_option("--adversary", o.adversary)->check(CLI::IsMember(builtin_adversaries()));
  rom->add_option("--ell", o.ell);
  rom->add_option("--n", o.n)->check(CLI::PositiveNumber);
  rom->add_option("--q", o.q, "query budget");
  rom->add_option("--game", o.rom_game)->check(CLI::IsMember({"game1", "game3", "both", "game4"}));
  rom->add_option("--runs", o.runs)->check(CLI::PositiveNumber);

  auto *eps = app.add_subcommand("epsilon", "soundness bound for q queries");
  eps->add_option("--q", o.q)->required();
  eps->add_option("--ell", o.ell)->required();
  eps->add_option("--n", o.n)->required();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp &) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError &e) {
    print_error(out, "usage", e.what());
    return kExitContract;
  }

  try {
    ojson report;
    if (value->parsed()) report = cmd_value(o);
    else if (psi->parsed()) report = cmd_psi_value(o);
    else if (eval->parsed()) report = cmd_eval(o);
    else if (opt->parsed()) report = cmd_optimal_state(o);
    else if (par->parsed()) report = cmd_parallel(o);
    else if (ss->parsed()) report = cmd_seesaw(o);
    else if (qpv->parsed()) report = cmd_qpv(o);
    else if (rom->parsed()) report = cmd_rom(o);
    else report = cmd_epsilon(o);
    round_all(report);
    if (o.out == "csv") out << to_csv(report);
    else out << report.dump() << '\n';
    return kExitOk;
  } catch (const ResourceError &e) {
    print_error(out, e.kind(), e.what());
    return kExitResource;
  } catch (const Error &e) {
    print_error(out, e.kind(), e.what());
    return kExitContract;
  } catch (const json::exception &e) {
    print_error(out, "contract", e.what());
    return kExitContract;
  }
}

inline int run(int argc, const char *const *argv, std::ostream &out) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(std::move(args), out);
}

}  // namespace clonegame::cli
