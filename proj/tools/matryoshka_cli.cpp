// matryoshka: command-line front end for the spin-chain simulator.
//
//   matryoshka generate    --n 7
//   matryoshka verify      --config chain.cfg
//   matryoshka flux-check  --n 5
//   matryoshka conveyor    --n 7 --rounds 4
//   matryoshka ghz         --n 5
//   matryoshka sweep       --n 3 --grid 21 --b3 0,0.05,0.1
//   matryoshka paper-point
//
// Exit codes: 0 success, 2 validation/parse error, 3 numerical contract
// violation (non-convergence, impure pair, state is not a matryoshka).

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "matryoshka.hpp"
#include "matryoshka/io.hpp"

namespace fs = std::filesystem;
using namespace matryoshka;
using nlohmann::json;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

// Raw flag values; unset flags fall back to the config file, then defaults.
struct Flags {
  std::string config;
  std::optional<int> n;
  std::optional<double> lambda;
  std::optional<std::string> pattern;
  std::optional<std::string> b;
  std::optional<double> t_star;
  std::optional<int> rounds;
  std::optional<int> grid;
  std::optional<std::string> b3;
  std::optional<std::string> initial;
  std::optional<double> scale;
  bool force = false;
  std::string out = ".";
};

struct RunConfig {
  std::string command;
  ChainSpec chain;
  double t_star = 0.0;
  int rounds = 4;
  int grid = 21;
  std::vector<double> b3 = {0.0, 0.05, 0.1};
  InitialState initial = InitialState::All0;
  double scale = 1.0;
  bool force = false;
  std::string out;
};

constexpr const char* kRunKeys[] = {"t_star", "rounds", "grid", "b3", "initial", "force", "scale"};

bool is_run_key(const std::string& key) {
  for (const char* k : kRunKeys)
    if (key == k) return true;
  return false;
}

InitialState parse_initial(const std::string& s) {
  if (s == "all0") return InitialState::All0;
  if (s == "all1") return InitialState::All1;
  throw ValidationError("initial must be all0 or all1, got '" + s + "'");
}

bool parse_bool(const std::string& s, const std::string& key) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ValidationError("key '" + key + "': expected true or false");
}

RunConfig resolve(const std::string& command, const Flags& f) {
  KeyValues kv;
  if (!f.config.empty()) kv = read_key_value_file(f.config);
  for (const auto& [key, value] : kv)
    if (!is_chain_key(key) && !is_run_key(key)) throw ValidationError("unknown config key '" + key + "'");

  if (f.n) kv["n_sites"] = std::to_string(*f.n);
  if (f.lambda) kv["lambda"] = format_double(*f.lambda);
  if (f.pattern) kv["pattern"] = *f.pattern;
  if (f.b) kv["b_fields"] = *f.b;
  if (!kv.count("n_sites")) kv["n_sites"] = command == "sweep" ? "3" : "7";

  KeyValues chain_kv;
  for (const auto& [key, value] : kv)
    if (is_chain_key(key)) chain_kv.emplace(key, value);

  RunConfig rc;
  rc.command = command;
  rc.chain = chain_spec_from_keys(chain_kv);
  rc.t_star = t_star(rc.chain.lambda);
  if (auto it = kv.find("t_star"); it != kv.end()) rc.t_star = parse_double(it->second, "t_star");
  if (auto it = kv.find("rounds"); it != kv.end()) rc.rounds = parse_int(it->second, "rounds");
  if (auto it = kv.find("grid"); it != kv.end()) rc.grid = parse_int(it->second, "grid");
  if (auto it = kv.find("b3"); it != kv.end()) rc.b3 = parse_double_list(it->second, "b3");
  if (auto it = kv.find("initial"); it != kv.end()) rc.initial = parse_initial(it->second);
  if (auto it = kv.find("force"); it != kv.end()) rc.force = parse_bool(it->second, "force");
  if (auto it = kv.find("scale"); it != kv.end()) rc.scale = parse_double(it->second, "scale");
  if (f.t_star) rc.t_star = *f.t_star;
  if (f.rounds) rc.rounds = *f.rounds;
  if (f.grid) rc.grid = *f.grid;
  if (f.b3) rc.b3 = parse_double_list(*f.b3, "b3");
  if (f.initial) rc.initial = parse_initial(*f.initial);
  if (f.scale) rc.scale = *f.scale;
  rc.force = rc.force || f.force;
  rc.out = f.out;

  if (!std::isfinite(rc.t_star) || rc.t_star < 0.0) throw ValidationError("t_star must be finite and >= 0");
  if (rc.rounds < 1) throw ValidationError("rounds must be >= 1");
  if (rc.grid < 2) throw ValidationError("grid must be >= 2");
  if (rc.b3.empty()) throw ValidationError("b3 needs at least one ratio");
  if (!std::isfinite(rc.scale)) throw ValidationError("scale must be finite");
  return rc;
}

json config_json(const RunConfig& rc) {
  json j = {{"command", rc.command}, {"chain", to_json(rc.chain)}, {"t_star", rc.t_star}};
  if (rc.command == "generate" || rc.command == "verify")
    j["initial"] = rc.initial == InitialState::All0 ? "all0" : "all1";
  if (rc.command == "conveyor") {
    j["rounds"] = rc.rounds;
    j["force"] = rc.force;
  }
  if (rc.command == "sweep") {
    j["grid"] = rc.grid;
    j["b3"] = rc.b3;
  }
  return j;
}

std::string config_line(const RunConfig& rc) {
  std::string s = "n_sites=" + std::to_string(rc.chain.n_sites) + " lambda=" + format_double(rc.chain.lambda) +
                  " pattern=" + pattern_name(rc.chain.pattern) + " b_fields=" + format_double_list(rc.chain.fields_b) +
                  " t_star=" + format_double(rc.t_star);
  if (rc.command == "sweep") s += " grid=" + std::to_string(rc.grid) + " b3=" + format_double_list(rc.b3);
  return s;
}

fs::path output_file(const RunConfig& rc, const std::string& name) {
  fs::create_directories(rc.out);
  return fs::path(rc.out) / name;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

StateVector evolved_state(const RunConfig& rc) {
  return Propagator(build_hamiltonian(rc.chain)).evolve(initial_state(rc.chain.n_sites, rc.initial), rc.t_star);
}

int cmd_generate(const RunConfig& rc) {
  const StateVector v = evolved_state(rc).phase_normalized();
  const auto schedule = bell_schedule(rc.chain.n_sites, rc.initial);
  const auto report = verify_matryoshka(v, schedule);
  const auto path = output_file(rc, "generate.json");
  write_json(path, {{"config", config_json(rc)},
                    {"schedule", to_json(schedule)},
                    {"state", to_json(v)},
                    {"verification", to_json(report)}});
  std::printf("global fidelity %.12g, min concurrence %.12g -> %s\n", report.global_fidelity,
              report.min_concurrence(), path.c_str());
  return 0;
}

int cmd_verify(const RunConfig& rc) {
  const StateVector v = evolved_state(rc);
  const auto schedule = bell_schedule(rc.chain.n_sites, rc.initial);
  const auto report = verify_matryoshka(v, schedule);
  const bool ok = report.is_matryoshka();
  const auto path = output_file(rc, "verify.json");
  write_json(path, {{"config", config_json(rc)}, {"is_matryoshka", ok}, {"verification", to_json(report)}});
  std::printf("%s (min concurrence %.12g, global fidelity %.12g)\n", ok ? "matryoshka" : "not a matryoshka",
              report.min_concurrence(), report.global_fidelity);
  return ok ? 0 : kExitNumerical;
}

int cmd_flux_check(const RunConfig& rc) {
  if (rc.chain.pattern != CouplingPattern::MatryoshkaAlternating)
    throw ValidationError("flux-check needs the matryoshka coupling pattern");
  for (double b : rc.chain.fields_b)
    if (b != 0.0) throw ValidationError("flux-check is defined for zero fields");
  const auto matches = flux_check(rc.chain.n_sites, rc.chain.lambda, rc.t_star);
  const auto path = output_file(rc, "flux_check.json");
  write_json(path, {{"config", config_json(rc)}, {"matches", to_json(matches)}});
  for (const auto& m : matches)
    std::printf("shell %d %s -> %s (residual %.3g)\n", m.shell, pair_operator_name(m.kind),
                m.is_match ? m.matched.str().c_str() : "no single Z-string", m.residual);
  return 0;
}

int cmd_conveyor(const RunConfig& rc) {
  ProtocolOptions opts;
  opts.evolution_time = rc.t_star;
  opts.extract.force = rc.force;
  const auto records = conveyor_run(rc.chain, rc.rounds, opts);
  const auto path = output_file(rc, "conveyor.json");
  write_json(path, {{"config", config_json(rc)}, {"records", to_json(records)}});
  for (const auto& r : records)
    std::printf("round %d: %s concurrence %.12g, chain %s\n", r.round, bell_name(r.extracted_label),
                r.extraction_concurrence, chain_class_name(r.post_extraction_chain_class));
  return 0;
}

int cmd_ghz(const RunConfig& rc) {
  ProtocolOptions opts;
  opts.evolution_time = rc.t_star;
  const auto g = ghz_protocol(rc.chain, opts);
  const auto path = output_file(rc, "ghz.json");
  write_json(path, {{"config", config_json(rc)}, {"ghz", to_json(g)}});
  std::printf("GHZ fidelity %.12g, phase %.12g\n", g.fidelity, g.relative_phase);
  return 0;
}

int workers_from_env() {
  const char* env = std::getenv("MATRYOSHKA_WORKERS");
  if (!env || !*env) return 1;
  const int w = parse_int(env, "MATRYOSHKA_WORKERS");
  if (w < 1) throw ValidationError("MATRYOSHKA_WORKERS must be >= 1");
  return w;
}

int cmd_sweep(const RunConfig& rc) {
  SweepOptions opts;
  opts.workers = workers_from_env();
  opts.evolution_time = rc.t_star;
  const auto results = field_sweep(rc.chain, rc.grid, rc.b3, opts);
  const std::string comment = config_line(rc);
  for (const auto& r : results) {
    const auto path = output_file(rc, "sweep_b3_" + format_double(r.b3_ratio) + ".csv");
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    write_sweep_csv(out, r, comment);
    std::printf("b3 %s: min F %.12g, mean F %.12g -> %s\n", format_double(r.b3_ratio).c_str(), r.min_fidelity,
                r.mean_fidelity, path.c_str());
  }
  write_json(output_file(rc, "sweep_summary.json"), {{"config", config_json(rc)}, {"summary", sweep_summary_json(results)}});
  return 0;
}

int cmd_paper_point(const RunConfig& rc) {
  std::printf("F = %.12g\n", paper_point_check(rc.scale));
  return 0;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "key = value config file; flags override it")->check(CLI::ExistingFile);
  sub->add_option("--n", f.n, "number of sites");
  sub->add_option("--lambda", f.lambda, "coupling scale");
  sub->add_option("--pattern", f.pattern, "perfect_transfer | matryoshka | custom");
  sub->add_option("--b", f.b, "comma-separated local fields B_1..B_N");
  sub->add_option("--t-star", f.t_star, "evolution time override");
  sub->add_option("--out", f.out, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact simulator for engineered XY spin chains"};
  app.require_subcommand(1);
  Flags f;

  auto* generate = app.add_subcommand("generate", "evolve to t* and write state plus verification report");
  auto* verify = app.add_subcommand("verify", "check the evolved state against the Bell schedule");
  for (auto* sub : {generate, verify}) {
    add_common(sub, f);
    sub->add_option("--initial", f.initial, "all0 | all1");
  }
  auto* flux = app.add_subcommand("flux-check", "match Heisenberg-evolved pair operators to Z-strings");
  add_common(flux, f);
  auto* conveyor = app.add_subcommand("conveyor", "iterate evolve and boundary-pair extraction");
  add_common(conveyor, f);
  conveyor->add_option("--rounds", f.rounds, "number of rounds");
  conveyor->add_flag("--force", f.force, "extract even when the boundary pair is not pure");
  auto* ghz = app.add_subcommand("ghz", "evolve, Hadamard on the centre, evolve");
  add_common(ghz, f);
  auto* sweep = app.add_subcommand("sweep", "fidelity surfaces over B1/J, B2/J for each B3/J");
  add_common(sweep, f);
  sweep->add_option("--grid", f.grid, "grid points per axis");
  sweep->add_option("--b3", f.b3, "comma-separated B3/J ratios");
  auto* device = app.add_subcommand("paper-point", "fidelity at the reported device fields");
  device->add_option("--scale", f.scale, "multiply the device fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const RunConfig rc = resolve(command, f);
    if (command == "generate") return cmd_generate(rc);
    if (command == "verify") return cmd_verify(rc);
    if (command == "flux-check") return cmd_flux_check(rc);
    if (command == "conveyor") return cmd_conveyor(rc);
    if (command == "ghz") return cmd_ghz(rc);
    if (command == "sweep") return cmd_sweep(rc);
    return cmd_paper_point(rc);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "matryoshka %s: invalid input: %s\n", command.c_str(), e.what());
    return kExitValidation;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "matryoshka %s: numerical error: %s\n", command.c_str(), e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "matryoshka %s: %s\n", command.c_str(), e.what());
    return 1;
  }
}
