// enlarge: batch front-end.
//
//   enlarge analyze  --market FILE --mode {progressive|initial} --out FILE
//   enlarge na1      --market FILE --filtration {F|G} --assets LIST [--stop tau] --out FILE
//   enlarge simulate --example ID --lambda R --T R --paths N --seed N --out FILE
//   enlarge selftest --scale {quick|full} [--tamper]
//
// Exit codes: 0 success / NA1 holds; 1 NA1 fails, gate failure or failing
// identity; 2 input error.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "enlarge/checks.hpp"
#include "enlarge/ctime_sim.hpp"
#include "enlarge/initial.hpp"
#include "enlarge/market_spec.hpp"
#include "enlarge/na1.hpp"
#include "enlarge/progressive.hpp"
#include "enlarge/report.hpp"
#include "enlarge/testing/na1_oracle.hpp"
#include "enlarge/testing/random.hpp"

namespace {

using namespace enlarge;

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kInput = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_analyze(const std::string& market, const std::string& mode, const std::string& out) {
  const std::string text = read_file(market);
  const Model m = build(parse_market_spec(text));
  const AnalysisReport rep = mode == "progressive" ? progressive_report(m, text) : initial_report(m, text);
  write_atomic(out, rep.json.dump(2) + "\n");
  if (!rep.identities_pass) {
    for (const auto& row : rep.json["identities"])
      if (!row["pass"].get<bool>())
        std::cerr << "identity failed: " << row["name"].get<std::string>() << " (" << row["lhs"].get<std::string>()
                  << " vs " << row["rhs"].get<std::string>() << ")\n";
    return kFail;
  }
  return kOk;
}

std::vector<std::string> split_list(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  for (std::string item; std::getline(ss, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

/// Spec assets plus the derived S_arb (needs tau), S_J and S_x_<label> (need a signal).
std::vector<Asset> resolve_assets(const Model& m, const std::vector<std::string>& names) {
  std::optional<EtaData> eta;
  std::optional<EtaFamily> fam;
  std::vector<Asset> out;
  for (const auto& name : names) {
    if (const Asset* a = find_asset(m.assets, name)) {
      out.push_back(*a);
      continue;
    }
    if (name == "S_arb" && m.tau) {
      if (!eta) eta = eta_analysis(azema(m.space, *m.tau), m.space);
      out.push_back({name, eta->arbitrage_asset});
      continue;
    }
    if (m.signal && (name == "S_J" || name.rfind("S_x_", 0) == 0)) {
      if (!fam) fam = eta_family(density_system(m.space, *m.signal), m.space, m.signal->label_of);
      if (name == "S_J") {
        out.push_back({name, fam->composed});
        continue;
      }
      const std::string label = name.substr(4);
      bool found = false;
      for (std::size_t x = 0; x < m.signal->labels.size() && !found; ++x)
        if (m.signal->labels[x] == label) {
          out.push_back({name, fam->per_label[x].asset});
          found = true;
        }
      if (found) continue;
    }
    throw InputError("unknown asset \"" + name + "\"");
  }
  return out;
}

int cmd_na1(const std::string& market, const std::string& filtration, const std::string& list,
            const std::string& stop, const std::string& out) {
  const std::string text = read_file(market);
  const Model m = build(parse_market_spec(text));
  const std::vector<Asset> assets = resolve_assets(m, split_list(list));
  if (assets.empty()) throw InputError("no assets given");
  FinSpace space = m.space;
  if (filtration == "G") {
    if (m.tau)
      space = progressive_filtration(m.space, *m.tau);
    else if (m.signal)
      space = initial_filtration(m.space, *m.signal);
    else
      throw InputError("filtration G needs a tau or signal block");
  }
  std::optional<StoppingMap> stop_at;
  if (!stop.empty()) {
    if (stop != "tau") throw InputError("--stop accepts only \"tau\"");
    if (!m.tau) throw InputError("--stop tau needs a tau block");
    if (!is_stopping_time(*m.tau, space))
      throw InputError("tau is not a stopping time of filtration " + filtration);
    stop_at = *m.tau;
  }
  const Na1Verdict v = check_na1(space, assets, stop_at);
  Json j = report_header(text, "na1");
  j["filtration"] = filtration;
  Json names = Json::array();
  for (const auto& a : assets) names.push_back(a.name);
  j["assets"] = std::move(names);
  if (stop_at) j["stop"] = "tau";
  j["verdict"] = to_json(v, space);
  write_atomic(out, j.dump(2) + "\n");
  return v.holds ? kOk : kFail;
}

std::string csv_path(const std::string& out) {
  std::filesystem::path p(out);
  p.replace_extension(".csv");
  if (p.string() == out) p += ".csv";
  return p.string();
}

int cmd_simulate(sim::SimConfig cfg, const std::string& out) {
  if (const char* env = std::getenv("ENLARGE_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw InputError(std::string("ENLARGE_SEED is not an unsigned integer: ") + env);
    }
  }
  const sim::MCReport rep = sim::simulate(cfg);
  write_atomic(out, rep.to_json());
  write_atomic(csv_path(out), rep.to_csv());
  for (const auto& r : rep.rows)
    if (!r.within()) std::cerr << "statistic outside 3 SE: " << r.statistic << " z=" << r.z << "\n";
  for (const auto& g : rep.gates)
    if (!g.pass()) std::cerr << "gate failed: " << g.name << " " << g.count << "/" << g.total << "\n";
  return rep.passed() ? kOk : kFail;
}

// ---------------------------------------------------------------- selftest

struct SuiteTally {
  std::size_t runs = 0;
  std::size_t failures = 0;
  std::map<std::string, std::size_t> failed_rows;
};

void tally(SuiteTally& s, const std::vector<IdentityRow>& rows) {
  ++s.runs;
  bool ok = true;
  for (const auto& r : rows)
    if (!r.pass) {
      ok = false;
      ++s.failed_rows[r.name];
    }
  s.failures += ok ? 0 : 1;
}

/// K_t = K_{t-1} + dA_t, i.e. the recursion with the division by L dropped.
OptionalPair tampered_decomposition(const AzemaBundle& b) {
  OptionalPair p = optional_decomposition(b);
  std::vector<std::vector<Rational>> k = p.k.values();
  for (Time t = 0; t < k.size(); ++t)
    for (std::size_t a = 0; a < k[t].size(); ++a)
      k[t][a] = (t == 0 ? Rational(0) : k[t - 1][a]) + b.jump_a.at(t, a);
  p.k = ProcessPath(p.k.tag(), std::move(k));
  return p;
}

void print_coverage() {
  struct Entry {
    const char* result;
    const char* suites;
  };
  static const Entry map[] = {
      {"Azema supermartingale, dual optional projection, mu = A + Z martingale",
       "progressive identities; test_progressive; acceptance 1"},
      {"optional multiplicative decomposition Z = L(1 - K), L dK = dA",
       "progressive identities; test_progressive; acceptance 1"},
      {"representation E[V_tau] = E[sum V L dK] and conditional tail formula at stopping levels",
       "progressive identities; test_progressive; acceptance 1"},
      {"eta, Lambda, compensator D, dD < 1, S_arb martingale", "progressive identities; acceptance 2"},
      {"NA1 fails in G for S_arb^tau whenever P[eta < oo] > 0", "test_progressive; test_na1; acceptance 3"},
      {"deflator lift to G under dS_eta = 0; guard otherwise", "test_progressive; acceptance 4"},
      {"1/L^tau martingale and all-lifts equivalences (progressive and initial)",
       "progressive and initial identities; acceptance 5"},
      {"eta and eta^x invariant under equivalent measures", "test_progressive; test_initial; acceptance 6"},
      {"density system, exp-init identity, eta^x family, S^J, eta_B", "initial identities; test_initial; acceptance 7"},
      {"NA1 kernel (Stiemke alternative, Bland simplex) vs exhaustive oracle",
       "selftest full; test_na1; acceptance 8"},
      {"exponential random time example", "test_ctime_sim; acceptance 9"},
      {"accessible eta example (integer-valued zeta)", "test_ctime_sim"},
      {"Poisson insider example", "test_ctime_sim; acceptance 10"},
  };
  std::cout << "coverage:\n";
  for (const auto& e : map) std::cout << "  " << e.result << "\n      -> " << e.suites << "\n";
}

int cmd_selftest(const std::string& scale, bool tamper) {
  const bool full = scale == "full";
  const std::size_t spaces = full ? 1000 : 200;
  const std::size_t max_atoms = full ? 64 : 16;
  const Time max_horizon = full ? 8 : 4;
  const auto start = std::chrono::steady_clock::now();
  testkit::Rng rng(full ? 1001 : 1000);
  const Decomposition decompose =
      tamper ? Decomposition(tampered_decomposition) : Decomposition([](const AzemaBundle& b) {
        return optional_decomposition(b);
      });
  SuiteTally prog, init, oracle;
  for (std::size_t i = 0; i < spaces; ++i) {
    FinSpace space = testkit::random_space(rng, max_atoms, max_horizon, 2, 1);
    const StoppingMap tau = testkit::random_tau(rng, space);
    space = testkit::with_ambient_keys<Time>(space, tau.values());
    tally(prog, progressive_identities(space, tau, decompose));
    const Signal sig = testkit::random_signal(rng, space);
    const FinSpace with_j = testkit::with_ambient_keys<std::size_t>(space, sig.label_of);
    tally(init, initial_identities(with_j, sig));
  }
  if (full) {
    for (std::size_t i = 0; i < 1000; ++i) {
      const FinSpace space = testkit::random_space(rng, 6, 3, 1, 1);
      std::vector<Asset> assets;
      std::vector<ProcessPath> paths;
      const std::size_t d = testkit::uniform(rng, 1, 3);
      for (std::size_t k = 0; k < d; ++k) {
        ProcessPath p = testkit::random_adapted(rng, space, -2, 2);
        assets.push_back({"S" + std::to_string(k), p});
        paths.push_back(std::move(p));
      }
      ++oracle.runs;
      if (check_na1(space, assets).holds != testkit::brute_force_na1(space, paths).holds) {
        ++oracle.failures;
        ++oracle.failed_rows["kernel verdict = oracle verdict"];
      }
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  auto print = [](const char* name, const SuiteTally& s) {
    std::cout << (s.failures == 0 ? "PASS " : "FAIL ") << name << ": " << s.runs - s.failures << "/" << s.runs
              << " clean\n";
    for (const auto& [row, count] : s.failed_rows) std::cout << "    failed " << count << "x: " << row << "\n";
  };
  std::cout << "selftest scale=" << scale << (tamper ? " (tampered recursion)" : "") << "\n";
  print("progressive identities", prog);
  print("initial identities", init);
  if (full) print("NA1 kernel vs brute-force oracle", oracle);
  std::cout << "elapsed " << secs << " s\n";
  print_coverage();
  return prog.failures + init.failures + oracle.failures == 0 ? kOk : kFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Filtration enlargement and NA1 engine"};
  app.require_subcommand(1);

  std::string market, mode, out, filtration, assets, stop, scale = "quick";
  bool tamper = false;
  sim::SimConfig cfg;

  auto* analyze = app.add_subcommand("analyze", "full report for a market spec");
  analyze->add_option("--market", market)->required()->check(CLI::ExistingFile);
  analyze->add_option("--mode", mode)->required()->check(CLI::IsMember({"progressive", "initial"}));
  analyze->add_option("--out", out)->required();

  auto* na1 = app.add_subcommand("na1", "NA1 verdict for a list of assets");
  na1->add_option("--market", market)->required()->check(CLI::ExistingFile);
  na1->add_option("--filtration", filtration)->required()->check(CLI::IsMember({"F", "G"}));
  na1->add_option("--assets", assets, "comma-separated; S_arb, S_J and S_x_<label> are derived")->required();
  na1->add_option("--stop", stop, "stop the assets at tau")->check(CLI::IsMember({"tau"}));
  na1->add_option("--out", out)->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo check of a continuous-time example");
  simulate->add_option("--example", cfg.example)
      ->required()
      ->check(CLI::IsMember({"exp_time", "discrete_time", "poisson_insider"}));
  simulate->add_option("--lambda", cfg.lambda);
  simulate->add_option("--T", cfg.horizon);
  simulate->add_option("--paths", cfg.paths);
  simulate->add_option("--seed", cfg.seed, "overridden by ENLARGE_SEED");
  simulate->add_option("--out", out)->required();

  auto* selftest = app.add_subcommand("selftest", "randomized identity suites");
  selftest->add_option("--scale", scale)->check(CLI::IsMember({"quick", "full"}));
  selftest->add_flag("--tamper", tamper, "run with a mutated K recursion (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInput;
  }

  try {
    if (*analyze) return cmd_analyze(market, mode, out);
    if (*na1) return cmd_na1(market, filtration, assets, stop, out);
    if (*simulate) return cmd_simulate(cfg, out);
    return cmd_selftest(scale, tamper);
  } catch (const HypothesisError& e) {
    std::cerr << "hypothesis violated: " << e.what() << " (t=" << e.witness().time;
    if (e.witness().label) std::cerr << ", label " << *e.witness().label;
    std::cerr << ")\n";
    return kInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInput;
  }
}
