#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "vapep/brute_solver.hpp"
#include "vapep/generator.hpp"
#include "vapep/json_io.hpp"
#include "vapep/mipgen.hpp"
#include "vapep/profile_solver.hpp"
#include "vapep/resiliency.hpp"
#include "vapep/wsp.hpp"

namespace apep {

namespace {

using namespace vapep;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

/// Level from APEP_LOG (error, warn, info, debug); warn by default.
class Log {
 public:
  explicit Log(std::ostream& err) : err_(err) {
    const char* env = std::getenv("APEP_LOG");
    const std::string v = env ? env : "";
    if (v == "error") level_ = Level::error;
    if (v == "info") level_ = Level::info;
    if (v == "debug") level_ = Level::debug;
  }

  void operator()(Level at, const std::string& msg) const {
    static const char* names[] = {"error", "warn", "info", "debug"};
    if (at <= level_) err_ << "[" << names[static_cast<int>(at)] << "] " << msg << "\n";
  }

 private:
  std::ostream& err_;
  Level level_ = Level::warn;
};

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DomainError("cannot write '" + path + "'");
  f << text;
}

// ---------------------------------------------------------------------------
// solve

struct SolveArgs {
  std::string in;
  std::string solver = "profile";
  std::optional<std::size_t> ell;
  unsigned threads = 1;
  std::string out;
  bool stats = false;
};

bool only_sodu_bodu(const Instance& inst) {
  return std::all_of(inst.constraints().begin(), inst.constraints().end(), [](const WeightedConstraint& c) {
    return std::holds_alternative<SodU>(c) || std::holds_alternative<BodU>(c);
  });
}

SolveResult solve_with(const Instance& inst, const std::string& solver, std::optional<std::size_t> ell,
                       unsigned threads, const Log& log) {
  if (solver == "brute") return solve_exhaustive(inst);
  if (solver == "wsp") {
    const bool universal = only_sodu_bodu(inst);
    const WspReduction red = universal ? reduce_sodu_bodu(inst) : reduce_bode_sodu(inst);
    log(Level::info, std::string("wsp: ") + (universal ? "SoD_U/BoD_U" : "BoD_E/SoD_U") + " reduction, " +
                         std::to_string(red.wsp.step_count()) + " steps");
    const WspSolution sol = solve_wsp(red.wsp);
    SolveMeta meta;
    meta.solver = "wsp";
    meta.user_cap = inst.n();
    meta.profiles_enumerated = sol.partitions;
    meta.matchings = sol.matchings;
    return SolveResult(inst, lift_plan(red, sol.plan), std::move(meta));
  }
  if (solver != "profile") throw UsageError("unknown solver '" + solver + "'");
  ProfileSolveOptions opt;
  opt.user_cap = ell;
  opt.threads = threads;
  log(Level::info, "profile: user cap " + std::to_string(effective_user_cap(inst, opt)));
  return solve_profile(inst, opt);
}

int command_solve(const SolveArgs& a, std::ostream& out, const Log& log) {
  const Instance inst = instance_from_json(read_json_file(a.in));
  const SolveResult r = solve_with(inst, a.solver, a.ell, a.threads, log);
  log(Level::info, "solved in " + std::to_string(r.meta().wall_ms) + " ms, " +
                       std::to_string(r.meta().profiles_enumerated) + " profiles");
  write_text(a.out, dump_json(solve_result_to_json(inst, r, a.stats)), out);
  return 0;
}

// ---------------------------------------------------------------------------
// generate

struct GenerateArgs {
  std::optional<int> n;
  std::optional<int> k;
  std::optional<int> tau;
  std::string alpha = "1";
  std::optional<int> q_sod;
  std::uint64_t seed = 0;
  std::string out;
  std::string wsp_out;
};

GeneratorConfig config_of(int n, std::optional<int> k, std::optional<int> tau, const std::string& alpha,
                          std::optional<int> q_sod, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.tau = tau;
  cfg.alpha = Rational::parse(alpha);
  cfg.q_sod = q_sod;
  cfg.seed = seed;
  return cfg;
}

int command_generate(const GenerateArgs& a, std::ostream& out) {
  if (!a.n) throw UsageError("--n is required");
  const GeneratedInstance g = generate(config_of(*a.n, a.k, a.tau, a.alpha, a.q_sod, a.seed));
  const Json meta = generator_meta(g.config);
  write_text(a.out, dump_json(instance_to_json(g.instance, meta)), out);
  if (!a.wsp_out.empty()) write_text(a.wsp_out, dump_json(wsp_to_json(g.wsp, meta)), out);
  return 0;
}

// ---------------------------------------------------------------------------
// export-mip

int command_export(const std::string& in, const std::string& form, const std::string& path, std::ostream& out) {
  const Instance inst = instance_from_json(read_json_file(in));
  Formulation f;
  if (form == "naive") {
    f = build_naive(inst);
  } else if (form == "up") {
    f = build_up(inst);
  } else {
    throw UsageError("--form must be naive or up");
  }
  write_text(path, export_lp(f), out);
  return 0;
}

// ---------------------------------------------------------------------------
// check-resilience

int command_check(const std::string& wsp_path, const std::string& plan_path, int tau, std::ostream& out) {
  const WspInstance w = wsp_from_json(read_json_file(wsp_path));
  const ExtendedPlan plan = extended_plan_from_json(w, read_json_file(plan_path));
  const ResilienceReport rep = check_tau_resilient(w, plan, tau);
  Json j = Json::object();
  j["tau"] = tau;
  j["resilient"] = rep.resilient;
  if (rep.witness) {
    Json wit = Json::array();
    for (std::size_t u : *rep.witness) wit.push_back(w.users()[u]);
    j["witness"] = std::move(wit);
  } else {
    j["witness"] = nullptr;
  }
  j["subsets_checked"] = rep.subsets_checked;
  out << dump_json(j);
  return 0;
}

// ---------------------------------------------------------------------------
// bench

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

std::vector<std::int64_t> int_values(const std::string& key, const std::string& text) {
  std::vector<std::int64_t> out;
  for (const auto& item : split(text, ',')) {
    try {
      if (const auto dots = item.find(".."); dots != std::string::npos) {
        const auto lo = std::stoll(item.substr(0, dots));
        const auto hi = std::stoll(item.substr(dots + 2));
        if (hi < lo || hi - lo > 100000) throw UsageError("bad range '" + item + "' for " + key);
        for (auto v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        std::size_t used = 0;
        out.push_back(std::stoll(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      }
    } catch (const std::logic_error&) {
      throw UsageError("bad value '" + item + "' for " + key);
    }
  }
  if (out.empty()) throw UsageError("no values for " + key);
  return out;
}

struct Grid {
  std::vector<std::int64_t> n;
  std::vector<std::optional<int>> k{std::nullopt};
  std::vector<std::optional<int>> tau{std::nullopt};
  std::vector<std::string> alpha{"1"};
  std::vector<std::int64_t> seeds;
};

/// "n=20,40,80;k=3;tau=1;alpha=1,2;seeds=1..10"
Grid parse_grid(const std::string& spec) {
  Grid g;
  for (int s = 1; s <= 10; ++s) g.seeds.push_back(s);
  for (const auto& part : split(spec, ';')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("grid entry '" + part + "' is not key=values");
    const std::string key = part.substr(0, eq);
    const std::string val = part.substr(eq + 1);
    auto optional_ints = [&] {
      std::vector<std::optional<int>> out;
      for (auto v : int_values(key, val)) out.emplace_back(static_cast<int>(v));
      return out;
    };
    if (key == "n") {
      g.n = int_values(key, val);
    } else if (key == "k") {
      g.k = optional_ints();
    } else if (key == "tau") {
      g.tau = optional_ints();
    } else if (key == "alpha") {
      g.alpha = split(val, ',');
    } else if (key == "seeds" || key == "seed") {
      g.seeds = int_values(key, val);
    } else {
      throw UsageError("unknown grid key '" + key + "'");
    }
  }
  if (g.n.empty()) throw UsageError("grid needs n=...");
  return g;
}

std::string fmt_ms(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(3) << v;
  return s.str();
}

int command_bench(const std::string& grid_spec, const std::string& solver, unsigned threads, const std::string& path,
                  std::ostream& out, const Log& log) {
  const Grid grid = parse_grid(grid_spec);
  std::ostringstream csv;
  csv << "n,k,tau,alpha,seed,solver,time_ms,objective,users,sod_penalty,card_penalty,usercount_penalty,auth_penalty\n";
  for (auto n : grid.n) {
    for (const auto& k : grid.k) {
      for (const auto& tau : grid.tau) {
        for (const auto& alpha : grid.alpha) {
          std::vector<double> sums(7, 0.0);
          ResolvedConfig rc;
          for (auto seed : grid.seeds) {
            const GeneratedInstance g =
                generate(config_of(static_cast<int>(n), k, tau, alpha, std::nullopt, static_cast<std::uint64_t>(seed)));
            rc = g.config;
            const SolveResult r = solve_with(g.instance, solver, std::nullopt, threads, log);
            const auto& b = r.breakdown();
            const std::vector<double> row{r.meta().wall_ms,
                                          static_cast<double>(r.total_weight()),
                                          static_cast<double>(r.relation().active_user_count()),
                                          static_cast<double>(b.category(ConstraintCategory::sod)),
                                          static_cast<double>(b.category(ConstraintCategory::cardinality)),
                                          static_cast<double>(b.category(ConstraintCategory::user_count)),
                                          static_cast<double>(b.authorizations)};
            for (std::size_t i = 0; i < row.size(); ++i) sums[i] += row[i];
            csv << rc.n << ',' << rc.k << ',' << rc.tau << ',' << rc.alpha.str() << ',' << seed << ',' << solver
                << ',' << fmt_ms(row[0]) << ',' << r.total_weight() << ',' << r.relation().active_user_count() << ','
                << b.category(ConstraintCategory::sod) << ',' << b.category(ConstraintCategory::cardinality) << ','
                << b.category(ConstraintCategory::user_count) << ',' << b.authorizations << '\n';
            log(Level::debug, "bench n=" + std::to_string(rc.n) + " seed=" + std::to_string(seed) + " done");
          }
          const double runs = static_cast<double>(grid.seeds.size());
          csv << rc.n << ',' << rc.k << ',' << rc.tau << ',' << rc.alpha.str() << ",mean," << solver;
          for (double s : sums) csv << ',' << fmt_ms(s / runs);
          csv << '\n';
        }
      }
    }
  }
  write_text(path, csv.str(), out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const Log log(err);
  CLI::App app{"Valued APEP toolkit", "apep"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a random resiliency instance");
  g->add_option("--n", gen.n, "Number of users")->required();
  g->add_option("--k", gen.k, "Number of steps (default max(1, n/10))");
  g->add_option("--tau", gen.tau, "Resiliency level (default n/20)");
  g->add_option("--alpha", gen.alpha, "Authorization weight, integer, p/q or decimal");
  g->add_option("--q-sod", gen.q_sod, "Number of SoD constraints (default k)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Instance file (default stdout)");
  g->add_option("--wsp-out", gen.wsp_out, "Also write the underlying WSP instance");

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve an instance exactly");
  s->add_option("--in", sol.in, "Instance file")->required();
  s->add_option("--solver", sol.solver, "profile, brute or wsp")->check(CLI::IsMember({"profile", "brute", "wsp"}));
  s->add_option("--ell", sol.ell, "User cap for the profile solver");
  s->add_option("--threads", sol.threads, "Worker threads for the profile solver")->check(CLI::Range(1u, 256u));
  s->add_option("--out", sol.out, "Report file (default stdout)");
  s->add_flag("--stats", sol.stats, "Include counters and wall time");

  std::string mip_in, form = "up", mip_out;
  auto* e = app.add_subcommand("export-mip", "Write a MIP formulation in LP format");
  e->add_option("--in", mip_in, "Instance file")->required();
  e->add_option("--form", form, "naive or up")->check(CLI::IsMember({"naive", "up"}));
  e->add_option("--out", mip_out, "LP file (default stdout)");

  std::string wsp_path, plan_path;
  int tau = 0;
  auto* c = app.add_subcommand("check-resilience", "Check an extended plan for tau-resiliency");
  c->add_option("--wsp", wsp_path, "WSP instance file")->required();
  c->add_option("--plan", plan_path, "Extended plan or solve report")->required();
  c->add_option("--tau", tau, "Number of removed users")->required()->check(CLI::NonNegativeNumber);

  std::string grid, bench_out, bench_solver = "profile";
  unsigned bench_threads = 1;
  auto* b = app.add_subcommand("bench", "Solve a grid of generated instances and write CSV");
  b->add_option("--grid", grid, "e.g. n=20,40,80;k=3;seeds=1..10")->required();
  b->add_option("--solver", bench_solver, "profile, brute or wsp")->check(CLI::IsMember({"profile", "brute", "wsp"}));
  b->add_option("--threads", bench_threads, "Worker threads")->check(CLI::Range(1u, 256u));
  b->add_option("--out", bench_out, "CSV file (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    return app.exit(ex, out, err) == 0 ? 0 : 2;
  }

  try {
    if (g->parsed()) return command_generate(gen, out);
    if (s->parsed()) return command_solve(sol, out, log);
    if (e->parsed()) return command_export(mip_in, form, mip_out, out);
    if (c->parsed()) return command_check(wsp_path, plan_path, tau, out);
    if (b->parsed()) return command_bench(grid, bench_solver, bench_threads, bench_out, out, log);
  } catch (const UsageError& ex) {
    log(Level::error, ex.what());
    return 2;
  } catch (const DomainError& ex) {
    log(Level::error, ex.what());
    return 2;
  } catch (const GuardError& ex) {
    log(Level::error, ex.what());
    return 3;
  } catch (const std::exception& ex) {
    log(Level::error, std::string("internal: ") + ex.what());
    return 1;
  }
  return 1;
}

}  // namespace apep
