// clchain: verification runs for the Cohen-Lenstra chain on abelian p-groups.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "clchain/checks.hpp"
#include "clchain/counting.hpp"
#include "clchain/kernels.hpp"
#include "clchain/measures.hpp"
#include "clchain/randmat.hpp"
#include "clchain/spectral.hpp"
#include "clchain/stats.hpp"

using namespace clchain;

namespace {

// Accepts the usual key=value files and JSON objects. A JSON report can be
// replayed directly: its "config" member is used.
class JsonOrIniConfig : public CLI::ConfigBase {
 public:
  std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
    std::stringstream buffer;
    buffer << input.rdbuf();
    const std::string text = buffer.str();
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first == std::string::npos || text[first] != '{') {
      std::istringstream again(text);
      return CLI::ConfigBase::from_config(again);
    }
    Json j = Json::parse(text);
    if (j.contains("config") && j["config"].is_object()) j = j["config"];
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, val] : j.items()) {
      if (key == "command") continue;
      if (val.is_object()) {
        // "++" / "--" open and close a subcommand section, as in INI files
        items.push_back({{key}, "++", {}});
        for (const auto& [sub_key, sub_val] : val.items()) items.push_back({{key}, sub_key, inputs_of(sub_val)});
        items.push_back({{key}, "--", {}});
      } else {
        items.push_back({{}, key, inputs_of(val)});
      }
    }
    return items;
  }

 private:
  static std::vector<std::string> inputs_of(const Json& v) {
    if (v.is_array()) {
      std::vector<std::string> out;
      for (const auto& x : v) out.push_back(x.is_string() ? x.get<std::string>() : x.dump());
      return out;
    }
    if (v.is_string()) return {v.get<std::string>()};
    return {v.dump()};
  }
};

struct Globals {
  long p = 2;
  int window = 6;
  std::string tol = "1/1000";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  int bound = 8;

  RunConfig run_config() const {
    RunConfig c;
    c.p = p;
    c.window = window;
    c.bound.max_order_exp = bound;
    c.tolerance = parse_rational(tol);
    c.seed = seed;
    c.out = out;
    return c;
  }
  Json to_json() const {
    return {{"p", p}, {"window", window}, {"tol", tol}, {"seed", seed},
            {"out", out}, {"format", format}, {"bound", bound}};
  }
};

struct Report {
  std::string command;
  Json config;
  std::vector<CheckResult> checks;
  Json extra = Json::object();
  double seconds = 0;

  bool pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
  Json to_json() const {
    Json j;
    j["command"] = command;
    j["config"] = config;
    Json cs = Json::array();
    for (const auto& c : checks) cs.push_back({{"name", c.name}, {"status", c.pass ? "pass" : "fail"}, {"details", c.details}});
    j["checks"] = cs;
    for (const auto& [k, v] : extra.items()) j[k] = v;
    j["status"] = pass() ? "pass" : "fail";
    j["timing_seconds"] = seconds;
    return j;
  }
};

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

// JSON goes to --out (or stdout with --format json and no --out); a
// summary table always goes to stdout otherwise.
int emit(const Report& r, const Globals& g) {
  const std::string json = r.to_json().dump(2) + "\n";
  if (!g.out.empty()) write_text(g.out, json);
  if (g.out.empty() && g.format == "json") {
    std::cout << json;
  } else {
    std::cout << r.command << "\n";
    for (const auto& c : r.checks) std::cout << "  " << (c.pass ? "pass" : "FAIL") << "  " << c.name << "\n";
    std::cout << "status: " << (r.pass() ? "pass" : "fail") << "\n";
  }
  return r.pass() ? 0 : 1;
}

std::string csv_field(const std::string& s) {
  return s.find(',') == std::string::npos ? s : "\"" + s + "\"";
}

GroupType parse_type(const std::string& s) { return GroupType::parse(s); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and Monte Carlo verification of the Cohen-Lenstra chain on finite abelian p-groups.\n"
               "Group types are written as partitions, e.g. \"2,1\"; the trivial group is \"0\".\n"
               "CLCHAIN_THREADS caps the worker threads."};
  app.config_formatter(std::make_shared<JsonOrIniConfig>());
  app.set_config("--config", "", "key=value or JSON config file (a JSON report replays its embedded config)");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--p", g.p, "prime")->capture_default_str();
  app.add_option("--window", g.window, "window m: states with |G| <= p^m")->capture_default_str();
  app.add_option("--tol", g.tol, "relative tolerance, as a rational")->capture_default_str();
  app.add_option("--seed", g.seed, "master seed")->capture_default_str();
  app.add_option("--out", g.out, "output file: the JSON report, or the CSV table of enumerate/spectrum/converge with --format csv");
  app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_option("--bound", g.bound, "brute-force bound: groups up to p^bound are materialized")->capture_default_str();

  auto* enumerate = app.add_subcommand("enumerate", "list window states with #Aut and the mu0 weight 1/#Aut");
  enumerate->configurable();

  auto* check = app.add_subcommand("check", "run one family of exact checks");
  check->configurable();
  std::string which;
  int max_f = 3;
  std::string f1, f2;
  std::vector<std::string> bs{"0", "1", "2", "1,1"};
  std::vector<std::string> sources{"0", "1", "2,1"};
  std::uint64_t check_samples = 100000;
  bool compare_c0 = true;
  check->add_option("which", which, "reversibility|basis|curious|moments|duality|composability")
      ->required()
      ->check(CLI::IsMember({"reversibility", "basis", "curious", "moments", "duality", "composability"}));
  check->add_option("--max-f", max_f, "largest log_p|F| for basis, curious and duality")->capture_default_str();
  check->add_option("--f1", f1, "curious: first group (with --f2; default all pairs)");
  check->add_option("--f2", f2, "curious: second group");
  check->add_flag("!--no-c0", compare_c0, "curious: only compare the exact RHS with the subgroup count");
  check->add_option("--b", bs, "moments: groups B")->capture_default_str();
  check->add_option("--sources", sources, "composability: source groups")->capture_default_str();
  check->add_option("--samples", check_samples, "composability: samples per source")->capture_default_str();

  auto* spectrum = app.add_subcommand("spectrum", "eigenvalues 1/|F| and certified eigen-residuals, as CSV");
  spectrum->configurable();

  auto* simulate = app.add_subcommand("simulate", "bordered random-matrix experiment");
  simulate->configurable();
  ExperimentSpec sim;
  std::string construction = "delta0";
  std::string sim_source = "0";
  simulate->add_option("--construction", construction, "fw|dstar|d|delta0|composability|dk|extclass")
      ->check(CLI::IsMember({"fw", "dstar", "d", "delta0", "composability", "dk", "extclass"}))
      ->capture_default_str();
  simulate->add_option("--precision", sim.precision, "starting precision N (0: order + 8)")->capture_default_str();
  simulate->add_option("--size", sim.size, "matrix size n (-1: rank + 2, or 8 for fw)")->capture_default_str();
  simulate->add_option("--samples", sim.samples, "number of samples")->capture_default_str();
  simulate->add_option("--source", sim_source, "source type, e.g. \"2,1\" or \"1+Z^1\" for d")->capture_default_str();
  simulate->add_option("--k", sim.k, "dk: rows and columns added")->capture_default_str();

  auto* converge = app.add_subcommand("converge", "TV(Delta_0^k delta_G, mu0) on the window, per k");
  converge->configurable();
  std::string conv_source = "0";
  int steps = 15, fit_from = 5;
  double ratio_tol = 0.05;
  converge->add_option("--source", conv_source, "starting group")->capture_default_str();
  converge->add_option("--steps", steps, "largest k")->capture_default_str();
  converge->add_option("--fit-from", fit_from, "first k in the decay fit")->capture_default_str();
  converge->add_option("--ratio-tol", ratio_tol, "allowed |ratio - 1/p|")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    WindowSpec w{g.p, g.window};
    w.validate();
    const BruteForceBound bound{g.bound};
    const Rational tol = parse_rational(g.tol);
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
    Json config = g.to_json();

    if (*enumerate) {
      config["command"] = "enumerate";
      const auto states = enumerate_window(w);
      if (g.format == "csv") {
        std::ostringstream s;
        s << "type,order_exp,rank,aut,mu0_weight\n";
        for (const auto& t : states) {
          s << csv_field(t.str()) << "," << t.order_exp() << "," << t.rank() << "," << aut_count(g.p, t).get_str()
            << "," << to_string(mu0_unnormalized(g.p, t)) << "\n";
        }
        write_text(g.out, s.str());
        return 0;
      }
      Report r{"enumerate", config, {}, {}, 0};
      Json rows = Json::array();
      for (const auto& t : states) {
        rows.push_back({{"type", t.str()}, {"order_exp", t.order_exp()}, {"rank", t.rank()},
                        {"aut", aut_count(g.p, t).get_str()}, {"mu0_weight", to_string(mu0_unnormalized(g.p, t))}});
      }
      r.extra["states"] = rows;
      r.extra["count"] = states.size();
      r.seconds = elapsed();
      return emit(r, g);
    }

    if (*check) {
      config["command"] = "check";
      config["check"] = {{"which", which}, {"max-f", max_f}, {"f1", f1}, {"f2", f2}, {"no-c0", !compare_c0}, {"b", bs},
                         {"sources", sources}, {"samples", check_samples}};
      Report r{"check " + which, config, {}, {}, 0};
      if (which == "reversibility") {
        r.checks.push_back(check_reversibility(g.p, w));
        r.checks.push_back(check_two_level_balance(g.p, w));
      } else if (which == "basis") {
        r.checks.push_back(check_basis(g.p, w, max_f, tol, bound));
      } else if (which == "curious") {
        if (!f1.empty() || !f2.empty()) {
          const CuriousReport c = curious_check(g.p, parse_type(f1), parse_type(f2), w, 80, bound);
          CheckResult res{"curious", c.rhs_is_oracle(), {}};
          res.details = {{"F1", c.f1.str()}, {"F2", c.f2.str()}, {"m", w.max_order_exp},
                         {"lhs_partial", to_double(c.lhs_partial)}, {"lhs_times_c0", c.lhs_times_c0.to_json()},
                         {"rhs", to_string(c.rhs)}, {"subgroup_oracle", c.subgroup_oracle.get_str()},
                         {"monotone", c.partials_monotone()}, {"within_tol", c.within(tol)}};
          r.checks.push_back(res);
        } else {
          r.checks.push_back(check_curious(g.p, max_f, w, compare_c0, tol, bound));
        }
      } else if (which == "moments") {
        std::vector<GroupType> types;
        for (const auto& b : bs) types.push_back(parse_type(b));
        r.checks.push_back(check_moments(g.p, w, types, tol));
      } else if (which == "duality") {
        r.checks.push_back(check_duality(g.p, max_f, bound));
      } else if (which == "composability") {
        std::vector<GroupType> types;
        for (const auto& s : sources) types.push_back(parse_type(s));
        r.checks.push_back(check_composability(g.p, types, w, check_samples, g.seed, bound));
      }
      r.seconds = elapsed();
      return emit(r, g);
    }

    if (*spectrum) {
      config["command"] = "spectrum";
      const auto fs = enumerate_window(w);
      std::vector<EigenVector> evs(fs.size());
      std::vector<EigenResidual> res(fs.size());
      for (std::size_t i = 0; i < fs.size(); ++i) {
        evs[i] = e_vector(g.p, fs[i], bound);
        res[i] = eigen_residual(g.p, fs[i], w, tol, bound);
      }
      bool ok = true;
      for (std::size_t i = 0; i < fs.size(); ++i) ok = ok && evs[i].residual == 0 && res[i].all_contained;
      if (g.format == "csv") {
        std::ostringstream s;
        s << "F,eigenvalue,residual_bound,m\n";
        for (std::size_t i = 0; i < fs.size(); ++i) {
          s << csv_field(fs[i].str()) << "," << to_string(evs[i].eigenvalue) << ","
            << to_string(res[i].residual_bound) << "," << g.window << "\n";
        }
        write_text(g.out, s.str());
        return ok ? 0 : 1;
      }
      Report r{"spectrum", config, {}, {}, 0};
      Json rows = Json::array();
      for (std::size_t i = 0; i < fs.size(); ++i) {
        rows.push_back({{"F", fs[i].str()}, {"eigenvalue", to_string(evs[i].eigenvalue)},
                        {"exact_residual", to_string(evs[i].residual)},
                        {"residual_bound", to_string(res[i].residual_bound)},
                        {"contained", res[i].all_contained}});
      }
      r.checks.push_back({"eigen_residuals", ok, rows});
      r.checks.push_back(check_eigen(g.p, g.window, bound));
      r.seconds = elapsed();
      return emit(r, g);
    }

    if (*simulate) {
      config["command"] = "simulate";
      config["simulate"] = {{"construction", construction}, {"precision", sim.precision}, {"size", sim.size},
                            {"samples", sim.samples}, {"source", sim_source}, {"k", sim.k}};
      sim.construction = parse_construction(construction);
      sim.p = g.p;
      sim.seed = g.seed;
      sim.source = ModuleType::parse(sim_source);
      if (sim.construction == Construction::d && sim.source.free_rank != 1) {
        throw std::invalid_argument("construction d needs a source of free rank 1, e.g. \"1+Z^1\"");
      }
      if (sim.construction != Construction::d && sim.source.free_rank != 0) {
        throw std::invalid_argument("only construction d takes a source with a free part");
      }
      Report r{"simulate", config, {}, {}, 0};
      if (sim.construction == Construction::extclass) {
        const GroupType grp = sim.source.torsion;
        const int n = sim.size >= 0 ? sim.size : grp.rank() + 2;
        const int precision = sim.precision > 0 ? sim.precision : grp.order_exp() + 8;
        SeededRng rng(g.seed, 0x736372ULL, 0);
        const MatrixModPN m = scramble(represent(g.p, grp, n, precision), rng);
        const ExtensionClassReport rep = extension_class_check(m, sim.samples, g.seed);
        CheckResult c{"extension_class", rep.type_mismatches == 0 && rep.unresolved == 0 && rep.uniform, {}};
        c.details = {{"group", rep.group.str()}, {"trials", rep.trials}, {"type_mismatches", rep.type_mismatches},
                     {"unresolved", rep.unresolved}, {"character_counts", rep.character_counts},
                     {"uniform_p_value", rep.uniform_p_value}};
        r.checks.push_back(c);
        r.seconds = elapsed();
        return emit(r, g);
      }
      const ExperimentResult res = run_experiment(sim);
      r.extra["result"] = res.to_json();
      auto against = [&](const std::string& name, const GroupRow& row, const std::map<ModuleType, std::uint64_t>& counts) {
        std::vector<Cell> cells;
        std::uint64_t outside = 0;
        for (const auto& [t, n] : counts) {
          if (t.free_rank != 0 || !row.probs.count(t.torsion)) outside += n;
        }
        for (const auto& [t, x] : row.probs) {
          auto it = counts.find(ModuleType{t, 0});
          cells.push_back({t.str(), to_double(x), it == counts.end() ? 0 : it->second});
        }
        cells.push_back({"outside", to_double(row.tail), outside});
        const ChiSquareResult chi = chi_square_test(cells);
        r.checks.push_back({name, chi.pass() && res.unresolved_rate() < 0.01,
                            {{"chi_square", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value},
                             {"min_cell_p", chi.min_cell_p}, {"unresolved_rate", res.unresolved_rate()}}});
      };
      const GroupType& src = sim.source.torsion;
      switch (sim.construction) {
        case Construction::fw: {
          const IntervalScalar c0 = c_constant(g.p, 0, 80);
          double tv = 0;
          double resolved = static_cast<double>(res.resolved());
          for (const auto& t : enumerate_window(w)) {
            auto it = res.counts.find(ModuleType{t, 0});
            const double emp = it == res.counts.end() ? 0.0 : static_cast<double>(it->second) / resolved;
            tv += std::abs(emp - to_double(c0.midpoint() * mu0_unnormalized(g.p, t))) / 2;
          }
          r.checks.push_back({"fw_tv_window", tv < 0.05, {{"tv_window", tv}, {"m", g.window}, {"threshold", 0.05}}});
          break;
        }
        case Construction::dstar: {
          GroupRow row{src, {g.p, src.order_exp()}, {}, 0};
          std::map<ModuleType, std::uint64_t> torsion_only;
          for (const auto& [t, n] : res.counts) torsion_only[ModuleType{t.torsion, t.free_rank - 1}] += n;
          for (const auto& [h, x] : dstar_kernel(g.p, src).probs) row.add(h.torsion, x);
          against("dstar_vs_exact", row, torsion_only);
          break;
        }
        case Construction::d:
          against("d_vs_exact", d_kernel(g.p, sim.source, w), res.counts);
          break;
        case Construction::delta0:
          against("delta0_vs_exact", delta0_kernel(g.p, src, w), res.counts);
          break;
        case Construction::dk:
          against("dk_vs_exact", dk_from_base_kernel(g.p, src, sim.k, w, bound).row, res.counts);
          break;
        case Construction::composability: {
          const GroupRow exact = exact_power_row(g.p, src, 2, w, bound);
          against("border22_vs_exact", exact, res.counts);
          against("sequential_vs_exact", exact, res.sequential_counts);
          break;
        }
        case Construction::extclass:
          break;
      }
      r.seconds = elapsed();
      return emit(r, g);
    }

    if (*converge) {
      config["command"] = "converge";
      config["converge"] = {{"source", conv_source}, {"steps", steps}, {"fit-from", fit_from}, {"ratio-tol", ratio_tol}};
      const ConvergenceReport rep = convergence(g.p, parse_type(conv_source), w, steps, fit_from, bound);
      const double target = 1.0 / static_cast<double>(g.p);
      const bool ok = std::abs(rep.fitted_ratio - target) <= ratio_tol;
      if (g.format == "csv") {
        std::ostringstream s;
        s << "k,tv_lo,tv_hi\n";
        for (std::size_t k = 0; k < rep.tv.size(); ++k) {
          s << k << "," << to_double(rep.tv[k].lo) << "," << to_double(rep.tv[k].hi) << "\n";
        }
        s << "# fitted_ratio," << rep.fitted_ratio << "\n";
        write_text(g.out, s.str());
        return ok ? 0 : 1;
      }
      Report r{"converge", config, {}, {}, 0};
      Json tv = Json::array();
      for (const auto& x : rep.tv) tv.push_back(x.to_json());
      r.checks.push_back({"decay_ratio", ok, {{"fitted_ratio", rep.fitted_ratio}, {"target", target}, {"tv", tv}}});
      r.seconds = elapsed();
      return emit(r, g);
    }
  } catch (const std::exception& e) {
    std::cerr << "clchain: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
