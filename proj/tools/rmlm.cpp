// Command-line front end. Exit status: 0 success, 1 mathematical rejection,
// 2 malformed input, unusable flags or a refused size.

#include "rmlm/rmlm.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace rmlm;

constexpr int kRejected = 1;
constexpr int kMalformed = 2;

// Non-fatal rejection with a message; distinct from Infeasible so that
// "check" verdicts can share the exit path.
struct Rejected {
  std::string message;
};

Tolerance default_tolerance() {
  Tolerance tol;
  if (const char* env = std::getenv("RMLM_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end == env || *end != '\0' || !(v > 0))
      throw InvalidInput(std::string("RMLM_TOL must be a positive number, got '") + env + "'");
    tol.eps = v;
  }
  return tol;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return in;
}

Matrix load_matrix(const std::string& path) {
  auto in = open_input(path);
  return io::read_matrix_csv(in);
}

WeightedModel load_model(const std::string& path) {
  auto in = open_input(path);
  return io::read_model_json(in);
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw InvalidInput("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json one_based(std::span<const Node> nodes) {
  nlohmann::json out = nlohmann::json::array();
  for (Node v : nodes) out.push_back(v + 1);
  return out;
}

nlohmann::json model_json(const IdentifiedModel& m) {
  nlohmann::json edges = nlohmann::json::array();
  for (const Edge& e : m.min_ml_dag.edges()) edges.push_back({e.from + 1, e.to + 1});
  return {{"std_mlcm", matrix_json(m.std_mlcm.matrix())},
          {"min_ml_dag_edges", edges},
          {"initial_nodes", one_based(m.initial_nodes)},
          {"ordering", one_based(m.ordering_used.sequence())},
          {"max_weighted", m.max_weighted}};
}

struct Args {
  std::string chi, model, matrix, reachability, ordering, initials, out, noise = "frechet";
  double alpha = 1.0, u = 0.0, density = 0.5, weight_min = 0.5, weight_max = 2.0;
  std::size_t n = 0, max_d = 10, d = 0;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  bool rmwm = false, mlcm = false, tdm_on_dag = false, polytree = false, homogeneous = false;
};

int run_tdm(const Args& a, const Tolerance&) {
  const WeightedModel m = load_model(a.model);
  const TailDepMatrix chi = tdm_from_std_mlcm(standardize(mlcm_from_weights(m), m.alpha()));
  Output out(a.out);
  io::write_matrix_csv(out.stream(), chi.matrix());
  return 0;
}

int run_standardize(const Args& a, const Tolerance&) {
  const StdMlcMatrix bbar = standardize(MlcMatrix(load_matrix(a.matrix)), a.alpha);
  Output out(a.out);
  io::write_matrix_csv(out.stream(), bbar.matrix());
  return 0;
}

int run_recover(const Args& a, const Tolerance& tol) {
  const TailDepMatrix chi(load_matrix(a.chi), tol);
  const int sources = int(!a.reachability.empty()) + int(!a.ordering.empty()) + int(!a.initials.empty());
  if (sources != 1) throw InvalidInput("recover needs exactly one of --reachability, --ordering, --initials");
  std::optional<StdMlcMatrix> bbar;
  if (!a.reachability.empty()) {
    const ReachMatrix r = ReachMatrix::from_pattern(load_matrix(a.reachability));
    bbar.emplace(a.rmwm ? recover_from_reachability_rmwm(chi, r, tol) : recover_from_reachability(chi, r, tol));
  } else if (!a.ordering.empty()) {
    bbar.emplace(recover_from_ordering(chi, CausalOrdering::from_sequence(io::parse_node_list(a.ordering, chi.size())), tol));
  } else {
    NodeSet v0 = io::parse_node_list(a.initials, chi.size());
    std::sort(v0.begin(), v0.end());
    bbar.emplace(recover_rmwm_from_initials(chi, v0, tol));
  }
  Output out(a.out);
  io::write_matrix_csv(out.stream(), bbar->matrix());
  return 0;
}

int run_enumerate(const Args& a, const Tolerance& tol) {
  const TailDepMatrix chi(load_matrix(a.chi), tol);
  const auto models = a.rmwm ? enumerate_all_rmwm(chi, tol) : enumerate_all(chi, {tol, a.max_d});
  nlohmann::json doc = {{"models", nlohmann::json::array()}};
  for (const auto& m : models) doc["models"].push_back(model_json(m));
  Output out(a.out);
  out.stream() << doc.dump(2) << '\n';
  if (models.empty())
    throw Rejected{a.rmwm ? "not the TDM of any recursive max-weighted model"
                          : "not the TDM of any recursive max-linear model"};
  return 0;
}

Dag dag_from_args(const Args& a) {
  if (!a.model.empty() == !a.reachability.empty())
    throw InvalidInput("give the DAG with exactly one of --model or --reachability");
  if (!a.model.empty()) return load_model(a.model).dag();
  return ReachMatrix::from_pattern(load_matrix(a.reachability)).to_dag();
}

int run_check(const Args& a, const Tolerance& tol) {
  if (int(a.mlcm) + int(a.rmwm) + int(a.tdm_on_dag) != 1)
    throw InvalidInput("check needs exactly one of --mlcm, --rmwm, --tdm-on-dag");
  Output out(a.out);
  if (a.mlcm) {
    const MlcmCheck c = is_mlcm(load_matrix(a.matrix), tol);
    out.stream() << to_string(c.verdict) << " residual=" << format_double(c.residual, 6)
                 << (c.detail.empty() ? "" : " " + c.detail) << '\n';
    if (!c) throw Rejected{"not the ML coefficient matrix of a recursive max-linear model"};
    return 0;
  }
  if (a.rmwm) {
    const Classification c = is_rmwm_mlcm(StdMlcMatrix(load_matrix(a.matrix), tol), tol);
    out.stream() << (c ? "max_weighted" : "not_max_weighted") << " residual=" << format_double(c.residual, 6) << '\n';
    if (!c) throw Rejected{"not the ML coefficient matrix of a recursive max-weighted model"};
    return 0;
  }
  const TailDepMatrix chi(load_matrix(a.chi), tol);
  const RmwmTdmReport rep = check_rmwm_tdm(dag_from_args(a), chi, tol);
  if (!rep) {
    out.stream() << "rejected condition=" << rep.failed_condition << '\n';
    throw Rejected{rep.detail};
  }
  out.stream() << "accepted\n";
  io::write_matrix_csv(out.stream(), rep.std_mlcm->matrix());
  return 0;
}

std::uint64_t require_seed(const Args& a, const char* command) {
  if (!a.seed)
    throw InvalidInput(std::string(command) + " is randomized: pass --seed <integer> for reproducible output");
  return *a.seed;
}

int run_simulate(const Args& a, const Tolerance&) {
  const std::uint64_t seed = require_seed(a, "simulate");
  if (a.n < 1) throw InvalidInput("--n must be at least 1");
  const WeightedModel m = load_model(a.model);
  const SampleBlock s = sample(m, {parse_noise_family(a.noise), m.alpha()}, a.n, seed);
  if (a.u > 0) {
    const TailDepMatrix est = empirical_tdm(s, a.u);
    if (!a.out.empty()) {
      Output samples(a.out);
      io::write_matrix_csv(samples.stream(), s.values);
    }
    io::write_matrix_csv(std::cout, est.matrix());
    return 0;
  }
  Output out(a.out);
  io::write_matrix_csv(out.stream(), s.values);
  return 0;
}

int run_gen(const Args& a, const Tolerance&, const CLI::App& gen) {
  const std::uint64_t seed = require_seed(a, "gen");
  if (a.homogeneous && (gen.count("--weight-min") || gen.count("--weight-max")))
    throw InvalidInput("--homogeneous fixes all weights; drop --weight-min/--weight-max");
  if (a.d < 1) throw InvalidInput("d must be at least 1");
  GeneratorOptions opt{a.d, a.density, a.weight_min, a.weight_max, a.alpha, a.polytree, a.homogeneous};
  Output out(a.out);
  io::write_model_json(out.stream(), random_model(opt, seed));
  return 0;
}

int run_dot(const Args& a, const Tolerance&) {
  Output out(a.out);
  if (!a.model.empty() && a.reachability.empty()) {
    io::write_dot(out.stream(), load_model(a.model));
    return 0;
  }
  io::write_dot(out.stream(), dag_from_args(a));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Recursive max-linear models: tail dependence, identification and simulation"};
  app.require_subcommand(1);
  Args a;

  auto add_tol = [&](CLI::App* s) {
    s->add_option("--tol", a.tol, "Equality tolerance (default 1e-9, or RMLM_TOL)")->check(CLI::PositiveNumber);
  };
  auto add_out = [&](CLI::App* s) { s->add_option("--out", a.out, "Output file (default: standard output)"); };

  auto* tdm = app.add_subcommand("tdm", "Tail dependence matrix of a model");
  tdm->add_option("--model", a.model, "Model file (JSON)")->required();
  add_out(tdm);

  auto* stdz = app.add_subcommand("standardize", "Standardize an ML coefficient matrix");
  stdz->add_option("--matrix", a.matrix, "ML coefficient matrix (CSV)")->required();
  stdz->add_option("--alpha", a.alpha, "Tail index")->check(CLI::PositiveNumber);
  add_out(stdz);

  auto* rec = app.add_subcommand("recover", "Recover the standardized MLCM from a TDM and side information");
  rec->add_option("--chi", a.chi, "Tail dependence matrix (CSV)")->required();
  rec->add_option("--reachability", a.reachability, "Reachability matrix (CSV)");
  rec->add_option("--ordering", a.ordering, "Causal ordering as a node sequence, e.g. 2,1,3");
  rec->add_option("--initials", a.initials, "Initial nodes of a max-weighted model, e.g. 1,2");
  rec->add_flag("--rmwm", a.rmwm, "With --reachability: use the max-weighted recursion");
  add_tol(rec);
  add_out(rec);

  auto* en = app.add_subcommand("enumerate", "All standardized MLCMs with a given TDM (JSON)");
  en->add_option("--chi", a.chi, "Tail dependence matrix (CSV)")->required();
  en->add_flag("--rmwm", a.rmwm, "Only recursive max-weighted models");
  en->add_option("--max-d", a.max_d, "Refuse the general search above this dimension");
  add_tol(en);
  add_out(en);

  auto* chk = app.add_subcommand("check", "Validity checks");
  chk->add_flag("--mlcm", a.mlcm, "Is --matrix the MLCM of a recursive max-linear model?");
  chk->add_flag("--rmwm", a.rmwm, "Is --matrix the standardized MLCM of a max-weighted model?");
  chk->add_flag("--tdm-on-dag", a.tdm_on_dag, "Is --chi the TDM of a max-weighted model on the DAG?");
  chk->add_option("--matrix", a.matrix, "Candidate matrix (CSV)");
  chk->add_option("--chi", a.chi, "Tail dependence matrix (CSV)");
  chk->add_option("--model", a.model, "Model file supplying the DAG");
  chk->add_option("--reachability", a.reachability, "Reachability matrix supplying the DAG");
  add_tol(chk);
  add_out(chk);

  auto* sim = app.add_subcommand("simulate", "Draw samples, optionally estimate the TDM");
  sim->add_option("--model", a.model, "Model file (JSON)")->required();
  sim->add_option("--n", a.n, "Number of draws")->required();
  sim->add_option("--seed", a.seed, "Random seed");
  sim->add_option("--noise", a.noise, "pareto or frechet")->check(CLI::IsMember({"pareto", "frechet"}));
  sim->add_option("--u", a.u, "Quantile level; prints the empirical TDM")->check(CLI::Range(0.0, 1.0));
  add_out(sim);

  auto* gen = app.add_subcommand("gen", "Random model (JSON)");
  gen->add_option("d", a.d, "Number of nodes")->required();
  gen->add_option("--seed", a.seed, "Random seed");
  gen->add_option("--density", a.density, "Edge probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--weight-min", a.weight_min, "Smallest weight")->check(CLI::PositiveNumber);
  gen->add_option("--weight-max", a.weight_max, "Largest weight")->check(CLI::PositiveNumber);
  gen->add_option("--alpha", a.alpha, "Tail index")->check(CLI::PositiveNumber);
  gen->add_flag("--polytree", a.polytree, "Random polytree");
  gen->add_flag("--homogeneous", a.homogeneous, "Homogeneous weights");
  add_out(gen);

  auto* dot = app.add_subcommand("dot", "Graph description of a model or reachability matrix");
  dot->add_option("--model", a.model, "Model file (JSON)");
  dot->add_option("--reachability", a.reachability, "Reachability matrix (CSV)");
  add_out(dot);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kMalformed;
  }

  try {
    Tolerance tol = default_tolerance();
    if (a.tol) tol.eps = *a.tol;
    if (*tdm) return run_tdm(a, tol);
    if (*stdz) return run_standardize(a, tol);
    if (*rec) return run_recover(a, tol);
    if (*en) return run_enumerate(a, tol);
    if (*chk) return run_check(a, tol);
    if (*sim) return run_simulate(a, tol);
    if (*gen) return run_gen(a, tol, *gen);
    if (*dot) return run_dot(a, tol);
  } catch (const Rejected& r) {
    std::cerr << "rejected: " << r.message << '\n';
    return kRejected;
  } catch (const Infeasible& e) {
    std::cerr << "rejected: " << e.what() << '\n';
    return kRejected;
  } catch (const CapExceeded& e) {
    std::cerr << "refused: " << e.what() << '\n';
    return kMalformed;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMalformed;
  }
  return kMalformed;
}
