// Runs the command-line tool and compares against direct library calls.

#include "support/fixtures.hpp"

#include <gtest/gtest.h>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

using namespace rmlm;
namespace fs = std::filesystem;

namespace {

struct Result {
  int status;
  std::string out;
};

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = fs::temp_directory_path() / ("rmlm_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  static void TearDownTestSuite() { fs::remove_all(dir_); }

  static std::string file(const std::string& name, const std::string& content) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << content;
    return p.string();
  }
  static std::string matrix_file(const std::string& name, const Matrix& m) { return file(name, io::matrix_csv(m)); }
  static std::string model_file(const std::string& name, const WeightedModel& m) {
    std::ostringstream out;
    io::write_model_json(out, m);
    return file(name, out.str());
  }

  // Standard output only, unless `merge` also captures standard error.
  static Result run(const std::string& args, bool merge = false, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + RMLM_CLI_PATH + " " + args + (merge ? " 2>&1" : " 2>/dev/null");
    FILE* pipe = ::popen(cmd.c_str(), "r");
    std::string out;
    char buf[4096];
    while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, n);
    const int raw = ::pclose(pipe);
    return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
  }

  static inline fs::path dir_;
};

}  // namespace

TEST_F(Cli, RecoverByOrdering) {
  const auto chi = matrix_file("chi2.csv", fixtures::pair_chi(0.5));
  const Result r = run("recover --ordering 1,2 --chi " + chi);
  EXPECT_EQ(r.status, 0);
  EXPECT_EQ(r.out, "1,0.5\n0,0.5\n");
  EXPECT_EQ(run("recover --ordering 2,1 --chi " + chi).out, "0.5,0\n0.5,1\n");
}

TEST_F(Cli, RecoverByInitialsAndReachability) {
  const auto chi = matrix_file("two_clique.csv", fixtures::two_clique_chi());
  const std::string expected = io::matrix_csv(recover_rmwm_from_initials(TailDepMatrix(fixtures::two_clique_chi()), {0, 1}).matrix());
  EXPECT_EQ(run("recover --initials 1,2 --chi " + chi).out, expected);
  const auto reach = matrix_file("reach_d1.csv", reachability_matrix(fixtures::two_clique_d1()).to_matrix());
  EXPECT_EQ(run("recover --reachability " + reach + " --chi " + chi).out,
            io::matrix_csv(recover_from_reachability(TailDepMatrix(fixtures::two_clique_chi()),
                                                     reachability_matrix(fixtures::two_clique_d1()))
                               .matrix()));
  EXPECT_EQ(run("recover --rmwm --reachability " + reach + " --chi " + chi).status, 0);
  EXPECT_EQ(run("recover --chi " + chi).status, 2);
  EXPECT_EQ(run("recover --initials 1,2 --ordering 1,2,3,4 --chi " + chi).status, 2);
  EXPECT_EQ(run("recover --reachability " + matrix_file("id4.csv", Matrix::Identity(4, 4)) + " --chi " + chi).status, 1);
}

TEST_F(Cli, EnumerateMaxWeighted) {
  const Result r = run("enumerate --rmwm --chi " + matrix_file("two_clique.csv", fixtures::two_clique_chi()));
  ASSERT_EQ(r.status, 0);
  const auto doc = nlohmann::json::parse(r.out);
  ASSERT_EQ(doc["models"].size(), 1u);
  const auto& m = doc["models"][0];
  EXPECT_EQ(m["min_ml_dag_edges"], nlohmann::json::parse("[[1,3],[2,3],[2,4]]"));
  EXPECT_EQ(m["initial_nodes"], nlohmann::json::parse("[1,2]"));
  EXPECT_TRUE(m["max_weighted"].get<bool>());
  EXPECT_NEAR(m["std_mlcm"][1][2].get<double>(), 0.6, 1e-12);
}

TEST_F(Cli, EnumerateGeneralRejectionAndCap) {
  EXPECT_EQ(nlohmann::json::parse(run("enumerate --chi " + matrix_file("two_clique.csv", fixtures::two_clique_chi())).out)["models"].size(),
            2u);
  const auto bad = matrix_file("bad.csv", fixtures::mat({{1, 0.5, 0.5}, {0.5, 1, 0}, {0.5, 0, 1}}));
  const Result r = run("enumerate --chi " + bad, true);
  EXPECT_EQ(r.status, 1);
  EXPECT_NE(r.out.find("not the TDM of any"), std::string::npos) << r.out;
  const auto big = matrix_file("id11.csv", Matrix::Identity(11, 11));
  EXPECT_EQ(run("enumerate --chi " + big).status, 2);
  EXPECT_EQ(run("enumerate --max-d 11 --chi " + big).status, 0);
  EXPECT_EQ(run("enumerate --rmwm --chi " + big).status, 0);
}

TEST_F(Cli, CheckCommands) {
  const auto asym = matrix_file("asym.csv", fixtures::mat({{1, 0.5}, {0.4, 1}}));
  const auto reach2 = matrix_file("reach2.csv", fixtures::mat({{1, 1}, {0, 1}}));
  const Result r = run("check --tdm-on-dag --chi " + asym + " --reachability " + reach2, true);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("(1, 2)"), std::string::npos) << r.out;

  const auto chi = matrix_file("two_clique.csv", fixtures::two_clique_chi());
  const auto d1 = matrix_file("reach_d1.csv", reachability_matrix(fixtures::two_clique_d1()).to_matrix());
  const auto d2 = matrix_file("reach_d2.csv", reachability_matrix(fixtures::two_clique_d2()).to_matrix());
  const Result ok = run("check --tdm-on-dag --chi " + chi + " --reachability " + d1);
  EXPECT_EQ(ok.status, 0);
  EXPECT_EQ(ok.out.rfind("accepted\n", 0), 0u) << ok.out;
  const Result no = run("check --tdm-on-dag --chi " + chi + " --reachability " + d2);
  EXPECT_EQ(no.status, 1);
  EXPECT_EQ(no.out.rfind("rejected condition=", 0), 0u) << no.out;

  const Result valid = run("check --mlcm --matrix " + matrix_file("b1.csv", fixtures::ordering_b1()));
  EXPECT_EQ(valid.status, 0);
  EXPECT_EQ(valid.out.rfind("valid", 0), 0u) << valid.out;
  const Result mismatch = run("check --mlcm --matrix " + matrix_file("b2.csv", fixtures::ordering_b2()));
  EXPECT_EQ(mismatch.status, 1);
  EXPECT_EQ(mismatch.out.rfind("recomposition_mismatch", 0), 0u) << mismatch.out;
  EXPECT_EQ(run("check --rmwm --matrix " + matrix_file("c3b1.csv", fixtures::two_clique_b1())).status, 0);
  EXPECT_EQ(run("check --rmwm --matrix " + matrix_file("c3b2.csv", fixtures::two_clique_b2())).status, 1);
  EXPECT_EQ(run("check --matrix " + matrix_file("c3b1.csv", fixtures::two_clique_b1())).status, 2);
}

TEST_F(Cli, TdmAndStandardizeMatchLibrary) {
  const WeightedModel m = homogeneous_model(fixtures::diamond(), 2.0);
  const auto model = model_file("diamond.json", m);
  EXPECT_EQ(run("tdm --model " + model).out,
            io::matrix_csv(tdm_from_std_mlcm(standardize(mlcm_from_weights(m), 2.0)).matrix()));
  const Result s = run("standardize --alpha 2 --matrix " + matrix_file("b.csv", fixtures::mat({{1, 1}, {0, 1}})));
  EXPECT_EQ(s.out, "1,0.5\n0,0.5\n");
  const auto out = (dir_ / "tdm_out.csv").string();
  EXPECT_EQ(run("tdm --model " + model + " --out " + out).out, "");
  std::ifstream in(out);
  EXPECT_TRUE(io::read_matrix_csv(in).isApprox(tdm_from_std_mlcm(standardize(mlcm_from_weights(m), 2.0)).matrix()));
}

TEST_F(Cli, SimulateRequiresSeedAndMatchesLibrary) {
  const WeightedModel m(fixtures::dag1(2, {{1, 2}}), fixtures::mat({{1, 0.5}, {0, 0.5}}), 1.0);
  const auto model = model_file("two.json", m);
  const Result noseed = run("simulate --model " + model + " --n 100", true);
  EXPECT_EQ(noseed.status, 2);
  EXPECT_NE(noseed.out.find("--seed"), std::string::npos);
  EXPECT_EQ(run("simulate --model " + model + " --n 100 --seed 4").out,
            io::matrix_csv(sample(m, {NoiseFamily::frechet, 1.0}, 100, 4).values));
  EXPECT_EQ(run("simulate --model " + model + " --n 5000 --seed 4 --noise pareto --u 0.95").out,
            io::matrix_csv(empirical_tdm(sample(m, {NoiseFamily::pareto, 1.0}, 5000, 4), 0.95).matrix()));
  EXPECT_EQ(run("simulate --model " + model + " --n 100 --seed 4 --u 0.95").status, 2);
  EXPECT_EQ(run("simulate --model " + model + " --n 100 --seed 4 --noise cauchy").status, 2);
}

TEST_F(Cli, GenIsSeededAndValidatesFlags) {
  EXPECT_EQ(run("gen 4").status, 2);
  const Result a = run("gen 5 --polytree --seed 7"), b = run("gen 5 --polytree --seed 7");
  EXPECT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  GeneratorOptions opt;
  opt.d = 5;
  opt.polytree = true;
  std::ostringstream lib;
  io::write_model_json(lib, random_model(opt, 7));
  EXPECT_EQ(a.out, lib.str());
  const auto one = nlohmann::json::parse(run("gen 1 --seed 3").out);
  EXPECT_EQ(one["d"], 1);
  EXPECT_EQ(one["noise_scales"].size(), 1u);
  EXPECT_EQ(run("gen 4 --homogeneous --seed 1 --weight-max 3").status, 2);
  EXPECT_EQ(run("gen 4 --density 1.5 --seed 1").status, 2);
  EXPECT_EQ(run("gen 0 --seed 1").status, 2);
}

TEST_F(Cli, DotAndMiscellaneous) {
  const WeightedModel m(fixtures::dag1(2, {{1, 2}}), fixtures::mat({{1, 1.0 / 3}, {0, 1}}), 1.0);
  EXPECT_EQ(run("dot --model " + model_file("dot.json", m)).out,
            "digraph rmlm {\n  1;\n  2;\n  1 -> 2 [label=\"0.333333\"];\n}\n");
  EXPECT_EQ(run("dot --reachability " + matrix_file("r3.csv", fixtures::mat({{1, 1, 1}, {0, 1, 1}, {0, 0, 1}}))).out,
            "digraph rmlm {\n  1;\n  2;\n  3;\n  1 -> 2;\n  2 -> 3;\n}\n");
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("tdm --bogus").status, 2);
  EXPECT_EQ(run("--help").status, 0);
  EXPECT_EQ(run("tdm --model /nonexistent/model.json").status, 2);
  const auto chi = matrix_file("chi2.csv", fixtures::pair_chi(0.5));
  EXPECT_EQ(run("recover --ordering 1,2 --chi " + chi, false, "RMLM_TOL=abc").status, 2);
  EXPECT_EQ(run("recover --ordering 1,2 --chi " + chi, false, "RMLM_TOL=1e-6").status, 0);
}
