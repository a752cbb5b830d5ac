#include <doctest.h>
#include <unistd.h>

#include <json.hpp>

#include "cli_runner.hpp"
#include "pdfp/trace.hpp"

using testing::run_cli;

namespace {

const std::filesystem::path& dir() {
  static const auto d = testing::scratch_dir("cli");
  return d;
}

std::string at(const std::string& name) { return "\"" + (dir() / name).string() + "\""; }

nlohmann::json read_json(const std::string& name) {
  std::ifstream f(dir() / name);
  return nlohmann::json::parse(f);
}

}  // namespace

TEST_CASE("solve converges and agrees with the oracle") {
  const auto r = run_cli("solve --algo spdfp2o --gen lasso --p 50 --q 20 --seed 7 --gamma auto "
                         "--lambda auto --trace " + at("lasso.csv") + " --result " + at("lasso.json"),
                         dir());
  CHECK(r.code == 0);
  CHECK(r.out.find("gamma") != std::string::npos);
  CHECK(r.out.find("lambda             0.5") != std::string::npos);
  const auto o = run_cli("oracle --gen lasso --p 50 --q 20 --seed 7 --out " + at("oracle.json"), dir());
  CHECK(o.code == 0);
  const double best = read_json("oracle.json")["objective"].get<double>();
  CHECK(read_json("oracle.json")["certificate"].get<double>() <= 1e-10);
  CHECK(std::abs(read_json("lasso.json")["objective"].get<double>() - best) <= 1e-6);
  const auto c = run_cli("compare " + at("lasso.csv") + " --oracle " + at("oracle.json") +
                         " --gap-tol 1e-6", dir());
  CHECK(c.code == 0);
  CHECK(c.out.find("PASS") != std::string::npos);
}

TEST_CASE("parameter violations exit with 1 and name the bound") {
  auto r = run_cli("solve --algo minibatch --gen logistic --m 60 --q 8 --lambda 0.9", dir());
  CHECK(r.code == 1);
  CHECK(r.out.find("exceeds bound 0.5") != std::string::npos);
  r = run_cli("solve --algo spdfp2o --gen lasso --lambda 0.6", dir());
  CHECK(r.code == 1);
  CHECK(r.out.find("lambda 0.6 exceeds bound 0.5 = 1/(lambda_max(DD^T)+1)") != std::string::npos);
  r = run_cli("solve --algo spdfp2o --gen lasso --gamma 10", dir());
  CHECK(r.code == 1);
  CHECK(r.out.find("2*beta") != std::string::npos);
  r = run_cli("solve --algo dist-sync --gen logistic --m 60 --q 8 --lambda 0.34", dir());
  CHECK(r.code == 1);
  r = run_cli("solve --algo dist-sync --gen logistic --m 60 --q 8 --lambda 0.3333333333333333 "
              "--max-iters 5",
              dir());
  CHECK(r.code == 2);
  r = run_cli("solve --algo nope --gen lasso", dir());
  CHECK(r.code == 1);
  r = run_cli("solve --algo spdfp2o", dir());
  CHECK(r.code == 1);
  r = run_cli("frobnicate", dir());
  CHECK(r.code == 1);
}

TEST_CASE("zero iterations give exit 2 and a header-only trace") {
  const auto r = run_cli("solve --algo spdfp2o --gen lasso --max-iters 0 --trace " + at("empty.csv"),
                         dir());
  CHECK(r.code == 2);
  CHECK(testing::slurp(dir() / "empty.csv") == std::string(pdfp::kTraceHeader) + "\n");
}

TEST_CASE("every algorithm runs from the command line") {
  for (const std::string algo : {"pdfp2o", "minibatch", "smspdfp2o", "dist-sync", "dist-async"}) {
    CAPTURE(algo);
    const auto r = run_cli("solve --algo " + algo +
                               " --gen logistic --m 60 --q 8 --noise 0.5 --tol 1e-9 "
                               "--max-iters 200000 --log-every 50 --trace " + at(algo + ".csv"),
                           dir());
    CHECK(r.code == 0);
    std::ifstream f(dir() / (algo + ".csv"));
    const auto t = pdfp::read_trace_csv(f);
    REQUIRE_FALSE(t.empty());
    const bool stochastic = algo == "smspdfp2o" || algo == "dist-async";
    CHECK(t.back().active_set.empty() != stochastic);
    CHECK(std::isnan(t.back().consensus_residual) == (algo == "pdfp2o"));
  }
}

TEST_CASE("runs are reproducible apart from the time column") {
  const std::string args = "solve --algo dist-async --graph er --nodes 6 --gen logistic --m 60 --q 8 "
                           "--seed 4 --max-iters 300 --tol 0 --trace ";
  CHECK(run_cli(args + at("rep1.csv"), dir()).code == 2);
  CHECK(run_cli(args + at("rep2.csv"), dir()).code == 2);
  const auto a = testing::slurp(dir() / "rep1.csv"), b = testing::slurp(dir() / "rep2.csv");
  CHECK(a.size() > 1000);
  CHECK(testing::without_time(a) == testing::without_time(b));
}

TEST_CASE("PDFP_SEED supplies the default seed") {
  const std::string args = "solve --algo smspdfp2o --gen logistic --m 60 --q 8 --max-iters 50 --tol 0 --trace ";
  CHECK(run_cli(args + at("s7.csv") + " --seed 7", dir()).code == 2);
  CHECK(std::system(("PDFP_SEED=7 \"" + std::string(PDFP_CLI_PATH) + "\" " + args + at("e7.csv") +
                     " > /dev/null")
                        .c_str()) != -1);
  CHECK(testing::without_time(testing::slurp(dir() / "s7.csv")) ==
        testing::without_time(testing::slurp(dir() / "e7.csv")));
}

TEST_CASE("config file with flag overrides") {
  {
    std::ofstream f(dir() / "cfg.json");
    f << R"({"algo": "minibatch", "gen": "logistic", "m": 60, "q": 8, "batches": 2,
             "max_iters": 7, "tol": 0})";
  }
  auto r = run_cli("solve --config " + at("cfg.json") + " --result " + at("cfg_out.json"), dir());
  CHECK(r.code == 2);
  CHECK(read_json("cfg_out.json")["iterations"] == 7);
  r = run_cli("solve --config " + at("cfg.json") + " --max-iters 3 --result " + at("cfg_out.json"), dir());
  CHECK(read_json("cfg_out.json")["iterations"] == 3);
  {
    std::ofstream f(dir() / "badcfg.json");
    f << R"({"algo": "minibatch", "bogus": 1})";
  }
  CHECK(run_cli("solve --config " + at("badcfg.json"), dir()).code == 1);
}

TEST_CASE("dataset and graph generation") {
  CHECK(run_cli("gen logistic --m 200 --q 50 --seed 1 --out " + at("g1.svm"), dir()).code == 0);
  CHECK(run_cli("gen logistic --m 200 --q 50 --seed 1 --out " + at("g2.svm"), dir()).code == 0);
  CHECK(testing::slurp(dir() / "g1.svm") == testing::slurp(dir() / "g2.svm"));
  CHECK(testing::slurp(dir() / "g1.svm.json") == testing::slurp(dir() / "g2.svm.json"));
  const auto side = read_json("g1.svm.json");
  CHECK(side["m"] == 200);
  CHECK(side["ground_truth"].size() == 50);
  const auto r = run_cli("solve --algo spdfp2o --data " + at("g1.svm") + " --loss logistic --tau 0.05",
                         dir());
  CHECK(r.code == 0);

  CHECK(run_cli("graph-gen --kind ring --n 5 --out " + at("ring.txt"), dir()).code == 0);
  const std::string ring = testing::slurp(dir() / "ring.txt");
  CHECK(std::count(ring.begin(), ring.end(), '\n') == 6);
  const auto er = run_cli("graph-gen --kind er --n 6 --p 0.01 --seed 1", dir());
  CHECK(er.code == 1);
  CHECK(er.out.find("100 attempts") != std::string::npos);
  CHECK(run_cli("solve --algo dist-sync --graph " + at("ring.txt") +
                    " --gen logistic --m 50 --q 5 --max-iters 100000",
                dir())
            .code == 0);
}

TEST_CASE("oracle on an explicit instance") {
  {
    std::ofstream f(dir() / "one.json");
    f << R"({"A": [[1.0]], "b": [2.0], "tau": 1.0})";
  }
  CHECK(run_cli("oracle --problem " + at("one.json") + " --out " + at("one_out.json"), dir()).code == 0);
  CHECK(read_json("one_out.json")["x"][0].get<double>() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(run_cli("oracle --gen logistic --m 100 --q 20 --max-iters 2", dir()).code == 2);
}

TEST_CASE("compare failures") {
  CHECK(run_cli("compare --oracle " + at("oracle.json"), dir()).code == 1);
  {
    std::ofstream f(dir() / "corrupt.csv");
    f << "iter,objective\n1,2\n";
  }
  CHECK(run_cli("compare " + at("corrupt.csv") + " --oracle " + at("oracle.json"), dir()).code == 1);
  CHECK(run_cli("compare " + at("lasso.csv") + " --oracle " + at("missing.json"), dir()).code == 1);
}

TEST_CASE("bench runs configurations in parallel") {
  {
    std::ofstream f(dir() / "bench.json");
    f << R"({"defaults": {"gen": "logistic", "m": 60, "q": 8, "max_iters": 100000},
             "runs": [
               {"algo": "spdfp2o", "trace": ")" << (dir() / "b0.csv").string() << R"("},
               {"algo": "smspdfp2o", "seed": 2, "trace": ")" << (dir() / "b1.csv").string() << R"("},
               {"algo": "dist-async", "seed": 3, "trace": ")" << (dir() / "b2.csv").string() << R"("}
             ]})";
  }
  const auto r = run_cli("bench --config " + at("bench.json") + " --jobs 3", dir());
  CHECK(r.code == 0);
  CHECK(std::filesystem::exists(dir() / "b2.csv"));
  CHECK(r.out.find("== run 2") != std::string::npos);
}
