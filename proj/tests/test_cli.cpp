#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int status = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  const std::string cmd = std::string(AESE_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[512];
  while (fgets(buf, sizeof(buf), pipe)) r.output += buf;
  r.status = pclose(pipe);
  return r;
}

fs::path workdir() {
  const fs::path dir = fs::temp_directory_path() / "aese_cli_tests";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("simulate, fit, eval round trip") {
  const fs::path dir = workdir();
  const std::string csv = (dir / "sample.csv").string();
  const std::string model = (dir / "m33.txt").string();

  auto sim = run_cli("simulate --model beta --n 400 --seed 7 --out " + csv);
  CHECK(sim.status == 0);
  CHECK(sim.output.find("wrote 400 points") != std::string::npos);

  auto fitres = run_cli("fit --in " + csv + " --m 3,3 --out " + model);
  CHECK(fitres.status == 0);
  CHECK(fitres.output.find("converged") != std::string::npos);

  std::ifstream ms(model);
  std::string header;
  std::getline(ms, header);
  CHECK(header == "aese v1");

  auto ev = run_cli("eval --model " + model + " --truth beta --metric kl");
  CHECK(ev.status == 0);
  double kl = -1.0;
  std::istringstream(ev.output.substr(ev.output.find("kl") + 2)) >> kl;
  CHECK(kl >= 0.0);
  CHECK(kl < 1.0);

  auto el = run_cli("eval --model " + model + " --truth beta --metric l2");
  CHECK(el.status == 0);
}

TEST_CASE("aggregate command writes a loadable model") {
  const fs::path dir = workdir();
  const std::string csv = (dir / "agg_sample.csv").string();
  const std::string model = (dir / "agg.txt").string();

  REQUIRE(run_cli("simulate --model gumbel --n 300 --seed 3 --out " + csv).status == 0);
  auto agg = run_cli("aggregate --in " + csv + " --grid 1,2,3 --ce 0.8 --seed 5 --out " + model);
  CHECK(agg.status == 0);
  CHECK(agg.output.find("weights") != std::string::npos);

  std::ifstream ms(model);
  std::string header;
  std::getline(ms, header);
  CHECK(header == "aese-agg v1");

  auto ev = run_cli("eval --model " + model + " --truth gumbel --metric kl");
  CHECK(ev.status == 0);
}

TEST_CASE("bench command produces records, summaries and surfaces") {
  const fs::path dir = workdir();
  const fs::path out = dir / "bench_out";
  const std::string specfile = (dir / "tiny.spec").string();
  {
    std::ofstream os(specfile);
    os << "model = beta\nsizes = 60\nreplications = 2\npanels = 24\nnodes = 8\n"
       << "score_panels = 24\nscore_nodes = 8\ncandidates = 1,2\nseed = 11\n";
  }
  auto be = run_cli("bench --spec " + specfile + " --out-dir " + out.string());
  CHECK(be.status == 0);
  CHECK(be.output.find("KL distances") != std::string::npos);
  CHECK(fs::exists(out / "records.csv"));
  CHECK(fs::exists(out / "summary.csv"));
  CHECK(fs::exists(out / "surface_beta.csv"));
}

TEST_CASE("three-dimensional round trip through the uniform model") {
  const fs::path dir = workdir();
  const std::string csv = (dir / "u3.csv").string();
  const std::string model = (dir / "u3_fit.txt").string();
  REQUIRE(run_cli("simulate --model uniform --d 3 --n 300 --seed 9 --out " + csv).status == 0);
  REQUIRE(run_cli("fit --in " + csv + " --m 2,2,2 --out " + model).status == 0);
  auto ev = run_cli("eval --model " + model + " --truth uniform --d 3 --metric kl");
  CHECK(ev.status == 0);
  double kl = -1.0;
  std::istringstream(ev.output.substr(ev.output.find("kl") + 2)) >> kl;
  CHECK(kl >= 0.0);
  CHECK(kl < 0.5);
}

TEST_CASE("bad inputs exit nonzero with a message") {
  CHECK(run_cli("simulate --model weibull --n 10 --seed 1 --out /tmp/x.csv").status != 0);
  CHECK(run_cli("eval --model /nonexistent.txt --truth beta").status != 0);
  CHECK(run_cli("fit --in /nonexistent.csv --m 2,2 --out /tmp/x.txt").status != 0);
  const auto noargs = run_cli("");
  CHECK(noargs.status != 0);
}
