#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "qmem/io.hpp"
#include "qmem/paperlib.hpp"
#include "qmem/report.hpp"

using namespace qmem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

Run run(const std::string& args) {
  const std::string cmd = std::string(QMEM_CLI_PATH) + " " + args + " >cli_out.txt 2>cli_err.txt";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp("cli_out.txt"), slurp("cli_err.txt")};
}

std::string data(const std::string& name) { return std::string(QMEM_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("exported circuits match the shipped data files") {
  for (const std::string name : {"fig2", "fig3"}) {
    const auto r = run("export-circuit " + name);
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(data(name + ".json")));
  }
}

TEST_CASE("simulate prints the full hidden-memory table") {
  const auto r = run("simulate " + data("fig2.json") + " --schedule 1111 --format json");
  REQUIRE(r.code == 0);
  const auto dist = io::distribution_from_json(io::parse(r.out));
  for (Index i = 0; i < dist.size(); ++i) {
    CHECK(std::abs(dist.probs()(i) - (dist.outcomes_of(i)[2] == 0 ? 0.125 : 0.0)) < 1e-12);
  }
  const auto table = run("simulate " + data("fig2.json") + " --schedule 1111");
  CHECK(table.out.find("0.125") != std::string::npos);
}

TEST_CASE("simulate with nothing probed gives a single row") {
  const auto r = run("simulate " + data("fig2.json") + " --schedule 0000 --format csv");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("I,I,I,I,1\n") != std::string::npos);
}

TEST_CASE("simulate agrees with trajectory enumeration") {
  const auto r = run("simulate " + data("fig3.json") + " --schedule 1010 --format json");
  REQUIRE(r.code == 0);
  const auto dist = io::distribution_from_json(io::parse(r.out));
  const auto want = oracle::trajectory_distribution(paperlib::build_incompatible_circuit(),
                                                    ProbeSchedule::from_bitstring("1010"));
  for (Index i = 0; i < dist.size(); ++i) CHECK(std::abs(dist.probs()(i) - want[i]) < 1e-9);
}

TEST_CASE("simulate output feeds analyze unchanged") {
  const auto fam2 = run("simulate " + data("fig2.json") + " --format json --out fam2.json");
  REQUIRE(fam2.code == 0);
  const auto a2 = run("analyze fam2.json --format json");
  REQUIRE(a2.code == 0);
  CHECK(io::parse(a2.out)["verdict"] == "HIDDEN_MEMORY_NONMARKOVIAN_SUB");

  REQUIRE(run("simulate " + data("fig3.json") + " --format json --out fam3.json").code == 0);
  const auto a3 = run("analyze fam3.json --format json");
  REQUIRE(a3.code == 0);
  CHECK(io::parse(a3.out)["verdict"] == "HIDDEN_MEMORY_INCOMPATIBLE");

  std::mt19937_64 rng(61);
  spit("famq.json", report::render(qrf_family(random_memoryless_model(2, 4, rng)), report::Format::kJson));
  const auto aq = run("analyze famq.json --format json");
  REQUIRE(aq.code == 0);
  CHECK(io::parse(aq.out)["verdict"] == "CONSISTENT_WITH_MEMORYLESS");
}

TEST_CASE("exit codes") {
  spit("broken.json", "{\n  \"n_times\": 2,\n  \"outcome_dim\" 2\n}\n");
  const auto bad = run("analyze broken.json");
  CHECK(bad.code == 2);
  CHECK(bad.err.find("broken.json:3") != std::string::npos);

  const auto len = run("simulate " + data("fig2.json") + " --schedule 101");
  CHECK(len.code == 2);
  CHECK(len.err.find("--schedule") != std::string::npos);

  CHECK(run("simulate " + data("fig2.json") + " --schedule 10x1").code == 2);
  CHECK(run("analyze missing-file.json").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("analyze fam2.json --format xml").code == 2);

  spit("partial.json", R"({"n_times": 2, "outcome_dim": 2, "entries": [{"pattern": "11", "probs": [0.25, 0.25, 0.25, 0.25]}]})");
  const auto partial = run("analyze partial.json");
  CHECK(partial.code == 3);
  CHECK(partial.err.find("incomplete") != std::string::npos);
}

TEST_CASE("certify is deterministic given the seed") {
  const std::string args = "certify fam2.json --starts 1 --seed 7 --max-iters 300 --format json";
  const auto a = run(args);
  const auto b = run(args);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto j = io::parse(a.out);
  CHECK(j["conclusion"] == "NO_MODEL_WITNESSED");
  CHECK(j["per_start_losses"].size() == 1);
  CHECK(j["residual"].get<double>() > 0.0);
}

TEST_CASE("certify finds a model for a self-generated family") {
  std::mt19937_64 rng(62);
  spit("fam_small.json", report::render(qrf_family(random_memoryless_model(2, 2, rng)), report::Format::kJson));
  const auto r = run("certify fam_small.json --starts 4 --seed 1 --format json");
  REQUIRE(r.code == 0);
  CHECK(io::parse(r.out)["conclusion"] == "MODEL_FOUND");
}

TEST_CASE("reproduce passes in every format") {
  const auto t = run("reproduce");
  CHECK(t.code == 0);
  CHECK(t.out.find("ALL PASS") != std::string::npos);
  CHECK(t.out.find("FAIL") == std::string::npos);

  const auto j = run("reproduce --format json --tol 1e-15");
  CHECK(j.code == 0);
  CHECK(io::parse(j.out)["pass"] == true);

  const auto c = run("reproduce --format csv");
  CHECK(c.code == 0);
  CHECK(c.out.find("FAIL") == std::string::npos);
}
