#include <doctest.h>

#include "qmem/io.hpp"
#include "qmem/paperlib.hpp"
#include "qmem/report.hpp"
#include "test_support.hpp"

using namespace qmem;

TEST_CASE("matrices serialize row-major with [re, im] entries") {
  ComplexMatrix m(2, 2);
  m << Complex(1, 2), Complex(3, 4), Complex(5, 6), Complex(7, 8);
  const auto j = io::to_json(m);
  CHECK(j["rows"] == 2);
  CHECK(j["entries"][1][0] == 3.0);
  CHECK(j["entries"][2][1] == 6.0);
  CHECK(max_abs_diff(io::complex_matrix_from_json(j, ""), m) == 0.0);
}

TEST_CASE("circuits round-trip") {
  for (const std::string name : {"fig2", "fig3"}) {
    const auto proc = paperlib::circuit(name);
    const auto back = io::circuit_from_json(io::parse(io::to_json(proc).dump()));
    CHECK(max_abs_diff(all_pattern_statistics(proc), all_pattern_statistics(back)) == 0.0);
    const auto rendered = io::circuit_from_json(io::parse(report::render(proc)));
    CHECK(max_abs_diff(all_pattern_statistics(proc), all_pattern_statistics(rendered)) == 0.0);
  }
}

TEST_CASE("families and distributions round-trip through rounded output") {
  std::mt19937_64 rng(51);
  const auto fam = qrf_family(random_memoryless_model(2, 3, rng));
  const auto text = report::render(fam, report::Format::kJson);
  const auto back = io::family_from_json(io::parse(text));
  CHECK(back.is_complete());
  CHECK(max_abs_diff(fam, back) < 1e-11);

  const auto& dist = fam.at(0b101u);
  const auto j = io::to_json(dist);
  CHECK(j["pattern"] == "101");
  CHECK(j["dims"].size() == 2);
  const auto d2 = io::distribution_from_json(j);
  CHECK((d2.probs() - dist.probs()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("models round-trip") {
  std::mt19937_64 rng(52);
  const auto cm = support::random_classical(rng, 3);
  const auto cm2 = io::classical_model_from_json(io::to_json(cm));
  CHECK((cm2.p1() - cm.p1()).norm() == 0.0);
  CHECK((cm2.steps()[1].entries() - cm.steps()[1].entries()).norm() == 0.0);

  const auto qm = random_memoryless_model(2, 3, rng);
  const auto qm2 = io::quantum_model_from_json(io::to_json(qm));
  CHECK(max_abs_diff(qrf_family(qm), qrf_family(qm2)) == 0.0);
}

TEST_CASE("syntax errors carry the line") {
  const std::string text = "{\n  \"n_times\": 2,\n  \"outcome_dim\": 2\n  \"entries\": []\n}";
  try {
    (void)io::parse(text, "family.json");
    FAIL("expected InputError");
  } catch (const io::InputError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("family.json:4") != std::string::npos);
  }
}

TEST_CASE("field errors name the field") {
  auto field_of = [](const std::string& text) {
    try {
      (void)io::family_from_json(io::parse(text));
    } catch (const io::InputError& e) {
      return e.field();
    }
    return std::string("<none>");
  };
  CHECK(field_of(R"({"outcome_dim": 2, "entries": []})") == "/n_times");
  CHECK(field_of(R"({"n_times": "2", "outcome_dim": 2, "entries": []})") == "/n_times");
  CHECK(field_of(R"({"n_times": 2, "outcome_dim": 2, "entries": [{"pattern": "101", "probs": [1]}]})") ==
        "/entries/0/pattern");
  CHECK(field_of(R"({"n_times": 2, "outcome_dim": 2, "entries": [{"pattern": "10", "probs": [0.5, 0.4]}]})") ==
        "/entries/0/probs");
  CHECK(field_of(R"({"n_times": 2, "outcome_dim": 2, "entries": [{"pattern": "10", "probs": [1.5, -0.5]}]})") ==
        "/entries/0/probs");
  CHECK(field_of(R"({"n_times": 2, "outcome_dim": 2, "entries": [{"pattern": "10", "probs": [0.5, "x"]}]})") ==
        "/entries/0/probs/1");
  CHECK(field_of(R"({"n_times": 1, "outcome_dim": 2, "entries": [{"pattern": "1", "probs": [1, 0]},
                     {"pattern": "1", "probs": [1, 0]}]})") == "/entries/1/pattern");
}

TEST_CASE("invalid circuits are input errors") {
  auto j = io::to_json(paperlib::build_hidden_memory_circuit());
  j["steps"][0]["kraus_ops"][0]["entries"][0] = io::Json::array({2.0, 0.0});
  CHECK_THROWS_AS(io::circuit_from_json(j), io::InputError);
  auto k = io::to_json(paperlib::build_hidden_memory_circuit());
  k["n_times"] = 5;
  CHECK_THROWS_AS(io::circuit_from_json(k), io::InputError);
  auto m = io::to_json(paperlib::build_hidden_memory_circuit());
  m["initial_state"]["rows"] = 3;
  CHECK_THROWS_AS(io::circuit_from_json(m), io::InputError);
}

TEST_CASE("numbers print with 12 significant digits") {
  CHECK(report::number(1.0 / 3.0) == "0.333333333333");
  CHECK(report::number(0.125) == "0.125");
  const auto r = report::rounded(io::Json{{"x", 2.0 / 3.0}, {"n", 3}});
  CHECK(r.dump() == R"({"x":0.666666666667,"n":3})");
}

TEST_CASE("analysis reports serialize their verdict and sites") {
  const auto fam = all_pattern_statistics(paperlib::build_hidden_memory_circuit());
  const auto j = io::to_json(witness_hidden_memory(fam));
  CHECK(j["verdict"] == "HIDDEN_MEMORY_NONMARKOVIAN_SUB");
  CHECK(j["markov_sub"]["site"]["pattern"] == "1011");
  CHECK(j["markov_sub"]["site"]["target_time"] == 4);
  const auto table = report::render(witness_hidden_memory(fam), report::Format::kTable);
  CHECK(table.find("HIDDEN_MEMORY_NONMARKOVIAN_SUB") != std::string::npos);
  const auto csv = report::render(fam.full(), report::Format::kCsv);
  CHECK(csv.find("x1,x2,x3,x4,probability") != std::string::npos);
}
