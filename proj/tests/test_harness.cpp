#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "siadmm/error.hpp"
#include "siadmm/harness.hpp"

using namespace siadmm;
namespace fs = std::filesystem;

namespace {

RunRecord fake_record(long rows, double scale) {
  RunRecord r;
  for (long k = 0; k < rows; ++k) {
    RunRow row;
    row.k = k;
    row.samples_x = static_cast<std::uint64_t>(10 * k * k);
    row.samples_y = static_cast<std::uint64_t>(k);
    row.err_x = scale / (1.0 + k);
    row.err_y = 2.0 * scale / (1.0 + k);
    row.err_u_G = scale;
    r.rows.push_back(row);
  }
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig tiny_lasso(const std::string& out) {
  auto c = ExperimentConfig::defaults("lasso-compare");
  c.replications = 2;
  c.budget = 20000;
  c.record_points = 50;
  c.out_dir = out;
  return c;
}

}  // namespace

TEST_CASE("config round trip and hashing") {
  for (const auto& kind : experiment_kinds()) {
    const auto c = ExperimentConfig::defaults(kind);
    const auto j = c.to_json();
    const auto back = ExperimentConfig::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.hash() == c.hash());
    CHECK_NOTHROW(c.validate());
  }
  auto a = ExperimentConfig::defaults("sa-rate");
  auto b = a;
  b.out_dir = "/elsewhere";
  CHECK(a.hash() == b.hash());
  b.rho = 3.0;
  CHECK(a.hash() != b.hash());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(ExperimentConfig::defaults("nope"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"kind", "sa-rate"}, {"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json({{"kind", "sa-rate"}, {"rho", "x"}}), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json(nlohmann::json::array()), ConfigError);
  auto c = ExperimentConfig::defaults("lasso-compare");
  c.algorithms.push_back("dsa");
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ExperimentConfig::defaults("distreg-compare");
  c.eta = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  const auto partial = ExperimentConfig::from_json({{"kind", "lasso-compare"}, {"rho", 50.0}});
  CHECK(partial.rho == 50.0);
  CHECK(partial.budget == ExperimentConfig::defaults("lasso-compare").budget);
}

TEST_CASE("align: means, errors and decimation") {
  std::vector<RunRecord> recs = {fake_record(101, 1.0), fake_record(101, 3.0)};
  const auto full = align_by_samples(recs, ErrorField::x, 1000);
  REQUIRE(full.size() == 101);
  for (std::size_t i = 0; i < full.size(); ++i) {
    CHECK(full.mean[i] == doctest::Approx(2.0 / (1.0 + i)));
    CHECK(full.t[i] == 10.0 * i * i + i);
    if (i) CHECK(full.t[i] > full.t[i - 1]);
  }
  const auto dec = align_by_samples(recs, ErrorField::xy, 11);
  REQUIRE(dec.size() == 11);
  CHECK(dec.t.front() == 0.0);
  CHECK(dec.t.back() == 10.0 * 100 * 100 + 100);
  CHECK(dec.mean.back() == doctest::Approx(6.0 / 101.0));
  const auto outer = align_by_outer(recs, ErrorField::G);
  CHECK(outer.t[7] == 7.0);
  CHECK(outer.std_error[7] == doctest::Approx(1.0));

  recs[1].rows[3].samples_x += 1;
  CHECK_THROWS_AS(align_by_samples(recs, ErrorField::x), ConfigError);
  recs[1].rows.pop_back();
  CHECK_THROWS_AS(align_by_outer(recs, ErrorField::x), ConfigError);
}

TEST_CASE("small statistics helpers") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
  CHECK(regression_slope({0.0, 1.0, 2.0}, {1.0, 3.0, 5.0}) == doctest::Approx(2.0));
  CHECK_THROWS_AS(median({}), ConfigError);
}

TEST_CASE("experiment outputs are reproducible byte for byte") {
  const fs::path base = fs::temp_directory_path() / "siadmm_harness_test";
  fs::remove_all(base);
  const auto r1 = run_experiment(tiny_lasso((base / "a").string()));
  run_experiment(tiny_lasso((base / "b").string()));
  for (std::string f : {"summary.json", "curve_si-admm.csv", "curve_sadm0.csv",
                        "runs/si-admm_rep000.csv", "runs/sadm1_rep001.csv",
                        "bound_si-admm.csv"}) {
    CAPTURE(f);
    const auto a = slurp(base / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(base / "b" / f));
  }
  // every algorithm sees the SI-ADMM sample count
  for (const auto& alg : r1.algorithms) {
    for (std::size_t r = 0; r < alg.runs.size(); ++r)
      CHECK(alg.runs[r].rows.back().samples_total() ==
            r1.algorithms.front().runs[r].rows.back().samples_total());
    for (std::size_t i = 1; i < alg.curve.size(); ++i) CHECK(alg.curve.t[i] > alg.curve.t[i - 1]);
  }
  CHECK(r1.summary["sample_accounting_ok"] == true);
  CHECK(r1.summary["bound"]["violations"].get<long>() >= 0);
  fs::remove_all(base);
}

TEST_CASE("seeds are shared across algorithms and differ across replications") {
  const auto c = ExperimentConfig::defaults("lasso-compare");
  CHECK(sample_seed(c, 0, "x") != sample_seed(c, 1, "x"));
  CHECK(sample_seed(c, 0, "x") != sample_seed(c, 0, "y"));
  CHECK(instance_seed(c) != instance_seed(c, 1));
  auto d = c;
  d.seed = 2;
  CHECK(sample_seed(c, 0, "x") != sample_seed(d, 0, "x"));
}
