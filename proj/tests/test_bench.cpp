#include <algorithm>
#include <set>
#include <string>

#include "doctest.h"
#include "plancluster/bench.hpp"
#include "plancluster/data.hpp"
#include "plancluster/errors.hpp"

using namespace plancluster;

namespace {

std::vector<MotionPlan> two_plans() {
  SyntheticFamilySpec s;
  s.parameters = {2};
  s.plans_per_cluster = 3;
  std::vector<MotionPlan> out;
  for (auto& p : generate_synthetic(s)) out.push_back(p.plan);
  return out;
}

}  // namespace

TEST_CASE("resample keeps bounds, values and shape") {
  const auto plan = two_plans()[0];
  const auto r = resample(plan, 200);
  CHECK(r.name() == plan.name());
  CHECK(r.t_f() == plan.t_f());
  REQUIRE(r.dimension_count() == plan.dimension_count());
  for (std::size_t k = 0; k < r.dimension_count(); ++k) {
    CHECK(r.dimension(k).bounds == plan.dimension(k).bounds);
    CHECK(r.dimension(k).trajectory.degree() == 1);
    CHECK(r.dimension(k).trajectory.breakpoints().size() == 200);
    CHECK(r.dimension(k).trajectory.evaluate(0.0) == plan.dimension(k).trajectory.evaluate(0.0));
  }
  CHECK_THROWS_AS(resample(plan, 1), ConfigError);
}

TEST_CASE("median_seconds") {
  int calls = 0;
  const double t = median_seconds([&] { ++calls; }, 5, 0.0);
  CHECK(calls == 6);
  CHECK(t >= 0.0);
}

TEST_CASE("run_bench rows and CSV") {
  BenchConfig cfg;
  cfg.sample_counts = {50, 120};
  cfg.repetitions = 3;
  cfg.min_batch_seconds = 0.0;
  cfg.max_pairs = 2;
  const auto rows = run_bench(two_plans(), cfg);
  REQUIRE(rows.size() == 2 * 2 * 3);
  std::set<std::string> pairs;
  for (const auto& r : rows) {
    pairs.insert(r.pair);
    CHECK(r.median_seconds >= 0.0);
    CHECK(r.features_a > 0);
    CHECK(r.features_b > 0);
  }
  CHECK(pairs == std::set<std::string>{"hs_j2_000|hs_j2_001", "hs_j2_000|hs_j2_002"});
  CHECK(rows[0].metric == "extract");
  CHECK(rows[1].metric == "kernel");
  CHECK(rows[2].metric == "dtw");
  CHECK(rows[0].samples == 50);
  CHECK(rows[3].samples == 120);
  const auto csv = bench_to_csv(rows);
  CHECK(csv.rfind("pair,samples,metric,median_seconds,features_a,features_b\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 13);
  CHECK(format_bench_table(rows).find("median [us]") != std::string::npos);
}

TEST_CASE("bench validation") {
  BenchConfig cfg;
  cfg.sample_counts = {1};
  CHECK_THROWS_AS(run_bench(two_plans(), cfg), ConfigError);
  cfg = BenchConfig{};
  cfg.repetitions = 0;
  CHECK_THROWS_AS(run_bench(two_plans(), cfg), ConfigError);
  cfg = BenchConfig{};
  CHECK_THROWS_AS(run_bench({two_plans()[0]}, cfg), ConfigError);
}
