#include <algorithm>
#include <map>
#include <string>

#include "doctest.h"
#include "plancluster/data.hpp"
#include "plancluster/errors.hpp"
#include "plancluster/features.hpp"

using namespace plancluster;

namespace {

SyntheticFamilySpec swings(std::vector<int> params, std::size_t per_cluster, std::uint64_t seed) {
  SyntheticFamilySpec s;
  s.parameters = std::move(params);
  s.plans_per_cluster = per_cluster;
  s.seed = seed;
  return s;
}

std::size_t count(const std::vector<FeatureSequence>& seqs, const std::string& id, FeatureClass c) {
  for (const auto& s : seqs)
    if (s.dimension_id == id)
      return static_cast<std::size_t>(std::count_if(s.elements.begin(), s.elements.end(),
                                                    [&](const auto& e) { return e.cls == c; }));
  return 0;
}

}  // namespace

TEST_CASE("half swings: labels, names and sign changes") {
  const auto plans = generate_synthetic(swings({1, 2}, 10, 7));
  REQUIRE(plans.size() == 20);
  std::map<std::string, int> per_label;
  for (const auto& p : plans) ++per_label[p.label];
  CHECK(per_label == std::map<std::string, int>{{"j1", 10}, {"j2", 10}});
  CHECK(plans.front().plan.name() == "hs_j1_000");
  CHECK(plans.back().plan.name() == "hs_j2_009");
  for (const auto& p : plans) {
    const int j = p.label == "j1" ? 1 : 2;
    const auto& s0 = p.plan.state()[0];
    CHECK(find_roots(s0.trajectory, s0.bounds).size() == static_cast<std::size_t>(j));
    CHECK(p.plan.state().size() == 2);
    CHECK(p.plan.control().size() == 1);
  }
}

TEST_CASE("property: half swing root counts over seeds and parameters") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto plans = generate_synthetic(swings({1, 2, 3, 4}, 8, seed));
    for (const auto& p : plans) {
      const auto j = static_cast<std::size_t>(p.label[1] - '0');
      const auto& s0 = p.plan.state()[0];
      CHECK(find_roots(s0.trajectory, s0.bounds).size() == j);
      CHECK(count(extract(p.plan, ExtractionConfig{}), "s0", FeatureClass::Root) == j);
    }
  }
}

TEST_CASE("saturation arcs: one upper arc per parameter step") {
  SyntheticFamilySpec s = swings({1, 2, 3}, 6, 11);
  s.family = SyntheticFamily::SaturationArcs;
  const auto plans = generate_synthetic(s);
  REQUIRE(plans.size() == 18);
  CHECK(plans.front().plan.name() == "sa_c1_000");
  for (const auto& p : plans) {
    const auto c = static_cast<std::size_t>(p.label[1] - '0');
    const auto& c0 = p.plan.control()[0];
    const auto arcs = find_constrained_arcs(c0.trajectory, *c0.bounds, 0.01 * c0.bounds->range());
    CHECK(std::count_if(arcs.begin(), arcs.end(), [](const auto& a) {
            return a.cls == FeatureClass::UpperBound;
          }) == static_cast<std::ptrdiff_t>(c));
    const auto& s0 = p.plan.state()[0];
    CHECK(find_roots(s0.trajectory, s0.bounds).empty());
  }
}

TEST_CASE("determinism and jitter") {
  const auto a = generate_synthetic(swings({1, 2}, 5, 99));
  const auto b = generate_synthetic(swings({1, 2}, 5, 99));
  const auto c = generate_synthetic(swings({1, 2}, 5, 100));
  REQUIRE(a.size() == b.size());
  bool any_differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(plan_to_json(a[i].plan) == plan_to_json(b[i].plan));
    any_differs = any_differs || !(a[i].plan == c[i].plan);
  }
  CHECK(any_differs);

  SyntheticFamilySpec still = swings({2}, 4, 5);
  still.amplitude_jitter = still.phase_jitter = still.time_warp_jitter = 0.0;
  const auto same = generate_synthetic(still);
  for (const auto& p : same) {
    const MotionPlan renamed("x", p.plan.t_f(), p.plan.state(), p.plan.control());
    CHECK(renamed == MotionPlan("x", same[0].plan.t_f(), same[0].plan.state(), same[0].plan.control()));
  }
}

TEST_CASE("validation") {
  auto bad = swings({1}, 1, 0);
  bad.amplitude_jitter = 0.5;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = swings({}, 1, 0);
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = swings({0}, 1, 0);
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = swings({1}, 0, 0);
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = swings({1}, 1, 0);
  bad.knots = 4;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
  bad = swings({1}, 1, 0);
  bad.phase_jitter = -0.1;
  CHECK_THROWS_AS(generate_synthetic(bad), ConfigError);
}
