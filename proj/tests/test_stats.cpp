#include <cmath>
#include <cstdio>
#include <fstream>
#include <doctest.h>

#include "core/error.hpp"
#include "core/evolution.hpp"
#include "core/stats.hpp"

using namespace qpinem;

namespace {

JointDistribution small_table(const std::vector<Axis>& axes, const std::vector<double>& t) {
  JointDistribution d;
  d.axes = axes;
  d.table = t;
  d.total_mass = d.recompute_mass();
  return d;
}

// Deterministic pseudo-random probabilities for property checks.
struct Lcg {
  std::uint64_t s;
  double next() {
    s = s * 6364136223846793005ULL + 1442695040888963407ULL;
    return static_cast<double>(s >> 11) / 9007199254740992.0;
  }
};

}  // namespace

TEST_CASE("to_distribution is the Born rule with relabeled axes") {
  Box box{3, {-2, -2}, {2, 2}};
  JointAmplitude st;
  st.box = box;
  st.amp.assign(box.size(), Complex(0, 0));
  int j[2] = {1, -1};
  st.amp[box.index(2, j)] = Complex(0.6, 0.8);
  JointDistribution d = to_distribution(st);
  CHECK(d.axes.size() == 3);
  CHECK(d.axes[0].name == "photon");
  CHECK(d.axes[1].name == "e1");
  CHECK(d.axes[2].name == "e2");
  CHECK(d.value_or_zero({2, 1, -1}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.total_mass == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("marginalize keeps mass and collapses axes") {
  JointDistribution d = small_table({{"a", 0, 1}, {"b", -1, 1}},
                                    {0.1, 0.2, 0.05, 0.15, 0.3, 0.2});
  JointDistribution all = marginalize(d, {"a", "b"});
  CHECK(all.table == d.table);
  JointDistribution only_a = marginalize(d, {"a"});
  CHECK(only_a.table.size() == 2);
  CHECK(only_a.value_or_zero({0}) == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(only_a.value_or_zero({1}) == doctest::Approx(0.65).epsilon(1e-14));
  CHECK(only_a.total_mass == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(marginalize(d, {"nope"}), Error);
}

TEST_CASE("pcc: product distribution is uncorrelated") {
  std::vector<double> pa{0.2, 0.5, 0.3};
  std::vector<double> pb{0.6, 0.4};
  std::vector<double> t;
  for (double a : pa)
    for (double b : pb) t.push_back(a * b);
  JointDistribution d = small_table({{"a", -1, 1}, {"b", 0, 1}}, t);
  PccResult r = pcc(d, "a", "b");
  CHECK(r.defined);
  CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("pcc: perfect anticorrelation and symmetry") {
  JointDistribution d = small_table({{"a", -1, 1}, {"b", -1, 1}},
                                    {0, 0, 0.5, 0, 0, 0, 0.5, 0, 0});
  PccResult r = pcc(d, "a", "b");
  CHECK(r.defined);
  CHECK(r.value == doctest::Approx(-1.0).epsilon(1e-14));
  PccResult swapped = pcc(d, "b", "a");
  CHECK(swapped.value == doctest::Approx(r.value).epsilon(1e-15));
}

TEST_CASE("pcc: PCC stays within [-1, 1] on random tables") {
  Lcg rng{7};
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> t(12);
    for (double& v : t) v = rng.next();
    JointDistribution d = small_table({{"a", 0, 3}, {"b", 0, 2}}, t);
    normalize(d);
    PccResult r = pcc(d, "a", "b");
    REQUIRE(r.defined);
    CHECK(r.value >= -1.0 - 1e-12);
    CHECK(r.value <= 1.0 + 1e-12);
  }
}

TEST_CASE("pcc: degenerate axes are reported undefined, not zero") {
  JointDistribution d = small_table({{"a", 0, 1}, {"b", 0, 1}}, {0.5, 0, 0.5, 0});
  PccResult r = pcc(d, "a", "b");  // b is always 0
  CHECK_FALSE(r.defined);
  CHECK(std::isnan(r.value));
  CHECK(r.variance_b < 1e-18);
}

TEST_CASE("post_select conditions and renormalizes") {
  JointDistribution d = small_table({{"a", 0, 1}, {"b", 0, 1}}, {0.1, 0.3, 0.2, 0.4});
  PostSelectResult r = post_select(d, {{"a", 1}});
  CHECK(r.success_probability == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(r.dist.axes.size() == 1);
  CHECK(r.dist.value_or_zero({0}) == doctest::Approx(0.2 / 0.6).epsilon(1e-14));
  CHECK(r.dist.value_or_zero({1}) == doctest::Approx(0.4 / 0.6).epsilon(1e-14));

  JointDistribution delta = small_table({{"a", 0, 1}, {"b", 0, 1}}, {0, 0, 0, 1});
  PostSelectResult rd = post_select(delta, {{"a", 1}});
  CHECK(rd.dist.value_or_zero({1}) == doctest::Approx(1.0));

  CHECK_THROWS_AS(post_select(delta, {{"a", 0}}), Error);   // empty slice
  CHECK_THROWS_AS(post_select(delta, {{"zz", 0}}), Error);  // unknown axis
}

TEST_CASE("conditioning commutes with marginalizing non-overlapping axes") {
  Lcg rng{42};
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> t(3 * 2 * 4);
    for (double& v : t) v = rng.next();
    JointDistribution d = small_table({{"a", 0, 2}, {"b", 0, 1}, {"c", -2, 1}}, t);
    normalize(d);
    // condition on c, then drop b  vs  drop b, then condition on c
    JointDistribution left = marginalize(post_select(d, {{"c", 0}}).dist, {"a"});
    JointDistribution right = post_select(marginalize(d, {"a", "c"}), {{"c", 0}}).dist;
    REQUIRE(left.table.size() == right.table.size());
    for (std::size_t i = 0; i < left.table.size(); ++i) {
      CHECK(left.table[i] == doctest::Approx(right.table[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("tv_distance basics") {
  JointDistribution a = small_table({{"x", 0, 1}}, {1.0, 0.0});
  JointDistribution b = small_table({{"x", 0, 1}}, {0.0, 1.0});
  CHECK(tv_distance(a, b) == doctest::Approx(1.0));
  CHECK(tv_distance(a, a) == 0.0);
}

TEST_CASE("csv export lists nonzero entries with axis columns") {
  JointDistribution d = small_table({{"a", 0, 1}, {"b", -1, 0}}, {0.25, 0.0, 0.5, 0.25});
  std::string path = "test_stats_out.csv";
  write_csv(d, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b,probability");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);  // one zero entry skipped
  std::remove(path.c_str());
}

TEST_CASE("json export round-trips bit-exactly") {
  Lcg rng{99};
  std::vector<double> t(24);
  for (double& v : t) v = rng.next() * 1e-3;
  JointDistribution d = small_table({{"photon", 0, 3}, {"e1", -1, 1}, {"e2", 0, 1}}, t);
  std::string path = "test_stats_out.json";
  write_json(d, path, R"({"note":"round-trip"})");
  JointDistribution back = read_json(path);
  REQUIRE(back.axes.size() == d.axes.size());
  for (std::size_t i = 0; i < d.axes.size(); ++i) {
    CHECK(back.axes[i].name == d.axes[i].name);
    CHECK(back.axes[i].lo == d.axes[i].lo);
    CHECK(back.axes[i].hi == d.axes[i].hi);
  }
  REQUIRE(back.table.size() == d.table.size());
  for (std::size_t i = 0; i < d.table.size(); ++i) {
    CHECK(back.table[i] == d.table[i]);
  }
  CHECK(back.total_mass == d.total_mass);
  std::remove(path.c_str());
}
