// Copyright 2026 The odtalloc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "odtalloc/error.hpp"
#include "odtalloc/measures.hpp"
#include "oracles.hpp"

using namespace odtalloc;

namespace {

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "odtalloc_measures_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an odtalloc::Error");
  return ErrorCode::kInvalidArgument;
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v[k++] = x;
  return v;
}

}  // namespace

TEST_CASE("normalize") {
  CHECK(normalize(std::vector{2.0, 2.0}) == std::vector{0.5, 0.5});
  CHECK(normalize(std::vector{1.0}) == std::vector{1.0});
  CHECK(normalize(std::vector{1.0, 3.0}) == std::vector{0.25, 0.75});
  CHECK(code_of([] { normalize(std::vector{0.0, 0.0}); }) == ErrorCode::kAllZero);
  CHECK(code_of([] { normalize(std::vector{1.0, -1.0}); }) == ErrorCode::kNegativeWeight);
}

TEST_CASE("load_agents_csv") {
  SUBCASE("uniform 1-D") {
    auto m = load_agents_csv(write_temp("a1.csv", "id,y1,weight\na,0.0,1.0\nb,1.0,1.0\n"));
    CHECK(m.dim() == 1);
    CHECK(m.size() == 2);
    CHECK(m.weights() == std::vector{0.5, 0.5});
    CHECK(m.ids() == std::vector<std::string>{"a", "b"});
    CHECK(m.raw_total() == 2.0);
  }
  SUBCASE("single atom in R^2") {
    auto m = load_agents_csv(write_temp("a2.csv", "id,y1,y2,weight\na,0,0,1\n"));
    CHECK(m.dim() == 2);
    CHECK(m.points()[0].isZero());
    CHECK(m.weights() == std::vector{1.0});
  }
  SUBCASE("weights normalized, comments and blank lines skipped") {
    auto m = load_agents_csv(
        write_temp("a3.csv", "# agents\nid,y1,weight\n\na,0,1\n# x\nb,2,3\n"));
    CHECK(m.weights() == std::vector{0.25, 0.75});
    CHECK(m.points()[1][0] == 2.0);
  }
  SUBCASE("errors") {
    CHECK(code_of([] { load_agents_csv(write_temp("e1.csv", "id,y1,weight\na,zero,1\n")); }) ==
          ErrorCode::kParseError);
    CHECK(code_of([] { load_agents_csv(write_temp("e2.csv", "id,y1,weight\na,0,1,2\n")); }) ==
          ErrorCode::kDimensionMismatch);
    CHECK(code_of([] { load_agents_csv(write_temp("e3.csv", "name,y1,weight\na,0,1\n")); }) ==
          ErrorCode::kParseError);
    CHECK(code_of([] { load_agents_csv("/nonexistent/agents.csv"); }) == ErrorCode::kIoError);
  }
  SUBCASE("parse error names the line") {
    try {
      parse_agents_csv("id,y1,weight\na,0,1\n\nb,x,1\n");
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("line 4") != std::string::npos);
    }
  }
}

TEST_CASE("load_tasks_csv") {
  SUBCASE("single task") {
    auto t = load_tasks_csv(write_temp("t1.csv", "id,o1,d1,weight\nt1,1.0,0.0,1\n"));
    CHECK(t.dim() == 1);
    CHECK(t.origins()[0][0] == 1.0);
    CHECK(t.destinations()[0][0] == 0.0);
    CHECK(t.weights() == std::vector{1.0});
  }
  SUBCASE("symmetric weights") {
    auto t = parse_tasks_csv("id,o1,d1,weight\na,0,0,2\nb,1,1,2\n");
    CHECK(t.weights() == std::vector{0.5, 0.5});
  }
  SUBCASE("row arity disagrees with the header") {
    CHECK(code_of([] { parse_tasks_csv("id,o1,o2,d1,d2,weight\nt,0,0,0,1,1,1\n"); }) ==
          ErrorCode::kDimensionMismatch);
  }
  SUBCASE("origin and destination arity differ") {
    CHECK(code_of([] { parse_tasks_csv("id,o1,o2,d1,weight\nt,0,0,0,1\n"); }) ==
          ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("csv round trip reproduces points and weights") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 1 + static_cast<int>(rng.below(3));
    auto tasks = oracle::random_tasks(rng, 1 + rng.below(9), dim, false);
    auto agents = oracle::random_agents(rng, 1 + rng.below(9), dim, false);
    auto tasks2 = parse_tasks_csv(format_tasks_csv(tasks));
    auto agents2 = parse_agents_csv(format_agents_csv(agents));
    REQUIRE(tasks2.size() == tasks.size());
    REQUIRE(agents2.size() == agents.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      CHECK(tasks2.origins()[i] == tasks.origins()[i]);
      CHECK(tasks2.destinations()[i] == tasks.destinations()[i]);
      CHECK(std::abs(tasks2.weights()[i] - tasks.weights()[i]) <= 1e-12);
    }
    for (std::size_t j = 0; j < agents.size(); ++j) {
      CHECK(agents2.points()[j] == agents.points()[j]);
      CHECK(std::abs(agents2.weights()[j] - agents.weights()[j]) <= 1e-12);
    }
  }
}

TEST_CASE("constructed measures satisfy their invariants") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    auto agents = oracle::random_agents(rng, 1 + rng.below(20), 2, false);
    double total = 0.0;
    for (double w : agents.weights()) {
      CHECK(w >= 0.0);
      total += w;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  CHECK(code_of([] { DiscreteMeasure({vec({0.0}), vec({0.0, 1.0})}, std::vector{1.0, 1.0}); }) ==
        ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { DiscreteMeasure({}, std::vector<double>{}); }) ==
        ErrorCode::kInvalidArgument);
  // Coincident atoms are kept.
  DiscreteMeasure dup({vec({1.0}), vec({1.0})}, std::vector{1.0, 1.0});
  CHECK(dup.size() == 2);
}

TEST_CASE("index_pushforward") {
  SUBCASE("o + d") {
    TaskSet t({vec({1.0})}, {vec({0.0})}, std::vector{1.0});
    auto s = index_pushforward(t);
    CHECK(s.points()[0][0] == 1.0);
  }
  SUBCASE("zero") {
    TaskSet t({Vector::Zero(3)}, {Vector::Zero(3)}, std::vector{1.0});
    CHECK(index_pushforward(t).points()[0].isZero());
  }
  SUBCASE("distinct tasks sharing an index point") {
    TaskSet t({vec({0, 0}), vec({1, 1})}, {vec({2, 0}), vec({1, -1})}, std::vector{1.0, 1.0});
    auto s = index_pushforward(t);
    CHECK(s.points()[0] == vec({2, 0}));
    CHECK(s.points()[1] == vec({2, 0}));
  }
  SUBCASE("weights are copied bitwise") {
    Rng rng(3);
    for (int trial = 0; trial < 30; ++trial) {
      auto t = oracle::random_tasks(rng, 1 + rng.below(15), 2, false);
      auto s = index_pushforward(t);
      REQUIRE(s.size() == t.size());
      CHECK(s.weights() == t.weights());
      CHECK(s.ids() == t.ids());
    }
  }
}

TEST_CASE("project_lonlat") {
  const LonLat ref{18.07, 59.33};
  SUBCASE("reference maps to the origin") {
    auto p = project_lonlat(std::vector{ref}, ref);
    CHECK(p[0][0] == 0.0);
    CHECK(p[0][1] == 0.0);
  }
  SUBCASE("one degree north") {
    auto p = project_lonlat(std::vector{LonLat{ref.lon, ref.lat + 1.0}}, ref);
    CHECK(p[0][0] == doctest::Approx(0.0));
    CHECK(p[0][1] == doctest::Approx(111194.9).epsilon(1e-6));
  }
  SUBCASE("one degree east at 60N") {
    const LonLat at60{10.0, 60.0};
    auto p = project_lonlat(std::vector{LonLat{11.0, 60.0}}, at60);
    CHECK(p[0][0] == doctest::Approx(55597.5).epsilon(1e-6));
    CHECK(p[0][1] == 0.0);
  }
  SUBCASE("out of range") {
    CHECK(code_of([&] { project_lonlat(std::vector{LonLat{0.0, 91.0}}, ref); }) ==
          ErrorCode::kOutOfRange);
    CHECK(code_of([&] { project_lonlat(std::vector{LonLat{-181.0, 0.0}}, ref); }) ==
          ErrorCode::kOutOfRange);
  }
}
