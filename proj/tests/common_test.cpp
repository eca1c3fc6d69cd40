// Copyright 2026 The AAI Toolkit Authors. All rights reserved.
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

#include "aai/common.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"

namespace aai {
namespace {

TEST_CASE("rng is deterministic per seed") {
  Rng a(12345);
  Rng b(12345);
  for (int i = 0; i < 100; ++i) CHECK(a.raw() == b.raw());

  Rng c(12345);
  Rng d(54321);
  bool all_equal = true;
  for (int i = 0; i < 10; ++i) all_equal &= (c.raw() == d.raw());
  CHECK_FALSE(all_equal);
}

TEST_CASE("rng uniform stays in range") {
  Rng rng(7);
  double lo = 1.0;
  double hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
  }
  CHECK(lo < 0.05);
  CHECK(hi > 0.95);

  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform(-3.0, 2.0);
    CHECK(u >= -3.0);
    CHECK(u < 2.0);
  }
}

TEST_CASE("rng normal has sane first moments") {
  Rng rng(11);
  const int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.normal();
    sum += x;
    sum_sq += x * x;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sum_sq / n - 1.0) < 0.02);
}

TEST_CASE("rng integer covers [0, n) and shuffle permutes") {
  Rng rng(3);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const std::uint64_t v = rng.integer(5);
    CHECK(v < 5);
    seen.insert(v);
  }
  CHECK(seen.size() == 5);
  CHECK(rng.integer(0) == 0);

  std::vector<int> values(20);
  for (int i = 0; i < 20; ++i) values[i] = i;
  std::vector<int> shuffled = values;
  rng.shuffle(shuffled);
  CHECK(shuffled != values);
  std::sort(shuffled.begin(), shuffled.end());
  CHECK(shuffled == values);
}

TEST_CASE("derive_seed is stable and argument sensitive") {
  CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
  CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
  CHECK(derive_seed(1, 2) != derive_seed(2, 2));
  CHECK(derive_seed(1, 2) == derive_seed(1, 2, 0));

  std::set<std::uint64_t> values;
  for (std::uint64_t a = 0; a < 30; ++a) {
    for (std::uint64_t b = 0; b < 30; ++b) values.insert(derive_seed(9, a, b));
  }
  CHECK(values.size() == 900);
}

TEST_CASE("error categories map to exit codes") {
  CHECK(exit_code_for(ErrorCategory::config) == 2);
  CHECK(exit_code_for(ErrorCategory::data) == 3);
  CHECK(exit_code_for(ErrorCategory::numerical) == 4);

  CHECK(ConfigError("x").category() == ErrorCategory::config);
  CHECK(SelectorError("x").category() == ErrorCategory::config);
  CHECK(ShapeError("x").category() == ErrorCategory::data);
  CHECK(LoadError("x").category() == ErrorCategory::data);
  CHECK(NumericalError("x").category() == ErrorCategory::numerical);

  CHECK(std::string(error_category_name(ErrorCategory::config)) == "config");
  CHECK(std::string(error_category_name(ErrorCategory::data)) == "data");
  CHECK(std::string(error_category_name(ErrorCategory::numerical)) ==
        "numerical");
}

TEST_CASE("error messages carry the error type name") {
  const ShapeError err("rows mismatch");
  CHECK(std::string(err.what()) == "ShapeError: rows mismatch");
}

TEST_CASE("require throws ShapeError on failure") {
  CHECK_NOTHROW(require(true, "fine"));
  CHECK_THROWS_AS(require(false, "broken"), ShapeError);
}

}  // namespace
}  // namespace aai
