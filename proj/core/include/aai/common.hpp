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

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace aai {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Coarse failure classes; the CLI maps these to exit codes.
enum class ErrorCategory { config, data, numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

#define AAI_ERROR_TYPE(Name, category)                       \
  class Name : public Error {                                \
   public:                                                   \
    explicit Name(const std::string& what)                   \
        : Error(ErrorCategory::category, #Name ": " + what) {} \
  }

AAI_ERROR_TYPE(ConfigError, config);
AAI_ERROR_TYPE(SelectorError, config);

AAI_ERROR_TYPE(DegenerateSignal, data);
AAI_ERROR_TYPE(TooShort, data);
AAI_ERROR_TYPE(InvalidCutoff, data);
AAI_ERROR_TYPE(DegenerateCoordinate, data);
AAI_ERROR_TYPE(NegativeRadicand, data);
AAI_ERROR_TYPE(ConstantChannel, data);
AAI_ERROR_TYPE(ShapeError, data);
AAI_ERROR_TYPE(PersistenceError, data);
AAI_ERROR_TYPE(LoadError, data);
AAI_ERROR_TYPE(SchemaError, data);
AAI_ERROR_TYPE(EmptyBatch, data);
AAI_ERROR_TYPE(UndefinedCorrelation, data);
AAI_ERROR_TYPE(EmptyEvaluation, data);

AAI_ERROR_TYPE(NumericalError, numerical);

#undef AAI_ERROR_TYPE

const char* error_category_name(ErrorCategory category);

// Process exit code convention: 2 config, 3 data, 4 numerical.
int exit_code_for(ErrorCategory category);

// Deterministic random source. All distributions are derived from the raw
// mt19937_64 stream by hand so that results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t raw() { return engine_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Box-Muller with one cached value.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // [0, n)
  std::uint64_t integer(std::uint64_t n) { return n == 0 ? 0 : engine_() % n; }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::swap(values[i - 1], values[integer(i)]);
    }
  }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Stable seed derivation for per-speaker / per-utterance streams
// (splitmix64 finalizer over the combined words).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (a + 1) +
                    0xbf58476d1ce4e5b9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ShapeError(what);
}

}  // namespace aai
