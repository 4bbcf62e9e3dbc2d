// Copyright 2026 The nsgame Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NSGAME_ERRORS_H_
#define NSGAME_ERRORS_H_

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace nsgame {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid experiment, strategy, or CLI configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized input (stream, behavior, memo table).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Misuse of the choice oracle, e.g. unordered concurrent memo writes.
class OracleFault : public Error {
 public:
  using Error::Error;
};

// A strategy broke its declared access contract or failed internally.
class StrategyFault : public Error {
 public:
  using Error::Error;
};

// Behavior tables whose rows do not sum to one, or with entries outside [0,1].
class NotNormalizedError : public Error {
 public:
  using Error::Error;
};

class EnumerationBudgetExceeded : public Error {
 public:
  EnumerationBudgetExceeded(double required, double budget)
      : Error("enumeration needs " + Format(required) + " function tuples, budget is " + Format(budget)),
        required_(required) {}

  double required() const { return required_; }

  static std::string Format(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  }

 private:
  double required_;
};

}  // namespace nsgame

#endif  // NSGAME_ERRORS_H_
