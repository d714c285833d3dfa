// Copyright 2026 The perturbml Authors
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

#ifndef PERTURBML_ERRORS_HPP_
#define PERTURBML_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace perturbml {

// Base class for every error thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

// A mechanism was invoked on data it does not apply to.
class WrongKindError : public Error {
 public:
  using Error::Error;
};

class UnsupportedFamilyError : public Error {
 public:
  using Error::Error;
};

class NonBinaryDataError : public Error {
 public:
  using Error::Error;
};

class NonFiniteObjectiveError : public Error {
 public:
  using Error::Error;
};

class AlphaBelowTwoError : public Error {
 public:
  using Error::Error;
};

class MaxItersExceededError : public Error {
 public:
  using Error::Error;
};

// A (problem, regularizer, tail) combination with no entry in the rate table.
class InvalidCombinationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleQueryError : public Error {
 public:
  using Error::Error;
};

class MechanismMismatchError : public Error {
 public:
  using Error::Error;
};

class IntractableInstanceError : public Error {
 public:
  using Error::Error;
};

class NonPositiveEntropyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace perturbml

#endif  // PERTURBML_ERRORS_HPP_
