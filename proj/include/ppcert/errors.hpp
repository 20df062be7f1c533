// Copyright 2026 The ppcert Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PPCERT_ERRORS_HPP_
#define PPCERT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ppcert {

// Base class for all domain errors raised by the library. Input validation
// failures (malformed kernels, bad parameters) use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Conditioning on an output with zero marginal probability under the prior.
class ZeroEvidenceError : public Error {
 public:
  using Error::Error;
};

// A Gaussian prior that already determines the quantity being conditioned on.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// Correlation matrix with smallest eigenvalue at or below the rank tolerance;
// its condition number is unbounded.
class SingularCorrelationError : public Error {
 public:
  using Error::Error;
};

// Rejection sampler exceeded its attempt budget.
class SamplingExhaustedError : public Error {
 public:
  using Error::Error;
};

// Marginal moments required by a score do not exist (zero variance).
class UndefinedMomentsError : public Error {
 public:
  using Error::Error;
};

// Kernel shapes or index spaces do not line up for composition.
class IndexMismatchError : public Error {
 public:
  using Error::Error;
};

// A kernel required to be data-independent depends on the dataset.
class StructuralViolationError : public Error {
 public:
  using Error::Error;
};

// The certifier has no evaluation strategy for the requested prior class.
class UnsupportedPriorClassError : public Error {
 public:
  using Error::Error;
};

// Malformed input document; `where` names the offending field or row.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, const std::string& where)
      : Error(what + " (at " + where + ")"), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

}  // namespace ppcert

#endif  // PPCERT_ERRORS_HPP_
