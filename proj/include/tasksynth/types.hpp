// Copyright 2026 The Tasksynth Authors
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
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace tasksynth {

template <class Scalar_, int Rows_ = Eigen::Dynamic>
using vec_type = Eigen::Matrix<Scalar_, Rows_, 1>;

template <class Scalar_, int Rows_ = Eigen::Dynamic, int Cols_ = Eigen::Dynamic>
using colmat_type = Eigen::Matrix<Scalar_, Rows_, Cols_, Eigen::ColMajor>;

using Vector = vec_type<double>;
using Matrix = colmat_type<double>;

/// n x d table of dense category indices. Column-major so that per-column
/// scans (marginals, contingency tables) walk contiguous memory.
using CategoryMatrix = colmat_type<std::int32_t>;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column index or cardinality mismatch against a Schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Caller supplied an argument outside the documented domain.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// An object was used in a state its contract forbids (e.g. budgets assigned
/// twice, a required marginal missing).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// A request the library deliberately refuses to serve.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing input files.
class IngestionError : public Error {
 public:
  using Error::Error;
};

}  // namespace tasksynth
