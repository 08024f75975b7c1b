// Copyright 2026 The Shockline Authors
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

#ifndef SHOCKLINE_ERROR_HPP_
#define SHOCKLINE_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace shockline {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the function it was passed to.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// An operation was called with arguments violating its precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// A scenario or solver configuration is malformed or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A solver failed at run time (event cap exceeded, particle left the grid, ...).
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Too few usable points to fit a convergence rate.
class FitError : public Error {
 public:
  using Error::Error;
};

/// A Monte Carlo normalisation constant underflowed.
class UnderflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace shockline

#endif  // SHOCKLINE_ERROR_HPP_
