/*
   Copyright 2026 The codebounds Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#ifndef CODEBOUNDS_ERROR_HPP
#define CODEBOUNDS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace codebounds {

/// Raised when an argument lies outside the documented parameter range.
class RangeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Base for optimizer failures that cannot be expressed as a solution status.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public SolverError {
public:
    using SolverError::SolverError;
};

class UnboundedError : public SolverError {
public:
    using SolverError::SolverError;
};

/// Malformed input files (graph JSON, kernel cache).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool cond, const std::string& what) {
    if (!cond) throw RangeError(what);
}

}  // namespace detail
}  // namespace codebounds

#endif  // CODEBOUNDS_ERROR_HPP
