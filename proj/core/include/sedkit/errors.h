// Copyright 2026 The sedkit Authors.
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

#ifndef SEDKIT_ERRORS_H_
#define SEDKIT_ERRORS_H_

#include <stdexcept>
#include <string>

namespace sedkit {

// Bad user input: malformed documents, out-of-range ids, violated
// preconditions. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Syntax errors in matrix files, logs and configs.
class ParseError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Failures while running an otherwise valid request (divergent training,
// unwritable output). The CLI maps these to exit code 2.
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Version string baked into reports.
const char* Version();

}  // namespace sedkit

#endif  // SEDKIT_ERRORS_H_
