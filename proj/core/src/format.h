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

#ifndef SEDKIT_SRC_FORMAT_H_
#define SEDKIT_SRC_FORMAT_H_

#include <cmath>
#include <cstdio>
#include <string>

namespace sedkit::internal {

// Reals in reports use 12 significant digits; non-finite values become
// "nan"/"inf" in text and are never emitted into JSON by callers.
inline std::string FormatReal(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

}  // namespace sedkit::internal

#endif  // SEDKIT_SRC_FORMAT_H_
