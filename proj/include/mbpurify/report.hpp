// Copyright 2026 The mbpurify Authors
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

#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace mbpurify {

/// All floating-point output is rounded to 10 significant digits so reports
/// stay byte-identical across platforms.
inline std::string format_sig10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

/// Round-trips a value through the 10-significant-digit representation; JSON
/// reports store the rounded double so the serializer prints a stable form.
inline double round_sig10(double v) {
  return std::strtod(format_sig10(v).c_str(), nullptr);
}

}  // namespace mbpurify
