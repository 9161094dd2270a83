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

#ifndef SEDKIT_REPORT_H_
#define SEDKIT_REPORT_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include "sedkit/workflow.h"

namespace sedkit {

enum class ReportFormat { kTabular, kStructured };

ReportFormat ParseReportFormat(std::string_view name);

// Provenance echoed into every report.
struct ReportContext {
  std::string command;      // e.g. "sweep"
  std::string config_json;  // JSON object; "{}" when there is nothing to echo
  std::uint64_t seed = 0;
};

// Byte-deterministic rendering of a sweep. Tabular output starts with
// '#'-prefixed provenance lines followed by a tab-separated table with
// columns k, scheme, condition, p_ed, err_total, err_detected,
// false_alarms, total_samples. Throws ValidationError for an empty result.
std::string EmitReport(const SweepResult& result, ReportFormat format,
                       const ReportContext& context);

// Same, plus the selected concepts and whether the threshold was met.
std::string EmitSelectionReport(const ConceptMatrix& m,
                                const SelectionResult& result,
                                ReportFormat format,
                                const ReportContext& context);

// Writes `document` to `path`; failures name the path.
void WriteDocument(const std::filesystem::path& path,
                   const std::string& document);

}  // namespace sedkit

#endif  // SEDKIT_REPORT_H_
