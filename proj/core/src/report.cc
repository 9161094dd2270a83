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

#include "sedkit/report.h"

#include <cerrno>
#include <cstring>
#include <fstream>

#include "format.h"
#include <nlohmann/json.hpp>
#include "sedkit/errors.h"

#ifndef SEDKIT_VERSION_STRING
#define SEDKIT_VERSION_STRING "0.0.0"
#endif

namespace sedkit {
namespace {

using Json = nlohmann::ordered_json;

std::string PedText(const std::optional<double>& p) {
  return p ? internal::FormatReal(*p) : std::string("undefined");
}

// JSON reals are written through FormatReal so the bytes do not depend on
// the JSON library's float printer.
std::string RowJson(const SweepRow& row) {
  return "{\"k\":" + std::to_string(row.k) + ",\"scheme\":\"" +
         std::string(SchemeName(row.scheme)) + "\",\"condition\":" +
         Json(row.condition).dump() + ",\"p_ed\":" +
         (row.p_ed ? internal::FormatReal(*row.p_ed) : std::string("null")) +
         ",\"err_total\":" + std::to_string(row.err_total) +
         ",\"err_detected\":" + std::to_string(row.err_detected) +
         ",\"false_alarms\":" + std::to_string(row.false_alarms) +
         ",\"total_samples\":" + std::to_string(row.total_samples) + "}";
}

std::string ConfigJson(const ReportContext& context) {
  if (context.config_json.empty()) return "{}";
  try {
    return Json::parse(context.config_json).dump();
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("report config echo is not JSON: ") +
                          e.what());
  }
}

std::string TabularPreamble(const ReportContext& context) {
  return std::string("# sedkit ") + Version() + "\n# command: " +
         context.command + "\n# seed: " + std::to_string(context.seed) +
         "\n# config: " + ConfigJson(context) + "\n";
}

std::string TabularRows(const SweepResult& result) {
  std::string out =
      "k\tscheme\tcondition\tp_ed\terr_total\terr_detected\tfalse_alarms\t"
      "total_samples\n";
  for (const auto& row : result.rows) {
    out += std::to_string(row.k) + '\t' + std::string(SchemeName(row.scheme)) +
           '\t' + row.condition + '\t' + PedText(row.p_ed) + '\t' +
           std::to_string(row.err_total) + '\t' +
           std::to_string(row.err_detected) + '\t' +
           std::to_string(row.false_alarms) + '\t' +
           std::to_string(row.total_samples) + '\n';
  }
  return out;
}

std::string StructuredHead(const ReportContext& context) {
  return std::string("{\"toolkit\":\"sedkit\",\"version\":\"") + Version() +
         "\",\"command\":" + Json(context.command).dump() +
         ",\"seed\":" + std::to_string(context.seed) +
         ",\"config\":" + ConfigJson(context);
}

std::string StructuredRows(const SweepResult& result) {
  std::string out = ",\"rows\":[";
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    if (i) out += ',';
    out += RowJson(result.rows[i]);
  }
  return out + "]";
}

}  // namespace

const char* Version() { return SEDKIT_VERSION_STRING; }

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "tabular" || name == "tsv" || name == "text") {
    return ReportFormat::kTabular;
  }
  if (name == "structured" || name == "json") return ReportFormat::kStructured;
  throw ValidationError("unknown report format '" + std::string(name) +
                        "' (expected tabular or structured)");
}

std::string EmitReport(const SweepResult& result, ReportFormat format,
                       const ReportContext& context) {
  if (result.rows.empty()) throw ValidationError("cannot report an empty sweep");
  if (format == ReportFormat::kTabular) {
    return TabularPreamble(context) + TabularRows(result);
  }
  return StructuredHead(context) + StructuredRows(result) + "}\n";
}

std::string EmitSelectionReport(const ConceptMatrix& m,
                                const SelectionResult& result,
                                ReportFormat format,
                                const ReportContext& context) {
  if (result.trace.rows.empty()) {
    throw ValidationError("cannot report an empty selection trace");
  }
  std::vector<std::string> names;
  for (const ConceptId a : result.selected) names.push_back(m.concept_name(a));
  if (format == ReportFormat::kTabular) {
    std::string out = TabularPreamble(context);
    out += "# selected:";
    for (const auto& name : names) out += " [" + name + "]";
    out += "\n# threshold_reached: ";
    out += result.threshold_reached ? "true\n" : "false\n";
    return out + TabularRows(result.trace);
  }
  return StructuredHead(context) + ",\"selected\":" + Json(names).dump() +
         ",\"threshold_reached\":" +
         (result.threshold_reached ? "true" : "false") +
         StructuredRows(result.trace) + "}\n";
}

void WriteDocument(const std::filesystem::path& path,
                   const std::string& document) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RuntimeFailure("cannot open '" + path.string() +
                         "' for writing: " + std::strerror(errno));
  }
  out << document;
  out.flush();
  if (!out) throw RuntimeFailure("I/O error writing '" + path.string() + "'");
}

}  // namespace sedkit
