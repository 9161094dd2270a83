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

#include "sedkit/prediction_log.h"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>
#include "sedkit/errors.h"

namespace sedkit {
namespace {

using Json = nlohmann::json;

bool IsBlank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string LinePrefix(std::size_t line) {
  return "prediction log line " + std::to_string(line) + ": ";
}

ClassId ReadClass(const Json& object, const char* field,
                  std::size_t num_classes) {
  const auto& value = object.at(field);
  if (!value.is_number_unsigned()) {
    throw ParseError(std::string("'") + field +
                     "' must be a non-negative integer");
  }
  const auto index = value.get<std::size_t>();
  if (index >= num_classes) {
    throw ParseError(std::string("'") + field + "' = " +
                     std::to_string(index) + " is not a declared class");
  }
  return ClassId{index};
}

}  // namespace

PredictionLogHeader MakeLogHeader(const ConceptMatrix& m,
                                  std::span<const ConceptId> selected) {
  m.CheckSelection(selected);
  PredictionLogHeader header;
  header.classes = m.class_names();
  for (const ConceptId a : selected) {
    header.selected_concepts.push_back(m.concept_name(a));
  }
  return header;
}

ConceptSelection ResolveLogSelection(const ConceptMatrix& m,
                                     const PredictionLogHeader& header) {
  if (header.classes != m.class_names()) {
    for (std::size_t j = 0;
         j < std::min(header.classes.size(), m.num_classes()); ++j) {
      if (header.classes[j] != m.class_names()[j]) {
        throw ValidationError("log class " + std::to_string(j) + " is '" +
                              header.classes[j] + "' but the matrix has '" +
                              m.class_names()[j] + "'");
      }
    }
    throw ValidationError("log declares " +
                          std::to_string(header.classes.size()) +
                          " classes, matrix has " +
                          std::to_string(m.num_classes()));
  }
  ConceptSelection selected;
  for (const auto& name : header.selected_concepts) {
    selected.push_back(m.ConceptByName(name));
  }
  m.CheckSelection(selected);
  return selected;
}

std::string FormatLogHeader(const PredictionLogHeader& header) {
  Json j;
  j["format"] = kPredictionLogFormat;
  j["version"] = header.version;
  j["classes"] = header.classes;
  j["selected_concepts"] = header.selected_concepts;
  return j.dump();
}

std::string FormatLogRecord(const PredictionRecord& record) {
  // Keys are emitted in a fixed order, not nlohmann's sorted order.
  std::string out = "{\"sample_id\":" + Json(record.sample_id).dump() +
                    ",\"true_class\":" +
                    std::to_string(record.true_class.index) +
                    ",\"predicted_class_a\":" +
                    std::to_string(record.predicted_class_a.index);
  if (record.predicted_explanation) {
    out += ",\"predicted_explanation\":[";
    const auto& bits = record.predicted_explanation->bits;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (i) out += ',';
      out += bits[i] ? '1' : '0';
    }
    out += ']';
  }
  if (record.predicted_class_b) {
    out += ",\"predicted_class_b\":" +
           std::to_string(record.predicted_class_b->index);
  }
  out += '}';
  return out;
}

PredictionLogReader::PredictionLogReader(std::istream& in) : in_(&in) {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_number_;
    if (!IsBlank(line)) break;
  }
  if (IsBlank(line)) throw ParseError("prediction log has no header line");
  try {
    const Json j = Json::parse(line);
    if (j.value("format", std::string()) != kPredictionLogFormat) {
      throw ParseError(std::string("header 'format' must be '") +
                       kPredictionLogFormat + "'");
    }
    header_.version = j.at("version").get<int>();
    if (header_.version != kPredictionLogVersion) {
      throw ParseError("unsupported log version " +
                       std::to_string(header_.version));
    }
    header_.classes = j.at("classes").get<std::vector<std::string>>();
    header_.selected_concepts =
        j.at("selected_concepts").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw ParseError(LinePrefix(line_number_) + e.what());
  } catch (const ParseError& e) {
    throw ParseError(LinePrefix(line_number_) + e.what());
  }
  if (header_.classes.size() < 2) {
    throw ParseError(LinePrefix(line_number_) +
                     "header must declare at least 2 classes");
  }
}

std::optional<PredictionRecord> PredictionLogReader::Next() {
  std::string line;
  while (std::getline(*in_, line)) {
    ++line_number_;
    if (IsBlank(line)) continue;
    try {
      const Json j = Json::parse(line);
      if (!j.is_object()) throw ParseError("record must be a JSON object");
      PredictionRecord record;
      record.sample_id = j.at("sample_id").get<std::string>();
      const std::size_t n = header_.classes.size();
      record.true_class = ReadClass(j, "true_class", n);
      record.predicted_class_a = ReadClass(j, "predicted_class_a", n);
      if (j.contains("predicted_explanation")) {
        ExplanationVector e;
        for (const auto& bit : j.at("predicted_explanation")) {
          const int v = bit.is_boolean() ? int(bit.get<bool>()) : bit.get<int>();
          if (v != 0 && v != 1) {
            throw ParseError("explanation bits must be 0 or 1");
          }
          e.bits.push_back(static_cast<std::uint8_t>(v));
        }
        if (e.size() != header_.selected_concepts.size()) {
          throw ParseError("explanation has " + std::to_string(e.size()) +
                           " bits, header declares " +
                           std::to_string(header_.selected_concepts.size()) +
                           " concepts");
        }
        record.predicted_explanation = std::move(e);
      }
      if (j.contains("predicted_class_b")) {
        record.predicted_class_b = ReadClass(j, "predicted_class_b", n);
      }
      return record;
    } catch (const Json::exception& e) {
      throw ParseError(LinePrefix(line_number_) + e.what());
    } catch (const ParseError& e) {
      throw ParseError(LinePrefix(line_number_) + e.what());
    }
  }
  return std::nullopt;
}

PredictionLogWriter::PredictionLogWriter(std::ostream& out,
                                         PredictionLogHeader header)
    : out_(&out), header_(std::move(header)) {
  *out_ << FormatLogHeader(header_) << '\n';
}

void PredictionLogWriter::Write(const PredictionRecord& record) {
  const std::size_t n = header_.classes.size();
  if (record.true_class.index >= n || record.predicted_class_a.index >= n ||
      (record.predicted_class_b && record.predicted_class_b->index >= n)) {
    throw ValidationError("record '" + record.sample_id +
                          "' references an undeclared class");
  }
  if (record.predicted_explanation &&
      record.predicted_explanation->size() !=
          header_.selected_concepts.size()) {
    throw ValidationError("record '" + record.sample_id +
                          "' explanation length does not match header");
  }
  *out_ << FormatLogRecord(record) << '\n';
  ++count_;
}

PredictionLog ReadPredictionLog(std::istream& in) {
  PredictionLogReader reader(in);
  PredictionLog log;
  log.header = reader.header();
  while (auto record = reader.Next()) log.records.push_back(std::move(*record));
  return log;
}

PredictionLog ReadPredictionLogFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ValidationError("cannot open prediction log '" + path.string() +
                          "'");
  }
  try {
    return ReadPredictionLog(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void WritePredictionLogFile(const std::filesystem::path& path,
                            const PredictionLog& log) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RuntimeFailure("cannot write prediction log '" + path.string() +
                         "'");
  }
  PredictionLogWriter writer(out, log.header);
  for (const auto& record : log.records) writer.Write(record);
  out.flush();
  if (!out) {
    throw RuntimeFailure("I/O error writing '" + path.string() + "'");
  }
}

}  // namespace sedkit
