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

#ifndef SEDKIT_PREDICTION_LOG_H_
#define SEDKIT_PREDICTION_LOG_H_

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "sedkit/concept_matrix.h"
#include "sedkit/sed.h"

namespace sedkit {

// Prediction logs are JSON Lines. The first line is the header:
//
//   {"format":"sedkit-predictions","version":1,
//    "classes":["C0","C1",...],"selected_concepts":["a3","a0",...]}
//
// Every following non-blank line is one record:
//
//   {"sample_id":"s17","true_class":2,"predicted_class_a":0,
//    "predicted_explanation":[1,0],"predicted_class_b":2}
//
// Class fields are indices into "classes"; explanation bit i refers to
// selected_concepts[i]. Optional fields are omitted when absent.
inline constexpr int kPredictionLogVersion = 1;
inline constexpr const char* kPredictionLogFormat = "sedkit-predictions";

struct PredictionLogHeader {
  int version = kPredictionLogVersion;
  std::vector<std::string> classes;
  std::vector<std::string> selected_concepts;

  friend bool operator==(const PredictionLogHeader&,
                         const PredictionLogHeader&) = default;
};

PredictionLogHeader MakeLogHeader(const ConceptMatrix& m,
                                  std::span<const ConceptId> selected);

// Checks the header's class list equals the matrix's (names and order) and
// maps the selected concept names to ids.
ConceptSelection ResolveLogSelection(const ConceptMatrix& m,
                                     const PredictionLogHeader& header);

std::string FormatLogHeader(const PredictionLogHeader& header);
std::string FormatLogRecord(const PredictionRecord& record);

// Streams records one at a time; errors carry the 1-based line number.
class PredictionLogReader {
 public:
  // Reads and validates the header line.
  explicit PredictionLogReader(std::istream& in);

  const PredictionLogHeader& header() const { return header_; }
  std::optional<PredictionRecord> Next();
  std::size_t line_number() const { return line_number_; }

 private:
  std::istream* in_;
  PredictionLogHeader header_;
  std::size_t line_number_ = 0;
};

class PredictionLogWriter {
 public:
  PredictionLogWriter(std::ostream& out, PredictionLogHeader header);
  void Write(const PredictionRecord& record);
  std::size_t records_written() const { return count_; }

 private:
  std::ostream* out_;
  PredictionLogHeader header_;
  std::size_t count_ = 0;
};

struct PredictionLog {
  PredictionLogHeader header;
  std::vector<PredictionRecord> records;
};

PredictionLog ReadPredictionLog(std::istream& in);
PredictionLog ReadPredictionLogFile(const std::filesystem::path& path);
void WritePredictionLogFile(const std::filesystem::path& path,
                            const PredictionLog& log);

}  // namespace sedkit

#endif  // SEDKIT_PREDICTION_LOG_H_
