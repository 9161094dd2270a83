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

#include "sedkit/concept_matrix.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>
#include "sedkit/errors.h"

namespace sedkit {
namespace {

using Json = nlohmann::json;

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitRow(std::string_view line, char delimiter) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    cells.emplace_back(Trim(line.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

void CheckUniqueNames(const std::vector<std::string>& names,
                      std::string_view what) {
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) {
      throw ValidationError(std::string(what) + " " + std::to_string(i) +
                            " has an empty name");
    }
    if (!seen.insert(names[i]).second) {
      throw ValidationError("duplicate " + std::string(what) + " name '" +
                            names[i] + "' at position " + std::to_string(i));
    }
  }
}

ConceptMatrix ParseDelimited(std::string_view document) {
  std::vector<std::pair<std::size_t, std::string>> lines;  // (line no, text)
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= document.size()) {
    auto end = document.find('\n', start);
    if (end == std::string_view::npos) end = document.size();
    ++line_no;
    const auto text = Trim(document.substr(start, end - start));
    if (!text.empty() && text.front() != '#') {
      lines.emplace_back(line_no, std::string(text));
    }
    start = end + 1;
  }
  if (lines.empty()) throw ValidationError("concept matrix is empty");

  const char delimiter =
      lines.front().second.find('\t') != std::string::npos ? '\t' : ',';
  std::vector<std::string> header = SplitRow(lines.front().second, delimiter);

  std::vector<std::string> class_names;
  std::vector<std::vector<std::uint8_t>> incidence;
  std::optional<std::size_t> row_width;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto& [number, text] = lines[r];
    auto cells = SplitRow(text, delimiter);
    if (row_width && cells.size() != *row_width) {
      throw ParseError("line " + std::to_string(number) + ": expected " +
                       std::to_string(*row_width) + " cells, found " +
                       std::to_string(cells.size()));
    }
    row_width = cells.size();
    if (cells.size() < 2) {
      throw ParseError("line " + std::to_string(number) +
                       ": row needs a class name and at least one cell");
    }
    class_names.push_back(cells.front());
    std::vector<std::uint8_t> row;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] == "0") {
        row.push_back(0);
      } else if (cells[c] == "1") {
        row.push_back(1);
      } else {
        throw ParseError("line " + std::to_string(number) + ", column " +
                         std::to_string(c + 1) + ": cell '" + cells[c] +
                         "' is not 0 or 1");
      }
    }
    incidence.push_back(std::move(row));
  }
  if (!row_width) throw ValidationError("concept matrix has no class rows");

  // The header either carries a corner cell above the class-name column or
  // lists the concept names only.
  if (header.size() == *row_width) {
    header.erase(header.begin());
  } else if (header.size() != *row_width - 1) {
    throw ParseError("line " + std::to_string(lines.front().first) +
                     ": header has " + std::to_string(header.size()) +
                     " cells but rows have " +
                     std::to_string(*row_width - 1) + " concept cells");
  }
  return ConceptMatrix(std::move(class_names), std::move(header),
                       std::move(incidence));
}

ConceptMatrix ParseJson(std::string_view document) {
  Json doc;
  try {
    doc = Json::parse(document);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("concept matrix JSON: ") + e.what());
  }
  try {
    auto classes = doc.at("classes").get<std::vector<std::string>>();
    auto concepts = doc.at("concepts").get<std::vector<std::string>>();
    std::vector<std::vector<std::uint8_t>> incidence;
    const auto& rows = doc.at("incidence");
    if (!rows.is_array()) throw ParseError("'incidence' must be an array");
    for (std::size_t r = 0; r < rows.size(); ++r) {
      std::vector<std::uint8_t> row;
      for (std::size_t c = 0; c < rows[r].size(); ++c) {
        const auto& cell = rows[r][c];
        const int v = cell.is_boolean() ? int(cell.get<bool>())
                                        : cell.get<int>();
        if (v != 0 && v != 1) {
          throw ParseError("incidence[" + std::to_string(r) + "][" +
                           std::to_string(c) + "] is not 0 or 1");
        }
        row.push_back(static_cast<std::uint8_t>(v));
      }
      incidence.push_back(std::move(row));
    }
    return ConceptMatrix(std::move(classes), std::move(concepts),
                         std::move(incidence));
  } catch (const Json::exception& e) {
    throw ParseError(std::string("concept matrix JSON: ") + e.what());
  }
}

}  // namespace

ErrorPair::ErrorPair(ClassId truth, ClassId predicted)
    : truth_(truth), predicted_(predicted) {
  if (truth == predicted) {
    throw ValidationError("error pair needs distinct classes, got " +
                          std::to_string(truth.index) + " twice");
  }
}

DetErrSet::DetErrSet(std::vector<ErrorPair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool DetErrSet::Contains(const ErrorPair& pair) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), pair);
}

std::size_t DetErrSet::IntersectionSize(const DetErrSet& other) const {
  std::size_t count = 0;
  auto a = pairs_.begin();
  auto b = other.pairs_.begin();
  while (a != pairs_.end() && b != other.pairs_.end()) {
    if (*a < *b) {
      ++a;
    } else if (*b < *a) {
      ++b;
    } else {
      ++count;
      ++a;
      ++b;
    }
  }
  return count;
}

ConceptMatrix::ConceptMatrix(std::vector<std::string> class_names,
                             std::vector<std::string> concept_names,
                             std::vector<std::vector<std::uint8_t>> incidence)
    : class_names_(std::move(class_names)),
      concept_names_(std::move(concept_names)) {
  const std::size_t n = class_names_.size();
  const std::size_t m = concept_names_.size();
  if (n < 2) {
    throw ValidationError("concept matrix needs at least 2 classes, got " +
                          std::to_string(n));
  }
  if (m < 1) throw ValidationError("concept matrix needs at least 1 concept");
  CheckUniqueNames(class_names_, "class");
  CheckUniqueNames(concept_names_, "concept");
  if (incidence.size() != n) {
    throw ValidationError("incidence has " + std::to_string(incidence.size()) +
                          " rows for " + std::to_string(n) + " classes");
  }
  cells_.reserve(n * m);
  for (std::size_t j = 0; j < n; ++j) {
    if (incidence[j].size() != m) {
      throw ValidationError("incidence row for class '" + class_names_[j] +
                            "' has " + std::to_string(incidence[j].size()) +
                            " cells, expected " + std::to_string(m));
    }
    for (std::size_t i = 0; i < m; ++i) {
      if (incidence[j][i] > 1) {
        throw ValidationError("incidence cell (" + class_names_[j] + ", " +
                              concept_names_[i] + ") is not 0 or 1");
      }
      cells_.push_back(incidence[j][i]);
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t count = 0;
    for (std::size_t j = 0; j < n; ++j) count += cells_[j * m + i];
    if (count == 0 || count == n) {
      throw ValidationError("concept column '" + concept_names_[i] +
                            "' explains " + (count == 0 ? "no" : "every") +
                            " class; it cannot detect any error");
    }
  }
}

const std::string& ConceptMatrix::class_name(ClassId c) const {
  CheckClass(c);
  return class_names_[c.index];
}

const std::string& ConceptMatrix::concept_name(ConceptId a) const {
  CheckConcept(a);
  return concept_names_[a.index];
}

bool ConceptMatrix::Explains(ClassId c, ConceptId a) const {
  CheckClass(c);
  CheckConcept(a);
  return cells_[c.index * num_concepts() + a.index] != 0;
}

std::optional<ClassId> ConceptMatrix::FindClass(std::string_view name) const {
  const auto it = std::find(class_names_.begin(), class_names_.end(), name);
  if (it == class_names_.end()) return std::nullopt;
  return ClassId{static_cast<std::size_t>(it - class_names_.begin())};
}

std::optional<ConceptId> ConceptMatrix::FindConcept(
    std::string_view name) const {
  const auto it = std::find(concept_names_.begin(), concept_names_.end(), name);
  if (it == concept_names_.end()) return std::nullopt;
  return ConceptId{static_cast<std::size_t>(it - concept_names_.begin())};
}

ClassId ConceptMatrix::ClassByName(std::string_view name) const {
  if (auto c = FindClass(name)) return *c;
  throw ValidationError("unknown class '" + std::string(name) + "'");
}

ConceptId ConceptMatrix::ConceptByName(std::string_view name) const {
  if (auto a = FindConcept(name)) return *a;
  throw ValidationError("unknown concept '" + std::string(name) + "'");
}

ConceptSelection ConceptMatrix::AllConcepts() const {
  ConceptSelection all(num_concepts());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = ConceptId{i};
  return all;
}

void ConceptMatrix::CheckClass(ClassId c) const {
  if (c.index >= num_classes()) {
    throw ValidationError("class index " + std::to_string(c.index) +
                          " out of range [0, " +
                          std::to_string(num_classes()) + ")");
  }
}

void ConceptMatrix::CheckConcept(ConceptId a) const {
  if (a.index >= num_concepts()) {
    throw ValidationError("concept index " + std::to_string(a.index) +
                          " out of range [0, " +
                          std::to_string(num_concepts()) + ")");
  }
}

void ConceptMatrix::CheckSelection(std::span<const ConceptId> selected) const {
  std::vector<bool> seen(num_concepts(), false);
  for (const ConceptId a : selected) {
    CheckConcept(a);
    if (seen[a.index]) {
      throw ValidationError("concept '" + concept_names_[a.index] +
                            "' selected twice");
    }
    seen[a.index] = true;
  }
}

ConceptMatrix ParseConceptMatrix(std::string_view document) {
  const auto body = Trim(document);
  if (!body.empty() && body.front() == '{') return ParseJson(body);
  return ParseDelimited(document);
}

ConceptMatrix LoadConceptMatrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ValidationError("cannot open concept matrix '" + path.string() +
                          "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return ParseConceptMatrix(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string FormatConceptMatrix(const ConceptMatrix& m) {
  std::string out = "class";
  for (const auto& name : m.concept_names()) out += "," + name;
  out += '\n';
  for (std::size_t j = 0; j < m.num_classes(); ++j) {
    out += m.class_names()[j];
    for (std::size_t i = 0; i < m.num_concepts(); ++i) {
      out += m.Explains(ClassId{j}, ConceptId{i}) ? ",1" : ",0";
    }
    out += '\n';
  }
  return out;
}

ExplanationVector ExplanationOf(const ConceptMatrix& m, ClassId c,
                                std::span<const ConceptId> selected) {
  m.CheckClass(c);
  ExplanationVector e;
  e.bits.reserve(selected.size());
  for (const ConceptId a : selected) e.bits.push_back(m.Explains(c, a) ? 1 : 0);
  return e;
}

std::vector<ClassId> AssociatedClasses(const ConceptMatrix& m, ConceptId a) {
  m.CheckConcept(a);
  std::vector<ClassId> g;
  for (std::size_t j = 0; j < m.num_classes(); ++j) {
    if (m.Explains(ClassId{j}, a)) g.push_back(ClassId{j});
  }
  return g;
}

DetErrSet DetErr(const ConceptMatrix& m, ConceptId a) {
  const auto g = AssociatedClasses(m, a);
  std::vector<ClassId> complement;
  for (std::size_t j = 0, next = 0; j < m.num_classes(); ++j) {
    if (next < g.size() && g[next].index == j) {
      ++next;
    } else {
      complement.push_back(ClassId{j});
    }
  }
  std::vector<ErrorPair> pairs;
  pairs.reserve(2 * g.size() * complement.size());
  for (const ClassId in : g) {
    for (const ClassId out : complement) {
      pairs.emplace_back(in, out);
      pairs.emplace_back(out, in);
    }
  }
  return DetErrSet(std::move(pairs));
}

}  // namespace sedkit
