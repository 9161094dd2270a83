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

#ifndef SEDKIT_CONCEPT_MATRIX_H_
#define SEDKIT_CONCEPT_MATRIX_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sedkit {

struct ClassId {
  std::size_t index = 0;
  friend auto operator<=>(const ClassId&, const ClassId&) = default;
};

struct ConceptId {
  std::size_t index = 0;
  friend auto operator<=>(const ConceptId&, const ConceptId&) = default;
};

// Ordered list of concepts in use; position i is bit i of every
// ExplanationVector built against it.
using ConceptSelection = std::vector<ConceptId>;

// Presence bits of the selected concepts, one byte per bit (0 or 1).
struct ExplanationVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  friend bool operator==(const ExplanationVector&,
                         const ExplanationVector&) = default;
};

// One misclassification type: an input of class `truth` predicted as
// `predicted`.
class ErrorPair {
 public:
  // Throws ValidationError when truth == predicted.
  ErrorPair(ClassId truth, ClassId predicted);

  ClassId truth() const { return truth_; }
  ClassId predicted() const { return predicted_; }

  friend auto operator<=>(const ErrorPair&, const ErrorPair&) = default;

 private:
  ClassId truth_;
  ClassId predicted_;
};

// Set of misclassification types a concept can reveal. Stored sorted and
// unique so set algebra is a linear merge.
class DetErrSet {
 public:
  DetErrSet() = default;
  explicit DetErrSet(std::vector<ErrorPair> pairs);

  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool Contains(const ErrorPair& pair) const;
  std::span<const ErrorPair> pairs() const { return pairs_; }

  std::size_t IntersectionSize(const DetErrSet& other) const;

  friend bool operator==(const DetErrSet&, const DetErrSet&) = default;

 private:
  std::vector<ErrorPair> pairs_;
};

// Class-to-concept incidence: row j holds E(C_j) as a 0/1 row over all M
// concepts. Immutable once constructed; the constructor enforces N >= 2,
// M >= 1, unique non-empty names and non-constant concept columns.
class ConceptMatrix {
 public:
  ConceptMatrix(std::vector<std::string> class_names,
                std::vector<std::string> concept_names,
                std::vector<std::vector<std::uint8_t>> incidence);

  std::size_t num_classes() const { return class_names_.size(); }
  std::size_t num_concepts() const { return concept_names_.size(); }

  const std::vector<std::string>& class_names() const { return class_names_; }
  const std::vector<std::string>& concept_names() const {
    return concept_names_;
  }
  const std::string& class_name(ClassId c) const;
  const std::string& concept_name(ConceptId a) const;

  // True iff concept `a` belongs to E(c). Throws on out-of-range ids.
  bool Explains(ClassId c, ConceptId a) const;

  std::optional<ClassId> FindClass(std::string_view name) const;
  std::optional<ConceptId> FindConcept(std::string_view name) const;

  // Name lookups that throw ValidationError when the name is unknown.
  ClassId ClassByName(std::string_view name) const;
  ConceptId ConceptByName(std::string_view name) const;

  // All M concepts in index order.
  ConceptSelection AllConcepts() const;

  void CheckClass(ClassId c) const;
  void CheckConcept(ConceptId a) const;
  // Checks every id is in range and no concept appears twice.
  void CheckSelection(std::span<const ConceptId> selected) const;

  friend bool operator==(const ConceptMatrix&, const ConceptMatrix&) = default;

 private:
  std::vector<std::string> class_names_;
  std::vector<std::string> concept_names_;
  // Row-major N x M.
  std::vector<std::uint8_t> cells_;
};

// Parses a matrix document. Two layouts are accepted:
//   * delimited text (comma or tab): a header row of concept names (with an
//     optional leading corner cell), then one row per class whose first cell
//     is the class name and remaining cells are 0/1; lines starting with '#'
//     and blank lines are ignored;
//   * a JSON object {"classes": [...], "concepts": [...],
//     "incidence": [[0,1,...], ...]}.
// The JSON form is chosen when the first non-blank character is '{'.
ConceptMatrix ParseConceptMatrix(std::string_view document);
ConceptMatrix LoadConceptMatrix(const std::filesystem::path& path);

// Canonical delimited-text form (comma separated, with a "class" corner
// cell). ParseConceptMatrix(FormatConceptMatrix(m)) == m.
std::string FormatConceptMatrix(const ConceptMatrix& m);

// Bit i of the result is 1 iff selected[i] belongs to E(c).
ExplanationVector ExplanationOf(const ConceptMatrix& m, ClassId c,
                                std::span<const ConceptId> selected);

// G(a): classes whose explanation contains `a`, ascending by index.
std::vector<ClassId> AssociatedClasses(const ConceptMatrix& m, ConceptId a);

// Ordered pairs (C_j, C_k) with exactly one of C_j, C_k in G(a). Its size is
// 2 |G(a)| (N - |G(a)|).
DetErrSet DetErr(const ConceptMatrix& m, ConceptId a);

}  // namespace sedkit

#endif  // SEDKIT_CONCEPT_MATRIX_H_
