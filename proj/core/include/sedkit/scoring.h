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

#ifndef SEDKIT_SCORING_H_
#define SEDKIT_SCORING_H_

#include <cstddef>
#include <string>
#include <vector>

#include "sedkit/concept_matrix.h"

namespace sedkit {

// Fraction of all N(N-1) misclassification types that concept `a` reveals:
// 2 |G(a)| (N - |G(a)|) / (N (N - 1)).
double ImportanceScore(const ConceptMatrix& m, ConceptId a);

// |A ∩ B| / |A ∪ B|. Throws ValidationError when both sets are empty.
double Jaccard(const DetErrSet& a, const DetErrSet& b);

// Mean Jaccard similarity between DetErr(a) and DetErr of every other
// concept. Requires M >= 2.
double SimilarityScore(const ConceptMatrix& m, ConceptId a);

struct ConceptScore {
  ConceptId concept_id;
  std::string name;
  double importance = 0.0;
  double similarity = 0.0;
  double overall = 0.0;
  std::size_t rank = 0;  // 1 = highest overall score

  friend bool operator==(const ConceptScore&, const ConceptScore&) = default;
};

class ScoreTable {
 public:
  explicit ScoreTable(std::vector<ConceptScore> rows);

  // Rows in concept-index order.
  const std::vector<ConceptScore>& rows() const { return rows_; }
  const ConceptScore& at(ConceptId a) const;

  // Concepts sorted by rank (best first).
  ConceptSelection Ranking() const;
  ConceptSelection TopK(std::size_t k) const;

  friend bool operator==(const ScoreTable&, const ScoreTable&) = default;

 private:
  std::vector<ConceptScore> rows_;
};

// Scores every concept: overall = (alpha * importance) / (beta * similarity)
// with alpha = 1 / sum(importance) and beta = 1 / sum(similarity), both taken
// over all M concepts. Ranks by descending overall score, ties broken by
// ascending concept index. Requires M >= 2.
ScoreTable OverallScores(const ConceptMatrix& m);

// Delimited (tab-separated) and JSON renderings. Columns: concept_name,
// s_imp, s_sim, s_ov, rank; reals printed with 12 significant digits.
std::string FormatScoreTableText(const ScoreTable& table);
std::string FormatScoreTableJson(const ScoreTable& table);

}  // namespace sedkit

#endif  // SEDKIT_SCORING_H_
