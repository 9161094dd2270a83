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

#include "sedkit/scoring.h"

#include <algorithm>
#include <numeric>

#include "format.h"
#include <nlohmann/json.hpp>
#include "sedkit/errors.h"

namespace sedkit {
namespace {

constexpr double kTieTolerance = 1e-12;

void RequireTwoConcepts(const ConceptMatrix& m) {
  if (m.num_concepts() < 2) {
    throw ValidationError(
        "similarity scores need at least 2 concepts, matrix has " +
        std::to_string(m.num_concepts()));
  }
}

double MeanSimilarity(const std::vector<DetErrSet>& det_err, std::size_t i) {
  double sum = 0.0;
  for (std::size_t j = 0; j < det_err.size(); ++j) {
    if (j != i) sum += Jaccard(det_err[i], det_err[j]);
  }
  return sum / static_cast<double>(det_err.size() - 1);
}

}  // namespace

double ImportanceScore(const ConceptMatrix& m, ConceptId a) {
  const double n = static_cast<double>(m.num_classes());
  const double g = static_cast<double>(AssociatedClasses(m, a).size());
  return 2.0 * g * (n - g) / (n * (n - 1.0));
}

double Jaccard(const DetErrSet& a, const DetErrSet& b) {
  const std::size_t common = a.IntersectionSize(b);
  const std::size_t total = a.size() + b.size() - common;
  if (total == 0) {
    throw ValidationError("Jaccard similarity of two empty sets is undefined");
  }
  return static_cast<double>(common) / static_cast<double>(total);
}

double SimilarityScore(const ConceptMatrix& m, ConceptId a) {
  m.CheckConcept(a);
  RequireTwoConcepts(m);
  std::vector<DetErrSet> det_err;
  det_err.reserve(m.num_concepts());
  for (const ConceptId c : m.AllConcepts()) det_err.push_back(DetErr(m, c));
  return MeanSimilarity(det_err, a.index);
}

ScoreTable::ScoreTable(std::vector<ConceptScore> rows)
    : rows_(std::move(rows)) {
  std::vector<bool> seen(rows_.size() + 1, false);
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].concept_id.index != i) {
      throw ValidationError("score rows must be in concept-index order");
    }
    if (rows_[i].rank == 0 || rows_[i].rank > rows_.size() ||
        seen[rows_[i].rank]) {
      throw ValidationError("score ranks must be a permutation of 1..M");
    }
    seen[rows_[i].rank] = true;
  }
}

const ConceptScore& ScoreTable::at(ConceptId a) const {
  if (a.index >= rows_.size()) {
    throw ValidationError("concept index " + std::to_string(a.index) +
                          " not in score table");
  }
  return rows_[a.index];
}

ConceptSelection ScoreTable::Ranking() const {
  ConceptSelection order(rows_.size());
  for (const auto& row : rows_) order[row.rank - 1] = row.concept_id;
  return order;
}

ConceptSelection ScoreTable::TopK(std::size_t k) const {
  if (k > rows_.size()) {
    throw ValidationError("requested top " + std::to_string(k) +
                          " concepts but only " +
                          std::to_string(rows_.size()) + " exist");
  }
  auto order = Ranking();
  order.resize(k);
  return order;
}

ScoreTable OverallScores(const ConceptMatrix& m) {
  RequireTwoConcepts(m);
  const std::size_t count = m.num_concepts();
  std::vector<DetErrSet> det_err;
  det_err.reserve(count);
  for (const ConceptId a : m.AllConcepts()) det_err.push_back(DetErr(m, a));

  const double pairs = static_cast<double>(m.num_classes()) *
                       static_cast<double>(m.num_classes() - 1);
  std::vector<ConceptScore> rows(count);
  for (std::size_t i = 0; i < count; ++i) {
    rows[i].concept_id = ConceptId{i};
    rows[i].name = m.concept_names()[i];
    rows[i].importance = static_cast<double>(det_err[i].size()) / pairs;
    rows[i].similarity = MeanSimilarity(det_err, i);
  }

  double importance_sum = 0.0;
  double similarity_sum = 0.0;
  for (const auto& row : rows) {
    importance_sum += row.importance;
    similarity_sum += row.similarity;
  }
  const double alpha = 1.0 / importance_sum;
  const double beta = 1.0 / similarity_sum;
  for (auto& row : rows) {
    row.overall = (alpha * row.importance) / (beta * row.similarity);
  }

  // Scores that agree to kTieTolerance (relative) are mathematically equal
  // values split by rounding; they rank by ascending concept index.
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return rows[a].overall > rows[b].overall;
                   });
  for (std::size_t begin = 0; begin < count;) {
    const double head = rows[order[begin]].overall;
    std::size_t end = begin + 1;
    while (end < count &&
           head - rows[order[end]].overall <= kTieTolerance * head) {
      ++end;
    }
    std::sort(order.begin() + begin, order.begin() + end);
    begin = end;
  }
  for (std::size_t r = 0; r < count; ++r) rows[order[r]].rank = r + 1;
  return ScoreTable(std::move(rows));
}

std::string FormatScoreTableText(const ScoreTable& table) {
  std::string out = "concept_name\ts_imp\ts_sim\ts_ov\trank\n";
  for (const auto& row : table.rows()) {
    out += row.name + '\t' + internal::FormatReal(row.importance) + '\t' +
           internal::FormatReal(row.similarity) + '\t' +
           internal::FormatReal(row.overall) + '\t' +
           std::to_string(row.rank) + '\n';
  }
  return out;
}

std::string FormatScoreTableJson(const ScoreTable& table) {
  std::string out = "{\"concepts\":[";
  bool first = true;
  for (const auto& row : table.rows()) {
    if (!first) out += ',';
    first = false;
    out += "{\"concept_name\":" + nlohmann::json(row.name).dump() +
           ",\"s_imp\":" + internal::FormatReal(row.importance) +
           ",\"s_sim\":" + internal::FormatReal(row.similarity) +
           ",\"s_ov\":" + internal::FormatReal(row.overall) +
           ",\"rank\":" + std::to_string(row.rank) + '}';
  }
  out += "]}\n";
  return out;
}

}  // namespace sedkit
