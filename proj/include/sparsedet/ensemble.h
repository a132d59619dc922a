// Copyright 2026 The sparsedet Authors. All Rights Reserved.
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
#ifndef SPARSEDET_ENSEMBLE_H_
#define SPARSEDET_ENSEMBLE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sparsedet/annotations.h"
#include "sparsedet/hierarchy.h"
#include "sparsedet/suppression.h"

namespace sparsedet {

inline constexpr double kDefaultAlpha = 0.5;

// Outputs of one model plus its per-class validation AP. Expert runs carry
// the class subset they were fine-tuned on.
struct ModelRun {
  std::string name;
  std::vector<Detection> detections;
  std::map<ClassId, double> val_scores;
  // Sorted; absent for a model trained on every class.
  std::optional<std::vector<ClassId>> class_subset;

  // True for full models and for experts whose subset contains c.
  bool Covers(ClassId c) const;
};

// Drops detections outside the run's class subset (expert routing). Returns
// the run unchanged for full models. `dropped` receives the count removed.
ModelRun RouteToSubset(ModelRun run, std::size_t* dropped = nullptr);

// Per-(model, class) score multipliers.
struct ClassWeightTable {
  double alpha = kDefaultAlpha;
  std::map<std::pair<std::string, ClassId>, double> weights;
  // Audit trail: mean and best validation AP over the models covering c.
  std::map<ClassId, double> mean_score;
  std::map<ClassId, double> best_score;

  std::optional<double> Weight(const std::string& run, ClassId c) const;
};

// Weight of a model with validation score `s` on a class whose covering
// models average `mu` and peak at `t`:
//   alpha                                           if s < mu
//   1                                               if t == mu
//   (s - mu)/(t - mu) + alpha * (t - s)/(t - mu)    otherwise
// which runs linearly from alpha at s == mu to 1 at s == t. Throws
// DomainError for values outside [0,1], alpha outside (0,1], s > t, or
// mu > t.
double ClassWeight(double s, double mu, double t, double alpha);

// mu_c and t_c use only the runs covering c (having a validation score for
// it and, for experts, c in the subset). Throws MissingScoreError when a run
// emits a class it has no validation score for.
ClassWeightTable BuildWeightTable(std::span<const ModelRun> runs,
                                  double alpha = kDefaultAlpha);

using OccurrenceCounts = std::map<ClassId, std::int64_t>;

// Classes by ascending occurrence; ties broken by class index. Rank 1 is the
// rarest class.
std::vector<ClassId> RarityOrder(const OccurrenceCounts& occurrence);

// Inclusive, 1-based rank range such as 11-250.
struct RankRange {
  std::size_t lo = 1;
  std::size_t hi = 1;

  std::string ToString() const;
};
// Parses "lo-hi" or a single rank "k"; throws DomainError.
RankRange ParseRankRange(std::string_view text);
std::vector<RankRange> ParseRankRanges(std::string_view comma_separated);

// Sorts classes by rarity, takes ranks [lo, hi] and chunks them into
// consecutive subsets of `subset_size` (the last may be shorter).
std::vector<std::vector<ClassId>> PlanExpertSubsets(
    const OccurrenceCounts& occurrence, std::size_t subset_size,
    RankRange ranks);

struct FusedDetection {
  Detection detection;
  // Index into the runs span of the model that produced the cluster head.
  std::size_t run = 0;
};

// Scales each run's scores by its class weight, concatenates all runs and
// applies one class-wise suppression pass. Throws SubsetViolationError if
// an expert run emits a class outside its subset and MissingWeightError if
// the table lacks a (run, class) entry.
std::vector<FusedDetection> Fuse(std::span<const ModelRun> runs,
                                 const ClassWeightTable& table,
                                 SuppressionMethod method,
                                 double iou_threshold, unsigned threads = 1);

// Fuse() without the provenance.
std::vector<Detection> FusedDetections(std::span<const FusedDetection> fused);

}  // namespace sparsedet

#endif  // SPARSEDET_ENSEMBLE_H_
