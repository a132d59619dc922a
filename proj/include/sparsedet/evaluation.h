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
#ifndef SPARSEDET_EVALUATION_H_
#define SPARSEDET_EVALUATION_H_

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sparsedet/annotations.h"
#include "sparsedet/ensemble.h"
#include "sparsedet/hierarchy.h"

namespace sparsedet {

struct EvalConfig {
  double iou_threshold = 0.5;
  // Count a gt of class c as a gt of every ancestor of c too. Verified
  // labels are closed the same way: positives upward, negatives downward.
  bool expand_gt = true;
  // Copy every detection to each ancestor class before matching.
  bool expand_detections = false;
  // Drop group-of boxes; detections matching them are neither TP nor FP.
  bool ignore_group_of = false;
  unsigned threads = 1;

  // Throws DomainError unless iou_threshold is in (0, 1).
  void Validate() const;
};

struct ClassAPReport {
  ClassId class_id{};
  // Undefined when the class has no ground truth on its evaluated images.
  std::optional<double> ap;
  std::size_t num_gt = 0;
  std::size_t num_det = 0;
  std::size_t evaluated_image_count = 0;

  bool operator==(const ClassAPReport&) const = default;
};

struct EvaluationReport {
  // Unweighted mean over classes with a defined AP; 0 when there are none.
  double mean_ap = 0.0;
  std::size_t num_classes_with_ap = 0;
  // One entry per hierarchy class, in class index order.
  std::vector<ClassAPReport> classes;

  const ClassAPReport& For(ClassId c) const { return classes.at(Index(c)); }
  bool operator==(const EvaluationReport&) const = default;
};

struct PrPoint {
  double recall = 0.0;
  double precision = 0.0;
};

// Cumulative precision/recall after each ranked detection. `is_tp` is in
// descending score order.
std::vector<PrPoint> PrecisionRecallCurve(const std::vector<bool>& is_tp,
                                          std::size_t num_gt);

// Area under the curve with all-points interpolation: precision at each
// recall level is replaced by the best precision at any higher recall.
double AllPointsAveragePrecision(std::span<const PrPoint> curve);

// Verification after hierarchy closure (see EvalConfig::expand_gt). When a
// class ends up both positive and negative, positive wins.
ImageVerification ExpandVerification(const ImageVerification& v,
                                     const ClassHierarchy& hierarchy);

// Per-class AP over sparsely verified images. For class c only images where
// c is verified (positive or negative) are evaluated; detections of c
// elsewhere are dropped. Detections are matched greedily in descending
// score (ties keep input order) to the highest-IoU gt; a match needs
// IoU >= threshold and an unclaimed gt, otherwise the detection is a false
// positive.
EvaluationReport Evaluate(std::span<const Detection> dets,
                          std::span<const GroundTruthBox> gts,
                          const VerificationMap& verifications,
                          const ClassHierarchy& hierarchy,
                          const EvalConfig& config = {});

// Number of distinct images carrying a gt of each class, for every class of
// the hierarchy. With `expand`, gts also count toward their ancestors.
OccurrenceCounts OccurrenceFromGroundTruth(std::span<const GroundTruthBox> gts,
                                           const ClassHierarchy& hierarchy,
                                           bool expand = false);

// Mean AP over the classes whose rarity rank lies in `ranks` (same ordering
// as PlanExpertSubsets). Classes without a defined AP are skipped; nullopt
// if none remain. Throws DomainError if the range exceeds the class count.
std::optional<double> MeanOverRankRange(
    std::span<const ClassAPReport> reports, const OccurrenceCounts& occurrence,
    RankRange ranks);

// LabelName,AP,NumGT,NumDet; undefined AP is an empty field.
void WriteReportCsv(std::ostream& out, const EvaluationReport& report,
                    const ClassHierarchy& hierarchy);

// Named evaluation result, e.g. {"Baseline", report}.
using NamedReport = std::pair<std::string, const EvaluationReport*>;

// Per-class AP with one row per model and one column per class, closed by
// an Average column over the listed classes (classes lacking AP in a row
// are skipped for that row's average).
struct ClassTable {
  std::vector<ClassId> classes;
  std::vector<std::string> row_names;
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::optional<double>> averages;
};
ClassTable BuildClassTable(std::span<const NamedReport> reports,
                           std::span<const ClassId> classes);
void WriteClassTableCsv(std::ostream& out, const ClassTable& table,
                        const ClassHierarchy& hierarchy);

// Rank-range means with one row per model and one column per range.
struct RangeTable {
  std::vector<RankRange> ranges;
  std::vector<std::string> row_names;
  std::vector<std::vector<std::optional<double>>> values;
};
RangeTable BuildRangeTable(std::span<const NamedReport> reports,
                           const OccurrenceCounts& occurrence,
                           std::span<const RankRange> ranges);
void WriteRangeTableCsv(std::ostream& out, const RangeTable& table);

}  // namespace sparsedet

#endif  // SPARSEDET_EVALUATION_H_
