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
#include "sparsedet/evaluation.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "sparsedet/csv.h"
#include "sparsedet/errors.h"
#include "sparsedet/parallel.h"

namespace sparsedet {

namespace {

constexpr std::size_t kNoImage = static_cast<std::size_t>(-1);

std::vector<ClassId> Labels(ClassId c, const ClassHierarchy& h, bool expand) {
  if (!expand) return {c};
  const ClassId one[] = {c};
  return h.ExpandLabels(one);
}

std::string FormatOptional(const std::optional<double>& v) {
  return v ? FormatDouble(*v) : std::string();
}

std::optional<double> MeanOfDefined(
    std::span<const std::optional<double>> values) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& v : values) {
    if (!v) continue;
    sum += *v;
    ++n;
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

// Inputs of one class, already restricted to its evaluated images.
struct ClassWork {
  std::vector<std::size_t> gt_indices;
  std::vector<std::size_t> det_indices;  // input order
  std::size_t evaluated_images = 0;
};

ClassAPReport EvaluateClass(ClassId c, const ClassWork& work,
                            std::span<const Detection> dets,
                            std::span<const GroundTruthBox> gts,
                            const std::vector<std::size_t>& gt_image,
                            const std::vector<std::size_t>& det_image,
                            const EvalConfig& config) {
  ClassAPReport report;
  report.class_id = c;
  report.num_det = work.det_indices.size();
  report.evaluated_image_count = work.evaluated_images;

  // gts per image, split into countable and group-of (when ignored).
  std::unordered_map<std::size_t, std::vector<std::size_t>> regular;
  std::unordered_map<std::size_t, std::vector<std::size_t>> group_of;
  for (std::size_t g : work.gt_indices) {
    if (config.ignore_group_of && gts[g].is_group_of) {
      group_of[gt_image[g]].push_back(g);
    } else {
      regular[gt_image[g]].push_back(g);
      ++report.num_gt;
    }
  }

  std::vector<std::size_t> order = work.det_indices;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].score > dets[b].score;
                   });

  std::set<std::size_t> claimed;
  std::vector<bool> is_tp;
  is_tp.reserve(order.size());
  for (std::size_t d : order) {
    const BBox& box = dets[d].box;
    double best_iou = -1.0;
    std::size_t best_gt = 0;
    if (const auto it = regular.find(det_image[d]); it != regular.end()) {
      for (std::size_t g : it->second) {
        const double iou = IoU(box, gts[g].box);
        if (iou > best_iou) {
          best_iou = iou;
          best_gt = g;
        }
      }
    }
    if (best_iou >= config.iou_threshold && !claimed.contains(best_gt)) {
      claimed.insert(best_gt);
      is_tp.push_back(true);
      continue;
    }
    if (const auto it = group_of.find(det_image[d]); it != group_of.end()) {
      const bool hits_group =
          std::any_of(it->second.begin(), it->second.end(), [&](std::size_t g) {
            return IoU(box, gts[g].box) >= config.iou_threshold;
          });
      if (hits_group) continue;
    }
    is_tp.push_back(false);
  }

  if (report.num_gt > 0) {
    report.ap =
        AllPointsAveragePrecision(PrecisionRecallCurve(is_tp, report.num_gt));
  }
  return report;
}

}  // namespace

void EvalConfig::Validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw DomainError("evaluation iou_threshold must be in (0, 1)");
  }
}

std::vector<PrPoint> PrecisionRecallCurve(const std::vector<bool>& is_tp,
                                          std::size_t num_gt) {
  std::vector<PrPoint> curve;
  curve.reserve(is_tp.size());
  std::size_t tp = 0;
  for (std::size_t k = 0; k < is_tp.size(); ++k) {
    if (is_tp[k]) ++tp;
    const double recall =
        num_gt == 0 ? 0.0
                    : static_cast<double>(tp) / static_cast<double>(num_gt);
    const double precision =
        static_cast<double>(tp) / static_cast<double>(k + 1);
    curve.push_back({recall, precision});
  }
  return curve;
}

double AllPointsAveragePrecision(std::span<const PrPoint> curve) {
  if (curve.empty()) return 0.0;
  // Sentinels at recall 0 and after the last point, as in the VOC devkit.
  std::vector<double> recall{0.0};
  std::vector<double> precision{0.0};
  for (const PrPoint& p : curve) {
    recall.push_back(p.recall);
    precision.push_back(p.precision);
  }
  recall.push_back(recall.back());
  precision.push_back(0.0);
  for (std::size_t i = precision.size() - 1; i > 0; --i) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  for (std::size_t i = 1; i < recall.size(); ++i) {
    if (recall[i] != recall[i - 1]) {
      ap += (recall[i] - recall[i - 1]) * precision[i];
    }
  }
  return std::clamp(ap, 0.0, 1.0);
}

ImageVerification ExpandVerification(const ImageVerification& v,
                                     const ClassHierarchy& hierarchy) {
  ImageVerification out;
  out.image_id = v.image_id;
  out.verified_positive = hierarchy.ExpandLabels(v.verified_positive);
  std::vector<ClassId> negative;
  for (ClassId c : v.verified_negative) {
    negative.push_back(c);
    const auto& desc = hierarchy.Descendants(c);
    negative.insert(negative.end(), desc.begin(), desc.end());
  }
  std::sort(negative.begin(), negative.end());
  negative.erase(std::unique(negative.begin(), negative.end()), negative.end());
  std::set_difference(negative.begin(), negative.end(),
                      out.verified_positive.begin(),
                      out.verified_positive.end(),
                      std::back_inserter(out.verified_negative));
  return out;
}

EvaluationReport Evaluate(std::span<const Detection> dets,
                          std::span<const GroundTruthBox> gts,
                          const VerificationMap& verifications,
                          const ClassHierarchy& hierarchy,
                          const EvalConfig& config) {
  config.Validate();
  const std::size_t num_classes = hierarchy.size();
  for (const Detection& d : dets) hierarchy.Name(d.class_id);
  for (const GroundTruthBox& g : gts) hierarchy.Name(g.class_id);

  // Verified classes per image (sorted), after optional closure.
  std::unordered_map<std::string, std::size_t> image_index;
  std::vector<std::vector<ClassId>> verified;
  std::vector<std::size_t> evaluated_images(num_classes, 0);
  for (const auto& [image_id, v] : verifications) {
    const ImageVerification eff =
        config.expand_gt ? ExpandVerification(v, hierarchy) : v;
    std::vector<ClassId> classes = eff.verified_positive;
    classes.insert(classes.end(), eff.verified_negative.begin(),
                   eff.verified_negative.end());
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    for (ClassId c : classes) {
      hierarchy.Name(c);
      ++evaluated_images[Index(c)];
    }
    image_index.emplace(image_id, verified.size());
    verified.push_back(std::move(classes));
  }
  auto is_verified = [&](std::size_t image, ClassId c) {
    return image != kNoImage &&
           std::binary_search(verified[image].begin(), verified[image].end(),
                              c);
  };
  auto lookup_image = [&](const std::string& id) {
    const auto it = image_index.find(id);
    return it == image_index.end() ? kNoImage : it->second;
  };

  std::vector<ClassWork> work(num_classes);
  for (std::size_t c = 0; c < num_classes; ++c) {
    work[c].evaluated_images = evaluated_images[c];
  }
  std::vector<std::size_t> gt_image(gts.size());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    gt_image[g] = lookup_image(gts[g].image_id);
    for (ClassId c : Labels(gts[g].class_id, hierarchy, config.expand_gt)) {
      if (is_verified(gt_image[g], c)) work[Index(c)].gt_indices.push_back(g);
    }
  }
  std::vector<std::size_t> det_image(dets.size());
  for (std::size_t d = 0; d < dets.size(); ++d) {
    det_image[d] = lookup_image(dets[d].image_id);
    for (ClassId c :
         Labels(dets[d].class_id, hierarchy, config.expand_detections)) {
      if (is_verified(det_image[d], c)) work[Index(c)].det_indices.push_back(d);
    }
  }

  EvaluationReport report;
  report.classes.resize(num_classes);
  ParallelFor(num_classes, config.threads, [&](std::size_t c) {
    report.classes[c] = EvaluateClass(MakeClassId(c), work[c], dets, gts,
                                      gt_image, det_image, config);
  });

  double sum = 0.0;
  for (const ClassAPReport& r : report.classes) {
    if (!r.ap) continue;
    sum += *r.ap;
    ++report.num_classes_with_ap;
  }
  if (report.num_classes_with_ap > 0) {
    report.mean_ap = sum / static_cast<double>(report.num_classes_with_ap);
  }
  return report;
}

OccurrenceCounts OccurrenceFromGroundTruth(std::span<const GroundTruthBox> gts,
                                           const ClassHierarchy& hierarchy,
                                           bool expand) {
  std::vector<std::set<std::string>> images(hierarchy.size());
  for (const GroundTruthBox& g : gts) {
    for (ClassId c : Labels(g.class_id, hierarchy, expand)) {
      images[Index(c)].insert(g.image_id);
    }
  }
  OccurrenceCounts counts;
  for (std::size_t c = 0; c < hierarchy.size(); ++c) {
    counts[MakeClassId(c)] = static_cast<std::int64_t>(images[c].size());
  }
  return counts;
}

std::optional<double> MeanOverRankRange(
    std::span<const ClassAPReport> reports, const OccurrenceCounts& occurrence,
    RankRange ranks) {
  if (ranks.lo < 1 || ranks.hi < ranks.lo || ranks.hi > occurrence.size()) {
    throw DomainError("rank range " + ranks.ToString() + " outside 1-" +
                      std::to_string(occurrence.size()));
  }
  std::map<ClassId, std::optional<double>> ap_by_class;
  for (const ClassAPReport& r : reports) ap_by_class[r.class_id] = r.ap;
  const auto order = RarityOrder(occurrence);
  std::vector<std::optional<double>> selected;
  for (std::size_t rank = ranks.lo; rank <= ranks.hi; ++rank) {
    const auto it = ap_by_class.find(order[rank - 1]);
    if (it != ap_by_class.end()) selected.push_back(it->second);
  }
  return MeanOfDefined(selected);
}

void WriteReportCsv(std::ostream& out, const EvaluationReport& report,
                    const ClassHierarchy& hierarchy) {
  out << "LabelName,AP,NumGT,NumDet\n";
  for (const ClassAPReport& r : report.classes) {
    out << CsvEscape(hierarchy.Name(r.class_id)) << ',' << FormatOptional(r.ap)
        << ',' << r.num_gt << ',' << r.num_det << '\n';
  }
}

ClassTable BuildClassTable(std::span<const NamedReport> reports,
                           std::span<const ClassId> classes) {
  ClassTable table;
  table.classes.assign(classes.begin(), classes.end());
  for (const auto& [name, report] : reports) {
    std::vector<std::optional<double>> row;
    for (ClassId c : classes) row.push_back(report->For(c).ap);
    table.row_names.push_back(name);
    table.averages.push_back(MeanOfDefined(row));
    table.values.push_back(std::move(row));
  }
  return table;
}

void WriteClassTableCsv(std::ostream& out, const ClassTable& table,
                        const ClassHierarchy& hierarchy) {
  out << "Model";
  for (ClassId c : table.classes) out << ',' << CsvEscape(hierarchy.Name(c));
  out << ",Average\n";
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << CsvEscape(table.row_names[r]);
    for (const auto& v : table.values[r]) out << ',' << FormatOptional(v);
    out << ',' << FormatOptional(table.averages[r]) << '\n';
  }
}

RangeTable BuildRangeTable(std::span<const NamedReport> reports,
                           const OccurrenceCounts& occurrence,
                           std::span<const RankRange> ranges) {
  RangeTable table;
  table.ranges.assign(ranges.begin(), ranges.end());
  for (const auto& [name, report] : reports) {
    std::vector<std::optional<double>> row;
    for (const RankRange& r : ranges) {
      row.push_back(MeanOverRankRange(report->classes, occurrence, r));
    }
    table.row_names.push_back(name);
    table.values.push_back(std::move(row));
  }
  return table;
}

void WriteRangeTableCsv(std::ostream& out, const RangeTable& table) {
  out << "Model";
  for (const RankRange& r : table.ranges) out << ",Index " << r.ToString();
  out << '\n';
  for (std::size_t r = 0; r < table.row_names.size(); ++r) {
    out << CsvEscape(table.row_names[r]);
    for (const auto& v : table.values[r]) out << ',' << FormatOptional(v);
    out << '\n';
  }
}

}  // namespace sparsedet
