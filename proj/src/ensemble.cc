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
#include "sparsedet/ensemble.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>

#include "sparsedet/errors.h"

namespace sparsedet {

namespace {

bool InUnit(double v) { return v >= 0.0 && v <= 1.0; }

std::size_t ParseRank(std::string_view text, std::string_view whole) {
  std::size_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw DomainError("bad rank range '" + std::string(whole) + "'");
  }
  return value;
}

}  // namespace

bool ModelRun::Covers(ClassId c) const {
  if (!class_subset) return true;
  return std::binary_search(class_subset->begin(), class_subset->end(), c);
}

ModelRun RouteToSubset(ModelRun run, std::size_t* dropped) {
  std::size_t removed = 0;
  if (run.class_subset) {
    std::sort(run.class_subset->begin(), run.class_subset->end());
    const auto before = run.detections.size();
    std::erase_if(run.detections,
                  [&](const Detection& d) { return !run.Covers(d.class_id); });
    removed = before - run.detections.size();
  }
  if (dropped != nullptr) *dropped = removed;
  return run;
}

std::optional<double> ClassWeightTable::Weight(const std::string& run,
                                               ClassId c) const {
  const auto it = weights.find({run, c});
  if (it == weights.end()) return std::nullopt;
  return it->second;
}

double ClassWeight(double s, double mu, double t, double alpha) {
  if (!InUnit(s) || !InUnit(mu) || !InUnit(t)) {
    throw DomainError("validation scores must lie in [0, 1]");
  }
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0, 1]");
  }
  if (s > t) throw DomainError("score exceeds the best score for the class");
  if (mu > t) throw DomainError("mean score exceeds the best score");
  if (s < mu) return alpha;
  if (t == mu) return 1.0;
  const double span = t - mu;
  const double w = (s - mu) / span + alpha * ((t - s) / span);
  return std::clamp(w, alpha, 1.0);
}

ClassWeightTable BuildWeightTable(std::span<const ModelRun> runs,
                                  double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw DomainError("alpha must lie in (0, 1]");
  }
  std::set<std::string> names;
  for (const ModelRun& run : runs) {
    if (!names.insert(run.name).second) {
      throw DomainError("duplicate run name '" + run.name + "'");
    }
    for (const Detection& d : run.detections) {
      if (!run.val_scores.contains(d.class_id)) {
        throw MissingScoreError("run '" + run.name +
                                "' emits a class with no validation score "
                                "(class index " +
                                std::to_string(Index(d.class_id)) + ")");
      }
    }
    for (const auto& [c, s] : run.val_scores) {
      if (!InUnit(s)) {
        throw DomainError("run '" + run.name +
                          "' has a validation score outside [0, 1]");
      }
    }
  }

  ClassWeightTable table;
  table.alpha = alpha;
  std::map<ClassId, std::vector<std::pair<const ModelRun*, double>>> covering;
  for (const ModelRun& run : runs) {
    for (const auto& [c, s] : run.val_scores) {
      if (run.Covers(c)) covering[c].emplace_back(&run, s);
    }
  }
  for (const auto& [c, entries] : covering) {
    double sum = 0.0;
    double best = 0.0;
    for (const auto& [run, s] : entries) {
      sum += s;
      best = std::max(best, s);
    }
    // The mean of values <= best can round above best by an ulp.
    const double mean =
        std::min(sum / static_cast<double>(entries.size()), best);
    table.mean_score[c] = mean;
    table.best_score[c] = best;
    for (const auto& [run, s] : entries) {
      table.weights[{run->name, c}] = ClassWeight(s, mean, best, alpha);
    }
  }
  return table;
}

std::vector<ClassId> RarityOrder(const OccurrenceCounts& occurrence) {
  std::vector<std::pair<std::int64_t, ClassId>> keyed;
  keyed.reserve(occurrence.size());
  for (const auto& [c, n] : occurrence) keyed.emplace_back(n, c);
  std::sort(keyed.begin(), keyed.end());
  std::vector<ClassId> order;
  order.reserve(keyed.size());
  for (const auto& [n, c] : keyed) order.push_back(c);
  return order;
}

std::string RankRange::ToString() const {
  return std::to_string(lo) + "-" + std::to_string(hi);
}

RankRange ParseRankRange(std::string_view text) {
  const auto dash = text.find('-');
  RankRange r;
  if (dash == std::string_view::npos) {
    r.lo = r.hi = ParseRank(text, text);
  } else {
    r.lo = ParseRank(text.substr(0, dash), text);
    r.hi = ParseRank(text.substr(dash + 1), text);
  }
  if (r.lo < 1 || r.hi < r.lo) {
    throw DomainError("bad rank range '" + std::string(text) + "'");
  }
  return r;
}

std::vector<RankRange> ParseRankRanges(std::string_view comma_separated) {
  std::vector<RankRange> ranges;
  std::size_t start = 0;
  while (start <= comma_separated.size()) {
    const auto comma = comma_separated.find(',', start);
    const auto piece = comma_separated.substr(
        start, comma == std::string_view::npos ? std::string_view::npos
                                               : comma - start);
    if (!piece.empty()) ranges.push_back(ParseRankRange(piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return ranges;
}

std::vector<std::vector<ClassId>> PlanExpertSubsets(
    const OccurrenceCounts& occurrence, std::size_t subset_size,
    RankRange ranks) {
  if (subset_size < 1) throw DomainError("subset size must be >= 1");
  if (ranks.lo < 1 || ranks.hi < ranks.lo || ranks.hi > occurrence.size()) {
    throw DomainError("rank range " + ranks.ToString() + " outside 1-" +
                      std::to_string(occurrence.size()));
  }
  const auto order = RarityOrder(occurrence);
  std::vector<std::vector<ClassId>> subsets;
  for (std::size_t rank = ranks.lo; rank <= ranks.hi; ++rank) {
    if ((rank - ranks.lo) % subset_size == 0) subsets.emplace_back();
    subsets.back().push_back(order[rank - 1]);
  }
  return subsets;
}

std::vector<FusedDetection> Fuse(std::span<const ModelRun> runs,
                                 const ClassWeightTable& table,
                                 SuppressionMethod method,
                                 double iou_threshold, unsigned threads) {
  std::vector<Detection> pooled;
  std::vector<std::size_t> owner;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const ModelRun& run = runs[r];
    for (const Detection& d : run.detections) {
      if (!run.Covers(d.class_id)) {
        throw SubsetViolationError("expert run '" + run.name +
                                   "' emits a class outside its subset "
                                   "(class index " +
                                   std::to_string(Index(d.class_id)) + ")");
      }
      const auto w = table.Weight(run.name, d.class_id);
      if (!w) {
        throw MissingWeightError("no weight for run '" + run.name +
                                 "' and class index " +
                                 std::to_string(Index(d.class_id)));
      }
      Detection scaled = d;
      scaled.score = d.score * *w;
      pooled.push_back(std::move(scaled));
      owner.push_back(r);
    }
  }
  std::vector<FusedDetection> fused;
  for (auto& s :
       SuppressClasswiseTraced(pooled, method, iou_threshold, threads)) {
    fused.push_back({std::move(s.detection), owner[s.origin]});
  }
  return fused;
}

std::vector<Detection> FusedDetections(std::span<const FusedDetection> fused) {
  std::vector<Detection> out;
  out.reserve(fused.size());
  for (const auto& f : fused) out.push_back(f.detection);
  return out;
}

}  // namespace sparsedet
