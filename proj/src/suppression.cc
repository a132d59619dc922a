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
#include "sparsedet/suppression.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "sparsedet/errors.h"
#include "sparsedet/parallel.h"

namespace sparsedet {

namespace {

void CheckThreshold(double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw DomainError("iou_threshold must be in (0, 1)");
  }
}

void CheckSingleGroup(std::span<const Detection> dets) {
  for (const Detection& d : dets) {
    if (d.image_id != dets.front().image_id ||
        d.class_id != dets.front().class_id) {
      throw MixedGroupError(
          "suppression input spans several images or classes");
    }
  }
}

std::vector<std::size_t> ScoreOrder(std::span<const Detection> dets) {
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return dets[a].score > dets[b].score;
                   });
  return order;
}

}  // namespace

std::string_view MethodName(SuppressionMethod m) {
  return m == SuppressionMethod::kNms ? "nms" : "nmw";
}

SuppressionMethod ParseMethod(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "nms") return SuppressionMethod::kNms;
  if (lower == "nmw") return SuppressionMethod::kNmw;
  throw DomainError("unknown suppression method '" + std::string(name) + "'");
}

std::vector<Cluster> GreedyClusters(std::span<const Detection> dets,
                                    double iou_threshold) {
  CheckThreshold(iou_threshold);
  CheckSingleGroup(dets);
  const auto order = ScoreOrder(dets);
  std::vector<bool> taken(dets.size(), false);
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::size_t head = order[i];
    if (taken[head]) continue;
    taken[head] = true;
    Cluster cluster{head, {head}};
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const std::size_t other = order[j];
      if (taken[other]) continue;
      if (IoU(dets[other].box, dets[head].box) > iou_threshold) {
        taken[other] = true;
        cluster.members.push_back(other);
      }
    }
    clusters.push_back(std::move(cluster));
  }
  return clusters;
}

std::vector<Detection> Nms(std::span<const Detection> dets,
                           double iou_threshold) {
  std::vector<Detection> kept;
  for (const Cluster& c : GreedyClusters(dets, iou_threshold)) {
    kept.push_back(dets[c.head]);
  }
  return kept;
}

Detection MergeCluster(std::span<const Detection> dets,
                       const Cluster& cluster) {
  const Detection& head = dets[cluster.head];
  if (cluster.members.size() <= 1) return head;
  // Accumulate offsets from the head so identical members reproduce the
  // head coordinates exactly.
  double total_weight = head.score;
  double dx_min = 0.0, dy_min = 0.0, dx_max = 0.0, dy_max = 0.0;
  for (std::size_t k = 1; k < cluster.members.size(); ++k) {
    const Detection& m = dets[cluster.members[k]];
    const double w = m.score * IoU(m.box, head.box);
    total_weight += w;
    dx_min += w * (m.box.x_min - head.box.x_min);
    dy_min += w * (m.box.y_min - head.box.y_min);
    dx_max += w * (m.box.x_max - head.box.x_max);
    dy_max += w * (m.box.y_max - head.box.y_max);
  }
  if (!(total_weight > 0.0)) return head;
  Detection merged = head;
  merged.box.x_min = head.box.x_min + dx_min / total_weight;
  merged.box.y_min = head.box.y_min + dy_min / total_weight;
  merged.box.x_max = head.box.x_max + dx_max / total_weight;
  merged.box.y_max = head.box.y_max + dy_max / total_weight;
  return merged;
}

std::vector<Detection> Nmw(std::span<const Detection> dets,
                           double iou_threshold) {
  std::vector<Detection> merged;
  for (const Cluster& c : GreedyClusters(dets, iou_threshold)) {
    merged.push_back(MergeCluster(dets, c));
  }
  return merged;
}

std::vector<SuppressedDetection> SuppressClasswiseTraced(
    std::span<const Detection> dets, SuppressionMethod method,
    double iou_threshold, unsigned threads) {
  CheckThreshold(iou_threshold);
  std::map<std::pair<std::string, ClassId>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    groups[{dets[i].image_id, dets[i].class_id}].push_back(i);
  }
  std::vector<const std::vector<std::size_t>*> partitions;
  partitions.reserve(groups.size());
  for (const auto& [key, indices] : groups) partitions.push_back(&indices);

  std::vector<std::vector<SuppressedDetection>> outputs(partitions.size());
  ParallelFor(partitions.size(), threads, [&](std::size_t g) {
    const auto& indices = *partitions[g];
    std::vector<Detection> local;
    local.reserve(indices.size());
    for (std::size_t i : indices) local.push_back(dets[i]);
    for (const Cluster& c : GreedyClusters(local, iou_threshold)) {
      Detection out = method == SuppressionMethod::kNms
                          ? local[c.head]
                          : MergeCluster(local, c);
      outputs[g].push_back({std::move(out), indices[c.head]});
    }
  });

  std::vector<SuppressedDetection> result;
  for (auto& part : outputs) {
    for (auto& d : part) result.push_back(std::move(d));
  }
  return result;
}

std::vector<Detection> SuppressClasswise(std::span<const Detection> dets,
                                         SuppressionMethod method,
                                         double iou_threshold,
                                         unsigned threads) {
  std::vector<Detection> out;
  for (auto& s : SuppressClasswiseTraced(dets, method, iou_threshold, threads)) {
    out.push_back(std::move(s.detection));
  }
  return out;
}

}  // namespace sparsedet
