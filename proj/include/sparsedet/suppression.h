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
#ifndef SPARSEDET_SUPPRESSION_H_
#define SPARSEDET_SUPPRESSION_H_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sparsedet/annotations.h"

namespace sparsedet {

enum class SuppressionMethod { kNms, kNmw };

std::string_view MethodName(SuppressionMethod m);
// Accepts "nms" / "nmw" (case-insensitive); throws DomainError otherwise.
SuppressionMethod ParseMethod(std::string_view name);

inline constexpr double kDefaultSuppressionIoU = 0.5;

// One greedy cluster. `members` starts with `head` and lists the boxes it
// suppressed in descending score order. Indices refer to the input span.
struct Cluster {
  std::size_t head = 0;
  std::vector<std::size_t> members;
};

// Greedy clustering shared by NMS and NMW: visit boxes by descending score
// (ties keep input order); each unvisited box becomes a head and absorbs
// every remaining box whose IoU with it exceeds `iou_threshold`. Clusters
// come out in head order. All inputs must share image and class.
std::vector<Cluster> GreedyClusters(std::span<const Detection> dets,
                                    double iou_threshold);

// Classical NMS: the cluster heads.
std::vector<Detection> Nms(std::span<const Detection> dets,
                           double iou_threshold);

// Non-maximum weighted: each cluster becomes one box whose coordinates are
// the mean of member coordinates weighted by score_i * IoU(member, head)
// (the head weighs score_head), and whose score is the head's.
std::vector<Detection> Nmw(std::span<const Detection> dets,
                           double iou_threshold);

// Merged box of one cluster, as used by Nmw().
Detection MergeCluster(std::span<const Detection> dets, const Cluster& cluster);

struct SuppressedDetection {
  Detection detection;
  // Input index of the cluster head that produced this output.
  std::size_t origin = 0;
};

// Partitions by (image_id, class_id), suppresses each partition on its own
// and concatenates partitions in (image_id, class index) order. Partitions
// run on up to `threads` workers with identical output for any count.
std::vector<SuppressedDetection> SuppressClasswiseTraced(
    std::span<const Detection> dets, SuppressionMethod method,
    double iou_threshold, unsigned threads = 1);

std::vector<Detection> SuppressClasswise(std::span<const Detection> dets,
                                         SuppressionMethod method,
                                         double iou_threshold,
                                         unsigned threads = 1);

}  // namespace sparsedet

#endif  // SPARSEDET_SUPPRESSION_H_
