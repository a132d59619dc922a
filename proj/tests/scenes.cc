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
#include "scenes.h"

#include <algorithm>

namespace sparsedet::scenes {

using oracle::GridBox;
using oracle::Uniform;
using oracle::UniformInt;

namespace {

void AddSorted(std::vector<ClassId>& v, ClassId c) {
  const auto it = std::lower_bound(v.begin(), v.end(), c);
  if (it == v.end() || *it != c) v.insert(it, c);
}

BBox Perturb(const BBox& b, std::mt19937_64& rng, double amount) {
  const double w = b.x_max - b.x_min;
  const double h = b.y_max - b.y_min;
  auto d = [&](double size) { return (Uniform(rng) - 0.5) * amount * size; };
  BBox out{b.x_min + d(w), b.y_min + d(h), b.x_max + d(w), b.y_max + d(h)};
  if (out.x_max < out.x_min) std::swap(out.x_min, out.x_max);
  if (out.y_max < out.y_min) std::swap(out.y_min, out.y_max);
  return out;
}

}  // namespace

AssignScene RandomAssignScene(std::mt19937_64& rng) {
  AssignScene s;
  const int n = UniformInt(rng, 1, 8);
  std::tie(s.names, s.edges) = oracle::RandomDag(rng, n);
  s.hierarchy = ClassHierarchy::Build(s.names, s.edges);
  s.dag = oracle::DagFromEdges(s.names, s.edges);

  const int num_gts = UniformInt(rng, 0, 5);
  for (int i = 0; i < num_gts; ++i) {
    s.gts.push_back({"img", MakeClassId(UniformInt(rng, 0, n - 1)),
                     GridBox(rng, 6), false});
  }
  const int num_proposals = UniformInt(rng, 1, 10);
  for (int i = 0; i < num_proposals; ++i) {
    // Some proposals copy or shrink a gt so matches and containment happen.
    if (!s.gts.empty() && Uniform(rng) < 0.5) {
      const BBox& g = s.gts[UniformInt(rng, 0, num_gts - 1)].box;
      if (Uniform(rng) < 0.5) {
        s.proposals.push_back(g);
      } else {
        const double x = g.x_min + Uniform(rng) * (g.x_max - g.x_min) * 0.5;
        const double y = g.y_min + Uniform(rng) * (g.y_max - g.y_min) * 0.5;
        s.proposals.push_back(
            {x, y, std::min(g.x_max, x + (g.x_max - g.x_min) * 0.5),
             std::min(g.y_max, y + (g.y_max - g.y_min) * 0.5)});
      }
    } else {
      s.proposals.push_back(GridBox(rng, 6));
    }
  }

  s.verification.image_id = "img";
  for (int c = 0; c < n; ++c) {
    const double u = Uniform(rng);
    if (u < 0.3) {
      AddSorted(s.verification.verified_positive, MakeClassId(c));
    } else if (u < 0.6) {
      AddSorted(s.verification.verified_negative, MakeClassId(c));
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && Uniform(rng) < 0.15) {
        s.pairs.push_back({MakeClassId(a), MakeClassId(b)});
      }
    }
  }
  s.config.pos_iou_threshold = Uniform(rng) < 0.5 ? 0.5 : 0.3 + 0.6 * Uniform(rng);
  s.config.containment_threshold = Uniform(rng) < 0.5 ? 0.9 : 0.5 + 0.5 * Uniform(rng);
  s.config.unverified_policy = Uniform(rng) < 0.5 ? UnverifiedPolicy::kNegative
                                                  : UnverifiedPolicy::kIgnore;
  return s;
}

std::vector<Detection> RandomSuppressScene(std::mt19937_64& rng) {
  const int n = UniformInt(rng, 1, 6);
  const bool grid = Uniform(rng) < 0.5;
  std::vector<Detection> dets;
  BBox anchor = GridBox(rng, 5);
  for (int i = 0; i < n; ++i) {
    BBox box;
    if (grid) {
      box = GridBox(rng, 5);
    } else if (Uniform(rng) < 0.7) {
      box = Perturb(anchor, rng, 0.4);
    } else {
      box = {Uniform(rng) * 4, Uniform(rng) * 4, 0, 0};
      box.x_max = box.x_min + 0.2 + Uniform(rng) * 2;
      box.y_max = box.y_min + 0.2 + Uniform(rng) * 2;
    }
    // Coarse scores in grid scenes produce exact ties.
    const double score =
        grid ? UniformInt(rng, 1, 4) / 4.0 : 0.05 + 0.95 * Uniform(rng);
    dets.push_back({"img", MakeClassId(0), score, box});
  }
  return dets;
}

EvalScene RandomEvalScene(std::mt19937_64& rng) {
  EvalScene s;
  const int n = UniformInt(rng, 1, 5);
  std::tie(s.names, s.edges) = oracle::RandomDag(rng, n);
  s.hierarchy = ClassHierarchy::Build(s.names, s.edges);
  s.dag = oracle::DagFromEdges(s.names, s.edges);
  const int images = UniformInt(rng, 1, 4);
  for (int i = 0; i < images; ++i) {
    const std::string id = "img" + std::to_string(i);
    ImageVerification v;
    v.image_id = id;
    const int objects = UniformInt(rng, 0, 4);
    for (int k = 0; k < objects; ++k) {
      const ClassId c = MakeClassId(UniformInt(rng, 0, n - 1));
      const BBox box = GridBox(rng, 10);
      s.gts.push_back({id, c, box, false});
      if (Uniform(rng) < 0.8) AddSorted(v.verified_positive, c);
      const int copies = UniformInt(rng, 0, 2);
      for (int j = 0; j < copies; ++j) {
        s.dets.push_back({id, c, Uniform(rng), Perturb(box, rng, 0.3)});
      }
    }
    const int clutter = UniformInt(rng, 0, 4);
    for (int k = 0; k < clutter; ++k) {
      s.dets.push_back({id, MakeClassId(UniformInt(rng, 0, n - 1)),
                        Uniform(rng), GridBox(rng, 10)});
    }
    for (int c = 0; c < n; ++c) {
      if (v.IsPositive(MakeClassId(c))) continue;
      if (Uniform(rng) < 0.4) AddSorted(v.verified_negative, MakeClassId(c));
    }
    if (!v.verified_positive.empty() || !v.verified_negative.empty()) {
      s.verifications.emplace(id, std::move(v));
    }
  }
  return s;
}

}  // namespace sparsedet::scenes
