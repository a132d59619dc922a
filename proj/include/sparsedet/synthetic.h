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
#ifndef SPARSEDET_SYNTHETIC_H_
#define SPARSEDET_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "sparsedet/annotations.h"
#include "sparsedet/ensemble.h"
#include "sparsedet/hierarchy.h"

namespace sparsedet {

// Uniform double in [0, 1) from the top 53 bits of one engine draw. Unlike
// std::uniform_real_distribution this is the same on every standard library.
double UniformUnit(std::mt19937_64& rng);

struct SynthConfig {
  std::uint64_t seed = 0;
  std::size_t num_images = 200;
  std::size_t num_classes = 24;
  // Number of levels; 1 gives a flat label space.
  std::size_t hierarchy_depth = 3;
  // Probability that a class absent from an image is left unverified.
  double sparsity = 0.5;
  // Adds an expert run fine-tuned on the rarest `expert_classes` classes.
  bool with_expert = true;
  // 0 picks a quarter of the classes.
  std::size_t expert_classes = 0;

  // Throws DomainError on out-of-range parameters.
  void Validate() const;
};

// A labeled world: ground truth, sparse verification, model runs with
// validation scores measured on an independent split, and the truth behind
// every detection.
struct SyntheticDataset {
  ClassHierarchy hierarchy;
  std::vector<GroundTruthBox> gts;
  VerificationMap verifications;
  std::vector<ModelRun> runs;
  // truth[r][i]: index into gts of the object behind runs[r].detections[i],
  // or -1 for a false positive.
  std::vector<std::vector<std::int64_t>> truth;
};

// Classes follow a Zipf-like frequency with later indices rarer. Every
// class with a gt in an image is verified positive there (with ancestors);
// each other class is verified negative with probability 1 - sparsity. The
// "full" run covers all classes but is weak on the rare quarter; the
// "expert" run covers only the rarest classes and is strong on them.
// Detections are emitted for the object's class and each of its ancestors.
SyntheticDataset GenerateSynthetic(const SynthConfig& config);

// Writes hierarchy.json, gt.csv, verifications.csv and, per run,
// <name>.csv, <name>_val.csv (LabelName,AP) and <name>_subset.csv, plus
// manifest.json referencing them. Creates `dir` if needed.
void WriteSynthetic(const SyntheticDataset& data, const std::string& dir);

}  // namespace sparsedet

#endif  // SPARSEDET_SYNTHETIC_H_
