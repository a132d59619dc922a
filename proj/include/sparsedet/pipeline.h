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
#ifndef SPARSEDET_PIPELINE_H_
#define SPARSEDET_PIPELINE_H_

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "sparsedet/annotations.h"
#include "sparsedet/ensemble.h"
#include "sparsedet/evaluation.h"
#include "sparsedet/hierarchy.h"
#include "sparsedet/suppression.h"

namespace sparsedet {

// One model entry of an ensemble manifest. Paths are relative to the
// manifest's directory unless absolute.
struct RunSpec {
  std::string name;
  std::string detections;
  std::string val_scores;  // LabelName,AP
  std::optional<std::string> class_subset;  // LabelName
};

// {
//   "alpha": 0.5, "method": "nmw", "iou_threshold": 0.5,
//   "runs": [{"name": "full", "detections": "full.csv",
//             "val_scores": "full_ap.csv", "class_subset": "subset.csv"}]
// }
struct EnsembleManifest {
  std::vector<RunSpec> runs;
  double alpha = kDefaultAlpha;
  SuppressionMethod method = SuppressionMethod::kNmw;
  double iou_threshold = kDefaultSuppressionIoU;
  std::string base_dir = ".";

  std::string Resolve(const std::string& path) const;
};

EnsembleManifest ParseManifest(const nlohmann::json& doc,
                               const std::string& base_dir);
EnsembleManifest LoadManifest(const std::string& path);
nlohmann::json ManifestToJson(const EnsembleManifest& manifest);

// Loads every run and routes expert runs to their class subsets. Each
// routed-away detection is reported in `notes`.
std::vector<ModelRun> LoadRuns(const EnsembleManifest& manifest,
                               const ClassHierarchy& hierarchy,
                               const LoadOptions& options = {},
                               std::vector<std::string>* notes = nullptr);

struct EnsembleOutput {
  ClassWeightTable table;
  std::vector<FusedDetection> fused;
};

// Weight table, then Fuse().
EnsembleOutput RunEnsemble(std::span<const ModelRun> runs, double alpha,
                           SuppressionMethod method, double iou_threshold,
                           unsigned threads = 1);

// Fused detections with a trailing Source column naming the run.
void WriteFusedCsv(std::ostream& out, std::span<const FusedDetection> fused,
                   std::span<const ModelRun> runs,
                   const ClassHierarchy& hierarchy);

struct PipelineResult {
  EnsembleOutput ensemble;
  EvaluationReport report;
};

// Ensemble then evaluation, with no I/O.
PipelineResult RunPipeline(std::span<const ModelRun> runs,
                           const EnsembleManifest& manifest,
                           std::span<const GroundTruthBox> gts,
                           const VerificationMap& verifications,
                           const ClassHierarchy& hierarchy,
                           const EvalConfig& eval_config);

// Loads the manifest's runs, runs the pipeline and writes
//   fused.csv  report.csv  summary.json  manifest.lock
// into `output_dir` (created if missing). manifest.lock records SHA-256
// digests of the manifest, every run file and `extra_inputs` (label ->
// path), so a rerun can be checked against the same inputs.
PipelineResult RunPipelineToDirectory(
    const std::string& manifest_path, std::span<const GroundTruthBox> gts,
    const VerificationMap& verifications, const ClassHierarchy& hierarchy,
    const EvalConfig& eval_config, const std::string& output_dir,
    const std::map<std::string, std::string>& extra_inputs = {},
    const LoadOptions& options = {});

// Hex SHA-256 of a file's bytes.
std::string Sha256File(const std::string& path);
std::string Sha256Hex(std::string_view bytes);

}  // namespace sparsedet

#endif  // SPARSEDET_PIPELINE_H_
