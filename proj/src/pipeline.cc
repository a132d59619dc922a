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
#include "sparsedet/pipeline.h"

#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>

#include "sparsedet/csv.h"
#include "sparsedet/errors.h"

namespace sparsedet {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string RequireString(const json& obj, const char* key,
                          const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw DomainError(where + ": missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

double OptionalNumber(const json& obj, const char* key, double fallback) {
  const auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  if (!it->is_number()) {
    throw DomainError(std::string("manifest field '") + key +
                      "' must be a number");
  }
  return it->get<double>();
}

std::string ReadAll(const std::string& path) {
  std::ifstream in = OpenInput(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const fs::path& path, const std::string& contents) {
  std::ofstream out = OpenOutput(path.string());
  out << contents;
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length,
                 EVP_sha256(), nullptr) != 1) {
    throw IoError("SHA-256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    hex.push_back(kHex[digest[i] >> 4]);
    hex.push_back(kHex[digest[i] & 0xf]);
  }
  return hex;
}

std::string Sha256File(const std::string& path) {
  return Sha256Hex(ReadAll(path));
}

std::string EnsembleManifest::Resolve(const std::string& path) const {
  const fs::path p(path);
  if (p.is_absolute()) return path;
  return (fs::path(base_dir) / p).lexically_normal().string();
}

EnsembleManifest ParseManifest(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw DomainError("manifest must be a JSON object");
  EnsembleManifest m;
  m.base_dir = base_dir.empty() ? "." : base_dir;
  m.alpha = OptionalNumber(doc, "alpha", kDefaultAlpha);
  m.iou_threshold =
      OptionalNumber(doc, "iou_threshold", kDefaultSuppressionIoU);
  if (const auto it = doc.find("method"); it != doc.end()) {
    if (!it->is_string()) throw DomainError("manifest 'method' must be text");
    m.method = ParseMethod(it->get<std::string>());
  }
  if (!(m.alpha > 0.0 && m.alpha <= 1.0)) {
    throw DomainError("manifest alpha must lie in (0, 1]");
  }
  if (!(m.iou_threshold > 0.0 && m.iou_threshold < 1.0)) {
    throw DomainError("manifest iou_threshold must lie in (0, 1)");
  }
  const auto runs = doc.find("runs");
  if (runs == doc.end() || !runs->is_array() || runs->empty()) {
    throw DomainError("manifest needs a non-empty 'runs' array");
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < runs->size(); ++i) {
    const json& r = (*runs)[i];
    const std::string where = "manifest run " + std::to_string(i);
    if (!r.is_object()) throw DomainError(where + " must be an object");
    RunSpec spec;
    spec.name = RequireString(r, "name", where);
    spec.detections = RequireString(r, "detections", where);
    spec.val_scores = RequireString(r, "val_scores", where);
    if (r.contains("class_subset") && !r["class_subset"].is_null()) {
      spec.class_subset = RequireString(r, "class_subset", where);
    }
    if (!names.insert(spec.name).second) {
      throw DomainError("duplicate run name '" + spec.name + "'");
    }
    m.runs.push_back(std::move(spec));
  }
  return m;
}

EnsembleManifest LoadManifest(const std::string& path) {
  const std::string text = ReadAll(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path, 0, e.what());
  }
  return ParseManifest(doc, fs::path(path).parent_path().string());
}

json ManifestToJson(const EnsembleManifest& manifest) {
  ordered_json doc;
  doc["alpha"] = manifest.alpha;
  doc["method"] = std::string(MethodName(manifest.method));
  doc["iou_threshold"] = manifest.iou_threshold;
  ordered_json runs = ordered_json::array();
  for (const RunSpec& spec : manifest.runs) {
    ordered_json r;
    r["name"] = spec.name;
    r["detections"] = spec.detections;
    r["val_scores"] = spec.val_scores;
    if (spec.class_subset) r["class_subset"] = *spec.class_subset;
    runs.push_back(std::move(r));
  }
  doc["runs"] = std::move(runs);
  return json::parse(doc.dump());
}

std::vector<ModelRun> LoadRuns(const EnsembleManifest& manifest,
                               const ClassHierarchy& hierarchy,
                               const LoadOptions& options,
                               std::vector<std::string>* notes) {
  std::vector<ModelRun> runs;
  for (const RunSpec& spec : manifest.runs) {
    ModelRun run;
    run.name = spec.name;
    auto loaded =
        LoadDetections(manifest.Resolve(spec.detections), hierarchy, options);
    run.detections = std::move(loaded.items);
    if (notes != nullptr) {
      for (const RowIssue& issue : loaded.skipped) {
        notes->push_back(spec.detections + ":" + std::to_string(issue.line) +
                         ": skipped: " + issue.message);
      }
    }
    run.val_scores =
        LoadClassValues(manifest.Resolve(spec.val_scores), hierarchy, "AP");
    if (spec.class_subset) {
      run.class_subset =
          LoadClassList(manifest.Resolve(*spec.class_subset), hierarchy);
    }
    std::size_t dropped = 0;
    run = RouteToSubset(std::move(run), &dropped);
    if (dropped > 0 && notes != nullptr) {
      notes->push_back("run '" + spec.name + "': routed away " +
                       std::to_string(dropped) +
                       " detections outside its class subset");
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

EnsembleOutput RunEnsemble(std::span<const ModelRun> runs, double alpha,
                           SuppressionMethod method, double iou_threshold,
                           unsigned threads) {
  EnsembleOutput out;
  out.table = BuildWeightTable(runs, alpha);
  out.fused = Fuse(runs, out.table, method, iou_threshold, threads);
  return out;
}

void WriteFusedCsv(std::ostream& out, std::span<const FusedDetection> fused,
                   std::span<const ModelRun> runs,
                   const ClassHierarchy& hierarchy) {
  const std::vector<Detection> dets = FusedDetections(fused);
  std::vector<std::string> sources;
  sources.reserve(fused.size());
  for (const FusedDetection& f : fused) sources.push_back(runs[f.run].name);
  WriteDetectionsCsv(out, dets, hierarchy, sources);
}

PipelineResult RunPipeline(std::span<const ModelRun> runs,
                           const EnsembleManifest& manifest,
                           std::span<const GroundTruthBox> gts,
                           const VerificationMap& verifications,
                           const ClassHierarchy& hierarchy,
                           const EvalConfig& eval_config) {
  PipelineResult result;
  result.ensemble = RunEnsemble(runs, manifest.alpha, manifest.method,
                                manifest.iou_threshold, eval_config.threads);
  const std::vector<Detection> dets = FusedDetections(result.ensemble.fused);
  result.report = Evaluate(dets, gts, verifications, hierarchy, eval_config);
  return result;
}

PipelineResult RunPipelineToDirectory(
    const std::string& manifest_path, std::span<const GroundTruthBox> gts,
    const VerificationMap& verifications, const ClassHierarchy& hierarchy,
    const EvalConfig& eval_config, const std::string& output_dir,
    const std::map<std::string, std::string>& extra_inputs,
    const LoadOptions& options) {
  const EnsembleManifest manifest = LoadManifest(manifest_path);
  std::vector<std::string> notes;
  const std::vector<ModelRun> runs =
      LoadRuns(manifest, hierarchy, options, &notes);
  PipelineResult result = RunPipeline(runs, manifest, gts, verifications,
                                      hierarchy, eval_config);

  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec) throw IoError("cannot create " + output_dir + ": " + ec.message());
  const fs::path dir(output_dir);

  std::ostringstream fused;
  WriteFusedCsv(fused, result.ensemble.fused, runs, hierarchy);
  WriteFile(dir / "fused.csv", fused.str());

  std::ostringstream report;
  WriteReportCsv(report, result.report, hierarchy);
  WriteFile(dir / "report.csv", report.str());

  ordered_json summary;
  summary["mean_ap"] = result.report.mean_ap;
  summary["num_classes"] = hierarchy.size();
  summary["num_classes_with_ap"] = result.report.num_classes_with_ap;
  summary["num_fused_detections"] = result.ensemble.fused.size();
  summary["ensemble"] = ManifestToJson(manifest);
  summary["ensemble"].erase("runs");
  ordered_json eval;
  eval["iou_threshold"] = eval_config.iou_threshold;
  eval["expand_gt"] = eval_config.expand_gt;
  eval["expand_detections"] = eval_config.expand_detections;
  eval["ignore_group_of"] = eval_config.ignore_group_of;
  summary["evaluation"] = std::move(eval);
  ordered_json run_info = ordered_json::array();
  for (const ModelRun& run : runs) {
    ordered_json r;
    r["name"] = run.name;
    r["num_detections"] = run.detections.size();
    r["expert"] = run.class_subset.has_value();
    run_info.push_back(std::move(r));
  }
  summary["runs"] = std::move(run_info);
  summary["notes"] = notes;
  WriteFile(dir / "summary.json", summary.dump(2) + "\n");

  ordered_json lock;
  lock["manifest"] = {{"file", fs::path(manifest_path).filename().string()},
                      {"sha256", Sha256File(manifest_path)}};
  ordered_json inputs = ordered_json::array();
  for (const RunSpec& spec : manifest.runs) {
    std::vector<std::string> files = {spec.detections, spec.val_scores};
    if (spec.class_subset) files.push_back(*spec.class_subset);
    for (const std::string& f : files) {
      inputs.push_back({{"run", spec.name},
                        {"file", f},
                        {"sha256", Sha256File(manifest.Resolve(f))}});
    }
  }
  lock["inputs"] = std::move(inputs);
  ordered_json extra = ordered_json::object();
  for (const auto& [label, path] : extra_inputs) {
    extra[label] = {{"file", fs::path(path).filename().string()},
                    {"sha256", Sha256File(path)}};
  }
  lock["extra_inputs"] = std::move(extra);
  WriteFile(dir / "manifest.lock", lock.dump(2) + "\n");
  return result;
}

}  // namespace sparsedet
