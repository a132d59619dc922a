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

// sparsedet: command-line front end over the detection toolkit.
//
// Exit status: 0 on success, 1 on a usage error, 2 on bad input data.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "sparsedet/annotations.h"
#include "sparsedet/assignment.h"
#include "sparsedet/csv.h"
#include "sparsedet/ensemble.h"
#include "sparsedet/errors.h"
#include "sparsedet/evaluation.h"
#include "sparsedet/hierarchy.h"
#include "sparsedet/loss.h"
#include "sparsedet/pipeline.h"
#include "sparsedet/suppression.h"
#include "sparsedet/synthetic.h"

namespace sparsedet {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr char kOutputDirEnv[] = "SPARSEDET_OUTPUT_DIR";

struct GlobalFlags {
  unsigned threads = 1;
  bool lenient = false;
};

// Writes to a file when `path` is non-empty and not "-", else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(OpenOutput(path));
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }
  bool to_stdout() const { return file_ == nullptr; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void ReportSkipped(const std::string& what,
                   const std::vector<RowIssue>& skipped) {
  for (const RowIssue& issue : skipped) {
    std::cerr << "warning: " << what << ":" << issue.line
              << ": skipped: " << issue.message << "\n";
  }
}

template <typename C>
C Take(Loaded<C> loaded, const std::string& what) {
  ReportSkipped(what, loaded.skipped);
  return std::move(loaded.items);
}

OccurrenceCounts LoadOccurrence(const std::string& path,
                                const ClassHierarchy& h) {
  OccurrenceCounts counts;
  for (const auto& [c, v] : LoadClassValues(path, h, "Count")) {
    if (v < 0 || v != std::floor(v)) {
      throw DomainError(path + ": counts must be non-negative integers");
    }
    counts[c] = static_cast<std::int64_t>(v);
  }
  return counts;
}

void AddEvalFlags(CLI::App* cmd, EvalConfig* config) {
  cmd->add_option("--iou-threshold", config->iou_threshold,
                  "IoU needed for a true positive")
      ->capture_default_str();
  cmd->add_flag("!--no-expand-gt", config->expand_gt,
                "Do not expand gts and verified labels along the hierarchy");
  cmd->add_flag("--expand-detections", config->expand_detections,
                "Copy detections to every ancestor class");
  cmd->add_flag("--ignore-group-of", config->ignore_group_of,
                "Neither reward nor penalize detections on group-of boxes");
}

// ---------------------------------------------------------------- commands

struct AssignFlags {
  std::string hierarchy, gt, verifications, proposals, pairs, output = "-";
  AssignmentConfig config;
  std::string unverified = "negative";
};

int RunAssign(const AssignFlags& f, const GlobalFlags& g) {
  const LoadOptions options{g.lenient, nullptr};
  const ClassHierarchy h = LoadHierarchy(f.hierarchy);
  AssignmentConfig config = f.config;
  if (f.unverified == "ignore") {
    config.unverified_policy = UnverifiedPolicy::kIgnore;
  } else if (f.unverified != "negative") {
    throw DomainError("--unverified must be 'negative' or 'ignore'");
  }
  const auto gts = Take(LoadGroundTruth(f.gt, h, options), f.gt);
  const auto verifications =
      Take(LoadVerifications(f.verifications, h, options), f.verifications);
  std::vector<CooccurrencePair> pairs;
  if (!f.pairs.empty()) {
    pairs = Take(LoadCooccurrencePairs(f.pairs, h, options), f.pairs);
  }
  std::ifstream proposal_in = OpenInput(f.proposals);
  const auto proposals =
      Take(LoadProposals(proposal_in, options, f.proposals), f.proposals);

  std::map<std::string, std::vector<BBox>> by_image;
  for (const Proposal& p : proposals) by_image[p.image_id].push_back(p.box);
  std::map<std::string, std::vector<GroundTruthBox>> gts_by_image;
  for (const GroundTruthBox& b : gts) gts_by_image[b.image_id].push_back(b);

  Output out(f.output);
  for (const auto& [image_id, boxes] : by_image) {
    const auto it = gts_by_image.find(image_id);
    const std::vector<GroundTruthBox> empty;
    const auto& image_gts = it == gts_by_image.end() ? empty : it->second;
    const SupervisionMatrix sup =
        AssignTargets(boxes, image_gts,
                      VerificationFor(verifications, image_id), h, pairs,
                      config);
    WriteSupervisionJsonl(out.stream(), image_id, sup);
  }
  return kExitOk;
}

struct LossFlags {
  std::string logits, supervision, grad;
  bool normalize = false;
};

int RunLoss(const LossFlags& f) {
  std::ifstream logit_in = OpenInput(f.logits);
  const LogitMatrix logits = ReadLogitsCsv(logit_in, f.logits);
  std::ifstream sup_in = OpenInput(f.supervision);
  const SupervisionMatrix sup = ReadSupervisionJsonl(sup_in, f.supervision);
  const LossOptions options{f.normalize};
  const LossResult loss = SigmoidCrossEntropy(logits, sup, options);
  nlohmann::ordered_json summary;
  summary["loss"] = loss.total;
  summary["supervised_entries"] = loss.supervised_entries;
  summary["normalized"] = f.normalize;
  std::cout << summary.dump() << "\n";
  if (!f.grad.empty()) {
    Output out(f.grad);
    WriteMatrixCsv(out.stream(), SigmoidCrossEntropyGrad(logits, sup, options));
  }
  return kExitOk;
}

struct SuppressFlags {
  std::string hierarchy, input = "-", output = "-", method = "nms";
  std::string format = "csv";
  double iou_threshold = kDefaultSuppressionIoU;
};

int RunSuppress(const SuppressFlags& f, const GlobalFlags& g) {
  const LoadOptions options{g.lenient, nullptr};
  const ClassHierarchy h = LoadHierarchy(f.hierarchy);
  const SuppressionMethod method = ParseMethod(f.method);
  std::vector<Detection> dets;
  if (f.input == "-") {
    dets = Take(LoadDetectionsAuto(std::cin, h, options, "<stdin>"), "<stdin>");
  } else {
    dets = Take(LoadDetections(f.input, h, options), f.input);
  }
  const auto kept = SuppressClasswise(dets, method, f.iou_threshold, g.threads);
  Output out(f.output);
  if (f.format == "jsonl") {
    WriteDetectionsJsonl(out.stream(), kept, h);
  } else {
    WriteDetectionsCsv(out.stream(), kept, h);
  }
  return kExitOk;
}

struct EnsembleFlags {
  std::string manifest, hierarchy, output = "-", weights;
};

int RunEnsembleCommand(const EnsembleFlags& f, const GlobalFlags& g) {
  const LoadOptions options{g.lenient, nullptr};
  const ClassHierarchy h = LoadHierarchy(f.hierarchy);
  const EnsembleManifest manifest = LoadManifest(f.manifest);
  std::vector<std::string> notes;
  const std::vector<ModelRun> runs = LoadRuns(manifest, h, options, &notes);
  for (const std::string& n : notes) std::cerr << "note: " << n << "\n";
  const EnsembleOutput result =
      RunEnsemble(runs, manifest.alpha, manifest.method,
                  manifest.iou_threshold, g.threads);
  Output out(f.output);
  WriteFusedCsv(out.stream(), result.fused, runs, h);
  if (!f.weights.empty()) {
    Output w(f.weights);
    w.stream() << "Run,LabelName,Weight\n";
    for (const auto& [key, weight] : result.table.weights) {
      w.stream() << CsvEscape(key.first) << ',' << CsvEscape(h.Name(key.second))
                 << ',' << FormatDouble(weight) << '\n';
    }
  }
  return kExitOk;
}

struct EvaluateFlags {
  std::string gt, verifications, detections, hierarchy, report = "-";
  std::string rank_ranges, occurrence, ranges_output;
  EvalConfig config;
};

int RunEvaluate(const EvaluateFlags& f, const GlobalFlags& g) {
  const LoadOptions options{g.lenient, nullptr};
  const ClassHierarchy h = LoadHierarchy(f.hierarchy);
  const auto gts = Take(LoadGroundTruth(f.gt, h, options), f.gt);
  const auto verifications =
      Take(LoadVerifications(f.verifications, h, options), f.verifications);
  const auto dets = Take(LoadDetections(f.detections, h, options), f.detections);
  EvalConfig config = f.config;
  config.threads = g.threads;
  const EvaluationReport report = Evaluate(dets, gts, verifications, h, config);

  Output out(f.report);
  WriteReportCsv(out.stream(), report, h);
  std::ostream& summary = out.to_stdout() ? std::cerr : std::cout;
  summary << "mAP," << FormatDouble(report.mean_ap) << "\n";
  summary << "ClassesWithAP," << report.num_classes_with_ap << "\n";

  if (!f.rank_ranges.empty()) {
    const OccurrenceCounts occurrence =
        f.occurrence.empty() ? OccurrenceFromGroundTruth(gts, h, config.expand_gt)
                             : LoadOccurrence(f.occurrence, h);
    const std::vector<RankRange> ranges = ParseRankRanges(f.rank_ranges);
    const std::string row_name =
        std::filesystem::path(f.detections).stem().string();
    const NamedReport named[] = {{row_name, &report}};
    const RangeTable table = BuildRangeTable(named, occurrence, ranges);
    if (!f.ranges_output.empty()) {
      Output r(f.ranges_output);
      WriteRangeTableCsv(r.stream(), table);
    } else {
      WriteRangeTableCsv(summary, table);
    }
  }
  return kExitOk;
}

struct PlanFlags {
  std::string hierarchy, occurrence, gt, ranks, output = "-";
  std::size_t subset_size = 10;
  bool expand = false;
};

int RunPlan(const PlanFlags& f, const GlobalFlags& g) {
  const ClassHierarchy h = LoadHierarchy(f.hierarchy);
  OccurrenceCounts occurrence;
  if (!f.occurrence.empty()) {
    occurrence = LoadOccurrence(f.occurrence, h);
  } else if (!f.gt.empty()) {
    const LoadOptions options{g.lenient, nullptr};
    occurrence = OccurrenceFromGroundTruth(
        Take(LoadGroundTruth(f.gt, h, options), f.gt), h, f.expand);
  } else {
    throw CLI::RequiredError("--occurrence or --gt");
  }
  const RankRange ranks =
      f.ranks.empty() ? RankRange{1, occurrence.size()} : ParseRankRange(f.ranks);
  const auto subsets = PlanExpertSubsets(occurrence, f.subset_size, ranks);
  Output out(f.output);
  out.stream() << "Subset,Rank,LabelName,Count\n";
  std::size_t rank = ranks.lo;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (ClassId c : subsets[s]) {
      out.stream() << s << ',' << rank++ << ',' << CsvEscape(h.Name(c)) << ','
                   << occurrence.at(c) << '\n';
    }
  }
  return kExitOk;
}

struct PipelineFlags {
  std::string manifest, gt, verifications, hierarchy, output_dir;
  EvalConfig config;
};

std::string DefaultOutputDir(const std::string& flag, const char* fallback) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return fallback;
}

int RunPipelineCommand(const PipelineFlags& f, const GlobalFlags& g) {
  const LoadOptions options{g.lenient, nullptr};
  const ClassHierarchy h = LoadHierarchy(f.hierarchy);
  const auto gts = Take(LoadGroundTruth(f.gt, h, options), f.gt);
  const auto verifications =
      Take(LoadVerifications(f.verifications, h, options), f.verifications);
  EvalConfig config = f.config;
  config.threads = g.threads;
  const std::string dir = DefaultOutputDir(f.output_dir, "sparsedet_out");
  const PipelineResult result = RunPipelineToDirectory(
      f.manifest, gts, verifications, h, config, dir,
      {{"gt", f.gt}, {"verifications", f.verifications},
       {"hierarchy", f.hierarchy}},
      options);
  std::cout << "mAP," << FormatDouble(result.report.mean_ap) << "\n";
  std::cout << "OutputDir," << dir << "\n";
  return kExitOk;
}

struct SynthFlags {
  SynthConfig config;
  bool no_expert = false;
  std::string output_dir;
};

int RunSynth(const SynthFlags& f) {
  SynthConfig config = f.config;
  config.with_expert = !f.no_expert;
  const std::string dir = DefaultOutputDir(f.output_dir, "sparsedet_synth");
  WriteSynthetic(GenerateSynthetic(config), dir);
  std::cout << "OutputDir," << dir << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"sparsedet: detection toolkit for sparsely verified labels"};
  app.require_subcommand(1);
  GlobalFlags global;
  app.add_option("--threads", global.threads,
                 "Worker threads per stage (0 = all cores)")
      ->capture_default_str();
  app.add_flag("--lenient", global.lenient,
               "Skip malformed rows with a warning instead of failing");

  AssignFlags assign;
  auto* a = app.add_subcommand("assign-targets",
                               "Per-proposal, per-class training targets");
  a->add_option("--hierarchy", assign.hierarchy, "Hierarchy JSON or CSV")
      ->required();
  a->add_option("--gt", assign.gt, "Ground truth CSV")->required();
  a->add_option("--verifications", assign.verifications,
                "Image-level labels CSV")
      ->required();
  a->add_option("--proposals", assign.proposals,
                "ImageID,XMin,XMax,YMin,YMax CSV")
      ->required();
  a->add_option("--pairs", assign.pairs,
                "SubjectLabelName,PartLabelName CSV");
  a->add_option("--pos-iou", assign.config.pos_iou_threshold,
                "IoU for a positive target")
      ->capture_default_str();
  a->add_option("--containment", assign.config.containment_threshold,
                "Containment fraction for co-occurrence ignore")
      ->capture_default_str();
  a->add_option("--unverified", assign.unverified,
                "Unverified classes: negative or ignore")
      ->capture_default_str();
  a->add_option("-o,--output", assign.output, "JSON-lines output")
      ->capture_default_str();

  LossFlags loss;
  auto* l = app.add_subcommand("loss", "Masked sigmoid cross-entropy");
  l->add_option("--logits", loss.logits, "Logit matrix CSV")->required();
  l->add_option("--supervision", loss.supervision,
                "assign-targets JSON-lines")
      ->required();
  l->add_flag("--normalize", loss.normalize,
              "Divide by the number of supervised entries");
  l->add_option("--grad", loss.grad, "Write the gradient matrix CSV here");

  SuppressFlags suppress;
  auto* s = app.add_subcommand("suppress", "Class-wise NMS or NMW");
  s->add_option("--hierarchy", suppress.hierarchy, "Hierarchy JSON or CSV")
      ->required();
  s->add_option("--method", suppress.method, "nms or nmw")
      ->check(CLI::IsMember({"nms", "nmw"}))
      ->capture_default_str();
  s->add_option("--iou-threshold", suppress.iou_threshold,
                "Cluster overlap threshold")
      ->capture_default_str();
  s->add_option("-i,--input", suppress.input, "Detections (- for stdin)")
      ->capture_default_str();
  s->add_option("-o,--output", suppress.output, "Output (- for stdout)")
      ->capture_default_str();
  s->add_option("--format", suppress.format, "Output format: csv or jsonl")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();

  EnsembleFlags ensemble;
  auto* e = app.add_subcommand("ensemble", "Class-weighted model fusion");
  e->add_option("--manifest", ensemble.manifest, "Ensemble manifest JSON")
      ->required();
  e->add_option("--hierarchy", ensemble.hierarchy, "Hierarchy JSON or CSV")
      ->required();
  e->add_option("-o,--output", ensemble.output, "Fused detections CSV")
      ->capture_default_str();
  e->add_option("--weights", ensemble.weights,
                "Write the Run,LabelName,Weight table here");

  EvaluateFlags evaluate;
  auto* v = app.add_subcommand("evaluate", "Per-class AP and mAP");
  v->add_option("--gt", evaluate.gt, "Ground truth CSV")->required();
  v->add_option("--verifications", evaluate.verifications,
                "Image-level labels CSV")
      ->required();
  v->add_option("--detections", evaluate.detections,
                "Detections CSV or JSON-lines")
      ->required();
  v->add_option("--hierarchy", evaluate.hierarchy, "Hierarchy JSON or CSV")
      ->required();
  v->add_option("--report", evaluate.report, "Report CSV (- for stdout)")
      ->capture_default_str();
  v->add_option("--rank-ranges", evaluate.rank_ranges,
                "Comma-separated rarity rank ranges, e.g. 1-10,11-250");
  v->add_option("--occurrence", evaluate.occurrence,
                "LabelName,Count table (default: counted from --gt)");
  v->add_option("--ranges-output", evaluate.ranges_output,
                "Write the rank-range table here");
  AddEvalFlags(v, &evaluate.config);

  PlanFlags plan;
  auto* p = app.add_subcommand("plan-experts",
                               "Chunk rare classes into expert subsets");
  p->add_option("--hierarchy", plan.hierarchy, "Hierarchy JSON or CSV")
      ->required();
  p->add_option("--occurrence", plan.occurrence, "LabelName,Count table");
  p->add_option("--gt", plan.gt, "Count occurrence from this ground truth");
  p->add_flag("--expand", plan.expand,
              "With --gt, count gts toward ancestor classes too");
  p->add_option("--subset-size", plan.subset_size, "Classes per expert")
      ->capture_default_str();
  p->add_option("--ranks", plan.ranks, "Rank range lo-hi (default: all)");
  p->add_option("-o,--output", plan.output, "Subset CSV")
      ->capture_default_str();

  PipelineFlags pipeline;
  auto* q = app.add_subcommand("pipeline", "Ensemble then evaluate");
  q->add_option("--manifest", pipeline.manifest, "Ensemble manifest JSON")
      ->required();
  q->add_option("--gt", pipeline.gt, "Ground truth CSV")->required();
  q->add_option("--verifications", pipeline.verifications,
                "Image-level labels CSV")
      ->required();
  q->add_option("--hierarchy", pipeline.hierarchy, "Hierarchy JSON or CSV")
      ->required();
  q->add_option("--output-dir", pipeline.output_dir,
                std::string("Output directory (default: $") + kOutputDirEnv +
                    " or sparsedet_out)");
  AddEvalFlags(q, &pipeline.config);

  SynthFlags synth;
  auto* y = app.add_subcommand("synth", "Write a seeded synthetic dataset");
  y->add_option("--seed", synth.config.seed, "RNG seed")->capture_default_str();
  y->add_option("--images", synth.config.num_images, "Images per split")
      ->capture_default_str();
  y->add_option("--classes", synth.config.num_classes, "Number of classes")
      ->capture_default_str();
  y->add_option("--depth", synth.config.hierarchy_depth, "Hierarchy levels")
      ->capture_default_str();
  y->add_option("--sparsity", synth.config.sparsity,
                "Chance an absent class stays unverified")
      ->capture_default_str();
  y->add_option("--expert-classes", synth.config.expert_classes,
                "Rare classes given to the expert (0 = a quarter)")
      ->capture_default_str();
  y->add_flag("--no-expert", synth.no_expert, "Only emit the full model");
  y->add_option("--output-dir", synth.output_dir,
                std::string("Output directory (default: $") + kOutputDirEnv +
                    " or sparsedet_synth)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int code = app.exit(err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*a) return RunAssign(assign, global);
    if (*l) return RunLoss(loss);
    if (*s) return RunSuppress(suppress, global);
    if (*e) return RunEnsembleCommand(ensemble, global);
    if (*v) return RunEvaluate(evaluate, global);
    if (*p) return RunPlan(plan, global);
    if (*q) return RunPipelineCommand(pipeline, global);
    if (*y) return RunSynth(synth);
  } catch (const CLI::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  } catch (const nlohmann::json::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace sparsedet

int main(int argc, char** argv) { return sparsedet::Main(argc, argv); }
