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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Tables from criterion 6 are written to
// $SPARSEDET_OUTPUT_DIR (default ./acceptance_out).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.h"
#include "scenes.h"
#include "sparsedet/assignment.h"
#include "sparsedet/ensemble.h"
#include "sparsedet/errors.h"
#include "sparsedet/evaluation.h"
#include "sparsedet/loss.h"
#include "sparsedet/pipeline.h"
#include "sparsedet/suppression.h"
#include "sparsedet/synthetic.h"

namespace sparsedet {
namespace {

namespace fs = std::filesystem;

// Pinned tolerances and budgets.
constexpr double kNmwTolerance = 1e-12;
constexpr double kSuppressionBudgetSeconds = 5.0;
constexpr double kWeightTolerance = 1e-12;
constexpr double kWeightBudgetSeconds = 1.0;
constexpr double kFiniteDifferenceStep = 1e-5;
constexpr double kGradientRelativeTolerance = 1e-6;
constexpr double kEvaluationTolerance = 1e-12;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double SecondsSince(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string Fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

fs::path OutputDir() {
  const char* env = std::getenv("SPARSEDET_OUTPUT_DIR");
  return env != nullptr && *env != '\0' ? fs::path(env)
                                        : fs::path("acceptance_out");
}

Outcome Suppression() {
  Outcome o;
  std::mt19937_64 rng(1001);
  double worst = 0.0;
  int nms_mismatches = 0;
  const auto start = Clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dets = scenes::RandomSuppressScene(rng);
    const double thr = 0.1 + 0.8 * oracle::Uniform(rng);
    std::vector<Detection> expected;
    for (std::size_t i : oracle::ReferenceNmsKept(dets, thr)) {
      expected.push_back(dets[i]);
    }
    if (Nms(dets, thr) != expected) ++nms_mismatches;
    const auto merged = Nmw(dets, thr);
    const auto ref = oracle::ReferenceNmw(dets, thr);
    if (merged.size() != ref.size()) {
      worst = INFINITY;
      continue;
    }
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const BBox& a = merged[k].box;
      const BBox& b = ref[k].box;
      worst = std::max({worst, std::abs(a.x_min - b.x_min),
                        std::abs(a.y_min - b.y_min),
                        std::abs(a.x_max - b.x_max),
                        std::abs(a.y_max - b.y_max)});
      if (merged[k].score != ref[k].score) worst = INFINITY;
    }
  }
  const double seconds = SecondsSince(start);
  o.pass = nms_mismatches == 0 && worst <= kNmwTolerance &&
           seconds < kSuppressionBudgetSeconds;
  o.detail = "1000 scenes, nms mismatches " + std::to_string(nms_mismatches) +
             ", nmw max error " + Fmt("%.3g", worst) + ", " +
             Fmt("%.3f", seconds) + " s";
  return o;
}

Outcome Weights() {
  Outcome o;
  std::mt19937_64 rng(1002);
  int failures = 0;
  const auto start = Clock::now();
  for (int i = 0; i < 100000; ++i) {
    const double t = oracle::Uniform(rng);
    const double mu = oracle::Uniform(rng) * t;
    const double alpha = 1.0 - oracle::Uniform(rng);
    const double s1 = oracle::Uniform(rng) * t;
    const double s2 = oracle::Uniform(rng) * t;
    const double below = oracle::Uniform(rng) * mu;
    const double w1 = ClassWeight(s1, mu, t, alpha);
    const double w2 = ClassWeight(s2, mu, t, alpha);
    if (ClassWeight(t, mu, t, alpha) != 1.0) ++failures;
    if (mu < t && ClassWeight(mu, mu, t, alpha) != alpha) ++failures;
    if (below < mu && ClassWeight(below, mu, t, alpha) != alpha) ++failures;
    if (w1 < alpha - kWeightTolerance || w1 > 1.0 + kWeightTolerance) {
      ++failures;
    }
    const double lo = s1 <= s2 ? w1 : w2;
    const double hi = s1 <= s2 ? w2 : w1;
    if (lo > hi + kWeightTolerance) ++failures;
  }
  const double seconds = SecondsSince(start);
  o.pass = failures == 0 && seconds < kWeightBudgetSeconds;
  o.detail = "100000 tuples, failures " + std::to_string(failures) + ", " +
             Fmt("%.3f", seconds) + " s";
  return o;
}

Outcome LossGradient() {
  Outcome o;
  std::mt19937_64 rng(1003);
  double worst = 0.0;
  int ignore_changes = 0;
  const double h = kFiniteDifferenceStep;
  for (int trial = 0; trial < 100; ++trial) {
    SupervisionMatrix sup(std::vector<BBox>(16, BBox{0, 0, 1, 1}), 8);
    LogitMatrix z(16, 8, 0.0);
    for (std::size_t p = 0; p < 16; ++p) {
      for (std::size_t c = 0; c < 8; ++c) {
        const int k = oracle::UniformInt(rng, 0, 2);
        const auto s = static_cast<SupervisionState>(k);
        sup.Set(p, MakeClassId(c), s,
                s == SupervisionState::kIgnore ? Provenance::kUnverifiedPolicy
                                               : Provenance::kDefault);
        z(p, c) = (oracle::Uniform(rng) - 0.5) * 12.0;
      }
    }
    const auto grad = SigmoidCrossEntropyGrad(z, sup);
    const double total = SigmoidCrossEntropy(z, sup).total;
    for (std::size_t p = 0; p < 16; ++p) {
      for (std::size_t c = 0; c < 8; ++c) {
        LogitMatrix plus = z;
        LogitMatrix minus = z;
        plus(p, c) += h;
        minus(p, c) -= h;
        const auto lp = SigmoidCrossEntropy(plus, sup);
        const auto lm = SigmoidCrossEntropy(minus, sup);
        if (sup.state(p, MakeClassId(c)) == SupervisionState::kIgnore) {
          if (lp.total != total || lm.total != total || grad(p, c) != 0.0) {
            ++ignore_changes;
          }
          continue;
        }
        // Only entry (p, c) changes, so difference that entry alone rather
        // than the rounded totals.
        const double fd =
            (lp.per_entry(p, c) - lm.per_entry(p, c)) / (2.0 * h);
        const double g = grad(p, c);
        worst = std::max(worst, std::abs(fd - g) / std::abs(g));
      }
    }
  }
  o.pass = worst < kGradientRelativeTolerance && ignore_changes == 0;
  o.detail = "100 matrices 16x8, max relative error " + Fmt("%.3g", worst) +
             ", ignore perturbations changing the loss " +
             std::to_string(ignore_changes);
  return o;
}

bool SameAsGrid(const SupervisionMatrix& sup, const oracle::EntryGrid& grid) {
  for (std::size_t p = 0; p < sup.num_proposals(); ++p) {
    for (std::size_t c = 0; c < sup.num_classes(); ++c) {
      if (sup.state(p, MakeClassId(c)) != grid[p][c].state ||
          sup.provenance(p, MakeClassId(c)) != grid[p][c].provenance) {
        return false;
      }
    }
  }
  return true;
}

Outcome Assignment() {
  Outcome o;
  std::mt19937_64 rng(1004);
  int rule_mismatch = 0;
  int baseline_mismatch = 0;
  int monotonicity = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto s = scenes::RandomAssignScene(rng);
    const auto sup = AssignTargets(s.proposals, s.gts, s.verification,
                                   s.hierarchy, s.pairs, s.config);
    if (!SameAsGrid(sup, oracle::InterpretRules(s.proposals, s.gts,
                                                s.verification, s.dag, s.pairs,
                                                s.config))) {
      ++rule_mismatch;
    }
    // The baseline knows nothing of verification, so it is compared under
    // the negative policy.
    AssignmentConfig negative = s.config;
    negative.unverified_policy = UnverifiedPolicy::kNegative;
    const auto base = AssignTargets(s.proposals, s.gts, s.verification,
                                    s.hierarchy, {}, negative);
    if (!SameAsGrid(base, oracle::InterpretBaseline(
                              s.proposals, s.gts, s.dag,
                              s.config.pos_iou_threshold))) {
      ++baseline_mismatch;
    }
    const auto no_pairs = AssignTargets(s.proposals, s.gts, s.verification,
                                        s.hierarchy, {}, s.config);
    for (std::size_t p = 0; p < sup.num_proposals(); ++p) {
      for (std::size_t c = 0; c < sup.num_classes(); ++c) {
        const auto before = no_pairs.state(p, MakeClassId(c));
        const auto after = sup.state(p, MakeClassId(c));
        if (before != after && !(before == SupervisionState::kNegative &&
                                 after == SupervisionState::kIgnore)) {
          ++monotonicity;
        }
      }
    }
  }
  o.pass = rule_mismatch == 0 && baseline_mismatch == 0 && monotonicity == 0;
  o.detail = "500 scenes, rule mismatches " + std::to_string(rule_mismatch) +
             ", baseline mismatches " + std::to_string(baseline_mismatch) +
             ", monotonicity violations " + std::to_string(monotonicity);
  return o;
}

Outcome Evaluation() {
  Outcome o;
  std::mt19937_64 rng(1005);
  double worst = 0.0;
  int definedness = 0;
  int masking = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto s = scenes::RandomEvalScene(rng);
    const auto report = Evaluate(s.dets, s.gts, s.verifications, s.hierarchy);
    const auto ref =
        oracle::ReferenceAp(s.dets, s.gts, s.verifications, s.dag, 0.5);
    for (std::size_t c = 0; c < ref.size(); ++c) {
      if (report.classes[c].ap.has_value() != ref[c].has_value()) {
        ++definedness;
      } else if (ref[c]) {
        worst = std::max(worst, std::abs(*report.classes[c].ap - *ref[c]));
      }
    }
    std::vector<Detection> verified_only;
    for (const Detection& d : s.dets) {
      const auto it = s.verifications.find(d.image_id);
      if (it == s.verifications.end()) continue;
      if (ExpandVerification(it->second, s.hierarchy).IsVerified(d.class_id)) {
        verified_only.push_back(d);
      }
    }
    if (!(Evaluate(verified_only, s.gts, s.verifications, s.hierarchy) ==
          report)) {
      ++masking;
    }
  }

  // Hand-built precision-recall cases: one gt, detections ranked
  // TP,FP / none / FP,TP.
  const auto h = ClassHierarchy::Build({"A"}, {});
  const ClassId a = MakeClassId(0);
  const std::vector<GroundTruthBox> gts = {{"img", a, {0, 0, 10, 10}}};
  const VerificationMap v = {{"img", {"img", {a}, {}}}};
  auto ap = [&](const std::vector<Detection>& dets) {
    return Evaluate(dets, gts, v, h).For(a).ap.value_or(-1.0);
  };
  const double tp_fp = ap({{"img", a, 0.9, {0, 0, 8, 10}},
                           {"img", a, 0.8, {20, 20, 30, 30}}});
  const double none = ap({});
  const double fp_tp = ap({{"img", a, 0.8, {0, 0, 8, 10}},
                           {"img", a, 0.9, {20, 20, 30, 30}}});
  const bool cases = tp_fp == 1.0 && none == 0.0 && fp_tp == 0.5;

  o.pass = worst <= kEvaluationTolerance && definedness == 0 && masking == 0 &&
           cases;
  o.detail = "200 scenes, max AP error " + Fmt("%.3g", worst) +
             ", definedness mismatches " + std::to_string(definedness) +
             ", masking differences " + std::to_string(masking) +
             ", PR cases " + Fmt("%g", tp_fp) + "/" + Fmt("%g", none) + "/" +
             Fmt("%g", fp_tp);
  return o;
}

// Subjects sit in the left half of each image with their parts inside them;
// clutter sits in the right half. Every part object is annotated, so its
// image is evaluated. The baseline detector was trained with parts inside
// unlabeled subjects as negatives; its detections whose box the baseline
// assignment marks Negative but the co-occurrence assignment marks Ignore
// (parts hidden, subject visible) carry a suppressed score. The simulated
// co-occurrence detector deletes those suppressed detections and keeps the
// unsuppressed originals.
Outcome CooccurrenceTables() {
  Outcome o;
  const std::vector<std::string> names = {
      "Person",  "Human face", "Human arm", "Clothing",
      "Vehicle", "Car",        "Tire",      "Vehicle registration plate"};
  const auto h = ClassHierarchy::Build(names, {{"Car", "Vehicle"}});
  auto id = [&](const char* n) { return h.Resolve(n); };
  const std::vector<CooccurrencePair> pairs = {
      {id("Person"), id("Human face")},
      {id("Person"), id("Human arm")},
      {id("Person"), id("Clothing")},
      {id("Car"), id("Tire")},
      {id("Car"), id("Vehicle registration plate")}};
  const std::vector<ClassId> subjects = {id("Person"), id("Car")};
  std::vector<ClassId> parts;
  for (const auto& p : pairs) parts.push_back(p.part);

  std::mt19937_64 rng(1006);
  std::vector<GroundTruthBox> gts;
  VerificationMap verifications;
  std::vector<Detection> original;
  for (int img = 0; img < 80; ++img) {
    const std::string image_id = "img" + std::to_string(img);
    ImageVerification v{image_id, {}, {}};
    const int num_subjects = oracle::UniformInt(rng, 1, 2);
    for (int k = 0; k < num_subjects; ++k) {
      const ClassId subject = subjects[oracle::UniformInt(rng, 0, 1)];
      const double w = 0.2 + 0.2 * oracle::Uniform(rng);
      const double x0 = oracle::Uniform(rng) * (0.5 - w);
      const double y0 = oracle::Uniform(rng) * (1.0 - w);
      const BBox sbox{x0, y0, x0 + w, y0 + w};
      gts.push_back({image_id, subject, sbox});
      v.verified_positive.push_back(subject);
      original.push_back({image_id, subject, 0.5 + 0.5 * oracle::Uniform(rng),
                          sbox});
      for (const auto& pair : pairs) {
        if (pair.subject != subject) continue;
        const double pw = w * (0.25 + 0.2 * oracle::Uniform(rng));
        const double px = sbox.x_min + 0.05 * w +
                          oracle::Uniform(rng) * (w * 0.9 - pw);
        const double py = sbox.y_min + 0.05 * w +
                          oracle::Uniform(rng) * (w * 0.9 - pw);
        const BBox pbox{px, py, px + pw, py + pw};
        gts.push_back({image_id, pair.part, pbox});
        v.verified_positive.push_back(pair.part);
        if (oracle::Uniform(rng) < 0.9) {
          original.push_back({image_id, pair.part,
                              0.3 + 0.7 * oracle::Uniform(rng), pbox});
        }
      }
    }
    for (int k = 0; k < 3; ++k) {
      const ClassId c = parts[oracle::UniformInt(rng, 0, 4)];
      const double x0 = 0.55 + 0.3 * oracle::Uniform(rng);
      const double y0 = 0.8 * oracle::Uniform(rng);
      original.push_back({image_id, c, oracle::Uniform(rng),
                          {x0, y0, x0 + 0.1, y0 + 0.1}});
    }
    v.verified_positive = h.ExpandLabels(v.verified_positive);
    for (std::size_t c = 0; c < h.size(); ++c) {
      if (!std::binary_search(v.verified_positive.begin(),
                              v.verified_positive.end(), MakeClassId(c))) {
        v.verified_negative.push_back(MakeClassId(c));
      }
    }
    verifications[image_id] = std::move(v);
  }

  // Training view of each image: parts unlabeled, subjects labeled.
  std::vector<Detection> baseline = original;
  std::size_t suppressed = 0;
  const AssignmentConfig config;
  for (Detection& d : baseline) {
    if (std::find(parts.begin(), parts.end(), d.class_id) == parts.end()) {
      continue;
    }
    std::vector<GroundTruthBox> visible;
    ImageVerification view{d.image_id, {}, {}};
    for (const auto& g : gts) {
      if (g.image_id != d.image_id) continue;
      if (std::find(subjects.begin(), subjects.end(), g.class_id) ==
          subjects.end()) {
        continue;
      }
      visible.push_back(g);
      view.verified_positive.push_back(g.class_id);
    }
    std::sort(view.verified_positive.begin(), view.verified_positive.end());
    view.verified_positive.erase(std::unique(view.verified_positive.begin(),
                                             view.verified_positive.end()),
                                 view.verified_positive.end());
    const std::vector<BBox> proposal = {d.box};
    const auto plain =
        AssignTargets(proposal, visible, view, h, {}, config);
    const auto cooc = AssignTargets(proposal, visible, view, h, pairs, config);
    if (plain.state(0, d.class_id) == SupervisionState::kNegative &&
        cooc.provenance(0, d.class_id) == Provenance::kCooccurrenceIgnore) {
      d.score *= 0.1;
      ++suppressed;
    }
  }
  // The co-occurrence run: suppressed detections deleted, originals kept.
  std::vector<Detection> cooccurrence;
  for (std::size_t i = 0; i < baseline.size(); ++i) {
    if (baseline[i].score != original[i].score) {
      cooccurrence.push_back(original[i]);
    } else {
      cooccurrence.push_back(baseline[i]);
    }
  }

  const auto base_report = Evaluate(baseline, gts, verifications, h);
  const auto cooc_report = Evaluate(cooccurrence, gts, verifications, h);
  const std::vector<NamedReport> rows = {{"Baseline", &base_report},
                                         {"Co-occurrence loss", &cooc_report}};
  const auto class_table = BuildClassTable(rows, parts);
  const auto occurrence = OccurrenceFromGroundTruth(gts, h);
  const std::vector<RankRange> ranges = {{1, 4}, {5, 8}, {1, 8}};
  const auto range_table = BuildRangeTable(rows, occurrence, ranges);

  const fs::path dir = OutputDir();
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "cooccurrence_class_ap.csv");
    WriteClassTableCsv(out, class_table, h);
  }
  {
    std::ofstream out(dir / "cooccurrence_rank_ranges.csv");
    WriteRangeTableCsv(out, range_table);
  }
  std::string expected_header = "Model";
  for (ClassId c : parts) expected_header += "," + h.Name(c);
  expected_header += ",Average\n";
  const bool shapes =
      Slurp(dir / "cooccurrence_class_ap.csv").rfind(expected_header, 0) ==
          0 &&
      Slurp(dir / "cooccurrence_rank_ranges.csv")
              .rfind("Model,Index 1-4,Index 5-8,Index 1-8\n", 0) == 0 &&
      class_table.values.size() == 2 && range_table.values.size() == 2;

  bool all_nonnegative = true;
  double min_delta = INFINITY;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto& b = class_table.values[0][k];
    const auto& c = class_table.values[1][k];
    if (!b || !c) {
      all_nonnegative = false;
      continue;
    }
    min_delta = std::min(min_delta, *c - *b);
    if (*c < *b) all_nonnegative = false;
  }
  const double average_delta =
      class_table.averages[1].value_or(NAN) -
      class_table.averages[0].value_or(NAN);
  o.pass = shapes && all_nonnegative && suppressed > 0;
  o.detail = std::to_string(parts.size()) + " part classes, " +
             std::to_string(suppressed) +
             " suppressed detections, min AP delta " +
             Fmt("%.4f", min_delta) + ", average delta " +
             Fmt("%.4f", average_delta) + ", tables in " + dir.string();
  return o;
}

SynthConfig AcceptanceSynth(std::uint64_t seed) {
  SynthConfig config;
  config.seed = seed;
  config.num_images = 150;
  config.num_classes = 16;
  return config;
}

Outcome Determinism() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "sparsedet_acceptance_ac7";
  fs::remove_all(dir);
  const auto data = GenerateSynthetic(AcceptanceSynth(7));
  WriteSynthetic(data, (dir / "in").string());
  const auto h = LoadHierarchy((dir / "in" / "hierarchy.json").string());
  const auto gts = LoadGroundTruth((dir / "in" / "gt.csv").string(), h).items;
  const auto v =
      LoadVerifications((dir / "in" / "verifications.csv").string(), h).items;
  const std::string manifest = (dir / "in" / "manifest.json").string();
  EvalConfig threaded;
  threaded.threads = 4;
  RunPipelineToDirectory(manifest, gts, v, h, {}, (dir / "a").string());
  RunPipelineToDirectory(manifest, gts, v, h, threaded, (dir / "b").string());
  bool same = true;
  std::size_t bytes = 0;
  for (const char* name : {"fused.csv", "report.csv"}) {
    const std::string a = Slurp(dir / "a" / name);
    bytes += a.size();
    same = same && !a.empty() && a == Slurp(dir / "b" / name);
  }
  fs::remove_all(dir);
  o.pass = same;
  o.detail = std::string("two runs (1 and 4 threads), fused.csv and ") +
             "report.csv " + (same ? "identical" : "differ") + ", " +
             std::to_string(bytes) + " bytes";
  return o;
}

Outcome Dominance() {
  Outcome o;
  std::string detail;
  bool dominance = true;
  bool routing = true;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const fs::path dir = fs::temp_directory_path() /
                         ("sparsedet_acceptance_ac8_" + std::to_string(seed));
    fs::remove_all(dir);
    auto data = GenerateSynthetic(AcceptanceSynth(seed));
    // Leak one out-of-subset detection into the expert's file; loading must
    // route it away.
    ModelRun& expert = data.runs[1];
    for (std::size_t c = 0; c < data.hierarchy.size(); ++c) {
      if (!expert.Covers(MakeClassId(c))) {
        expert.detections.push_back(
            {data.gts.front().image_id, MakeClassId(c), 0.99, {0, 0, 1, 1}});
        break;
      }
    }
    WriteSynthetic(data, dir.string());
    const auto manifest = LoadManifest((dir / "manifest.json").string());
    const auto runs = LoadRuns(manifest, data.hierarchy);
    fs::remove_all(dir);
    for (const ModelRun& run : runs) {
      for (const Detection& d : run.detections) {
        if (!run.Covers(d.class_id)) routing = false;
      }
    }
    const auto fused = RunPipeline(runs, manifest, data.gts,
                                   data.verifications, data.hierarchy, {});
    for (const FusedDetection& f : fused.ensemble.fused) {
      if (!runs[f.run].Covers(f.detection.class_id)) routing = false;
    }
    double best_single = 0.0;
    for (const ModelRun& run : runs) {
      const std::vector<ModelRun> one = {run};
      const auto single = RunPipeline(one, manifest, data.gts,
                                      data.verifications, data.hierarchy, {});
      best_single = std::max(best_single, single.report.mean_ap);
    }
    if (fused.report.mean_ap < best_single) dominance = false;
    detail += (detail.empty() ? "" : "; ") + std::string("seed ") +
              std::to_string(seed) + " fused " +
              Fmt("%.4f", fused.report.mean_ap) + " vs best single " +
              Fmt("%.4f", best_single);

    // An unrouted leak must be rejected.
    std::vector<ModelRun> raw = runs;
    raw[1].detections.push_back(expert.detections.back());
    try {
      Fuse(raw, BuildWeightTable(runs, manifest.alpha), manifest.method,
           manifest.iou_threshold);
      routing = false;
    } catch (const SubsetViolationError&) {
    }
  }
  o.pass = dominance && routing;
  o.detail = detail + "; routing " + (routing ? "clean" : "leaked");
  return o;
}

}  // namespace
}  // namespace sparsedet

int main() {
  using sparsedet::Outcome;
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria =
      {{"suppression oracle", sparsedet::Suppression},
       {"class weight endpoints", sparsedet::Weights},
       {"loss gradient", sparsedet::LossGradient},
       {"assignment oracle", sparsedet::Assignment},
       {"evaluation oracle", sparsedet::Evaluation},
       {"co-occurrence tables", sparsedet::CooccurrenceTables},
       {"pipeline determinism", sparsedet::Determinism},
       {"ensemble dominance", sparsedet::Dominance}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    if (!outcome.pass) ++failures;
    std::printf("AC%zu %s %s: %s\n", i + 1, outcome.pass ? "PASS" : "FAIL",
                criteria[i].first, outcome.detail.c_str());
  }
  return failures == 0 ? 0 : 1;
}
