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
#include "sparsedet/synthetic.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "sparsedet/csv.h"
#include "sparsedet/errors.h"
#include "sparsedet/evaluation.h"

namespace sparsedet {

namespace fs = std::filesystem;

namespace {

// Per-model skill. Objects of class c are found with probability recall[c].
struct Profile {
  std::string name;
  std::vector<double> recall;
  std::optional<std::vector<ClassId>> subset;
};

struct Split {
  std::vector<GroundTruthBox> gts;
  VerificationMap verifications;
  std::vector<std::vector<Detection>> dets;  // per profile
  std::vector<std::vector<std::int64_t>> truth;
};

BBox RandomBox(std::mt19937_64& rng) {
  const double w = 0.1 + 0.4 * UniformUnit(rng);
  const double h = 0.1 + 0.4 * UniformUnit(rng);
  const double x = UniformUnit(rng) * (1.0 - w);
  const double y = UniformUnit(rng) * (1.0 - h);
  return {x, y, x + w, y + h};
}

BBox Jitter(const BBox& b, std::mt19937_64& rng) {
  const double w = b.x_max - b.x_min;
  const double h = b.y_max - b.y_min;
  auto shift = [&](double size) { return (UniformUnit(rng) - 0.5) * 0.1 * size; };
  BBox out{b.x_min + shift(w), b.y_min + shift(h), b.x_max + shift(w),
           b.y_max + shift(h)};
  out.x_min = std::clamp(out.x_min, 0.0, 1.0);
  out.y_min = std::clamp(out.y_min, 0.0, 1.0);
  out.x_max = std::clamp(out.x_max, out.x_min, 1.0);
  out.y_max = std::clamp(out.y_max, out.y_min, 1.0);
  return out;
}

std::string ClassName(std::size_t i, std::size_t n) {
  const int width = n > 100 ? 4 : 3;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "/syn/c%0*zu", width, i);
  return buf;
}

ClassHierarchy MakeHierarchy(const SynthConfig& config,
                             std::mt19937_64& rng) {
  const std::size_t n = config.num_classes;
  const std::size_t depth = config.hierarchy_depth;
  std::vector<std::string> names;
  std::vector<std::vector<std::size_t>> levels(depth);
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(ClassName(i, n));
    levels[i * depth / n].push_back(i);
  }
  std::vector<LabelEdge> edges;
  for (std::size_t l = 1; l < depth; ++l) {
    const auto& above = levels[l - 1];
    if (above.empty()) continue;
    for (std::size_t child : levels[l]) {
      const auto pick = [&] {
        return above[static_cast<std::size_t>(UniformUnit(rng) *
                                              static_cast<double>(above.size()))];
      };
      const std::size_t parent = pick();
      edges.emplace_back(names[child], names[parent]);
      if (above.size() > 1 && UniformUnit(rng) < 0.2) {
        const std::size_t second = pick();
        if (second != parent) edges.emplace_back(names[child], names[second]);
      }
    }
  }
  return ClassHierarchy::Build(names, edges);
}

std::size_t SampleClass(std::span<const double> cumulative,
                        std::mt19937_64& rng) {
  const double u = UniformUnit(rng) * cumulative.back();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1);
}

Split MakeSplit(const SynthConfig& config, const ClassHierarchy& h,
                std::span<const Profile> profiles, const std::string& prefix,
                std::mt19937_64& rng) {
  const std::size_t n = h.size();
  std::vector<double> cumulative(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total += 1.0 / static_cast<double>(i + 1);
    cumulative[i] = total;
  }

  Split split;
  split.dets.resize(profiles.size());
  split.truth.resize(profiles.size());
  for (std::size_t img = 0; img < config.num_images; ++img) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%06zu", prefix.c_str(), img);
    const std::string image_id = buf;

    const std::size_t first_gt = split.gts.size();
    const auto objects = 1 + static_cast<std::size_t>(UniformUnit(rng) * 3.0);
    std::vector<ClassId> present;
    for (std::size_t k = 0; k < objects; ++k) {
      const ClassId c = MakeClassId(SampleClass(cumulative, rng));
      split.gts.push_back({image_id, c, RandomBox(rng), false});
      present.push_back(c);
    }

    ImageVerification v;
    v.image_id = image_id;
    v.verified_positive = h.ExpandLabels(present);
    for (std::size_t i = 0; i < n; ++i) {
      const ClassId c = MakeClassId(i);
      const bool positive = std::binary_search(
          v.verified_positive.begin(), v.verified_positive.end(), c);
      // Always draw so the stream does not depend on the outcome.
      const bool verify = UniformUnit(rng) >= config.sparsity;
      if (!positive && verify) v.verified_negative.push_back(c);
    }
    split.verifications.emplace(image_id, std::move(v));

    for (std::size_t p = 0; p < profiles.size(); ++p) {
      const Profile& prof = profiles[p];
      auto covers = [&](ClassId c) {
        return !prof.subset ||
               std::binary_search(prof.subset->begin(), prof.subset->end(), c);
      };
      for (std::size_t g = first_gt; g < split.gts.size(); ++g) {
        const GroundTruthBox& gt = split.gts[g];
        const bool found = UniformUnit(rng) < prof.recall[Index(gt.class_id)];
        const BBox box = Jitter(gt.box, rng);
        const double score = 0.4 + 0.6 * UniformUnit(rng);
        // Half the found objects also get a weaker duplicate for
        // suppression to remove.
        const bool duplicate = UniformUnit(rng) < 0.5;
        const BBox dup_box = Jitter(gt.box, rng);
        const double dup_score = score * (0.5 + 0.5 * UniformUnit(rng));
        if (!found) continue;
        const ClassId self[] = {gt.class_id};
        for (ClassId c : h.ExpandLabels(self)) {
          if (!covers(c)) continue;
          split.dets[p].push_back({image_id, c, score, box});
          split.truth[p].push_back(static_cast<std::int64_t>(g));
          if (!duplicate) continue;
          split.dets[p].push_back({image_id, c, dup_score, dup_box});
          split.truth[p].push_back(static_cast<std::int64_t>(g));
        }
      }
      std::vector<ClassId> pool;
      if (prof.subset) {
        pool = *prof.subset;
      } else {
        for (std::size_t i = 0; i < n; ++i) pool.push_back(MakeClassId(i));
      }
      const auto false_positives =
          static_cast<std::size_t>(UniformUnit(rng) * 3.0);
      for (std::size_t k = 0; k < false_positives; ++k) {
        const ClassId c = pool[std::min(
            pool.size() - 1,
            static_cast<std::size_t>(UniformUnit(rng) *
                                     static_cast<double>(pool.size())))];
        const BBox box = RandomBox(rng);
        const double score = 0.7 * UniformUnit(rng);
        split.dets[p].push_back({image_id, c, score, box});
        split.truth[p].push_back(-1);
      }
    }
  }
  return split;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out = OpenOutput(path.string());
  out << text;
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace

double UniformUnit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

void SynthConfig::Validate() const {
  if (num_images < 1) throw DomainError("num_images must be >= 1");
  if (num_classes < 1) throw DomainError("num_classes must be >= 1");
  if (hierarchy_depth < 1 || hierarchy_depth > num_classes) {
    throw DomainError("hierarchy_depth must lie in [1, num_classes]");
  }
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw DomainError("sparsity must lie in [0, 1]");
  }
  if (expert_classes > num_classes) {
    throw DomainError("expert_classes exceeds num_classes");
  }
}

SyntheticDataset GenerateSynthetic(const SynthConfig& config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  SyntheticDataset data;
  data.hierarchy = MakeHierarchy(config, rng);
  const std::size_t n = config.num_classes;

  const std::size_t rare =
      config.expert_classes > 0 ? config.expert_classes
                                : std::max<std::size_t>(1, n / 4);
  std::vector<Profile> profiles;
  Profile full{"full", std::vector<double>(n, 0.9), std::nullopt};
  for (std::size_t i = n - rare; i < n; ++i) full.recall[i] = 0.3;
  profiles.push_back(std::move(full));
  if (config.with_expert) {
    Profile expert{"expert", std::vector<double>(n, 0.0),
                   std::vector<ClassId>()};
    for (std::size_t i = n - rare; i < n; ++i) {
      expert.recall[i] = 0.9;
      expert.subset->push_back(MakeClassId(i));
    }
    profiles.push_back(std::move(expert));
  }

  Split test = MakeSplit(config, data.hierarchy, profiles, "img", rng);
  const Split val = MakeSplit(config, data.hierarchy, profiles, "val", rng);

  data.gts = std::move(test.gts);
  data.verifications = std::move(test.verifications);
  data.truth = std::move(test.truth);
  for (std::size_t p = 0; p < profiles.size(); ++p) {
    ModelRun run;
    run.name = profiles[p].name;
    run.detections = std::move(test.dets[p]);
    run.class_subset = profiles[p].subset;
    const EvaluationReport report = Evaluate(val.dets[p], val.gts,
                                             val.verifications, data.hierarchy);
    for (std::size_t i = 0; i < n; ++i) {
      const ClassId c = MakeClassId(i);
      if (!run.Covers(c)) continue;
      run.val_scores[c] = report.For(c).ap.value_or(0.0);
    }
    data.runs.push_back(std::move(run));
  }
  return data;
}

void WriteSynthetic(const SyntheticDataset& data, const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir + ": " + ec.message());
  const fs::path root(dir);
  const ClassHierarchy& h = data.hierarchy;

  WriteText(root / "hierarchy.json", HierarchyToJson(h).dump(2) + "\n");
  {
    std::ofstream out = OpenOutput((root / "gt.csv").string());
    WriteGroundTruthCsv(out, data.gts, h);
  }
  {
    std::ofstream out = OpenOutput((root / "verifications.csv").string());
    WriteVerificationsCsv(out, data.verifications, h);
  }

  nlohmann::ordered_json manifest;
  manifest["alpha"] = kDefaultAlpha;
  manifest["method"] = "nmw";
  manifest["iou_threshold"] = 0.5;
  manifest["runs"] = nlohmann::ordered_json::array();
  for (const ModelRun& run : data.runs) {
    nlohmann::ordered_json entry;
    entry["name"] = run.name;
    entry["detections"] = run.name + ".csv";
    entry["val_scores"] = run.name + "_val.csv";
    {
      std::ofstream out = OpenOutput((root / (run.name + ".csv")).string());
      WriteDetectionsCsv(out, run.detections, h);
    }
    {
      std::ofstream out =
          OpenOutput((root / (run.name + "_val.csv")).string());
      out << "LabelName,AP\n";
      for (const auto& [c, s] : run.val_scores) {
        out << CsvEscape(h.Name(c)) << ',' << FormatDouble(s) << '\n';
      }
    }
    if (run.class_subset) {
      entry["class_subset"] = run.name + "_subset.csv";
      std::ofstream out =
          OpenOutput((root / (run.name + "_subset.csv")).string());
      out << "LabelName\n";
      for (ClassId c : *run.class_subset) out << CsvEscape(h.Name(c)) << '\n';
    }
    manifest["runs"].push_back(std::move(entry));
  }
  WriteText(root / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace sparsedet
