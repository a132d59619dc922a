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
#ifndef SPARSEDET_ANNOTATIONS_H_
#define SPARSEDET_ANNOTATIONS_H_

#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sparsedet/geometry.h"
#include "sparsedet/hierarchy.h"

namespace sparsedet {

struct GroundTruthBox {
  std::string image_id;
  ClassId class_id{};
  BBox box;
  bool is_group_of = false;

  bool operator==(const GroundTruthBox&) const = default;
};

struct Detection {
  std::string image_id;
  ClassId class_id{};
  double score = 0.0;
  BBox box;

  bool operator==(const Detection&) const = default;
};

// Image-level labels under sparse annotation. Classes in neither set are
// unverified and carry no information. Both vectors are sorted and disjoint.
struct ImageVerification {
  std::string image_id;
  std::vector<ClassId> verified_positive;
  std::vector<ClassId> verified_negative;

  bool IsPositive(ClassId c) const;
  bool IsNegative(ClassId c) const;
  bool IsVerified(ClassId c) const { return IsPositive(c) || IsNegative(c); }
};

// Ordered by image id so iteration is deterministic.
using VerificationMap = std::map<std::string, ImageVerification>;

// Verification for `image_id`; empty sets when the image has no rows.
ImageVerification VerificationFor(const VerificationMap& verifications,
                                  const std::string& image_id);

// "If a box of `subject` contains a proposal, do not treat the proposal as a
// negative of `part`."
struct CooccurrencePair {
  ClassId subject{};
  ClassId part{};

  auto operator<=>(const CooccurrencePair&) const = default;
};

struct Proposal {
  std::string image_id;
  BBox box;
};

// Width and height per image, used to turn normalized coordinates into
// pixels.
using ImageSizes = std::unordered_map<std::string, std::pair<double, double>>;

struct LoadOptions {
  // Skip bad rows (recorded in Loaded::skipped) instead of throwing.
  bool lenient = false;
  // When set, normalized coordinates are scaled to pixels.
  const ImageSizes* image_sizes = nullptr;
};

struct RowIssue {
  std::size_t line = 0;
  std::string message;
};

// Result of a loader. Every data row is either parsed or skipped, so
// parsed_rows + skipped.size() == input_rows.
template <typename Container>
struct Loaded {
  Container items;
  std::vector<RowIssue> skipped;
  std::size_t input_rows = 0;
  std::size_t parsed_rows = 0;
};

// Ground truth CSV. Columns are located by header name; required:
// ImageID,LabelName,XMin,XMax,YMin,YMax. IsGroupOf is optional (default 0).
Loaded<std::vector<GroundTruthBox>> LoadGroundTruth(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {}, const std::string& source = "<gt>");
Loaded<std::vector<GroundTruthBox>> LoadGroundTruth(
    const std::string& path, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {});

// Verification CSV: ImageID,LabelName,Confidence with Confidence in {0,1}.
// Throws ConflictError when a class is listed both ways for one image.
Loaded<VerificationMap> LoadVerifications(std::istream& in,
                                          const ClassHierarchy& hierarchy,
                                          const LoadOptions& options = {},
                                          const std::string& source = "<v>");
Loaded<VerificationMap> LoadVerifications(const std::string& path,
                                          const ClassHierarchy& hierarchy,
                                          const LoadOptions& options = {});

// Detection CSV (ImageID,LabelName,Score,XMin,XMax,YMin,YMax) or JSON-lines
// with the same keys. Scores outside [0,1] are rejected, never clamped.
Loaded<std::vector<Detection>> LoadDetectionsCsv(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {}, const std::string& source = "<dets>");
Loaded<std::vector<Detection>> LoadDetectionsJsonl(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {}, const std::string& source = "<dets>");
// Picks JSON-lines for .jsonl/.ndjson paths, CSV otherwise.
Loaded<std::vector<Detection>> LoadDetections(const std::string& path,
                                              const ClassHierarchy& hierarchy,
                                              const LoadOptions& options = {});
// Sniffs the stream: JSON-lines if the first non-blank char is '{'.
Loaded<std::vector<Detection>> LoadDetectionsAuto(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {}, const std::string& source = "<dets>");

// SubjectLabelName,PartLabelName. Duplicate rows collapse to one pair.
Loaded<std::vector<CooccurrencePair>> LoadCooccurrencePairs(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {}, const std::string& source = "<pairs>");
Loaded<std::vector<CooccurrencePair>> LoadCooccurrencePairs(
    const std::string& path, const ClassHierarchy& hierarchy,
    const LoadOptions& options = {});

// ImageID,XMin,XMax,YMin,YMax.
Loaded<std::vector<Proposal>> LoadProposals(std::istream& in,
                                            const LoadOptions& options = {},
                                            const std::string& source = "<p>");

// ImageID,Width,Height.
ImageSizes LoadImageSizes(const std::string& path);

// LabelName,<value> two-column tables (validation AP, occurrence counts).
std::map<ClassId, double> LoadClassValues(std::istream& in,
                                          const ClassHierarchy& hierarchy,
                                          const std::string& value_column,
                                          const std::string& source);
std::map<ClassId, double> LoadClassValues(const std::string& path,
                                          const ClassHierarchy& hierarchy,
                                          const std::string& value_column);

// Single-column LabelName table.
std::vector<ClassId> LoadClassList(const std::string& path,
                                   const ClassHierarchy& hierarchy);

// Writers emit the same column order the loaders read. Doubles use the
// shortest round-trip representation, so write+load is lossless. When
// `sources` is non-empty it must align with `dets` and adds a trailing
// Source column.
void WriteDetectionsCsv(std::ostream& out, std::span<const Detection> dets,
                        const ClassHierarchy& hierarchy,
                        std::span<const std::string> sources = {});
void WriteDetectionsJsonl(std::ostream& out, std::span<const Detection> dets,
                          const ClassHierarchy& hierarchy);
void WriteGroundTruthCsv(std::ostream& out,
                         std::span<const GroundTruthBox> gts,
                         const ClassHierarchy& hierarchy);
void WriteVerificationsCsv(std::ostream& out,
                           const VerificationMap& verifications,
                           const ClassHierarchy& hierarchy);
void WriteCooccurrencePairsCsv(std::ostream& out,
                               std::span<const CooccurrencePair> pairs,
                               const ClassHierarchy& hierarchy);

// Groups detections by image id, preserving input order within each group.
std::map<std::string, std::vector<Detection>> GroupByImage(
    std::span<const Detection> dets);

}  // namespace sparsedet

#endif  // SPARSEDET_ANNOTATIONS_H_
