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
#ifndef SPARSEDET_ASSIGNMENT_H_
#define SPARSEDET_ASSIGNMENT_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sparsedet/annotations.h"
#include "sparsedet/geometry.h"
#include "sparsedet/hierarchy.h"
#include "sparsedet/matrix.h"

namespace sparsedet {

enum class SupervisionState : std::uint8_t { kPositive, kNegative, kIgnore };

// Why an entry ended up in its state.
enum class Provenance : std::uint8_t {
  kMatched,             // positive: proposal matches a gt of exactly this class
  kAncestorOfMatch,     // positive: class is an ancestor of a matched gt class
  kDescendantSkip,      // ignore: class is a descendant of a matched gt class
  kCooccurrenceIgnore,  // ignore: proposal lies inside a subject-class gt
  kUnverifiedPolicy,    // ignore: class unverified and policy says ignore
  kDefault,             // negative
};

enum class UnverifiedPolicy : std::uint8_t { kNegative, kIgnore };

std::string_view StateName(SupervisionState s);
std::string_view ProvenanceName(Provenance p);
// Inverse of the above; throw DomainError on unknown names.
SupervisionState ParseState(std::string_view name);
Provenance ParseProvenance(std::string_view name);

struct AssignmentConfig {
  double pos_iou_threshold = 0.5;
  // A proposal is "inside" a gt when ContainmentFraction >= this.
  double containment_threshold = 0.9;
  UnverifiedPolicy unverified_policy = UnverifiedPolicy::kNegative;

  // Throws DomainError unless both thresholds are in (0, 1].
  void Validate() const;
};

// Per-(proposal, class) training target with its provenance.
class SupervisionMatrix {
 public:
  SupervisionMatrix() = default;
  SupervisionMatrix(std::vector<BBox> proposals, std::size_t num_classes);

  std::size_t num_proposals() const { return proposals_.size(); }
  std::size_t num_classes() const { return states_.cols(); }
  const std::vector<BBox>& proposals() const { return proposals_; }

  SupervisionState state(std::size_t p, ClassId c) const {
    return states_(p, Index(c));
  }
  Provenance provenance(std::size_t p, ClassId c) const {
    return provenance_(p, Index(c));
  }
  void Set(std::size_t p, ClassId c, SupervisionState s, Provenance why);

  std::size_t Count(SupervisionState s) const;

  // Appends the rows of `other`; class counts must agree.
  void Append(const SupervisionMatrix& other);

  bool operator==(const SupervisionMatrix&) const = default;

 private:
  std::vector<BBox> proposals_;
  Matrix<SupervisionState> states_;
  Matrix<Provenance> provenance_;
};

// Decides every entry by this precedence, highest first:
//   1. Positive if the proposal has IoU >= pos_iou_threshold with a gt whose
//      hierarchy-expanded label set contains the class.
//   2. Ignore if the class is a descendant of a matched gt's class.
//   3. Ignore if the proposal lies inside (containment >= threshold) a gt of
//      class X and (X, class) is a co-occurrence pair.
//   4. Unverified classes follow config.unverified_policy.
//   5. Negative.
// `gts` must all belong to the image described by `verification`. Matching
// is many-to-one: any number of proposals may match one gt.
SupervisionMatrix AssignTargets(std::span<const BBox> proposals,
                                std::span<const GroundTruthBox> gts,
                                const ImageVerification& verification,
                                const ClassHierarchy& hierarchy,
                                std::span<const CooccurrencePair> pairs,
                                const AssignmentConfig& config);

// Entry (p, c) is 1 iff rule 3 fires for it, regardless of rules 1-2.
Matrix<std::uint8_t> CooccurrenceIgnoreMask(
    std::span<const BBox> proposals, std::span<const GroundTruthBox> gts,
    std::span<const CooccurrencePair> pairs, const ClassHierarchy& hierarchy,
    const AssignmentConfig& config);

// JSON-lines, one record per proposal:
//   {"ImageID":..,"Proposal":i,"XMin":..,"XMax":..,"YMin":..,"YMax":..,
//    "States":[..],"Provenance":[..]}
// with arrays in hierarchy class order.
void WriteSupervisionJsonl(std::ostream& out, const std::string& image_id,
                           const SupervisionMatrix& sup);
// Reads all records into one matrix (rows in file order).
SupervisionMatrix ReadSupervisionJsonl(std::istream& in,
                                       const std::string& source);

}  // namespace sparsedet

#endif  // SPARSEDET_ASSIGNMENT_H_
