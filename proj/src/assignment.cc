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
#include "sparsedet/assignment.h"

#include <algorithm>
#include <array>
#include <utility>

#include "json.hpp"
#include "sparsedet/errors.h"

namespace sparsedet {

namespace {

constexpr std::array<std::pair<SupervisionState, std::string_view>, 3>
    kStateNames = {{{SupervisionState::kPositive, "positive"},
                    {SupervisionState::kNegative, "negative"},
                    {SupervisionState::kIgnore, "ignore"}}};

constexpr std::array<std::pair<Provenance, std::string_view>, 6>
    kProvenanceNames = {{{Provenance::kMatched, "matched"},
                         {Provenance::kAncestorOfMatch, "ancestor_of_match"},
                         {Provenance::kDescendantSkip, "descendant_skip"},
                         {Provenance::kCooccurrenceIgnore,
                          "cooccurrence_ignore"},
                         {Provenance::kUnverifiedPolicy, "unverified_policy"},
                         {Provenance::kDefault, "default"}}};

// Part classes per subject class.
std::vector<std::vector<ClassId>> PartsBySubject(
    std::span<const CooccurrencePair> pairs, const ClassHierarchy& h) {
  std::vector<std::vector<ClassId>> parts(h.size());
  for (const auto& pair : pairs) {
    if (!h.Contains(pair.subject) || !h.Contains(pair.part)) {
      throw UnknownClassError("co-occurrence pair references unknown class");
    }
    if (pair.subject == pair.part) {
      throw SelfPairError("co-occurrence pair of '" + h.Name(pair.subject) +
                          "' with itself");
    }
    parts[Index(pair.subject)].push_back(pair.part);
  }
  return parts;
}

void CheckInputs(std::span<const BBox> proposals,
                 std::span<const GroundTruthBox> gts, const ClassHierarchy& h,
                 const AssignmentConfig& config) {
  config.Validate();
  if (proposals.empty()) throw EmptyProposalError("no proposals given");
  for (const BBox& p : proposals) CheckValid(p, "proposal");
  for (const auto& g : gts) {
    if (!h.Contains(g.class_id)) {
      throw UnknownClassError("ground truth references unknown class");
    }
    CheckValid(g.box, "ground truth box");
    if (g.image_id != gts.front().image_id) {
      throw MixedGroupError("ground truth boxes span several images");
    }
  }
}

void FillCooccurrence(const BBox& proposal, std::span<const GroundTruthBox> gts,
                      const std::vector<std::vector<ClassId>>& parts,
                      double threshold, std::span<std::uint8_t> row) {
  for (const auto& g : gts) {
    const auto& subject_parts = parts[Index(g.class_id)];
    if (subject_parts.empty()) continue;
    if (ContainmentFraction(proposal, g.box) < threshold) continue;
    for (ClassId part : subject_parts) row[Index(part)] = 1;
  }
}

}  // namespace

std::string_view StateName(SupervisionState s) {
  for (const auto& [state, name] : kStateNames) {
    if (state == s) return name;
  }
  return "?";
}

std::string_view ProvenanceName(Provenance p) {
  for (const auto& [prov, name] : kProvenanceNames) {
    if (prov == p) return name;
  }
  return "?";
}

SupervisionState ParseState(std::string_view name) {
  for (const auto& [state, n] : kStateNames) {
    if (n == name) return state;
  }
  throw DomainError("unknown supervision state '" + std::string(name) + "'");
}

Provenance ParseProvenance(std::string_view name) {
  for (const auto& [prov, n] : kProvenanceNames) {
    if (n == name) return prov;
  }
  throw DomainError("unknown provenance '" + std::string(name) + "'");
}

void AssignmentConfig::Validate() const {
  auto in_range = [](double v) { return v > 0.0 && v <= 1.0; };
  if (!in_range(pos_iou_threshold)) {
    throw DomainError("pos_iou_threshold must be in (0, 1]");
  }
  if (!in_range(containment_threshold)) {
    throw DomainError("containment_threshold must be in (0, 1]");
  }
}

SupervisionMatrix::SupervisionMatrix(std::vector<BBox> proposals,
                                     std::size_t num_classes)
    : proposals_(std::move(proposals)),
      states_(proposals_.size(), num_classes, SupervisionState::kNegative),
      provenance_(proposals_.size(), num_classes, Provenance::kDefault) {}

void SupervisionMatrix::Set(std::size_t p, ClassId c, SupervisionState s,
                            Provenance why) {
  states_(p, Index(c)) = s;
  provenance_(p, Index(c)) = why;
}

std::size_t SupervisionMatrix::Count(SupervisionState s) const {
  std::size_t n = 0;
  for (SupervisionState v : states_.data()) n += v == s ? 1 : 0;
  return n;
}

void SupervisionMatrix::Append(const SupervisionMatrix& other) {
  if (num_proposals() == 0) {
    *this = other;
    return;
  }
  if (other.num_classes() != num_classes()) {
    throw ShapeMismatchError("cannot append supervision with " +
                             std::to_string(other.num_classes()) +
                             " classes to one with " +
                             std::to_string(num_classes()));
  }
  proposals_.insert(proposals_.end(), other.proposals_.begin(),
                    other.proposals_.end());
  states_.AppendRows(other.states_);
  provenance_.AppendRows(other.provenance_);
}

SupervisionMatrix AssignTargets(std::span<const BBox> proposals,
                                std::span<const GroundTruthBox> gts,
                                const ImageVerification& verification,
                                const ClassHierarchy& hierarchy,
                                std::span<const CooccurrencePair> pairs,
                                const AssignmentConfig& config) {
  CheckInputs(proposals, gts, hierarchy, config);
  if (!gts.empty() && !verification.image_id.empty() &&
      gts.front().image_id != verification.image_id) {
    throw MixedGroupError("ground truth image '" + gts.front().image_id +
                          "' differs from verification image '" +
                          verification.image_id + "'");
  }
  for (ClassId c : verification.verified_positive) hierarchy.Name(c);
  for (ClassId c : verification.verified_negative) hierarchy.Name(c);

  const auto parts = PartsBySubject(pairs, hierarchy);
  const std::size_t num_classes = hierarchy.size();
  SupervisionMatrix sup(
      std::vector<BBox>(proposals.begin(), proposals.end()), num_classes);

  std::vector<bool> verified(num_classes, false);
  for (ClassId c : verification.verified_positive) verified[Index(c)] = true;
  for (ClassId c : verification.verified_negative) verified[Index(c)] = true;

  // Per-row flags, one per class.
  std::vector<std::uint8_t> exact(num_classes);
  std::vector<std::uint8_t> ancestor(num_classes);
  std::vector<std::uint8_t> descendant(num_classes);
  std::vector<std::uint8_t> cooccur(num_classes);

  for (std::size_t p = 0; p < proposals.size(); ++p) {
    std::fill(exact.begin(), exact.end(), 0);
    std::fill(ancestor.begin(), ancestor.end(), 0);
    std::fill(descendant.begin(), descendant.end(), 0);
    std::fill(cooccur.begin(), cooccur.end(), 0);

    for (const auto& g : gts) {
      if (IoU(proposals[p], g.box) < config.pos_iou_threshold) continue;
      exact[Index(g.class_id)] = 1;
      for (ClassId a : hierarchy.Ancestors(g.class_id)) ancestor[Index(a)] = 1;
      for (ClassId d : hierarchy.Descendants(g.class_id)) {
        descendant[Index(d)] = 1;
      }
    }
    FillCooccurrence(proposals[p], gts, parts, config.containment_threshold,
                     cooccur);

    for (std::size_t c = 0; c < num_classes; ++c) {
      const ClassId cls = MakeClassId(c);
      if (exact[c]) {
        sup.Set(p, cls, SupervisionState::kPositive, Provenance::kMatched);
      } else if (ancestor[c]) {
        sup.Set(p, cls, SupervisionState::kPositive,
                Provenance::kAncestorOfMatch);
      } else if (descendant[c]) {
        sup.Set(p, cls, SupervisionState::kIgnore, Provenance::kDescendantSkip);
      } else if (cooccur[c]) {
        sup.Set(p, cls, SupervisionState::kIgnore,
                Provenance::kCooccurrenceIgnore);
      } else if (!verified[c] &&
                 config.unverified_policy == UnverifiedPolicy::kIgnore) {
        sup.Set(p, cls, SupervisionState::kIgnore,
                Provenance::kUnverifiedPolicy);
      }
      // Otherwise the constructor's Negative/Default stands.
    }
  }
  return sup;
}

Matrix<std::uint8_t> CooccurrenceIgnoreMask(
    std::span<const BBox> proposals, std::span<const GroundTruthBox> gts,
    std::span<const CooccurrencePair> pairs, const ClassHierarchy& hierarchy,
    const AssignmentConfig& config) {
  CheckInputs(proposals, gts, hierarchy, config);
  const auto parts = PartsBySubject(pairs, hierarchy);
  Matrix<std::uint8_t> mask(proposals.size(), hierarchy.size(), 0);
  for (std::size_t p = 0; p < proposals.size(); ++p) {
    FillCooccurrence(proposals[p], gts, parts, config.containment_threshold,
                     mask.row(p));
  }
  return mask;
}

void WriteSupervisionJsonl(std::ostream& out, const std::string& image_id,
                           const SupervisionMatrix& sup) {
  for (std::size_t p = 0; p < sup.num_proposals(); ++p) {
    nlohmann::ordered_json rec;
    rec["ImageID"] = image_id;
    rec["Proposal"] = p;
    const BBox& b = sup.proposals()[p];
    rec["XMin"] = b.x_min;
    rec["XMax"] = b.x_max;
    rec["YMin"] = b.y_min;
    rec["YMax"] = b.y_max;
    nlohmann::json states = nlohmann::json::array();
    nlohmann::json provenance = nlohmann::json::array();
    for (std::size_t c = 0; c < sup.num_classes(); ++c) {
      states.push_back(StateName(sup.state(p, MakeClassId(c))));
      provenance.push_back(ProvenanceName(sup.provenance(p, MakeClassId(c))));
    }
    rec["States"] = std::move(states);
    rec["Provenance"] = std::move(provenance);
    out << rec.dump() << '\n';
  }
}

SupervisionMatrix ReadSupervisionJsonl(std::istream& in,
                                       const std::string& source) {
  std::vector<BBox> boxes;
  std::vector<std::vector<std::pair<SupervisionState, Provenance>>> rows;
  std::string text;
  std::size_t line = 0;
  std::size_t num_classes = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto rec = nlohmann::json::parse(text);
      const auto& states = rec.at("States");
      const auto& provenance = rec.at("Provenance");
      if (!states.is_array() || !provenance.is_array() ||
          states.size() != provenance.size()) {
        throw ParseError(source, line,
                         "States and Provenance must be equal-length arrays");
      }
      if (rows.empty()) {
        num_classes = states.size();
      } else if (states.size() != num_classes) {
        throw ParseError(source, line, "inconsistent class count");
      }
      BBox b{rec.at("XMin").get<double>(), rec.at("YMin").get<double>(),
             rec.at("XMax").get<double>(), rec.at("YMax").get<double>()};
      std::vector<std::pair<SupervisionState, Provenance>> row;
      for (std::size_t c = 0; c < states.size(); ++c) {
        row.emplace_back(ParseState(states[c].get<std::string>()),
                         ParseProvenance(provenance[c].get<std::string>()));
      }
      boxes.push_back(b);
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(source, line, e.what());
    } catch (const DomainError& e) {
      throw ParseError(source, line, e.what());
    }
  }
  SupervisionMatrix sup(std::move(boxes), num_classes);
  for (std::size_t p = 0; p < rows.size(); ++p) {
    for (std::size_t c = 0; c < num_classes; ++c) {
      sup.Set(p, MakeClassId(c), rows[p][c].first, rows[p][c].second);
    }
  }
  return sup;
}

}  // namespace sparsedet
