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
#ifndef SPARSEDET_HIERARCHY_H_
#define SPARSEDET_HIERARCHY_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"

namespace sparsedet {

// Dense index of a class within one ClassHierarchy.
enum class ClassId : std::int32_t {};

constexpr std::size_t Index(ClassId c) { return static_cast<std::size_t>(c); }
constexpr ClassId MakeClassId(std::size_t i) {
  return static_cast<ClassId>(static_cast<std::int32_t>(i));
}

// (child, parent) label pair.
using LabelEdge = std::pair<std::string, std::string>;

// Semantic class hierarchy as a rooted DAG. Immutable after Build(); the
// transitive closure is precomputed so every query is a lookup.
class ClassHierarchy {
 public:
  ClassHierarchy() = default;

  // Classes keep their declaration order as dense indices. Duplicate edges
  // are collapsed. Throws CycleError, UnknownClassError, or DomainError for
  // a class declared twice.
  static ClassHierarchy Build(std::vector<std::string> classes,
                              const std::vector<LabelEdge>& edges);

  std::size_t size() const { return names_.size(); }
  const std::string& Name(ClassId c) const;
  const std::vector<std::string>& names() const { return names_; }

  std::optional<ClassId> Find(std::string_view name) const;
  // Like Find() but throws UnknownClassError.
  ClassId Resolve(std::string_view name) const;
  bool Contains(ClassId c) const { return Index(c) < names_.size(); }

  // Proper ancestors / descendants, sorted by class index.
  const std::vector<ClassId>& Ancestors(ClassId c) const;
  const std::vector<ClassId>& Descendants(ClassId c) const;
  const std::vector<ClassId>& Parents(ClassId c) const;

  // True iff `ancestor` is a proper ancestor of `c`.
  bool IsAncestor(ClassId ancestor, ClassId c) const;
  bool IsLeaf(ClassId c) const { return Descendants(c).empty(); }
  std::vector<ClassId> Roots() const;

  // labels plus all their ancestors, sorted and deduplicated.
  std::vector<ClassId> ExpandLabels(std::span<const ClassId> labels) const;

  // (child, parent) edges in index form, deduplicated.
  const std::vector<std::pair<ClassId, ClassId>>& edges() const {
    return edges_;
  }

 private:
  void Check(ClassId c) const;

  std::vector<std::string> names_;
  std::unordered_map<std::string, ClassId> index_;
  std::vector<std::pair<ClassId, ClassId>> edges_;
  std::vector<std::vector<ClassId>> parents_;
  std::vector<std::vector<ClassId>> ancestors_;
  std::vector<std::vector<ClassId>> descendants_;
  // Row c has bit a set iff a is a proper ancestor of c.
  std::vector<std::vector<std::uint64_t>> ancestor_bits_;
};

// OID challenge hierarchy JSON: {"LabelName": ..., "Subcategory": [...]}
// nested to any depth. Labels listed under "Part" are declared as classes
// but contribute no edges.
ClassHierarchy ParseHierarchyJson(const nlohmann::json& root);

// Flat edge list, one `child,parent` row per line. A single-field row
// declares a class without edges. An optional header row is skipped.
ClassHierarchy ParseHierarchyCsv(std::istream& in,
                                 const std::string& source = "<csv>");

// Dispatches on extension: .json is parsed as JSON, anything else as CSV.
ClassHierarchy LoadHierarchy(const std::string& path);

// Serializes to the JSON shape accepted by ParseHierarchyJson. Classes with
// several parents are repeated under each parent.
nlohmann::json HierarchyToJson(const ClassHierarchy& h);

}  // namespace sparsedet

#endif  // SPARSEDET_HIERARCHY_H_
