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
#include "sparsedet/hierarchy.h"

#include <algorithm>
#include <cctype>
#include <deque>
#include <set>

#include "sparsedet/csv.h"
#include "sparsedet/errors.h"

namespace sparsedet {

namespace {

constexpr char kLabelKey[] = "LabelName";
constexpr char kChildrenKey[] = "Subcategory";
constexpr char kPartKey[] = "Part";

bool TestBit(const std::vector<std::uint64_t>& bits, std::size_t i) {
  return (bits[i / 64] >> (i % 64)) & 1u;
}

void SetBit(std::vector<std::uint64_t>& bits, std::size_t i) {
  bits[i / 64] |= std::uint64_t{1} << (i % 64);
}

std::string Lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

// Collects declared labels (pre-order, first occurrence wins) and edges.
void WalkJson(const nlohmann::json& node, const std::string* parent,
              std::vector<std::string>& classes, std::set<std::string>& seen,
              std::vector<LabelEdge>& edges) {
  if (!node.is_object() || !node.contains(kLabelKey) ||
      !node[kLabelKey].is_string()) {
    throw DomainError(std::string("hierarchy node without a string ") +
                      kLabelKey);
  }
  const std::string label = node[kLabelKey].get<std::string>();
  if (seen.insert(label).second) classes.push_back(label);
  if (parent != nullptr) edges.emplace_back(label, *parent);
  if (node.contains(kChildrenKey)) {
    if (!node[kChildrenKey].is_array()) {
      throw DomainError(std::string(kChildrenKey) + " must be an array");
    }
    for (const auto& child : node[kChildrenKey]) {
      WalkJson(child, &label, classes, seen, edges);
    }
  }
  if (node.contains(kPartKey) && node[kPartKey].is_array()) {
    for (const auto& part : node[kPartKey]) {
      WalkJson(part, nullptr, classes, seen, edges);
    }
  }
}

}  // namespace

ClassHierarchy ClassHierarchy::Build(std::vector<std::string> classes,
                                     const std::vector<LabelEdge>& edges) {
  ClassHierarchy h;
  h.names_ = std::move(classes);
  const std::size_t n = h.names_.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!h.index_.emplace(h.names_[i], MakeClassId(i)).second) {
      throw DomainError("class '" + h.names_[i] + "' declared twice");
    }
  }

  std::set<std::pair<ClassId, ClassId>> unique_edges;
  for (const auto& [child, parent] : edges) {
    const auto c = h.Find(child);
    const auto p = h.Find(parent);
    if (!c) throw UnknownClassError("edge references undeclared class '" +
                                    child + "'");
    if (!p) throw UnknownClassError("edge references undeclared class '" +
                                    parent + "'");
    if (*c == *p) throw CycleError("class '" + child + "' is its own parent");
    if (unique_edges.emplace(*c, *p).second) h.edges_.emplace_back(*c, *p);
  }

  h.parents_.assign(n, {});
  std::vector<std::vector<ClassId>> children(n);
  std::vector<std::size_t> pending(n, 0);
  for (const auto& [c, p] : h.edges_) {
    h.parents_[Index(c)].push_back(p);
    children[Index(p)].push_back(c);
    ++pending[Index(c)];
  }
  for (auto& ps : h.parents_) std::sort(ps.begin(), ps.end());

  // Kahn's algorithm: parents are finalized before their children.
  std::deque<std::size_t> ready;
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.push_back(i);
  }
  const std::size_t words = (n + 63) / 64;
  h.ancestor_bits_.assign(n, std::vector<std::uint64_t>(words, 0));
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t cur = ready.front();
    ready.pop_front();
    ++visited;
    for (ClassId child : children[cur]) {
      auto& bits = h.ancestor_bits_[Index(child)];
      const auto& from = h.ancestor_bits_[cur];
      for (std::size_t w = 0; w < words; ++w) bits[w] |= from[w];
      SetBit(bits, cur);
      if (--pending[Index(child)] == 0) ready.push_back(Index(child));
    }
  }
  if (visited != n) {
    for (std::size_t i = 0; i < n; ++i) {
      if (pending[i] != 0) {
        throw CycleError("class hierarchy contains a cycle through '" +
                         h.names_[i] + "'");
      }
    }
  }

  h.ancestors_.assign(n, {});
  h.descendants_.assign(n, {});
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t a = 0; a < n; ++a) {
      if (TestBit(h.ancestor_bits_[c], a)) {
        h.ancestors_[c].push_back(MakeClassId(a));
        h.descendants_[a].push_back(MakeClassId(c));
      }
    }
  }
  return h;
}

void ClassHierarchy::Check(ClassId c) const {
  if (!Contains(c)) {
    throw UnknownClassError("class index " + std::to_string(Index(c)) +
                            " is out of range");
  }
}

const std::string& ClassHierarchy::Name(ClassId c) const {
  Check(c);
  return names_[Index(c)];
}

std::optional<ClassId> ClassHierarchy::Find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

ClassId ClassHierarchy::Resolve(std::string_view name) const {
  const auto c = Find(name);
  if (!c) throw UnknownClassError("unknown class '" + std::string(name) + "'");
  return *c;
}

const std::vector<ClassId>& ClassHierarchy::Ancestors(ClassId c) const {
  Check(c);
  return ancestors_[Index(c)];
}

const std::vector<ClassId>& ClassHierarchy::Descendants(ClassId c) const {
  Check(c);
  return descendants_[Index(c)];
}

const std::vector<ClassId>& ClassHierarchy::Parents(ClassId c) const {
  Check(c);
  return parents_[Index(c)];
}

bool ClassHierarchy::IsAncestor(ClassId ancestor, ClassId c) const {
  Check(ancestor);
  Check(c);
  return TestBit(ancestor_bits_[Index(c)], Index(ancestor));
}

std::vector<ClassId> ClassHierarchy::Roots() const {
  std::vector<ClassId> roots;
  for (std::size_t i = 0; i < size(); ++i) {
    if (parents_[i].empty()) roots.push_back(MakeClassId(i));
  }
  return roots;
}

std::vector<ClassId> ClassHierarchy::ExpandLabels(
    std::span<const ClassId> labels) const {
  std::vector<ClassId> out;
  for (ClassId c : labels) {
    Check(c);
    out.push_back(c);
    const auto& anc = ancestors_[Index(c)];
    out.insert(out.end(), anc.begin(), anc.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ClassHierarchy ParseHierarchyJson(const nlohmann::json& root) {
  std::vector<std::string> classes;
  std::set<std::string> seen;
  std::vector<LabelEdge> edges;
  if (root.is_array()) {
    for (const auto& node : root) WalkJson(node, nullptr, classes, seen, edges);
  } else {
    WalkJson(root, nullptr, classes, seen, edges);
  }
  return ClassHierarchy::Build(std::move(classes), edges);
}

ClassHierarchy ParseHierarchyCsv(std::istream& in, const std::string& source) {
  CsvReader reader(in, source);
  std::vector<std::string> classes;
  std::set<std::string> seen;
  std::vector<LabelEdge> edges;
  auto declare = [&](const std::string& label) {
    if (seen.insert(label).second) classes.push_back(label);
  };
  CsvRow row;
  bool first = true;
  while (reader.Next(row)) {
    if (first) {
      first = false;
      if (row.fields.size() == 2) {
        const std::string a = Lower(row.fields[0]);
        const std::string b = Lower(row.fields[1]);
        if ((a == "child" && b == "parent") ||
            (a == "childlabelname" && b == "parentlabelname")) {
          continue;
        }
      }
    }
    if (row.fields.size() == 1) {
      if (row.fields[0].empty()) {
        throw ParseError(source, row.line, "empty class name");
      }
      declare(row.fields[0]);
    } else if (row.fields.size() == 2) {
      if (row.fields[0].empty() || row.fields[1].empty()) {
        throw ParseError(source, row.line, "empty class name");
      }
      // Parents are declared before children so roots come first.
      declare(row.fields[1]);
      declare(row.fields[0]);
      edges.emplace_back(row.fields[0], row.fields[1]);
    } else {
      throw ParseError(source, row.line, "expected 'child,parent'");
    }
  }
  return ClassHierarchy::Build(std::move(classes), edges);
}

ClassHierarchy LoadHierarchy(const std::string& path) {
  auto in = OpenInput(path);
  const bool is_json =
      path.size() >= 5 && Lower(path.substr(path.size() - 5)) == ".json";
  if (is_json) {
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path, 0, e.what());
    }
    return ParseHierarchyJson(doc);
  }
  return ParseHierarchyCsv(in, path);
}

namespace {

nlohmann::json NodeToJson(const ClassHierarchy& h,
                          const std::vector<std::vector<ClassId>>& children,
                          ClassId c) {
  nlohmann::json node;
  node[kLabelKey] = h.Name(c);
  if (!children[Index(c)].empty()) {
    nlohmann::json kids = nlohmann::json::array();
    for (ClassId k : children[Index(c)]) {
      kids.push_back(NodeToJson(h, children, k));
    }
    node[kChildrenKey] = std::move(kids);
  }
  return node;
}

}  // namespace

nlohmann::json HierarchyToJson(const ClassHierarchy& h) {
  std::vector<std::vector<ClassId>> children(h.size());
  for (const auto& [c, p] : h.edges()) children[Index(p)].push_back(c);
  for (auto& kids : children) std::sort(kids.begin(), kids.end());
  const auto roots = h.Roots();
  if (roots.size() == 1) return NodeToJson(h, children, roots.front());
  nlohmann::json out = nlohmann::json::array();
  for (ClassId r : roots) out.push_back(NodeToJson(h, children, r));
  return out;
}

}  // namespace sparsedet
