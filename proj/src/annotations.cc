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
#include "sparsedet/annotations.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "json.hpp"
#include "sparsedet/csv.h"
#include "sparsedet/errors.h"

namespace sparsedet {

namespace {

// Column positions resolved from a header row by name.
class Columns {
 public:
  Columns(const CsvRow& header, std::string source)
      : header_(header), source_(std::move(source)) {}

  std::size_t Require(const std::string& name) {
    const auto idx = Find(name);
    if (!idx) {
      throw ParseError(source_, header_.line, "missing column " + name);
    }
    return *idx;
  }

  std::optional<std::size_t> Find(const std::string& name) {
    const auto it =
        std::find(header_.fields.begin(), header_.fields.end(), name);
    if (it == header_.fields.end()) return std::nullopt;
    const auto idx = static_cast<std::size_t>(it - header_.fields.begin());
    width_ = std::max(width_, idx + 1);
    return idx;
  }

  // Rows must cover every resolved column.
  void CheckWidth(const CsvRow& row) const {
    if (row.fields.size() < width_) {
      throw ParseError(source_, row.line,
                       "expected at least " + std::to_string(width_) +
                           " fields, got " + std::to_string(row.fields.size()));
    }
  }

 private:
  CsvRow header_;
  std::string source_;
  std::size_t width_ = 0;
};

template <typename Container, typename Fn>
void ForEachRow(CsvReader& reader, const LoadOptions& options,
                Loaded<Container>& result, Fn&& fn) {
  CsvRow row;
  while (reader.Next(row)) {
    ++result.input_rows;
    try {
      fn(row);
      ++result.parsed_rows;
    } catch (const Error& e) {
      if (!options.lenient) throw;
      result.skipped.push_back({row.line, e.what()});
    }
  }
}

ClassId ResolveAt(const ClassHierarchy& h, const std::string& label,
                  const std::string& source, std::size_t line) {
  const auto c = h.Find(label);
  if (!c) {
    throw UnknownClassError(source + ":" + std::to_string(line) +
                            ": unknown class '" + label + "'");
  }
  return *c;
}

// OID order: XMin, XMax, YMin, YMax.
BBox MakeBox(double x_min, double x_max, double y_min, double y_max,
             const std::string& image_id, const LoadOptions& options,
             const std::string& source, std::size_t line) {
  if (x_min > x_max) {
    throw ParseError(source, line, "XMin > XMax");
  }
  if (y_min > y_max) {
    throw ParseError(source, line, "YMin > YMax");
  }
  BBox box{x_min, y_min, x_max, y_max};
  if (options.image_sizes != nullptr) {
    const auto it = options.image_sizes->find(image_id);
    if (it == options.image_sizes->end()) {
      throw ParseError(source, line, "no size for image '" + image_id + "'");
    }
    const auto [width, height] = it->second;
    box = BBox{x_min * width, y_min * height, x_max * width, y_max * height};
  }
  return box;
}

double CheckScore(double score, const std::string& source, std::size_t line) {
  if (score < 0.0 || score > 1.0) {
    throw ParseError(source, line, "Score outside [0,1]");
  }
  return score;
}

bool ReadHeader(CsvReader& reader, CsvRow& header) {
  return reader.Next(header);
}

bool EndsWith(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

bool Contains(const std::vector<ClassId>& sorted, ClassId c) {
  return std::binary_search(sorted.begin(), sorted.end(), c);
}

void InsertSorted(std::vector<ClassId>& sorted, ClassId c) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), c);
  if (it == sorted.end() || *it != c) sorted.insert(it, c);
}

}  // namespace

bool ImageVerification::IsPositive(ClassId c) const {
  return Contains(verified_positive, c);
}

bool ImageVerification::IsNegative(ClassId c) const {
  return Contains(verified_negative, c);
}

ImageVerification VerificationFor(const VerificationMap& verifications,
                                  const std::string& image_id) {
  const auto it = verifications.find(image_id);
  if (it != verifications.end()) return it->second;
  ImageVerification empty;
  empty.image_id = image_id;
  return empty;
}

Loaded<std::vector<GroundTruthBox>> LoadGroundTruth(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options, const std::string& source) {
  Loaded<std::vector<GroundTruthBox>> result;
  CsvReader reader(in, source);
  CsvRow header;
  if (!ReadHeader(reader, header)) return result;
  Columns cols(header, source);
  const std::size_t c_image = cols.Require("ImageID");
  const std::size_t c_label = cols.Require("LabelName");
  const std::size_t c_xmin = cols.Require("XMin");
  const std::size_t c_xmax = cols.Require("XMax");
  const std::size_t c_ymin = cols.Require("YMin");
  const std::size_t c_ymax = cols.Require("YMax");
  const auto c_group = cols.Find("IsGroupOf");

  ForEachRow(reader, options, result, [&](const CsvRow& row) {
    cols.CheckWidth(row);
    const auto& f = row.fields;
    GroundTruthBox gt;
    gt.image_id = f[c_image];
    if (gt.image_id.empty()) throw ParseError(source, row.line, "empty ImageID");
    gt.class_id = ResolveAt(hierarchy, f[c_label], source, row.line);
    gt.box = MakeBox(ParseDouble(f[c_xmin], source, row.line, "XMin"),
                     ParseDouble(f[c_xmax], source, row.line, "XMax"),
                     ParseDouble(f[c_ymin], source, row.line, "YMin"),
                     ParseDouble(f[c_ymax], source, row.line, "YMax"),
                     gt.image_id, options, source, row.line);
    if (c_group) {
      // OID uses -1 for "unknown"; treat it as not group-of.
      const long long g = ParseInt(f[*c_group], source, row.line, "IsGroupOf");
      if (g < -1 || g > 1) {
        throw ParseError(source, row.line, "IsGroupOf must be -1, 0 or 1");
      }
      gt.is_group_of = g == 1;
    }
    result.items.push_back(std::move(gt));
  });
  return result;
}

Loaded<std::vector<GroundTruthBox>> LoadGroundTruth(
    const std::string& path, const ClassHierarchy& hierarchy,
    const LoadOptions& options) {
  auto in = OpenInput(path);
  return LoadGroundTruth(in, hierarchy, options, path);
}

Loaded<VerificationMap> LoadVerifications(std::istream& in,
                                          const ClassHierarchy& hierarchy,
                                          const LoadOptions& options,
                                          const std::string& source) {
  Loaded<VerificationMap> result;
  CsvReader reader(in, source);
  CsvRow header;
  if (!ReadHeader(reader, header)) return result;
  Columns cols(header, source);
  const std::size_t c_image = cols.Require("ImageID");
  const std::size_t c_label = cols.Require("LabelName");
  const std::size_t c_conf = cols.Require("Confidence");

  ForEachRow(reader, options, result, [&](const CsvRow& row) {
    cols.CheckWidth(row);
    const auto& f = row.fields;
    const std::string& image_id = f[c_image];
    if (image_id.empty()) throw ParseError(source, row.line, "empty ImageID");
    const ClassId c = ResolveAt(hierarchy, f[c_label], source, row.line);
    const double conf = ParseDouble(f[c_conf], source, row.line, "Confidence");
    if (conf != 0.0 && conf != 1.0) {
      throw ParseError(source, row.line, "Confidence must be 0 or 1");
    }
    const bool positive = conf == 1.0;
    auto it = result.items.find(image_id);
    const bool conflict =
        it != result.items.end() &&
        (positive ? it->second.IsNegative(c) : it->second.IsPositive(c));
    if (conflict) {
      throw ConflictError(source + ":" + std::to_string(row.line) + ": '" +
                          f[c_label] + "' is both verified present and absent"
                          " in image '" + image_id + "'");
    }
    auto& v = result.items[image_id];
    v.image_id = image_id;
    InsertSorted(positive ? v.verified_positive : v.verified_negative, c);
  });
  return result;
}

Loaded<VerificationMap> LoadVerifications(const std::string& path,
                                          const ClassHierarchy& hierarchy,
                                          const LoadOptions& options) {
  auto in = OpenInput(path);
  return LoadVerifications(in, hierarchy, options, path);
}

Loaded<std::vector<Detection>> LoadDetectionsCsv(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options, const std::string& source) {
  Loaded<std::vector<Detection>> result;
  CsvReader reader(in, source);
  CsvRow header;
  if (!ReadHeader(reader, header)) return result;
  Columns cols(header, source);
  const std::size_t c_image = cols.Require("ImageID");
  const std::size_t c_label = cols.Require("LabelName");
  const std::size_t c_score = cols.Require("Score");
  const std::size_t c_xmin = cols.Require("XMin");
  const std::size_t c_xmax = cols.Require("XMax");
  const std::size_t c_ymin = cols.Require("YMin");
  const std::size_t c_ymax = cols.Require("YMax");

  ForEachRow(reader, options, result, [&](const CsvRow& row) {
    cols.CheckWidth(row);
    const auto& f = row.fields;
    Detection d;
    d.image_id = f[c_image];
    if (d.image_id.empty()) throw ParseError(source, row.line, "empty ImageID");
    d.class_id = ResolveAt(hierarchy, f[c_label], source, row.line);
    d.score =
        CheckScore(ParseDouble(f[c_score], source, row.line, "Score"), source,
                   row.line);
    d.box = MakeBox(ParseDouble(f[c_xmin], source, row.line, "XMin"),
                    ParseDouble(f[c_xmax], source, row.line, "XMax"),
                    ParseDouble(f[c_ymin], source, row.line, "YMin"),
                    ParseDouble(f[c_ymax], source, row.line, "YMax"),
                    d.image_id, options, source, row.line);
    result.items.push_back(std::move(d));
  });
  return result;
}

Loaded<std::vector<Detection>> LoadDetectionsJsonl(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options, const std::string& source) {
  Loaded<std::vector<Detection>> result;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++result.input_rows;
    try {
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(text);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError(source, line, e.what());
      }
      auto number = [&](const char* key) {
        if (!rec.is_object() || !rec.contains(key) || !rec[key].is_number()) {
          throw ParseError(source, line,
                           std::string("missing numeric field ") + key);
        }
        const double v = rec[key].get<double>();
        if (!std::isfinite(v)) {
          throw ParseError(source, line, std::string(key) + " is not finite");
        }
        return v;
      };
      auto text_field = [&](const char* key) {
        if (!rec.is_object() || !rec.contains(key) || !rec[key].is_string()) {
          throw ParseError(source, line,
                           std::string("missing string field ") + key);
        }
        return rec[key].get<std::string>();
      };
      Detection d;
      d.image_id = text_field("ImageID");
      if (d.image_id.empty()) throw ParseError(source, line, "empty ImageID");
      d.class_id = ResolveAt(hierarchy, text_field("LabelName"), source, line);
      d.score = CheckScore(number("Score"), source, line);
      d.box = MakeBox(number("XMin"), number("XMax"), number("YMin"),
                      number("YMax"), d.image_id, options, source, line);
      result.items.push_back(std::move(d));
      ++result.parsed_rows;
    } catch (const Error& e) {
      if (!options.lenient) throw;
      result.skipped.push_back({line, e.what()});
    }
  }
  return result;
}

Loaded<std::vector<Detection>> LoadDetections(const std::string& path,
                                              const ClassHierarchy& hierarchy,
                                              const LoadOptions& options) {
  auto in = OpenInput(path);
  if (EndsWith(path, ".jsonl") || EndsWith(path, ".ndjson")) {
    return LoadDetectionsJsonl(in, hierarchy, options, path);
  }
  return LoadDetectionsCsv(in, hierarchy, options, path);
}

Loaded<std::vector<Detection>> LoadDetectionsAuto(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options, const std::string& source) {
  in >> std::ws;
  if (in.peek() == '{') {
    return LoadDetectionsJsonl(in, hierarchy, options, source);
  }
  return LoadDetectionsCsv(in, hierarchy, options, source);
}

Loaded<std::vector<CooccurrencePair>> LoadCooccurrencePairs(
    std::istream& in, const ClassHierarchy& hierarchy,
    const LoadOptions& options, const std::string& source) {
  Loaded<std::vector<CooccurrencePair>> result;
  CsvReader reader(in, source);
  CsvRow header;
  if (!ReadHeader(reader, header)) return result;
  Columns cols(header, source);
  const std::size_t c_subject = cols.Require("SubjectLabelName");
  const std::size_t c_part = cols.Require("PartLabelName");
  std::set<CooccurrencePair> seen;

  ForEachRow(reader, options, result, [&](const CsvRow& row) {
    cols.CheckWidth(row);
    CooccurrencePair pair{
        ResolveAt(hierarchy, row.fields[c_subject], source, row.line),
        ResolveAt(hierarchy, row.fields[c_part], source, row.line)};
    if (pair.subject == pair.part) {
      throw SelfPairError(source + ":" + std::to_string(row.line) + ": '" +
                          row.fields[c_subject] + "' paired with itself");
    }
    if (seen.insert(pair).second) result.items.push_back(pair);
  });
  return result;
}

Loaded<std::vector<CooccurrencePair>> LoadCooccurrencePairs(
    const std::string& path, const ClassHierarchy& hierarchy,
    const LoadOptions& options) {
  auto in = OpenInput(path);
  return LoadCooccurrencePairs(in, hierarchy, options, path);
}

Loaded<std::vector<Proposal>> LoadProposals(std::istream& in,
                                            const LoadOptions& options,
                                            const std::string& source) {
  Loaded<std::vector<Proposal>> result;
  CsvReader reader(in, source);
  CsvRow header;
  if (!ReadHeader(reader, header)) return result;
  Columns cols(header, source);
  const std::size_t c_image = cols.Require("ImageID");
  const std::size_t c_xmin = cols.Require("XMin");
  const std::size_t c_xmax = cols.Require("XMax");
  const std::size_t c_ymin = cols.Require("YMin");
  const std::size_t c_ymax = cols.Require("YMax");
  ForEachRow(reader, options, result, [&](const CsvRow& row) {
    cols.CheckWidth(row);
    const auto& f = row.fields;
    Proposal p;
    p.image_id = f[c_image];
    if (p.image_id.empty()) throw ParseError(source, row.line, "empty ImageID");
    p.box = MakeBox(ParseDouble(f[c_xmin], source, row.line, "XMin"),
                    ParseDouble(f[c_xmax], source, row.line, "XMax"),
                    ParseDouble(f[c_ymin], source, row.line, "YMin"),
                    ParseDouble(f[c_ymax], source, row.line, "YMax"),
                    p.image_id, options, source, row.line);
    result.items.push_back(std::move(p));
  });
  return result;
}

ImageSizes LoadImageSizes(const std::string& path) {
  auto in = OpenInput(path);
  CsvReader reader(in, path);
  ImageSizes sizes;
  CsvRow row;
  if (!reader.Next(row)) return sizes;
  Columns cols(row, path);
  const std::size_t c_image = cols.Require("ImageID");
  const std::size_t c_width = cols.Require("Width");
  const std::size_t c_height = cols.Require("Height");
  while (reader.Next(row)) {
    cols.CheckWidth(row);
    const double w = ParseDouble(row.fields[c_width], path, row.line, "Width");
    const double h =
        ParseDouble(row.fields[c_height], path, row.line, "Height");
    if (w <= 0.0 || h <= 0.0) {
      throw ParseError(path, row.line, "image size must be positive");
    }
    sizes[row.fields[c_image]] = {w, h};
  }
  return sizes;
}

std::map<ClassId, double> LoadClassValues(std::istream& in,
                                          const ClassHierarchy& hierarchy,
                                          const std::string& value_column,
                                          const std::string& source) {
  CsvReader reader(in, source);
  std::map<ClassId, double> values;
  CsvRow row;
  if (!reader.Next(row)) return values;
  Columns cols(row, source);
  const std::size_t c_label = cols.Require("LabelName");
  const std::size_t c_value = cols.Require(value_column);
  while (reader.Next(row)) {
    cols.CheckWidth(row);
    const ClassId c = ResolveAt(hierarchy, row.fields[c_label], source,
                                row.line);
    const double v =
        ParseDouble(row.fields[c_value], source, row.line, value_column);
    if (!values.emplace(c, v).second) {
      throw ParseError(source, row.line,
                       "duplicate LabelName '" + row.fields[c_label] + "'");
    }
  }
  return values;
}

std::map<ClassId, double> LoadClassValues(const std::string& path,
                                          const ClassHierarchy& hierarchy,
                                          const std::string& value_column) {
  auto in = OpenInput(path);
  return LoadClassValues(in, hierarchy, value_column, path);
}

std::vector<ClassId> LoadClassList(const std::string& path,
                                   const ClassHierarchy& hierarchy) {
  auto in = OpenInput(path);
  CsvReader reader(in, path);
  std::vector<ClassId> classes;
  CsvRow row;
  if (!reader.Next(row)) return classes;
  Columns cols(row, path);
  const std::size_t c_label = cols.Require("LabelName");
  while (reader.Next(row)) {
    cols.CheckWidth(row);
    classes.push_back(ResolveAt(hierarchy, row.fields[c_label], path,
                                row.line));
  }
  std::sort(classes.begin(), classes.end());
  classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
  return classes;
}

void WriteDetectionsCsv(std::ostream& out, std::span<const Detection> dets,
                        const ClassHierarchy& hierarchy,
                        std::span<const std::string> sources) {
  if (!sources.empty() && sources.size() != dets.size()) {
    throw DomainError("source column does not align with detections");
  }
  out << "ImageID,LabelName,Score,XMin,XMax,YMin,YMax";
  if (!sources.empty()) out << ",Source";
  out << '\n';
  for (std::size_t i = 0; i < dets.size(); ++i) {
    const Detection& d = dets[i];
    out << CsvEscape(d.image_id) << ',' << CsvEscape(hierarchy.Name(d.class_id))
        << ',' << FormatDouble(d.score) << ',' << FormatDouble(d.box.x_min)
        << ',' << FormatDouble(d.box.x_max) << ','
        << FormatDouble(d.box.y_min) << ',' << FormatDouble(d.box.y_max);
    if (!sources.empty()) out << ',' << CsvEscape(sources[i]);
    out << '\n';
  }
}

void WriteDetectionsJsonl(std::ostream& out, std::span<const Detection> dets,
                          const ClassHierarchy& hierarchy) {
  for (const Detection& d : dets) {
    nlohmann::ordered_json rec;
    rec["ImageID"] = d.image_id;
    rec["LabelName"] = hierarchy.Name(d.class_id);
    rec["Score"] = d.score;
    rec["XMin"] = d.box.x_min;
    rec["XMax"] = d.box.x_max;
    rec["YMin"] = d.box.y_min;
    rec["YMax"] = d.box.y_max;
    out << rec.dump() << '\n';
  }
}

void WriteGroundTruthCsv(std::ostream& out,
                         std::span<const GroundTruthBox> gts,
                         const ClassHierarchy& hierarchy) {
  out << "ImageID,LabelName,XMin,XMax,YMin,YMax,IsGroupOf\n";
  for (const GroundTruthBox& g : gts) {
    out << CsvEscape(g.image_id) << ',' << CsvEscape(hierarchy.Name(g.class_id))
        << ',' << FormatDouble(g.box.x_min) << ','
        << FormatDouble(g.box.x_max) << ',' << FormatDouble(g.box.y_min)
        << ',' << FormatDouble(g.box.y_max) << ',' << (g.is_group_of ? 1 : 0)
        << '\n';
  }
}

void WriteVerificationsCsv(std::ostream& out,
                           const VerificationMap& verifications,
                           const ClassHierarchy& hierarchy) {
  out << "ImageID,LabelName,Confidence\n";
  for (const auto& [image_id, v] : verifications) {
    for (ClassId c : v.verified_positive) {
      out << CsvEscape(image_id) << ',' << CsvEscape(hierarchy.Name(c))
          << ",1\n";
    }
    for (ClassId c : v.verified_negative) {
      out << CsvEscape(image_id) << ',' << CsvEscape(hierarchy.Name(c))
          << ",0\n";
    }
  }
}

void WriteCooccurrencePairsCsv(std::ostream& out,
                               std::span<const CooccurrencePair> pairs,
                               const ClassHierarchy& hierarchy) {
  out << "SubjectLabelName,PartLabelName\n";
  for (const auto& p : pairs) {
    out << CsvEscape(hierarchy.Name(p.subject)) << ','
        << CsvEscape(hierarchy.Name(p.part)) << '\n';
  }
}

std::map<std::string, std::vector<Detection>> GroupByImage(
    std::span<const Detection> dets) {
  std::map<std::string, std::vector<Detection>> groups;
  for (const Detection& d : dets) groups[d.image_id].push_back(d);
  return groups;
}

}  // namespace sparsedet
