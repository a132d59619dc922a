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
#include "sparsedet/geometry.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsedet/errors.h"

namespace sparsedet {

namespace {

double Overlap1D(double a_min, double a_max, double b_min, double b_max) {
  return std::max(0.0, std::min(a_max, b_max) - std::max(a_min, b_min));
}

}  // namespace

bool IsValid(const BBox& b) {
  return std::isfinite(b.x_min) && std::isfinite(b.y_min) &&
         std::isfinite(b.x_max) && std::isfinite(b.y_max) &&
         b.x_min <= b.x_max && b.y_min <= b.y_max;
}

void CheckValid(const BBox& b, const char* what) {
  if (!IsValid(b)) {
    throw DomainError(std::string(what) +
                      " must have finite coordinates with min <= max");
  }
}

double Area(const BBox& b) { return (b.x_max - b.x_min) * (b.y_max - b.y_min); }

double IntersectionArea(const BBox& a, const BBox& b) {
  return Overlap1D(a.x_min, a.x_max, b.x_min, b.x_max) *
         Overlap1D(a.y_min, a.y_max, b.y_min, b.y_max);
}

double IoU(const BBox& a, const BBox& b) {
  const double inter = IntersectionArea(a, b);
  const double uni = Area(a) + Area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double ContainmentFraction(const BBox& inner, const BBox& outer) {
  const double inner_area = Area(inner);
  if (inner_area <= 0.0) {
    // Degenerate inner box: covered iff it lies entirely within outer.
    const bool inside = inner.x_min >= outer.x_min &&
                        inner.x_max <= outer.x_max &&
                        inner.y_min >= outer.y_min &&
                        inner.y_max <= outer.y_max;
    return inside ? 1.0 : 0.0;
  }
  return std::clamp(IntersectionArea(inner, outer) / inner_area, 0.0, 1.0);
}

BBox Translated(const BBox& b, double dx, double dy) {
  return BBox{b.x_min + dx, b.y_min + dy, b.x_max + dx, b.y_max + dy};
}

}  // namespace sparsedet
