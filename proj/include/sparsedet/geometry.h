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
#ifndef SPARSEDET_GEOMETRY_H_
#define SPARSEDET_GEOMETRY_H_

namespace sparsedet {

// Axis-aligned box in continuous coordinates (no +1 pixel convention).
// Zero-area boxes are legal.
struct BBox {
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;

  bool operator==(const BBox&) const = default;
};

// True when all coordinates are finite and min <= max on both axes.
bool IsValid(const BBox& b);

// Throws DomainError naming `what` if `b` is not valid.
void CheckValid(const BBox& b, const char* what = "box");

double Area(const BBox& b);

// Area of the overlap of `a` and `b`; 0 when they are disjoint.
double IntersectionArea(const BBox& a, const BBox& b);

// Intersection over union. Returns 0 when the union has zero area.
double IoU(const BBox& a, const BBox& b);

// Fraction of `inner` covered by `outer`. A zero-area `inner` counts as
// covered (1) when it lies within `outer`, else 0.
double ContainmentFraction(const BBox& inner, const BBox& outer);

BBox Translated(const BBox& b, double dx, double dy);

}  // namespace sparsedet

#endif  // SPARSEDET_GEOMETRY_H_
