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
#ifndef SPARSEDET_LOSS_H_
#define SPARSEDET_LOSS_H_

#include <cstddef>
#include <istream>

#include "sparsedet/assignment.h"
#include "sparsedet/matrix.h"

namespace sparsedet {

// Pre-sigmoid class scores, one row per proposal.
using LogitMatrix = Matrix<double>;

struct LossOptions {
  // Divide the total (and the gradient) by the number of supervised entries.
  bool normalize = false;
};

struct LossResult {
  double total = 0.0;
  // Unnormalized per-entry loss; exactly 0 on Ignore entries.
  Matrix<double> per_entry;
  std::size_t supervised_entries = 0;
};

double Sigmoid(double z);

// Multi-label sigmoid cross-entropy, one independent binary problem per
// class. Positive entries use target 1, Negative 0, Ignore contribute
// nothing. Uses max(z,0) - z*y + log(1 + exp(-|z|)) so any finite logit is
// safe. Throws ShapeMismatchError or NonFiniteLogitError.
LossResult SigmoidCrossEntropy(const LogitMatrix& logits,
                               const SupervisionMatrix& sup,
                               const LossOptions& options = {});

// d(total)/d(logit): sigmoid(z) - y on supervised entries, 0 on Ignore.
Matrix<double> SigmoidCrossEntropyGrad(const LogitMatrix& logits,
                                       const SupervisionMatrix& sup,
                                       const LossOptions& options = {});

// Numeric CSV, one row per proposal. A first row that does not parse as
// numbers is treated as a header.
LogitMatrix ReadLogitsCsv(std::istream& in, const std::string& source);
void WriteMatrixCsv(std::ostream& out, const Matrix<double>& m);

}  // namespace sparsedet

#endif  // SPARSEDET_LOSS_H_
