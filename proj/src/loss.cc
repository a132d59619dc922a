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
#include "sparsedet/loss.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "sparsedet/csv.h"
#include "sparsedet/errors.h"

namespace sparsedet {

namespace {

void CheckShapes(const LogitMatrix& logits, const SupervisionMatrix& sup) {
  if (!logits.SameShape(sup.num_proposals(), sup.num_classes())) {
    throw ShapeMismatchError(
        "logits are " + std::to_string(logits.rows()) + "x" +
        std::to_string(logits.cols()) + " but supervision is " +
        std::to_string(sup.num_proposals()) + "x" +
        std::to_string(sup.num_classes()));
  }
  for (double z : logits.data()) {
    if (!std::isfinite(z)) throw NonFiniteLogitError("non-finite logit");
  }
}

std::size_t CountSupervised(const SupervisionMatrix& sup) {
  return sup.num_proposals() * sup.num_classes() -
         sup.Count(SupervisionState::kIgnore);
}

}  // namespace

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

LossResult SigmoidCrossEntropy(const LogitMatrix& logits,
                               const SupervisionMatrix& sup,
                               const LossOptions& options) {
  CheckShapes(logits, sup);
  LossResult result;
  result.per_entry = Matrix<double>(logits.rows(), logits.cols(), 0.0);
  for (std::size_t p = 0; p < logits.rows(); ++p) {
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      const SupervisionState s = sup.state(p, MakeClassId(c));
      if (s == SupervisionState::kIgnore) continue;
      const double z = logits(p, c);
      const double y = s == SupervisionState::kPositive ? 1.0 : 0.0;
      const double loss =
          std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
      result.per_entry(p, c) = loss;
      result.total += loss;
      ++result.supervised_entries;
    }
  }
  if (options.normalize && result.supervised_entries > 0) {
    result.total /= static_cast<double>(result.supervised_entries);
  }
  return result;
}

Matrix<double> SigmoidCrossEntropyGrad(const LogitMatrix& logits,
                                       const SupervisionMatrix& sup,
                                       const LossOptions& options) {
  CheckShapes(logits, sup);
  const std::size_t supervised = CountSupervised(sup);
  const double scale = options.normalize && supervised > 0
                           ? 1.0 / static_cast<double>(supervised)
                           : 1.0;
  Matrix<double> grad(logits.rows(), logits.cols(), 0.0);
  for (std::size_t p = 0; p < logits.rows(); ++p) {
    for (std::size_t c = 0; c < logits.cols(); ++c) {
      const SupervisionState s = sup.state(p, MakeClassId(c));
      if (s == SupervisionState::kIgnore) continue;
      const double y = s == SupervisionState::kPositive ? 1.0 : 0.0;
      grad(p, c) = (Sigmoid(logits(p, c)) - y) * scale;
    }
  }
  return grad;
}

LogitMatrix ReadLogitsCsv(std::istream& in, const std::string& source) {
  CsvReader reader(in, source);
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  CsvRow row;
  bool first = true;
  while (reader.Next(row)) {
    std::vector<double> parsed;
    try {
      for (std::size_t c = 0; c < row.fields.size(); ++c) {
        parsed.push_back(ParseDouble(row.fields[c], source, row.line,
                                     std::to_string(c + 1)));
      }
    } catch (const ParseError&) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw;
    }
    first = false;
    if (rows == 0) {
      cols = parsed.size();
    } else if (parsed.size() != cols) {
      throw ParseError(source, row.line,
                       "expected " + std::to_string(cols) + " values");
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  LogitMatrix m(rows, cols);
  m.data() = std::move(values);
  return m;
}

void WriteMatrixCsv(std::ostream& out, const Matrix<double>& m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << FormatDouble(m(r, c));
    }
    out << '\n';
  }
}

}  // namespace sparsedet
