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
#ifndef SPARSEDET_ERRORS_H_
#define SPARSEDET_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sparsedet {

// Base of every error raised on bad input data. The CLI maps these to exit
// code 2; anything else escaping a subcommand is a bug.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SPARSEDET_DEFINE_ERROR(Name)     \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

SPARSEDET_DEFINE_ERROR(CycleError);
SPARSEDET_DEFINE_ERROR(UnknownClassError);
SPARSEDET_DEFINE_ERROR(ConflictError);
SPARSEDET_DEFINE_ERROR(SelfPairError);
SPARSEDET_DEFINE_ERROR(EmptyProposalError);
SPARSEDET_DEFINE_ERROR(ShapeMismatchError);
SPARSEDET_DEFINE_ERROR(NonFiniteLogitError);
SPARSEDET_DEFINE_ERROR(MixedGroupError);
SPARSEDET_DEFINE_ERROR(DomainError);
SPARSEDET_DEFINE_ERROR(MissingScoreError);
SPARSEDET_DEFINE_ERROR(MissingWeightError);
SPARSEDET_DEFINE_ERROR(SubsetViolationError);
SPARSEDET_DEFINE_ERROR(IoError);

#undef SPARSEDET_DEFINE_ERROR

// Malformed input row. `line` is 1-based and counts the header line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message)
      : Error(source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace sparsedet

#endif  // SPARSEDET_ERRORS_H_
