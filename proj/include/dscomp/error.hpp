// Copyright (c) 2026, The dscomp Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace dscomp {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad sizes, mismatched labels, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Malformed DCT1 container, scores file, subset file or run config.
class FormatError : public Error {
 public:
  FormatError(std::string field, const std::string& what)
      : Error("format error in '" + field + "': " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Unknown sample id in a log or table.
class LookupError : public Error {
 public:
  using Error::Error;
};

/// A class cannot supply the requested number of samples.
class InsufficientPopulation : public Error {
 public:
  InsufficientPopulation(int label, const std::string& what)
      : Error(what), label_(label) {}

  int label() const noexcept { return label_; }

 private:
  int label_;
};

/// Non-finite loss during training.
class TrainingDivergence : public Error {
 public:
  explicit TrainingDivergence(int epoch)
      : Error("training diverged (non-finite loss) in epoch " + std::to_string(epoch)),
        epoch_(epoch) {}

  int epoch() const noexcept { return epoch_; }

 private:
  int epoch_;
};

}  // namespace dscomp
