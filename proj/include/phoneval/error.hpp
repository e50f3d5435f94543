// include/phoneval/error.hpp

// Copyright 2026  PhonEval Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef PHONEVAL_ERROR_HPP_
#define PHONEVAL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace phoneval {

// Base class for problems the user can fix: malformed input files, bad
// configuration, impossible requests. The command-line driver maps these to
// exit code 2; anything else escaping to main() is an internal failure and
// maps to exit code 1.
class UserError : public std::runtime_error {
 public:
  explicit UserError(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed line in an input file. Carries file and 1-based line number when
// known so the message points at the offending line.
class FormatError : public UserError {
 public:
  explicit FormatError(const std::string &msg) : UserError(msg) {}
  FormatError(const std::string &msg, const std::string &file, int line)
      : UserError(file + ":" + std::to_string(line) + ": " + msg),
        file_(file),
        line_(line) {}

  const std::string &file() const { return file_; }
  int line() const { return line_; }

 private:
  std::string file_;
  int line_ = 0;
};

// A symbol was defined twice in an inventory, or clashes with a reserved one.
class DuplicateSymbolError : public FormatError {
 public:
  using FormatError::FormatError;
};

// A phone token that is not in the inventory appeared in a sequence.
class UnknownPhoneError : public FormatError {
 public:
  using FormatError::FormatError;
};

// Invalid configuration value or combination (unknown key, order out of
// range, empty model, missing required path).
class ConfigError : public UserError {
 public:
  using UserError::UserError;
};

// A metric was requested whose denominator is empty, e.g. the error rate of
// an empty reference.
class UndefinedMetricError : public UserError {
 public:
  using UserError::UserError;
};

// Caller broke an API precondition. Deliberately not a UserError: this is a
// bug in the calling code, not in the user's data.
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string &msg) : std::logic_error(msg) {}
};

}  // namespace phoneval

#endif  // PHONEVAL_ERROR_HPP_
