// Copyright 2026 The fairrank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRRANK_ERRORS_H_
#define FAIRRANK_ERRORS_H_

#include <stdexcept>
#include <string>

namespace fairrank {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

// Exposure targets of the merit-proportional program cannot be realized.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ZeroMeritError : public Error {
 public:
  using Error::Error;
};

// Every item has zero merit, so the NSW objective is empty.
class DegenerateMarketError : public Error {
 public:
  using Error::Error;
};

// Instance too large for exhaustive enumeration.
class SizeError : public Error {
 public:
  using Error::Error;
};

class NotDoublyStochasticError : public Error {
 public:
  using Error::Error;
};

// No perfect matching on the support above epsilon. Retrying with a smaller
// epsilon usually helps.
class MatchingFailureError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, int column, const std::string& message)
      : Error("line " + std::to_string(line) + ", column " +
              std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fairrank

#endif  // FAIRRANK_ERRORS_H_
