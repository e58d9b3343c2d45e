// Copyright (c) 2026, The hotline-ser Authors. All rights reserved.
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

#ifndef HOTLINE_ERROR_H_
#define HOTLINE_ERROR_H_

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace hotline {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed manifest or segmentation input. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, int line) : Error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

/// Raised when an encoder id has no registered adapter (e.g. a missing checkpoint plug-in).
class EncoderUnavailable : public Error {
 public:
  explicit EncoderUnavailable(const std::string &encoder_id)
      : Error("encoder '" + encoder_id + "' is not available: no adapter registered for this id"),
        encoder_id_(encoder_id) {}
  const std::string &encoder_id() const { return encoder_id_; }

 private:
  std::string encoder_id_;
};

template <typename... Args>
std::string MakeString(Args &&...args) {
  std::ostringstream ss;
  (ss << ... << std::forward<Args>(args));
  return ss.str();
}

}  // namespace hotline

#define HOTLINE_ENFORCE(cond, ...)                                   \
  do {                                                               \
    if (!(cond)) throw ::hotline::Error(::hotline::MakeString(__VA_ARGS__)); \
  } while (0)

#endif  // HOTLINE_ERROR_H_
