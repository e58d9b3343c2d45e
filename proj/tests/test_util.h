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


#ifndef HOTLINE_TESTS_TEST_UTIL_H_
#define HOTLINE_TESTS_TEST_UTIL_H_

#include <cstdio>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

#include "hotline/corpus.h"

namespace hotline::testing {

inline AnnotatorLabels Ann(const std::string &id, bool negative, std::initializer_list<LabelId> labels) {
  return {id, negative, MakeLabelSet(labels)};
}

inline Segment MakeSegment(const std::string &call_id, const std::string &segment_id, double start_s,
                           double end_s, std::vector<AnnotatorLabels> annotations) {
  Segment s;
  s.call_id = call_id;
  s.segment_id = segment_id;
  s.audio_path = call_id + ".wav";
  s.start_s = start_s;
  s.end_s = end_s;
  s.sample_rate = 16000;
  s.annotations = std::move(annotations);
  return s;
}

/// Consolidated segment with a single annotator.
inline Segment Labeled(const std::string &call_id, const std::string &segment_id, double start_s, bool negative,
                       std::initializer_list<LabelId> labels) {
  Segment s = MakeSegment(call_id, segment_id, start_s, start_s + 1.0, {Ann("A1", negative, labels)});
  s.consolidated = Consolidate(s.annotations);
  return s;
}

/// Call ids "K000".."K<n-1>" each holding `per_call` consolidated segments.
inline std::vector<Call> TinyCorpus(int n, int per_call = 2) {
  std::vector<Call> calls;
  for (int c = 0; c < n; ++c) {
    Call call;
    char id[16];
    std::snprintf(id, sizeof id, "K%03d", c);
    call.call_id = id;
    for (int s = 0; s < per_call; ++s)
      call.segments.push_back(Labeled(id, call.call_id + "-" + std::to_string(s), s * 2.0, s % 2 == 1,
                                      s % 2 == 1 ? std::initializer_list<LabelId>{1} : std::initializer_list<LabelId>{}));
    calls.push_back(std::move(call));
  }
  return calls;
}

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("hotline-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace hotline::testing

#endif  // HOTLINE_TESTS_TEST_UTIL_H_
