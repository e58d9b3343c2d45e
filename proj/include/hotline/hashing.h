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

#ifndef HOTLINE_HASHING_H_
#define HOTLINE_HASHING_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace hotline {

/// Lowercase hex SHA-256 of a byte string.
std::string Sha256Hex(std::string_view data);

/// Lowercase hex SHA-256 of a file's contents.
std::string Sha256File(const std::filesystem::path &path);

}  // namespace hotline

#endif  // HOTLINE_HASHING_H_
