// Copyright 2026 The CAE Authors
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

// Minimal `key = value` configuration format shared by schema and experiment
// files. `#` starts a comment, blank lines are ignored, and a line of the form
// `[name]` opens a new section.

#ifndef CAE_KEY_VALUE_H_
#define CAE_KEY_VALUE_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace cae {

struct KeyValueSection {
  std::string name;  // empty for entries before the first header
  int line = 0;
  std::map<std::string, std::string> entries;

  // Accessors return InvalidArgument naming the key and section on a missing
  // or malformed entry.
  absl::StatusOr<std::string> GetString(const std::string& key) const;
  absl::StatusOr<int64_t> GetInt(const std::string& key) const;
  absl::StatusOr<double> GetDouble(const std::string& key) const;
  absl::StatusOr<bool> GetBool(const std::string& key) const;
  bool Has(const std::string& key) const { return entries.contains(key); }
};

// Duplicate keys within a section and lines without `=` are errors.
absl::StatusOr<std::vector<KeyValueSection>> ParseKeyValue(
    absl::string_view text);

absl::StatusOr<std::string> ReadFile(const std::string& path);

}  // namespace cae

#endif  // CAE_KEY_VALUE_H_
