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

#include "cae/key_value.h"

#include <fstream>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"

namespace cae {
namespace {

std::string Where(const KeyValueSection& section) {
  if (section.name.empty()) return "top level";
  return absl::StrFormat("section [%s] at line %d", section.name,
                         section.line);
}

}  // namespace

absl::StatusOr<std::string> KeyValueSection::GetString(
    const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("missing key '%s' in %s", key, Where(*this)));
  }
  return it->second;
}

absl::StatusOr<int64_t> KeyValueSection::GetInt(const std::string& key) const {
  auto text = GetString(key);
  if (!text.ok()) return text.status();
  int64_t value = 0;
  if (!absl::SimpleAtoi(*text, &value)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "key '%s' in %s: '%s' is not an integer", key, Where(*this), *text));
  }
  return value;
}

absl::StatusOr<double> KeyValueSection::GetDouble(
    const std::string& key) const {
  auto text = GetString(key);
  if (!text.ok()) return text.status();
  double value = 0;
  if (!absl::SimpleAtod(*text, &value)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "key '%s' in %s: '%s' is not a number", key, Where(*this), *text));
  }
  return value;
}

absl::StatusOr<bool> KeyValueSection::GetBool(const std::string& key) const {
  auto text = GetString(key);
  if (!text.ok()) return text.status();
  bool value = false;
  if (!absl::SimpleAtob(*text, &value)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "key '%s' in %s: '%s' is not a boolean", key, Where(*this), *text));
  }
  return value;
}

absl::StatusOr<std::vector<KeyValueSection>> ParseKeyValue(
    absl::string_view text) {
  std::vector<KeyValueSection> sections(1);
  int line_number = 0;
  for (absl::string_view raw : absl::StrSplit(text, '\n')) {
    ++line_number;
    absl::string_view line = raw;
    if (auto hash = line.find('#'); hash != absl::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = absl::StripAsciiWhitespace(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        return absl::InvalidArgumentError(
            absl::StrFormat("line %d: malformed section header", line_number));
      }
      KeyValueSection section;
      section.name = std::string(
          absl::StripAsciiWhitespace(line.substr(1, line.size() - 2)));
      section.line = line_number;
      sections.push_back(std::move(section));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: expected 'key = value'", line_number));
    }
    std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    std::string value(absl::StripAsciiWhitespace(line.substr(eq + 1)));
    if (key.empty()) {
      return absl::InvalidArgumentError(
          absl::StrFormat("line %d: empty key", line_number));
    }
    auto [it, inserted] =
        sections.back().entries.emplace(std::move(key), std::move(value));
    if (!inserted) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "line %d: duplicate key '%s'", line_number, it->first));
    }
  }
  return sections;
}

absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::NotFoundError(absl::StrFormat("cannot open '%s'", path));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return absl::DataLossError(absl::StrFormat("error reading '%s'", path));
  }
  return buffer.str();
}

}  // namespace cae
