/* Copyright 2026 The semgap Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

// Sectioned key/value text format shared by scenario, matrix and profile
// files.
//
//   # comment (also ';')
//   [section]            or [section.name]
//   key = 42             integer
//   key = 2.5            real
//   key = true           boolean
//   key = Map            bare string
//   key = "noon-sunny"   quoted string (\" and \\ escapes)
//   key = [10, 15, 20]   list of scalars; may span lines until ']'
//
// Keys are unique within a section. Keys before the first header land in
// the unnamed section "". Values keep their source spelling so that typed
// accessors can report the offending text.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace semgap::config {

struct Value {
  // Scalar values have exactly one item; lists have zero or more.
  std::vector<std::string> items;
  bool is_list = false;
  int line = 0;
};

struct Entry {
  std::string key;
  Value value;
};

struct Section {
  std::string name;
  std::vector<Entry> entries;
  int line = 0;

  const Value* find(std::string_view key) const;
  bool has(std::string_view key) const { return find(key) != nullptr; }

  std::string get_string(std::string_view key) const;
  double get_real(std::string_view key) const;
  std::int64_t get_int(std::string_view key) const;
  std::uint64_t get_uint(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<std::string> get_strings(std::string_view key) const;
  std::vector<double> get_reals(std::string_view key) const;

  std::string get_string(std::string_view key, std::string fallback) const;
  double get_real(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;
};

struct Document {
  std::vector<Section> sections;

  const Section* find(std::string_view name) const;
  // Sections whose name is `prefix` or starts with `prefix.`.
  std::vector<const Section*> with_prefix(std::string_view prefix) const;
};

Document parse(std::string_view text);
Document parse_file(const std::string& path);

double to_real(const std::string& text, std::string_view key);
std::int64_t to_int(const std::string& text, std::string_view key);
std::uint64_t to_uint(const std::string& text, std::string_view key);
bool to_bool(const std::string& text, std::string_view key);

// Writer helpers. Reals use the shortest representation that reads back
// to the same double.
std::string format_real(double v);
std::string quote(std::string_view s);

}  // namespace semgap::config
