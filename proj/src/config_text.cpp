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

#include "semgap/config_text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "semgap/error.hpp"

namespace semgap::config {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(int line, const std::string& msg) {
  fail(ErrorCode::kParse, "line " + std::to_string(line) + ": " + msg);
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  for (char c : k) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) {
      return false;
    }
  }
  return true;
}

// Splits `body` into scalar tokens, honoring quotes. Comments are already
// stripped by the caller.
std::vector<std::string> split_items(std::string_view body, int line) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < body.size()) {
    while (i < body.size() && (std::isspace(static_cast<unsigned char>(body[i])))) ++i;
    if (i >= body.size()) break;
    std::string item;
    if (body[i] == '"') {
      ++i;
      bool closed = false;
      while (i < body.size()) {
        char c = body[i++];
        if (c == '\\' && i < body.size()) {
          item.push_back(body[i++]);
        } else if (c == '"') {
          closed = true;
          break;
        } else {
          item.push_back(c);
        }
      }
      if (!closed) parse_error(line, "unterminated string");
      while (i < body.size() && std::isspace(static_cast<unsigned char>(body[i]))) ++i;
    } else {
      size_t start = i;
      while (i < body.size() && body[i] != ',') ++i;
      item = std::string(trim(body.substr(start, i - start)));
      if (item.empty()) parse_error(line, "empty list item");
    }
    out.push_back(std::move(item));
    if (i < body.size()) {
      if (body[i] != ',') parse_error(line, "expected ',' between list items");
      ++i;
    }
  }
  return out;
}

// Removes a trailing comment that is not inside quotes.
std::string_view strip_comment(std::string_view s) {
  bool in_quote = false;
  for (size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (in_quote && c == '\\') {
      ++i;
    } else if (c == '"') {
      in_quote = !in_quote;
    } else if (!in_quote && (c == '#' || c == ';')) {
      return s.substr(0, i);
    }
  }
  return s;
}

}  // namespace

const Value* Section::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e.value;
  }
  return nullptr;
}

static const Value& require(const Section& s, std::string_view key) {
  const Value* v = s.find(key);
  if (v == nullptr) fail(ErrorCode::kParse, "missing key: " + std::string(key));
  return *v;
}

static const std::string& scalar(const Value& v, std::string_view key) {
  if (v.is_list || v.items.size() != 1) {
    fail(ErrorCode::kParse, "line " + std::to_string(v.line) + ": key '" + std::string(key) +
                                "' expects a scalar");
  }
  return v.items.front();
}

std::string Section::get_string(std::string_view key) const {
  return scalar(require(*this, key), key);
}
double Section::get_real(std::string_view key) const {
  return to_real(scalar(require(*this, key), key), key);
}
std::int64_t Section::get_int(std::string_view key) const {
  return to_int(scalar(require(*this, key), key), key);
}
std::uint64_t Section::get_uint(std::string_view key) const {
  return to_uint(scalar(require(*this, key), key), key);
}
bool Section::get_bool(std::string_view key) const {
  return to_bool(scalar(require(*this, key), key), key);
}

std::vector<std::string> Section::get_strings(std::string_view key) const {
  return require(*this, key).items;
}

std::vector<double> Section::get_reals(std::string_view key) const {
  std::vector<double> out;
  for (const auto& s : require(*this, key).items) out.push_back(to_real(s, key));
  return out;
}

std::string Section::get_string(std::string_view key, std::string fallback) const {
  return has(key) ? get_string(key) : fallback;
}
double Section::get_real(std::string_view key, double fallback) const {
  return has(key) ? get_real(key) : fallback;
}
std::int64_t Section::get_int(std::string_view key, std::int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}
bool Section::get_bool(std::string_view key, bool fallback) const {
  return has(key) ? get_bool(key) : fallback;
}

const Section* Document::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::vector<const Section*> Document::with_prefix(std::string_view prefix) const {
  std::vector<const Section*> out;
  for (const auto& s : sections) {
    std::string_view n = s.name;
    if (n == prefix || (n.size() > prefix.size() && n.substr(0, prefix.size()) == prefix &&
                        n[prefix.size()] == '.')) {
      out.push_back(&s);
    }
  }
  return out;
}

Document parse(std::string_view text) {
  Document doc;
  doc.sections.push_back(Section{"", {}, 0});
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;

    if (line.front() == '[' && line.find('=') == std::string_view::npos) {
      if (line.back() != ']') parse_error(line_no, "malformed section header");
      std::string name(trim(line.substr(1, line.size() - 2)));
      if (!valid_key(name)) parse_error(line_no, "invalid section name '" + name + "'");
      if (doc.find(name) != nullptr) parse_error(line_no, "duplicate section [" + name + "]");
      doc.sections.push_back(Section{name, {}, line_no});
      continue;
    }

    auto eq = line.find('=');
    if (eq == std::string_view::npos) parse_error(line_no, "expected 'key = value'");
    std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) parse_error(line_no, "invalid key '" + key + "'");
    std::string_view rhs = trim(line.substr(eq + 1));
    Section& sec = doc.sections.back();
    if (sec.has(key)) parse_error(line_no, "duplicate key '" + key + "'");

    Value value;
    value.line = line_no;
    if (!rhs.empty() && rhs.front() == '[') {
      std::string body(rhs.substr(1));
      int start_line = line_no;
      // Lists may continue over several lines until the closing bracket.
      while (body.find(']') == std::string::npos) {
        if (!std::getline(in, raw)) parse_error(start_line, "unterminated list");
        ++line_no;
        body += " ";
        body += std::string(trim(strip_comment(raw)));
      }
      auto close = body.rfind(']');
      if (!trim(std::string_view(body).substr(close + 1)).empty()) {
        parse_error(line_no, "trailing text after list");
      }
      value.is_list = true;
      value.items = split_items(std::string_view(body).substr(0, close), start_line);
    } else {
      if (rhs.empty()) parse_error(line_no, "missing value for '" + key + "'");
      auto items = split_items(rhs, line_no);
      if (items.size() != 1) parse_error(line_no, "unexpected ',' in scalar value");
      value.items = std::move(items);
    }
    sec.entries.push_back(Entry{std::move(key), std::move(value)});
  }
  return doc;
}

Document parse_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::kIo, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse(ss.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

double to_real(const std::string& text, std::string_view key) {
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    fail(ErrorCode::kParse, "key '" + std::string(key) + "': expected a number, got '" + text + "'");
  }
  return v;
}

std::int64_t to_int(const std::string& text, std::string_view key) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    fail(ErrorCode::kParse, "key '" + std::string(key) + "': expected an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& text, std::string_view key) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    fail(ErrorCode::kParse,
         "key '" + std::string(key) + "': expected an unsigned integer, got '" + text + "'");
  }
  return v;
}

bool to_bool(const std::string& text, std::string_view key) {
  if (text == "true") return true;
  if (text == "false") return false;
  fail(ErrorCode::kParse, "key '" + std::string(key) + "': expected true/false, got '" + text + "'");
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, p);
  // Keep reals visibly real so the reader does not need the schema.
  if (s.find_first_of(".eE") == std::string::npos && s.find("inf") == std::string::npos &&
      s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace semgap::config
