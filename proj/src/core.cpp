// Copyright 2026  The govern-distill Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "govern/core.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <utility>

namespace govern {

Score::Score(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw Error("score out of range [0,1]: " + format_real(value));
  }
}

Dataset::Dataset(std::vector<SampleRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw Error("empty dataset");
  feature_dim_ = records_.front().features.size();
  teacher_count_ = records_.front().teacher_scores.size();
  std::set<std::pair<std::string, std::string>> seen;
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.features.size() != feature_dim_) {
      throw Error("record " + std::to_string(i + 1) + ": expected " + std::to_string(feature_dim_) +
                  " features, got " + std::to_string(r.features.size()));
    }
    if (r.teacher_scores.size() != teacher_count_) {
      throw Error("record " + std::to_string(i + 1) + ": expected " +
                  std::to_string(teacher_count_) + " teacher scores, got " +
                  std::to_string(r.teacher_scores.size()));
    }
    if (!seen.emplace(r.question_id, r.paragraph_id).second) {
      throw Error("record " + std::to_string(i + 1) + ": duplicate pair (" + r.question_id + ", " +
                  r.paragraph_id + ")");
    }
  }
}

bool Dataset::fully_labeled() const noexcept { return !first_unlabeled().has_value(); }

std::optional<std::size_t> Dataset::first_unlabeled() const noexcept {
  for (std::size_t i = 0; i < records_.size(); ++i) {
    if (!records_[i].label) return i;
  }
  return std::nullopt;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  std::vector<SampleRecord> out;
  out.reserve(indices.size());
  for (std::size_t i : indices) out.push_back(records_.at(i));
  return Dataset(std::move(out));
}

Dataset Dataset::with_teachers(std::span<const std::size_t> teacher_indices) const {
  if (teacher_indices.empty()) throw Error("teacher selection is empty");
  std::vector<SampleRecord> out = records_;
  for (auto& r : out) {
    std::vector<Score> picked;
    picked.reserve(teacher_indices.size());
    for (std::size_t t : teacher_indices) {
      if (t >= teacher_count_) throw Error("teacher index out of range: " + std::to_string(t));
      picked.push_back(r.teacher_scores[t]);
    }
    r.teacher_scores = std::move(picked);
  }
  return Dataset(std::move(out));
}

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::Mean: return "mean";
    case Strategy::LRWeighted: return "lr";
    case Strategy::Govern: return "govern";
    case Strategy::GovernCA: return "govern-ca";
    case Strategy::CAMKD: return "camkd";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::Mean, Strategy::LRWeighted, Strategy::Govern, Strategy::GovernCA,
                     Strategy::CAMKD}) {
    if (to_string(s) == name) return s;
  }
  throw UsageError("unknown strategy: " + std::string(name));
}

std::string format_real(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string format_real17(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double parse_real(std::string_view text, std::string_view what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto res = std::from_chars(first, last, value);
  if (text.empty() || res.ec != std::errc() || res.ptr != last) {
    throw Error("malformed number in " + std::string(what) + ": '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_real_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = text.find(',', start);
    out.push_back(parse_real(text.substr(start, comma - start), what));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

SampleRecord parse_record(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = split_tabs(line);
  if (fields.size() != 5) {
    throw Error("expected 5 tab-separated fields, got " + std::to_string(fields.size()));
  }
  SampleRecord r;
  r.question_id = fields[0];
  r.paragraph_id = fields[1];
  if (r.question_id.empty() || r.paragraph_id.empty()) throw Error("empty identifier");
  r.features = parse_real_list(fields[2], "features");
  for (double f : r.features) {
    if (!std::isfinite(f)) throw Error("non-finite feature value");
  }
  if (fields[3] == "1") {
    r.label = Label::Positive;
  } else if (fields[3] == "0") {
    r.label = Label::Negative;
  } else if (fields[3] != "-") {
    throw Error("label must be 0, 1 or -, got '" + std::string(fields[3]) + "'");
  }
  for (double s : parse_real_list(fields[4], "teacher scores")) r.teacher_scores.emplace_back(s);
  return r;
}

}  // namespace

Dataset parse_dataset(std::istream& in, std::optional<std::size_t> expected_teachers) {
  std::vector<SampleRecord> records;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::size_t teachers = expected_teachers.value_or(0);
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    SampleRecord r;
    try {
      r = parse_record(line);
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
    if (records.empty()) {
      dim = r.features.size();
      if (!expected_teachers) teachers = r.teacher_scores.size();
    }
    if (r.features.size() != dim) {
      throw Error(where + "expected " + std::to_string(dim) + " features, got " +
                  std::to_string(r.features.size()));
    }
    if (r.teacher_scores.size() != teachers) {
      throw Error(where + "expected " + std::to_string(teachers) + " teacher scores, got " +
                  std::to_string(r.teacher_scores.size()));
    }
    if (!seen.emplace(r.question_id, r.paragraph_id).second) {
      throw Error(where + "duplicate pair (" + r.question_id + ", " + r.paragraph_id + ")");
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw Error("empty dataset");
  return Dataset(std::move(records));
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<std::size_t> expected_teachers) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset: " + path.string());
  try {
    return parse_dataset(in, expected_teachers);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_dataset(std::ostream& out, const Dataset& data) {
  for (const auto& r : data.records()) {
    out << r.question_id << '\t' << r.paragraph_id << '\t';
    for (std::size_t i = 0; i < r.features.size(); ++i) {
      if (i) out << ',';
      out << format_real(r.features[i]);
    }
    out << '\t' << (!r.label ? "-" : is_positive(*r.label) ? "1" : "0") << '\t';
    for (std::size_t i = 0; i < r.teacher_scores.size(); ++i) {
      if (i) out << ',';
      out << format_real(r.teacher_scores[i].value());
    }
    out << '\n';
  }
}

void save_dataset(const std::filesystem::path& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write dataset: " + path.string());
  write_dataset(out, data);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace govern
