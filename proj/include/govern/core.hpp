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

#ifndef GOVERN_CORE_HPP_
#define GOVERN_CORE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace govern {

/// Base class for every error raised by the library. Data and I/O problems
/// surface as `Error`; callers that need a usage/runtime split catch
/// `UsageError` first.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

/// Relevance probability in [0,1]. The only way to build one is the
/// range-checked constructor, so every Score in the program is valid.
class Score {
 public:
  explicit Score(double value);

  double value() const noexcept { return value_; }

  friend bool operator==(Score a, Score b) noexcept { return a.value_ == b.value_; }
  friend auto operator<=>(Score a, Score b) noexcept { return a.value_ <=> b.value_; }

 private:
  double value_;
};

enum class Orientation : std::int8_t { Down = -1, Flat = 0, Up = 1 };

inline int to_int(Orientation o) noexcept { return static_cast<int>(o); }

enum class Label : std::int8_t { Negative = -1, Positive = 1 };

inline int to_int(Label l) noexcept { return static_cast<int>(l); }
inline bool is_positive(Label l) noexcept { return l == Label::Positive; }

struct SampleRecord {
  std::string question_id;
  std::string paragraph_id;
  std::vector<double> features;
  std::optional<Label> label;
  std::vector<Score> teacher_scores;

  bool operator==(const SampleRecord&) const = default;
};

/// Validated, immutable collection of records sharing one feature
/// dimensionality and one teacher count.
class Dataset {
 public:
  /// Throws `Error` if `records` is empty, dimensions disagree or a
  /// (question_id, paragraph_id) pair repeats.
  explicit Dataset(std::vector<SampleRecord> records);

  const std::vector<SampleRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  const SampleRecord& operator[](std::size_t i) const { return records_[i]; }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t teacher_count() const noexcept { return teacher_count_; }

  bool fully_labeled() const noexcept;
  /// Index of the first unlabeled record, if any.
  std::optional<std::size_t> first_unlabeled() const noexcept;

  /// Records whose index is listed, in that order.
  Dataset subset(std::span<const std::size_t> indices) const;
  /// Same records keeping only the listed teacher columns.
  Dataset with_teachers(std::span<const std::size_t> teacher_indices) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::vector<SampleRecord> records_;
  std::size_t feature_dim_ = 0;
  std::size_t teacher_count_ = 0;
};

enum class Strategy { Mean, LRWeighted, Govern, GovernCA, CAMKD };

std::string_view to_string(Strategy s) noexcept;
/// Accepts the CLI spellings: mean, lr, govern, govern-ca, camkd.
Strategy parse_strategy(std::string_view name);

/// Output of a combiner for one sample.
///
/// `weights` are the per-teacher weights actually applied. For GOVERN-CA
/// and CA-MKD `raw_weights` keeps the unnormalized confidence weights for
/// inspection; it is empty for the other strategies. When `skipped` is set
/// the sample carries no target: every weight is zero and `target` holds
/// the student score it was compared against.
struct EnsembleTarget {
  Score target{0.0};
  std::vector<double> weights;
  std::vector<double> raw_weights;
  Strategy strategy = Strategy::Mean;
  bool skipped = false;
};

// Dataset text format: one record per line, tab separated
//   question_id  paragraph_id  f1,f2,...  {0|1|-}  s1,s2,...
Dataset parse_dataset(std::istream& in, std::optional<std::size_t> expected_teachers = {});
Dataset load_dataset(const std::filesystem::path& path,
                     std::optional<std::size_t> expected_teachers = {});
void write_dataset(std::ostream& out, const Dataset& data);
void save_dataset(const std::filesystem::path& path, const Dataset& data);

// Number formatting shared by every emitter.

/// Shortest decimal text that parses back to the same double.
std::string format_real(double value);
/// Decimal text with 17 significant digits.
std::string format_real17(double value);
/// Strict full-string parse; throws `Error` mentioning `what` on failure.
double parse_real(std::string_view text, std::string_view what);
std::vector<double> parse_real_list(std::string_view text, std::string_view what);

}  // namespace govern

#endif  // GOVERN_CORE_HPP_
