#pragma once

// Strict word-level scoring and comparison reports.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shipcast/bulletin.hpp"

namespace shipcast {

/// Lowercase, whitespace split, leading/trailing punctuation stripped.
/// Numerals and internal hyphens survive; empty tokens are dropped.
std::vector<std::string> tokenize(std::string_view text);

struct WordScore {
  std::size_t tp{0};
  std::size_t fp{0};
  std::size_t fn{0};

  [[nodiscard]] double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp); }
  [[nodiscard]] double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn); }
  [[nodiscard]] double f1() const {
    const double p = precision();
    const double r = recall();
    return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
  }

  WordScore& operator+=(const WordScore& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const WordScore&, const WordScore&) = default;
};

/// Multiset matching: tp = sum over words of min(count_gen, count_exp).
WordScore word_score(std::string_view generated, std::string_view expected);
WordScore word_score(const std::vector<std::string>& generated, const std::vector<std::string>& expected);

/// Pooled counts. Throws Error(EmptyEvaluation) for an empty list.
WordScore micro_average(std::span<const WordScore> scores);

struct FragmentKey {
  std::string area;
  std::string attribute;
  std::string issue_time;

  friend auto operator<=>(const FragmentKey&, const FragmentKey&) = default;
};

struct TextRecord {
  FragmentKey key;
  std::string text;
  /// Only meaningful for expected fragments: the source covered several areas.
  bool excluded{false};
};

nlohmann::json to_json(const TextRecord& r);
TextRecord text_record_from_json(const nlohmann::json& j);
std::vector<TextRecord> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<TextRecord>& records);

/// Expected records from a segmented forecast. Gale and synopsis fragments are
/// not scored and are left out; multi-area fragments are kept, flagged excluded.
std::vector<TextRecord> expected_records(const std::vector<Fragment>& fragments, const std::string& issue_time);

struct ReportRow {
  std::string attribute;
  std::string system;
  WordScore score;
  std::size_t fragments{0};
};

struct EvalReport {
  std::vector<std::string> systems;
  std::vector<std::string> attributes;  ///< scored attributes, report order
  std::vector<ReportRow> rows;          ///< attribute-major, then system
  std::map<std::string, WordScore> aggregate;  ///< pooled over all attributes, per system
  std::size_t excluded_count{0};

  [[nodiscard]] const ReportRow& row(const std::string& attribute, const std::string& system) const;
  /// Arithmetic mean of the per-attribute F1 values, as in a summary table.
  [[nodiscard]] double average_f1(const std::string& system) const;
};

/// Scores every non-excluded expected fragment against each system's output.
/// Throws Error(AlignmentError) listing orphans on either side.
EvalReport evaluate_systems(const std::vector<TextRecord>& expected,
                            const std::vector<std::pair<std::string, std::vector<TextRecord>>>& outputs);

/// Aligned table: one row per attribute and metric, one column per system,
/// plus a Difference column (first minus second) when two systems are compared.
std::string render_report(const EvalReport& report);
nlohmann::json to_json(const EvalReport& report);

}  // namespace shipcast
