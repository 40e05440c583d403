#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcmeta/combiners.hpp"
#include "pcmeta/counterexample.hpp"
#include "pcmeta/partial_conjunction.hpp"
#include "pcmeta/prob_value.hpp"
#include "pcmeta/simulation.hpp"

namespace pcmeta::io {

/// Header plus rows of raw fields. Quoted fields may hold commas, doubled
/// quotes, and newlines.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index of `name`, or nullopt.
  [[nodiscard]] std::optional<std::size_t> column(std::string_view name) const;
};

CsvTable parse_csv(std::string_view text);
std::string csv_field(std::string_view raw);

/// One input row. Exactly one of `p` and `counts` is present.
struct StudyRecord {
  std::string study_id;
  std::optional<std::string> group_factor;
  std::optional<double> p;
  std::optional<CountTable2x2> counts;
  std::optional<double> n_sample;
  double sigma = 1.0;
};

/// Columns: study_id, group_factor, p, events_a, total_a, events_b,
/// total_b, n_sample, sigma. Only study_id is mandatory. Rows must all carry
/// p or all carry counts.
std::vector<StudyRecord> parse_studies(std::string_view csv_text);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

/// p-values of the records; count rows go through the exact test.
std::vector<ProbValue> study_pvalues(const std::vector<StudyRecord>& records);

/// Block partition from group_factor. Throws unless every row is labelled.
GroupPartition study_groups(const std::vector<StudyRecord>& records);

/// Shipped subgroup dataset (18 rows, 8 grouping factors).
std::string_view bundled_pvalues_csv();
std::string_view bundled_counts_csv();

/// %.6g
std::string sig6(double x);
/// %.17g, round-trips through strtod.
std::string exact(double x);

std::string pc_curve_json(const PcCurve& curve);
std::string pc_curve_csv(const PcCurve& curve);
std::string pc_curve_table(const PcCurve& curve);

std::string power_grid_csv(const PowerGrid& grid);
std::string power_cells_csv(const std::vector<PowerCell>& cells);

}  // namespace pcmeta::io
