/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "enff/harness/experiment.hpp"
#include "enff/harness/tune.hpp"

namespace enff::harness {

inline constexpr const char* kCsvHeader =
    "system,filter,flow,guidance,T,N,seed,param1_name,param1,param2_name,param2,summary_rmse,"
    "diverged,wall_ms_per_step";

/// Shortest round-trip decimal; "inf"/"-inf"/"nan" for non-finite values.
std::string format_double(double v);

std::string records_to_csv(const std::vector<RunRecord>& records);
void write_csv(const std::string& path, const std::vector<RunRecord>& records);
/// Reads the summary columns back (no RMSE series). Throws IoError with the path and
/// line number on malformed input.
std::vector<RunRecord> read_csv(const std::string& path);
std::vector<RunRecord> parse_csv(const std::string& text, const std::string& origin = "<memory>");

/// Long format: one row per (record, DA step).
void write_series_csv(const std::string& path, const std::vector<RunRecord>& records);

std::string tune_table_csv(const TuneResult& result);
nlohmann::json tune_best_json(const TuneResult& result);

struct PlotOptions {
  std::string title = "Summary RMSE";
  int width = 760;
  int height = 480;
};

/// Line chart of summary RMSE against T (log x), one series per filter label, mean over
/// seeds with a min..max band. Filters without T are drawn as horizontal reference
/// lines. Diverged runs are drawn as crosses along the top edge and left out of the
/// bands. Throws ConfigError on empty input.
std::string render_svg(const std::vector<RunRecord>& records, const PlotOptions& opts = {});
void write_svg(const std::string& path, const std::vector<RunRecord>& records,
               const PlotOptions& opts = {});

/// Writes `text` to `path`, creating parent directories. Throws IoError with the path.
void write_text(const std::string& path, const std::string& text);

}  // namespace enff::harness
