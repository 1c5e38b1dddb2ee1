/*
 * Copyright 2026 The COBeTS Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <string>
#include <vector>

#include "cobets/bench/campaign.hpp"

namespace cobets::bench {

/// Parses a summary.csv written by run_campaign.
std::vector<ResultSummary> read_summary_csv(const std::string& path);
std::vector<ResultSummary> parse_summary_csv(const std::string& text);

struct Report {
  std::string text;  // aligned table, "mean ± se" cells
  std::string csv;
};

/// Side-by-side comparison of arms. All rows must share one domain.
Report make_report(const std::vector<ResultSummary>& rows);
Report report(const std::vector<std::string>& summary_paths);

}  // namespace cobets::bench
