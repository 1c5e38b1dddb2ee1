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

#include "cobets/bench/report.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace cobets::bench {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string pm(double mean, double se, int precision) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << mean << " ± " << se;
  return os.str();
}

}  // namespace

std::vector<ResultSummary> parse_summary_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty summary csv");
  const auto header = split(line);
  auto column = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::invalid_argument("summary csv lacks column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  std::size_t k = 0;
  while (std::find(header.begin(), header.end(),
                   "mean_V_C_" + std::to_string(k + 1)) != header.end()) {
    ++k;
  }
  std::vector<ResultSummary> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("summary csv row has wrong column count");
    }
    ResultSummary r;
    r.domain = cells[column("domain")];
    r.arm = cells[column("arm")];
    r.episodes = std::stoi(cells[column("episodes")]);
    r.mean_reward = std::stod(cells[column("mean_V_R")]);
    r.se_reward = std::stod(cells[column("se_V_R")]);
    for (std::size_t j = 1; j <= k; ++j) {
      r.mean_cost.push_back(std::stod(cells[column("mean_V_C_" + std::to_string(j))]));
      r.se_cost.push_back(std::stod(cells[column("se_V_C_" + std::to_string(j))]));
    }
    r.violation_fraction = std::stod(cells[column("violation_fraction")]);
    r.ms_per_decision = std::stod(cells[column("ms_per_decision")]);
    r.queries_per_decision = std::stod(cells[column("queries_per_decision")]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::vector<ResultSummary> read_summary_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open summary '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_summary_csv(ss.str());
}

Report make_report(const std::vector<ResultSummary>& rows) {
  if (rows.empty()) throw std::invalid_argument("report: no summaries given");
  const std::string& domain = rows.front().domain;
  const std::size_t k = rows.front().mean_cost.size();
  for (const auto& r : rows) {
    if (r.domain != domain) {
      throw std::invalid_argument("report: summaries come from different domains ('" +
                                  domain + "' vs '" + r.domain + "')");
    }
    if (r.mean_cost.size() != k) {
      throw std::invalid_argument("report: cost dimensions differ");
    }
  }

  std::vector<std::vector<std::string>> table;
  std::vector<std::string> head = {"arm", "episodes", "V_R"};
  for (std::size_t j = 0; j < k; ++j) {
    head.push_back(k == 1 ? "V_C" : "V_C_" + std::to_string(j + 1));
  }
  head.push_back("violations");
  table.push_back(head);
  for (const auto& r : rows) {
    std::vector<std::string> row = {r.arm, std::to_string(r.episodes),
                                    pm(r.mean_reward, r.se_reward, 1)};
    for (std::size_t j = 0; j < k; ++j) {
      row.push_back(pm(r.mean_cost[j], r.se_cost[j], 3));
    }
    std::ostringstream v;
    v << std::fixed << std::setprecision(2) << r.violation_fraction;
    row.push_back(v.str());
    table.push_back(row);
  }

  // Display width: count UTF-8 code points, not bytes, so "±" aligns.
  auto width = [](const std::string& s) {
    return static_cast<std::size_t>(std::count_if(
        s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
  };
  std::vector<std::size_t> widths(head.size(), 0);
  for (const auto& row : table) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      widths[c] = std::max(widths[c], width(row[c]));
    }
  }
  Report rep;
  std::ostringstream text;
  text << "domain: " << domain << '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    for (std::size_t c = 0; c < table[r].size(); ++c) {
      text << table[r][c] << std::string(widths[c] - width(table[r][c]), ' ')
           << (c + 1 < table[r].size() ? "  " : "\n");
    }
  }
  rep.text = text.str();
  rep.csv = summary_csv(rows);
  return rep;
}

Report report(const std::vector<std::string>& summary_paths) {
  std::vector<ResultSummary> rows;
  for (const auto& p : summary_paths) {
    auto part = read_summary_csv(p);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return make_report(rows);
}

}  // namespace cobets::bench
