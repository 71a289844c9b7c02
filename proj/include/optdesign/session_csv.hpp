// Copyright 2026 The optdesign Authors
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

#ifndef OPTDESIGN_SESSION_CSV_HPP
#define OPTDESIGN_SESSION_CSV_HPP

// Session CSV: round,pair,p1_id,p2_id,world,p1_action,p2_action,bot_lineage

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "optdesign/errors.hpp"
#include "optdesign/stopgo.hpp"

namespace optdesign {

inline constexpr std::string_view kSessionHeader =
    "round,pair,p1_id,p2_id,world,p1_action,p2_action,bot_lineage";

inline void write_session_csv(std::ostream& os, const SessionDataset& data) {
  os << kSessionHeader << '\n';
  for (const auto& r : data.records) {
    const Outcome& o = r.outcome;
    os << r.round << ',' << r.pair << ',' << r.p1 << ',' << r.p2 << ','
       << (o.world == World::kA ? "a" : "b") << ','
       << (o.p1 == P1Action::kGo ? "go" : "stop") << ','
       << (o.p2 == P2Action::kLeft ? "left" : "right") << ',' << (r.bot_lineage ? 1 : 0)
       << '\n';
  }
}

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

inline int parse_int_field(std::string_view s, std::size_t row, const char* column) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(row, column, "expected an integer, got '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace detail

// Parses a session for the given design. Records must be ordered by round.
// Rows are counted from 1 with the header as row 1.
inline SessionDataset read_session_csv(std::istream& is, const GameDesign& design) {
  SessionDataset data;
  data.design = design;
  std::string line;
  std::size_t row = 0;
  if (!std::getline(is, line)) throw ParseError(1, "header", "file is empty");
  ++row;
  if (detail::trim(line) != kSessionHeader) {
    throw ParseError(1, "header", "expected '" + std::string(kSessionHeader) + "'");
  }
  static constexpr const char* kColumns[] = {"round",     "pair",      "p1_id",
                                             "p2_id",     "world",     "p1_action",
                                             "p2_action", "bot_lineage"};
  while (std::getline(is, line)) {
    ++row;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != 8) {
      throw ParseError(row, "*", "expected 8 fields, got " + std::to_string(fields.size()));
    }
    for (auto& f : fields) f = detail::trim(f);
    MatchRecord r;
    r.round = detail::parse_int_field(fields[0], row, kColumns[0]);
    if (r.round < 1) throw ParseError(row, kColumns[0], "round must be >= 1");
    r.pair = detail::parse_int_field(fields[1], row, kColumns[1]);
    if (r.pair < 0) throw ParseError(row, kColumns[1], "pair must be >= 0");
    r.p1 = detail::parse_int_field(fields[2], row, kColumns[2]);
    r.p2 = detail::parse_int_field(fields[3], row, kColumns[3]);
    if (r.p1 == r.p2) throw ParseError(row, kColumns[3], "a player cannot meet themself");
    if (fields[4] == "a") {
      r.outcome.world = World::kA;
    } else if (fields[4] == "b") {
      r.outcome.world = World::kB;
    } else {
      throw ParseError(row, kColumns[4], "expected a or b, got '" + std::string(fields[4]) + "'");
    }
    if (fields[5] == "go") {
      r.outcome.p1 = P1Action::kGo;
    } else if (fields[5] == "stop") {
      r.outcome.p1 = P1Action::kStop;
    } else {
      throw ParseError(row, kColumns[5],
                       "expected stop or go, got '" + std::string(fields[5]) + "'");
    }
    if (fields[6] == "left") {
      r.outcome.p2 = P2Action::kLeft;
    } else if (fields[6] == "right") {
      r.outcome.p2 = P2Action::kRight;
    } else {
      throw ParseError(row, kColumns[6],
                       "expected left or right, got '" + std::string(fields[6]) + "'");
    }
    if (fields[7] == "0") {
      r.bot_lineage = false;
    } else if (fields[7] == "1") {
      r.bot_lineage = true;
    } else {
      throw ParseError(row, kColumns[7], "expected 0 or 1, got '" + std::string(fields[7]) + "'");
    }
    if (!data.records.empty() && r.round < data.records.back().round) {
      throw ParseError(row, kColumns[0], "records must be ordered by round");
    }
    data.records.push_back(r);
    data.n_pairs = std::max(data.n_pairs, r.pair + 1);
    data.n_rounds = std::max(data.n_rounds, r.round);
  }
  validate_session(data, false);
  return data;
}

}  // namespace optdesign

#endif  // OPTDESIGN_SESSION_CSV_HPP
