#pragma once

#include <string>
#include <vector>

#include "ggparse/types.hpp"

namespace ggparse {

// Score-matrix interchange file for decoder-only use; grammar documented in
// docs/score-format.md. Numbers are written with max_digits10 precision.
void write_scores(const std::vector<ScoreSet>& sets, const std::string& path);
std::string format_scores(const std::vector<ScoreSet>& sets);
std::vector<ScoreSet> read_scores(const std::string& path);
std::vector<ScoreSet> parse_scores(const std::string& text);

}  // namespace ggparse
