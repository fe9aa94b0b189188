#pragma once

// Line-oriented tokenizer shared by the netlist and chart readers.

#include <cstddef>
#include <string_view>
#include <vector>

namespace pneu::detail {

struct Token {
  std::string_view text;
  std::size_t column = 0;  // 1-based
};

struct Line {
  std::size_t number = 0;  // 1-based
  std::vector<Token> tokens;
};

/// Splits on blanks after dropping `#` comments; blank lines are skipped.
std::vector<Line> tokenize(std::string_view text);

bool is_identifier(std::string_view s);

}  // namespace pneu::detail
