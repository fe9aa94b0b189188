#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace pneu {

enum class Severity { Error, Warning };

struct SourceLoc {
  std::size_t line = 0;    // 1-based
  std::size_t column = 0;  // 1-based
  bool operator==(const SourceLoc&) const = default;
};

struct ParseDiagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;
  std::string token;
};

/// `<file>:<line>:<col>: <severity>: <message>`
std::string format_diagnostic(const ParseDiagnostic& d, std::string_view file);

bool has_errors(const std::vector<ParseDiagnostic>& diags);

}  // namespace pneu
