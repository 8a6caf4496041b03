#pragma once

#include "rlasso/core.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace rlasso::cli {

/// Malformed input; the message names the line and column.
class CsvError : public std::runtime_error {
public:
    CsvError(std::size_t line, std::size_t column, const std::string& what);
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Reads a table with header `b,f1,...,fm` and one sample per row.
/// `source` only labels error messages.
ProblemInstance read_instance_csv(std::istream& in, const std::string& source = "input");
ProblemInstance read_instance_csv_file(const std::string& path);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

/// Comma-separated reals, e.g. "0.1,0.2". Throws std::invalid_argument.
std::vector<double> parse_list(const std::string& text);

/// Runs one command. args excludes the program name. Exit codes:
/// 0 success, 1 input error, 2 non-convergence.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Toolkit version string embedded in every result document.
std::string version();

}  // namespace rlasso::cli
