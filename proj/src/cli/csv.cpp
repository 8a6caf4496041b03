#include "rlasso/cli.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace rlasso::cli {
namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& text, double& value) {
    if (text.empty()) return false;
    const char* begin = text.data();
    if (*begin == '+') ++begin;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    return ec == std::errc() && ptr == end && std::isfinite(value);
}

}  // namespace

CsvError::CsvError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line), column_(column) {}

ProblemInstance read_instance_csv(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty()) {
            header = split(line);
            break;
        }
    }
    if (header.empty()) throw CsvError(line_no + 1, 1, source + " has no header row");
    if (header.size() < 2) throw CsvError(line_no, 2, "expected at least one feature column after 'b'");
    if (header[0] != "b") throw CsvError(line_no, 1, "first column must be named 'b', found '" + header[0] + "'");
    for (std::size_t k = 1; k < header.size(); ++k) {
        const std::string expected = "f" + std::to_string(k);
        if (header[k] != expected) {
            throw CsvError(line_no, k + 1, "expected column '" + expected + "', found '" + header[k] + "'");
        }
    }

    const std::size_t cols = header.size();
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() < cols) {
            throw CsvError(line_no, cells.size() + 1, "missing column '" + header[cells.size()] + "'");
        }
        if (cells.size() > cols) throw CsvError(line_no, cols + 1, "unexpected extra column");
        std::vector<double> row(cols);
        for (std::size_t k = 0; k < cols; ++k) {
            if (!parse_double(cells[k], row[k])) {
                throw CsvError(line_no, k + 1, "'" + cells[k] + "' is not a finite number");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw CsvError(line_no + 1, 1, source + " contains no data rows");

    const auto n = static_cast<Index>(rows.size());
    const auto m = static_cast<Index>(cols - 1);
    Matrix A(n, m);
    Vector b(n);
    for (Index i = 0; i < n; ++i) {
        b(i) = rows[static_cast<std::size_t>(i)][0];
        for (Index j = 0; j < m; ++j) A(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j + 1)];
    }
    return ProblemInstance(std::move(A), std::move(b));
}

ProblemInstance read_instance_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open '" + path + "'");
    try {
        return read_instance_csv(in, path);
    } catch (const CsvError& e) {
        throw CsvError(e.line(), e.column(), path + ": " + std::string(e.what()).substr(std::string(e.what()).find(": ") + 2));
    }
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    for (const std::string& cell : split(text)) {
        double v = 0.0;
        if (!parse_double(cell, v)) throw std::invalid_argument("'" + cell + "' is not a finite number");
        out.push_back(v);
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

}  // namespace rlasso::cli
