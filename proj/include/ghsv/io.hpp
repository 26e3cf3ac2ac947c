#pragma once
#include <string>
#include <vector>

namespace ghsv {

// shortest exact decimal: every numeric field round-trips bit-identically
std::string format_double(double v);

// write-temp-then-rename so a reader never sees a partial file
void atomic_write_text(const std::string& path, const std::string& text);

std::string read_text(const std::string& path);
std::vector<std::string> read_text_lines(const std::string& path);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> footers;  // trailing '#' metadata lines
};

// comma-separated, first non-comment line is the header; '#' lines are
// collected as footers, not data
CsvTable read_csv(const std::string& path);
std::vector<double> csv_column(const CsvTable& t, const std::string& name);

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& footers = {});

}  // namespace ghsv
