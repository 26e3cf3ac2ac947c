#include "ghsv/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ghsv/errors.hpp"

namespace ghsv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void atomic_write_text(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DomainError("cannot open for writing: " + tmp);
        out << text;
        if (!out.flush()) throw DomainError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw DomainError("cannot rename into place: " + path);
    }
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_text_lines(const std::string& path) {
    std::istringstream in(read_text(path));
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(line);
    }
    return lines;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
    CsvTable t;
    for (const auto& line : read_text_lines(path)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            t.footers.push_back(line);
            continue;
        }
        if (t.header.empty())
            t.header = split_fields(line);
        else
            t.rows.push_back(split_fields(line));
    }
    if (t.header.empty()) throw DomainError("empty CSV: " + path);
    return t;
}

std::vector<double> csv_column(const CsvTable& t, const std::string& name) {
    std::size_t col = t.header.size();
    for (std::size_t k = 0; k < t.header.size(); ++k)
        if (t.header[k] == name) col = k;
    if (col == t.header.size()) throw DomainError("CSV lacks column: " + name);
    std::vector<double> v;
    v.reserve(t.rows.size());
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].size() <= col)
            throw DomainError("CSV row " + std::to_string(r + 1) + " too short");
        try {
            std::size_t used = 0;
            const double x = std::stod(t.rows[r][col], &used);
            if (used != t.rows[r][col].size()) throw std::invalid_argument("trailing");
            v.push_back(x);
        } catch (const std::exception&) {
            throw DomainError("CSV row " + std::to_string(r + 1) +
                              ": cannot parse '" + t.rows[r][col] + "' as a number");
        }
    }
    return v;
}

std::string csv_text(const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows,
                     const std::vector<std::string>& footers) {
    std::ostringstream out;
    for (std::size_t k = 0; k < header.size(); ++k)
        out << (k ? "," : "") << header[k];
    out << '\n';
    for (const auto& row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k)
            out << (k ? "," : "") << format_double(row[k]);
        out << '\n';
    }
    for (const auto& f : footers) out << f << '\n';
    return out.str();
}

}  // namespace ghsv
