#include "monospline/io.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace monospline {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

double parse_field(const std::string& field, long row, int col) {
    std::string trimmed = field;
    trimmed.erase(0, trimmed.find_first_not_of(" \t\r"));
    trimmed.erase(trimmed.find_last_not_of(" \t\r") + 1);
    if (trimmed.empty())
        throw CsvError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                       ": empty field");
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(trimmed.data(), trimmed.data() + trimmed.size(), value);
    if (ec != std::errc{} || ptr != trimmed.data() + trimmed.size())
        throw CsvError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                       ": '" + trimmed + "' is not a number");
    if (!std::isfinite(value))
        throw CsvError("row " + std::to_string(row) + ", column " + std::to_string(col) +
                       ": non-finite value rejected");
    return value;
}

std::vector<std::vector<double>> read_table(const std::string& path,
                                            const std::vector<std::string>& header) {
    std::ifstream in(path);
    if (!in) throw CsvError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw CsvError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> head = split_line(line);
    if (head != header) {
        std::string want;
        for (std::size_t i = 0; i < header.size(); ++i)
            want += (i ? "," : "") + header[i];
        throw CsvError("'" + path + "': expected header '" + want + "', got '" + line + "'");
    }

    std::vector<std::vector<double>> rows;
    long row_no = 1;
    while (std::getline(in, line)) {
        ++row_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields = split_line(line);
        if (fields.size() != header.size())
            throw CsvError("row " + std::to_string(row_no) + ": expected " +
                           std::to_string(header.size()) + " fields, got " +
                           std::to_string(fields.size()));
        std::vector<double> parsed;
        for (std::size_t c = 0; c < fields.size(); ++c)
            parsed.push_back(parse_field(fields[c], row_no, static_cast<int>(c) + 1));
        rows.push_back(std::move(parsed));
    }
    if (rows.empty()) throw CsvError("'" + path + "' has no data rows");
    return rows;
}

}  // namespace

XyData read_xy_csv(const std::string& path) {
    auto rows = read_table(path, {"x", "y"});
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rows[a][0] < rows[b][0]; });
    XyData data;
    data.y.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < order.size(); ++i) {
        data.x.push_back(rows[order[i]][0]);
        data.y[static_cast<Eigen::Index>(i)] = rows[order[i]][1];
    }
    return data;
}

BandData read_band_csv(const std::string& path) {
    auto rows = read_table(path, {"x", "lower", "upper"});
    BandData data;
    data.lower.resize(static_cast<Eigen::Index>(rows.size()));
    data.upper.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        data.x.push_back(rows[i][0]);
        data.lower[static_cast<Eigen::Index>(i)] = rows[i][1];
        data.upper[static_cast<Eigen::Index>(i)] = rows[i][2];
    }
    return data;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + path + "'");
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ArgumentError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace monospline
