#include "eicsr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "eicsr/errors.hpp"
#include "eicsr/rng.hpp"

namespace eicsr {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    cells.push_back(cur);
    for (auto& s : cells) {
        auto b = s.find_first_not_of(" \t");
        auto e = s.find_last_not_of(" \t");
        s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    }
    return cells;
}

bool parse_cell(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

} // namespace

Dataset parse_csv(const std::string& text, const std::string& target_column) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<std::string>> raw;
    while (std::getline(in, line)) {
        if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
        raw.push_back(split_line(line));
    }
    if (raw.empty()) throw InsufficientData("empty CSV input");

    std::size_t width = raw[0].size();
    for (const auto& r : raw) {
        if (r.size() != width)
            throw Error("ragged CSV: expected " + std::to_string(width) + " cells, got " +
                        std::to_string(r.size()));
    }
    if (width < 2) throw InsufficientData("CSV needs at least one feature and a target column");

    // Header detection: a first row with any non-numeric cell is a header.
    std::vector<std::string> header;
    std::size_t first_data = 0;
    {
        double tmp;
        bool numeric = true;
        for (const auto& cell : raw[0]) {
            if (!parse_cell(cell, tmp)) {
                numeric = false;
                break;
            }
        }
        if (!numeric) {
            header = raw[0];
            first_data = 1;
        }
    }

    std::size_t target_idx = width - 1;
    if (!target_column.empty()) {
        if (header.empty()) throw Error("target column '" + target_column + "' requires a header");
        auto it = std::find(header.begin(), header.end(), target_column);
        if (it == header.end()) throw Error("target column '" + target_column + "' not found");
        target_idx = static_cast<std::size_t>(it - header.begin());
    }

    Dataset d;
    d.columns.resize(width - 1);
    for (std::size_t j = 0, k = 0; j < width; ++j) {
        if (j == target_idx) continue;
        if (!header.empty()) d.names.push_back(header[j]);
        ++k;
    }

    std::vector<double> row(width);
    for (std::size_t i = first_data; i < raw.size(); ++i) {
        bool ok = true;
        for (std::size_t j = 0; j < width; ++j) {
            if (!parse_cell(raw[i][j], row[j])) {
                ok = false;
                break;
            }
        }
        if (!ok) continue; // drop rows with bad or non-finite cells
        for (std::size_t j = 0, k = 0; j < width; ++j) {
            if (j == target_idx) continue;
            d.columns[k++].push_back(row[j]);
        }
        d.target.push_back(row[target_idx]);
    }
    if (d.rows() < 2) throw InsufficientData("fewer than two usable data rows");
    return d;
}

Dataset load_csv(const std::string& path, const std::string& target_column) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), target_column);
}

Dataset uniform_dataset(std::size_t rows, int num_vars, double lo, double hi,
                        std::uint64_t seed) {
    Dataset d;
    d.columns.assign(static_cast<std::size_t>(num_vars), {});
    for (int j = 0; j < num_vars; ++j) {
        auto& col = d.columns[static_cast<std::size_t>(j)];
        col.resize(rows);
        for (std::size_t i = 0; i < rows; ++i) {
            std::uint64_t key = rng::combine(rng::combine(seed, static_cast<std::uint64_t>(j) + 1),
                                             static_cast<std::uint64_t>(i));
            col[i] = lo + (hi - lo) * rng::u01(key);
        }
    }
    d.target.assign(rows, 0.0);
    return d;
}

} // namespace eicsr
