#pragma once

#include <charconv>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ldvdd/dataset.hpp"
#include "ldvdd/errors.hpp"

namespace ldvdd::io {

/// Header plus raw string fields. Line numbers in errors are 1-based file
/// lines (the header is line 1).
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(const std::string& name) const {
        for (std::size_t j = 0; j < header.size(); ++j) {
            if (header[j] == name) return j;
        }
        return std::nullopt;
    }
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    if (quoted) throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(cur));
    return fields;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (line.empty()) continue;
        auto fields = detail::split_csv_line(line, line_no);
        if (table.header.empty()) {
            table.header = std::move(fields);
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(table.header.size()) + " fields, found " +
                            std::to_string(fields.size()));
        }
        table.rows.push_back(std::move(fields));
    }
    if (table.header.empty()) throw DataError("CSV input has no header");
    return table;
}

inline CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in);
}

/// Which CSV columns play which role.
struct ColumnBindings {
    std::string outcome = "y";
    std::string group = "q";
    std::string period = "t";
    std::string weight;   // empty: unit weights
    std::string cluster;  // empty: no clustering
    std::vector<std::string> covariates;
};

namespace detail {

inline double parse_number(const std::string& field, std::size_t line_no, const std::string& col) {
    const std::string where = "line " + std::to_string(line_no) + ", column '" + col + "': ";
    if (field.empty()) throw DataError(where + "missing value");
    double v = 0.0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) throw DataError(where + "not a number: '" + field + "'");
    return v;
}

inline int parse_int(const std::string& field, std::size_t line_no, const std::string& col) {
    const double v = parse_number(field, line_no, col);
    if (v != static_cast<double>(static_cast<int>(v))) {
        throw DataError("line " + std::to_string(line_no) + ", column '" + col +
                        "': expected an integer, found '" + field + "'");
    }
    return static_cast<int>(v);
}

}  // namespace detail

/// Builds a dataset from bound columns. num_periods defaults to max(t) + 1.
inline RcsDataset to_dataset(const CsvTable& table, const ColumnBindings& b,
                             std::optional<int> num_periods = std::nullopt) {
    auto need = [&](const std::string& name) {
        auto idx = table.column(name);
        if (!idx) throw DataError("unknown column '" + name + "'");
        return *idx;
    };
    const std::size_t iy = need(b.outcome), iq = need(b.group), it = need(b.period);
    std::optional<std::size_t> iw, ic;
    if (!b.weight.empty()) iw = need(b.weight);
    if (!b.cluster.empty()) ic = need(b.cluster);
    std::vector<std::size_t> iwv;
    for (const auto& c : b.covariates) iwv.push_back(need(c));

    std::vector<Record> rows;
    rows.reserve(table.rows.size());
    int max_t = 0;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& f = table.rows[r];
        const std::size_t line_no = r + 2;
        Record rec;
        rec.y = detail::parse_number(f[iy], line_no, b.outcome);
        rec.q = detail::parse_int(f[iq], line_no, b.group);
        rec.t = detail::parse_int(f[it], line_no, b.period);
        if (iw) rec.weight = detail::parse_number(f[*iw], line_no, b.weight);
        if (ic) {
            if (f[*ic].empty()) {
                throw DataError("line " + std::to_string(line_no) + ", column '" + b.cluster +
                                "': missing value");
            }
            rec.cluster = f[*ic];
        }
        for (std::size_t k = 0; k < iwv.size(); ++k) {
            rec.w.push_back(detail::parse_number(f[iwv[k]], line_no, b.covariates[k]));
        }
        max_t = std::max(max_t, rec.t);
        rows.push_back(std::move(rec));
    }
    return RcsDataset(std::move(rows), num_periods.value_or(max_t + 1), b.covariates);
}

}  // namespace ldvdd::io
