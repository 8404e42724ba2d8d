#include "hazval/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hazval/errors.hpp"

namespace hazval {

namespace {

struct Row {
    int line;
    std::vector<std::string> fields;
};

std::vector<Row> read_rows(const std::string& path, std::size_t columns,
                           const char* schema) {
    std::ifstream in(path);
    if (!in) throw parse_error(path + ": cannot open file");
    std::vector<Row> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        Row row{lineno, {}};
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) row.fields.push_back(field);
        if (lineno == 1) continue;  // header
        if (row.fields.size() != columns)
            throw parse_error(path + " line " + std::to_string(lineno) + ": expected " +
                              schema);
        rows.push_back(std::move(row));
    }
    if (lineno == 0) throw parse_error(path + ": empty file");
    if (rows.empty()) throw parse_error(path + ": no data rows");
    return rows;
}

double parse_number(const std::string& field, const std::string& path, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(field, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
        ++used;
    if (used != field.size() || !std::isfinite(v))
        throw parse_error(path + " line " + std::to_string(line) + ": bad number '" +
                          field + "'");
    return v;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
    if (!out) throw parse_error(path + ": cannot open file for writing");
    return out;
}

}  // namespace

GridSample load_grid_csv(const std::string& path) {
    const std::vector<Row> rows = read_rows(path, 3, "time,occurrences,exposure");
    std::vector<double> times, occ, exp_;
    for (const Row& row : rows) {
        times.push_back(parse_number(row.fields[0], path, row.line));
        occ.push_back(parse_number(row.fields[1], path, row.line));
        exp_.push_back(parse_number(row.fields[2], path, row.line));
        if (occ.back() < 0.0 || exp_.back() < 0.0)
            throw validation_error(path + " line " + std::to_string(row.line) +
                                   ": negative entry");
        if (occ.back() > 0.0 && exp_.back() == 0.0)
            throw validation_error(path + " line " + std::to_string(row.line) +
                                   ": occurrences without exposure");
    }
    const int R = static_cast<int>(times.size());
    if (R < 2) throw validation_error(path + ": need at least 2 grid rows");
    const double delta = times[1] - times[0];
    if (!(delta > 0.0)) throw validation_error(path + ": times must increase");
    for (int r = 1; r < R; ++r)
        if (std::abs(times[r] - times[r - 1] - delta) > 1e-9 * std::abs(delta))
            throw validation_error(path + " line " + std::to_string(rows[r].line) +
                                   ": non-uniform time spacing");
    GridSample s = make_grid(times[0] - delta, times[R - 1] + delta, R, 0);
    s.occurrences = std::move(occ);
    s.exposures = std::move(exp_);
    s.validate();
    return s;
}

std::vector<IndividualRecord> load_records_csv(const std::string& path) {
    const std::vector<Row> rows = read_rows(path, 3, "entry,exit,event");
    std::vector<IndividualRecord> out;
    for (const Row& row : rows) {
        IndividualRecord rec;
        rec.entry = parse_number(row.fields[0], path, row.line);
        rec.exit = parse_number(row.fields[1], path, row.line);
        const double e = parse_number(row.fields[2], path, row.line);
        if (e != 0.0 && e != 1.0)
            throw parse_error(path + " line " + std::to_string(row.line) +
                              ": event must be 0 or 1");
        rec.event = e == 1.0;
        if (!(rec.entry < rec.exit))
            throw validation_error(path + " line " + std::to_string(row.line) +
                                   ": entry must precede exit");
        out.push_back(rec);
    }
    return out;
}

RunOffTriangle load_triangle_csv(const std::string& path, int m) {
    const std::vector<Row> rows = read_rows(path, 3, "x,z,count");
    struct Cell {
        int x, z, line;
        double count;
    };
    std::vector<Cell> cells;
    int max_diag = 0;
    for (const Row& row : rows) {
        const double xd = parse_number(row.fields[0], path, row.line);
        const double zd = parse_number(row.fields[1], path, row.line);
        const double c = parse_number(row.fields[2], path, row.line);
        const int x = static_cast<int>(xd), z = static_cast<int>(zd);
        if (xd != x || zd != z || x < 1 || z < 1)
            throw parse_error(path + " line " + std::to_string(row.line) +
                              ": x and z must be positive integers");
        if (c < 0.0)
            throw validation_error(path + " line " + std::to_string(row.line) +
                                   ": negative count");
        cells.push_back({x, z, row.line, c});
        max_diag = std::max(max_diag, x + z);
    }
    RunOffTriangle tri;
    tri.m = m > 0 ? m : max_diag;
    for (const Cell& c : cells) {
        if (c.x + c.z > tri.m)
            throw validation_error(path + " line " + std::to_string(c.line) +
                                   ": cell outside the upper triangle");
        tri.counts[{c.x, c.z}] += c.count;
    }
    tri.validate();
    return tri;
}

std::vector<double> load_weights_csv(const std::string& path) {
    const std::vector<Row> rows = read_rows(path, 1, "weight");
    std::vector<double> out;
    for (const Row& row : rows) {
        out.push_back(parse_number(row.fields[0], path, row.line));
        if (out.back() < 0.0)
            throw validation_error(path + " line " + std::to_string(row.line) +
                                   ": negative weight");
    }
    return out;
}

void write_hazard_csv(const std::string& path, const HazardEstimate& estimate) {
    std::ofstream out = open_out(path);
    const bool sided = !estimate.side_mask.empty();
    out << (sided ? "time,hazard,side\n" : "time,hazard\n");
    for (int r = 0; r < estimate.R; ++r) {
        out << fmt(estimate.time(r)) << ',' << fmt(estimate.values[r]);
        if (sided) out << ',' << int(estimate.side_mask[r]);
        out << '\n';
    }
}

void write_trace_csv(const std::string& path, const SelectionResult& result) {
    std::ofstream out = open_out(path);
    out << "bandwidth,score\n";
    for (const auto& [b, score] : result.score_trace)
        out << fmt(b) << ',' << fmt(score) << '\n';
}

void write_forecast_csv(const std::string& path, const Forecast& fc) {
    std::ofstream out = open_out(path);
    out << "calendar_period,forecast\n";
    for (std::size_t i = 0; i < fc.by_calendar_period.size(); ++i)
        out << fc.first_period + static_cast<int>(i) << ','
            << fmt(fc.by_calendar_period[i]) << '\n';
    out << "total," << fmt(fc.grand_total) << '\n';
}

}  // namespace hazval
