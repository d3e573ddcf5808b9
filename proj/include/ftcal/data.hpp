#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <random>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ftcal/errors.hpp"
#include "ftcal/types.hpp"

namespace ftcal {

// Paired raw-signal / expected-wrench dataset. Gauge counts and temperature
// are kept separate so models with and without the temperature input can share
// one file.
struct Dataset {
    std::vector<RawSample> inputs;           // 6 gauge channels each (bit counts)
    std::vector<double> temperatures;        // degC; empty if the source had no temp column
    std::vector<Wrench> outputs;
    std::vector<double> timestamps;          // s; empty if absent
    std::string source;
    std::string label;

    std::size_t size() const { return inputs.size(); }
    bool has_temperature() const { return !temperatures.empty(); }

    // Model-facing input rows of width nu: the 6 gauge channels, plus the
    // temperature as channel 7 when nu = 7.
    std::vector<RawSample> model_inputs(int nu) const {
        if (nu != 6 && nu != 7)
            throw SpecError("datasets provide 6 gauge channels (+1 optional temperature); "
                            "nu must be 6 or 7");
        if (nu == 7 && !has_temperature())
            throw DataError("model requires the temperature input (nu=7) but the dataset has "
                            "no temp column");
        std::vector<RawSample> rows;
        rows.reserve(inputs.size());
        for (std::size_t k = 0; k < inputs.size(); ++k) {
            RawSample r = inputs[k];
            if (nu == 7) r.push_back(temperatures[k]);
            rows.push_back(std::move(r));
        }
        return rows;
    }
};

namespace detail {

inline double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
    double v = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    while (first < last && (*first == ' ' || *first == '\t')) ++first;
    auto [p, ec] = std::from_chars(first, last, v);
    while (p < last && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
    if (ec != std::errc() || p != last)
        throw ParseError("non-numeric cell at row " + std::to_string(row) + ", column " + col);
    return v;
}

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    return cells;
}

}  // namespace detail

// CSV with a mandatory header. Required columns: u1..u6, fx, fy, fz, tx, ty,
// tz. Optional: temp, time. Extra columns are ignored.
inline Dataset load_dataset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open dataset file: " + path);
    std::string header;
    if (!std::getline(in, header)) throw ParseError("empty dataset file: " + path);
    auto names = detail::split_line(header);

    auto find = [&](const std::string& name) -> std::optional<std::size_t> {
        auto it = std::find(names.begin(), names.end(), name);
        if (it == names.end()) return std::nullopt;
        return static_cast<std::size_t>(it - names.begin());
    };
    const std::vector<std::string> required = {"u1", "u2", "u3", "u4", "u5", "u6",
                                               "fx", "fy", "fz", "tx", "ty", "tz"};
    std::vector<std::size_t> idx;
    for (const auto& name : required) {
        auto i = find(name);
        if (!i) throw SchemaError(SchemaError::ColumnTag{}, name);
        idx.push_back(*i);
    }
    auto temp_idx = find("temp");
    auto time_idx = find("time");

    Dataset d;
    d.source = path;
    std::string line;
    std::size_t row = 0;
    double prev_time = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        auto cells = detail::split_line(line);
        if (cells.size() < names.size())
            throw ParseError("row " + std::to_string(row) + " has " +
                             std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(names.size()));
        RawSample u(6);
        for (int c = 0; c < 6; ++c) u[c] = detail::parse_cell(cells[idx[c]], row, required[c]);
        Wrench w;
        for (int c = 0; c < 6; ++c)
            w[c] = detail::parse_cell(cells[idx[6 + c]], row, required[6 + c]);
        for (double v : u)
            if (!std::isfinite(v)) throw DataError("non-finite input at row " + std::to_string(row));
        for (int c = 0; c < 6; ++c)
            if (!std::isfinite(w[c]))
                throw DataError("non-finite wrench at row " + std::to_string(row));
        if (temp_idx) {
            double t = detail::parse_cell(cells[*temp_idx], row, "temp");
            if (!std::isfinite(t))
                throw DataError("non-finite temperature at row " + std::to_string(row));
            d.temperatures.push_back(t);
        }
        if (time_idx) {
            double t = detail::parse_cell(cells[*time_idx], row, "time");
            if (t <= prev_time)
                throw DataError("non-monotone timestamp at row " + std::to_string(row));
            prev_time = t;
            d.timestamps.push_back(t);
        }
        d.inputs.push_back(std::move(u));
        d.outputs.push_back(w);
    }
    return d;
}

inline void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write dataset file: " + path);
    out.precision(17);
    if (!d.timestamps.empty()) out << "time,";
    out << "u1,u2,u3,u4,u5,u6";
    if (d.has_temperature()) out << ",temp";
    out << ",fx,fy,fz,tx,ty,tz\n";
    for (std::size_t k = 0; k < d.size(); ++k) {
        if (!d.timestamps.empty()) out << d.timestamps[k] << ",";
        for (int c = 0; c < 6; ++c) out << d.inputs[k][c] << (c < 5 ? "," : "");
        if (d.has_temperature()) out << "," << d.temperatures[k];
        for (int c = 0; c < 6; ++c) out << "," << d.outputs[k][c];
        out << "\n";
    }
}

enum class SplitMode { Chronological, Random };

namespace detail {

// Fisher-Yates with an explicit draw so splits are reproducible regardless of
// the standard library's shuffle implementation.
inline std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

inline Dataset take(const Dataset& d, const std::vector<std::size_t>& idx, std::size_t from,
                    std::size_t to) {
    Dataset out;
    out.source = d.source;
    out.label = d.label;
    for (std::size_t i = from; i < to; ++i) {
        std::size_t k = idx[i];
        out.inputs.push_back(d.inputs[k]);
        out.outputs.push_back(d.outputs[k]);
        if (d.has_temperature()) out.temperatures.push_back(d.temperatures[k]);
        if (!d.timestamps.empty()) out.timestamps.push_back(d.timestamps[k]);
    }
    return out;
}

}  // namespace detail

// Disjoint train/validation cover. Chronological mode cuts at the fraction
// boundary preserving order; random mode shuffles with the seed first.
inline std::pair<Dataset, Dataset> split_dataset(const Dataset& d, double fraction,
                                                 SplitMode mode, std::uint64_t seed = 0) {
    if (d.size() == 0) throw InsufficientDataError("cannot split an empty dataset");
    if (!(fraction > 0 && fraction < 1))
        throw SpecError("split fraction must lie strictly between 0 and 1");
    std::vector<std::size_t> idx(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) idx[i] = i;
    if (mode == SplitMode::Random) idx = detail::shuffled_indices(d.size(), seed);
    auto cut = static_cast<std::size_t>(fraction * static_cast<double>(d.size()));
    return {detail::take(d, idx, 0, cut), detail::take(d, idx, cut, d.size())};
}

// FNV-1a over the raw bytes of the dataset's numeric content; stored in model
// metadata for provenance.
inline std::string dataset_hash(const Dataset& d) {
    std::uint64_t h = 14695981039346656037ull;
    auto mix = [&](double v) {
        std::uint64_t bits;
        static_assert(sizeof(bits) == sizeof(v));
        std::memcpy(&bits, &v, sizeof(bits));
        for (int i = 0; i < 8; ++i) {
            h ^= (bits >> (8 * i)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    for (std::size_t k = 0; k < d.size(); ++k) {
        for (double v : d.inputs[k]) mix(v);
        for (int c = 0; c < 6; ++c) mix(d.outputs[k][c]);
        if (d.has_temperature()) mix(d.temperatures[k]);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace ftcal
