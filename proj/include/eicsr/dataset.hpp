#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace eicsr {

// Column-major tabular data: `columns[j]` holds feature j, `target` holds y.
// All columns have the same length `rows()`.
struct Dataset {
    std::vector<std::vector<double>> columns;
    std::vector<double> target;
    std::vector<std::string> names; // feature names; empty if unnamed

    std::size_t rows() const { return target.size(); }
    std::size_t num_features() const { return columns.size(); }
};

// Reads a CSV file. The first line is treated as a header when any cell fails
// numeric parsing; otherwise it is data. `target_column` selects y by name or
// (when empty) the last column is used. Rows containing unparseable or
// non-finite cells are dropped. Throws `Error` on I/O failure and
// `InsufficientData` if fewer than two usable rows remain.
Dataset load_csv(const std::string& path, const std::string& target_column = "");

// Parses CSV from an in-memory string; same semantics as `load_csv`.
Dataset parse_csv(const std::string& text, const std::string& target_column = "");

// Synthetic design matrix: `rows` samples of `num_vars` features drawn
// i.i.d. U(lo, hi) from a deterministic stream keyed by `seed`. The target
// is left empty (size `rows`, zero-filled) for callers that evaluate their
// own ground truth.
Dataset uniform_dataset(std::size_t rows, int num_vars, double lo, double hi,
                        std::uint64_t seed);

} // namespace eicsr
