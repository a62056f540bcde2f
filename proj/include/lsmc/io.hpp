// Flat artifact formats.
//
// Binary layout (little-endian): three uint64 header fields followed by the
// float64 values in row-major order.
//   panel: (n_path, dim, n_dec), values [i][j][k]
//   fit:   (n_dec, n_pos, m),    values [t][p][k] for t < n_dec - 1
// CSV panel layout: a header line "n_path,dim,n_dec", a line with those three
// integers, then one line per (i, j) holding the n_dec values of Z[i][j][.].
// Values are written with 17 significant digits so they read back exactly.
#pragma once

#include <filesystem>
#include <iosfwd>

#include "lsmc/dual.hpp"
#include "lsmc/lsm.hpp"
#include "lsmc/simulate.hpp"

namespace lsmc {

void write_panel_binary(const PathPanel& panel, std::ostream& os);
PathPanel read_panel_binary(std::istream& is);
void write_panel_csv(const PathPanel& panel, std::ostream& os);
PathPanel read_panel_csv(std::istream& is);

void write_fit_binary(const ContinuationFit& fit, std::ostream& os);
ContinuationFit read_fit_binary(std::istream& is);

// Rows "path,position,lower,upper".
void write_bounds_csv(const BoundResult& result, std::ostream& os);

// File helpers; the format follows the extension (".csv" or binary).
void save_panel(const PathPanel& panel, const std::filesystem::path& file);
PathPanel load_panel(const std::filesystem::path& file);
void save_fit(const ContinuationFit& fit, const std::filesystem::path& file);
ContinuationFit load_fit(const std::filesystem::path& file);

}  // namespace lsmc
