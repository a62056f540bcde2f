#include "lsmc/io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace lsmc {

static_assert(std::endian::native == std::endian::little, "artifact formats assume little-endian");

namespace {

// Guards against absurd headers from corrupt files.
constexpr std::uint64_t kMaxEntries = std::uint64_t{1} << 34;

void write_header(std::ostream& os, std::array<std::uint64_t, 3> header) {
    os.write(reinterpret_cast<const char*>(header.data()), sizeof(header));
}

std::array<std::uint64_t, 3> read_header(std::istream& is, const char* what) {
    std::array<std::uint64_t, 3> header{};
    if (!is.read(reinterpret_cast<char*>(header.data()), sizeof(header))) {
        throw std::runtime_error(std::string(what) + ": truncated header");
    }
    return header;
}

void write_values(std::ostream& os, const std::vector<double>& values) {
    os.write(reinterpret_cast<const char*>(values.data()),
             static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!os) throw std::runtime_error("failed to write artifact values");
}

void read_values(std::istream& is, std::vector<double>& values, const char* what) {
    if (!is.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double)))) {
        throw std::runtime_error(std::string(what) + ": truncated values");
    }
    if (is.peek() != std::char_traits<char>::eof()) {
        throw std::runtime_error(std::string(what) + ": trailing bytes after values");
    }
}

std::uint64_t checked_product(std::array<std::uint64_t, 3> h, const char* what) {
    if (h[0] == 0 || h[1] == 0 || h[2] == 0) throw std::runtime_error(std::string(what) + ": zero dimension in header");
    if (h[0] > kMaxEntries || h[1] > kMaxEntries || h[2] > kMaxEntries ||
        h[0] * h[1] > kMaxEntries || h[0] * h[1] * h[2] > kMaxEntries) {
        throw std::runtime_error(std::string(what) + ": header dimensions too large");
    }
    return h[0] * h[1] * h[2];
}

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

bool is_csv(const std::filesystem::path& file) { return file.extension() == ".csv"; }

}  // namespace

void write_panel_binary(const PathPanel& panel, std::ostream& os) {
    write_header(os, {panel.n_path(), panel.dim(), panel.n_dec()});
    write_values(os, panel.data().values());
}

PathPanel read_panel_binary(std::istream& is) {
    const auto h = read_header(is, "panel");
    checked_product(h, "panel");
    Cube data(h[0], h[1], h[2]);
    read_values(is, data.values(), "panel");
    for (double v : data.values()) {
        if (!std::isfinite(v)) throw std::runtime_error("panel: non-finite value");
    }
    return PathPanel(std::move(data));
}

void write_panel_csv(const PathPanel& panel, std::ostream& os) {
    os << "n_path,dim,n_dec\n" << panel.n_path() << ',' << panel.dim() << ',' << panel.n_dec() << '\n';
    for (std::size_t i = 0; i < panel.n_path(); ++i) {
        for (std::size_t j = 0; j < panel.dim(); ++j) {
            for (std::size_t k = 0; k < panel.n_dec(); ++k) {
                if (k > 0) os << ',';
                os << format_double(panel(i, j, k));
            }
            os << '\n';
        }
    }
    if (!os) throw std::runtime_error("failed to write panel CSV");
}

PathPanel read_panel_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != "n_path,dim,n_dec") {
        throw std::runtime_error("panel CSV: missing 'n_path,dim,n_dec' header");
    }
    std::array<std::uint64_t, 3> h{};
    {
        if (!std::getline(is, line)) throw std::runtime_error("panel CSV: missing dimensions");
        std::istringstream ls(line);
        char c1 = 0, c2 = 0;
        if (!(ls >> h[0] >> c1 >> h[1] >> c2 >> h[2]) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("panel CSV: malformed dimensions line");
        }
    }
    checked_product(h, "panel CSV");
    PathPanel panel(h[0], h[1], h[2]);
    for (std::size_t i = 0; i < h[0]; ++i) {
        for (std::size_t j = 0; j < h[1]; ++j) {
            if (!std::getline(is, line)) throw std::runtime_error("panel CSV: missing rows");
            std::istringstream ls(line);
            std::string cell;
            std::size_t k = 0;
            while (std::getline(ls, cell, ',')) {
                if (k >= h[2]) throw std::runtime_error("panel CSV: too many values in a row");
                std::size_t used = 0;
                double v = 0.0;
                try {
                    v = std::stod(cell, &used);
                } catch (const std::exception&) {
                    throw std::runtime_error("panel CSV: bad number '" + cell + "'");
                }
                if (used != cell.size() || !std::isfinite(v)) {
                    throw std::runtime_error("panel CSV: bad number '" + cell + "'");
                }
                panel(i, j, k++) = v;
            }
            if (k != h[2]) throw std::runtime_error("panel CSV: too few values in a row");
        }
    }
    return panel;
}

void write_fit_binary(const ContinuationFit& fit, std::ostream& os) {
    write_header(os, {fit.n_dec(), fit.n_pos(), fit.n_basis()});
    write_values(os, fit.data().values());
}

ContinuationFit read_fit_binary(std::istream& is) {
    const auto h = read_header(is, "fit");
    checked_product(h, "fit");
    if (h[0] < 2) throw std::runtime_error("fit: n_dec must be at least 2");
    Cube coeffs(h[0] - 1, h[1], h[2]);
    read_values(is, coeffs.values(), "fit");
    for (double v : coeffs.values()) {
        if (!std::isfinite(v)) throw std::runtime_error("fit: non-finite coefficient");
    }
    return ContinuationFit(std::move(coeffs));
}

void write_bounds_csv(const BoundResult& result, std::ostream& os) {
    os << "path,position,lower,upper\n";
    for (Eigen::Index i = 0; i < result.lower.rows(); ++i) {
        for (Eigen::Index p = 0; p < result.lower.cols(); ++p) {
            os << i << ',' << p << ',' << format_double(result.lower(i, p)) << ','
               << format_double(result.upper(i, p)) << '\n';
        }
    }
}

void save_panel(const PathPanel& panel, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    if (is_csv(file)) {
        write_panel_csv(panel, os);
    } else {
        write_panel_binary(panel, os);
    }
}

PathPanel load_panel(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open " + file.string());
    return is_csv(file) ? read_panel_csv(is) : read_panel_binary(is);
}

void save_fit(const ContinuationFit& fit, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + file.string() + " for writing");
    write_fit_binary(fit, os);
}

ContinuationFit load_fit(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open fit artifact " + file.string());
    return read_fit_binary(is);
}

}  // namespace lsmc
