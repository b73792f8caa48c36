#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "seterm/rng.hpp"

namespace seterm {

// n sample points in [0,1]^d, stored row-major in a stable index order.
// Every downstream subset refers to these indices.
class PointCloud {
  public:
    PointCloud(std::size_t dim, std::vector<double> coords)
        : dim_(dim), coords_(std::move(coords)) {
        if (dim_ == 0) throw std::invalid_argument("PointCloud: dim must be positive");
        if (coords_.empty() || coords_.size() % dim_ != 0)
            throw std::invalid_argument("PointCloud: coordinate count not a multiple of dim");
        for (double c : coords_)
            if (!(c >= 0.0 && c <= 1.0))
                throw std::invalid_argument("PointCloud: coordinate outside [0,1]");
    }

    std::size_t size() const { return coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }

    double coord(std::size_t i, std::size_t k) const { return coords_[i * dim_ + k]; }
    const double* point(std::size_t i) const { return coords_.data() + i * dim_; }

    bool dominates(std::size_t i, std::size_t j) const {
        // point_j <= point_i componentwise
        for (std::size_t k = 0; k < dim_; ++k)
            if (coord(j, k) > coord(i, k)) return false;
        return true;
    }

    static PointCloud uniform(std::size_t n, std::size_t dim, RngStream& rng) {
        std::vector<double> c(n * dim);
        for (double& x : c) x = rng.uniform();
        return PointCloud(dim, std::move(c));
    }

    // CSV: one row per point, `x1,...,xd`.
    void write_csv(std::ostream& os) const {
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < dim_; ++k) {
                if (k) os << ',';
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.17g", coord(i, k));
                os << buf;
            }
            os << '\n';
        }
    }

    static PointCloud read_csv(std::istream& is) {
        std::vector<double> coords;
        std::size_t dim = 0;
        std::string line;
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::stringstream ss(line);
            std::string cell;
            std::size_t this_dim = 0;
            while (std::getline(ss, cell, ',')) {
                coords.push_back(std::stod(cell));
                ++this_dim;
            }
            if (dim == 0)
                dim = this_dim;
            else if (dim != this_dim)
                throw std::invalid_argument("PointCloud CSV: ragged rows");
        }
        if (dim == 0) throw std::invalid_argument("PointCloud CSV: no data");
        return PointCloud(dim, std::move(coords));
    }

    static PointCloud read_csv_file(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw std::invalid_argument("cannot open " + path);
        return read_csv(f);
    }

  private:
    std::size_t dim_;
    std::vector<double> coords_; // row-major
};

} // namespace seterm
