#ifndef INTDIM_DATA_MATRIX_HPP
#define INTDIM_DATA_MATRIX_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace intdim {

/// N points in R^d stored row-major in 64-bit reals. Every value is finite.
class DataMatrix {
public:
    DataMatrix(std::size_t n_points, std::size_t n_dims, std::vector<double> values);

    /// Zero-filled matrix, for producers that fill rows in place before handing it out.
    static DataMatrix zeros(std::size_t n_points, std::size_t n_dims);

    std::size_t n_points() const noexcept { return n_points_; }
    std::size_t n_dims() const noexcept { return n_dims_; }

    std::span<const double> row(std::size_t i) const noexcept {
        return {values_.data() + i * n_dims_, n_dims_};
    }
    std::span<double> row(std::size_t i) noexcept { return {values_.data() + i * n_dims_, n_dims_}; }

    std::span<const double> values() const noexcept { return values_; }
    std::span<double> values() noexcept { return values_; }

    /// Re-checks the finiteness invariant after in-place writes.
    void validate() const;

private:
    DataMatrix(std::size_t n_points, std::size_t n_dims);

    std::size_t n_points_;
    std::size_t n_dims_;
    std::vector<double> values_;
};

} // namespace intdim

#endif
