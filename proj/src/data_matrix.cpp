#include "intdim/data_matrix.hpp"

#include <cmath>
#include <string>

#include "intdim/error.hpp"

namespace intdim {

DataMatrix::DataMatrix(std::size_t n_points, std::size_t n_dims)
    : n_points_(n_points), n_dims_(n_dims) {
    if (n_points == 0 || n_dims == 0) {
        throw Error(ErrorCode::InconsistentDims, "data matrix needs at least one point and one dimension");
    }
    if (n_dims > values_.max_size() / n_points) {
        throw Error(ErrorCode::InconsistentDims, "data matrix dimensions overflow");
    }
}

DataMatrix::DataMatrix(std::size_t n_points, std::size_t n_dims, std::vector<double> values)
    : DataMatrix(n_points, n_dims) {
    if (values.size() != n_points * n_dims) {
        throw Error(ErrorCode::InconsistentDims,
                    "expected " + std::to_string(n_points * n_dims) + " values, got " + std::to_string(values.size()));
    }
    values_ = std::move(values);
    validate();
}

DataMatrix DataMatrix::zeros(std::size_t n_points, std::size_t n_dims) {
    DataMatrix m(n_points, n_dims);
    m.values_.assign(n_points * n_dims, 0.0);
    return m;
}

void DataMatrix::validate() const {
    for (std::size_t idx = 0; idx < values_.size(); ++idx) {
        if (!std::isfinite(values_[idx])) {
            throw Error(ErrorCode::NonFiniteData, "non-finite value at row " + std::to_string(idx / n_dims_) +
                                                      ", column " + std::to_string(idx % n_dims_));
        }
    }
}

} // namespace intdim
