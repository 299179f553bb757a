#include "tsaae/matrix.hpp"

#include "tsaae/error.hpp"

namespace tsaae {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw ShapeError("matrix buffer of " + std::to_string(data_.size()) + " values does not match " +
                     std::to_string(rows_) + "x" + std::to_string(cols_));
  }
}

Matrix Matrix::slice_rows(std::size_t first, std::size_t count) const {
  if (first + count > rows_) throw ShapeError("row slice out of range");
  Matrix out(count, cols_);
  std::copy(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
            data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_), out.data_.begin());
  return out;
}

}  // namespace tsaae
