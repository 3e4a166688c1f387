#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "concept_align/error.hpp"

namespace concept_align {

// Row-major rows x cols array.
template <typename T>
class Dense {
 public:
  Dense() = default;
  Dense(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), values_(rows * cols, fill) {}
  Dense(std::size_t rows, std::size_t cols, std::vector<T> values)
      : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
      throw Error(ErrorKind::ShapeMismatch, "dense array: value count does not match shape");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  std::span<T> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const noexcept { return {values_.data() + r * cols_, cols_}; }

  std::span<T> flat() noexcept { return values_; }
  std::span<const T> flat() const noexcept { return values_; }

  bool operator==(const Dense&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> values_;
};

}  // namespace concept_align
