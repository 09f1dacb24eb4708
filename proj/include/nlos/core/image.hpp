#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "nlos/core/error.hpp"

namespace nlos {

/// Dense row-major (rows, cols, channels) image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int rows, int cols, int channels, T fill = T{})
      : rows_(rows), cols_(cols), channels_(channels),
        data_(static_cast<std::size_t>(rows) * cols * channels, fill) {
    NLOS_REQUIRE(rows >= 0 && cols >= 0 && channels >= 0, "image dimensions must be non-negative");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int channels() const { return channels_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& operator()(int r, int c, int ch = 0) { return data_[index(r, c, ch)]; }
  const T& operator()(int r, int c, int ch = 0) const { return data_[index(r, c, ch)]; }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }
  std::vector<T>& storage() { return data_; }
  const std::vector<T>& storage() const { return data_; }

  bool same_shape(const Image& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && channels_ == o.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t index(int r, int c, int ch) const {
    return (static_cast<std::size_t>(r) * cols_ + c) * channels_ + ch;
  }

  int rows_ = 0;
  int cols_ = 0;
  int channels_ = 0;
  std::vector<T> data_;
};

using ImageD = Image<double>;
using ImageF = Image<float>;

}  // namespace nlos
