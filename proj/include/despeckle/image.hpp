#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "despeckle/error.hpp"

namespace despeckle {

/// Dense row-major 2-D grid with top-left origin and no padding.
template <typename T>
class Grid {
 public:
  using value_type = T;

  Grid() = default;

  Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
    check_dims(width, height);
    data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
  }

  Grid(int width, int height, std::vector<T> data)
      : width_(width), height_(height), data_(std::move(data)) {
    check_dims(width, height);
    if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
      throw InvalidArgument("grid data length does not match width*height");
    }
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(int x, int y) noexcept {
    return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)];
  }
  const T& operator()(int x, int y) const noexcept {
    return data_[static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                 static_cast<std::size_t>(x)];
  }

  T& operator[](std::size_t i) noexcept { return data_[i]; }
  const T& operator[](std::size_t i) const noexcept { return data_[i]; }

  std::span<T> pixels() noexcept { return data_; }
  std::span<const T> pixels() const noexcept { return data_; }

  std::span<T> row(int y) noexcept {
    return std::span<T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }
  std::span<const T> row(int y) const noexcept {
    return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
  }

  bool same_dims(const Grid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  template <typename U>
  bool same_dims(const Grid<U>& other) const noexcept {
    return width_ == other.width() && height_ == other.height();
  }

  friend bool operator==(const Grid& a, const Grid& b) = default;

 private:
  static void check_dims(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw InvalidArgument("grid dimensions must be positive");
    }
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Real-valued intensity image; also used for any real 2-D grid.
using Image = Grid<double>;
using ComplexGrid = Grid<std::complex<double>>;

/// True when every pixel is finite.
bool all_finite(const Image& img) noexcept;
bool all_finite(const ComplexGrid& grid) noexcept;

double mean(const Image& img) noexcept;
double max_value(const Image& img) noexcept;
double min_value(const Image& img) noexcept;

// ---------------------------------------------------------------------------
// File formats

using Bytes = std::vector<std::uint8_t>;

/// Parses a P2 (ASCII) or P5 (binary) PGM with maxval 255 or 65535.
Image read_pgm(std::span<const std::uint8_t> bytes);

struct PgmEncoding {
  Bytes bytes;
  /// Number of pixels that were clamped into [0, maxval].
  std::size_t clamped = 0;
};

/// Clamps to [0, maxval] and rounds half-to-even.
PgmEncoding write_pgm(const Image& img, int maxval = 255, bool binary = true);

/// "DSPK" raw float: 16-byte header, then width*height binary32 LE.
Image read_rawf32(std::span<const std::uint8_t> bytes);
Bytes write_rawf32(const Image& img);

Bytes read_file(const std::string& path);
void write_file(const std::string& path, std::span<const std::uint8_t> bytes);

/// Reads either format, detected from the magic bytes.
Image load_image(const std::string& path);

/// Writes PGM when the path ends in ".pgm", DSPK raw float otherwise.
/// Returns the clamp count for PGM output (always 0 for raw).
std::size_t save_image(const std::string& path, const Image& img, int pgm_maxval = 255);

}  // namespace despeckle
