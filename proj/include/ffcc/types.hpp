#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace ffcc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear RGB triple.
struct Rgb {
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// A point in log-chroma space: u = log(g/r), v = log(g/b).
struct Chroma {
  double u = 0.0;
  double v = 0.0;

  friend bool operator==(const Chroma&, const Chroma&) = default;
};

/// Square n x n grid of doubles, stored row-major. Row index i runs along u,
/// column index j along v. Indexing through wrap() is toroidal.
class Grid {
 public:
  Grid() = default;
  explicit Grid(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>(n) * n, fill) {
    if (n < 1) throw Error("Grid: side length must be positive");
  }

  int n() const { return n_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) { return data_[index(i, j)]; }
  double operator()(int i, int j) const { return data_[index(i, j)]; }

  double& wrap(int i, int j) { return (*this)(mod(i), mod(j)); }
  double wrap(int i, int j) const { return (*this)(mod(i), mod(j)); }

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  double sum() const {
    double s = 0.0;
    for (double x : data_) s += x;
    return s;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_ + j;
  }
  int mod(int k) const {
    int r = k % n_;
    return r < 0 ? r + n_ : r;
  }

  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace ffcc
