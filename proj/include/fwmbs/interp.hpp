#pragma once

#include <span>
#include <vector>

namespace fwmbs {

/// Piecewise-cubic interpolation through the four nearest table points
/// (local Lagrange). Reproduces cubics exactly; queries outside [x0, xN-1]
/// throw DomainError. The grid must be strictly increasing, >= 4 points.
class CubicTable {
 public:
  CubicTable() = default;
  CubicTable(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;
  /// Derivative of the local cubic at xq.
  double derivative(double xq) const;

  bool contains(double xq) const { return !x_.empty() && xq >= x_.front() && xq <= x_.back(); }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }
  std::span<const double> x() const { return x_; }
  std::span<const double> y() const { return y_; }

 private:
  std::size_t stencil_start(double xq) const;

  std::vector<double> x_;
  std::vector<double> y_;
  bool uniform_ = false;
  double h_ = 0.0;
};

}  // namespace fwmbs
