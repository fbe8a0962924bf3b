#include "fwmbs/interp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fwmbs/errors.hpp"

namespace fwmbs {

CubicTable::CubicTable(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
  if (x_.size() != y_.size()) throw ShapeError("interpolation table columns differ in length");
  if (x_.size() < 4) throw ShapeError("cubic interpolation needs at least 4 points");
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (!(x_[i] > x_[i - 1])) throw ShapeError("interpolation grid must be strictly increasing");
  h_ = (x_.back() - x_.front()) / static_cast<double>(x_.size() - 1);
  uniform_ = true;
  for (std::size_t i = 1; i < x_.size(); ++i)
    if (std::abs((x_[i] - x_[i - 1]) - h_) > 1e-9 * h_) {
      uniform_ = false;
      break;
    }
}

std::size_t CubicTable::stencil_start(double xq) const {
  if (!contains(xq))
    throw DomainError("interpolation query " + std::to_string(xq) + " outside table [" +
                      std::to_string(x_.front()) + ", " + std::to_string(x_.back()) + "]");
  std::size_t i;
  if (uniform_) {
    i = static_cast<std::size_t>(std::floor((xq - x_.front()) / h_));
    i = std::min(i, x_.size() - 2);
  } else {
    i = static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin());
    i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
  }
  // interval [i, i+1]; stencil i-1..i+2 clamped to the table
  std::size_t s = i == 0 ? 0 : i - 1;
  return std::min(s, x_.size() - 4);
}

double CubicTable::operator()(double xq) const {
  const std::size_t s = stencil_start(xq);
  double sum = 0.0;
  for (std::size_t j = s; j < s + 4; ++j) {
    double l = 1.0;
    for (std::size_t k = s; k < s + 4; ++k)
      if (k != j) l *= (xq - x_[k]) / (x_[j] - x_[k]);
    sum += l * y_[j];
  }
  return sum;
}

double CubicTable::derivative(double xq) const {
  const std::size_t s = stencil_start(xq);
  double sum = 0.0;
  for (std::size_t j = s; j < s + 4; ++j) {
    double dl = 0.0;
    for (std::size_t m = s; m < s + 4; ++m) {
      if (m == j) continue;
      double term = 1.0 / (x_[j] - x_[m]);
      for (std::size_t k = s; k < s + 4; ++k)
        if (k != j && k != m) term *= (xq - x_[k]) / (x_[j] - x_[k]);
      dl += term;
    }
    sum += dl * y_[j];
  }
  return sum;
}

}  // namespace fwmbs
