#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace delaydim {

/// Element of the phase space C([-tau, 0], H): sine-basis coefficient vectors
/// on the uniform grid theta_i = -tau + i h, h = tau / delay_steps.
/// Index 0 is theta = -tau, index delay_steps is theta = 0.
class HistorySegment {
 public:
  HistorySegment() = default;
  HistorySegment(double tau, std::size_t delay_steps, std::size_t modes);

  double tau() const { return tau_; }
  std::size_t delay_steps() const { return delay_steps_; }
  double step() const { return tau_ / static_cast<double>(delay_steps_); }
  std::size_t modes() const { return modes_; }
  std::size_t points() const { return delay_steps_ + 1; }
  double theta(std::size_t i) const { return -tau_ + static_cast<double>(i) * step(); }

  std::span<double> at(std::size_t i) { return {values_.data() + i * modes_, modes_}; }
  std::span<const double> at(std::size_t i) const { return {values_.data() + i * modes_, modes_}; }
  double& operator()(std::size_t i, std::size_t k) { return values_[i * modes_ + k]; }
  double operator()(std::size_t i, std::size_t k) const { return values_[i * modes_ + k]; }

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  /// sup over grid points of the Euclidean (= L2) norm of the coefficients.
  double norm() const;
  bool same_grid(const HistorySegment& other) const;

  HistorySegment& operator+=(const HistorySegment& other);
  HistorySegment& operator-=(const HistorySegment& other);
  HistorySegment& operator*=(double s);

 private:
  double tau_ = 0.0;
  std::size_t delay_steps_ = 0;
  std::size_t modes_ = 0;
  std::vector<double> values_;
};

HistorySegment operator+(HistorySegment a, const HistorySegment& b);
HistorySegment operator-(HistorySegment a, const HistorySegment& b);
HistorySegment operator*(double s, HistorySegment a);

double distance(const HistorySegment& a, const HistorySegment& b);

}  // namespace delaydim
