#include "delaydim/history.hpp"

#include <algorithm>
#include <cmath>

#include "delaydim/errors.hpp"

namespace delaydim {

HistorySegment::HistorySegment(double tau, std::size_t delay_steps, std::size_t modes)
    : tau_(tau), delay_steps_(delay_steps), modes_(modes), values_((delay_steps + 1) * modes, 0.0) {
  if (!(tau > 0.0)) throw ConfigError("HistorySegment: tau must be positive");
  if (delay_steps == 0) throw ConfigError("HistorySegment: need at least one step per delay");
  if (modes == 0) throw ConfigError("HistorySegment: need at least one mode");
}

double HistorySegment::norm() const {
  double best = 0.0;
  for (std::size_t i = 0; i < points(); ++i) {
    double s = 0.0;
    for (double c : at(i)) s += c * c;
    best = std::max(best, s);
  }
  return std::sqrt(best);
}

bool HistorySegment::same_grid(const HistorySegment& other) const {
  return delay_steps_ == other.delay_steps_ && modes_ == other.modes_ && tau_ == other.tau_;
}

HistorySegment& HistorySegment::operator+=(const HistorySegment& other) {
  if (!same_grid(other)) throw ConfigError("HistorySegment: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

HistorySegment& HistorySegment::operator-=(const HistorySegment& other) {
  if (!same_grid(other)) throw ConfigError("HistorySegment: grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

HistorySegment& HistorySegment::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

HistorySegment operator+(HistorySegment a, const HistorySegment& b) { return a += b; }
HistorySegment operator-(HistorySegment a, const HistorySegment& b) { return a -= b; }
HistorySegment operator*(double s, HistorySegment a) { return a *= s; }

double distance(const HistorySegment& a, const HistorySegment& b) { return (a - b).norm(); }

}  // namespace delaydim
