// Simulated time: an integer count of microseconds.
#pragma once

#include <compare>
#include <cstdint>
#include <limits>
#include <string>

namespace sdnft {

class SimTime {
 public:
  constexpr SimTime() = default;

  static constexpr SimTime from_us(int64_t us) { return SimTime(us); }
  static constexpr SimTime from_ms(int64_t ms) { return SimTime(ms * 1000); }
  static constexpr SimTime from_s(int64_t s) { return SimTime(s * 1000000); }
  // Rounds to the nearest microsecond.
  static SimTime from_seconds(double s);
  static constexpr SimTime zero() { return SimTime(0); }
  static constexpr SimTime infinity() {
    return SimTime(std::numeric_limits<int64_t>::max());
  }

  constexpr int64_t us() const { return us_; }
  constexpr double ms() const { return static_cast<double>(us_) / 1e3; }
  constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime o) const { return SimTime(us_ + o.us_); }
  constexpr SimTime operator-(SimTime o) const { return SimTime(us_ - o.us_); }
  constexpr SimTime& operator+=(SimTime o) {
    us_ += o.us_;
    return *this;
  }
  constexpr SimTime& operator-=(SimTime o) {
    us_ -= o.us_;
    return *this;
  }
  constexpr SimTime operator*(int64_t k) const { return SimTime(us_ * k); }

  std::string to_string() const;

 private:
  constexpr explicit SimTime(int64_t us) : us_(us) {}
  int64_t us_ = 0;
};

constexpr SimTime operator*(int64_t k, SimTime t) { return t * k; }

}  // namespace sdnft
