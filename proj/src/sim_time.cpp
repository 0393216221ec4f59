#include "sdnft/sim_time.hpp"

#include <cmath>

#include <fmt/format.h>

namespace sdnft {

SimTime SimTime::from_seconds(double s) {
  return SimTime(static_cast<int64_t>(std::llround(s * 1e6)));
}

std::string SimTime::to_string() const {
  const int64_t mag = us_ < 0 ? -us_ : us_;
  return fmt::format("{}{}.{:06d}s", us_ < 0 ? "-" : "", mag / 1000000,
                     mag % 1000000);
}

}  // namespace sdnft
