#include "sdnft/abr.hpp"

#include "sdnft/errors.hpp"

namespace sdnft {

void abr_update_throughput(AbrState& state, double sample_bps, const AbrConfig& config) {
  if (!state.throughput_bps) {
    state.throughput_bps = sample_bps;
    return;
  }
  state.throughput_bps =
      config.ewma_alpha * sample_bps + (1.0 - config.ewma_alpha) * *state.throughput_bps;
}

size_t abr_select(const AbrState& state, const std::vector<uint32_t>& ladder_kbps,
                  SimTime segment_duration, const AbrConfig& config) {
  if (ladder_kbps.empty()) throw ConfigError("empty bitrate ladder");
  size_t target = 0;
  if (state.throughput_bps) {
    const double budget = config.safety_factor * *state.throughput_bps;
    for (size_t i = 0; i < ladder_kbps.size(); ++i) {
      if (static_cast<double>(ladder_kbps[i]) * 1000.0 <= budget) target = i;
    }
  }
  if (target > state.current &&
      state.buffer < segment_duration * static_cast<int64_t>(config.up_switch_segments)) {
    target = state.current;
  }
  return target;
}

}  // namespace sdnft
