// Throughput-based adaptive bitrate selection.
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "sdnft/sim_time.hpp"

namespace sdnft {

struct AbrConfig {
  double ewma_alpha = 0.3;
  double safety_factor = 0.9;
  // Upward switches need at least this many segments buffered.
  unsigned up_switch_segments = 2;
  SimTime max_buffer = SimTime::from_s(30);
};

struct AbrState {
  // Smoothed throughput estimate; absent before the first download.
  std::optional<double> throughput_bps;
  size_t current = 0;
  SimTime buffer;
};

// Folds one download-throughput sample into the estimate; the first sample
// initialises it.
void abr_update_throughput(AbrState& state, double sample_bps, const AbrConfig& config);

// Highest representation whose bitrate fits within safety * estimate (the
// lowest if none fits). An upward move is refused while the buffer holds
// fewer than `up_switch_segments` segments.
size_t abr_select(const AbrState& state, const std::vector<uint32_t>& ladder_kbps,
                  SimTime segment_duration, const AbrConfig& config);

}  // namespace sdnft
