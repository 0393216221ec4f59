// Video-quality model f(x) = a * x^b + c over bitrate (kbit/s) per resolution.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sdnft {

enum class Resolution : uint8_t { k1080p, k720p, k360p };
const char* to_string(Resolution resolution);
Resolution parse_resolution(const std::string& text);

struct QualityCoefficients {
  double a;
  double b;
  double c;
};

// Smallest value returned by video_quality; keeps results inside (0, 1].
inline constexpr double kMinQuality = 1e-6;

QualityCoefficients quality_coefficients(Resolution resolution);
// Representation bitrates (kbit/s) in ascending order.
const std::vector<uint32_t>& bitrate_ladder(Resolution resolution);
// Clamped to [kMinQuality, 1]; throws ConfigError for a non-positive bitrate.
double video_quality(double bitrate_kbps, Resolution resolution);

}  // namespace sdnft
