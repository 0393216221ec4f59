#include "sdnft/quality_model.hpp"

#include <algorithm>
#include <cmath>

#include "sdnft/errors.hpp"

namespace sdnft {

const char* to_string(Resolution resolution) {
  switch (resolution) {
    case Resolution::k1080p:
      return "1080p";
    case Resolution::k720p:
      return "720p";
    case Resolution::k360p:
      return "360p";
  }
  return "unknown";
}

Resolution parse_resolution(const std::string& text) {
  if (text == "1080p") return Resolution::k1080p;
  if (text == "720p") return Resolution::k720p;
  if (text == "360p") return Resolution::k360p;
  throw ConfigError("unknown resolution '" + text + "' (expected 1080p, 720p or 360p)");
}

QualityCoefficients quality_coefficients(Resolution resolution) {
  switch (resolution) {
    case Resolution::k1080p:
      return {-3.035, -0.5061, 1.022};
    case Resolution::k720p:
      return {-4.85, -0.647, 1.011};
    case Resolution::k360p:
      return {-17.53, -1.048, 0.9912};
  }
  throw ConfigError("unknown resolution");
}

const std::vector<uint32_t>& bitrate_ladder(Resolution resolution) {
  static const std::vector<uint32_t> k1080{100, 200, 600, 1000, 2000, 4000, 6000, 8000};
  static const std::vector<uint32_t> k720{100, 200, 400, 600, 800, 1000, 1500, 2000};
  static const std::vector<uint32_t> k360{100, 200, 400, 600, 800, 1000};
  switch (resolution) {
    case Resolution::k1080p:
      return k1080;
    case Resolution::k720p:
      return k720;
    case Resolution::k360p:
      return k360;
  }
  throw ConfigError("unknown resolution");
}

double video_quality(double bitrate_kbps, Resolution resolution) {
  if (!(bitrate_kbps > 0.0) || !std::isfinite(bitrate_kbps)) {
    throw ConfigError("bitrate must be a positive finite number");
  }
  const QualityCoefficients k = quality_coefficients(resolution);
  const double q = k.a * std::pow(bitrate_kbps, k.b) + k.c;
  return std::clamp(q, kMinQuality, 1.0);
}

}  // namespace sdnft
