#include "adfs/error.hpp"

namespace adfs {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kCoincidentSourceSensor: return "CoincidentSourceSensor";
    case ErrorCode::kInvalidPresetParams: return "InvalidPresetParams";
    case ErrorCode::kNoiseSpansFullSpace: return "NoiseSpansFullSpace";
    case ErrorCode::kSignalInNoiseSpace: return "SignalInNoiseSpace";
    case ErrorCode::kInvalidRatio: return "InvalidRatio";
    case ErrorCode::kRejectionStall: return "RejectionStall";
    case ErrorCode::kDimensionTooLarge: return "DimensionTooLarge";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace adfs
