#pragma once

#include <stdexcept>
#include <string>

namespace adfs {

enum class ErrorCode {
  kCoincidentSourceSensor,
  kInvalidPresetParams,
  kNoiseSpansFullSpace,
  kSignalInNoiseSpace,
  kInvalidRatio,
  kRejectionStall,
  kDimensionTooLarge,
  kInvalidArgument,
  kConfig,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace adfs
