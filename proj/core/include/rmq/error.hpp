#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rmq {

enum class ErrorKind {
  InvalidArgument,
  WidthUnresolvable,
  PacketTouchesBoundary,
  NotNormalized,
  GridMismatch,
  MixedResolutions,
  MixedWidths,
  ScaledBelowResolution,
  TranslatedOffGrid,
  DegenerateSpread,
  DimensionMismatch,
  CalibrationDiverged,
  LeakageDetected,
  NotLocalized,
  PreconditionViolated,
  DetectorOverlap,
  TimeoutFractionExceeded,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the core library carries a machine-readable kind
/// so callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void raise(ErrorKind kind, const std::string& message);

}  // namespace rmq
