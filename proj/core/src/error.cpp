#include "rmq/error.hpp"

namespace rmq {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::WidthUnresolvable: return "WidthUnresolvable";
    case ErrorKind::PacketTouchesBoundary: return "PacketTouchesBoundary";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::GridMismatch: return "GridMismatch";
    case ErrorKind::MixedResolutions: return "MixedResolutions";
    case ErrorKind::MixedWidths: return "MixedWidths";
    case ErrorKind::ScaledBelowResolution: return "ScaledBelowResolution";
    case ErrorKind::TranslatedOffGrid: return "TranslatedOffGrid";
    case ErrorKind::DegenerateSpread: return "DegenerateSpread";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::CalibrationDiverged: return "CalibrationDiverged";
    case ErrorKind::LeakageDetected: return "LeakageDetected";
    case ErrorKind::NotLocalized: return "NotLocalized";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::DetectorOverlap: return "DetectorOverlap";
    case ErrorKind::TimeoutFractionExceeded: return "TimeoutFractionExceeded";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

void raise(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace rmq
