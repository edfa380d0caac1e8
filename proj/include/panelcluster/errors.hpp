#pragma once

#include <stdexcept>
#include <string>

namespace panelcluster {

enum class ErrorCode {
  MissingCell,
  NonFiniteValue,
  DuplicateObservation,
  SchemaMismatch,
  ShapeMismatch,
  RankDeficient,
  ClusterRankDeficient,
  BandwidthTooLarge,
  DegenerateDiagonal,
  LengthMismatch,
  TooFewPeriods,
  BandwidthTooLargeForBlock,
  OrbitTooLarge,
  SingleCluster,
  NonPositiveVariance,
  DomainError,
  InvalidConfig,
  IoError,
};

/// Library-wide exception carrying a machine-checkable code plus a message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

}  // namespace panelcluster
