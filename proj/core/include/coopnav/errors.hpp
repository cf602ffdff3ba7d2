#pragma once

#include <stdexcept>
#include <string>

namespace coopnav {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Innovation covariance (H P H' + R) is numerically singular; usually a
/// misconfigured R or a collapsed covariance.
struct InnovationCovSingular : Error {
  using Error::Error;
};

/// An assembled covariance failed the positive-semidefinite check beyond
/// tolerance; signals corrupted correlation factors.
struct NotPsd : Error {
  using Error::Error;
};

/// Two robots are too close for the range Jacobian to be defined.
struct DegenerateGeometry : Error {
  using Error::Error;
};

/// A peer message arrived in a state the protocol does not allow.
struct ProtocolViolation : Error {
  using Error::Error;
};

/// Scenario configuration problem; message carries the offending field.
struct ConfigError : Error {
  using Error::Error;
};

/// Metrics were requested over an empty trace.
struct EmptyTrace : Error {
  using Error::Error;
};

}  // namespace coopnav
