#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace slotkit {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller-supplied data violates a precondition (dimensions, ranges, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// Point configuration does not determine a rigid transform (e.g. collinear).
class DegenerateConfigurationError : public Error {
 public:
  using Error::Error;
};

/// RANSAC could not reach the requested consensus size.
class NoConsensusError : public Error {
 public:
  NoConsensusError(const std::string& what, std::size_t best_inliers)
      : Error(what), best_inliers_(best_inliers) {}
  std::size_t best_inliers() const { return best_inliers_; }

 private:
  std::size_t best_inliers_;
};

/// A fixture on disk is missing, malformed or inconsistent.
class LoadError : public Error {
 public:
  using Error::Error;
};

}  // namespace slotkit
