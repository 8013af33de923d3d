#pragma once

#include <stdexcept>
#include <string>

namespace liplab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structurally malformed input (size mismatch, bad edge, masses not a probability).
class InvalidSpace : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A path step between two points that are not joined by an edge.
class NonAdjacentStep : public Error {
 public:
  using Error::Error;
};

/// Distance to, or neighborhood of, an empty point set was requested.
class EmptySet : public Error {
 public:
  using Error::Error;
};

/// Some pair of points is not joined by any edge path, so no finite C exists.
class NotQuasiConvex : public Error {
 public:
  using Error::Error;
};

/// The perturbation scale is at most twice the singularity threshold.
class ThresholdTooCoarse : public Error {
 public:
  using Error::Error;
};

}  // namespace liplab
