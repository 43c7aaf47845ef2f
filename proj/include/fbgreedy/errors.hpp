#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace fbgreedy {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A documented precondition was violated by the caller.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NoInactiveCoordinate : public Error {
 public:
  NoInactiveCoordinate() : Error("forward search: every coordinate is already active") {}
};

class EmptySupport : public Error {
 public:
  EmptySupport() : Error("backward scan: support is empty") {}
};

// An inner (restricted or one-dimensional) minimization did not converge.
// Usually means separable logistic data or a singular restricted design.
class InnerSolveFailure : public Error {
 public:
  InnerSolveFailure(const std::string& what, std::vector<std::size_t> support)
      : Error(what), support_(std::move(support)) {}

  const std::vector<std::size_t>& support() const noexcept { return support_; }

 private:
  std::vector<std::size_t> support_;
};

class NonBinaryData : public Error {
 public:
  using Error::Error;
};

class NotPerfectSquare : public Error {
 public:
  using Error::Error;
};

class DegreeOutOfRange : public Error {
 public:
  using Error::Error;
};

class TooLarge : public Error {
 public:
  using Error::Error;
};

class MaxIterationsExceeded : public Error {
 public:
  using Error::Error;
};

class MissingNode : public Error {
 public:
  using Error::Error;
};

class MissingConstants : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

// Wraps a per-node failure so callers know which neighborhood fit broke.
class NodeFailure : public Error {
 public:
  NodeFailure(std::size_t node, const std::string& what)
      : Error("node " + std::to_string(node) + ": " + what), node_(node) {}

  std::size_t node() const noexcept { return node_; }

 private:
  std::size_t node_;
};

}  // namespace fbgreedy
