#pragma once

#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace arbor {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violated a documented precondition.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// ICP could not form a usable correspondence set.
class RegistrationFailure : public Error {
 public:
  RegistrationFailure(const std::string& what, std::size_t correspondences, int iteration)
      : Error(what), correspondences_(correspondences), iteration_(iteration) {}
  std::size_t correspondences() const { return correspondences_; }
  int iteration() const { return iteration_; }

 private:
  std::size_t correspondences_;
  int iteration_;
};

class SkeletonizationError : public Error {
 public:
  SkeletonizationError(const std::string& what, std::vector<std::size_t> component_sizes)
      : Error(what), component_sizes_(std::move(component_sizes)) {}
  const std::vector<std::size_t>& component_sizes() const { return component_sizes_; }

 private:
  std::vector<std::size_t> component_sizes_;
};

/// Geometry too degraded for a structural trait. Evaluation tables render this as "--".
class TraitUnavailable : public Error {
 public:
  using Error::Error;
};

class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::string location)
      : Error(what), location_(std::move(location)) {}
  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

class EmptySegmentation : public Error {
 public:
  EmptySegmentation(const std::string& what, std::map<std::string, std::size_t> stage_counts)
      : Error(what), stage_counts_(std::move(stage_counts)) {}
  const std::map<std::string, std::size_t>& stage_counts() const { return stage_counts_; }

 private:
  std::map<std::string, std::size_t> stage_counts_;
};

class DegenerateDegradation : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const char* message) {
  if (!condition) throw InvalidInput(message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) throw InvalidInput(message);
}

}  // namespace arbor
