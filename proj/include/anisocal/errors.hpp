#pragma once

#include <stdexcept>
#include <string>

namespace anisocal {

/// Base class for all domain errors raised by the library.
class DomainError : public std::runtime_error {
 public:
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

class NonInvertible : public DomainError {
 public:
  explicit NonInvertible(const std::string& msg) : DomainError(msg) {}
};

class AsymmetryTooLarge : public DomainError {
 public:
  explicit AsymmetryTooLarge(const std::string& msg) : DomainError(msg) {}
};

class DegenerateWeights : public DomainError {
 public:
  explicit DegenerateWeights(const std::string& msg) : DomainError(msg) {}
};

class DegenerateVectors : public DomainError {
 public:
  explicit DegenerateVectors(const std::string& msg) : DomainError(msg) {}
};

class KindMismatch : public DomainError {
 public:
  explicit KindMismatch(const std::string& msg) : DomainError(msg) {}
};

class UnsupportedGroup : public DomainError {
 public:
  explicit UnsupportedGroup(const std::string& msg) : DomainError(msg) {}
};

class EmptyData : public DomainError {
 public:
  explicit EmptyData(const std::string& msg) : DomainError(msg) {}
};

class EmptyBatch : public DomainError {
 public:
  explicit EmptyBatch(const std::string& msg) : DomainError(msg) {}
};

class EmptyDataset : public DomainError {
 public:
  explicit EmptyDataset(const std::string& msg) : DomainError(msg) {}
};

class MissingTangent : public DomainError {
 public:
  explicit MissingTangent(const std::string& msg) : DomainError(msg) {}
};

class SchemaMismatch : public DomainError {
 public:
  explicit SchemaMismatch(const std::string& msg) : DomainError(msg) {}
};

class CorruptPayload : public DomainError {
 public:
  explicit CorruptPayload(const std::string& msg) : DomainError(msg) {}
};

class SingularTangent : public DomainError {
 public:
  explicit SingularTangent(const std::string& msg) : DomainError(msg) {}
};

class IoError : public DomainError {
 public:
  explicit IoError(const std::string& msg) : DomainError(msg) {}
};

class Diverged : public DomainError {
 public:
  explicit Diverged(const std::string& msg) : DomainError(msg) {}
};

}  // namespace anisocal
