#pragma once

#include <stdexcept>
#include <string>

namespace lanekit {

// Base class for all library errors.
class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or mistyped input document. Carries the JSON path of the
// offending node when known.
class SchemaError : public MapError {
 public:
  SchemaError(std::string path, const std::string& message)
      : MapError(path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Dangling id reference or id collision inside a scene.
class IntegrityError : public MapError {
 public:
  IntegrityError(std::int64_t id, const std::string& message)
      : MapError(message + " (id " + std::to_string(id) + ")"), id_(id) {}
  std::int64_t id() const { return id_; }

 private:
  std::int64_t id_;
};

class GeometryError : public MapError {
 public:
  using MapError::MapError;
};

class DegenerateInput : public MapError {
 public:
  using MapError::MapError;
};

class EmptyInput : public MapError {
 public:
  using MapError::MapError;
};

class TargetMissing : public MapError {
 public:
  using MapError::MapError;
};

class IdCollision : public MapError {
 public:
  using MapError::MapError;
};

class ConflictingChange : public MapError {
 public:
  using MapError::MapError;
};

class ClassMismatch : public MapError {
 public:
  using MapError::MapError;
};

class InconsistentInput : public MapError {
 public:
  using MapError::MapError;
};

}  // namespace lanekit
