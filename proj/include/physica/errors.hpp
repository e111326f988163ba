#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace physica {

/// Malformed scene JSON text. line/column are 1-based.
class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& what, int line, int column)
      : std::runtime_error(what), line(line), column(column) {}
  int line;
  int column;
};

/// Structurally valid JSON that does not match the scene schema
/// (missing field, unexpected field, wrong type). path is a JSON pointer.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& what, std::string path)
      : std::runtime_error(what + " at " + path), path(std::move(path)) {}
  std::string path;
};

/// A scene that parses but violates a type invariant. code matches the
/// Violation code validate_scene would report.
class InvariantError : public std::runtime_error {
 public:
  InvariantError(const std::string& what, std::string code)
      : std::runtime_error(what), code(std::move(code)) {}
  std::string code;
};

/// Corrupt or inconsistent tensor container file.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::uint64_t byte_offset)
      : std::runtime_error(what + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset(byte_offset) {}
  std::uint64_t byte_offset;
};

class DimMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnknownClass : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyKeys : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class StepOutOfRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidRange : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidBound : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScriptError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace physica
