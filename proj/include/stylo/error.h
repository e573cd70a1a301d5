#pragma once

#include <stdexcept>
#include <string>

namespace stylo {

// Base class for every error the library raises.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A caller violated an operation's precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// A corpus file could not be read or parsed.
class CorpusError : public Error {
 public:
  CorpusError(const std::string& message, std::size_t line = 0)
      : Error(line == 0 ? message
                        : "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  // 1-based line number, 0 when the error is not tied to a record.
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Embedding provider failures. TransportError covers unreachable endpoints,
// ProtocolError covers responses that violate the wire contract.
class EmbeddingError : public Error {
 public:
  using Error::Error;
};

class TransportError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

class ProtocolError : public EmbeddingError {
 public:
  using EmbeddingError::EmbeddingError;
};

// Reading or writing an artifact file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace stylo
