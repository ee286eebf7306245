#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fluxq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed DTD, query, FluX or XML text. `offset` is a byte offset into
/// the source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " (at offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// A content model whose Glushkov automaton would be nondeterministic.
class NotOneUnambiguous : public Error {
 public:
  using Error::Error;
};

/// Input document does not conform to the DTD.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Query refers to elements the DTD cannot produce at that position.
class ElementNotInSchema : public Error {
 public:
  using Error::Error;
};

class NotNormalForm : public Error {
 public:
  using Error::Error;
};

class UnknownElement : public Error {
 public:
  using Error::Error;
};

/// A FluX query failed the safety check, or an unsafe plan was requested.
class SafetyError : public Error {
 public:
  using Error::Error;
};

/// Evaluation dereferenced data that was never buffered. Indicates a bug in
/// projection or safety, never a user error.
class BufferMiss : public Error {
 public:
  using Error::Error;
};

}  // namespace fluxq
