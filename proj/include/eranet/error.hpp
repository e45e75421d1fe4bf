#pragma once

#include <stdexcept>
#include <string>

namespace eranet {

/// Broad failure classes. The CLI maps these onto process exit codes.
enum class ErrorKind {
  Config,      // malformed config or era scheme
  Parse,       // unreadable or structurally broken input file
  Data,        // input data violates a domain rule
  OutOfRange,  // year outside the era scheme
  NotFound,    // unknown scholar id
  InvalidArgument,
  Invariant,   // internal invariant breach (including non-convergence)
  Fetch,       // SPARQL endpoint failure after retries
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace eranet
