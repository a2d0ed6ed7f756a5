#pragma once

#include <stdexcept>
#include <string>

namespace surfkh {

// Malformed input: bad tokens, bad generator indices, broken files.
class format_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input that parses but violates a structural rule (dangling edge, slot reuse...).
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// Operation applied outside its domain (genus mismatch, not a ladybug, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class unsupported_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A mathematical invariant failed on actual data (d^2 != 0, census violation).
class invariant_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace surfkh
