#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace citysim {

// Missing or ill-formed configuration values.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A class of person needs a sublocation kind the city does not have.
class AssignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Agenda letter refers to an anchor the person lacks (e.g. W without office).
class MissingAnchor : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSusceptibles : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SpecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed document text. `line` is 1-based, 0 when unknown.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line = 0) : std::runtime_error(what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Well-formed document with invalid content; one message per problem, each
// prefixed with its line number where known.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<std::string> problems)
      : std::runtime_error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& p) {
    std::string out;
    for (const auto& s : p) {
      if (!out.empty()) out += '\n';
      out += s;
    }
    return out;
  }
  std::vector<std::string> problems_;
};

}  // namespace citysim
