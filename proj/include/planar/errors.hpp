// Error types shared by every planar module.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace planar {

/// Base class for all library errors. `kind()` is a stable machine-readable tag
/// that the CLI prints on stderr.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define PLANAR_DEFINE_ERROR(Name)                                     \
  class Name : public Error {                                         \
   public:                                                            \
    explicit Name(const std::string& what) : Error(#Name, what) {}    \
  }

class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& what, std::size_t offset)
      : Error("SyntaxError", what + " at byte " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class UnknownIdentifier : public Error {
 public:
  explicit UnknownIdentifier(const std::string& name)
      : Error("UnknownIdentifier", "unknown identifier '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

PLANAR_DEFINE_ERROR(DomainError);
PLANAR_DEFINE_ERROR(NoAntiderivative);
PLANAR_DEFINE_ERROR(SingularJacobian);
PLANAR_DEFINE_ERROR(NotOrthogonal);
PLANAR_DEFINE_ERROR(SolverDiverged);
PLANAR_DEFINE_ERROR(SingularDiffusion);
PLANAR_DEFINE_ERROR(PathCrossesSingularity);
PLANAR_DEFINE_ERROR(NotClosedForm);
PLANAR_DEFINE_ERROR(DegenerateODE);
PLANAR_DEFINE_ERROR(NoClosureWithinTmax);
PLANAR_DEFINE_ERROR(ConfigError);

#undef PLANAR_DEFINE_ERROR

}  // namespace planar
