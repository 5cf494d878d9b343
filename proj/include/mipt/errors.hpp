#pragma once

#include <stdexcept>
#include <string>

namespace mipt {

/// Base for all library errors. `code()` is a stable, machine-readable tag
/// surfaced by the CLI on failure.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

#define MIPT_DEFINE_ERROR(Name, tag)                                   \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& what) : Error(tag, what) {}       \
  };

MIPT_DEFINE_ERROR(SizeError, "size")
MIPT_DEFINE_ERROR(IndexError, "index")
MIPT_DEFINE_ERROR(BipartitionError, "bipartition")
MIPT_DEFINE_ERROR(NumericalError, "numerical_consistency")
MIPT_DEFINE_ERROR(DomainError, "domain")
MIPT_DEFINE_ERROR(OutsideRegionError, "outside_region")
MIPT_DEFINE_ERROR(DegenerateFitError, "degenerate_fit")
MIPT_DEFINE_ERROR(NoCrossingError, "no_crossing")
MIPT_DEFINE_ERROR(IoError, "io")
MIPT_DEFINE_ERROR(ParseError, "parse")

#undef MIPT_DEFINE_ERROR

}  // namespace mipt
