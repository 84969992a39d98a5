#pragma once

#include <stdexcept>
#include <string>

namespace regx {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can catch one type and still report the specific kind.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define REGX_DEFINE_ERROR(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

REGX_DEFINE_ERROR(ConformanceError);
REGX_DEFINE_ERROR(ValidationError);
REGX_DEFINE_ERROR(RangeError);
REGX_DEFINE_ERROR(ParseError);
REGX_DEFINE_ERROR(IoError);
REGX_DEFINE_ERROR(DataIntegrityError);
REGX_DEFINE_ERROR(NumericError);
REGX_DEFINE_ERROR(TrainingError);
REGX_DEFINE_ERROR(SamplingError);
REGX_DEFINE_ERROR(CoverageError);
REGX_DEFINE_ERROR(UndefinedAucError);

#undef REGX_DEFINE_ERROR

}  // namespace regx
