#pragma once

#include <stdexcept>
#include <string>

namespace stdfg {

// Base for every hard error raised by the library. The CLI maps any of these
// to a nonzero exit status.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define STDFG_DEFINE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

STDFG_DEFINE_ERROR(MalformedName);
STDFG_DEFINE_ERROR(MalformedLine);
STDFG_DEFINE_ERROR(MissingPid);
STDFG_DEFINE_ERROR(DuplicateCase);
STDFG_DEFINE_ERROR(CorruptBundle);
STDFG_DEFINE_ERROR(InvalidMappingSpec);
STDFG_DEFINE_ERROR(MissingMappingSpec);
STDFG_DEFINE_ERROR(SpecMismatch);
STDFG_DEFINE_ERROR(NotAPartition);
STDFG_DEFINE_ERROR(EmptySelection);
STDFG_DEFINE_ERROR(MissingStats);
STDFG_DEFINE_ERROR(IoFailure);
STDFG_DEFINE_ERROR(UsageError);

#undef STDFG_DEFINE_ERROR

}  // namespace stdfg
