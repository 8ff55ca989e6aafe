#pragma once

#include <stdexcept>
#include <string>

namespace rlvrseg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimsMismatch : Error {
  using Error::Error;
};

struct EmptyInput : Error {
  using Error::Error;
};

struct CorruptRle : Error {
  using Error::Error;
};

struct GroupTooSmall : Error {
  using Error::Error;
};

struct RatiosRequired : Error {
  using Error::Error;
};

struct PoolTooSmall : Error {
  using Error::Error;
};

struct NoValidResponses : Error {
  using Error::Error;
};

// Malformed external input (files, records); maps to CLI exit code 2.
struct InputError : Error {
  using Error::Error;
};

}  // namespace rlvrseg
