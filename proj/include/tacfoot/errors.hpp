#pragma once

#include <stdexcept>
#include <string>

namespace tacfoot {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct UnreachableTarget final : Error {
  using Error::Error;
};

// terrain
struct UnsupportedPoint final : Error {
  using Error::Error;
};

// vision
struct OutOfFrame final : Error {
  using Error::Error;
};
struct TrackingLost final : Error {
  using Error::Error;
};

// perception
struct LengthMismatch final : Error {
  using Error::Error;
};
struct DegenerateArc final : Error {
  using Error::Error;
};
struct NoTransition final : Error {
  using Error::Error;
};
struct SingularKernel final : Error {
  using Error::Error;
};
struct Unfitted final : Error {
  using Error::Error;
};

// controller
struct EdgeLost final : Error {
  using Error::Error;
};
struct SearchExhausted final : Error {
  using Error::Error;
};

// experiment
struct ConfigError final : Error {
  ConfigError(std::string field_path, const std::string& what)
      : Error(field_path + ": " + what), field(std::move(field_path)) {}
  std::string field;
};

struct ParseError final : Error {
  ParseError(int line_number, const std::string& what)
      : Error("line " + std::to_string(line_number) + ": " + what), line(line_number) {}
  int line;
};

}  // namespace tacfoot
