#pragma once

#include <stdexcept>
#include <string>

namespace kspnet {

enum class ErrorKind
{
  Domain,      // operation applied to a tensor in the wrong domain
  Parameter,   // argument outside its documented range
  Shape,       // dimension mismatch between operands
  Calibration, // not enough calibration data
  Config,      // invalid configuration file or flag
  Data,        // unreadable or malformed input data
  Numeric,     // non-finite result or failed solve
  Metric       // metric undefined for the given labels
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, std::string const &what)
    : std::runtime_error(what)
    , kind_(kind)
  {
  }

  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

// Process exit status for an error kind: 2 config, 3 data, 4 numeric.
int ExitCode(ErrorKind kind);

} // namespace kspnet
