#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Wavelength outside a coefficient set's declared validity range.
class RangeError : public Error {
public:
  using Error::Error;
};

class ValidationError : public Error {
public:
  using Error::Error;
};

class PhaseMatchError : public Error {
public:
  using Error::Error;
};

class AnalysisError : public Error {
public:
  using Error::Error;
};

class EmptyImageError : public Error {
public:
  using Error::Error;
};

class ResolutionError : public Error {
public:
  using Error::Error;
};

class FormatError : public Error {
public:
  using Error::Error;
};

// Configuration and usage problems; the CLI maps these to exit status 2.
class ConfigError : public Error {
public:
  using Error::Error;
};

} // namespace spdc
