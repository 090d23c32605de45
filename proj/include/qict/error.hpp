#pragma once

#include <stdexcept>
#include <string>

namespace qict {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation.
class DomainError : public Error {
public:
  using Error::Error;
};

/// Heralding efficiency requested for a source without paired amplitude.
class UndefinedEfficiencyError : public Error {
public:
  using Error::Error;
};

/// Both sources dark: the fringe contrast has a zero denominator.
class UndefinedVisibilityError : public Error {
public:
  using Error::Error;
};

class EnumerationLimitError : public Error {
public:
  using Error::Error;
};

/// Two records do not share a scan axis.
class AlignmentError : public Error {
public:
  using Error::Error;
};

/// The scan axis is not uniformly spaced.
class ResamplingRequiredError : public Error {
public:
  using Error::Error;
};

class UsageError : public Error {
public:
  using Error::Error;
};

class UndefinedSnrError : public Error {
public:
  using Error::Error;
};

class RangeError : public Error {
public:
  using Error::Error;
};

class FitError : public Error {
public:
  using Error::Error;
};

} // namespace qict
