#pragma once

#include <stdexcept>
#include <string>

namespace voatheta {

// Every failure raised by the library derives from Error so callers (the CLI
// in particular) can map error kinds onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
  using Error::Error;
};

class NonInvertibleLeadingTerm : public Error {
public:
  using Error::Error;
};

class NotInUpperHalfPlane : public Error {
public:
  using Error::Error;
};

class TailBoundExceeded : public Error {
public:
  using Error::Error;
};

class DenominatorCapExceeded : public Error {
public:
  using Error::Error;
};

class OddOrSmallWeight : public Error {
public:
  using Error::Error;
};

class NotPositiveDefinite : public Error {
public:
  using Error::Error;
};

class NotEvenIntegral : public Error {
public:
  using Error::Error;
};

class IncompatibleSector : public Error {
public:
  using Error::Error;
};

class UnsupportedInsertion : public Error {
public:
  using Error::Error;
};

class BasisTooLarge : public Error {
public:
  using Error::Error;
};

class IllConditionedFit : public Error {
public:
  using Error::Error;
};

class TokenMismatch : public Error {
public:
  using Error::Error;
};

class InvalidFrame : public Error {
public:
  using Error::Error;
};

class NonInvertibleThetaLeading : public Error {
public:
  using Error::Error;
};

class OracleMismatch : public Error {
public:
  using Error::Error;
};

} // namespace voatheta
