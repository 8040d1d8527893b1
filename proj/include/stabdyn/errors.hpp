#pragma once

#include <stdexcept>
#include <string>

namespace stabdyn
{

/// Base class for every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Malformed matrix text, group document or expression.
class ParseError : public Error
{
public:
  using Error::Error;
};

/// A configured size cap (word count, group order, search nodes) would be exceeded.
class BudgetExceeded : public Error
{
public:
  using Error::Error;
};

/// An operation was called outside its documented domain.
class PreconditionError : public Error
{
public:
  using Error::Error;
};

class NoSuchEigenvalue : public PreconditionError
{
public:
  using PreconditionError::PreconditionError;
};

class ReducibleShift : public PreconditionError
{
public:
  using PreconditionError::PreconditionError;
};

class ZeroEntropy : public PreconditionError
{
public:
  using PreconditionError::PreconditionError;
};

/// The image of a cylinder class under a block code meets several classes.
class ImageSplitsClasses : public PreconditionError
{
public:
  using PreconditionError::PreconditionError;
};

/// Power iteration failed to converge within its iteration cap.
class ConvergenceError : public Error
{
public:
  using Error::Error;
};

} // namespace stabdyn
