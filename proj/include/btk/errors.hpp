#pragma once

#include <stdexcept>
#include <string>

namespace btk {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

/// An argument lies outside the mathematical domain of the operation
/// (non-positive weight parameter, point outside the open disk, ...).
class DomainError : public Error
{
public:
	using Error::Error;
};

/// A tuning parameter is inconsistent with the weight, e.g. delta outside (0, m_tau).
class ParameterError : public Error
{
public:
	using Error::Error;
};

/// A configured size cap (lattice points, basis degree) would be exceeded.
class ResourceError : public Error
{
public:
	using Error::Error;
};

/// An iterative numerical procedure did not reach its tolerance.
class ConvergenceError : public Error
{
public:
	using Error::Error;
};

/// The kernel series was cut off before its tail became negligible.
class TruncationError : public Error
{
public:
	using Error::Error;
};

/// A matrix that must be positive semidefinite has a significantly negative eigenvalue.
class PsdViolation : public Error
{
public:
	using Error::Error;
};

} // namespace btk
