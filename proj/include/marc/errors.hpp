#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace marc {

class Error : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

// Input violates a documented precondition (shape, range, symmetry).
class ValidationError : public Error
{
  public:
    using Error::Error;
};

// An iterative routine failed to reach its tolerance. The residual reached is
// kept so callers can report how far off the result was.
class NumericalError : public Error
{
  public:
    explicit NumericalError(const std::string& what,
                            double residual = std::numeric_limits<double>::quiet_NaN())
        : Error(what),
          m_residual(residual)
    {
    }

    double residual() const noexcept { return m_residual; }

  private:
    double m_residual;
};

// The relay-to-receiver channel vanishes, so no relay direction is defined.
class DegenerateChannelError : public NumericalError
{
  public:
    explicit DegenerateChannelError(const std::string& what)
        : NumericalError(what)
    {
    }
};

class IoError : public Error
{
  public:
    using Error::Error;
};

} // namespace marc
