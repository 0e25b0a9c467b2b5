#ifndef QRAM_ERRORS_HPP
#define QRAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qram {

/// Base class of every error raised by the library.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A parameter set or argument violates a documented precondition.
class invalid_parameter : public error
{
public:
    using error::error;
};

/// A scenario or parameter file failed validation.
class config_error : public error
{
public:
    config_error(const std::string& msg, int line = -1)
      : error(line >= 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        m_line(line)
    {
    }

    /* 1-based line of the offending entry, -1 when not tied to a line */
    int line() const { return m_line; }

private:
    int m_line;
};

/// The integrator or a numerical contract failed (step collapse, norm
/// violation, non-converged steady state).
class numerical_error : public error
{
public:
    using error::error;
};

/* process exit codes of the scenario runner */
enum exit_code : int {
    exit_success = 0,
    exit_config_error = 2,
    exit_numerical_failure = 3,
};

} // namespace qram

#endif
