#pragma once

#include <stdexcept>
#include <string>

namespace doubletscope {

// Process exit codes used by the command-line front end.
enum class ExitCode : int {
    ok = 0,
    usage = 64,
    data = 65,
    numerical = 70,
};

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Precondition or invariant violation in caller-supplied data.
class InvalidArgument : public Error {
public:
    explicit InvalidArgument(const std::string& what) : Error(ExitCode::data, what) {}
};

// Configuration file problems. Missing files map to the usage code, everything else to data.
class ConfigError : public Error {
public:
    ConfigError(ExitCode code, const std::string& what) : Error(code, what) {}
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ExitCode::numerical, what) {}
};

// Secular function evaluated exactly on a pole.
class PoleHit : public NumericalError {
public:
    PoleHit(const std::string& what, double pole) : NumericalError(what), pole_(pole) {}
    double pole() const noexcept { return pole_; }

private:
    double pole_;
};

// Root iteration failed to reach tolerance within the iteration cap.
class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double lower, double upper)
        : NumericalError(what), lower_(lower), upper_(upper) {}
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }

private:
    double lower_;
    double upper_;
};

// The best-P_e branch switched identity inside a bracket that was assumed continuous.
class BranchDiscontinuity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace doubletscope
