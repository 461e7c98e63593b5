#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nr {

// Coarse failure class; the CLI prints it as the first token of its
// single-line error report.
enum class ErrorKind { Config, Simulation, Analysis, Io };

constexpr std::string_view to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Simulation: return "SimulationError";
    case ErrorKind::Analysis: return "AnalysisError";
    case ErrorKind::Io: return "IoError";
    }
    return "Error";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace nr
