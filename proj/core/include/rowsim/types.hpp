#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rowsim {

// All device timing is kept in integer picoseconds so that legality checks,
// closed-form cross-checks and report output are exact and platform independent.
using Time = std::int64_t;
using Addr = std::uint64_t;

inline constexpr Time kNoTime = INT64_MIN / 4;

inline Time ns_to_ps(double ns) { return static_cast<Time>(std::llround(ns * 1000.0)); }
inline double ps_to_ns(Time ps) { return static_cast<double>(ps) / 1000.0; }

// Error categories map onto process exit codes in the CLI:
// Config -> 1, Trace -> 2, Internal -> 3.
enum class ErrorKind { Config, Trace, Internal };

class SimError : public std::runtime_error {
 public:
  SimError(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public SimError {
 public:
  ConfigError(const std::string& field, const std::string& reason)
      : SimError(ErrorKind::Config, "config error: " + field + ": " + reason), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class TraceError : public SimError {
 public:
  TraceError(std::size_t line, const std::string& reason)
      : SimError(ErrorKind::Trace, "trace error: line " + std::to_string(line) + ": " + reason),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class InternalError : public SimError {
 public:
  explicit InternalError(const std::string& what) : SimError(ErrorKind::Internal, what) {}
};

// Raised when a command is applied to device state it is not legal in.
enum class ProtocolFault {
  TimingViolation,
  IllegalTransition,
  FpmCrossSubarray,
};

class ProtocolError : public SimError {
 public:
  ProtocolError(ProtocolFault fault, const std::string& what)
      : SimError(ErrorKind::Internal, what), fault_(fault) {}
  ProtocolFault fault() const { return fault_; }

 private:
  ProtocolFault fault_;
};

}  // namespace rowsim
