#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cotaudit {

/// Base of every error raised by the audit engine. `kind()` is the stable
/// name that ends up in Failed audit records and API error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define COTAUDIT_DEFINE_ERROR(Name)                                            \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& message) : Error(#Name, message) {}   \
    }

/// Raw model text does not follow the step grammar.
class MalformedTrace : public Error {
public:
    MalformedTrace(const std::string& reason, std::size_t line)
        : Error("MalformedTrace", "line " + std::to_string(line) + ": " + reason),
          reason_(reason),
          line_(line) {}

    const std::string& reason() const noexcept { return reason_; }
    /// 1-based line of the raw text where parsing failed.
    std::size_t line() const noexcept { return line_; }

private:
    std::string reason_;
    std::size_t line_;
};

COTAUDIT_DEFINE_ERROR(IndexOutOfBounds);
COTAUDIT_DEFINE_ERROR(DomainError);
COTAUDIT_DEFINE_ERROR(CriticRefusal);
COTAUDIT_DEFINE_ERROR(CriticEcho);
COTAUDIT_DEFINE_ERROR(GatewayError);
COTAUDIT_DEFINE_ERROR(RateLimited);
COTAUDIT_DEFINE_ERROR(JudgeUnparseable);
COTAUDIT_DEFINE_ERROR(ScorerError);
COTAUDIT_DEFINE_ERROR(EmptyInput);
COTAUDIT_DEFINE_ERROR(InsufficientData);
COTAUDIT_DEFINE_ERROR(DegenerateVariance);
COTAUDIT_DEFINE_ERROR(ConfigError);
COTAUDIT_DEFINE_ERROR(CorruptLog);
COTAUDIT_DEFINE_ERROR(BindError);
COTAUDIT_DEFINE_ERROR(MockScriptMiss);

#undef COTAUDIT_DEFINE_ERROR

}  // namespace cotaudit
