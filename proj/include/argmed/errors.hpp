#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace argmed {

// Stable error codes shared across the library; the CLI maps them to exit codes.
enum class Err {
    DuplicateId,
    UnknownArgument,
    ForbiddenAttack,
    InvalidFramework,
    TooLarge,
    DuplicateScheme,
    DuplicateCriticalQuestion,
    MalformedTemplate,
    UnknownScheme,
    IncompleteBinding,
    InvalidConfig,
    IllegalMove,
    SessionTerminated,
    SessionActive,
    Parse,
    BackendFailure,
    Timeout,
    ProtocolViolation,
    InternalInconsistency,
};

inline const char* err_name(Err code) {
    switch (code) {
        case Err::DuplicateId: return "duplicate-id";
        case Err::UnknownArgument: return "unknown-argument";
        case Err::ForbiddenAttack: return "forbidden-attack";
        case Err::InvalidFramework: return "invalid-framework";
        case Err::TooLarge: return "too-large";
        case Err::DuplicateScheme: return "duplicate-scheme";
        case Err::DuplicateCriticalQuestion: return "duplicate-critical-question";
        case Err::MalformedTemplate: return "malformed-template";
        case Err::UnknownScheme: return "unknown-scheme";
        case Err::IncompleteBinding: return "incomplete-binding";
        case Err::InvalidConfig: return "invalid-config";
        case Err::IllegalMove: return "illegal-move";
        case Err::SessionTerminated: return "session-terminated";
        case Err::SessionActive: return "session-active";
        case Err::Parse: return "parse";
        case Err::BackendFailure: return "backend-failure";
        case Err::Timeout: return "timeout";
        case Err::ProtocolViolation: return "protocol-violation";
        case Err::InternalInconsistency: return "internal-inconsistency";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(Err code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Err code() const noexcept { return code_; }

private:
    Err code_;
};

// Input-text failure; line is 1-based when known, 0 otherwise.
class ParseError : public Error {
public:
    explicit ParseError(std::string message, int line = 0)
        : Error(Err::Parse, line > 0 ? "line " + std::to_string(line) + ": " + message
                                     : std::move(message)),
          line_(line) {}

    int line() const noexcept { return line_; }

private:
    int line_;
};

// Rejected dialogue move; index is the 1-based position the move would occupy.
class IllegalMoveError : public Error {
public:
    IllegalMoveError(int index, std::string reason)
        : Error(Err::IllegalMove,
                "illegal move at index " + std::to_string(index) + ": " + reason),
          index_(index),
          reason_(std::move(reason)) {}

    int index() const noexcept { return index_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    int index_;
    std::string reason_;
};

}  // namespace argmed
