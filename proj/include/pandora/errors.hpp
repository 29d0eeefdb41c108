#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pandora {

// Stable error codes, shared between the C++ API and the control protocol
// (each code maps 1:1 to the token after "ERR").
enum class ErrorCode {
    Syntax,
    DuplicateAlias,
    UnknownType,
    UnknownOption,
    UnknownStack,
    UnknownComponent,
    UnknownSensor,
    UnknownHandle,
    KindMismatch,
    HookRejected,
    DuplicateRegistration,
    DuplicateSensor,
    AliasCollision,
    NotRunning,
    EmptyStack,
    WiringError,
    BadPath,
    BadScope,
    Validation,
    SelfSend,
    MailboxClosed,
    ConstructorFailure,
    Io,
    NoSamples,
    Unstable,
    Internal,
};

const char* to_token(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Parse failure with source position and the token set the parser would have
// accepted at that point.
class SyntaxError : public Error {
public:
    SyntaxError(int line, int column, const std::string& message,
                std::vector<std::string> expected = {});

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }
    const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
    int line_;
    int column_;
    std::vector<std::string> expected_;
};

// Contract checks that stay on in release builds.
[[noreturn]] void contract_violation(const std::string& what);

#define PANDORA_CHECK(cond, what)                  \
    do {                                           \
        if (!(cond)) ::pandora::contract_violation(what); \
    } while (0)

} // namespace pandora
