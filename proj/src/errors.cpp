#include "pandora/errors.hpp"

#include <sstream>

namespace pandora {

const char* to_token(ErrorCode code) {
    switch (code) {
    case ErrorCode::Syntax: return "syntax";
    case ErrorCode::DuplicateAlias: return "duplicate-alias";
    case ErrorCode::UnknownType: return "unknown-type";
    case ErrorCode::UnknownOption: return "unknown-option";
    case ErrorCode::UnknownStack: return "unknown-stack";
    case ErrorCode::UnknownComponent: return "unknown-component";
    case ErrorCode::UnknownSensor: return "unknown-sensor";
    case ErrorCode::UnknownHandle: return "unknown-handle";
    case ErrorCode::KindMismatch: return "kind-mismatch";
    case ErrorCode::HookRejected: return "hook-rejected";
    case ErrorCode::DuplicateRegistration: return "duplicate-registration";
    case ErrorCode::DuplicateSensor: return "duplicate-sensor";
    case ErrorCode::AliasCollision: return "alias-collision";
    case ErrorCode::NotRunning: return "not-running";
    case ErrorCode::EmptyStack: return "empty-stack";
    case ErrorCode::WiringError: return "wiring-error";
    case ErrorCode::BadPath: return "bad-path";
    case ErrorCode::BadScope: return "bad-scope";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::SelfSend: return "self-send";
    case ErrorCode::MailboxClosed: return "mailbox-closed";
    case ErrorCode::ConstructorFailure: return "constructor-failure";
    case ErrorCode::Io: return "io";
    case ErrorCode::NoSamples: return "no-samples";
    case ErrorCode::Unstable: return "unstable";
    case ErrorCode::Internal: return "internal";
    }
    return "internal";
}

namespace {
std::string format_syntax(int line, int column, const std::string& message,
                          const std::vector<std::string>& expected) {
    std::ostringstream os;
    os << line << ':' << column << ": " << message;
    if (!expected.empty()) {
        os << " (expected ";
        for (size_t i = 0; i < expected.size(); ++i) {
            if (i) os << ", ";
            os << expected[i];
        }
        os << ')';
    }
    return os.str();
}
} // namespace

SyntaxError::SyntaxError(int line, int column, const std::string& message,
                         std::vector<std::string> expected)
    : Error(ErrorCode::Syntax, format_syntax(line, column, message, expected)),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

void contract_violation(const std::string& what) {
    throw Error(ErrorCode::Internal, "contract violation: " + what);
}

} // namespace pandora
