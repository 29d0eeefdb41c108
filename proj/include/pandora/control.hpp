#pragma once

#include "pandora/kernel.hpp"
#include "pandora/path.hpp"

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pandora {

// Machine-parseable response: first line "OK <n>" (n payload lines follow)
// or "ERR <code> <message>".
struct ControlResponse {
    bool ok = false;
    std::string error_code;
    std::string message;
    std::vector<std::string> payload;

    std::string wire_form() const;
};

// Executes one protocol line against the kernel. This is the single command
// dispatcher; the socket server and in-process callers share it.
ControlResponse execute_control_line(Kernel& kernel, std::string_view line);

// Convenience used by clients and benchmarks: full reflective read/write,
// resolving stack, component and option by name on every call.
ScalarValue control_get(Kernel& kernel, Scope scope, std::string_view path_text,
                        const std::string& option);
void control_set(Kernel& kernel, Scope scope, std::string_view path_text,
                 const std::string& option, std::string_view value_literal);

// Endpoint spec: "unix:<path>" or "tcp:<host>:<port>".
class ControlServer {
public:
    ControlServer(Kernel& kernel, const std::string& endpoint);
    ~ControlServer();

    ControlServer(const ControlServer&) = delete;
    ControlServer& operator=(const ControlServer&) = delete;

    const std::string& endpoint() const { return endpoint_; }
    void stop();

private:
    void accept_loop();
    void session(int fd);

    Kernel& kernel_;
    std::string endpoint_;
    std::string unix_path_;  // unlinked on stop
    int listen_fd_ = -1;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex sessions_mu_;
    std::vector<std::thread> sessions_;
};

// Blocking line client for the protocol.
class ControlClient {
public:
    explicit ControlClient(const std::string& endpoint);
    ~ControlClient();

    ControlClient(const ControlClient&) = delete;
    ControlClient& operator=(const ControlClient&) = delete;

    ControlResponse request(std::string_view line);

private:
    int fd_ = -1;
    std::string rxbuf_;
    std::string read_line();
};

} // namespace pandora
