#include "pandora/control.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cstring>

namespace pandora {

namespace {

struct Endpoint {
    bool is_unix = false;
    std::string path;  // unix
    std::string host;  // tcp
    std::string port;  // tcp
};

Endpoint parse_endpoint(const std::string& spec) {
    Endpoint ep;
    if (spec.rfind("unix:", 0) == 0) {
        ep.is_unix = true;
        ep.path = spec.substr(5);
        if (ep.path.empty()) throw Error(ErrorCode::Io, "empty unix socket path");
        return ep;
    }
    if (spec.rfind("tcp:", 0) == 0) {
        std::string rest = spec.substr(4);
        size_t colon = rest.rfind(':');
        if (colon == std::string::npos) {
            throw Error(ErrorCode::Io, "tcp endpoint must be tcp:<host>:<port>");
        }
        ep.host = rest.substr(0, colon);
        ep.port = rest.substr(colon + 1);
        return ep;
    }
    throw Error(ErrorCode::Io, "endpoint must be unix:<path> or tcp:<host>:<port>, got '" +
                                   spec + "'");
}

int connect_endpoint(const Endpoint& ep) {
    if (ep.is_unix) {
        int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (fd < 0) throw Error(ErrorCode::Io, "socket: " + std::string(strerror(errno)));
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        if (ep.path.size() >= sizeof(addr.sun_path)) {
            ::close(fd);
            throw Error(ErrorCode::Io, "unix socket path too long");
        }
        std::strncpy(addr.sun_path, ep.path.c_str(), sizeof(addr.sun_path) - 1);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            int err = errno;
            ::close(fd);
            throw Error(ErrorCode::Io,
                        "connect " + ep.path + ": " + std::string(strerror(err)));
        }
        return fd;
    }
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    int rc = ::getaddrinfo(ep.host.c_str(), ep.port.c_str(), &hints, &res);
    if (rc != 0) throw Error(ErrorCode::Io, "resolve " + ep.host + ": " + gai_strerror(rc));
    int fd = -1;
    for (addrinfo* ai = res; ai; ai = ai->ai_next) {
        fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) {
        throw Error(ErrorCode::Io, "cannot connect to " + ep.host + ":" + ep.port);
    }
    return fd;
}

bool send_all(int fd, std::string_view data) {
    while (!data.empty()) {
        ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
        if (n <= 0) return false;
        data.remove_prefix(static_cast<size_t>(n));
    }
    return true;
}

} // namespace

// --- server ---

ControlServer::ControlServer(Kernel& kernel, const std::string& endpoint)
    : kernel_(kernel), endpoint_(endpoint) {
    Endpoint ep = parse_endpoint(endpoint);
    if (ep.is_unix) {
        listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (listen_fd_ < 0) throw Error(ErrorCode::Io, "socket: " + std::string(strerror(errno)));
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        if (ep.path.size() >= sizeof(addr.sun_path)) {
            ::close(listen_fd_);
            throw Error(ErrorCode::Io, "unix socket path too long");
        }
        std::strncpy(addr.sun_path, ep.path.c_str(), sizeof(addr.sun_path) - 1);
        ::unlink(ep.path.c_str());
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
            int err = errno;
            ::close(listen_fd_);
            throw Error(ErrorCode::Io, "bind " + ep.path + ": " + std::string(strerror(err)));
        }
        unix_path_ = ep.path;
    } else {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        hints.ai_flags = AI_PASSIVE;
        addrinfo* res = nullptr;
        int rc = ::getaddrinfo(ep.host.empty() ? nullptr : ep.host.c_str(), ep.port.c_str(),
                               &hints, &res);
        if (rc != 0) throw Error(ErrorCode::Io, "resolve: " + std::string(gai_strerror(rc)));
        int fd = -1;
        int err = 0;
        for (addrinfo* ai = res; ai; ai = ai->ai_next) {
            fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0) continue;
            int yes = 1;
            ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
            if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
            err = errno;
            ::close(fd);
            fd = -1;
        }
        ::freeaddrinfo(res);
        if (fd < 0) {
            throw Error(ErrorCode::Io, "bind " + ep.host + ":" + ep.port + ": " +
                                           std::string(strerror(err)));
        }
        listen_fd_ = fd;
    }
    if (::listen(listen_fd_, 16) != 0) {
        int err = errno;
        ::close(listen_fd_);
        throw Error(ErrorCode::Io, "listen: " + std::string(strerror(err)));
    }
    acceptor_ = std::thread([this] { accept_loop(); });
}

ControlServer::~ControlServer() { stop(); }

void ControlServer::stop() {
    bool expected = false;
    if (!stopping_.compare_exchange_strong(expected, true)) return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> sessions;
    {
        std::lock_guard lock(sessions_mu_);
        sessions.swap(sessions_);
    }
    for (auto& t : sessions) {
        if (t.joinable()) t.join();
    }
    if (!unix_path_.empty()) ::unlink(unix_path_.c_str());
}

void ControlServer::accept_loop() {
    while (!stopping_.load()) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (stopping_.load()) break;
            if (errno == EINTR) continue;
            break;
        }
        std::lock_guard lock(sessions_mu_);
        sessions_.emplace_back([this, fd] { session(fd); });
    }
}

void ControlServer::session(int fd) {
    std::string buf;
    char chunk[4096];
    while (!stopping_.load()) {
        size_t nl = buf.find('\n');
        if (nl == std::string::npos) {
            ssize_t n = ::recv(fd, chunk, sizeof chunk, 0);
            if (n <= 0) break;
            buf.append(chunk, static_cast<size_t>(n));
            continue;
        }
        std::string line = buf.substr(0, nl);
        buf.erase(0, nl + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ControlResponse resp = execute_control_line(kernel_, line);
        if (!send_all(fd, resp.wire_form())) break;
    }
    ::close(fd);
}

// --- client ---

ControlClient::ControlClient(const std::string& endpoint) {
    fd_ = connect_endpoint(parse_endpoint(endpoint));
}

ControlClient::~ControlClient() {
    if (fd_ >= 0) ::close(fd_);
}

std::string ControlClient::read_line() {
    while (true) {
        size_t nl = rxbuf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = rxbuf_.substr(0, nl);
            rxbuf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        char chunk[4096];
        ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n <= 0) throw Error(ErrorCode::Io, "control connection closed");
        rxbuf_.append(chunk, static_cast<size_t>(n));
    }
}

ControlResponse ControlClient::request(std::string_view line) {
    std::string out(line);
    out += '\n';
    if (!send_all(fd_, out)) throw Error(ErrorCode::Io, "control connection closed");
    std::string head = read_line();
    ControlResponse resp;
    if (head.rfind("OK ", 0) == 0) {
        resp.ok = true;
        size_t n = std::stoul(head.substr(3));
        resp.payload.reserve(n);
        for (size_t i = 0; i < n; ++i) resp.payload.push_back(read_line());
        return resp;
    }
    if (head.rfind("ERR ", 0) == 0) {
        resp.ok = false;
        std::string rest = head.substr(4);
        size_t sp = rest.find(' ');
        resp.error_code = rest.substr(0, sp);
        resp.message = sp == std::string::npos ? "" : rest.substr(sp + 1);
        return resp;
    }
    throw Error(ErrorCode::Io, "malformed control response: " + head);
}

} // namespace pandora
