// Daemon entry point: loads a config file, optionally starts stacks, and
// serves the control protocol until interrupted.

#include "pandora/control.hpp"
#include "pandora/kernel.hpp"
#include "pandora/stdlib.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

namespace {
std::atomic<bool> interrupted{false};
void on_signal(int) { interrupted.store(true); }
} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pandora stack daemon"};
    std::string config;
    std::string control = "unix:/tmp/pandora.sock";
    std::vector<std::string> start;
    bool no_control = false;
    app.add_option("--config", config, "config file with stack definitions");
    app.add_option("--control", control, "control endpoint (unix:<path> or tcp:<host>:<port>)");
    app.add_option("--start", start, "stack to start at boot, as name or name:alias")
        ->take_all();
    app.add_flag("--no-control", no_control, "do not serve the control protocol");
    CLI11_PARSE(app, argc, argv);

    pandora::Kernel kernel;
    pandora::register_stdlib(kernel.registry());

    try {
        if (!config.empty()) kernel.load_config_file(config);
        for (const auto& spec : start) {
            auto colon = spec.find(':');
            std::string name = spec.substr(0, colon);
            std::string alias = colon == std::string::npos ? "" : spec.substr(colon + 1);
            pandora::Handle h = kernel.start_stack(name, alias);
            std::cout << "started " << name << " handle " << h << '\n';
        }
    } catch (const pandora::Error& e) {
        std::cerr << "pandorad: " << e.what() << '\n';
        return 1;
    }

    std::unique_ptr<pandora::ControlServer> server;
    if (!no_control) {
        try {
            server = std::make_unique<pandora::ControlServer>(kernel, control);
            std::cout << "control endpoint: " << control << '\n';
        } catch (const pandora::Error& e) {
            std::cerr << "pandorad: " << e.what() << '\n';
            return 1;
        }
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    while (!interrupted.load()) {
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
    std::cout << "shutting down\n";
    if (server) server->stop();
    kernel.stop_all();
    return 0;
}
