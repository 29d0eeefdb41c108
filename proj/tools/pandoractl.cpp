// Control protocol client, one subcommand per protocol command.

#include "pandora/adl.hpp"
#include "pandora/control.hpp"
#include "pandora/value.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw pandora::Error(pandora::ErrorCode::Io, "cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Bare words are a convenience for string options: `set ... device eth1`
// sends the quoted literal.
std::string as_literal(const std::string& value) {
    try {
        (void)pandora::parse_literal(value);
        return value;
    } catch (const pandora::Error&) {
        return pandora::quote_string(value);
    }
}

std::string one_line(std::string text) {
    for (auto& c : text) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

int emit(const pandora::ControlResponse& resp, bool json) {
    if (json) {
        nlohmann::json j;
        j["ok"] = resp.ok;
        if (resp.ok) {
            j["payload"] = resp.payload;
        } else {
            j["code"] = resp.error_code;
            j["message"] = resp.message;
        }
        std::cout << j.dump() << '\n';
    } else if (resp.ok) {
        for (const auto& line : resp.payload) std::cout << line << '\n';
    } else {
        std::cerr << "error (" << resp.error_code << "): " << resp.message << '\n';
    }
    return resp.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pandora control client"};
    std::string endpoint = "unix:/tmp/pandora.sock";
    bool json = false;
    app.add_option("--endpoint", endpoint, "control endpoint");
    app.add_flag("--json", json, "machine-readable output");
    app.require_subcommand(1);

    std::string wire;

    auto scope_flags = [](CLI::App* cmd, bool& active, bool& stored) {
        cmd->add_flag("--active", active, "live representation");
        cmd->add_flag("--stored", stored, "stored definition");
    };
    auto scope_word = [](bool active, bool stored) -> std::string {
        if (active == stored) {
            throw CLI::ValidationError("pass exactly one of --active / --stored");
        }
        return active ? "active" : "stored";
    };

    app.add_subcommand("list", "running stacks")->callback([&] { wire = "LIST"; });

    {
        auto* cmd = app.add_subcommand("get", "read an option");
        static bool active = false, stored = false;
        static std::string path, option;
        scope_flags(cmd, active, stored);
        cmd->add_option("path", path)->required();
        cmd->add_option("option", option)->required();
        cmd->callback([&] { wire = "GET " + scope_word(active, stored) + " " + path + " " + option; });
    }
    {
        auto* cmd = app.add_subcommand("set", "write an option");
        static bool active = false, stored = false;
        static std::string path, option, value;
        scope_flags(cmd, active, stored);
        cmd->add_option("path", path)->required();
        cmd->add_option("option", option)->required();
        cmd->add_option("value", value)->required();
        cmd->callback([&] {
            wire = "SET " + scope_word(active, stored) + " " + path + " " + option + " " +
                   as_literal(value);
        });
    }
    {
        auto* cmd = app.add_subcommand("start", "start a stored stack");
        static std::string name, alias;
        cmd->add_option("name", name)->required();
        cmd->add_option("alias", alias);
        cmd->callback([&] { wire = "START " + name + (alias.empty() ? "" : " " + alias); });
    }
    {
        auto* cmd = app.add_subcommand("stop", "stop a running stack");
        static std::string handle;
        cmd->add_option("handle", handle)->required();
        cmd->callback([&] { wire = "STOP " + handle; });
    }
    {
        auto* cmd = app.add_subcommand("define", "store definitions");
        static std::string text, file;
        cmd->add_option("text", text, "definition text");
        cmd->add_option("--file", file, "read definitions from a file");
        cmd->callback([&] {
            std::string body = file.empty() ? text : slurp(file);
            if (body.empty()) throw CLI::ValidationError("define needs text or --file");
            wire = "DEFINE " + one_line(body);
        });
    }
    {
        auto* cmd = app.add_subcommand("dump", "canonical form of a stored definition");
        static std::string name;
        cmd->add_option("name", name)->required();
        cmd->callback([&] { wire = "DUMP " + name; });
    }
    {
        auto* cmd = app.add_subcommand("reconf", "reconfigure a running stack");
        static std::string handle, text, file;
        cmd->add_option("handle", handle)->required();
        cmd->add_option("text", text, "new definition text");
        cmd->add_option("--file", file, "read the new definition from a file");
        cmd->callback([&] {
            std::string body = file.empty() ? text : slurp(file);
            if (body.empty()) throw CLI::ValidationError("reconf needs text or --file");
            wire = "RECONF " + handle + " " + one_line(body);
        });
    }
    {
        auto* cmd = app.add_subcommand("sensor", "sensor directory");
        auto* ls = cmd->add_subcommand("list", "all sensors");
        ls->callback([&] { wire = "SENSOR LIST"; });
        auto* get = cmd->add_subcommand("get", "one sensor value");
        static std::string name;
        get->add_option("name", name)->required();
        get->callback([&] { wire = "SENSOR GET " + name; });
        cmd->require_subcommand(1);
    }

    CLI11_PARSE(app, argc, argv);

    try {
        pandora::ControlClient client(endpoint);
        return emit(client.request(wire), json);
    } catch (const pandora::Error& e) {
        if (json) {
            nlohmann::json j{{"ok", false}, {"code", to_token(e.code())}, {"message", e.what()}};
            std::cout << j.dump() << '\n';
        } else {
            std::cerr << "pandoractl: " << e.what() << '\n';
        }
        return 1;
    }
}
