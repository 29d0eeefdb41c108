#include "pandora/control.hpp"

#include "pandora/adl.hpp"

#include <algorithm>
#include <sstream>

namespace pandora {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Pops the next space-delimited word; the remainder is trimmed.
std::string_view pop_word(std::string_view& rest) {
    rest = trim(rest);
    size_t sp = rest.find_first_of(" \t");
    std::string_view word = sp == std::string_view::npos ? rest : rest.substr(0, sp);
    rest = sp == std::string_view::npos ? std::string_view{} : trim(rest.substr(sp + 1));
    return word;
}

std::string one_line(std::string_view s) {
    std::string out(s);
    std::replace(out.begin(), out.end(), '\n', ' ');
    std::replace(out.begin(), out.end(), '\r', ' ');
    return out;
}

ControlResponse ok(std::vector<std::string> payload = {}) {
    ControlResponse r;
    r.ok = true;
    r.payload = std::move(payload);
    return r;
}

Handle parse_handle(std::string_view word) {
    if (word.empty() || word.find_first_not_of("0123456789") != std::string_view::npos) {
        throw Error(ErrorCode::UnknownHandle, "handle must be a number, got '" +
                                                  std::string(word) + "'");
    }
    return std::stoull(std::string(word));
}

ControlResponse dispatch(Kernel& kernel, std::string_view line) {
    std::string_view rest = trim(line);
    std::string_view cmd = pop_word(rest);

    if (cmd == "LIST") {
        if (!rest.empty()) throw Error(ErrorCode::Syntax, "LIST takes no arguments");
        std::vector<std::string> rows;
        for (const auto& row : kernel.list_stacks()) {
            std::ostringstream os;
            os << row.handle << ' ' << row.name << ' ' << (row.alias.empty() ? "-" : row.alias)
               << ' ' << to_string(row.state);
            rows.push_back(os.str());
        }
        return ok(std::move(rows));
    }
    if (cmd == "GET") {
        Scope scope = parse_scope(pop_word(rest));
        std::string_view path_text = pop_word(rest);
        std::string_view option = pop_word(rest);
        if (option.empty() || !rest.empty()) {
            throw Error(ErrorCode::Syntax, "usage: GET <scope> <path> <option>");
        }
        ScalarValue v = kernel.get_option(scope, parse_path(path_text), std::string(option));
        return ok({v.render()});
    }
    if (cmd == "SET") {
        Scope scope = parse_scope(pop_word(rest));
        std::string_view path_text = pop_word(rest);
        std::string_view option = pop_word(rest);
        if (option.empty() || rest.empty()) {
            throw Error(ErrorCode::Syntax, "usage: SET <scope> <path> <option> <value>");
        }
        ScalarValue v = parse_literal(rest);
        kernel.set_option(scope, parse_path(path_text), std::string(option), v);
        return ok();
    }
    if (cmd == "START") {
        std::string_view name = pop_word(rest);
        std::string_view alias = pop_word(rest);
        if (name.empty() || !rest.empty()) {
            throw Error(ErrorCode::Syntax, "usage: START <name> [alias]");
        }
        Handle h = kernel.start_stack(std::string(name), std::string(alias));
        return ok({std::to_string(h)});
    }
    if (cmd == "STOP") {
        std::string_view word = pop_word(rest);
        if (word.empty() || !rest.empty()) throw Error(ErrorCode::Syntax, "usage: STOP <handle>");
        kernel.stop_stack(parse_handle(word));
        return ok();
    }
    if (cmd == "DEFINE") {
        if (rest.empty()) throw Error(ErrorCode::Syntax, "usage: DEFINE <definition...>");
        kernel.load_config_text(rest);
        return ok();
    }
    if (cmd == "DUMP") {
        std::string_view name = pop_word(rest);
        if (name.empty() || !rest.empty()) throw Error(ErrorCode::Syntax, "usage: DUMP <name>");
        const StackDefinition* def = kernel.stored_definition(name);
        if (!def) {
            throw Error(ErrorCode::UnknownStack,
                        "no stored definition named '" + std::string(name) + "'");
        }
        return ok({render_stack(*def)});
    }
    if (cmd == "RECONF") {
        std::string_view word = pop_word(rest);
        if (word.empty() || rest.empty()) {
            throw Error(ErrorCode::Syntax, "usage: RECONF <handle> <definition>");
        }
        Handle h = parse_handle(word);
        StackDefinition def = parse_stack(rest);
        kernel.reconfigure(h, def);
        return ok();
    }
    if (cmd == "SENSOR") {
        std::string_view sub = pop_word(rest);
        if (sub == "LIST") {
            if (!rest.empty()) throw Error(ErrorCode::Syntax, "usage: SENSOR LIST");
            std::vector<std::string> rows;
            for (const auto& cell : kernel.sensors().list()) {
                std::ostringstream os;
                os << cell->name() << ' '
                   << (cell->kind() == SensorKind::Int ? "int" : "float") << ' '
                   << cell->render() << ' ' << (cell->stale() ? "stale" : "live");
                rows.push_back(os.str());
            }
            return ok(std::move(rows));
        }
        if (sub == "GET") {
            std::string_view name = pop_word(rest);
            if (name.empty() || !rest.empty()) {
                throw Error(ErrorCode::Syntax, "usage: SENSOR GET <flat name>");
            }
            SensorRef ref = kernel.sensors().lookup(name);
            return ok({ref->render()});
        }
        throw Error(ErrorCode::Syntax, "usage: SENSOR LIST | SENSOR GET <flat name>");
    }
    throw Error(ErrorCode::Syntax, "unknown command '" + std::string(cmd) + "'");
}

} // namespace

std::string ControlResponse::wire_form() const {
    std::ostringstream os;
    if (ok) {
        os << "OK " << payload.size() << '\n';
        for (const auto& line : payload) os << line << '\n';
    } else {
        os << "ERR " << error_code << ' ' << message << '\n';
    }
    return os.str();
}

ControlResponse execute_control_line(Kernel& kernel, std::string_view line) {
    try {
        return dispatch(kernel, line);
    } catch (const Error& e) {
        ControlResponse r;
        r.ok = false;
        r.error_code = to_token(e.code());
        r.message = one_line(e.what());
        return r;
    } catch (const std::exception& e) {
        ControlResponse r;
        r.ok = false;
        r.error_code = to_token(ErrorCode::Internal);
        r.message = one_line(e.what());
        return r;
    }
}

ScalarValue control_get(Kernel& kernel, Scope scope, std::string_view path_text,
                        const std::string& option) {
    return kernel.get_option(scope, parse_path(path_text), option);
}

void control_set(Kernel& kernel, Scope scope, std::string_view path_text,
                 const std::string& option, std::string_view value_literal) {
    kernel.set_option(scope, parse_path(path_text), option, parse_literal(value_literal));
}

} // namespace pandora
