#include "grammar_oracle.hpp"

#include <cerrno>
#include <cstdlib>
#include <string>

namespace pandora::test {

namespace {

// pile        ::= '%' id alias? '{' composant* '}'
// composant   ::= simple | demux | alternative
// simple      ::= '@' id alias? options?
// options     ::= ('[' option (',' option)* ']')?
// alias       ::= ':' id
// demux       ::= simple '<' branche '>'
// alternative ::= simple '(' branche ('|' branche)* ')'
// branche     ::= composant+
// option      ::= '$' id alias? ('=' valeur)?
// id          ::= [a-zA-Z]([a-zA-Z0-9_])*
// valeur      ::= entier | flottant | booléen | '"' caractères '"'
//
// Lexical extensions mirrored from the implementation: whitespace between
// tokens, '#' comments, \" and \\ escapes, no control characters inside
// strings, decimal int64 integers, floats with a mandatory fraction digit.

struct Cursor {
    std::string_view s;
    size_t p = 0;

    bool eof() const { return p >= s.size(); }
    char peek() const { return s[p]; }
};

bool is_alpha(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_idchar(char c) { return is_alpha(c) || is_digit(c) || c == '_'; }

void skip(Cursor& c) {
    while (!c.eof()) {
        char ch = c.peek();
        if (ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n') {
            ++c.p;
        } else if (ch == '#') {
            while (!c.eof() && c.peek() != '\n') ++c.p;
        } else {
            break;
        }
    }
}

bool lit(Cursor& c, char ch) {
    skip(c);
    if (c.eof() || c.peek() != ch) return false;
    ++c.p;
    return true;
}

bool p_id(Cursor& c) {
    skip(c);
    if (c.eof() || !is_alpha(c.peek())) return false;
    ++c.p;
    while (!c.eof() && is_idchar(c.peek())) ++c.p;
    return true;
}

void p_alias_opt(Cursor& c) {
    Cursor save = c;
    if (lit(c, ':') && p_id(c)) return;
    c = save;
}

bool p_number(Cursor& c) {
    skip(c);
    size_t start = c.p;
    if (!c.eof() && (c.peek() == '+' || c.peek() == '-')) ++c.p;
    size_t digits_start = c.p;
    while (!c.eof() && is_digit(c.peek())) ++c.p;
    if (c.p == digits_start) {
        c.p = start;
        return false;
    }
    bool is_float = false;
    if (!c.eof() && c.peek() == '.') {
        size_t dot = c.p;
        ++c.p;
        size_t frac_start = c.p;
        while (!c.eof() && is_digit(c.peek())) ++c.p;
        if (c.p == frac_start) {
            c.p = dot;  // "1." is not a float; also not a valid integer suffix
            return false;
        }
        is_float = true;
    }
    if (!c.eof() && (c.peek() == 'e' || c.peek() == 'E')) {
        size_t exp = c.p;
        ++c.p;
        if (!c.eof() && (c.peek() == '+' || c.peek() == '-')) ++c.p;
        size_t exp_digits = c.p;
        while (!c.eof() && is_digit(c.peek())) ++c.p;
        if (c.p == exp_digits) {
            c.p = exp;
            return false;
        }
        is_float = true;
    }
    if (!is_float) {
        // Integers must fit 64 bits, like the implementation.
        std::string text(c.s.substr(start, c.p - start));
        errno = 0;
        char* end = nullptr;
        (void)std::strtoll(text.c_str(), &end, 10);
        if (errno == ERANGE || end != text.c_str() + text.size()) return false;
    }
    return true;
}

bool p_string(Cursor& c) {
    skip(c);
    if (c.eof() || c.peek() != '"') return false;
    ++c.p;
    while (!c.eof()) {
        char ch = c.peek();
        if (ch == '"') {
            ++c.p;
            return true;
        }
        if (ch == '\\') {
            ++c.p;
            if (c.eof()) return false;
            char esc = c.peek();
            if (esc != '"' && esc != '\\') return false;
            ++c.p;
            continue;
        }
        if (static_cast<unsigned char>(ch) < 0x20) return false;
        ++c.p;
    }
    return false;  // unterminated
}

bool p_bool(Cursor& c) {
    skip(c);
    for (std::string_view word : {"true", "false"}) {
        if (c.s.substr(c.p, word.size()) == word) {
            size_t after = c.p + word.size();
            if (after >= c.s.size() || !is_idchar(c.s[after])) {
                c.p = after;
                return true;
            }
        }
    }
    return false;
}

bool p_value(Cursor& c) {
    Cursor save = c;
    if (p_number(c)) return true;
    c = save;
    if (p_bool(c)) return true;
    c = save;
    if (p_string(c)) return true;
    c = save;
    return false;
}

bool p_option(Cursor& c) {
    if (!lit(c, '$')) return false;
    if (!p_id(c)) return false;
    p_alias_opt(c);
    Cursor save = c;
    if (lit(c, '=')) {
        if (!p_value(c)) return false;  // '=' commits to a value
        return true;
    }
    c = save;
    return true;
}

bool p_options_opt(Cursor& c) {
    Cursor save = c;
    if (!lit(c, '[')) {
        c = save;
        return true;
    }
    if (!p_option(c)) return false;  // '[' commits to at least one option
    while (true) {
        Cursor at_comma = c;
        if (lit(c, ',')) {
            if (!p_option(c)) return false;
            continue;
        }
        c = at_comma;
        break;
    }
    return lit(c, ']');
}

bool p_composant(Cursor& c);

bool p_branche(Cursor& c) {
    if (!p_composant(c)) return false;
    while (true) {
        Cursor save = c;
        if (!p_composant(c)) {
            c = save;
            break;
        }
    }
    return true;
}

bool p_simple(Cursor& c) {
    if (!lit(c, '@')) return false;
    if (!p_id(c)) return false;
    p_alias_opt(c);
    return p_options_opt(c);
}

bool p_composant(Cursor& c) {
    if (!p_simple(c)) return false;
    Cursor after_simple = c;
    if (lit(c, '<')) {
        if (p_branche(c) && lit(c, '>')) return true;
        return false;  // '<' commits to a demux block
    }
    c = after_simple;
    if (lit(c, '(')) {
        if (!p_branche(c)) return false;
        while (true) {
            Cursor at_pipe = c;
            if (lit(c, '|')) {
                if (!p_branche(c)) return false;
                continue;
            }
            c = at_pipe;
            break;
        }
        return lit(c, ')');
    }
    c = after_simple;
    return true;
}

bool p_pile(Cursor& c) {
    if (!lit(c, '%')) return false;
    if (!p_id(c)) return false;
    p_alias_opt(c);
    if (!lit(c, '{')) return false;
    while (true) {
        Cursor save = c;
        if (!p_composant(c)) {
            c = save;
            break;
        }
    }
    return lit(c, '}');
}

} // namespace

bool grammar_accepts(std::string_view text) {
    Cursor c{text, 0};
    if (!p_pile(c)) return false;
    skip(c);
    return c.eof();
}

} // namespace pandora::test
