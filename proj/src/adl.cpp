#include "pandora/adl.hpp"

#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace pandora {

namespace {

enum class Tok {
    Percent, At, Dollar, Colon,
    LBrace, RBrace, LBracket, RBracket,
    Less, Greater, LParen, RParen,
    Pipe, Comma, Equals,
    Ident, Int, Float, String,
    End,
};

const char* token_name(Tok t) {
    switch (t) {
    case Tok::Percent: return "'%'";
    case Tok::At: return "'@'";
    case Tok::Dollar: return "'$'";
    case Tok::Colon: return "':'";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::LBracket: return "'['";
    case Tok::RBracket: return "']'";
    case Tok::Less: return "'<'";
    case Tok::Greater: return "'>'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Pipe: return "'|'";
    case Tok::Comma: return "','";
    case Tok::Equals: return "'='";
    case Tok::Ident: return "identifier";
    case Tok::Int: return "integer";
    case Tok::Float: return "float";
    case Tok::String: return "string";
    case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind = Tok::End;
    std::string text;
    int64_t ival = 0;
    double fval = 0.0;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_blank();
        Token t;
        t.line = line_;
        t.col = col_;
        if (pos_ >= src_.size()) {
            t.kind = Tok::End;
            return t;
        }
        char c = src_[pos_];
        switch (c) {
        case '%': return punct(t, Tok::Percent);
        case '@': return punct(t, Tok::At);
        case '$': return punct(t, Tok::Dollar);
        case ':': return punct(t, Tok::Colon);
        case '{': return punct(t, Tok::LBrace);
        case '}': return punct(t, Tok::RBrace);
        case '[': return punct(t, Tok::LBracket);
        case ']': return punct(t, Tok::RBracket);
        case '<': return punct(t, Tok::Less);
        case '>': return punct(t, Tok::Greater);
        case '(': return punct(t, Tok::LParen);
        case ')': return punct(t, Tok::RParen);
        case '|': return punct(t, Tok::Pipe);
        case ',': return punct(t, Tok::Comma);
        case '=': return punct(t, Tok::Equals);
        case '"': return lex_string(t);
        default: break;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) return lex_ident(t);
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-')
            return lex_number(t);
        throw SyntaxError(line_, col_, std::string("unexpected character '") + c + "'");
    }

private:
    Token& punct(Token& t, Tok kind) {
        t.kind = kind;
        t.text = src_[pos_];
        bump();
        return t;
    }

    Token& lex_ident(Token& t) {
        size_t start = pos_;
        bump();
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') bump();
            else break;
        }
        t.kind = Tok::Ident;
        t.text = std::string(src_.substr(start, pos_ - start));
        return t;
    }

    Token& lex_number(Token& t) {
        size_t start = pos_;
        if (src_[pos_] == '+' || src_[pos_] == '-') {
            bump();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw SyntaxError(t.line, t.col, "expected digit after sign");
        }
        digits();
        bool is_float = false;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            bump();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw SyntaxError(t.line, t.col, "expected digit after decimal point");
            digits();
            is_float = true;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            bump();
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) bump();
            if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
                throw SyntaxError(t.line, t.col, "expected digit in exponent");
            digits();
            is_float = true;
        }
        std::string text(src_.substr(start, pos_ - start));
        if (is_float) {
            t.kind = Tok::Float;
            t.fval = std::strtod(text.c_str(), nullptr);
        } else {
            t.kind = Tok::Int;
            const char* first = text.data();
            // from_chars rejects a leading '+'.
            if (*first == '+') ++first;
            auto [p, ec] = std::from_chars(first, text.data() + text.size(), t.ival);
            if (ec != std::errc() || p != text.data() + text.size())
                throw SyntaxError(t.line, t.col, "integer literal out of range: " + text);
        }
        t.text = std::move(text);
        return t;
    }

    Token& lex_string(Token& t) {
        bump();  // opening quote
        std::string out;
        while (true) {
            if (pos_ >= src_.size())
                throw SyntaxError(t.line, t.col, "unterminated string");
            char c = src_[pos_];
            if (c == '"') {
                bump();
                break;
            }
            if (c == '\\') {
                bump();
                if (pos_ >= src_.size())
                    throw SyntaxError(t.line, t.col, "unterminated string");
                char esc = src_[pos_];
                if (esc != '"' && esc != '\\')
                    throw SyntaxError(line_, col_,
                                      std::string("invalid escape '\\") + esc + "'");
                out += esc;
                bump();
                continue;
            }
            if (static_cast<unsigned char>(c) < 0x20)
                throw SyntaxError(line_, col_, "control character in string");
            out += c;
            bump();
        }
        t.kind = Tok::String;
        t.text = std::move(out);
        return t;
    }

    void digits() {
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) bump();
    }

    void skip_blank() {
        while (pos_ < src_.size()) {
            char c = src_[pos_];
            if (c == '#') {
                while (pos_ < src_.size() && src_[pos_] != '\n') bump();
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                bump();
            } else {
                break;
            }
        }
    }

    void bump() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    std::string_view src_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    StackDefinition parse_definition() {
        expect(Tok::Percent);
        StackDefinition def;
        def.name = expect_ident("stack name");
        def.alias = parse_alias();
        expect(Tok::LBrace);
        while (cur_.kind != Tok::RBrace) {
            if (cur_.kind != Tok::At)
                fail({"'@'", "'}'"});
            def.body.push_back(parse_component());
        }
        expect(Tok::RBrace);
        check_aliases(def);
        return def;
    }

    bool at_end() const { return cur_.kind == Tok::End; }
    void require_end() {
        if (cur_.kind != Tok::End) fail({"end of input"});
    }
    bool at_definition_start() const { return cur_.kind == Tok::Percent; }

    ScalarValue parse_single_value() {
        ScalarValue v = parse_value();
        require_end();
        return v;
    }

private:
    ComponentNode parse_component() {
        expect(Tok::At);
        ComponentNode node;
        node.type_id = expect_ident("component type");
        node.alias = parse_alias();
        node.options = parse_options();
        if (cur_.kind == Tok::Less) {
            advance();
            node.shape = NodeShape::Demux;
            node.branches.push_back(parse_branch());
            expect(Tok::Greater);
        } else if (cur_.kind == Tok::LParen) {
            advance();
            node.shape = NodeShape::Alternative;
            node.branches.push_back(parse_branch());
            while (cur_.kind == Tok::Pipe) {
                advance();
                node.branches.push_back(parse_branch());
            }
            expect(Tok::RParen);
        }
        return node;
    }

    std::vector<ComponentNode> parse_branch() {
        // branche ::= composant+
        if (cur_.kind != Tok::At) fail({"'@'"});
        std::vector<ComponentNode> chain;
        while (cur_.kind == Tok::At) chain.push_back(parse_component());
        return chain;
    }

    std::vector<OptionBinding> parse_options() {
        std::vector<OptionBinding> out;
        if (cur_.kind != Tok::LBracket) return out;
        advance();
        out.push_back(parse_option());
        while (cur_.kind == Tok::Comma) {
            advance();
            out.push_back(parse_option());
        }
        expect(Tok::RBracket);
        return out;
    }

    OptionBinding parse_option() {
        expect(Tok::Dollar);
        OptionBinding binding;
        binding.name = expect_ident("option name");
        binding.alias = parse_alias();
        if (cur_.kind == Tok::Equals) {
            advance();
            binding.value = parse_value();
        }
        return binding;
    }

    ScalarValue parse_value() {
        switch (cur_.kind) {
        case Tok::Int: {
            ScalarValue v(cur_.ival);
            advance();
            return v;
        }
        case Tok::Float: {
            ScalarValue v(cur_.fval);
            advance();
            return v;
        }
        case Tok::String: {
            ScalarValue v(cur_.text);
            advance();
            return v;
        }
        case Tok::Ident:
            if (cur_.text == "true" || cur_.text == "false") {
                ScalarValue v(cur_.text == "true");
                advance();
                return v;
            }
            fail({"integer", "float", "'true'", "'false'", "string"});
        default:
            fail({"integer", "float", "'true'", "'false'", "string"});
        }
    }

    std::string parse_alias() {
        if (cur_.kind != Tok::Colon) return {};
        advance();
        return expect_ident("alias");
    }

    void check_aliases(const StackDefinition& def) {
        // Component and option aliases share one exposure namespace per
        // definition.
        std::set<std::string> seen;
        auto note = [&](const std::string& alias) {
            if (alias.empty()) return;
            if (!seen.insert(alias).second)
                throw Error(ErrorCode::DuplicateAlias,
                            "duplicate alias ':" + alias + "' in stack '" + def.name + "'");
        };
        auto walk = [&](auto&& self, const ComponentNode& node) -> void {
            note(node.alias);
            for (const auto& b : node.options) note(b.alias);
            for (const auto& branch : node.branches)
                for (const auto& child : branch) self(self, child);
        };
        for (const auto& node : def.body) walk(walk, node);
    }

    std::string expect_ident(const char* what) {
        if (cur_.kind != Tok::Ident) fail({what});
        std::string s = std::move(cur_.text);
        advance();
        return s;
    }

    void expect(Tok kind) {
        if (cur_.kind != kind) fail({token_name(kind)});
        advance();
    }

    [[noreturn]] void fail(std::vector<std::string> expected) {
        throw SyntaxError(cur_.line, cur_.col,
                          std::string("unexpected ") + token_name(cur_.kind), std::move(expected));
    }

    void advance() { cur_ = lex_.next(); }

    Lexer lex_;
    Token cur_;
};

} // namespace

StackDefinition parse_stack(std::string_view text) {
    Parser p(text);
    StackDefinition def = p.parse_definition();
    p.require_end();
    return def;
}

std::vector<StackDefinition> parse_config(std::string_view text) {
    Parser p(text);
    std::vector<StackDefinition> defs;
    while (!p.at_end()) {
        if (!p.at_definition_start()) p.require_end();  // reports expected set
        defs.push_back(p.parse_definition());
    }
    return defs;
}

ScalarValue parse_literal(std::string_view text) {
    Parser p(text);
    return p.parse_single_value();
}

namespace {

void render_node(std::ostream& os, const ComponentNode& node) {
    os << '@' << node.type_id;
    if (!node.alias.empty()) os << ':' << node.alias;
    if (!node.options.empty()) {
        os << '[';
        for (size_t i = 0; i < node.options.size(); ++i) {
            if (i) os << ", ";
            const auto& b = node.options[i];
            os << '$' << b.name;
            if (!b.alias.empty()) os << ':' << b.alias;
            if (b.value) os << '=' << b.value->render();
        }
        os << ']';
    }
    auto render_chain = [&](const std::vector<ComponentNode>& chain) {
        for (size_t i = 0; i < chain.size(); ++i) {
            if (i) os << ' ';
            render_node(os, chain[i]);
        }
    };
    if (node.shape == NodeShape::Demux) {
        os << '<';
        render_chain(node.branches.front());
        os << '>';
    } else if (node.shape == NodeShape::Alternative) {
        os << '(';
        for (size_t i = 0; i < node.branches.size(); ++i) {
            if (i) os << " | ";
            render_chain(node.branches[i]);
        }
        os << ')';
    }
}

} // namespace

std::string render_component(const ComponentNode& node) {
    std::ostringstream os;
    render_node(os, node);
    return os.str();
}

std::string render_stack(const StackDefinition& def) {
    std::ostringstream os;
    os << '%' << def.name;
    if (!def.alias.empty()) os << ':' << def.alias;
    os << " {";
    for (const auto& node : def.body) {
        os << ' ';
        render_node(os, node);
    }
    os << " }";
    return os.str();
}

} // namespace pandora
