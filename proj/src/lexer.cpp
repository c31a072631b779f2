#include "plccov/lexer.hpp"

#include <cctype>
#include <set>

#include "plccov/errors.hpp"

namespace plccov {

static const std::set<std::string>& keyword_set() {
    static const std::set<std::string> kw = {
        "PROGRAM", "END_PROGRAM", "FUNCTION_BLOCK", "END_FUNCTION_BLOCK", "FUNCTION",
        "END_FUNCTION", "VAR", "VAR_INPUT", "VAR_OUTPUT", "VAR_GLOBAL", "END_VAR", "ACTION",
        "END_ACTION", "STEP", "INITIAL", "END_STEP", "QUALIFIER", "TRANSITION", "FROM", "TO",
        "WHEN", "END_TRANSITION", "IF", "THEN", "ELSIF", "ELSE", "END_IF", "CASE", "OF",
        "END_CASE", "FOR", "BY", "DO", "END_FOR", "WHILE", "END_WHILE", "REPEAT", "UNTIL",
        "END_REPEAT", "RETURN", "EXIT", "AND", "OR", "XOR", "NOT", "MOD", "TRUE", "FALSE",
        "BOOL", "INT", "DINT", "REAL", "TIME", "STRING", "ARRAY", "AT",
    };
    return kw;
}

bool is_keyword(const std::string& upper) { return keyword_set().count(upper) > 0; }

namespace {

class Cursor {
  public:
    Cursor(const std::string& file, const std::string& text) : file_(file), text_(text) {}

    bool eof() const { return pos_ >= text_.size(); }
    char peek(size_t ahead = 0) const {
        return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0';
    }
    char take() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }
    SourceLoc loc() const { return {file_, line_, col_}; }

  private:
    const std::string& file_;
    const std::string& text_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

std::string to_upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

// TIME literal tail after "T#": a sequence of <digits><unit> with units d/h/m/s/ms.
int64_t parse_time_body(Cursor& cur, const SourceLoc& at) {
    int64_t total_ms = 0;
    bool any = false;
    while (std::isdigit(static_cast<unsigned char>(cur.peek()))) {
        int64_t n = 0;
        while (std::isdigit(static_cast<unsigned char>(cur.peek())))
            n = n * 10 + (cur.take() - '0');
        std::string unit;
        while (std::isalpha(static_cast<unsigned char>(cur.peek())))
            unit += static_cast<char>(std::tolower(static_cast<unsigned char>(cur.take())));
        if (unit == "d") total_ms += n * 86400000;
        else if (unit == "h") total_ms += n * 3600000;
        else if (unit == "m") total_ms += n * 60000;
        else if (unit == "s") total_ms += n * 1000;
        else if (unit == "ms") total_ms += n;
        else throw ParseError(at, "bad TIME literal unit '" + unit + "'");
        any = true;
    }
    if (!any) throw ParseError(at, "empty TIME literal");
    return total_ms;
}

} // namespace

std::vector<Token> lex(const std::string& file, const std::string& text) {
    std::vector<Token> out;
    Cursor cur(file, text);

    while (!cur.eof()) {
        char c = cur.peek();
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            cur.take();
            continue;
        }
        if (c == '/' && cur.peek(1) == '/') {
            while (!cur.eof() && cur.peek() != '\n') cur.take();
            continue;
        }
        if (c == '(' && cur.peek(1) == '*') {
            SourceLoc start = cur.loc();
            cur.take();
            cur.take();
            while (!(cur.peek() == '*' && cur.peek(1) == ')')) {
                if (cur.eof()) throw ParseError(start, "unterminated comment");
                cur.take();
            }
            cur.take();
            cur.take();
            continue;
        }

        Token t;
        t.loc = cur.loc();

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string word;
            while (std::isalnum(static_cast<unsigned char>(cur.peek())) || cur.peek() == '_')
                word += cur.take();
            std::string upper = to_upper(word);
            // TIME literal: T#...
            if ((upper == "T" || upper == "TIME") && cur.peek() == '#') {
                cur.take();
                t.kind = Tok::TimeLit;
                t.ival = parse_time_body(cur, t.loc);
            } else if (is_keyword(upper)) {
                t.kind = Tok::Keyword;
                t.text = upper;
            } else {
                t.kind = Tok::Ident;
                t.text = word;
            }
            out.push_back(std::move(t));
            continue;
        }

        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::string num;
            while (std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.take();
            bool real = false;
            if (cur.peek() == '.' && cur.peek(1) != '.') { // not the `..` range token
                real = true;
                num += cur.take();
                while (std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.take();
            }
            if (cur.peek() == 'e' || cur.peek() == 'E') {
                real = true;
                num += cur.take();
                if (cur.peek() == '+' || cur.peek() == '-') num += cur.take();
                if (!std::isdigit(static_cast<unsigned char>(cur.peek())))
                    throw ParseError(t.loc, "bad exponent in number");
                while (std::isdigit(static_cast<unsigned char>(cur.peek()))) num += cur.take();
            }
            if (real) {
                t.kind = Tok::RealLit;
                t.rval = std::stod(num);
            } else {
                t.kind = Tok::IntLit;
                t.ival = std::stoll(num);
            }
            out.push_back(std::move(t));
            continue;
        }

        if (c == '\'') {
            cur.take();
            std::string s;
            while (cur.peek() != '\'') {
                if (cur.eof() || cur.peek() == '\n')
                    throw ParseError(t.loc, "unterminated string literal");
                s += cur.take();
            }
            cur.take();
            t.kind = Tok::StringLit;
            t.text = std::move(s);
            out.push_back(std::move(t));
            continue;
        }

        cur.take();
        switch (c) {
        case ':':
            if (cur.peek() == '=') {
                cur.take();
                t.kind = Tok::Assign;
            } else {
                t.kind = Tok::Colon;
            }
            break;
        case '=':
            if (cur.peek() == '>') {
                cur.take();
                t.kind = Tok::OutArrow;
            } else {
                t.kind = Tok::Eq;
            }
            break;
        case '<':
            if (cur.peek() == '=') {
                cur.take();
                t.kind = Tok::Le;
            } else if (cur.peek() == '>') {
                cur.take();
                t.kind = Tok::Ne;
            } else {
                t.kind = Tok::Lt;
            }
            break;
        case '>':
            if (cur.peek() == '=') {
                cur.take();
                t.kind = Tok::Ge;
            } else {
                t.kind = Tok::Gt;
            }
            break;
        case '.':
            if (cur.peek() == '.') {
                cur.take();
                t.kind = Tok::DotDot;
            } else {
                throw ParseError(t.loc, "unexpected '.'");
            }
            break;
        case '(': t.kind = Tok::LParen; break;
        case ')': t.kind = Tok::RParen; break;
        case '[': t.kind = Tok::LBracket; break;
        case ']': t.kind = Tok::RBracket; break;
        case ',': t.kind = Tok::Comma; break;
        case ';': t.kind = Tok::Semi; break;
        case '+': t.kind = Tok::Plus; break;
        case '-': t.kind = Tok::Minus; break;
        case '*': t.kind = Tok::Star; break;
        case '/': t.kind = Tok::Slash; break;
        case '%': t.kind = Tok::Percent; break;
        default:
            throw ParseError(t.loc, std::string("unexpected character '") + c + "'");
        }
        out.push_back(std::move(t));
    }

    Token end;
    end.kind = Tok::End;
    end.loc = cur.loc();
    out.push_back(std::move(end));
    return out;
}

} // namespace plccov
