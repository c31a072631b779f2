#include "plccov/xml.hpp"

#include <cctype>
#include <cstring>

#include "plccov/errors.hpp"

namespace plccov {

const std::string* XmlNode::attr(const std::string& key) const {
    for (const auto& [k, v] : attrs)
        if (k == key) return &v;
    return nullptr;
}

std::string XmlNode::attr_or(const std::string& key, const std::string& fallback) const {
    const std::string* v = attr(key);
    return v ? *v : fallback;
}

const std::string& XmlNode::need(const std::string& key) const {
    const std::string* v = attr(key);
    if (!v) throw ConsistencyError("<" + name + "> is missing attribute '" + key + "'");
    return *v;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

namespace {

class XmlParser {
  public:
    explicit XmlParser(const std::string& text) : t_(text) {}

    XmlNode parse() {
        skip_prolog();
        XmlNode root = element();
        skip_ws();
        if (pos_ != t_.size()) fail("trailing content after root element");
        return root;
    }

  private:
    const std::string& t_;
    size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConsistencyError("malformed XML at offset " + std::to_string(pos_) + ": " + msg);
    }

    char peek() const { return pos_ < t_.size() ? t_[pos_] : '\0'; }
    bool starts_with(const char* s) const { return t_.compare(pos_, std::strlen(s), s) == 0; }

    void skip_ws() {
        while (pos_ < t_.size() && std::isspace(static_cast<unsigned char>(t_[pos_]))) ++pos_;
    }

    void skip_prolog() {
        skip_ws();
        while (starts_with("<?") || starts_with("<!--")) {
            const char* close = starts_with("<?") ? "?>" : "-->";
            size_t end = t_.find(close, pos_);
            if (end == std::string::npos) fail("unterminated prolog");
            pos_ = end + std::strlen(close);
            skip_ws();
        }
    }

    std::string name_token() {
        size_t start = pos_;
        while (pos_ < t_.size() && (std::isalnum(static_cast<unsigned char>(t_[pos_])) ||
                                    t_[pos_] == '_' || t_[pos_] == '-' || t_[pos_] == ':'))
            ++pos_;
        if (pos_ == start) fail("expected a name");
        return t_.substr(start, pos_ - start);
    }

    std::string attr_value() {
        if (peek() != '"') fail("expected '\"'");
        ++pos_;
        std::string out;
        while (peek() != '"') {
            if (pos_ >= t_.size()) fail("unterminated attribute value");
            if (peek() == '&') {
                size_t semi = t_.find(';', pos_);
                if (semi == std::string::npos) fail("bad entity");
                std::string ent = t_.substr(pos_, semi - pos_ + 1);
                if (ent == "&amp;") out += '&';
                else if (ent == "&lt;") out += '<';
                else if (ent == "&gt;") out += '>';
                else if (ent == "&quot;") out += '"';
                else if (ent == "&apos;") out += '\'';
                else fail("unknown entity " + ent);
                pos_ = semi + 1;
            } else {
                out += t_[pos_++];
            }
        }
        ++pos_;
        return out;
    }

    XmlNode element() {
        skip_ws();
        if (peek() != '<') fail("expected an element");
        ++pos_;
        XmlNode node;
        node.name = name_token();
        for (;;) {
            skip_ws();
            if (starts_with("/>")) {
                pos_ += 2;
                return node;
            }
            if (peek() == '>') {
                ++pos_;
                break;
            }
            std::string key = name_token();
            skip_ws();
            if (peek() != '=') fail("expected '='");
            ++pos_;
            skip_ws();
            node.attrs.emplace_back(std::move(key), attr_value());
        }
        for (;;) {
            skip_ws();
            if (starts_with("<!--")) {
                size_t end = t_.find("-->", pos_);
                if (end == std::string::npos) fail("unterminated comment");
                pos_ = end + 3;
                continue;
            }
            if (starts_with("</")) {
                pos_ += 2;
                std::string close = name_token();
                if (close != node.name) fail("mismatched close tag " + close);
                skip_ws();
                if (peek() != '>') fail("expected '>'");
                ++pos_;
                return node;
            }
            if (peek() == '<') {
                node.children.push_back(element());
                continue;
            }
            fail("unexpected content in <" + node.name + ">");
        }
    }
};

} // namespace

XmlNode xml_parse(const std::string& text) { return XmlParser(text).parse(); }

} // namespace plccov
