#pragma once

#include <string>
#include <utility>
#include <vector>

namespace plccov {

// Minimal XML reader for the tool's own file formats: elements and attributes
// only, no text content, namespaces or CDATA. Throws ConsistencyError on
// malformed input.
struct XmlNode {
    std::string name;
    std::vector<std::pair<std::string, std::string>> attrs;
    std::vector<XmlNode> children;

    const std::string* attr(const std::string& key) const;
    std::string attr_or(const std::string& key, const std::string& fallback) const;
    // Required attribute; throws ConsistencyError when absent.
    const std::string& need(const std::string& key) const;
};

XmlNode xml_parse(const std::string& text);

std::string xml_escape(const std::string& s);

} // namespace plccov
