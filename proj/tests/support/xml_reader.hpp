#pragma once

// Small standalone XML reader for checking emitted SVG. Deliberately shares
// no code with the writer.

#include <cctype>
#include <cstdlib>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace testsupport {

struct XmlNode {
  std::string name;
  std::map<std::string, std::string> attrs;
  std::vector<std::unique_ptr<XmlNode>> children;
  std::string text;

  bool has(const std::string& a) const { return attrs.count(a) > 0; }
  const std::string& attr(const std::string& a) const {
    auto it = attrs.find(a);
    if (it == attrs.end()) throw std::runtime_error("<" + name + "> has no attribute " + a);
    return it->second;
  }
  double num(const std::string& a) const {
    const auto& s = attr(a);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0') throw std::runtime_error("not a number: " + s);
    return v;
  }
  const XmlNode* child(const std::string& n) const {
    for (const auto& c : children)
      if (c->name == n) return c.get();
    return nullptr;
  }
  const XmlNode* child_with_id(const std::string& id) const {
    for (const auto& c : children)
      if (c->has("id") && c->attr("id") == id) return c.get();
    return nullptr;
  }
  // Depth-first, document order.
  void collect(const std::string& n, std::vector<const XmlNode*>& out) const {
    for (const auto& c : children) {
      if (c->name == n) out.push_back(c.get());
      c->collect(n, out);
    }
  }
  std::vector<const XmlNode*> all(const std::string& n) const {
    std::vector<const XmlNode*> out;
    collect(n, out);
    return out;
  }
};

class XmlParser {
 public:
  explicit XmlParser(const std::string& s) : s_(s) {}

  std::unique_ptr<XmlNode> parse() {
    skip_ws();
    if (s_.compare(i_, 5, "<?xml") == 0) {
      const auto end = s_.find("?>", i_);
      if (end == std::string::npos) fail("unterminated declaration");
      i_ = end + 2;
    }
    skip_ws();
    auto root = element();
    skip_ws();
    if (i_ != s_.size()) fail("trailing content");
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& m) const {
    throw std::runtime_error("xml: " + m + " at offset " + std::to_string(i_));
  }
  void skip_ws() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  void expect(char c) {
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }
  std::string name() {
    const auto start = i_;
    while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '-' ||
                              s_[i_] == ':' || s_[i_] == '_'))
      ++i_;
    if (start == i_) fail("expected a name");
    return s_.substr(start, i_ - start);
  }
  static std::string decode(const std::string& raw) {
    std::string out;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      if (raw[k] != '&') {
        out += raw[k];
        continue;
      }
      const auto semi = raw.find(';', k);
      if (semi == std::string::npos) throw std::runtime_error("xml: bad entity");
      const auto ent = raw.substr(k + 1, semi - k - 1);
      if (ent == "amp") out += '&';
      else if (ent == "lt") out += '<';
      else if (ent == "gt") out += '>';
      else if (ent == "quot") out += '"';
      else if (ent == "apos") out += '\'';
      else throw std::runtime_error("xml: unknown entity " + ent);
      k = semi;
    }
    return out;
  }
  std::unique_ptr<XmlNode> element() {
    expect('<');
    auto node = std::make_unique<XmlNode>();
    node->name = name();
    for (;;) {
      skip_ws();
      if (i_ >= s_.size()) fail("unterminated tag");
      if (s_[i_] == '/') {
        ++i_;
        expect('>');
        return node;
      }
      if (s_[i_] == '>') {
        ++i_;
        break;
      }
      const auto key = name();
      skip_ws();
      expect('=');
      skip_ws();
      expect('"');
      const auto end = s_.find('"', i_);
      if (end == std::string::npos) fail("unterminated attribute");
      if (!node->attrs.emplace(key, decode(s_.substr(i_, end - i_))).second) fail("duplicate attribute " + key);
      i_ = end + 1;
    }
    for (;;) {
      const auto lt = s_.find('<', i_);
      if (lt == std::string::npos) fail("missing close tag for " + node->name);
      node->text += decode(s_.substr(i_, lt - i_));
      i_ = lt;
      if (s_.compare(i_, 2, "</") == 0) {
        i_ += 2;
        if (name() != node->name) fail("mismatched close tag for " + node->name);
        skip_ws();
        expect('>');
        return node;
      }
      node->children.push_back(element());
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

inline std::unique_ptr<XmlNode> parse_xml(const std::string& s) { return XmlParser(s).parse(); }

}  // namespace testsupport
