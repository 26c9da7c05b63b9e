#include "logkg/ntriples.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>

#include "logkg/errors.hpp"

namespace logkg {

namespace {

bool unreserved(unsigned char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' ||
         c == '.' || c == '_' || c == '~';
}

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::string escape_literal(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size() + 2);
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (c < 0x20 || c == 0x7F) {
          out += "\\u00";
          out += kHex[c >> 4];
          out += kHex[c & 0xF];
        } else {
          out += ch;
        }
    }
  }
  return out;
}

void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

std::string iri(std::string_view s) { return "<" + std::string(s) + ">"; }

// Cursor over one N-Triples line.
class LineParser {
 public:
  LineParser(std::string_view line, std::size_t line_no) : s_(line), line_no_(line_no) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("N-Triples line " + std::to_string(line_no_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
  }

  bool at_end_or_comment() {
    skip_ws();
    return pos_ >= s_.size() || s_[pos_] == '#';
  }

  void expect(char c) {
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string read_iri() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '_') fail("blank nodes are not supported");
    expect('<');
    std::string out;
    while (pos_ < s_.size() && s_[pos_] != '>') {
      if (s_[pos_] == '\\') {
        read_uchar(out);
      } else {
        const char c = s_[pos_++];
        if (static_cast<unsigned char>(c) <= 0x20 || c == '<' || c == '"' || c == '{' || c == '}' || c == '|' ||
            c == '^' || c == '`') {
          fail("illegal character in IRI");
        }
        out += c;
      }
    }
    expect('>');
    return out;
  }

  RdfTerm read_object() {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == '"') return {RdfTerm::Kind::kLiteral, read_literal()};
    return {RdfTerm::Kind::kIri, read_iri()};
  }

  void finish() {
    skip_ws();
    expect('.');
    if (!at_end_or_comment()) fail("trailing characters after '.'");
  }

 private:
  void read_uchar(std::string& out) {
    ++pos_;  // backslash
    if (pos_ >= s_.size()) fail("dangling escape");
    const char kind = s_[pos_++];
    std::size_t digits = 0;
    if (kind == 'u') {
      digits = 4;
    } else if (kind == 'U') {
      digits = 8;
    } else {
      fail(std::string("unknown escape \\") + kind);
    }
    if (pos_ + digits > s_.size()) fail("truncated \\u escape");
    std::uint32_t cp = 0;
    for (std::size_t i = 0; i < digits; ++i) {
      const int v = hex_value(s_[pos_++]);
      if (v < 0) fail("bad hex digit in escape");
      cp = cp * 16 + static_cast<std::uint32_t>(v);
    }
    if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) fail("escape is not a Unicode scalar value");
    append_utf8(out, cp);
  }

  std::string read_literal() {
    expect('"');
    std::string out;
    for (;;) {
      if (pos_ >= s_.size()) fail("unterminated literal");
      const char c = s_[pos_];
      if (c == '"') break;
      if (c == '\n' || c == '\r') fail("raw line break in literal");
      if (c != '\\') {
        out += c;
        ++pos_;
        continue;
      }
      if (pos_ + 1 >= s_.size()) fail("dangling escape");
      switch (s_[pos_ + 1]) {
        case 't': out += '\t'; pos_ += 2; break;
        case 'b': out += '\b'; pos_ += 2; break;
        case 'n': out += '\n'; pos_ += 2; break;
        case 'r': out += '\r'; pos_ += 2; break;
        case 'f': out += '\f'; pos_ += 2; break;
        case '"': out += '"'; pos_ += 2; break;
        case '\'': out += '\''; pos_ += 2; break;
        case '\\': out += '\\'; pos_ += 2; break;
        default: read_uchar(out);
      }
    }
    expect('"');
    // Language tags and datatypes are accepted and dropped: values are plain strings.
    if (pos_ < s_.size() && s_[pos_] == '@') {
      ++pos_;
      const auto start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '-')) ++pos_;
      if (pos_ == start) fail("empty language tag");
    } else if (pos_ + 1 < s_.size() && s_[pos_] == '^' && s_[pos_ + 1] == '^') {
      pos_ += 2;
      read_iri();
    }
    return out;
  }

  std::string_view s_;
  std::size_t line_no_;
  std::size_t pos_ = 0;
};

}  // namespace

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  out.reserve(s.size());
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (unreserved(c)) {
      out += ch;
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 0xF];
    }
  }
  return out;
}

std::string percent_decode(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    const int hi = i + 1 < s.size() ? hex_value(s[i + 1]) : -1;
    const int lo = i + 2 < s.size() ? hex_value(s[i + 2]) : -1;
    if (hi < 0 || lo < 0) throw ParseError("malformed percent escape in '" + std::string(s) + "'");
    out += static_cast<char>(hi * 16 + lo);
    i += 2;
  }
  return out;
}

std::vector<std::string> graph_ntriples(const std::string& graph_id, const KnowledgeGraph& g,
                                        std::string_view base_iri) {
  const std::string base(base_iri);
  const std::string ontology = base + "ontology#";
  const std::string graph_prefix = base + percent_encode(graph_id) + "/";
  auto node_iri = [&](const std::string& id) { return iri(graph_prefix + percent_encode(id)); };
  auto term_iri = [&](const std::string& name) { return iri(ontology + percent_encode(name)); };

  std::vector<std::string> lines;
  for (const auto& node : g.nodes) {
    const auto subject = node_iri(node.id);
    lines.push_back(subject + " " + iri(kRdfType) + " " + term_iri(node.node_type) + " .\n");
    for (const auto& p : node.properties) {
      lines.push_back(subject + " " + term_iri(p.key) + " \"" + escape_literal(p.value) + "\" .\n");
    }
  }
  for (const auto& r : g.relationships) {
    lines.push_back(node_iri(r.source_id) + " " + term_iri(r.rel_type) + " " + node_iri(r.target_id) + " .\n");
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  return lines;
}

std::string export_ntriples(const GraphStore& store, std::span<const std::string> ids, std::string_view base_iri) {
  std::vector<std::string> lines;
  for (const auto& id : ids) {
    const auto sg = store.get(id);
    auto part = graph_ntriples(sg.graph_id, sg.graph, base_iri);
    lines.insert(lines.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  std::string out;
  for (const auto& l : lines) out += l;
  return out;
}

std::vector<RdfTriple> parse_ntriples(std::string_view document) {
  std::vector<RdfTriple> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < document.size()) {
    auto nl = document.find('\n', pos);
    if (nl == std::string_view::npos) nl = document.size();
    const auto line = document.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    LineParser p(line, line_no);
    if (p.at_end_or_comment()) continue;
    RdfTriple t;
    t.subject = p.read_iri();
    t.predicate = p.read_iri();
    t.object = p.read_object();
    p.finish();
    out.push_back(std::move(t));
  }
  return out;
}

std::map<std::string, KnowledgeGraph> reassemble_graphs(std::span<const RdfTriple> triples, std::string_view base_iri) {
  const std::string base(base_iri);
  const std::string ontology = base + "ontology#";

  struct NodeRef {
    std::string graph_id;
    std::string node_id;
  };
  auto split_node = [&](const std::string& value) {
    if (!value.starts_with(base) || value.starts_with(ontology)) {
      throw ParseError("IRI outside the node scheme: " + value);
    }
    const auto rest = std::string_view(value).substr(base.size());
    const auto slash = rest.find('/');
    if (slash == std::string_view::npos || rest.find('/', slash + 1) != std::string_view::npos) {
      throw ParseError("node IRI must be <base><graph>/<node>: " + value);
    }
    return NodeRef{percent_decode(rest.substr(0, slash)), percent_decode(rest.substr(slash + 1))};
  };
  auto ontology_name = [&](const std::string& value) {
    if (!value.starts_with(ontology)) throw ParseError("IRI outside the ontology namespace: " + value);
    return percent_decode(std::string_view(value).substr(ontology.size()));
  };

  struct Partial {
    std::map<std::string, GraphNode> nodes;
    std::vector<GraphRelationship> relationships;
  };
  std::map<std::string, Partial> graphs;
  auto node_in = [&](Partial& g, const std::string& id) -> GraphNode& {
    auto& n = g.nodes[id];
    n.id = id;
    return n;
  };

  for (const auto& t : triples) {
    const auto subject = split_node(t.subject);
    auto& g = graphs[subject.graph_id];
    auto& node = node_in(g, subject.node_id);
    if (t.predicate == kRdfType) {
      if (t.object.kind != RdfTerm::Kind::kIri) throw ParseError("rdf:type object must be an IRI");
      if (!node.node_type.empty()) throw ParseError("node " + t.subject + " has more than one type");
      node.node_type = ontology_name(t.object.value);
    } else if (t.object.kind == RdfTerm::Kind::kLiteral) {
      node.properties.push_back({ontology_name(t.predicate), t.object.value});
    } else {
      const auto target = split_node(t.object.value);
      if (target.graph_id != subject.graph_id) {
        throw ParseError("relationship crosses graphs: " + t.subject + " -> " + t.object.value);
      }
      node_in(g, target.node_id);
      g.relationships.push_back({subject.node_id, target.node_id, ontology_name(t.predicate)});
    }
  }

  std::map<std::string, KnowledgeGraph> out;
  for (auto& [graph_id, partial] : graphs) {
    KnowledgeGraph kg;
    for (auto& [id, node] : partial.nodes) {
      if (node.node_type.empty()) throw ParseError("node " + id + " in graph " + graph_id + " has no type");
      kg.nodes.push_back(std::move(node));
    }
    kg.relationships = std::move(partial.relationships);
    out.emplace(graph_id, std::move(kg));
  }
  return out;
}

}  // namespace logkg
