#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "logkg/graph_store.hpp"
#include "logkg/model.hpp"

namespace logkg {

// IRI scheme:
//   node      <base><graph_id>/<node_id>
//   class     <base>ontology#<ClassName>
//   property  <base>ontology#<propertyKey>   (literal object)
//   relation  <base>ontology#<relType>       (node object)
// Each inserted segment is percent-encoded outside [A-Za-z0-9-._~].
inline constexpr std::string_view kDefaultBaseIri = "http://example.org/logkg/";
inline constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

std::string percent_encode(std::string_view s);
/// Throws ParseError on a malformed escape.
std::string percent_decode(std::string_view s);

/// N-Triples lines for one graph, sorted and de-duplicated, each ending in "\n".
std::vector<std::string> graph_ntriples(const std::string& graph_id, const KnowledgeGraph& g,
                                        std::string_view base_iri = kDefaultBaseIri);

/// Sorted N-Triples document for the given stored graphs. Throws UnknownId.
std::string export_ntriples(const GraphStore& store, std::span<const std::string> ids,
                            std::string_view base_iri = kDefaultBaseIri);

struct RdfTerm {
  enum class Kind { kIri, kLiteral };
  Kind kind = Kind::kIri;
  std::string value;  // IRI without brackets, or the unescaped lexical form

  bool operator==(const RdfTerm&) const = default;
};

struct RdfTriple {
  std::string subject;
  std::string predicate;
  RdfTerm object;

  bool operator==(const RdfTriple&) const = default;
};

/// Parses the subset of N-Triples this exporter writes: IRI subjects and
/// predicates, IRI or plain/typed/language-tagged literal objects, comments and
/// blank lines. Throws ParseError with a line number.
std::vector<RdfTriple> parse_ntriples(std::string_view document);

/// Inverse of graph_ntriples: regroups triples by graph id. Node order follows
/// node id; property and relationship order follows sorted triple order.
/// Throws ParseError on IRIs outside the scheme.
std::map<std::string, KnowledgeGraph> reassemble_graphs(std::span<const RdfTriple> triples,
                                                        std::string_view base_iri = kDefaultBaseIri);

}  // namespace logkg
