#include "relplane/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace relplane {

using json = nlohmann::ordered_json;

const std::string kCombineSeparator = "∥";
const std::string kMarkerOpen = "⟨";
const std::string kMarkerClose = "⟩";

int LabelSet::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<int>(i);
  return -1;
}

void LabelSet::validate() const {
  if (labels.empty()) throw SchemaError("schema: empty label set");
  std::set<std::string> seen;
  for (const auto& l : labels)
    if (!seen.insert(l).second)
      throw SchemaError("schema: duplicate label '" + l + "'");
  if (!contains(null_label))
    throw SchemaError("schema: null label '" + null_label +
                      "' is not a member of the label set");
}

namespace {

bool contains_reserved(const std::string& s) {
  return s.find(kCombineSeparator) != std::string::npos ||
         s.find(kMarkerOpen) != std::string::npos ||
         s.find(kMarkerClose) != std::string::npos;
}

void validate_span(const EntitySpan& s, int n, const std::string& doc_id,
                   const char* which) {
  if (!(0 <= s.start && s.start < s.end && s.end <= n))
    throw ValidationError("instance '" + doc_id + "': " + which + " span [" +
                          std::to_string(s.start) + ", " +
                          std::to_string(s.end) +
                          ") out of bounds for sentence of length " +
                          std::to_string(n));
  if (s.etype.empty() || s.subtype.empty() || s.head.empty())
    throw ValidationError("instance '" + doc_id + "': " + which +
                          " has empty type, subtype, or head");
  if (contains_reserved(s.etype) || contains_reserved(s.subtype) ||
      contains_reserved(s.head))
    throw ValidationError("instance '" + doc_id + "': " + which +
                          " annotation contains a reserved character");
}

}  // namespace

void validate_instance(const RelationInstance& inst, const LabelSet& schema) {
  int n = static_cast<int>(inst.tokens.size());
  validate_span(inst.e1, n, inst.doc_id, "e1");
  validate_span(inst.e2, n, inst.doc_id, "e2");
  if (!schema.contains(inst.label))
    throw SchemaError("instance '" + inst.doc_id + "': unknown label '" +
                      inst.label + "'");
}

// ---------------------------------------------------------------------------

FixtureLexiconTagger::FixtureLexiconTagger() {
  lexicon_ = {
      {"the", "DT"},      {"a", "DT"},        {"an", "DT"},
      {"cat", "NN"},      {"dog", "NN"},      {"group", "NN"},
      {"city", "NN"},     {"office", "NN"},   {"report", "NN"},
      {"officials", "NNS"}, {"states", "NNPS"}, {"united", "NNP"},
      {"universal", "JJ"}, {"available", "JJ"}, {"new", "JJ"},
      {"old", "JJ"},      {"in", "IN"},       {"of", "IN"},
      {"on", "IN"},       {"at", "IN"},       {"near", "IN"},
      {"with", "IN"},     {"from", "IN"},     {"under", "IN"},
      {"for", "IN"},      {"to", "TO"},       {"and", "CC"},
      {"were", "VBD"},    {"was", "VBD"},     {"met", "VBD"},
      {"said", "VBD"},    {"visited", "VBD"}, {"joined", "VBD"},
      {"is", "VBZ"},      {"works", "VBZ"},   {"leads", "VBZ"},
      {"not", "RB"},      {"here", "RB"},     {"yesterday", "NN"},
      {"alpha", "NN"},    {"bravo", "NN"},    {"charlie", "NN"},
      {"delta", "NN"},    {"echo", "NN"},     {"foxtrot", "NN"},
      {"golf", "NN"},     {"hotel", "NN"},    {"india", "NN"},
      {"juliet", "NN"},   {"kilo", "NN"},     {"lima", "NN"},
  };
}

std::vector<std::string> FixtureLexiconTagger::tag(
    const std::vector<std::string>& tokens) const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto it = lexicon_.find(t);
    out.push_back(it == lexicon_.end() ? "X" : it->second);
  }
  return out;
}

PosTags pos_tag(const std::vector<std::string>& tokens, const PosTagger& tagger) {
  PosTags out;
  out.tags = tagger.tag(tokens);
  if (out.tags.size() != tokens.size())
    throw ValidationError("pos_tag: tagger returned " +
                          std::to_string(out.tags.size()) + " tags for " +
                          std::to_string(tokens.size()) + " tokens");
  return out;
}

// ---------------------------------------------------------------------------

namespace {

json span_to_json(const EntitySpan& s) {
  return json{{"start", s.start},
              {"end", s.end},
              {"type", s.etype},
              {"subtype", s.subtype},
              {"head", s.head}};
}

EntitySpan span_from_json(const json& j) {
  EntitySpan s;
  s.start = j.at("start").get<int>();
  s.end = j.at("end").get<int>();
  s.etype = j.at("type").get<std::string>();
  s.subtype = j.at("subtype").get<std::string>();
  s.head = j.at("head").get<std::string>();
  return s;
}

}  // namespace

std::string corpus_record_line(const RelationInstance& inst) {
  json j{{"tokens", inst.tokens},
         {"e1", span_to_json(inst.e1)},
         {"e2", span_to_json(inst.e2)},
         {"label", inst.label},
         {"doc_id", inst.doc_id}};
  return j.dump();
}

Corpus load_corpus(const std::string& path, const LabelSet& schema) {
  schema.validate();
  std::ifstream in(path);
  if (!in) throw ParseError("corpus: cannot open '" + path + "'");
  Corpus corpus;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("corpus: line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    RelationInstance inst;
    try {
      inst.tokens = j.at("tokens").get<std::vector<std::string>>();
      inst.e1 = span_from_json(j.at("e1"));
      inst.e2 = span_from_json(j.at("e2"));
      inst.label = j.at("label").get<std::string>();
      inst.doc_id = j.at("doc_id").get<std::string>();
    } catch (const json::exception& e) {
      throw ParseError("corpus: line " + std::to_string(lineno) +
                       ": missing or mistyped field: " + e.what());
    }
    validate_instance(inst, schema);
    corpus.push_back(std::move(inst));
  }
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  std::ostringstream out;
  for (const auto& inst : corpus) out << corpus_record_line(inst) << "\n";
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("corpus: cannot write '" + path + "'");
  f << out.str();
}

LabelSet load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("schema: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ParseError("schema: " + std::string(e.what()));
  }
  LabelSet s;
  try {
    s.labels = j.at("labels").get<std::vector<std::string>>();
    s.null_label = j.at("null_label").get<std::string>();
  } catch (const json::exception& e) {
    throw ParseError("schema: missing or mistyped field: " + std::string(e.what()));
  }
  s.validate();
  return s;
}

void save_schema(const LabelSet& schema, const std::string& path) {
  json j{{"labels", schema.labels}, {"null_label", schema.null_label}};
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("schema: cannot write '" + path + "'");
  f << j.dump() << "\n";
}

CorpusStats corpus_stats(const Corpus& corpus) {
  CorpusStats stats;
  for (const auto& inst : corpus) {
    ++stats.per_label[inst.label];
    ++stats.total;
  }
  return stats;
}

}  // namespace relplane
