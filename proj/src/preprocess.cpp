#include "relplane/preprocess.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace relplane {

using json = nlohmann::ordered_json;

PreprocessedInstance preprocess_instance(const RelationInstance& inst,
                                         const PosTagger& tagger) {
  PreprocessedInstance out;
  out.doc_id = inst.doc_id;
  out.label = inst.label;
  out.tokens = inst.tokens;
  out.pos = pos_tag(inst.tokens, tagger).tags;

  PosTags tags{out.pos};
  AtomicFeatures atomic = extract_atomic(inst, tags);
  out.features = build_feature_sequence(combine(atomic)).symbols;

  MarkedSentence marked = insert_markers(inst);
  out.marked_tokens = marked.tokens;
  out.m1l = marked.m1l;
  out.m1r = marked.m1r;
  out.m2l = marked.m2l;
  out.m2r = marked.m2r;
  out.e1_rows = marked.e1_positions;
  out.e2_rows = marked.e2_positions;
  out.e1_start = inst.e1.start;
  out.e1_end = inst.e1.end;
  out.e2_start = inst.e2.start;
  out.e2_end = inst.e2.end;
  return out;
}

PreprocessedCorpus preprocess_corpus(const Corpus& corpus, const PosTagger& tagger) {
  PreprocessedCorpus out;
  out.reserve(corpus.size());
  for (const auto& inst : corpus) out.push_back(preprocess_instance(inst, tagger));
  return out;
}

Vocabulary build_vocabulary(const PreprocessedCorpus& corpus) {
  Vocabulary v;
  for (const auto& inst : corpus)
    for (const auto& tok : inst.marked_tokens) v.add(tok);
  for (const auto& inst : corpus)
    for (const auto& sym : inst.features) v.add(sym);
  return v;
}

void save_cache(const PreprocessedCorpus& corpus, const std::string& path) {
  std::ostringstream out;
  for (const auto& p : corpus) {
    json j{{"doc_id", p.doc_id},
           {"label", p.label},
           {"tokens", p.tokens},
           {"pos", p.pos},
           {"marked", p.marked_tokens},
           {"markers", {p.m1l, p.m1r, p.m2l, p.m2r}},
           {"e1_rows", p.e1_rows},
           {"e2_rows", p.e2_rows},
           {"e1", {p.e1_start, p.e1_end}},
           {"e2", {p.e2_start, p.e2_end}},
           {"features", p.features}};
    out << j.dump() << "\n";
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cache: cannot write '" + path + "'");
  f << out.str();
}

PreprocessedCorpus load_cache(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cache: cannot open '" + path + "'");
  PreprocessedCorpus out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError("cache: line " + std::to_string(lineno) + ": " + e.what());
    }
    PreprocessedInstance p;
    try {
      p.doc_id = j.at("doc_id").get<std::string>();
      p.label = j.at("label").get<std::string>();
      p.tokens = j.at("tokens").get<std::vector<std::string>>();
      p.pos = j.at("pos").get<std::vector<std::string>>();
      p.marked_tokens = j.at("marked").get<std::vector<std::string>>();
      auto markers = j.at("markers").get<std::vector<int>>();
      if (markers.size() != 4) throw ParseError("cache: bad marker tuple");
      p.m1l = markers[0];
      p.m1r = markers[1];
      p.m2l = markers[2];
      p.m2r = markers[3];
      p.e1_rows = j.at("e1_rows").get<std::vector<int>>();
      p.e2_rows = j.at("e2_rows").get<std::vector<int>>();
      auto e1 = j.at("e1").get<std::vector<int>>();
      auto e2 = j.at("e2").get<std::vector<int>>();
      if (e1.size() != 2 || e2.size() != 2)
        throw ParseError("cache: bad span tuple");
      p.e1_start = e1[0];
      p.e1_end = e1[1];
      p.e2_start = e2[0];
      p.e2_end = e2[1];
      auto feats = j.at("features").get<std::vector<std::string>>();
      if (feats.size() != 8) throw ParseError("cache: expected 8 features");
      std::copy(feats.begin(), feats.end(), p.features.begin());
    } catch (const json::exception& e) {
      throw ParseError("cache: line " + std::to_string(lineno) +
                       ": missing or mistyped field: " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace relplane
