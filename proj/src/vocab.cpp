#include "relplane/vocab.hpp"

#include <fstream>

#include "relplane/errors.hpp"

namespace relplane {

namespace {
const char* kReserved[] = {"<seq>", "<unk_word>", "<unk_feature>"};
}

Vocabulary::Vocabulary() {
  for (const char* r : kReserved) add(r);
}

int Vocabulary::add(const std::string& symbol) {
  auto it = index_.find(symbol);
  if (it != index_.end()) return it->second;
  int id = static_cast<int>(symbols_.size());
  symbols_.push_back(symbol);
  index_.emplace(symbol, id);
  return id;
}

int Vocabulary::lookup(const std::string& symbol) const {
  auto it = index_.find(symbol);
  return it == index_.end() ? -1 : it->second;
}

int Vocabulary::word_id(const std::string& symbol) const {
  int id = lookup(symbol);
  return id < 0 ? kUnkWordId : id;
}

int Vocabulary::feature_id(const std::string& symbol) const {
  int id = lookup(symbol);
  return id < 0 ? kUnkFeatureId : id;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("vocabulary: cannot write '" + path + "'");
  for (const auto& s : symbols_) f << s << "\n";
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("vocabulary: cannot open '" + path + "'");
  Vocabulary v;
  v.symbols_.clear();
  v.index_.clear();
  std::string line;
  while (std::getline(f, line)) v.add(line);
  for (int i = 0; i < 3; ++i)
    if (v.size() <= i || v.symbols()[i] != kReserved[i])
      throw ParseError("vocabulary: '" + path + "' lacks reserved symbols");
  return v;
}

}  // namespace relplane
