#ifndef RELPLANE_VOCAB_HPP_
#define RELPLANE_VOCAB_HPP_

#include <map>
#include <string>
#include <vector>

namespace relplane {

// Symbol table shared by sentence tokens and combined-feature symbols.
// Ids are line numbers in the saved file; three reserved entries come
// first. Symbols unseen at evaluation time map to the unknown ids.
class Vocabulary {
 public:
  static constexpr int kSeqId = 0;         // sequence-level token
  static constexpr int kUnkWordId = 1;
  static constexpr int kUnkFeatureId = 2;

  Vocabulary();

  int add(const std::string& symbol);  // inserts if absent, returns id
  int word_id(const std::string& symbol) const;
  int feature_id(const std::string& symbol) const;
  int lookup(const std::string& symbol) const;  // -1 if absent
  int size() const { return static_cast<int>(symbols_.size()); }
  const std::vector<std::string>& symbols() const { return symbols_; }

  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

  bool operator==(const Vocabulary& o) const { return symbols_ == o.symbols_; }

 private:
  std::vector<std::string> symbols_;
  std::map<std::string, int> index_;
};

}  // namespace relplane

#endif  // RELPLANE_VOCAB_HPP_
