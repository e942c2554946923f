#pragma once

#include <map>
#include <string>
#include <vector>

namespace mmfp {

inline constexpr int kTaskVectorDim = 768;

// Deterministic text -> unit-norm 768-d task vector. The default hash
// encoder stands in for a pretrained sentence encoder: it hashes word
// unigrams and character 3-grams into signed bins, so lexically similar
// texts land near each other. The lookup encoder serves externally
// computed embeddings from a table instead.
class TextEncoder {
  public:
    enum class Kind { hash, lookup };

    static TextEncoder hash_encoder();
    static TextEncoder lookup_encoder(std::map<std::string, std::vector<double>> table);
    // Embeddings file: JSON list of {"text": ..., "vector": [768 reals]}.
    static TextEncoder load_lookup(const std::string& path);

    Kind kind() const { return kind_; }
    const std::map<std::string, std::vector<double>>& table() const { return table_; }

    // Unit L2 norm, length 768. Lookup encoder throws on unknown text.
    std::vector<double> encode(const std::string& text) const;

  private:
    TextEncoder() = default;
    Kind kind_ = Kind::hash;
    std::map<std::string, std::vector<double>> table_;
};

struct ParaphraseSet {
    std::string canonical;
    std::vector<std::string> variants;
};

using ParaphraseMap = std::map<std::string, ParaphraseSet>;

// Paraphrase file: JSON list of {"text": ..., "paraphrases": [...]}.
ParaphraseMap load_paraphrases(const std::string& path);
void save_paraphrases(const ParaphraseMap& map, const std::string& path);

} // namespace mmfp
