#include "mmfp/textenc.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "mmfp/rng.hpp"

namespace mmfp {

using nlohmann::json;

TextEncoder TextEncoder::hash_encoder() {
    TextEncoder e;
    e.kind_ = Kind::hash;
    return e;
}

TextEncoder TextEncoder::lookup_encoder(std::map<std::string, std::vector<double>> table) {
    TextEncoder e;
    e.kind_ = Kind::lookup;
    for (auto& [text, vec] : table) {
        if (static_cast<int>(vec.size()) != kTaskVectorDim)
            throw std::invalid_argument("lookup_encoder: vector for '" + text + "' has length " +
                                        std::to_string(vec.size()) + ", expected 768");
        double n2 = 0.0;
        for (double v : vec) n2 += v * v;
        if (!(n2 > 0.0)) throw std::invalid_argument("lookup_encoder: zero vector for '" + text + "'");
        double inv = 1.0 / std::sqrt(n2);
        for (double& v : vec) v *= inv;
    }
    e.table_ = std::move(table);
    return e;
}

TextEncoder TextEncoder::load_lookup(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_lookup: cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_lookup: '" + path + "': " + e.what());
    }
    std::map<std::string, std::vector<double>> table;
    for (const auto& rec : doc) {
        auto text = rec.at("text").get<std::string>();
        table[text] = rec.at("vector").get<std::vector<double>>();
    }
    return lookup_encoder(std::move(table));
}

namespace {

void add_token(std::vector<double>& acc, const std::string& token) {
    std::uint64_t h = fnv1a64(token.data(), token.size());
    auto bin = static_cast<std::size_t>(h % kTaskVectorDim);
    double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
    acc[bin] += sign;
}

} // namespace

std::vector<double> TextEncoder::encode(const std::string& text) const {
    if (text.empty()) throw std::invalid_argument("encode_text: empty text");
    if (kind_ == Kind::lookup) {
        auto it = table_.find(text);
        if (it == table_.end())
            throw std::invalid_argument("encode_text: no embedding for '" + text + "' in lookup table");
        return it->second;
    }

    std::string lower;
    lower.reserve(text.size());
    for (unsigned char ch : text) lower.push_back(static_cast<char>(std::tolower(ch)));

    std::vector<double> acc(kTaskVectorDim, 0.0);
    std::string word;
    for (std::size_t i = 0; i <= lower.size(); ++i) {
        bool alnum = i < lower.size() && (std::isalnum(static_cast<unsigned char>(lower[i])) != 0);
        if (alnum) {
            word.push_back(lower[i]);
        } else if (!word.empty()) {
            add_token(acc, "w:" + word);
            word.clear();
        }
    }
    for (std::size_t i = 0; i + 3 <= lower.size(); ++i) add_token(acc, "g:" + lower.substr(i, 3));

    double n2 = 0.0;
    for (double v : acc) n2 += v * v;
    if (n2 == 0.0) {
        acc[0] = 1.0;
        return acc;
    }
    double inv = 1.0 / std::sqrt(n2);
    for (double& v : acc) v *= inv;
    return acc;
}

ParaphraseMap load_paraphrases(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_paraphrases: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    if (bytes.find_first_not_of(" \t\r\n") == std::string::npos) return {};
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_paraphrases: '" + path + "': " + e.what());
    }
    ParaphraseMap map;
    for (const auto& rec : doc) {
        ParaphraseSet set;
        set.canonical = rec.at("text").get<std::string>();
        set.variants = rec.at("paraphrases").get<std::vector<std::string>>();
        for (const auto& v : set.variants)
            if (v == set.canonical)
                throw std::runtime_error("load_paraphrases: variant equals canonical text '" + set.canonical + "'");
        map[set.canonical] = std::move(set);
    }
    return map;
}

void save_paraphrases(const ParaphraseMap& map, const std::string& path) {
    json doc = json::array();
    for (const auto& [text, set] : map) {
        json rec;
        rec["text"] = text;
        rec["paraphrases"] = set.variants;
        doc.push_back(rec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_paraphrases: cannot open '" + path + "' for writing");
    out << doc.dump();
    if (!out) throw std::runtime_error("save_paraphrases: write to '" + path + "' failed");
}

} // namespace mmfp
