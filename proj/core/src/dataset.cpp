#include "mmfp/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "mmfp/rng.hpp"

namespace mmfp {

using nlohmann::json;

void MotionDataset::validate() const {
    if (trajectories.empty()) throw std::invalid_argument("MotionDataset: no trajectories");
    if (annotations.size() != trajectories.size())
        throw std::invalid_argument("MotionDataset: annotations/trajectories size mismatch");
    norm.validate(point_dim);
    for (const auto& x : trajectories) {
        x.validate();
        if (x.space != space || x.point_dim != point_dim || x.T() != T)
            throw std::invalid_argument("MotionDataset: trajectory shape does not match header");
    }
    std::set<int> levels;
    for (const auto& annos : annotations) {
        if (annos.empty()) throw std::invalid_argument("MotionDataset: trajectory without annotation");
        for (const auto& a : annos) {
            if (a.level < 1) throw std::invalid_argument("MotionDataset: annotation level must be >= 1");
            if (a.text.empty()) throw std::invalid_argument("MotionDataset: empty annotation text");
            levels.insert(a.level);
        }
    }
    int expect = 1;
    for (int l : levels) {
        if (l != expect)
            throw std::invalid_argument("MotionDataset: levels must be contiguous from 1, missing level " +
                                        std::to_string(expect));
        ++expect;
    }
    // Same text must always carry the same tags.
    std::map<std::string, std::map<std::string, int>> seen;
    for (const auto& annos : annotations)
        for (const auto& a : annos) {
            auto it = seen.find(a.text);
            if (it == seen.end())
                seen.emplace(a.text, a.tags);
            else if (it->second != a.tags)
                throw std::invalid_argument("MotionDataset: text '" + a.text + "' has inconsistent tags");
        }
}

std::vector<std::string> MotionDataset::texts_at_level(int level) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& annos : annotations)
        for (const auto& a : annos)
            if (a.level == level && seen.insert(a.text).second) out.push_back(a.text);
    return out;
}

std::vector<int> MotionDataset::trajectories_for_text(const std::string& text) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < annotations.size(); ++i)
        for (const auto& a : annotations[i])
            if (a.text == text) {
                out.push_back(static_cast<int>(i));
                break;
            }
    return out;
}

std::map<std::string, int> MotionDataset::tags_for_text(const std::string& text) const {
    const std::map<std::string, int>* found = nullptr;
    for (const auto& annos : annotations)
        for (const auto& a : annos)
            if (a.text == text) {
                if (found && *found != a.tags)
                    throw std::invalid_argument("tags_for_text: text '" + text + "' has inconsistent tags");
                found = &a.tags;
            }
    if (!found) throw std::invalid_argument("tags_for_text: text '" + text + "' not in dataset");
    return *found;
}

std::vector<std::string> MotionDataset::label_kinds() const {
    std::set<std::string> kinds;
    for (const auto& annos : annotations)
        for (const auto& a : annos)
            for (const auto& [k, v] : a.tags) kinds.insert(k);
    return {kinds.begin(), kinds.end()};
}

int MotionDataset::max_level() const {
    int m = 0;
    for (const auto& annos : annotations)
        for (const auto& a : annos) m = std::max(m, a.level);
    return m;
}

void save_dataset(const MotionDataset& ds, const std::string& path) {
    ds.validate();
    json doc;
    doc["schema_version"] = 1;
    doc["space"] = space_name(ds.space);
    doc["point_dim"] = ds.point_dim;
    doc["T"] = ds.T;
    doc["normalization"] = {{"offset", ds.norm.offset}, {"scale", ds.norm.scale}};
    json trajs = json::array();
    for (std::size_t i = 0; i < ds.trajectories.size(); ++i) {
        json tj;
        tj["points"] = ds.trajectories[i].points;
        json annos = json::array();
        for (const auto& a : ds.annotations[i]) {
            json aj;
            aj["level"] = a.level;
            aj["text"] = a.text;
            aj["tags"] = a.tags.empty() ? json::object() : json(a.tags);
            annos.push_back(aj);
        }
        tj["annotations"] = annos;
        trajs.push_back(tj);
    }
    doc["trajectories"] = trajs;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_dataset: cannot open '" + path + "' for writing");
    out << doc.dump();
    if (!out) throw std::runtime_error("save_dataset: write to '" + path + "' failed");
}

MotionDataset load_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_dataset: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();

    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("load_dataset: '" + path + "': " + e.what());
    }
    MotionDataset ds;
    try {
        if (doc.at("schema_version").get<int>() != 1)
            throw std::runtime_error("unsupported schema_version");
        ds.space = space_from_name(doc.at("space").get<std::string>());
        ds.point_dim = doc.at("point_dim").get<int>();
        ds.T = doc.at("T").get<int>();
        ds.norm.offset = doc.at("normalization").at("offset").get<std::vector<double>>();
        ds.norm.scale = doc.at("normalization").at("scale").get<std::vector<double>>();
        for (const auto& tj : doc.at("trajectories")) {
            Trajectory x;
            x.space = ds.space;
            x.point_dim = ds.point_dim;
            x.points = tj.at("points").get<std::vector<std::vector<double>>>();
            ds.trajectories.push_back(std::move(x));
            std::vector<Annotation> annos;
            for (const auto& aj : tj.at("annotations")) {
                Annotation a;
                a.level = aj.at("level").get<int>();
                a.text = aj.at("text").get<std::string>();
                a.tags = aj.at("tags").get<std::map<std::string, int>>();
                annos.push_back(std::move(a));
            }
            ds.annotations.push_back(std::move(annos));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error("load_dataset: '" + path + "': " + e.what());
    }
    ds.fingerprint = fnv1a64(bytes.data(), bytes.size());
    ds.validate();
    return ds;
}

std::uint64_t file_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("file_fingerprint: cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string bytes = buf.str();
    return fnv1a64(bytes.data(), bytes.size());
}

std::string fingerprint_hex(std::uint64_t fp) {
    static const char* hex = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = hex[fp & 0xf];
        fp >>= 4;
    }
    return s;
}

} // namespace mmfp
