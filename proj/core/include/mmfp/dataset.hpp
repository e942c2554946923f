#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "mmfp/trajectory.hpp"

namespace mmfp {

// One text label at a description level. Tags map label kinds (e.g.
// "task", "style") to class ids; texts that do not pin a class (like a
// shared level-1 instruction) carry no tags.
struct Annotation {
    int level = 1;
    std::string text;
    std::map<std::string, int> tags;
};

struct MotionDataset {
    Space space = Space::euclidean;
    int point_dim = 0;
    int T = 0;
    Normalization norm;
    std::vector<Trajectory> trajectories;
    std::vector<std::vector<Annotation>> annotations; // parallel to trajectories

    // Hash of the file bytes this dataset was loaded from (0 if built
    // in memory). Checkpoints record it to tie models to their data.
    std::uint64_t fingerprint = 0;

    void validate() const;

    // Distinct texts at a level, in first-appearance order.
    std::vector<std::string> texts_at_level(int level) const;
    // Indices of trajectories carrying an annotation with this text.
    std::vector<int> trajectories_for_text(const std::string& text) const;
    // Tags attached to a text (empty map if none). Throws if the text
    // appears with conflicting tags.
    std::map<std::string, int> tags_for_text(const std::string& text) const;
    // All label kinds appearing in any annotation, sorted.
    std::vector<std::string> label_kinds() const;
    int max_level() const;
};

void save_dataset(const MotionDataset& ds, const std::string& path);
MotionDataset load_dataset(const std::string& path);

std::uint64_t file_fingerprint(const std::string& path);
std::string fingerprint_hex(std::uint64_t fp);

} // namespace mmfp
