#pragma once

#include <cstdint>
#include <string>

#include "mmfp/dataset.hpp"
#include "mmfp/textenc.hpp"

namespace mmfp {

// 20 planar reach-to-origin trajectories, T=201: 4 route families with 5
// jittered members each, all sharing one start point and ending at the
// origin exactly. Level-1 text is shared; level-2 texts name the route.
// Tags: "path" (upper or lower half, 2 classes), "task" (route, 4 classes).
MotionDataset gen_toy2d(std::uint64_t seed);

// 10 SE(3) bottle trajectories, T=480: 5 approach directions x 2 styles,
// style 1 adds a terminal wrist roll of about 1 rad. Levels: shared
// level 1, style at level 2, style+direction at level 3. Tags: "style"
// (2), "direction" (5).
MotionDataset gen_se3_pouring(std::uint64_t seed);

// 30 joint-space waving trajectories in R^7, T=720: 5 directions x 3
// amplitude styles x 2 repeats, sinusoidal joints under a smooth
// envelope. Levels like pouring. Tags: "style" (3), "direction" (5).
MotionDataset gen_waving7dof(std::uint64_t seed);

// kind: "toy2d", "se3-pouring" or "waving7".
MotionDataset generate_dataset(const std::string& kind, std::uint64_t seed);

// Paraphrases of each generator's canonical texts. The held-out set is
// disjoint from the training set and recombines its wording, so a text
// encoder that groups training paraphrases has a fair shot at them.
ParaphraseMap builtin_train_paraphrases(const std::string& kind);
ParaphraseMap builtin_heldout_paraphrases(const std::string& kind);

} // namespace mmfp
