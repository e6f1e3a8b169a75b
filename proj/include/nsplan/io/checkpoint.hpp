#ifndef NSPLAN_IO_CHECKPOINT_HPP
#define NSPLAN_IO_CHECKPOINT_HPP

#include <optional>
#include <string>

#include "nsplan/nlm/model.hpp"
#include "nsplan/tensor/adam.hpp"

namespace nsplan {

// Single-file binary checkpoint ("NLMCKPT1"): header with the domain
// fingerprint and hyperparameters, then named float32 tensors, row-major,
// little-endian. Byte layout documented in docs/checkpoint_format.md; a
// golden fixture lives in tests/data.
inline constexpr char kCheckpointMagic[8] = {'N', 'L', 'M', 'C', 'K', 'P', 'T', '1'};

struct LoadedCheckpoint {
    NlmModel<float> model;
    std::optional<AdamState<float>> adam;
};

void save_checkpoint(const std::string& path, const NlmModel<float>& model,
                     const AdamState<float>* adam = nullptr);
std::string checkpoint_bytes(const NlmModel<float>& model,
                             const AdamState<float>* adam = nullptr);

LoadedCheckpoint load_checkpoint(const std::string& path);
LoadedCheckpoint parse_checkpoint(const std::string& bytes);

}  // namespace nsplan

#endif
