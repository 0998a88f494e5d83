#pragma once

#include <string>

#include "evcoref/coref_mlnn.hpp"
#include "evcoref/mention_extractor.hpp"

namespace evcoref {

// Checkpoints are JSON with every double printed to 17 significant digits,
// so save/load round-trips parameters exactly and reruns are byte-identical.

void save_extractor(const MentionExtractorModel& model,
                    const std::string& path);
MentionExtractorModel load_extractor(const std::string& path);

void save_mlnn(const MLNNModel& model, const std::string& path);
MLNNModel load_mlnn(const std::string& path);

// FNV-1a over the file's bytes, for run manifests.
std::string file_hash(const std::string& path);

}  // namespace evcoref
