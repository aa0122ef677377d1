#ifndef LUMPKIT_TESTS_FIXTURES_HPP
#define LUMPKIT_TESTS_FIXTURES_HPP

#include <string>
#include <vector>

#include "lumpkit/model.hpp"

namespace fixtures {

inline std::string path(const std::string& name) { return std::string(LUMPKIT_MODELS_DIR) + "/" + name + ".json"; }

inline lumpkit::Model load(const std::string& name) { return lumpkit::parse_model_file(path(name)); }

// every model shipped in models/
inline const std::vector<std::string> kAll{
    "strong2notSFS2",  "boundsnotequal", "g_observable", "non_g_observable", "se_sx",
    "sfs_not_strong",  "se_not_sfs",     "sfs2_example", "lossless_not_weak", "identity",
};

// aperiodic ones, usable with every analysis entry point
inline const std::vector<std::string> kErgodic{
    "strong2notSFS2", "boundsnotequal", "g_observable", "non_g_observable", "se_sx",
    "se_not_sfs",     "sfs2_example",   "lossless_not_weak", "identity",
};

} // namespace fixtures

#endif
