#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "truthrl/policy.hpp"
#include "truthrl/verifier.hpp"
#include "truthrl/world.hpp"

namespace truthrl {

struct OokReport {
    std::vector<bool> is_ook;
    std::vector<int> hits;
    int samples = 0;

    int size() const { return static_cast<int>(is_ook.size()); }
    int count_ook() const;
    std::string to_csv() const;
    static OokReport from_csv(std::string_view text);
};

// Each question draws from its own stream derived from (seed, question id);
// per sample: one action draw, two episode draws, then any verifier draws.
OokReport probe_ook(const Policy& policy, const QuestionBank& bank, int samples, Mode mode, const Verifier& verifier,
                    std::uint64_t seed, int workers = 1);

}  // namespace truthrl
