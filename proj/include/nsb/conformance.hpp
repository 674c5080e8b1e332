#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsb/blocktree.hpp"

namespace nsb {

struct ConformanceReport {
    bool pass = true;
    int extensions = 0;
    int queries = 0;
    // First failure only; enough to replay by (impl, seed, n_blocks).
    std::string counterexample;
};

// Longest valid chain constructible from the pool with slot <= sl, found by
// exhaustive path enumeration from genesis. Independent of the tree
// implementations; usable as an Optimal oracle on small pools.
std::size_t brute_force_best_length(const std::vector<Block>& pool, Slot sl,
                                    const ChainContext& ctx);

// Drives a randomized mixed stream of linked / unlinked / non-winning /
// future-slot / duplicate blocks against the named implementation,
// interleaving queries, and asserts the five tree correctness conditions.
// Optimal is checked against brute_force_best_length while the pool is at
// most optimal_limit blocks, and differentially against ReferenceTree
// afterwards.
ConformanceReport conformance_check(const std::string& impl, std::uint64_t seed,
                                    int n_blocks, unsigned hash_width = 64,
                                    std::size_t optimal_limit = 25);

}  // namespace nsb
