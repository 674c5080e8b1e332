#pragma once

#include <cstddef>
#include <functional>

#include "nsb/hash.hpp"
#include "nsb/types.hpp"

namespace nsb {

using WinnerFn = std::function<bool(PartyId, Slot)>;

// A chain is valid iff
//   (a) every block except the terminal genesis satisfies winner(bid, slot),
//   (b) each block's pred equals the hash of its successor in the sequence
//       and the last element is the genesis block,
//   (c) the slot projection is strictly decreasing.
// The genesis block is exempt from (a): its baker is declared honest by
// convention and the lottery makes no promise about (0, 0).
bool valid_chain(const Chain& c, const WinnerFn& winner, const BlockHasher& hasher);

// Subsequence of c with block slots <= sl, order preserved. For a valid chain
// this equals dropping a head segment.
Chain prune(Slot sl, const Chain& c);

// True iff c1 equals a trailing segment of c2. (The model's "prefix": chains
// are stored head-first, so the shared old part is a suffix of the sequence.)
bool is_prefix(const Chain& c1, const Chain& c2);

// Chain obtained by following pred pointers from b through the pool bp,
// ending in genesis. Returns the empty chain when a pointer is unresolvable
// within bp, when a pointer revisit (cycle) is detected, or when the walk
// does not end at genesis. Ambiguous resolutions (two pool blocks with the
// same hash) resolve to the first block in pool order.
Chain cfb(const Block& b, const std::vector<Block>& bp, const BlockHasher& hasher);

// Position of a block: |cfb(b, bp)|.
std::size_t pos(const Block& b, const std::vector<Block>& bp, const BlockHasher& hasher);

}  // namespace nsb
