#pragma once

#include <cstdint>
#include <vector>

namespace nsb {

// Discrete round index. Slot 0 is reserved for the genesis block.
using Slot = std::uint32_t;

// Party identifier. Id 0 is reserved for the genesis baker and is considered
// honest in every scenario; configured parties use ids >= 1.
using PartyId = std::uint32_t;

constexpr PartyId kGenesisBaker = 0;

// Block hash value. Always carried in a 64-bit word; the configured hash
// width masks the high bits (16-bit "small-hash mode" exists to force
// collisions in tests).
using Hash = std::uint64_t;

// Opaque transaction payload; equality is byte-wise.
using Payload = std::vector<std::uint8_t>;

struct Block {
    Hash pred = 0;
    Slot slot = 0;
    Payload txs;
    PartyId bid = kGenesisBaker;

    friend bool operator==(const Block&, const Block&) = default;
};

// Head-first sequence of blocks: highest slot at index 0, genesis at the back
// when the chain is valid.
using Chain = std::vector<Block>;

inline Block genesis_block() { return Block{0, 0, {}, kGenesisBaker}; }

inline bool is_genesis(const Block& b) { return b == genesis_block(); }

}  // namespace nsb
