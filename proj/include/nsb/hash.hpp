#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nsb/types.hpp"

namespace nsb {

// Serializes a block in a fixed little-endian layout:
//   pred (8 bytes) | slot (8 bytes) | txs length (8 bytes) | txs bytes | bid (4 bytes)
// so hashes are bit-stable across runs and platforms.
std::vector<std::uint8_t> serialize_block(const Block& b);

// Non-cryptographic block hasher. Deterministic mixer over the serialized
// fields, masked to a configurable width (1..64 bits). Not collision
// resistant by design: the width knob exists to make collisions reachable for
// the collision-free monitor's tests.
class BlockHasher {
public:
    explicit BlockHasher(unsigned width_bits = 64) : width_(width_bits) {
        if (width_bits == 0 || width_bits > 64)
            throw std::invalid_argument("hash width must be in 1..64");
        mask_ = width_bits == 64 ? ~Hash{0} : ((Hash{1} << width_bits) - 1);
    }

    unsigned width() const { return width_; }

    Hash operator()(const Block& b) const;

private:
    unsigned width_;
    Hash mask_;
};

}  // namespace nsb
