#include "nsb/hash.hpp"

#include "nsb/rng.hpp"

namespace nsb {

namespace {

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

}  // namespace

std::vector<std::uint8_t> serialize_block(const Block& b) {
    std::vector<std::uint8_t> out;
    out.reserve(28 + b.txs.size());
    put_u64(out, b.pred);
    put_u64(out, b.slot);
    put_u64(out, b.txs.size());
    out.insert(out.end(), b.txs.begin(), b.txs.end());
    put_u32(out, b.bid);
    return out;
}

Hash BlockHasher::operator()(const Block& b) const {
    // FNV-1a over the serialized bytes, then a splitmix finalizer so the
    // truncated widths still spread well.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t byte : serialize_block(b)) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h) & mask_;
}

}  // namespace nsb
