#include "nsb/party.hpp"

#include <stdexcept>

namespace nsb {

TxSelector make_tx_selector(const std::string& type) {
    if (type == "empty")
        return [](Slot, PartyId) { return Payload{}; };
    if (type == "slot-tagged")
        return [](Slot sl, PartyId p) {
            Payload out;
            for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(sl >> (8 * i)));
            for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(p >> (8 * i)));
            return out;
        };
    throw std::invalid_argument("unknown tx selector: " + type);
}

void honest_rcv(const Messages& msgs, Slot /*sl*/, LocalState& st, const WinnerFn& winner,
                bool filter_invalid) {
    for (const Message& m : msgs) {
        if (filter_invalid && !winner(m.block.bid, m.block.slot)) continue;
        st.tree->extend(m.block);
    }
}

Messages honest_bake(Slot sl, const Payload& txs, LocalState& st, const WinnerFn& winner) {
    // No block can extend genesis within slot 0 (strict slot decrease), so
    // the guard also skips the degenerate first slot.
    if (sl == 0 || !winner(st.id, sl)) return {};
    BestTip tip = st.tree->best_tip(sl - 1);
    Block b;
    b.pred = tip.head;
    b.slot = sl;
    b.txs = txs;
    b.bid = st.id;
    st.tree->extend(b);
    return {Message{b}};
}

}  // namespace nsb
