#pragma once

#include <cstdint>
#include <set>
#include <tuple>

namespace sinklab::tinylmm {

// Additive attention-mask overlay. Entries are pure block directives (the
// -inf sentinel); the overlay can only remove attention, never reveal the
// upper triangle, so it is stored as a set of blocked cells.
class CausalMaskOverlay {
public:
    static constexpr int kAllHeads = -1;

    struct Entry {
        int layer = 0;
        int head = kAllHeads;  // kAllHeads blocks the cell in every head
        int query = 0;
        int key = 0;

        auto operator<=>(const Entry&) const = default;
    };

    void block(int layer, int head, int query, int key) {
        entries_.insert(Entry{layer, head, query, key});
    }
    void block_all_heads(int layer, int query, int key) { block(layer, kAllHeads, query, key); }

    bool blocked(int layer, int head, int query, int key) const {
        return entries_.count(Entry{layer, kAllHeads, query, key}) > 0 ||
               entries_.count(Entry{layer, head, query, key}) > 0;
    }

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    const std::set<Entry>& entries() const { return entries_; }

    void merge(const CausalMaskOverlay& other) {
        entries_.insert(other.entries_.begin(), other.entries_.end());
    }

    friend bool operator==(const CausalMaskOverlay& a, const CausalMaskOverlay& b) {
        return a.entries_ == b.entries_;
    }

private:
    std::set<Entry> entries_;
};

}  // namespace sinklab::tinylmm
