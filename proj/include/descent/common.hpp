#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace descent {

// Input files that do not conform to a format. CLI maps this to exit 65.
struct parse_error : std::runtime_error {
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

// Precondition violations on operations (unknown vertex, underflow, ...).
// CLI maps this to exit 64.
struct op_error : std::runtime_error {
    explicit op_error(const std::string& what) : std::runtime_error(what) {}
};

// A structural invariant that must hold on every valid run was observed
// broken. CLI maps this to exit 70.
struct invariant_error : std::runtime_error {
    explicit invariant_error(const std::string& what) : std::runtime_error(what) {}
};

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t a, uint64_t b) {
    return splitmix64(a * 0x100000001b3ull + b + 0x9e3779b97f4a7c15ull);
}

// Deterministic RNG used only by tests and the selftest battery. Not
// std::uniform_int_distribution, whose output is implementation defined.
struct DetRng {
    uint64_t state;
    explicit DetRng(uint64_t seed) : state(seed) {}
    uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        return splitmix64(state);
    }
    // uniform in [0, n)
    uint64_t below(uint64_t n) { return n == 0 ? 0 : next() % n; }
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (size_t i = v.size(); i > 1; --i) {
            size_t j = static_cast<size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }
};

// Fixed-width bitset over vertex indices.
struct Bits {
    int n = 0;
    std::vector<uint64_t> w;

    Bits() = default;
    explicit Bits(int size) : n(size), w((size + 63) / 64, 0) {}

    void set(int i) { w[i >> 6] |= 1ull << (i & 63); }
    void reset(int i) { w[i >> 6] &= ~(1ull << (i & 63)); }
    bool test(int i) const { return (w[i >> 6] >> (i & 63)) & 1; }

    void or_with(const Bits& o) {
        for (size_t i = 0; i < w.size(); ++i) w[i] |= o.w[i];
    }
    bool intersects(const Bits& o) const {
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & o.w[i]) return true;
        return false;
    }
    bool subset_of(const Bits& o) const {
        for (size_t i = 0; i < w.size(); ++i)
            if (w[i] & ~o.w[i]) return false;
        return true;
    }
    bool operator==(const Bits& o) const { return n == o.n && w == o.w; }
    bool operator<(const Bits& o) const { return w < o.w; }
    int count() const {
        int c = 0;
        for (uint64_t x : w) c += __builtin_popcountll(x);
        return c;
    }
    bool any() const {
        for (uint64_t x : w)
            if (x) return true;
        return false;
    }
    std::vector<int> members() const {
        std::vector<int> out;
        for (int i = 0; i < n; ++i)
            if (test(i)) out.push_back(i);
        return out;
    }
    uint64_t hash() const {
        uint64_t h = 0x243f6a8885a308d3ull;
        for (uint64_t x : w) h = mix(h, x);
        return h;
    }
};

} // namespace descent
