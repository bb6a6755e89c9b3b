#pragma once

#include <cstdint>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace sinklab {

// Deterministic RNG with named substreams. One master seed fans out to
// independent streams ("fixture", "random-knockout", "split", "pope", ...)
// so each component reproduces on its own. Distributions are hand-rolled on
// top of splitmix64/xoshiro-style output to keep artifacts byte-identical
// across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    static Rng substream(std::uint64_t master_seed, std::string_view name) {
        std::uint64_t h = 1469598103934665603ull;  // FNV-1a
        for (char c : name) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return Rng(splitmix(master_seed ^ h));
    }

    static Rng substream(std::uint64_t master_seed, std::string_view name, std::uint64_t index) {
        Rng r = substream(master_seed, name);
        r.state_ = splitmix(r.state_ ^ splitmix(index + 0x51ed270b9ull));
        return r;
    }

    std::uint64_t next_u64() {
        state_ = splitmix(state_);
        return state_;
    }

    // Uniform in [0, n) without modulo bias.
    std::uint64_t next_below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Rng::next_below: n must be positive");
        const std::uint64_t threshold = (0ull - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 bits of precision.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    int uniform_int(int lo, int hi_inclusive) {
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi_inclusive - lo + 1)));
    }

    // Box-Muller; one value per call keeps the stream layout simple.
    double normal(double mean = 0.0, double stddev = 1.0);

    // k distinct values from [0, n), partial Fisher-Yates, ascending output.
    std::vector<int> sample_without_replacement(int n, int k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

}  // namespace sinklab
