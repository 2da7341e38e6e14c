#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace glcoef {

/// Seeded random stream. A stream is keyed by a global seed plus a list of
/// substream tags (experiment kind, block index, ...), so adding a new consumer
/// never perturbs the draws seen by an existing one.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags = {});
    RngStream(std::uint64_t seed, std::vector<std::uint64_t> tags);

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(engine_); }
    std::uint64_t next_u64() noexcept { return engine_(); }

    /// Independent child keyed by `tag`.
    RngStream split(std::uint64_t tag) const;

    std::uint64_t seed() const noexcept { return seed_; }
    const std::vector<std::uint64_t>& tags() const noexcept { return tags_; }
    /// Stable 64-bit digest of (seed, tags) for logging.
    std::uint64_t key() const noexcept;

private:
    void reseed();

    std::uint64_t seed_;
    std::vector<std::uint64_t> tags_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

/// FNV-1a hash of a name; used to turn experiment names into substream tags.
constexpr std::uint64_t tag_of(std::string_view name) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace glcoef
