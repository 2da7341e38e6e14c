#include "glcoef/rng.hpp"

namespace glcoef {

RngStream::RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags)
    : RngStream(seed, std::vector<std::uint64_t>(tags)) {}

RngStream::RngStream(std::uint64_t seed, std::vector<std::uint64_t> tags)
    : seed_(seed), tags_(std::move(tags)) {
    reseed();
}

void RngStream::reseed() {
    std::vector<std::uint32_t> words;
    words.reserve(2 + 2 * tags_.size());
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed_);
    for (auto t : tags_) push(t);
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
    normal_.reset();
}

RngStream RngStream::split(std::uint64_t tag) const {
    auto tags = tags_;
    tags.push_back(tag);
    return RngStream(seed_, std::move(tags));
}

std::uint64_t RngStream::key() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&](std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            h ^= (v >> (8 * i)) & 0xff;
            h *= 0x100000001b3ULL;
        }
    };
    mix(seed_);
    for (auto t : tags_) mix(t);
    return h;
}

} // namespace glcoef
