#pragma once

#include <array>
#include <cstdint>

namespace maplk {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream. A stream is fully identified by
/// (seed, stream_id); draws are a pure function of that pair and the draw
/// index, so per-path streams do not depend on how paths are scheduled.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t next_u64();
    /// Uniform on (0, 1), never exactly 0 or 1.
    double uniform();
    double exponential(double rate);
    double normal();

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::array<std::uint32_t, 2> key_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;
    bool has_spare_normal_ = false;
    double spare_normal_ = 0.0;
};

/// Seed for an independent sub-experiment, e.g. one acceptance criterion.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

/// Stream-id namespaces keep independent purposes (paths, phase choices,
/// resampling) from ever sharing a counter range.
namespace streams {
inline constexpr std::uint64_t kPath = 0;
inline constexpr std::uint64_t kAux = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kDual = std::uint64_t{2} << 40;
inline constexpr std::uint64_t kResample = std::uint64_t{3} << 40;
inline constexpr std::uint64_t kStart = std::uint64_t{4} << 40;
}  // namespace streams

}  // namespace maplk
