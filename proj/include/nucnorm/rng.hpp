#ifndef NUCNORM_RNG_HPP
#define NUCNORM_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>

namespace nucnorm
{

//
// Deterministic Gaussian source: xoshiro256** seeded through splitmix64,
// normals by the Box-Muller transform. No <random> distributions are used, so
// the stream is identical across standard library implementations.
//
class SeededRng
{
public:
    explicit SeededRng(std::uint64_t seed = 0) : seed_(seed)
    {
        std::uint64_t x = seed;
        for (auto& s : state_)
        {
            s = splitmix64(x);
        }
    }

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() noexcept
    {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t      = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() noexcept
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double normal() noexcept
    {
        if (spare_)
        {
            const double z = *spare_;
            spare_.reset();
            return z;
        }
        // 1 - u lies in (0, 1], so the log is finite
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double r  = std::sqrt(-2.0 * std::log(u1));
        const double th = 2.0 * std::numbers::pi * u2;
        spare_          = r * std::sin(th);
        return r * std::cos(th);
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) noexcept
    {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z               = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z               = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
    std::array<std::uint64_t, 4> state_{};
    std::optional<double> spare_;
};

} // namespace nucnorm

#endif // NUCNORM_RNG_HPP
