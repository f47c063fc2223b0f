#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace wristview {

// Seeded xoshiro256++ stream. Platform RNGs (std::mt19937 distributions,
// rand) are not reproducible across standard libraries, so every random
// draw in the project goes through this generator.
//
// Stream splitting: Rng(seed, tag) hashes the purpose tag (FNV-1a 64) into
// the splitmix64 state used to expand the seed, so e.g. ("cloud", seed) and
// ("trajectory", seed) are independent streams of the same scene seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::string_view tag = {}) {
        std::uint64_t x = seed ^ fnv1a(tag);
        for (auto& s : state_) s = splitmix64(x);
        // all-zero state is the one invalid xoshiro state
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // uniform in [0,1), 53-bit resolution
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // uniform integer in [0, n), modulo-rejection so every value is unbiased
    std::uint64_t uniform_index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    // standard normal via Marsaglia polar (sqrt/log only; no trig)
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = uniform(-1.0, 1.0);
            v = uniform(-1.0, 1.0);
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * m;
        have_spare_ = true;
        return u * m;
    }

    Eigen::Vector3d normal3() {
        Eigen::Vector3d v;
        v.x() = normal();
        v.y() = normal();
        v.z() = normal();
        return v;
    }

    Eigen::Vector3d in_unit_ball() {
        Eigen::Vector3d v;
        do {
            v.x() = uniform(-1.0, 1.0);
            v.y() = uniform(-1.0, 1.0);
            v.z() = uniform(-1.0, 1.0);
        } while (v.squaredNorm() > 1.0);
        return v;
    }

    Eigen::Vector3d unit_vector() {
        Eigen::Vector3d v;
        double n2;
        do {
            v = in_unit_ball();
            n2 = v.squaredNorm();
        } while (n2 < 1e-12);
        return v / std::sqrt(n2);
    }

    // uniform on SO(3) by the subgroup algorithm (uniform quaternion)
    Eigen::Matrix3d rotation() {
        const double u1 = uniform();
        const double u2 = uniform();
        const double u3 = uniform();
        const double two_pi = 6.283185307179586476925286766559;
        const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
        Eigen::Quaterniond q(b * std::cos(two_pi * u3),
                             a * std::sin(two_pi * u2),
                             a * std::cos(two_pi * u2),
                             b * std::sin(two_pi * u3));
        return q.toRotationMatrix();
    }

    // Fisher-Yates partial shuffle: first k entries of a random permutation of [0,n)
    template <typename Index>
    void partial_shuffle(std::vector<Index>& items, std::size_t k) {
        const std::size_t n = items.size();
        if (n == 0) return;
        const std::size_t stop = (k < n) ? k : n - 1;
        for (std::size_t i = 0; i < stop; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(uniform_index(n - i));
            std::swap(items[i], items[j]);
        }
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) {
        x += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static constexpr std::uint64_t fnv1a(std::string_view s) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (char c : s) {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    std::uint64_t state_[4];
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace wristview
