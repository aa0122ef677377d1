#ifndef LUMPKIT_RANDOM_HPP
#define LUMPKIT_RANDOM_HPP

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace lumpkit {

/// 64-bit Mersenne Twister with a fixed seeding and sampling scheme, so that
/// draws are identical on every platform. Stream s of seed x is seeded with
/// seed_seq{lo32(x), hi32(x), s}.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t next() { return engine_(); }

    // uniform on [0, 1) with 53 bits
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Index drawn proportionally to nonnegative weights; never returns an
    /// index of zero weight.
    std::size_t categorical(std::span<const double> weights);
    std::size_t categorical(const Eigen::VectorXd& weights);
    std::size_t categorical_row(const Eigen::MatrixXd& matrix, Eigen::Index row);

private:
    std::mt19937_64 engine_;
};

} // namespace lumpkit

#endif
