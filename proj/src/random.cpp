#include "lumpkit/random.hpp"

#include <stdexcept>

namespace lumpkit {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream & 0xffffffffu)};
    engine_.seed(seq);
}

namespace {

template <class Weight>
std::size_t pick(double u, std::size_t size, Weight&& weight) {
    double total = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
        total += weight(i);
    }
    double target = u * total;
    std::size_t last_positive = size;
    for (std::size_t i = 0; i < size; ++i) {
        double w = weight(i);
        if (w <= 0.0) {
            continue;
        }
        last_positive = i;
        if (target < w) {
            return i;
        }
        target -= w;
    }
    if (last_positive == size) {
        throw std::invalid_argument("categorical draw from all-zero weights");
    }
    return last_positive;
}

} // namespace

std::size_t Rng::categorical(std::span<const double> weights) {
    return pick(uniform(), weights.size(), [&](std::size_t i) { return weights[i]; });
}

std::size_t Rng::categorical(const Eigen::VectorXd& weights) {
    return pick(uniform(), static_cast<std::size_t>(weights.size()),
                [&](std::size_t i) { return weights[static_cast<Eigen::Index>(i)]; });
}

std::size_t Rng::categorical_row(const Eigen::MatrixXd& matrix, Eigen::Index row) {
    return pick(uniform(), static_cast<std::size_t>(matrix.cols()),
                [&](std::size_t i) { return matrix(row, static_cast<Eigen::Index>(i)); });
}

} // namespace lumpkit
