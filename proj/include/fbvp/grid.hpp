#pragma once

#include <cstddef>
#include <vector>

#include "fbvp/error.hpp"

namespace fbvp {

/// Uniform grid t_i = i h, h = 1/N, on [0,1].
class Grid {
public:
    explicit Grid(std::size_t n) : n_(n) {
        if (n < 1) throw ValidationError("grid needs N >= 1");
    }

    std::size_t intervals() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ + 1; }
    double step() const noexcept { return 1.0 / static_cast<double>(n_); }

    double node(std::size_t i) const noexcept {
        // exact endpoints
        return i == n_ ? 1.0 : static_cast<double>(i) / static_cast<double>(n_);
    }

    std::vector<double> nodes() const {
        std::vector<double> out(size());
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = node(i);
        return out;
    }

private:
    std::size_t n_;
};

} // namespace fbvp
