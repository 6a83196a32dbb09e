#pragma once

// Finite table of spatial partial derivatives of a scalar field at a point.
// This is the evaluation substrate shared by the compatibility algebra, the
// concavity checks and the scans.

#include <vector>

#include "stefanlab/errors.hpp"
#include "stefanlab/taylor.hpp"

namespace stefanlab {

class DerivJet {
public:
    DerivJet() = default;
    explicit DerivJet(int depth)
        : depth_(depth), v_(static_cast<size_t>(depth + 1) * (depth + 2) / 2, 0.0) {}

    /// Derivative values from a bivariate Taylor series (coefficient * i! j!).
    static DerivJet from_series(const Series2& s);

    int depth() const { return depth_; }

    /// Value of d^(i+j) f / dx^i dy^j; throws DepthError past the depth.
    double at(int i, int j) const;
    void set(int i, int j, double v);

    double value() const { return at(0, 0); }

    static size_t index(int i, int j, int depth) {
        return static_cast<size_t>(i) * (2 * depth + 3 - i) / 2 + static_cast<size_t>(j);
    }

private:
    int depth_ = -1;
    std::vector<double> v_;
};

} // namespace stefanlab
