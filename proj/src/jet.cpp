#include "stefanlab/jet.hpp"

#include <string>

namespace stefanlab {

DerivJet DerivJet::from_series(const Series2& s) {
    DerivJet j(s.deg());
    for (int i = 0; i <= s.deg(); ++i)
        for (int k = 0; i + k <= s.deg(); ++k) j.set(i, k, s.deriv(i, k));
    return j;
}

double DerivJet::at(int i, int j) const {
    if (i < 0 || j < 0 || i + j > depth_)
        throw DepthError("jet depth " + std::to_string(depth_) + " cannot provide d(" +
                         std::to_string(i) + "," + std::to_string(j) + ")");
    return v_[index(i, j, depth_)];
}

void DerivJet::set(int i, int j, double v) {
    if (i < 0 || j < 0 || i + j > depth_)
        throw DepthError("jet depth exceeded in set()");
    v_[index(i, j, depth_)] = v;
}

} // namespace stefanlab
