#pragma once

#include <stdexcept>

namespace pgn {

struct Dimensions {
    int m = 1;
    int n = 1;
    int d() const { return m + n; }
    bool operator==(const Dimensions& o) const { return m == o.m && n == o.n; }
};

inline void check_dims(const Dimensions& dims) {
    if (dims.m < 1 || dims.n < 1) throw std::invalid_argument("m and n must be positive");
}

} // namespace pgn
