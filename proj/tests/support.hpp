#pragma once

#include <pgn/pgn.hpp>

#include <gtest/gtest.h>

#include <fstream>
#include <random>

namespace testing_support {

using namespace pgn;

inline Vec V(std::initializer_list<Scalar> xs) { return Vec(xs); }

inline Scalar R(long long p, long long q = 1) { return rat(p, q); }

// uniform rational in [lo, hi] with denominator den
inline Scalar random_rational(std::mt19937_64& g, const Scalar& lo, const Scalar& hi, long long den = 64) {
    std::uniform_int_distribution<long long> U(0, den);
    return lo + (hi - lo) * rat(U(g), den);
}

inline Template constant_template(int m, int n) {
    return validate({m, n}, PiecewisePath::constant(m + n));
}

#ifdef PGN_SAMPLES
inline std::string sample_path(const std::string& name) { return std::string(PGN_SAMPLES) + "/" + name; }

inline TemplateFile load_sample(const std::string& name) {
    std::ifstream in(sample_path(name));
    if (!in) throw std::runtime_error("missing sample " + name);
    return template_file_from_json(json::parse(in));
}
#endif

} // namespace testing_support
