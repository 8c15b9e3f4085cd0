#include "support.hpp"

using namespace testing_support;

namespace {

Piece first_piece(const Template& f, const Scalar& b = R(1)) {
    return f.path().linear_pieces(f.path().t0(), f.path().t0() + b).front();
}

Template diverging_1_1() { return validate({1, 1}, PiecewisePath::linear(V({0, 0}), V({-1, 1}))); }
Template diagonal_1_2() { return validate({1, 2}, PiecewisePath::linear(V({0, 0, 0}), V({R(-1, 2), R(1, 4), R(1, 4)}))); }

Template sawtooth_1_2() {
    return make_periodic({1, 2}, {V({0, 0, 0}), {{R(2), V({R(-1, 2), R(1, 4), R(1, 4)})}, {R(1), V({1, R(-1, 2), R(-1, 2)})}}},
                         R(3), V({0, 0, 0}));
}

// S_+ by exhaustion: block boundaries fix the counts, inside a block S_+ comes first
std::pair<std::vector<int>, std::vector<int>> brute_s_sets(const Dimensions& dims, const Vec& x0, const Vec& slope) {
    int d = dims.d();
    std::vector<int> cuts;  // q with f_q < f_{q+1}, plus d
    for (int q = 1; q < d; ++q)
        if (x0[q - 1] != x0[q] || slope[q - 1] != slope[q]) cuts.push_back(q);
    cuts.push_back(d);
    std::vector<std::pair<std::vector<int>, std::vector<int>>> found;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (__builtin_popcount(mask) != dims.m) continue;
        bool good = true;
        Scalar F(0);
        int plus = 0, minus = 0, block_start = 0;
        bool seen_minus = false;
        for (int i = 1; i <= d && good; ++i) {
            F += slope[i - 1];
            bool in_plus = mask >> (i - 1) & 1;
            if (in_plus) {
                ++plus;
                if (seen_minus) good = false;
            } else {
                ++minus;
                seen_minus = true;
            }
            if (std::find(cuts.begin(), cuts.end(), i) != cuts.end()) {
                if (F != R(plus, dims.m) - R(minus, dims.n)) good = false;
                seen_minus = false;
                block_start = i;
            }
        }
        (void)block_start;
        if (!good) continue;
        std::vector<int> sp, sm;
        for (int i = 1; i <= d; ++i) (mask >> (i - 1) & 1 ? sp : sm).push_back(i);
        found.push_back({sp, sm});
    }
    if (found.size() != 1) throw std::logic_error("S-set oracle not unique");
    return found.front();
}

Template two_block(bool longer_second) {
    std::vector<Block> blocks;
    blocks.push_back({R(1), {{R(1), V({-1, 1})}}});
    if (longer_second) blocks.push_back({R(2), {{R(1, 2), V({1, -1})}, {R(1, 2), V({0, 0})}}});
    else blocks.push_back({R(1), {{R(1), V({1, -1})}}});
    GeometricAlternation g{R(1), blocks, longer_second ? R(4) : R(2)};
    return validate({1, 1}, PiecewisePath(2, R(1), {}, V({0, 0}), {}, g));
}

// running averages at the block ends of round `depth`, from the block recursion
std::pair<double, double> truncated_extremes(bool longer_second, int depth) {
    // block 1 has delta 0, block 2 has delta 1 on all its length
    Scalar b = longer_second ? R(4) : R(2), a1(1), a2 = longer_second ? R(2) : R(1);
    Scalar t(0), J(0), s(1);
    double lo = 1e9, hi = -1e9;
    for (int k = 0; k <= depth; ++k) {
        t += a1 * s;
        if (k == depth) lo = std::min(lo, to_double(J / t));
        t += a2 * s;
        J += a2 * s;
        if (k == depth) hi = std::max(hi, to_double(J / t));
        s *= b;
    }
    return {lo, hi};
}

} // namespace

TEST(EqualityPartition, Examples) {
    auto c = constant_template(2, 3);
    EXPECT_EQ(equality_partition(c, first_piece(c)), (EqualityPartition{{0, 5}}));
    auto f = diverging_1_1();
    EXPECT_EQ(equality_partition(f, first_piece(f)), (EqualityPartition{{0, 1}, {1, 2}}));
    auto g = diagonal_1_2();
    EXPECT_EQ(equality_partition(g, first_piece(g)), (EqualityPartition{{0, 1}, {1, 3}}));
}

TEST(EqualityPartition, RejectsNonPiece) {
    auto s = sawtooth_1_2();
    Piece bogus{R(0), R(3), V({0, 0, 0}), V({0, 0, 0})};
    EXPECT_THROW(equality_partition(s, bogus), std::invalid_argument);
}

TEST(Lpm, Examples) {
    auto g = diagonal_1_2();
    auto p = first_piece(g);
    EXPECT_EQ(L_pm(g, p, 0), std::make_pair(0, 0));
    EXPECT_EQ(L_pm(g, p, 1), std::make_pair(0, 1));
    EXPECT_EQ(L_pm(g, p, 3), std::make_pair(1, 2));
    EXPECT_THROW(L_pm(g, p, 2), std::domain_error);
    EXPECT_THROW(L_pm(g, p, 4), std::out_of_range);
    for (int m = 1; m <= 3; ++m)
        for (int n = 1; n <= 3; ++n) {
            auto c = constant_template(m, n);
            EXPECT_EQ(L_pm(c, first_piece(c), m + n), std::make_pair(m, n));
        }
}

TEST(SSets, Examples) {
    auto c = constant_template(2, 1);
    EXPECT_EQ(s_sets(c, first_piece(c)), std::make_pair(std::vector<int>{1, 2}, std::vector<int>{3}));
    auto f = diverging_1_1();
    EXPECT_EQ(s_sets(f, first_piece(f)), std::make_pair(std::vector<int>{2}, std::vector<int>{1}));
    auto g = diagonal_1_2();
    EXPECT_EQ(s_sets(g, first_piece(g)), std::make_pair(std::vector<int>{2}, std::vector<int>{1, 3}));
}

TEST(LocalDelta, Examples) {
    for (int m = 1; m <= 4; ++m)
        for (int n = 1; n <= 4; ++n) {
            auto c = constant_template(m, n);
            EXPECT_EQ(local_delta(c, first_piece(c)), m * n);
        }
    auto f = diverging_1_1();
    EXPECT_EQ(local_delta(f, first_piece(f)), 0);
    auto g = diagonal_1_2();
    EXPECT_EQ(local_delta(g, first_piece(g)), 1);
}

TEST(SSets, MatchExhaustiveOracle) {
    std::mt19937_64 g(11);
    int done = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int d = 2 + int(g() % 4), m = 1 + int(g() % (d - 1)), n = d - m;
        Dimensions dims{m, n};
        auto parts = all_partitions(d);
        auto blocks = parts[g() % parts.size()];
        auto pats = enumerate_slope_patterns(dims, blocks);
        ASSERT_FALSE(pats.empty());
        Vec s = pats[g() % pats.size()];
        Vec x0(d);
        for (std::size_t k = 0; k < blocks.size(); ++k)
            for (int i = blocks[k].first; i < blocks[k].second; ++i) x0[i] = Scalar(4 * int(k));
        PiecewisePath p(d, R(0), {}, x0, {s}, FiniteHorizon{R(1)});
        auto t = validate(dims, p);
        auto pc = first_piece(t);
        auto got = s_sets(t, pc);
        EXPECT_EQ(got, brute_s_sets(dims, x0, s));
        int lt = 0, gt = 0;
        for (int a : got.first)
            for (int b : got.second) (a < b ? lt : gt)++;
        int delta = local_delta(t, pc);
        EXPECT_EQ(delta, lt);
        EXPECT_GE(delta, 0);
        EXPECT_LE(delta, m * n);
        EXPECT_EQ(m * n - delta, gt);
        auto an = analyze_piece(t, pc);
        for (auto [lp, lm] : an.M) {
            EXPECT_GE(lp, 0);
            EXPECT_GE(lm, 0);
        }
        ++done;
    }
    EXPECT_EQ(done, 200);
}

TEST(RunningAverage, ConstantAndHalfHalf) {
    auto c = constant_template(2, 3);
    EXPECT_EQ(running_average(c, R(7, 3)), R(6));
    auto h = validate({1, 1}, PiecewisePath(2, R(0), {R(1)}, V({0, 0}), {V({-1, 1}), V({1, -1})}, FiniteHorizon{R(2)}));
    EXPECT_EQ(running_average(h, R(2)), R(1, 2));
    EXPECT_THROW(running_average(h, R(3)), horizon_error);
    EXPECT_THROW(running_average(h, R(0)), std::domain_error);
}

TEST(RunningAverage, MatchesRiemannSum) {
    auto s = sawtooth_1_2();
    auto delta_at = [&](const Scalar& t) {
        for (auto& p : s.path().linear_pieces(t - R(1, 256), t + R(1, 256)))
            if (p.a <= t && t < p.b) return local_delta(s, p);
        throw std::logic_error("no piece");
    };
    auto riemann = [&](const Scalar& T) {
        Scalar sum(0), h = R(1, 64);
        for (Scalar t = h / 2; t < T; t += h) sum += Scalar(delta_at(t)) * h;
        return sum / T;
    };
    EXPECT_EQ(running_average(s, R(3)), riemann(R(3)));
    EXPECT_EQ(running_average(s, R(3)), R(4, 3));
    std::mt19937_64 g(5);
    for (int i = 0; i < 50; ++i) {
        Scalar T = R(1 + int(g() % 1200), 64);
        EXPECT_EQ(running_average(s, T), riemann(T)) << to_string(T);
    }
}

TEST(RateLimits, ConstantAndPeriodic) {
    auto c = constant_template(3, 2);
    auto r = rate_limits(c);
    EXPECT_EQ(r.lower, R(6));
    EXPECT_EQ(r.upper, R(6));
    EXPECT_FALSE(r.truncated);
    auto s = rate_limits(sawtooth_1_2());
    EXPECT_EQ(s.lower, R(4, 3));
    EXPECT_EQ(s.upper, R(4, 3));
}

TEST(RateLimits, TwoBlockEqualLengths) {
    auto r = rate_limits(two_block(false));
    EXPECT_EQ(r.lower, R(1, 3));
    EXPECT_EQ(r.upper, R(1, 2));
    auto [lo, hi] = truncated_extremes(false, 20);
    EXPECT_NEAR(lo, 1.0 / 3, 1e-5);
    EXPECT_NEAR(hi, 1.0 / 2, 1e-5);
}

TEST(RateLimits, TwoBlockSecondLonger) {
    auto f = two_block(true);
    auto r = rate_limits(f);
    EXPECT_EQ(r.lower, R(1, 3));
    EXPECT_EQ(r.upper, R(2, 3));
    auto [lo, hi] = truncated_extremes(true, 20);
    EXPECT_NEAR(lo, 1.0 / 3, 1e-5);
    EXPECT_NEAR(hi, 2.0 / 3, 1e-5);
    // the closed form agrees with the running average at a late block end
    Scalar t_end = R(1);
    Scalar s(1);
    for (int k = 0; k < 6; ++k) { t_end += R(3) * s; s *= R(4); }
    EXPECT_NEAR(to_double(running_average(f, t_end)), 2.0 / 3, 1e-3);
}

TEST(TauHat, Examples) {
    EXPECT_EQ(uniform_dynamical_exponent(constant_template(2, 2)).value, R(0));
    EXPECT_EQ(uniform_dynamical_exponent(diverging_1_1()).value, R(1));
    auto osc = load_sample("oscillating_1_2.json");
    auto t = validate(osc.dims, osc.path);
    EXPECT_EQ(uniform_dynamical_exponent(t).value, R(1, 2));
    EXPECT_FALSE(uniform_dynamical_exponent(t).estimate);
    Vec x0 = zeros(9), s(9, R(1, 64));
    s[0] = R(-1, 8);
    auto lin = validate({1, 8}, PiecewisePath::linear(x0, s));
    EXPECT_EQ(uniform_dynamical_exponent(lin).value, R(1, 8));
    EXPECT_EQ(is_trivially_singular(lin), Decision::yes);
}

TEST(TauHat, FiniteHorizonIsEstimate) {
    auto fin = load_sample("finite_1_1.json");
    auto t = validate(fin.dims, fin.path);
    auto e = uniform_dynamical_exponent(t);
    EXPECT_TRUE(e.estimate);
    EXPECT_EQ(e.value, R(0));
    EXPECT_EQ(is_trivially_singular(t), Decision::undecidable);
    auto r = rate_limits(t);
    EXPECT_TRUE(r.truncated);
    EXPECT_EQ(r.lower, R(1, 2));
}

TEST(TriviallySingular, Examples) {
    EXPECT_EQ(is_trivially_singular(constant_template(1, 2)), Decision::no);
    auto f = diverging_1_1();
    EXPECT_EQ(is_trivially_singular(f), Decision::yes);
    auto r = rate_limits(f);
    EXPECT_EQ(r.lower, R(0));
    EXPECT_EQ(r.upper, R(0));
    EXPECT_EQ(is_trivially_singular(two_block(true)), Decision::no);
    EXPECT_EQ(is_trivially_singular(sawtooth_1_2()), Decision::no);
}

TEST(AnalysisPieces, InvariantsHold) {
    for (auto* name : {"oscillating_1_2.json", "sawtooth_1_1.json", "constant_2_1.json"}) {
        auto tf = load_sample(name);
        auto t = validate(tf.dims, tf.path);
        int m = tf.dims.m, n = tf.dims.n;
        for (auto& a : analysis_pieces(t)) {
            EXPECT_EQ(int(a.S_plus.size()), m);
            EXPECT_EQ(int(a.S_minus.size()), n);
            for (auto [lp, lm] : a.L) {
                EXPECT_GE(lp, 0);
                EXPECT_LE(lp, m);
                EXPECT_GE(lm, 0);
                EXPECT_LE(lm, n);
            }
            EXPECT_GE(a.delta, 0);
            EXPECT_LE(a.delta, m * n);
        }
    }
}
