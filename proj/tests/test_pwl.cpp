#include "support.hpp"

using namespace testing_support;

namespace {

PiecewisePath periodic_example() {
    return PiecewisePath(2, R(0), {R(1)}, V({0, 0}), {V({-1, 1}), V({R(1, 2), R(-1, 2)})},
                         PeriodicDrift{R(0), R(2), V({R(-1, 4), R(1, 4)})});
}

PiecewisePath geometric_example() {
    GeometricAlternation g{R(0), {{R(1), {{R(1), V({-1, 1})}}}, {R(1), {{R(1), V({1, -1})}}}}, R(2)};
    return PiecewisePath(2, R(0), {}, V({0, 0}), {}, g);
}

} // namespace

TEST(PwlEval, ConstantZero) {
    auto p = PiecewisePath::constant(3);
    EXPECT_EQ(p.eval(R(5)), V({0, 0, 0}));
}

TEST(PwlEval, SingleLinearPiece) {
    auto p = PiecewisePath::linear(V({0, 0}), V({1, -1}));
    EXPECT_EQ(eval(p, R(3)), V({3, -3}));
}

TEST(PwlEval, PeriodicRecursion) {
    auto p = periodic_example();
    EXPECT_EQ(p.eval(R(1)), V({-1, 1}));
    // f(5) = f(1) + 2 P v, with P v = (-1/2, 1/2)
    EXPECT_EQ(p.eval(R(5)), V({-2, 2}));
    EXPECT_EQ(p.period_displacement(), R(2) * V({R(-1, 4), R(1, 4)}));
    std::mt19937_64 g(7);
    for (int i = 0; i < 50; ++i) {
        Scalar t = random_rational(g, R(0), R(20));
        EXPECT_EQ(p.eval(t + R(2)), p.eval(t) + V({R(-1, 2), R(1, 2)}));
    }
}

TEST(PwlEval, DomainAndHorizonErrors) {
    auto p = PiecewisePath::constant(2, R(1));
    EXPECT_THROW(p.eval(R(0)), std::domain_error);
    PiecewisePath f(2, R(0), {}, V({0, 0}), {V({0, 0})}, FiniteHorizon{R(4)});
    EXPECT_NO_THROW(f.eval(R(4)));
    EXPECT_THROW(f.eval(R(9, 2)), horizon_error);
}

TEST(PwlEval, RejectsDiscontinuousPeriod) {
    auto p = periodic_example();
    EXPECT_THROW(PiecewisePath(2, R(0), {R(2)}, V({0, 0}), {V({0, 0})}, Unbounded{}), std::invalid_argument);
    EXPECT_THROW(PiecewisePath(2, R(0), {}, V({0}), {V({0, 0})}, Unbounded{}), std::invalid_argument);
    (void)p;
}

TEST(PwlPartialSum, Examples) {
    auto z = partial_sum_path(PiecewisePath::constant(3), 2);
    EXPECT_EQ(z.dim(), 1);
    EXPECT_EQ(z.eval(R(7)), V({0}));
    auto c = partial_sum_path(PiecewisePath::linear(V({0, 0}), V({1, -1})), 2);
    EXPECT_EQ(c.slopes().front(), V({0}));
    auto q = partial_sum_path(PiecewisePath::linear(V({0, 0, 0}), V({R(-1, 2), R(-1, 2), R(1)})), 2);
    EXPECT_EQ(q.slopes().front(), V({-1}));
    EXPECT_THROW(partial_sum_path(PiecewisePath::constant(3), 0), std::out_of_range);
    EXPECT_THROW(partial_sum_path(PiecewisePath::constant(3), 4), std::out_of_range);
}

TEST(PwlPartialSum, FullSumIsFlatForTemplates) {
    auto t = make_periodic({1, 2}, {V({0, 0, 0}), {{R(2), V({R(-1, 2), R(1, 4), R(1, 4)})}, {R(1), V({1, R(-1, 2), R(-1, 2)})}}},
                           R(3), V({0, 0, 0}));
    auto F = partial_sum_path(t.path(), 3);
    for (auto& pc : F.linear_pieces(R(0), R(12))) EXPECT_EQ(pc.slope, V({0}));
}

TEST(PwlPieces, ConstantWindow) {
    auto ps = linear_pieces(PiecewisePath::constant(2), R(0), R(10));
    ASSERT_EQ(ps.size(), 1u);
    EXPECT_EQ(ps[0].slope, V({0, 0}));
    EXPECT_EQ(ps[0].a, R(0));
    EXPECT_EQ(ps[0].b, R(10));
}

TEST(PwlPieces, PeriodicUnrolled) {
    auto ps = periodic_example().linear_pieces(R(0), R(4));
    ASSERT_EQ(ps.size(), 4u);
    Vec a = V({-1, 1}), b = V({R(1, 2), R(-1, 2)});
    EXPECT_EQ(ps[0].slope, a);
    EXPECT_EQ(ps[1].slope, b);
    EXPECT_EQ(ps[2].slope, a);
    EXPECT_EQ(ps[3].slope, b);
}

TEST(PwlPieces, GeometricLengths) {
    auto ps = geometric_example().linear_pieces(R(0), R(6));
    ASSERT_EQ(ps.size(), 4u);
    std::vector<Scalar> want{R(1), R(1), R(2), R(2)};
    for (int i = 0; i < 4; ++i) EXPECT_EQ(ps[i].length(), want[i]);
}

TEST(PwlPieces, InvertedWindowThrows) {
    auto p = PiecewisePath::constant(2);
    EXPECT_THROW(p.linear_pieces(R(3), R(3)), std::invalid_argument);
    EXPECT_THROW(p.linear_pieces(R(4), R(3)), std::invalid_argument);
}

TEST(PwlPieces, TilingAndPointwiseAgreement) {
    std::mt19937_64 g(11);
    for (const auto& p : {periodic_example(), geometric_example()}) {
        auto ps = p.linear_pieces(R(0), R(13));
        EXPECT_EQ(ps.front().a, R(0));
        EXPECT_EQ(ps.back().b, R(13));
        for (std::size_t i = 1; i < ps.size(); ++i) {
            EXPECT_EQ(ps[i - 1].b, ps[i].a);
            EXPECT_NE(ps[i - 1].slope, ps[i].slope);
            EXPECT_EQ(ps[i - 1].end_value(), ps[i].value);
        }
        for (int k = 0; k < 100; ++k) {
            Scalar t = random_rational(g, R(0), R(13), 997);
            auto it = std::find_if(ps.begin(), ps.end(), [&](const Piece& q) { return q.a <= t && t <= q.b; });
            ASSERT_NE(it, ps.end());
            EXPECT_EQ(it->value_at(t), p.eval(t));
        }
    }
}

TEST(PwlCanonical, EqualSlopesMerge) {
    PiecewisePath p(2, R(0), {R(1), R(2)}, V({0, 0}), {V({-1, 1}), V({-1, 1}), V({0, 0})}, Unbounded{});
    EXPECT_EQ(p.breakpoints(), std::vector<Scalar>{R(2)});
    EXPECT_EQ(p.slopes().size(), 2u);
    EXPECT_EQ(p.eval(R(5)), V({-2, 2}));
}

TEST(PwlJson, RoundTrip) {
    for (const auto& p : {periodic_example(), geometric_example(), PiecewisePath::constant(3)}) {
        auto q = path_from_json(path_to_json(p));
        EXPECT_TRUE(q == p);
    }
    EXPECT_THROW(path_from_json(json::parse(R"({"d":2,"values_at_t0":["x","0"],"slopes":[["0","0"]]})")), parse_error);
}
