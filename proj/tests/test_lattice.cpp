#include "support.hpp"

#include <cmath>

using namespace testing_support;

namespace {

// greedy successive minima over the box ||z|| <= radius, exact integer rank
std::vector<double> box_minima(const LatticeBasis& B, long long radius) {
    int d = B.dim();
    std::vector<std::pair<double, IntVec>> pts;
    IntVec z(d, -radius);
    while (true) {
        bool nonzero = std::any_of(z.begin(), z.end(), [](long long v) { return v != 0; });
        if (nonzero) pts.push_back({B.norm_of(z), z});
        int i = 0;
        while (i < d && z[i] == radius) z[i++] = -radius;
        if (i == d) break;
        ++z[i];
    }
    std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first < b.first; });
    std::vector<Vec> basis;  // echelon rows
    std::vector<int> pivots;
    std::vector<double> out;
    for (auto& [nrm, v] : pts) {
        Vec r(d);
        for (int i = 0; i < d; ++i) r[i] = Scalar(v[i]);
        for (std::size_t k = 0; k < basis.size(); ++k)
            if (r[pivots[k]] != 0) {
                Scalar f = r[pivots[k]] / basis[k][pivots[k]];
                for (int i = 0; i < d; ++i) r[i] -= f * basis[k][i];
            }
        int p = -1;
        for (int i = 0; i < d && p < 0; ++i)
            if (r[i] != 0) p = i;
        if (p < 0) continue;
        basis.push_back(r);
        pivots.push_back(p);
        out.push_back(nrm);
        if (int(out.size()) == d) break;
    }
    return out;
}

void expect_certified(const LatticeBasis& B, const MinimaResult& r) {
    double radius = B.certified_inverse_norm() * r.lambdas.back() * (1 + 1e-9);
    ASSERT_LT(radius, 60) << "box oracle too large";
    auto ref = box_minima(B, static_cast<long long>(std::floor(radius)));
    ASSERT_EQ(ref.size(), r.lambdas.size());
    for (std::size_t j = 0; j < ref.size(); ++j) EXPECT_NEAR(r.lambdas[j], ref[j], 1e-9 * ref[j]) << "j=" << j;
}

MatrixA random_matrix(std::mt19937_64& g, Dimensions dims) {
    std::uniform_real_distribution<double> U(-1, 1);
    std::vector<double> v(dims.m * dims.n);
    for (auto& x : v) x = U(g);
    return MatrixA::from_doubles(dims, v);
}

const double golden = (std::sqrt(5.0) - 1) / 2;

MatrixA golden_matrix() { return MatrixA::parse({1, 1}, "0.6180339887498948482045868343656381177203091798057628621"); }

} // namespace

TEST(FlowBasis, Examples) {
    auto I = flow_basis(MatrixA::zero({2, 1}), 0);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(I(i, j), i == j ? 1.0 : 0.0);
    auto B = flow_basis(MatrixA::from_doubles({1, 1}, {0.3}), 2);
    EXPECT_NEAR(B(0, 0), std::exp(2.0), 1e-12);
    EXPECT_NEAR(B(0, 1), 0.3 * std::exp(2.0), 1e-12);
    EXPECT_EQ(B(1, 0), 0.0);
    EXPECT_NEAR(B(1, 1), std::exp(-2.0), 1e-15);
    EXPECT_TRUE(B.flow_backed());
}

TEST(FlowBasis, Unimodular) {
    std::mt19937_64 g(1);
    for (Dimensions dims : {Dimensions{1, 1}, Dimensions{1, 2}, Dimensions{2, 1}, Dimensions{2, 2}, Dimensions{3, 3}})
        for (double t : {0.0, 1.0, 7.5, 18.0, 30.0}) {
            auto B = flow_basis(random_matrix(g, dims), t);
            EXPECT_LE(std::fabs(std::log(std::fabs(B.det()))), 1e-9);
        }
}

TEST(FlowBasis, Errors) {
    auto A = MatrixA::zero({1, 1});
    EXPECT_THROW(flow_basis(A, -1), std::domain_error);
    EXPECT_THROW(flow_basis(A, NAN), std::domain_error);
    EXPECT_THROW(flow_basis(A, INFINITY), std::domain_error);
    EXPECT_THROW(flow_basis(MatrixA::zero({3, 4}), 1), std::invalid_argument);
    EXPECT_THROW(MatrixA::from_doubles({1, 1}, {NAN}), std::invalid_argument);
    EXPECT_THROW(MatrixA::parse({1, 2}, "1"), std::invalid_argument);
}

TEST(MatrixA, ParsesDecimalsAndFractions) {
    auto A = MatrixA::parse({1, 2}, "1/3, -0.25");
    EXPECT_NEAR(A(0, 0).convert_to<double>(), 1.0 / 3, 1e-16);
    EXPECT_EQ(A(0, 1).convert_to<double>(), -0.25);
}

TEST(SuccessiveMinima, Examples) {
    auto r = successive_minima(LatticeBasis(3, {1, 0, 0, 0, 1, 0, 0, 0, 1}));
    EXPECT_EQ(r.lambdas, (std::vector<double>{1, 1, 1}));
    for (auto& w : r.witnesses) EXPECT_EQ(std::count_if(w.begin(), w.end(), [](long long v) { return std::llabs(v) == 1; }), 1);
    auto s = successive_minima(LatticeBasis(2, {0.5, 0, 0, 2}));
    EXPECT_EQ(s.lambdas, (std::vector<double>{0.5, 2}));
    // columns (1,0) and (1/2,1/2): z=(0,1) and z=(1,-1) both have norm 1/2
    LatticeBasis C(2, {1, 0.5, 0, 0.5});
    auto c = successive_minima(C);
    EXPECT_DOUBLE_EQ(c.lambdas[0], 0.5);
    EXPECT_DOUBLE_EQ(c.lambdas[1], 0.5);
    expect_certified(C, c);
    EXPECT_DOUBLE_EQ(C.norm_of({1, -1}), 0.5);
}

TEST(SuccessiveMinima, WitnessesAreIndependentAndAttain) {
    std::mt19937_64 g(4);
    for (int trial = 0; trial < 30; ++trial) {
        Dimensions dims = trial % 2 ? Dimensions{1, 2} : Dimensions{2, 2};
        auto B = flow_basis(random_matrix(g, dims), 6.0 * (trial % 5));
        auto r = successive_minima(B);
        int d = dims.d();
        for (int j = 0; j < d; ++j) EXPECT_NEAR(B.norm_of(r.witnesses[j]), r.lambdas[j], 1e-12 * r.lambdas[j]);
        for (int j = 1; j < d; ++j) EXPECT_LE(r.lambdas[j - 1], r.lambdas[j]);
        std::vector<Vec> rows;
        for (auto& w : r.witnesses) {
            Vec v;
            for (long long x : w) v.push_back(Scalar(x));
            rows.push_back(v);
        }
        // exact determinant by elimination
        Scalar det(1);
        for (int c = 0; c < d; ++c) {
            int p = c;
            while (p < d && rows[p][c] == 0) ++p;
            ASSERT_LT(p, d) << "witnesses dependent";
            std::swap(rows[p], rows[c]);
            det *= rows[c][c];
            for (int k = c + 1; k < d; ++k) {
                Scalar f = rows[k][c] / rows[c][c];
                for (int i = 0; i < d; ++i) rows[k][i] -= f * rows[c][i];
            }
        }
        EXPECT_NE(det, 0);
    }
}

TEST(SuccessiveMinima, MatchesBoxOracle) {
    std::mt19937_64 g(9);
    for (int trial = 0; trial < 40; ++trial) {
        Dimensions dims = trial % 3 == 0 ? Dimensions{1, 1} : trial % 3 == 1 ? Dimensions{1, 2} : Dimensions{2, 1};
        double t = 0.4 * (trial % 6);
        auto B = flow_basis(random_matrix(g, dims), t);
        expect_certified(B, successive_minima(B));
    }
    int general = 0;
    for (int trial = 0; trial < 40; ++trial) {
        std::uniform_real_distribution<double> U(-2, 2);
        std::vector<double> b(9);
        for (auto& x : b) x = U(g);
        LatticeBasis B(3, b);
        if (B.certified_inverse_norm() > 8) continue;
        expect_certified(B, successive_minima(B));
        ++general;
    }
    EXPECT_GE(general, 10);
}

TEST(SuccessiveMinima, BudgetError) {
    auto B = flow_basis(golden_matrix(), 20);
    try {
        successive_minima(B, 1);
        FAIL() << "expected budget_error";
    } catch (const budget_error& e) {
        EXPECT_EQ(e.upper_bounds.size(), 2u);
        for (double u : e.upper_bounds) EXPECT_GT(u, 0);
    }
    auto s = sm_function(golden_matrix(), {20.0}, 1);
    EXPECT_FALSE(s[0].ok);
    EXPECT_FALSE(s[0].error.empty());
}

TEST(SmFunction, ZeroMatrix) {
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(i);
    auto s = sm_function(MatrixA::zero({1, 1}), grid);
    for (auto& x : s) {
        ASSERT_TRUE(x.ok);
        EXPECT_NEAR(x.h[0], -x.t, 1e-9);
        EXPECT_NEAR(x.h[1], x.t, 1e-9);
    }
    EXPECT_NEAR(minkowski_defect(s), 0, 1e-9);
}

TEST(SmFunction, RationalSlope) {
    auto A = MatrixA::parse({1, 1}, "1/3");
    auto s = sm_function(A, {10.0, 20.0, 30.0});
    // (-1,3) maps to (0, 3 e^{-t})
    for (auto& x : s) EXPECT_NEAR(x.h[0], -x.t + std::log(3.0), 1e-9);
}

TEST(SmFunction, NondecreasingInIndex) {
    std::mt19937_64 g(6);
    std::vector<double> grid;
    for (int i = 0; i <= 60; ++i) grid.push_back(0.5 * i);
    for (Dimensions dims : {Dimensions{1, 2}, Dimensions{2, 1}, Dimensions{2, 2}}) {
        for (auto& x : sm_function(random_matrix(g, dims), grid)) {
            ASSERT_TRUE(x.ok) << x.error;
            for (std::size_t j = 1; j < x.h.size(); ++j) EXPECT_LE(x.h[j - 1], x.h[j]);
        }
    }
}

TEST(SmFunction, GridRefinementKeepsValues) {
    auto A = MatrixA::from_doubles({1, 2}, {0.318, -0.771});
    std::vector<double> coarse, fine;
    for (int i = 0; i <= 30; ++i) coarse.push_back(i);
    for (int i = 0; i <= 120; ++i) fine.push_back(0.25 * i);
    auto a = sm_function(A, coarse), b = sm_function(A, fine);
    for (int i = 0; i <= 30; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_NEAR(a[i].h[j], b[4 * i].h[j], 1e-12);
    EXPECT_LE(minkowski_defect(a), minkowski_defect(b));
}

TEST(SmFunction, RejectsBadGrid) {
    auto A = MatrixA::zero({1, 1});
    EXPECT_THROW(sm_function(A, {1.0, 0.5}), std::domain_error);
    EXPECT_THROW(sm_function(A, {-1.0}), std::domain_error);
    EXPECT_THROW(sm_function(A, {1.0, 1.0}), std::domain_error);
}

TEST(MinkowskiDefect, WithinExplicitBound) {
    std::mt19937_64 g(12);
    std::vector<double> grid;
    for (int i = 0; i <= 30; ++i) grid.push_back(i);
    EXPECT_NEAR(minkowski_bound(3), 3 * std::log(2.0) + std::log(6.0), 1e-15);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = sm_function(random_matrix(g, {1, 2}), grid);
        for (auto& x : s) ASSERT_TRUE(x.ok);
        EXPECT_LE(minkowski_defect(s), minkowski_bound(3));
    }
    EXPECT_THROW(minkowski_defect({}), std::invalid_argument);
}

TEST(EstimateTauHat, Examples) {
    double r = estimate_tau_hat(MatrixA::parse({1, 1}, "3/7"), 30, 10);
    EXPECT_GE(r, 0.9);
    EXPECT_LE(r, 1.0);
    EXPECT_LE(estimate_tau_hat(golden_matrix(), 30, 10), 0.02);
    EXPECT_GE(estimate_tau_hat(MatrixA::zero({1, 2}), 30, 10), 0.45);
    EXPECT_THROW(estimate_tau_hat(golden_matrix(), 10, 10), std::domain_error);
}

TEST(EstimateTauHat, GoldenRatioStaysAwayFromCusp) {
    // convergent denominators q_k: |q golden - p| >= 1/(sqrt5 q + q) so lambda_1 is bounded below
    std::vector<double> grid;
    for (int i = 0; i <= 300; ++i) grid.push_back(0.1 * i);
    for (auto& x : sm_function(golden_matrix(), grid)) {
        ASSERT_TRUE(x.ok);
        EXPECT_GE(x.h[0], -std::log(std::sqrt(5.0) + 1) / 2 - 1e-9);
    }
    EXPECT_NEAR(golden_matrix()(0, 0).convert_to<double>(), golden, 1e-16);
}

TEST(CuspProportion, Examples) {
    auto A = MatrixA::parse({1, 1}, "1/3");
    double p20 = cusp_proportion(A, 0.01, 20), p40 = cusp_proportion(A, 0.01, 40);
    EXPECT_LT(p20, p40);
    EXPECT_GE(p40, 0.84);
    EXPECT_EQ(cusp_proportion(golden_matrix(), 2.0, 30), 1.0);
    EXPECT_EQ(cusp_proportion(golden_matrix(), 0.1, 30), 0.0);
    EXPECT_THROW(cusp_proportion(A, 0, 30), std::domain_error);
}
