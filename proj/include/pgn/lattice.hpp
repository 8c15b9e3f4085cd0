#pragma once

#include "dims.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace pgn {

using Real = boost::multiprecision::cpp_bin_float_50;
using IntVec = std::vector<long long>;

struct budget_error : std::runtime_error {
    std::vector<double> upper_bounds;
    budget_error(const std::string& what, std::vector<double> ub) : std::runtime_error(what), upper_bounds(std::move(ub)) {}
};

inline long long default_budget() {
    if (const char* s = std::getenv("PGN_BUDGET")) {
        char* end = nullptr;
        long long v = std::strtoll(s, &end, 10);
        if (end != s && v > 0) return v;
    }
    return 100000000LL;
}

class MatrixA {
public:
    MatrixA(Dimensions dims, std::vector<Real> entries) : dims_(dims), a_(std::move(entries)) {
        check_dims(dims_);
        if (static_cast<int>(a_.size()) != dims_.m * dims_.n) throw std::invalid_argument("matrix needs m*n entries");
        for (auto& x : a_)
            if (!boost::multiprecision::isfinite(x)) throw std::invalid_argument("matrix entries must be finite");
    }

    static MatrixA zero(Dimensions dims) { return MatrixA(dims, std::vector<Real>(dims.m * dims.n, Real(0))); }

    static MatrixA from_doubles(Dimensions dims, const std::vector<double>& v) {
        std::vector<Real> r(v.begin(), v.end());
        return MatrixA(dims, r);
    }

    // comma-separated, row-major; each entry a decimal or p/q
    static MatrixA parse(Dimensions dims, const std::string& csv) {
        std::vector<Real> r;
        std::stringstream ss(csv);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok.erase(0, tok.find_first_not_of(" \t"));
            tok.erase(tok.find_last_not_of(" \t") + 1);
            try {
                auto slash = tok.find('/');
                if (slash == std::string::npos) r.emplace_back(tok);
                else r.push_back(Real(tok.substr(0, slash)) / Real(tok.substr(slash + 1)));
            } catch (const std::exception&) {
                throw std::invalid_argument("bad matrix entry '" + tok + "'");
            }
        }
        return MatrixA(dims, r);
    }

    const Dimensions& dims() const { return dims_; }
    const Real& operator()(int i, int j) const { return a_[i * dims_.n + j]; }

private:
    Dimensions dims_;
    std::vector<Real> a_;
};

class LatticeBasis {
public:
    // B given row-major, columns generate the lattice
    LatticeBasis(int d, std::vector<double> rowmajor) : d_(d), b_(std::move(rowmajor)) {
        if (d < 1 || d > 6) throw std::invalid_argument("lattice dimension must lie in [1,6]");
        if (static_cast<int>(b_.size()) != d * d) throw std::invalid_argument("basis needs d*d entries");
        for (double x : b_)
            if (!std::isfinite(x)) throw std::invalid_argument("basis entries must be finite");
        inv_norm_ = general_inverse_norm();
    }

    int dim() const { return d_; }
    double operator()(int i, int j) const { return b_[i * d_ + j]; }
    double certified_inverse_norm() const { return inv_norm_; }
    bool flow_backed() const { return flow_.has_value(); }

    double det() const {
        std::vector<long double> a(b_.begin(), b_.end());
        long double det = 1;
        for (int c = 0; c < d_; ++c) {
            int p = c;
            for (int r = c + 1; r < d_; ++r)
                if (std::fabs(a[r * d_ + c]) > std::fabs(a[p * d_ + c])) p = r;
            if (a[p * d_ + c] == 0) return 0;
            if (p != c) {
                for (int k = 0; k < d_; ++k) std::swap(a[p * d_ + k], a[c * d_ + k]);
                det = -det;
            }
            det *= a[c * d_ + c];
            for (int r = c + 1; r < d_; ++r) {
                long double f = a[r * d_ + c] / a[c * d_ + c];
                for (int k = c; k < d_; ++k) a[r * d_ + k] -= f * a[c * d_ + k];
            }
        }
        return static_cast<double>(det);
    }

    // B z, with the residual p + A q formed in high precision for flow bases
    void image(const long long* z, double* out) const {
        if (flow_) {
            const auto& A = flow_->A;
            int m = A.dims().m, n = A.dims().n;
            for (int i = 0; i < m; ++i) {
                Real r(z[i]);
                for (int j = 0; j < n; ++j)
                    if (z[m + j]) r += A(i, j) * Real(z[m + j]);
                out[i] = static_cast<double>(r.convert_to<long double>() * flow_->up);
            }
            for (int j = 0; j < n; ++j) out[m + j] = static_cast<double>(static_cast<long double>(z[m + j]) * flow_->down);
            return;
        }
        for (int i = 0; i < d_; ++i) {
            long double s = 0;
            for (int j = 0; j < d_; ++j) s += static_cast<long double>(b_[i * d_ + j]) * z[j];
            out[i] = static_cast<double>(s);
        }
    }

    double norm_of(const IntVec& z) const {
        std::vector<double> v(d_);
        image(z.data(), v.data());
        double r = 0;
        for (double x : v) r = std::max(r, std::fabs(x));
        return r;
    }

private:
    struct Flow {
        MatrixA A;
        double t;
        long double up, down;
    };
    int d_;
    std::vector<double> b_;
    std::optional<Flow> flow_;
    double inv_norm_ = 0;

    double general_inverse_norm() const {
        // Gauss-Jordan in long double, then the max row sum with a small safety factor
        int d = d_;
        std::vector<long double> a(b_.begin(), b_.end()), inv(d * d, 0);
        for (int i = 0; i < d; ++i) inv[i * d + i] = 1;
        for (int c = 0; c < d; ++c) {
            int p = c;
            for (int r = c + 1; r < d; ++r)
                if (std::fabs(a[r * d + c]) > std::fabs(a[p * d + c])) p = r;
            if (a[p * d + c] == 0) throw std::invalid_argument("basis is singular");
            for (int k = 0; k < d; ++k) {
                std::swap(a[p * d + k], a[c * d + k]);
                std::swap(inv[p * d + k], inv[c * d + k]);
            }
            long double piv = a[c * d + c];
            for (int k = 0; k < d; ++k) { a[c * d + k] /= piv; inv[c * d + k] /= piv; }
            for (int r = 0; r < d; ++r) {
                if (r == c) continue;
                long double f = a[r * d + c];
                if (f == 0) continue;
                for (int k = 0; k < d; ++k) { a[r * d + k] -= f * a[c * d + k]; inv[r * d + k] -= f * inv[c * d + k]; }
            }
        }
        long double best = 0;
        for (int r = 0; r < d; ++r) {
            long double s = 0;
            for (int k = 0; k < d; ++k) s += std::fabs(inv[r * d + k]);
            best = std::max(best, s);
        }
        return static_cast<double>(best * (1 + 1e-9L));
    }

    friend LatticeBasis flow_basis(const MatrixA& A, double t);
};

// g_t u_A: top-left e^{t/m} I, top-right e^{t/m} A, bottom-right e^{-t/n} I
inline LatticeBasis flow_basis(const MatrixA& A, double t) {
    if (!std::isfinite(t)) throw std::domain_error("t must be finite");
    if (t < 0) throw std::domain_error("t must be nonnegative");
    int m = A.dims().m, n = A.dims().n, d = m + n;
    if (d > 6) throw std::invalid_argument("m+n above 6 is not supported");
    long double up = std::exp(static_cast<long double>(t) / m), down = std::exp(-static_cast<long double>(t) / n);
    std::vector<double> b(d * d, 0.0);
    for (int i = 0; i < m; ++i) {
        b[i * d + i] = static_cast<double>(up);
        for (int j = 0; j < n; ++j) b[i * d + m + j] = static_cast<double>(A(i, j).convert_to<long double>() * up);
    }
    for (int j = 0; j < n; ++j) b[(m + j) * d + m + j] = static_cast<double>(down);
    // the inverse is u_{-A} g_{-t}; its row sums are known in closed form
    long double inv = 0;
    for (int i = 0; i < m; ++i) {
        long double s = 0;
        for (int j = 0; j < n; ++j) s += boost::multiprecision::abs(A(i, j)).convert_to<long double>();
        inv = std::max(inv, 1 / up + s / down);
    }
    inv = std::max(inv, 1 / down);
    LatticeBasis B(d, std::move(b));
    B.flow_ = LatticeBasis::Flow{A, t, up, down};
    B.inv_norm_ = static_cast<double>(inv * (1 + 1e-9L));
    return B;
}

struct MinimaResult {
    std::vector<double> lambdas;
    std::vector<IntVec> witnesses;
    long long nodes = 0;
};

namespace detail {

inline long long checked(__int128 v) {
    if (v > std::numeric_limits<long long>::max() || v < std::numeric_limits<long long>::min())
        throw std::overflow_error("lattice coefficient overflow");
    return static_cast<long long>(v);
}

// columns of the integer transform U, each a vector in Z^d
using IntCols = std::vector<IntVec>;

inline IntCols identity_cols(int d) {
    IntCols u(d, IntVec(d, 0));
    for (int i = 0; i < d; ++i) u[i][i] = 1;
    return u;
}

inline void axpy(IntVec& y, long long a, const IntVec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = checked(static_cast<__int128>(y[i]) + static_cast<__int128>(a) * x[i]);
}

inline double sup_norm(const double* v, int d) {
    double r = 0;
    for (int i = 0; i < d; ++i) r = std::max(r, std::fabs(v[i]));
    return r;
}

struct Frame {
    const LatticeBasis& B;
    int d;
    IntCols U;
    std::vector<std::vector<double>> c;  // c[k] = B U_k

    Frame(const LatticeBasis& b, IntCols u) : B(b), d(b.dim()), U(std::move(u)), c(d, std::vector<double>(d)) {
        for (int k = 0; k < d; ++k) refresh(k);
    }
    void refresh(int k) { B.image(U[k].data(), c[k].data()); }
};

inline void gso(const Frame& F, std::vector<std::vector<long double>>& mu, std::vector<long double>& Bn) {
    int d = F.d;
    std::vector<std::vector<long double>> bs(d, std::vector<long double>(d));
    for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) bs[i][k] = F.c[i][k];
        for (int j = 0; j < i; ++j) {
            long double dot = 0;
            for (int k = 0; k < d; ++k) dot += static_cast<long double>(F.c[i][k]) * bs[j][k];
            mu[i][j] = Bn[j] > 0 ? dot / Bn[j] : 0;
            for (int k = 0; k < d; ++k) bs[i][k] -= mu[i][j] * bs[j][k];
        }
        long double s = 0;
        for (int k = 0; k < d; ++k) s += bs[i][k] * bs[i][k];
        Bn[i] = s;
    }
}

// LLL with delta = 0.99; positions barrier-1 and barrier are never swapped
inline void lll(Frame& F, int barrier = -1) {
    int d = F.d;
    std::vector<std::vector<long double>> mu(d, std::vector<long double>(d, 0));
    std::vector<long double> Bn(d, 0);
    gso(F, mu, Bn);
    int k = 1;
    for (int it = 0; k < d && it < 20000; ++it) {
        for (int j = k - 1; j >= 0; --j) {
            long double r = std::nearbyint(mu[k][j]);
            if (r == 0) continue;
            if (std::fabs(r) > 9e18L) throw std::overflow_error("lattice coefficient overflow");
            axpy(F.U[k], -static_cast<long long>(r), F.U[j]);
            F.refresh(k);
            gso(F, mu, Bn);
        }
        if (k == barrier || Bn[k] >= (0.99L - mu[k][k - 1] * mu[k][k - 1]) * Bn[k - 1]) {
            ++k;
        } else {
            std::swap(F.U[k], F.U[k - 1]);
            std::swap(F.c[k], F.c[k - 1]);
            gso(F, mu, Bn);
            k = std::max(k - 1, 1);
        }
    }
}

// min over a in R^k of ||x + sum_i a_i cols[i]||_inf, by vertex enumeration of the LP
inline double sup_dist(const double* x, const std::vector<const double*>& cols, int d, double* arg) {
    int k = static_cast<int>(cols.size());
    if (k == 0) return sup_norm(x, d);
    bool zero = true;
    for (int i = 0; i < d; ++i) if (x[i] != 0) zero = false;
    if (zero) {
        for (int i = 0; i < k; ++i) arg[i] = 0;
        return 0;
    }
    if (k >= d) {
        for (int i = 0; i < k; ++i) arg[i] = 0;
        return 0;
    }
    int n = k + 1;
    double best = std::numeric_limits<double>::infinity();
    std::vector<long double> M(n * (n + 1));
    std::vector<long double> sol(n);
    int rows[6];
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (__builtin_popcount(mask) != n) continue;
        int r = 0;
        for (int i = 0; i < d; ++i) if (mask >> i & 1) rows[r++] = i;
        for (unsigned sg = 0; sg < (1u << k); ++sg) {
            // row rr: s * (x_l + sum a_i c_i[l]) - t = 0
            for (int rr = 0; rr < n; ++rr) {
                long double s = (rr == 0 || !(sg >> (rr - 1) & 1)) ? 1 : -1;
                int l = rows[rr];
                for (int i = 0; i < k; ++i) M[rr * (n + 1) + i] = s * cols[i][l];
                M[rr * (n + 1) + k] = -1;
                M[rr * (n + 1) + n] = -s * x[l];
            }
            bool ok = true;
            for (int c = 0; c < n && ok; ++c) {
                int p = c;
                for (int rr = c + 1; rr < n; ++rr)
                    if (std::fabs(M[rr * (n + 1) + c]) > std::fabs(M[p * (n + 1) + c])) p = rr;
                long double scale = 0;
                for (int q = 0; q < n; ++q) scale = std::max(scale, std::fabs(M[p * (n + 1) + q]));
                if (M[p * (n + 1) + c] == 0 || std::fabs(M[p * (n + 1) + c]) < 1e-30L * scale) { ok = false; break; }
                if (p != c)
                    for (int q = 0; q <= n; ++q) std::swap(M[p * (n + 1) + q], M[c * (n + 1) + q]);
                for (int rr = c + 1; rr < n; ++rr) {
                    long double f = M[rr * (n + 1) + c] / M[c * (n + 1) + c];
                    if (f == 0) continue;
                    for (int q = c; q <= n; ++q) M[rr * (n + 1) + q] -= f * M[c * (n + 1) + q];
                }
            }
            if (!ok) continue;
            for (int c = n - 1; c >= 0; --c) {
                long double s = M[c * (n + 1) + n];
                for (int q = c + 1; q < n; ++q) s -= M[c * (n + 1) + q] * sol[q];
                sol[c] = s / M[c * (n + 1) + c];
            }
            long double t = std::fabs(sol[k]);
            if (!(t < best)) continue;
            long double worst = 0;
            for (int l = 0; l < d; ++l) {
                long double v = x[l];
                for (int i = 0; i < k; ++i) v += sol[i] * cols[i][l];
                worst = std::max(worst, std::fabs(v));
            }
            if (worst <= t * (1 + 1e-9L) + 1e-300L) {
                // report the achieved value so the bound never exceeds a real completion
                best = static_cast<double>(worst);
                for (int i = 0; i < k; ++i) arg[i] = static_cast<double>(sol[i]);
            }
        }
    }
    if (!std::isfinite(best)) {
        for (int i = 0; i < k; ++i) arg[i] = 0;
        return 0;  // degenerate: no usable bound
    }
    // guard rounding: lower the bound slightly so pruning stays conservative
    return best * (1 - 1e-11);
}

// Completes a primitive vector p to a unimodular matrix W (column-major) with W e_0 = p.
inline std::vector<IntVec> complete_unimodular(IntVec p) {
    int k = static_cast<int>(p.size());
    std::vector<IntVec> W(k, IntVec(k, 0));  // W[col][row]
    for (int i = 0; i < k; ++i) W[i][i] = 1;
    for (int i = 1; i < k; ++i) {
        while (p[i] != 0) {
            long long q = p[0] / p[i];
            p[0] -= q * p[i];
            // column i += q column 0
            for (int r = 0; r < k; ++r) W[i][r] = checked(static_cast<__int128>(W[i][r]) + static_cast<__int128>(q) * W[0][r]);
            std::swap(p[0], p[i]);
            std::swap(W[0], W[i]);
        }
    }
    if (p[0] == -1) {
        for (int r = 0; r < k; ++r) W[0][r] = -W[0][r];
    } else if (p[0] != 1) {
        throw std::logic_error("vector is not primitive");
    }
    return W;
}

struct Search {
    Frame& F;
    int head;  // first `head` columns span the sublattice of earlier minima
    long long budget;
    long long& nodes;
    double best = std::numeric_limits<double>::infinity();
    IntVec best_y;
    static constexpr double rel = 1e-12;

    void count() {
        if (++nodes > budget) throw budget_error("enumeration budget exceeded", {});
    }

    std::vector<const double*> colptrs(int upto) const {
        std::vector<const double*> r;
        for (int i = 0; i < upto; ++i) r.push_back(F.c[i].data());
        return r;
    }

    void run() {
        int d = F.d;
        best_y.assign(d, 0);
        for (int i = head; i < d; ++i) {
            double nv = sup_norm(F.c[i].data(), d);
            if (nv < best) {
                best = nv;
                std::fill(best_y.begin(), best_y.end(), 0);
                best_y[i] = 1;
            }
        }
        std::vector<double> s(d, 0.0);
        IntVec y(d, 0);
        rec(d - 1, s, y, false, 0.0);
    }

    // y_star: real minimizer for the coefficient at this level, from the parent LP
    void rec(int level, const std::vector<double>& s, IntVec& y, bool tail_nz, double y_star) {
        int d = F.d;
        const double* cl = F.c[level].data();
        auto lower = level > 0 ? colptrs(level) : std::vector<const double*>{};
        std::vector<double> arg(std::max(level, 1)), s2(d);
        if (!(std::fabs(y_star) < 4e18)) return;
        long long up = static_cast<long long>(std::ceil(y_star)), dn = static_cast<long long>(std::floor(y_star));
        if (dn == up) --dn;
        bool up_alive = true, dn_alive = true;
        auto visit = [&](long long v) -> bool {
            bool must_nz = level == head && !tail_nz;
            for (int i = 0; i < d; ++i) s2[i] = s[i] + static_cast<double>(v) * cl[i];
            count();
            double phi = level > 0 ? sup_dist(s2.data(), lower, d, arg.data()) : sup_norm(s2.data(), d);
            if (phi >= best * (1 - rel)) return false;
            if (must_nz && v == 0) return true;
            y[level] = v;
            bool nz = tail_nz || (level >= head && v != 0);
            if (level == 0) {
                // sup_dist shrinks by a guard factor; use the true norm for the incumbent
                double nv = sup_norm(s2.data(), d);
                if (nv < best * (1 - rel)) { best = nv; best_y = y; }
            } else {
                std::vector<double> s3 = s2;
                rec(level - 1, s3, y, nz, arg[level - 1]);
            }
            y[level] = 0;
            return true;
        };
        while (up_alive || dn_alive) {
            if (up_alive) { up_alive = visit(up); ++up; }
            if (dn_alive) { dn_alive = visit(dn); --dn; }
        }
    }
};

} // namespace detail

// Successive minima under the sup norm. `warm` carries an LLL transform between calls.
inline MinimaResult successive_minima(const LatticeBasis& B, long long budget = default_budget(),
                                      detail::IntCols* warm = nullptr, int count = -1) {
    using namespace detail;
    int d = B.dim();
    if (count < 0 || count > d) count = d;
    IntCols U0 = (warm && static_cast<int>(warm->size()) == d) ? *warm : identity_cols(d);
    Frame F(B, U0);
    lll(F);
    if (warm) *warm = F.U;
    MinimaResult res;
    std::vector<double> fallback;
    for (int k = 0; k < d; ++k) fallback.push_back(sup_norm(F.c[k].data(), d));
    std::sort(fallback.begin(), fallback.end());
    try {
        for (int j = 0; j < count; ++j) {
            Search S{F, j, budget, res.nodes};
            S.run();
            IntVec z(d, 0);
            for (int i = 0; i < d; ++i)
                if (S.best_y[i]) axpy(z, S.best_y[i], F.U[i]);
            res.witnesses.push_back(z);
            res.lambdas.push_back(B.norm_of(z));
            if (j + 1 == count) break;
            // re-split: first j+1 columns span the sublattice through the new witness
            IntVec tail(S.best_y.begin() + j, S.best_y.end());
            long long g = 0;
            for (long long v : tail) g = std::gcd(g, v < 0 ? -v : v);
            for (auto& v : tail) v /= g;
            auto W = complete_unimodular(tail);
            IntCols nu(F.U.begin(), F.U.begin() + j);
            for (int r = 0; r < d - j; ++r) {
                IntVec col(d, 0);
                for (int s = 0; s < d - j; ++s)
                    if (W[r][s]) axpy(col, W[r][s], F.U[j + s]);
                nu.push_back(col);
            }
            F.U = nu;
            for (int k = 0; k < d; ++k) F.refresh(k);
            lll(F, j + 1);
        }
    } catch (budget_error& e) {
        std::vector<double> ub = res.lambdas;
        for (std::size_t k = ub.size(); k < fallback.size(); ++k) ub.push_back(fallback[k]);
        throw budget_error("enumeration budget exceeded after " + std::to_string(res.nodes) + " nodes", ub);
    }
    // near-ties can swap order by a rounding step
    std::vector<int> ord(res.lambdas.size());
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](int a, int b) { return res.lambdas[a] < res.lambdas[b]; });
    MinimaResult out;
    out.nodes = res.nodes;
    for (int i : ord) {
        out.lambdas.push_back(res.lambdas[i]);
        out.witnesses.push_back(res.witnesses[i]);
    }
    return out;
}

struct Sample {
    double t = 0;
    std::vector<double> h;  // log lambda_j
    bool ok = false;
    std::string error;
};

inline std::vector<Sample> sm_function(const MatrixA& A, const std::vector<double>& grid, long long budget = default_budget(),
                                       int count = -1) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] >= 0)) throw std::domain_error("grid must be nonnegative");
        if (i && !(grid[i] > grid[i - 1])) throw std::domain_error("grid must increase");
    }
    std::vector<Sample> out;
    detail::IntCols warm;
    for (double t : grid) {
        Sample s;
        s.t = t;
        try {
            auto r = successive_minima(flow_basis(A, t), budget, &warm, count);
            for (double l : r.lambdas) s.h.push_back(std::log(l));
            s.ok = true;
        } catch (const budget_error& e) {
            s.error = e.what();
            for (double l : e.upper_bounds) s.h.push_back(std::log(l));
        } catch (const std::overflow_error& e) {
            s.error = e.what();
            warm.clear();
        }
        out.push_back(std::move(s));
    }
    return out;
}

inline double minkowski_defect(const std::vector<Sample>& samples) {
    if (samples.empty()) throw std::invalid_argument("no samples");
    double r = 0;
    for (auto& s : samples) {
        if (!s.ok) continue;
        double sum = 0;
        for (double h : s.h) sum += h;
        r = std::max(r, std::fabs(sum));
    }
    return r;
}

inline double minkowski_bound(int d) {
    double lf = 0;
    for (int i = 2; i <= d; ++i) lf += std::log(double(i));
    return d * std::log(2.0) + lf;
}

inline std::vector<double> tau_grid(double T, double window) {
    std::vector<double> g;
    double step = T / 200;
    for (int k = 0;; ++k) {
        double t = T - window + k * step;
        if (t > T + 1e-12 * T) break;
        g.push_back(t);
    }
    if (g.empty() || g.back() < T - 1e-12 * T) g.push_back(T);
    return g;
}

inline double estimate_tau_hat(const MatrixA& A, double T, double window, long long budget = default_budget()) {
    if (!(T > window && window > 0)) throw std::domain_error("need T > window > 0");
    double best = std::numeric_limits<double>::infinity();
    for (auto& s : sm_function(A, tau_grid(T, window), budget, 1)) {
        if (!s.ok) throw budget_error(s.error, {});
        if (s.t > 0) best = std::min(best, -s.h[0] / s.t);
    }
    return best;
}

inline double cusp_proportion(const MatrixA& A, double eps, double T, long long budget = default_budget()) {
    if (!(eps > 0 && T > 0)) throw std::domain_error("need eps > 0 and T > 0");
    const int N = 2000;
    std::vector<double> grid;
    for (int k = 0; k < N; ++k) grid.push_back((k + 0.5) * T / N);
    int hit = 0;
    for (auto& s : sm_function(A, grid, budget, 1)) {
        if (!s.ok) throw budget_error(s.error, {});
        if (s.h[0] <= std::log(eps)) ++hit;
    }
    return double(hit) / N;
}

} // namespace pgn
