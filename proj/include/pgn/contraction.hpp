#pragma once

#include "templates.hpp"

namespace pgn {

// blocks (p,q] of equal coordinates, 0-based p
using EqualityPartition = std::vector<std::pair<int, int>>;

struct PieceAnalysis {
    Scalar a, b;
    EqualityPartition blocks;
    std::vector<std::pair<int, int>> L;  // (L+, L-) at each block end q, prefixed by q=0
    std::vector<std::pair<int, int>> M;  // per block
    std::vector<int> S_plus, S_minus;    // 1-based
    int delta = 0;
};

namespace detail {

inline EqualityPartition partition_of(const Vec& start, const Vec& end) {
    EqualityPartition out;
    int d = static_cast<int>(start.size());
    int p = 0;
    for (int i = 1; i <= d; ++i) {
        bool tied = i < d && start[i - 1] == start[i] && end[i - 1] == end[i];
        if (!tied) {
            out.push_back({p, i});
            p = i;
        }
    }
    return out;
}

inline std::pair<int, int> solve_L(const Dimensions& dims, int q, const Scalar& Fq) {
    if (q == 0) return {0, 0};
    Scalar lp = (Fq + rat(q, dims.n)) * rat(dims.m * dims.n, dims.d());
    if (den(lp) != 1) throw std::domain_error("slope of F_" + std::to_string(q) + " not in Z(q)");
    int l = static_cast<int>(num(lp));
    if (l < 0 || l > dims.m || q - l < 0 || q - l > dims.n)
        throw std::domain_error("L_+ out of range for q=" + std::to_string(q));
    return {l, q - l};
}

inline PieceAnalysis analyze(const Dimensions& dims, const Piece& pc) {
    PieceAnalysis r;
    r.a = pc.a;
    r.b = pc.b;
    r.blocks = partition_of(pc.value, pc.end_value());
    r.L.push_back({0, 0});
    Scalar F(0);
    int i = 0;
    for (auto [p, q] : r.blocks) {
        for (; i < q; ++i) F += pc.slope[i];
        r.L.push_back(solve_L(dims, q, F));
    }
    for (std::size_t k = 0; k < r.blocks.size(); ++k) {
        auto [p, q] = r.blocks[k];
        int mp_ = r.L[k + 1].first - r.L[k].first;
        int mm = r.L[k + 1].second - r.L[k].second;
        if (mp_ < 0 || mm < 0) throw std::domain_error("negative M count; template violates (II)");
        r.M.push_back({mp_, mm});
        for (int s = p + 1; s <= p + mp_; ++s) r.S_plus.push_back(s);
        for (int s = p + mp_ + 1; s <= q; ++s) r.S_minus.push_back(s);
    }
    if (static_cast<int>(r.S_plus.size()) != dims.m || static_cast<int>(r.S_minus.size()) != dims.n)
        throw std::logic_error("S_+/S_- sizes differ from (m,n)");
    int lt = 0, gt = 0;
    for (int ip : r.S_plus)
        for (int im : r.S_minus) (ip < im ? lt : gt)++;
    if (lt + gt != dims.m * dims.n) throw std::logic_error("inversion count mismatch");
    r.delta = lt;
    return r;
}

inline bool piece_matches(const Template& f, const Piece& pc) {
    if (!(pc.a < pc.b)) return false;
    if (f.path().eval(pc.a) != pc.value) return false;
    if (f.path().eval(pc.b) != pc.end_value()) return false;
    for (auto& q : f.path().linear_pieces(pc.a, pc.b))
        if (q.slope != pc.slope) return false;
    return true;
}

inline void require_piece(const Template& f, const Piece& pc) {
    if (!piece_matches(f, pc)) throw std::invalid_argument("interval is not a linear piece of the template");
}

} // namespace detail

inline EqualityPartition equality_partition(const Template& f, const Piece& pc) {
    detail::require_piece(f, pc);
    return detail::partition_of(pc.value, pc.end_value());
}

inline std::pair<int, int> L_pm(const Template& f, const Piece& pc, int q) {
    detail::require_piece(f, pc);
    const int d = f.dims().d();
    if (q < 0 || q > d) throw std::out_of_range("q out of range");
    if (q == 0) return {0, 0};
    if (q < d) {
        Vec e = pc.end_value();
        if (pc.value[q - 1] == pc.value[q] && e[q - 1] == e[q]) throw std::domain_error("q separates tied coordinates");
    }
    Scalar F(0);
    for (int i = 0; i < q; ++i) F += pc.slope[i];
    return detail::solve_L(f.dims(), q, F);
}

inline std::pair<std::vector<int>, std::vector<int>> s_sets(const Template& f, const Piece& pc) {
    detail::require_piece(f, pc);
    auto r = detail::analyze(f.dims(), pc);
    return {r.S_plus, r.S_minus};
}

inline int local_delta(const Template& f, const Piece& pc) {
    detail::require_piece(f, pc);
    return detail::analyze(f.dims(), pc).delta;
}

inline PieceAnalysis analyze_piece(const Template& f, const Piece& pc) {
    detail::require_piece(f, pc);
    return detail::analyze(f.dims(), pc);
}

namespace detail {

// int of delta over raw pieces in [a,b)
inline Scalar delta_integral(const Template& f, const PiecewisePath& view, const Scalar& a, const Scalar& b) {
    Scalar s(0);
    if (!(a < b)) return s;
    view.walk(a, b, [&](const Piece& p) { s += Scalar(analyze(f.dims(), p).delta) * p.length(); });
    return s;
}

struct TailSummary {
    // periodic: prefix end, one-period integral
    // geometric: round-0 breakpoints u_i with J(u_i), Phi(u_i)
    Scalar start;
    Scalar prefix_integral;
    Scalar period, period_integral;
    Scalar ratio, A, J;
    std::vector<Scalar> u, Ju;
    std::vector<Vec> phi;
};

inline TailSummary summarize(const Template& f, const PiecewisePath& view) {
    TailSummary s;
    if (auto* pd = std::get_if<PeriodicDrift>(&view.tail())) {
        s.start = pd->start;
        s.prefix_integral = delta_integral(f, view, view.t0(), pd->start);
        s.period = pd->period;
        s.period_integral = delta_integral(f, view, pd->start, pd->start + pd->period);
        return s;
    }
    auto& g = std::get<GeometricAlternation>(view.tail());
    s.start = g.start;
    s.prefix_integral = delta_integral(f, view, view.t0(), g.start);
    s.ratio = g.ratio;
    s.A = PiecewisePath::round_length(g);
    Scalar bm1 = g.ratio - 1;
    Vec phi = (Scalar(1) / bm1) * view.round_displacement(g);
    Scalar u(0), J(0);
    s.u.push_back(u);
    s.Ju.push_back(J);
    s.phi.push_back(phi);
    view.walk(g.start, g.start + s.A, [&](const Piece& p) {
        J += Scalar(analyze(f.dims(), p).delta) * p.length();
        phi = phi + p.length() * p.slope;
        u += p.length();
        s.u.push_back(u);
        s.Ju.push_back(J);
        s.phi.push_back(phi);
    });
    s.J = J;
    return s;
}

} // namespace detail

inline Scalar running_average(const Template& f, const Scalar& T) {
    const PiecewisePath view = detail::periodic_view(f.path());
    if (T <= view.t0()) throw std::domain_error("running_average needs T > t0");
    if (auto h = view.horizon())
        if (T > *h) throw horizon_error("T beyond finite horizon");
    Scalar span = T - view.t0();
    if (auto* pd = std::get_if<PeriodicDrift>(&view.tail())) {
        Scalar end = pd->start + pd->period;
        if (T > end) {
            auto s = detail::summarize(f, view);
            Integer k = floor_int((T - pd->start) / pd->period);
            Scalar base = pd->start + Scalar(k) * pd->period;
            Scalar tot = s.prefix_integral + Scalar(k) * s.period_integral +
                         detail::delta_integral(f, view, base, T);
            return tot / span;
        }
    }
    return detail::delta_integral(f, view, view.t0(), T) / span;
}

struct RateLimits {
    Scalar lower, upper;
    bool truncated = false;
};

inline RateLimits rate_limits(const Template& f) {
    const PiecewisePath view = detail::periodic_view(f.path());
    if (auto h = view.horizon()) {
        Scalar v = running_average(f, *h);
        return {v, v, true};
    }
    auto s = detail::summarize(f, view);
    if (std::holds_alternative<PeriodicDrift>(view.tail())) {
        Scalar c = s.period_integral / s.period;
        return {c, c, false};
    }
    // limit cycle of the running average: R(u) = (J/(b-1) + J(u)) / (A/(b-1) + u), Mobius on each piece
    Scalar bm1 = s.ratio - 1;
    Scalar c0 = s.J / bm1, t0 = s.A / bm1;
    Scalar lo, hi;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        Scalar r = (c0 + s.Ju[i]) / (t0 + s.u[i]);
        if (i == 0 || r < lo) lo = r;
        if (i == 0 || r > hi) hi = r;
    }
    return {lo, hi, false};
}

struct TauHat {
    Scalar value;
    bool estimate = false;
};

inline TauHat uniform_dynamical_exponent(const Template& f) {
    const PiecewisePath view = detail::periodic_view(f.path());
    if (auto h = view.horizon()) {
        if (*h <= 0) throw std::domain_error("estimate needs a positive horizon");
        return {-f.path().eval(*h)[0] / *h, true};
    }
    if (auto* pd = std::get_if<PeriodicDrift>(&view.tail())) return {-pd->drift[0], false};
    auto s = detail::summarize(f, view);
    Scalar t0 = s.A / (s.ratio - 1);
    Scalar best;
    for (std::size_t i = 0; i < s.u.size(); ++i) {
        Scalar r = -s.phi[i][0] / (t0 + s.u[i]);
        if (i == 0 || r < best) best = r;
    }
    return {best, false};
}

enum class Decision { no, yes, undecidable };

inline Decision is_trivially_singular(const Template& f) {
    const PiecewisePath view = detail::periodic_view(f.path());
    const int d = f.dims().d();
    if (view.finite()) return Decision::undecidable;
    if (auto* pd = std::get_if<PeriodicDrift>(&view.tail())) {
        for (int j = 0; j + 1 < d; ++j)
            if (pd->drift[j + 1] > pd->drift[j]) return Decision::yes;
        return Decision::no;
    }
    auto s = detail::summarize(f, view);
    for (int j = 0; j + 1 < d; ++j) {
        bool grows = true;
        for (auto& ph : s.phi)
            if (!(ph[j + 1] > ph[j])) grows = false;
        if (grows) return Decision::yes;
    }
    return Decision::no;
}

// per-piece records over [t0, t_end): explicit part plus repetitions 0 and 1 of the tail
inline std::vector<PieceAnalysis> analysis_pieces(const Template& f) {
    const PiecewisePath view = detail::periodic_view(f.path());
    Scalar end = view.t0();
    if (auto h = view.horizon()) end = *h;
    else end = detail::rep_start(view, 2);
    std::vector<PieceAnalysis> out;
    if (end > view.t0())
        for (auto& p : view.linear_pieces(view.t0(), end)) out.push_back(detail::analyze(f.dims(), p));
    return out;
}

} // namespace pgn
