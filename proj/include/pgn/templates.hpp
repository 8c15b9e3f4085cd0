#pragma once

#include "dims.hpp"
#include "pwl.hpp"

#include <set>
#include <sstream>

namespace pgn {

// Z(j) = {L+/m - L-/n : L+ + L- = j}, sorted
inline std::vector<Scalar> slope_set(const Dimensions& dims, int j) {
    check_dims(dims);
    if (j < 0 || j > dims.d()) throw std::out_of_range("slope_set: j out of range");
    std::vector<Scalar> out;
    for (int lp = std::max(0, j - dims.n); lp <= std::min(j, dims.m); ++lp)
        out.push_back(rat(lp, dims.m) - rat(j - lp, dims.n));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool in_slope_set(const Dimensions& dims, int j, const Scalar& s) {
    // s = L+/m - (j-L+)/n  =>  L+ = (s + j/n) mn/(m+n)
    Scalar lp = (s + rat(j, dims.n)) * rat(dims.m * dims.n, dims.d());
    if (den(lp) != 1) return false;
    return lp >= std::max(0, j - dims.n) && lp <= std::min(j, dims.m);
}

struct Violation {
    std::string axiom;  // "(I)", "(II)", "(III)", "tail"
    Scalar time;
    std::string detail;
};

class Template;

struct Validation {
    std::vector<Violation> violations;
    std::vector<std::string> certificate;
    bool ok() const { return violations.empty(); }
};

struct validation_error : std::runtime_error {
    std::vector<Violation> violations;
    explicit validation_error(std::vector<Violation> v)
        : std::runtime_error(summary(v)), violations(std::move(v)) {}
    static std::string summary(const std::vector<Violation>& v) {
        std::string s = "template invalid:";
        for (auto& x : v) s += " " + x.axiom + " at t=" + to_string(x.time) + " (" + x.detail + ")";
        return s;
    }
};

namespace detail {

inline std::vector<Piece> raw_pieces(const PiecewisePath& p, const Scalar& a, const Scalar& b) {
    std::vector<Piece> out;
    if (a < b) p.walk(a, b, [&](const Piece& x) { out.push_back(x); });
    return out;
}

// bit j-1 set iff f_j == f_{j+1} at the given point
inline std::vector<bool> tie_bits(const Vec& v) {
    std::vector<bool> t(v.size() > 0 ? v.size() - 1 : 0);
    for (std::size_t j = 0; j + 1 < v.size(); ++j) t[j] = v[j] == v[j + 1];
    return t;
}

struct RepPattern {
    std::vector<Vec> slopes;
    std::vector<std::vector<bool>> start_ties, piece_ties;
    bool operator==(const RepPattern& o) const {
        return slopes == o.slopes && start_ties == o.start_ties && piece_ties == o.piece_ties;
    }
};

inline RepPattern rep_pattern(const std::vector<Piece>& ps) {
    RepPattern r;
    for (auto& p : ps) {
        r.slopes.push_back(p.slope);
        auto s = tie_bits(p.value), e = tie_bits(p.end_value());
        std::vector<bool> on(s.size());
        for (std::size_t j = 0; j < s.size(); ++j) on[j] = s[j] && e[j];
        r.start_ties.push_back(s);
        r.piece_ties.push_back(on);
    }
    return r;
}

// Unbounded last piece viewed as a period of length 1
inline PiecewisePath periodic_view(const PiecewisePath& p) {
    if (!std::holds_alternative<Unbounded>(p.tail())) return p;
    const Piece& last = p.explicit_pieces().back();
    return PiecewisePath(p.dim(), p.t0(), p.breakpoints(), p.values_at_t0(), p.slopes(),
                         PeriodicDrift{last.a, Scalar(1), last.slope});
}

// start of repetition r of the tail
inline Scalar rep_start(const PiecewisePath& p, int r) {
    if (auto* pd = std::get_if<PeriodicDrift>(&p.tail())) return pd->start + Scalar(r) * pd->period;
    auto& g = std::get<GeometricAlternation>(p.tail());
    Scalar A = PiecewisePath::round_length(g), t = g.start, s(1);
    for (int k = 0; k < r; ++k) { t += s * A; s *= g.ratio; }
    return t;
}

inline std::string fmt_vec(const Vec& v) {
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + to_string(v[i]);
    return s + ")";
}

} // namespace detail

class Template {
public:
    const Dimensions& dims() const { return dims_; }
    const PiecewisePath& path() const { return path_; }
    const std::vector<std::string>& certificate() const { return cert_; }

private:
    Dimensions dims_;
    PiecewisePath path_;
    std::vector<std::string> cert_;
    Template(Dimensions d, PiecewisePath p, std::vector<std::string> c)
        : dims_(d), path_(std::move(p)), cert_(std::move(c)) {}
    friend std::optional<Template> certify(const Dimensions&, const PiecewisePath&, Validation*);
};

inline Validation check_axioms(const Dimensions& dims, const PiecewisePath& path) {
    check_dims(dims);
    const int d = dims.d();
    if (path.dim() != d) throw std::invalid_argument("path dimension does not match m+n");
    Validation res;
    std::set<std::string> seen;
    auto report = [&](const std::string& axiom, const std::string& key, const Scalar& t, const std::string& detail) {
        if (seen.insert(axiom + key).second) res.violations.push_back({axiom, t, detail});
    };

    const PiecewisePath view = detail::periodic_view(path);
    const bool tailed = !view.finite();
    Scalar tend = view.t0();
    if (auto h = view.horizon()) tend = *h;
    if (tailed) tend = detail::rep_start(view, 3);

    std::vector<Piece> ps = detail::raw_pieces(view, view.t0(), tend);

    Scalar lo = -rat(1, dims.n), hi = rat(1, dims.m);
    auto check_slope = [&](const Vec& s, const Scalar& t) {
        for (int i = 0; i < d; ++i)
            if (s[i] < lo || s[i] > hi)
                report("(II)", std::to_string(i), t,
                       "slope of f_" + std::to_string(i + 1) + " is " + to_string(s[i]) + ", outside [" +
                           to_string(lo) + ", " + to_string(hi) + "]");
    };
    auto check_order = [&](const Vec& v, const Scalar& t) {
        for (int j = 0; j + 1 < d; ++j)
            if (v[j] > v[j + 1])
                report("(I)", std::to_string(j), t,
                       "f_" + std::to_string(j + 1) + " > f_" + std::to_string(j + 2) + " at " + detail::fmt_vec(v));
    };

    check_order(view.values_at_t0(), view.t0());
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const Piece& p = ps[k];
        check_slope(p.slope, p.a);
        Vec e = p.end_value();
        check_order(e, p.b);
        Scalar F(0);
        for (int j = 1; j <= d; ++j) {
            F += p.slope[j - 1];
            bool strict = j == d || !(p.value[j - 1] == p.value[j] && e[j - 1] == e[j]);
            if (!strict) continue;
            if (!in_slope_set(dims, j, F))
                report("(III)", "Z" + std::to_string(j), p.a,
                       "slope of F_" + std::to_string(j) + " is " + to_string(F) + ", not in Z(" + std::to_string(j) + ")");
            if (k + 1 < ps.size() && ps[k + 1].a == p.b) {
                const Piece& q = ps[k + 1];
                bool gap_open = j == d || e[j - 1] < e[j];
                Vec qe = q.end_value();
                bool qstrict = j == d || !(q.value[j - 1] == q.value[j] && qe[j - 1] == qe[j]);
                if (gap_open && qstrict) {
                    Scalar G(0);
                    for (int i = 0; i < j; ++i) G += q.slope[i];
                    if (G < F)
                        report("(III)", "C" + std::to_string(j), p.b,
                               "F_" + std::to_string(j) + " not convex: slope " + to_string(F) + " then " + to_string(G));
                }
            }
        }
    }
    if (ps.empty()) {
        for (auto& s : view.slopes()) check_slope(s, view.t0());
    }

    if (tailed) {
        std::vector<detail::RepPattern> pats;
        for (int r = 0; r < 3; ++r)
            pats.push_back(detail::rep_pattern(detail::raw_pieces(view, detail::rep_start(view, r), detail::rep_start(view, r + 1))));
        // point ties may open after repetition 0; gaps are nondecreasing and affine in r, so 1 vs 2 decides them
        auto same = [](const detail::RepPattern& a, const detail::RepPattern& b, bool points) {
            return a.slopes == b.slopes && a.piece_ties == b.piece_ties && (!points || a.start_ties == b.start_ties);
        };
        for (int r = 1; r < 3; ++r)
            if (!same(pats[r], pats[r - 1], r == 2) || !same(pats[r], pats[0], false))
                report("tail", "pattern", detail::rep_start(view, r), "equality pattern differs between repetitions 0 and " + std::to_string(r));
        // asymptotic ordering: gap growth per repetition must be nonnegative
        if (auto* pd = std::get_if<PeriodicDrift>(&view.tail())) {
            Vec D = view.period_displacement();
            if (D != pd->period * pd->drift)
                report("tail", "drift", pd->start + pd->period, "period displacement " + detail::fmt_vec(D) + " differs from P*v");
            for (int j = 0; j + 1 < d; ++j)
                if (pd->drift[j] > pd->drift[j + 1])
                    report("(I)", "drift" + std::to_string(j), pd->start,
                           "drift of f_" + std::to_string(j + 1) + " exceeds drift of f_" + std::to_string(j + 2));
        } else {
            auto& g = std::get<GeometricAlternation>(view.tail());
            Vec D = view.round_displacement(g);
            Scalar bm1 = g.ratio - 1;
            // Phi(u) = D/(b-1) + G(u); gaps scale like b^k Phi
            Vec phi = (Scalar(1) / bm1) * D;
            auto check_phi = [&](const Vec& ph, const Scalar& t) {
                for (int j = 0; j + 1 < d; ++j)
                    if (ph[j] > ph[j + 1])
                        report("(I)", "scaled" + std::to_string(j), t,
                               "gap f_" + std::to_string(j + 2) + " - f_" + std::to_string(j + 1) + " shrinks without bound");
            };
            check_phi(phi, g.start);
            Scalar t = g.start;
            for (auto& blk : g.blocks)
                for (auto& st : blk.pattern) {
                    Scalar len = blk.duration * st.weight;
                    phi = phi + len * st.slope;
                    t += len;
                    check_phi(phi, t);
                }
        }
    }
    if (res.ok()) {
        res.certificate = {"(I)", "(II)", "(III)"};
        if (tailed) res.certificate.push_back("tail");
    }
    return res;
}

inline std::optional<Template> certify(const Dimensions& dims, const PiecewisePath& path, Validation* out = nullptr) {
    Validation v = check_axioms(dims, path);
    if (out) *out = v;
    if (!v.ok()) return std::nullopt;
    return Template(dims, path, v.certificate);
}

inline Template validate(const Dimensions& dims, const PiecewisePath& path) {
    Validation v;
    auto t = certify(dims, path, &v);
    if (!t) throw validation_error(v.violations);
    return *t;
}

struct Schedule {
    Vec start;
    std::vector<std::pair<Scalar, Vec>> steps;  // (duration, slope)
};

inline Template make_periodic(const Dimensions& dims, const Schedule& s, const Scalar& period, const Vec& drift) {
    check_dims(dims);
    Scalar sum(0), total(0);
    for (auto& x : drift) sum += x;
    if (sum != 0) throw std::invalid_argument("drift must sum to zero");
    if (s.steps.empty()) throw std::invalid_argument("empty schedule");
    std::vector<Scalar> bps;
    std::vector<Vec> slopes;
    Vec disp = zeros(dims.d());
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
        auto& [len, sl] = s.steps[i];
        if (len <= 0) throw std::invalid_argument("schedule durations must be positive");
        total += len;
        disp = disp + len * sl;
        if (i + 1 < s.steps.size()) bps.push_back(total);
        slopes.push_back(sl);
    }
    if (total != period) throw std::invalid_argument("schedule length differs from the period");
    if (disp != period * drift) throw std::invalid_argument("schedule displacement must equal P*v for continuity");
    PiecewisePath p(dims.d(), Scalar(0), bps, s.start, slopes, PeriodicDrift{Scalar(0), period, drift});
    return validate(dims, p);
}

} // namespace pgn
