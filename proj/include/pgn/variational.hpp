#pragma once

#include "contraction.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>

namespace pgn {

struct infeasible_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// per-block choice of L_+ at each block end; block slopes split evenly
inline std::vector<Vec> enumerate_slope_patterns(const Dimensions& dims, const EqualityPartition& blocks) {
    check_dims(dims);
    const int d = dims.d();
    if (blocks.empty()) throw std::invalid_argument("empty equality pattern");
    int prev = 0;
    for (auto [p, q] : blocks) {
        if (p != prev || q <= p) throw std::invalid_argument("blocks must tile (0,d] in order");
        prev = q;
    }
    if (prev != d) throw std::invalid_argument("blocks must tile (0,d] in order");

    std::vector<Vec> out;
    std::vector<int> lp(blocks.size());
    std::function<void(std::size_t, int)> rec = [&](std::size_t k, int last_lp) {
        if (k == blocks.size()) {
            Vec s(d);
            Scalar Fp(0);
            int qprev = 0;
            for (std::size_t b = 0; b < blocks.size(); ++b) {
                int q = blocks[b].second;
                Scalar Fq = rat(lp[b], dims.m) - rat(q - lp[b], dims.n);
                Scalar each = (Fq - Fp) / Scalar(q - qprev);
                for (int i = qprev; i < q; ++i) s[i] = each;
                Fp = Fq;
                qprev = q;
            }
            out.push_back(s);
            return;
        }
        int q = blocks[k].second, qprev = k ? blocks[k - 1].second : 0;
        int last_lm = qprev - last_lp;
        for (int l = std::max(0, q - dims.n); l <= std::min(q, dims.m); ++l) {
            if (l < last_lp || q - l < last_lm) continue;
            if (q == d && l != dims.m) continue;
            lp[k] = l;
            rec(k + 1, l);
        }
    };
    rec(0, 0);
    return out;
}

struct SlopePattern {
    EqualityPartition blocks;
    Vec slope;
    // gap g sits between coordinates g and g+1 (0-based)
    bool tied(int g) const {
        for (auto [p, q] : blocks)
            if (p <= g && g + 1 < q) return true;
        return false;
    }
    Scalar F(int j) const {
        Scalar s(0);
        for (int i = 0; i < j; ++i) s += slope[i];
        return s;
    }
};

inline std::vector<EqualityPartition> all_partitions(int d) {
    std::vector<EqualityPartition> out;
    for (unsigned mask = 0; mask < (1u << (d - 1)); ++mask) {
        EqualityPartition b;
        int p = 0;
        for (int g = 0; g < d - 1; ++g)
            if (!(mask >> g & 1)) { b.push_back({p, g + 1}); p = g + 1; }
        b.push_back({p, d});
        out.push_back(b);
    }
    return out;
}

inline std::vector<SlopePattern> slope_catalog(const Dimensions& dims) {
    std::vector<SlopePattern> out;
    for (auto& b : all_partitions(dims.d()))
        for (auto& s : enumerate_slope_patterns(dims, b)) out.push_back({b, s});
    return out;
}

enum class Mode { hausdorff, packing };
enum class FamilyKind { geometric, periodic };

struct FamilySpec {
    Dimensions dims{1, 2};
    int phase_count = 4;           // longest cycle searched
    Scalar tau;
    FamilyKind kind = FamilyKind::geometric;
    Mode mode = Mode::hausdorff;
    std::vector<int> sequence;     // optional: fixed catalog indices
    std::vector<double> parameters;  // optional: starting knobs for a fixed sequence
};

struct SearchResult {
    std::optional<Template> best_template;
    Scalar lower_rate, upper_rate, tau_hat;
    std::vector<double> history;  // best objective after each evaluation
    std::uint64_t seed = 0;
    std::vector<int> sequence;
    int keq = -1;
    std::vector<double> knobs;
    long long evaluations = 0;
    double objective() const { return history.empty() ? -std::numeric_limits<double>::infinity() : history.back(); }
};

namespace detail {

// exact Gaussian elimination; returns false when inconsistent
struct LinearSystem {
    int cols = 0;
    std::vector<Vec> rows;  // each row has cols+1 entries, last is the right side
    void add(Vec r) { rows.push_back(std::move(r)); }

    struct Solved {
        std::vector<int> pivots, free;
        std::vector<Vec> R;
    };

    std::optional<Solved> reduce() const {
        Solved s;
        s.R = rows;
        int r = 0;
        std::vector<bool> is_pivot(cols, false);
        for (int c = 0; c < cols && r < static_cast<int>(s.R.size()); ++c) {
            int p = -1;
            for (int i = r; i < static_cast<int>(s.R.size()); ++i)
                if (s.R[i][c] != 0) { p = i; break; }
            if (p < 0) continue;
            std::swap(s.R[p], s.R[r]);
            Scalar inv = 1 / s.R[r][c];
            for (auto& x : s.R[r]) x *= inv;
            for (int i = 0; i < static_cast<int>(s.R.size()); ++i) {
                if (i == r || s.R[i][c] == 0) continue;
                Scalar f = s.R[i][c];
                for (int k = c; k <= cols; ++k) s.R[i][k] -= f * s.R[r][k];
            }
            s.pivots.push_back(c);
            is_pivot[c] = true;
            ++r;
        }
        for (int i = r; i < static_cast<int>(s.R.size()); ++i)
            if (s.R[i][cols] != 0) return std::nullopt;
        s.R.resize(r);
        for (int c = 0; c < cols; ++c)
            if (!is_pivot[c]) s.free.push_back(c);
        return s;
    }

    static Vec complete(const Solved& s, int cols, const std::map<int, Scalar>& fixed) {
        Vec u(cols, Scalar(0));
        for (auto& [c, v] : fixed) u[c] = v;
        for (std::size_t i = 0; i < s.pivots.size(); ++i) {
            Scalar v = s.R[i][cols];
            for (int c : s.free) v -= s.R[i][c] * u[c];
            u[s.pivots[i]] = v;
        }
        return u;
    }
};

struct Candidate {
    std::vector<int> seq;
    int keq = -1;                              // boundary carrying -f_1 = tau t (geometric)
    std::vector<std::pair<int, int>> ties;     // (boundary, gap)
    int free_count = 0;
};

inline std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix(seed)) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double normal() {
        double u1 = std::max(uniform(), 1e-300), u2 = uniform();
        return std::sqrt(-2 * std::log(u1)) * std::cos(2 * M_PI * u2);
    }
    std::uint64_t next() { return gen_(); }

private:
    std::mt19937_64 gen_;
};

inline std::vector<int> canonical_rotation(const std::vector<int>& s) {
    std::vector<int> best = s;
    for (std::size_t r = 1; r < s.size(); ++r) {
        std::vector<int> t(s.begin() + r, s.end());
        t.insert(t.end(), s.begin(), s.begin() + r);
        best = std::min(best, t);
    }
    return best;
}

class Family {
public:
    explicit Family(const FamilySpec& spec) : spec_(spec), cat_(slope_catalog(spec.dims)), d_(spec.dims.d()) {
        if (spec.tau < 0 || spec.tau > rat(1, spec.dims.n)) throw std::domain_error("tau outside [0, 1/n]");
        if (spec.phase_count < 1 || spec.phase_count > 8) throw std::invalid_argument("phase count must lie in [1,8]");
        build_candidates();
    }

    const std::vector<Candidate>& candidates() const { return cands_; }
    const std::vector<SlopePattern>& catalog() const { return cat_; }
    int knob_count(const Candidate& c) const { return 1 + c.free_count; }

    struct Eval {
        double value;  // objective if feasible, else -1 - violation
        std::optional<Template> tmpl;
        Scalar lower, upper, tau_hat;
    };

    Eval evaluate(const Candidate& c, const std::vector<double>& knobs) const {
        Eval e;
        const int K = static_cast<int>(c.seq.size());
        double lb = std::clamp(knobs[0], std::log(0x1.0p-10), std::log(0x1.0p16));
        Scalar beta = snap(std::exp(lb));
        if (beta <= 0) return fail(e, 1);
        auto sys = system(c, beta);
        auto red = sys.reduce();
        if (!red) return fail(e, 1);
        std::map<int, Scalar> fixed;
        std::size_t ki = 1;
        double scale = spec_.kind == FamilyKind::geometric ? to_double(beta) : 1.0;
        for (int col : red->free) {
            double k = ki < knobs.size() ? knobs[ki] : 0.0;
            ++ki;
            if (col >= d_ && col < d_ + K) fixed[col] = snap(scale * std::exp(std::clamp(k, -40.0, 40.0)) / K);
            else fixed[col] = snap(scale * k);
        }
        Vec u = LinearSystem::complete(*red, sys.cols, fixed);

        // inequalities: durations, gaps at boundaries, tau slack, drift order
        double viol = 0;
        Vec x(u.begin(), u.begin() + d_);
        std::vector<Scalar> dur(u.begin() + d_, u.begin() + d_ + K);
        for (auto& v : dur)
            if (v <= 0) viol += 1 - to_double(v) / scale;
        Vec xk = x;
        Scalar tk = spec_.kind == FamilyKind::geometric ? Scalar(1) : Scalar(0);
        for (int k = 0; k < K; ++k) {
            for (int g = 0; g + 1 < d_; ++g)
                if (xk[g] > xk[g + 1]) viol += to_double(xk[g] - xk[g + 1]) / scale;
            if (spec_.kind == FamilyKind::geometric) {
                Scalar slack = -xk[0] - spec_.tau * tk;
                if (slack < 0) viol += -to_double(slack) / scale;
            }
            xk = xk + dur[k] * cat_[c.seq[k]].slope;
            tk += dur[k];
        }
        Vec v;
        if (spec_.kind == FamilyKind::periodic) {
            v.assign(u.begin() + d_ + K, u.end());
            for (int g = 0; g + 1 < d_; ++g)
                if (v[g] > v[g + 1]) viol += to_double(v[g] - v[g + 1]);
        }
        if (viol > 0) return fail(e, viol);

        PiecewisePath path = spec_.kind == FamilyKind::geometric ? geometric_path(c, x, dur, beta) : periodic_path(c, x, dur, v);
        auto t = certify(spec_.dims, path);
        if (!t) return fail(e, 1e-3);
        auto th = uniform_dynamical_exponent(*t);
        if (th.value != spec_.tau) return fail(e, 1e-3 + std::fabs(to_double(th.value - spec_.tau)));
        auto r = rate_limits(*t);
        e.lower = r.lower;
        e.upper = r.upper;
        e.tau_hat = th.value;
        e.value = to_double(spec_.mode == Mode::hausdorff ? r.lower : r.upper);
        e.tmpl = std::move(t);
        return e;
    }

private:
    FamilySpec spec_;
    std::vector<SlopePattern> cat_;
    int d_;
    std::vector<Candidate> cands_;

    static Eval& fail(Eval& e, double viol) {
        e.value = -1 - viol;
        return e;
    }

    int unknowns(int K) const { return d_ + K + (spec_.kind == FamilyKind::periodic ? d_ : 0); }

    LinearSystem system(const Candidate& c, const Scalar& beta) const {
        const int K = static_cast<int>(c.seq.size());
        LinearSystem s;
        s.cols = unknowns(K);
        auto row = [&] { return Vec(s.cols + 1, Scalar(0)); };
        const bool geo = spec_.kind == FamilyKind::geometric;
        const Scalar P = geo ? beta : Scalar(1);
        // closure: the round displacement equals beta x_0, or the period displacement equals v
        for (int i = 0; i < d_; ++i) {
            Vec r = row();
            for (int l = 0; l < K; ++l) r[d_ + l] = -cat_[c.seq[l]].slope[i];
            if (geo) r[i] = beta;
            else r[d_ + K + i] = 1;
            s.add(r);
        }
        {
            Vec r = row();
            for (int l = 0; l < K; ++l) r[d_ + l] = 1;
            r[s.cols] = P;
            s.add(r);
        }
        // x_k = x_0 + sum_{l<k} d_l s_l
        auto at_boundary = [&](int k, int coord, const Scalar& w, Vec& r) {
            r[coord] += w;
            for (int l = 0; l < k; ++l) r[d_ + l] += w * cat_[c.seq[l]].slope[coord];
        };
        for (auto [k, g] : c.ties) {
            Vec r = row();
            at_boundary(k, g + 1, Scalar(1), r);
            at_boundary(k, g, Scalar(-1), r);
            s.add(r);
            if (!geo) {
                Vec q = row();
                q[d_ + K + g + 1] = 1;
                q[d_ + K + g] = -1;
                s.add(q);
            }
        }
        if (geo) {
            Vec r = row();
            at_boundary(c.keq, 0, Scalar(-1), r);
            for (int l = 0; l < c.keq; ++l) r[d_ + l] -= spec_.tau;
            r[s.cols] = spec_.tau;
            s.add(r);
        } else {
            Vec r = row();
            r[d_ + K] = 1;
            r[s.cols] = -spec_.tau;
            s.add(r);
        }
        return s;
    }

    PiecewisePath geometric_path(const Candidate& c, const Vec& x, const std::vector<Scalar>& dur, const Scalar& beta) const {
        GeometricAlternation g{Scalar(1), {}, 1 + beta};
        for (std::size_t l = 0; l < c.seq.size(); ++l) g.blocks.push_back({dur[l], {{Scalar(1), cat_[c.seq[l]].slope}}});
        return PiecewisePath(d_, Scalar(1), {}, x, {}, g);
    }

    PiecewisePath periodic_path(const Candidate& c, const Vec& x, const std::vector<Scalar>& dur, const Vec& v) const {
        std::vector<Scalar> bps;
        std::vector<Vec> slopes;
        Scalar t(0);
        for (std::size_t l = 0; l < c.seq.size(); ++l) {
            t += dur[l];
            if (l + 1 < c.seq.size()) bps.push_back(t);
            slopes.push_back(cat_[c.seq[l]].slope);
        }
        return PiecewisePath(d_, Scalar(0), bps, x, slopes, PeriodicDrift{Scalar(0), Scalar(1), v});
    }

    // structural screening; nothing here builds a template
    bool screen(Candidate& c) const {
        const int K = static_cast<int>(c.seq.size());
        const bool geo = spec_.kind == FamilyKind::geometric;
        for (int k = 0; k < K; ++k) {
            const auto& cur = cat_[c.seq[k]];
            const auto& prev = cat_[c.seq[(k + K - 1) % K]];
            if (K > 1 && cur.slope == prev.slope) return false;
            if (spec_.tau > 0 && cur.blocks.size() == 1) return false;
            for (int g = 0; g + 1 < d_; ++g) {
                bool need = cur.tied(g);
                if (K > 1 && !need && !prev.tied(g) && cur.F(g + 1) < prev.F(g + 1)) need = true;  // forced meet
                if (!need) continue;
                // the gap must be closing (or already closed) just before the boundary
                if (K > 1 && prev.slope[g + 1] - prev.slope[g] > 0) return false;
                c.ties.push_back({k, g});
            }
        }
        if (geo && c.keq >= 0) {
            const auto& cur = cat_[c.seq[c.keq]];
            const auto& prev = cat_[c.seq[(c.keq + K - 1) % K]];
            if (!(cur.slope[0] <= -spec_.tau && -spec_.tau <= prev.slope[0])) return false;
        }
        // generic beta for the rank test
        for (Scalar b : {rat(37, 16), rat(1021, 8)}) {
            auto red = system(c, b).reduce();
            if (!red) return false;
            int nf = 0;
            for (int col : red->free) (void)col, ++nf;
            c.free_count = nf;
        }
        return true;
    }

    void build_candidates() {
        const int P = static_cast<int>(cat_.size());
        std::vector<std::vector<int>> seqs;
        if (!spec_.sequence.empty()) {
            for (int i : spec_.sequence)
                if (i < 0 || i >= P) throw std::invalid_argument("sequence index outside the slope catalog");
            seqs.push_back(spec_.sequence);
        } else {
            std::set<std::vector<int>> seen;
            for (int K = 1; K <= spec_.phase_count; ++K) {
                std::vector<int> s(K, 0);
                while (true) {
                    auto cs = canonical_rotation(s);
                    if (seen.insert(cs).second) seqs.push_back(cs);
                    int i = K - 1;
                    while (i >= 0 && ++s[i] == P) s[i--] = 0;
                    if (i < 0) break;
                }
            }
        }
        for (auto& s : seqs) {
            const int K = static_cast<int>(s.size());
            if (spec_.kind == FamilyKind::geometric) {
                for (int k = 0; k < K; ++k) {
                    Candidate c{s, k, {}, 0};
                    if (screen(c)) cands_.push_back(std::move(c));
                }
            } else {
                Candidate c{s, -1, {}, 0};
                if (screen(c)) cands_.push_back(std::move(c));
            }
        }
    }
};

struct NMContext {
    const Family* fam;
    const Candidate* cand;
    std::function<void(const Family::Eval&, const std::vector<double>&)> record;
    long long left = 0;
};

inline double nm_objective(const gsl_vector* v, void* p) {
    auto* ctx = static_cast<NMContext*>(p);
    if (ctx->left <= 0) return 1e6;
    --ctx->left;
    std::vector<double> k(v->size);
    for (std::size_t i = 0; i < v->size; ++i) k[i] = gsl_vector_get(v, i);
    auto e = ctx->fam->evaluate(*ctx->cand, k);
    ctx->record(e, k);
    return -e.value;
}

} // namespace detail

inline std::size_t candidate_count(const FamilySpec& spec) { return detail::Family(spec).candidates().size(); }

// budget counts template evaluations; screening of phase sequences is free
inline SearchResult optimize(const FamilySpec& spec, long long budget, std::uint64_t seed) {
    using namespace detail;
    if (budget < 1) throw std::invalid_argument("budget must be at least 1");
    Family fam(spec);
    const auto& cands = fam.candidates();
    if (cands.empty()) throw infeasible_error("no admissible phase sequence for this family");
    Rng rng(seed);

    SearchResult res;
    res.seed = seed;
    double best = -std::numeric_limits<double>::infinity();
    auto record = [&](const Candidate& c, const Family::Eval& e, const std::vector<double>& k) {
        ++res.evaluations;
        if (e.tmpl && e.value > best) {
            best = e.value;
            res.best_template = e.tmpl;
            res.lower_rate = e.lower;
            res.upper_rate = e.upper;
            res.tau_hat = e.tau_hat;
            res.sequence = c.seq;
            res.keq = c.keq;
            res.knobs = k;
        }
        res.history.push_back(res.best_template ? best : -1.0);
    };

    // coarse stage: stratified probes in log beta per candidate
    const double lo = std::log(0x1.0p-2), hi = std::log(0x1.0p13);
    long long coarse = std::max<long long>(1, budget / 2);
    std::vector<std::size_t> order(cands.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.next() % i]);
    std::size_t used_c = std::min<std::size_t>(order.size(), static_cast<std::size_t>(coarse));
    long long per = std::max<long long>(1, coarse / static_cast<long long>(used_c));
    struct Probe {
        double value;
        std::size_t cand;
        std::vector<double> knobs;
    };
    std::vector<Probe> probes;
    for (std::size_t oi = 0; oi < used_c; ++oi) {
        const Candidate& c = cands[order[oi]];
        Probe bestp{-std::numeric_limits<double>::infinity(), order[oi], {}};
        for (long long p = 0; p < per; ++p) {
            std::vector<double> k(fam.knob_count(c));
            if (!spec.parameters.empty() && p == 0) {
                for (std::size_t i = 0; i < k.size() && i < spec.parameters.size(); ++i) k[i] = spec.parameters[i];
            } else {
                k[0] = lo + (hi - lo) * (double(p) + rng.uniform()) / double(per);
                for (std::size_t i = 1; i < k.size(); ++i) k[i] = rng.normal();
            }
            auto e = fam.evaluate(c, k);
            record(c, e, k);
            if (e.value > bestp.value) { bestp.value = e.value; bestp.knobs = k; }
        }
        probes.push_back(bestp);
    }

    // refinement: Nelder-Mead on the strongest candidates
    std::stable_sort(probes.begin(), probes.end(), [](const Probe& a, const Probe& b) { return a.value > b.value; });
    long long remaining = budget - res.evaluations;
    std::size_t top = std::min<std::size_t>(4, probes.size());
    for (std::size_t pi = 0; pi < top && remaining > 0; ++pi) {
        const Candidate& c = cands[probes[pi].cand];
        long long share = remaining / static_cast<long long>(top - pi);
        if (share < 2) continue;
        NMContext ctx{&fam, &c, [&](const Family::Eval& e, const std::vector<double>& k) { record(c, e, k); }, share};
        std::size_t n = probes[pi].knobs.size();
        gsl_multimin_function fn{&nm_objective, n, &ctx};
        gsl_vector* x = gsl_vector_alloc(n);
        gsl_vector* step = gsl_vector_alloc(n);
        for (std::size_t i = 0; i < n; ++i) {
            gsl_vector_set(x, i, probes[pi].knobs[i]);
            gsl_vector_set(step, i, i == 0 ? 0.5 : 1.0);
        }
        gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n);
        gsl_multimin_fminimizer_set(s, &fn, x, step);
        while (ctx.left > 0) {
            if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
            if (gsl_multimin_fminimizer_size(s) < 1e-7) break;
        }
        gsl_multimin_fminimizer_free(s);
        gsl_vector_free(x);
        gsl_vector_free(step);
        remaining = budget - res.evaluations;
    }
    if (!res.best_template) throw infeasible_error("no certified template found within the budget");
    return res;
}

inline SearchResult optimize_seeds(const FamilySpec& spec, long long budget, const std::vector<std::uint64_t>& seeds) {
    std::optional<SearchResult> best;
    for (auto s : seeds) {
        try {
            auto r = optimize(spec, budget, s);
            if (!best || r.objective() > best->objective()) best = std::move(r);
        } catch (const infeasible_error&) {
        }
    }
    if (!best) throw infeasible_error("no seed produced a certified template");
    return *best;
}

struct SweepRow {
    Scalar tau;
    SearchResult result;
    double envelope = 0;  // max over tau' >= tau
};

inline std::vector<SweepRow> sweep(const Dimensions& dims, const std::vector<Scalar>& taus, Mode mode, long long budget,
                                   const std::vector<std::uint64_t>& seeds, int phases = 4) {
    for (auto& t : taus)
        if (t < 0 || t > rat(1, dims.n)) throw std::domain_error("tau grid outside [0, 1/n]");
    std::vector<SweepRow> rows;
    for (auto& t : taus) {
        FamilySpec spec;
        spec.dims = dims;
        spec.tau = t;
        spec.mode = mode;
        spec.phase_count = phases;
        rows.push_back({t, optimize_seeds(spec, budget, seeds), 0});
    }
    std::vector<std::size_t> idx(rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return rows[a].tau > rows[b].tau; });
    double env = -std::numeric_limits<double>::infinity();
    for (auto i : idx) {
        env = std::max(env, rows[i].result.objective());
        rows[i].envelope = env;
    }
    return rows;
}

} // namespace pgn
