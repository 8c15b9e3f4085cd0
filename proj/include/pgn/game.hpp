#pragma once

#include "rational.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace pgn {

enum class GameMode { hausdorff, packing };

struct GameConfig {
    int d = 1;
    Scalar beta = rat(1, 4);
    GameMode mode = GameMode::hausdorff;
    int max_turns = 64;
};

inline void check_config(const GameConfig& c) {
    if (c.d < 1) throw std::invalid_argument("ambient dimension must be positive");
    if (!(c.beta > 0 && c.beta < 1)) throw std::domain_error("beta must lie in (0,1)");
    if (c.max_turns < 1) throw std::invalid_argument("need at least one turn");
}

using Point = Vec;

struct GameState {
    Scalar rho0;
    std::vector<std::vector<Point>> sets;  // A_0 .. A_k
    std::vector<Point> centers;            // x_0 .. x_k
    std::vector<Scalar> radii;             // rho_0 .. rho_k
    std::vector<double> terms;             // log #A_i / (-log beta)
    int turn() const { return static_cast<int>(centers.size()) - 1; }
};

struct MoveViolation {
    std::string clause;  // "nonempty", "separation", "containment", "dimension"
    std::vector<Point> witnesses;
    std::string detail;
};

struct illegal_move : std::runtime_error {
    MoveViolation violation;
    explicit illegal_move(MoveViolation v) : std::runtime_error(v.clause + ": " + v.detail), violation(std::move(v)) {}
};

inline Scalar point_distance(const Point& a, const Point& b) {
    Scalar r(0);
    for (std::size_t i = 0; i < a.size(); ++i) r = std::max(r, abs(a[i] - b[i]));
    return r;
}

inline std::string point_str(const Point& p) {
    std::string s = "(";
    for (std::size_t i = 0; i < p.size(); ++i) s += (i ? ", " : "") + to_string(p[i]);
    return s + ")";
}

namespace detail {

// first pair closer than sep in sup norm, if any
inline std::optional<std::pair<std::size_t, std::size_t>> close_pair(const std::vector<Point>& pts, const Scalar& sep) {
    const std::size_t n = pts.size();
    if (n < 2) return std::nullopt;
    const std::size_t d = pts[0].size();
    if (d == 1) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pts[a][0] < pts[b][0]; });
        for (std::size_t i = 1; i < n; ++i)
            if (pts[idx[i]][0] - pts[idx[i - 1]][0] < sep) return std::make_pair(idx[i - 1], idx[i]);
        return std::nullopt;
    }
    // cells of side sep: a close pair shares a cell or sits in adjacent cells
    std::map<std::vector<Integer>, std::vector<std::size_t>> cells;
    std::vector<std::vector<Integer>> key(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (auto& x : pts[i]) key[i].push_back(floor_int(x / sep));
        cells[key[i]].push_back(i);
    }
    std::vector<Integer> probe(d);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t combos = 1;
        for (std::size_t k = 0; k < d; ++k) combos *= 3;
        for (std::size_t c = 0; c < combos; ++c) {
            std::size_t cc = c;
            for (std::size_t k = 0; k < d; ++k) {
                probe[k] = key[i][k] + Integer(static_cast<int>(cc % 3) - 1);
                cc /= 3;
            }
            auto it = cells.find(probe);
            if (it == cells.end()) continue;
            for (std::size_t j : it->second)
                if (j > i && point_distance(pts[i], pts[j]) < sep) return std::make_pair(i, j);
        }
    }
    return std::nullopt;
}

} // namespace detail

// checks the proposal for A_{k+1} (or A_0 when no center has been chosen yet)
inline std::optional<MoveViolation> legal_moves_check(const GameConfig& cfg, const GameState& st, const std::vector<Point>& proposed) {
    check_config(cfg);
    if (proposed.empty()) return MoveViolation{"nonempty", {}, "proposed set is empty"};
    for (auto& p : proposed)
        if (static_cast<int>(p.size()) != cfg.d) return MoveViolation{"dimension", {p}, "point has the wrong dimension"};
    const bool initial = st.centers.empty();
    Scalar rho = initial ? st.rho0 : st.radii.back() * cfg.beta;
    if (auto pr = detail::close_pair(proposed, 3 * rho)) {
        const auto& a = proposed[pr->first];
        const auto& b = proposed[pr->second];
        return MoveViolation{"separation", {a, b},
                             "distance " + to_string(point_distance(a, b)) + " < 3 rho = " + to_string(3 * rho)};
    }
    if (!initial) {
        const Point& x = st.centers.back();
        Scalar R = (1 - cfg.beta) * st.radii.back();
        for (auto& p : proposed)
            if (point_distance(p, x) > R)
                return MoveViolation{"containment", {p, x},
                                     "distance " + to_string(point_distance(p, x)) + " from the center exceeds (1-beta) rho = " + to_string(R)};
    }
    return std::nullopt;
}

struct AliceStrategy {
    std::string name;
    std::function<std::pair<Scalar, std::vector<Point>>(const GameConfig&)> start;
    std::function<std::vector<Point>(const GameConfig&, const GameState&)> move;
};

using BobStrategy = std::function<std::size_t(const GameConfig&, const GameState&, const std::vector<Point>&)>;

inline AliceStrategy singleton_alice() {
    return {"singleton",
            [](const GameConfig& c) { return std::make_pair(Scalar(1), std::vector<Point>{zeros(c.d)}); },
            [](const GameConfig&, const GameState& s) { return std::vector<Point>{s.centers.back()}; }};
}

// product grid of spacing 3 beta rho_k filling B(x_k, (1-beta) rho_k)
inline AliceStrategy interval_alice(std::size_t max_points = 1000000) {
    return {"interval",
            [](const GameConfig& c) { return std::make_pair(Scalar(1), std::vector<Point>{zeros(c.d)}); },
            [max_points](const GameConfig& c, const GameState& s) {
                const Scalar rho = s.radii.back();
                const Scalar R = (1 - c.beta) * rho, step = 3 * c.beta * rho;
                Integer J = floor_int(2 * (1 - c.beta) / (3 * c.beta));
                long long per = static_cast<long long>(J) + 1;
                double total = std::pow(double(per), c.d);
                if (total > double(max_points)) throw std::invalid_argument("interval strategy would emit too many points");
                std::vector<Point> out;
                std::vector<long long> idx(c.d, 0);
                const Point& x = s.centers.back();
                while (true) {
                    Point p(c.d);
                    for (int i = 0; i < c.d; ++i) p[i] = x[i] - R + Scalar(idx[i]) * step;
                    out.push_back(std::move(p));
                    int i = 0;
                    while (i < c.d && ++idx[i] == per) idx[i++] = 0;
                    if (i == c.d) break;
                }
                return out;
            }};
}

// r with beta = 3^{-r}, or 0
inline int cantor_exponent(const Scalar& beta) {
    if (num(beta) != 1) return 0;
    Integer q = den(beta);
    int r = 0;
    while (q > 1 && q % 3 == 0) { q /= 3; ++r; }
    return q == 1 ? r : 0;
}

namespace detail {

inline Integer pow3(int k) {
    Integer r(1);
    for (int i = 0; i < k; ++i) r *= 3;
    return r;
}

// x is an endpoint of a level-L construction interval; true iff it is the left one
inline bool cantor_left_endpoint(const Scalar& x, int L) {
    Scalar N = x * Scalar(pow3(L));
    if (den(N) != 1) throw std::logic_error("point is not a level endpoint");
    Integer v = num(N);
    if (v >= pow3(L)) return false;
    for (int i = 0; i < L; ++i) {
        if (v % 3 == 1) return false;
        v /= 3;
    }
    return true;
}

} // namespace detail

inline AliceStrategy cantor_alice(const GameConfig& cfg) {
    check_config(cfg);
    const int r = cantor_exponent(cfg.beta);
    if (cfg.d != 1 || r < 2) throw std::domain_error("cantor strategy needs d = 1 and beta = 3^-r with r >= 2");
    return {"cantor",
            [](const GameConfig&) { return std::make_pair(Scalar(1), std::vector<Point>{Vec{Scalar(0)}}); },
            [r](const GameConfig&, const GameState& s) {
                const int k = s.turn();
                const Scalar rho = s.radii.back();
                const Scalar x = s.centers.back()[0];
                const bool left = detail::cantor_left_endpoint(x, r * k);
                const Scalar a = left ? x : x - rho;  // P_k = [a, a + rho]
                const Scalar far = left ? a + rho : a;
                const Scalar unit = rho / Scalar(detail::pow3(r - 1));
                std::vector<Point> out;
                const int subs = 1 << (r - 1);
                for (int mask = 0; mask < subs; ++mask) {
                    Scalar off(0), w = rho;
                    for (int i = 0; i < r - 1; ++i) {
                        w /= 3;
                        if (mask >> (r - 2 - i) & 1) off += 2 * w;
                    }
                    for (Scalar e : {a + off, a + off + unit})
                        if (e != far) out.push_back(Vec{e});
                }
                return out;
            }};
}

inline bool in_cantor_to_depth(const Scalar& x, int depth) {
    if (x < 0 || x > 1) return false;
    Scalar y = x;
    for (int i = 0; i < depth; ++i) {
        Scalar t = 3 * y;
        if (t <= 1) y = t;
        else if (t >= 2) y = t - 2;
        else return false;
    }
    return true;
}

inline BobStrategy bob_center() {
    return [](const GameConfig&, const GameState& s, const std::vector<Point>& opts) {
        std::size_t best = 0;
        const Point& x = s.centers.empty() ? opts[0] : s.centers.back();
        for (std::size_t i = 1; i < opts.size(); ++i)
            if (point_distance(opts[i], x) < point_distance(opts[best], x)) best = i;
        return best;
    };
}

inline BobStrategy bob_adversarial() {
    return [](const GameConfig&, const GameState& s, const std::vector<Point>& opts) {
        std::size_t best = 0;
        const Point& x = s.centers.empty() ? opts[0] : s.centers.back();
        for (std::size_t i = 1; i < opts.size(); ++i)
            if (point_distance(opts[i], x) > point_distance(opts[best], x)) best = i;
        return best;
    };
}

inline BobStrategy bob_first() {
    return [](const GameConfig&, const GameState&, const std::vector<Point>& opts) {
        return static_cast<std::size_t>(std::min_element(opts.begin(), opts.end()) - opts.begin());
    };
}

inline BobStrategy bob_last() {
    return [](const GameConfig&, const GameState&, const std::vector<Point>& opts) {
        return static_cast<std::size_t>(std::max_element(opts.begin(), opts.end()) - opts.begin());
    };
}

inline BobStrategy bob_random(std::uint64_t seed) {
    auto gen = std::make_shared<std::mt19937_64>(seed);
    return [gen](const GameConfig&, const GameState&, const std::vector<Point>& opts) {
        return static_cast<std::size_t>((*gen)() % opts.size());
    };
}

inline BobStrategy bob_by_name(const std::string& name) {
    if (name == "center") return bob_center();
    if (name == "adversarial") return bob_adversarial();
    if (name == "first") return bob_first();
    if (name == "last") return bob_last();
    if (name.rfind("random:", 0) == 0) {
        try {
            return bob_random(std::stoull(name.substr(7)));
        } catch (const std::exception&) {
        }
    }
    throw std::invalid_argument("unknown bob strategy '" + name + "'");
}

struct Scores {
    double lower = 0, upper = 0;
};

// min/max of (1/k) sum_{i<=k} term_i over the final half of the transcript
inline Scores score_surrogates(const std::vector<double>& terms) {
    if (terms.size() < 2) return {};
    int K = static_cast<int>(terms.size()) - 1;
    std::vector<double> prefix(terms.size() + 1, 0.0);
    for (std::size_t i = 0; i < terms.size(); ++i) prefix[i + 1] = prefix[i] + terms[i];
    Scores s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (int k = std::max(1, (K + 1) / 2); k <= K; ++k) {
        double a = prefix[k + 1] / k;
        s.lower = std::min(s.lower, a);
        s.upper = std::max(s.upper, a);
    }
    return s;
}

struct Transcript {
    GameConfig config;
    std::string alice, bob;
    GameState state;
    Scores scores;
    Point outcome;        // x_K
    Scalar enclosure;     // x_infinity lies within rho_K of x_K
};

inline Transcript play(const GameConfig& cfg, const AliceStrategy& alice, const BobStrategy& bob, const std::string& bob_name = "") {
    check_config(cfg);
    Transcript tr{cfg, alice.name, bob_name, {}, {}, {}, {}};
    GameState& st = tr.state;
    const double lb = -std::log(to_double(cfg.beta));
    auto [rho0, A0] = alice.start(cfg);
    if (!(rho0 > 0)) throw std::domain_error("starting radius must be positive");
    st.rho0 = rho0;
    auto take = [&](std::vector<Point> A, const Scalar& rho) {
        if (auto v = legal_moves_check(cfg, st, A)) throw illegal_move(*v);
        std::size_t pick = bob(cfg, st, A);
        if (pick >= A.size()) throw std::logic_error("bob picked outside the proposed set");
        st.centers.push_back(A[pick]);
        st.radii.push_back(rho);
        st.terms.push_back(std::log(double(A.size())) / lb);
        st.sets.push_back(std::move(A));
    };
    take(A0, rho0);
    for (int k = 0; k < cfg.max_turns; ++k) {
        Scalar rho = st.radii.back() * cfg.beta;
        take(alice.move(cfg, st), rho);
    }
    tr.scores = score_surrogates(st.terms);
    tr.outcome = st.centers.back();
    tr.enclosure = st.radii.back();
    return tr;
}

} // namespace pgn
