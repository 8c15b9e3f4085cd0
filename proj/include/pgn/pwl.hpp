#pragma once

#include "rational.hpp"

#include <algorithm>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace pgn {

struct horizon_error : std::out_of_range {
    using std::out_of_range::out_of_range;
};

// explicit pieces stop at `horizon`
struct FiniteHorizon {
    Scalar horizon;
};

// last explicit piece continues forever
struct Unbounded {};

// explicit pieces after `start` form one period ending at start + period
struct PeriodicDrift {
    Scalar start;
    Scalar period;
    Vec drift;
};

struct PhaseStep {
    Scalar weight;  // share of the block duration, weights of a block sum to 1
    Vec slope;
};

struct Block {
    Scalar duration;  // length in round 0
    std::vector<PhaseStep> pattern;
};

// explicit pieces form a prefix ending at `start`; round k repeats all blocks scaled by ratio^k
struct GeometricAlternation {
    Scalar start;
    std::vector<Block> blocks;
    Scalar ratio;
};

using Tail = std::variant<FiniteHorizon, Unbounded, PeriodicDrift, GeometricAlternation>;

struct Piece {
    Scalar a, b;
    Vec slope;
    Vec value;  // at a
    Scalar length() const { return b - a; }
    Vec value_at(const Scalar& t) const { return value + (t - a) * slope; }
    Vec end_value() const { return value_at(b); }
};

class PiecewisePath {
public:
    PiecewisePath() = default;

    PiecewisePath(int d, Scalar t0, std::vector<Scalar> breakpoints, Vec values_at_t0,
                  std::vector<Vec> slopes, Tail tail)
        : d_(d), t0_(std::move(t0)), bps_(std::move(breakpoints)), x0_(std::move(values_at_t0)),
          slopes_(std::move(slopes)), tail_(std::move(tail)) {
        check();
        merge();
    }

    static PiecewisePath constant(int d, Scalar t0 = Scalar(0)) {
        return PiecewisePath(d, t0, {}, zeros(d), {zeros(d)}, Unbounded{});
    }

    static PiecewisePath linear(Vec x0, Vec slope, Scalar t0 = Scalar(0)) {
        int d = static_cast<int>(x0.size());
        return PiecewisePath(d, t0, {}, std::move(x0), {std::move(slope)}, Unbounded{});
    }

    int dim() const { return d_; }
    const Scalar& t0() const { return t0_; }
    const std::vector<Scalar>& breakpoints() const { return bps_; }
    const Vec& values_at_t0() const { return x0_; }
    const std::vector<Vec>& slopes() const { return slopes_; }
    const Tail& tail() const { return tail_; }

    bool finite() const { return std::holds_alternative<FiniteHorizon>(tail_); }

    std::optional<Scalar> horizon() const {
        if (auto* f = std::get_if<FiniteHorizon>(&tail_)) return f->horizon;
        return std::nullopt;
    }

    // end of the explicitly listed pieces; nullopt for Unbounded
    std::optional<Scalar> explicit_end() const {
        return std::visit([&](const auto& t) -> std::optional<Scalar> {
            using T = std::decay_t<decltype(t)>;
            if constexpr (std::is_same_v<T, FiniteHorizon>) return t.horizon;
            else if constexpr (std::is_same_v<T, Unbounded>) return std::nullopt;
            else if constexpr (std::is_same_v<T, PeriodicDrift>) return t.start + t.period;
            else return t.start;
        }, tail_);
    }

    const std::vector<Piece>& explicit_pieces() const { return pieces_; }

    Vec eval(const Scalar& t) const {
        if (t < t0_) throw std::domain_error("eval before t0");
        if (auto* f = std::get_if<FiniteHorizon>(&tail_)) {
            if (t > f->horizon) throw horizon_error("eval beyond finite horizon");
        }
        if (auto* p = std::get_if<PeriodicDrift>(&tail_)) {
            Scalar end = p->start + p->period;
            if (t >= end) {
                Integer k = floor_int((t - p->start) / p->period);
                Scalar shift = Scalar(k) * p->period;
                return eval_explicit(t - shift) + shift * p->drift;
            }
        }
        if (auto* g = std::get_if<GeometricAlternation>(&tail_)) {
            if (t >= g->start) return eval_geometric(*g, t);
        }
        return eval_explicit(t);
    }

    // Calls fn on consecutive raw pieces (not merged) that intersect [ta, tb), clipped to it.
    void walk(const Scalar& ta, const Scalar& tb, const std::function<void(const Piece&)>& fn) const {
        if (!(ta < tb)) throw std::invalid_argument("empty or inverted window");
        if (ta < t0_) throw std::domain_error("window starts before t0");
        if (auto* f = std::get_if<FiniteHorizon>(&tail_)) {
            if (tb > f->horizon) throw horizon_error("window beyond finite horizon");
        }
        auto emit = [&](const Scalar& a, const Scalar& b, const Vec& slope, const Vec& va) {
            if (b <= ta || a >= tb || a == b) return;
            Scalar ca = a < ta ? ta : a, cb = b > tb ? tb : b;
            Piece p{ca, cb, slope, va + (ca - a) * slope};
            fn(p);
        };
        for (std::size_t i = 0; i < pieces_.size(); ++i) {
            const Piece& p = pieces_[i];
            bool last = i + 1 == pieces_.size();
            if (last && std::holds_alternative<Unbounded>(tail_)) {
                emit(p.a, tb > p.a ? tb : p.a, p.slope, p.value);
            } else {
                emit(p.a, p.b, p.slope, p.value);
            }
            if (p.a >= tb) return;
        }
        if (auto* pd = std::get_if<PeriodicDrift>(&tail_)) {
            Scalar end = pd->start + pd->period;
            if (tb <= end) return;
            Integer k = ta > end ? floor_int((ta - pd->start) / pd->period) : Integer(1);
            if (k < 1) k = 1;
            std::vector<const Piece*> period;
            for (auto& p : pieces_) if (p.a >= pd->start) period.push_back(&p);
            for (;; ++k) {
                Scalar shift = Scalar(k) * pd->period;
                if (pd->start + shift >= tb) return;
                for (auto* p : period) emit(p->a + shift, p->b + shift, p->slope, p->value + shift * pd->drift);
            }
        }
        if (auto* g = std::get_if<GeometricAlternation>(&tail_)) {
            Scalar t = g->start;
            Vec v = pieces_.empty() ? x0_ : pieces_.back().end_value();
            Scalar scale(1);
            Scalar A = round_length(*g);
            Vec D = round_displacement(*g);
            while (t < tb) {
                Scalar tn = t + scale * A;
                if (tn > ta) {
                    Scalar s = t;
                    Vec w = v;
                    for (auto& blk : g->blocks) {
                        for (auto& st : blk.pattern) {
                            Scalar len = scale * blk.duration * st.weight;
                            emit(s, s + len, st.slope, w);
                            w = w + len * st.slope;
                            s += len;
                        }
                    }
                }
                v = v + scale * D;
                t = tn;
                scale *= g->ratio;
            }
        }
    }

    // maximal pieces over the window, merged across equal slopes
    std::vector<Piece> linear_pieces(const Scalar& ta, const Scalar& tb) const {
        std::vector<Piece> out;
        walk(ta, tb, [&](const Piece& p) {
            if (!out.empty() && out.back().slope == p.slope && out.back().b == p.a) {
                out.back().b = p.b;
            } else {
                out.push_back(p);
            }
        });
        return out;
    }

    static Scalar round_length(const GeometricAlternation& g) {
        Scalar A(0);
        for (auto& b : g.blocks) A += b.duration;
        return A;
    }

    Vec round_displacement(const GeometricAlternation& g) const {
        Vec D = zeros(d_);
        for (auto& b : g.blocks)
            for (auto& st : b.pattern) D = D + (b.duration * st.weight) * st.slope;
        return D;
    }

    // period displacement of the explicit period (PeriodicDrift only)
    Vec period_displacement() const {
        auto& pd = std::get<PeriodicDrift>(tail_);
        Vec D = zeros(d_);
        for (auto& p : pieces_) if (p.a >= pd.start) D = D + p.length() * p.slope;
        return D;
    }

    bool operator==(const PiecewisePath& o) const;

private:
    int d_ = 0;
    Scalar t0_;
    std::vector<Scalar> bps_;
    Vec x0_;
    std::vector<Vec> slopes_;
    Tail tail_ = Unbounded{};
    std::vector<Piece> pieces_;

    void check() const {
        if (d_ < 1) throw std::invalid_argument("path dimension must be positive");
        if (static_cast<int>(x0_.size()) != d_) throw std::invalid_argument("values_at_t0 has wrong length");
        for (std::size_t i = 0; i < bps_.size(); ++i) {
            if (bps_[i] <= (i ? bps_[i - 1] : t0_)) throw std::invalid_argument("breakpoints must increase strictly after t0");
        }
        for (auto& s : slopes_)
            if (static_cast<int>(s.size()) != d_) throw std::invalid_argument("slope vector has wrong length");
        auto end = explicit_end_unchecked();
        bool empty_ok = end && *end == t0_;
        if (empty_ok) {
            if (!slopes_.empty() || !bps_.empty()) throw std::invalid_argument("no explicit pieces expected when the tail starts at t0");
        } else {
            if (slopes_.size() != bps_.size() + 1) throw std::invalid_argument("need one slope vector per piece");
            if (end && !bps_.empty() && *end <= bps_.back()) throw std::invalid_argument("explicit pieces extend past their end");
            if (end && *end < t0_) throw std::invalid_argument("tail starts before t0");
        }
        if (auto* p = std::get_if<PeriodicDrift>(&tail_)) {
            if (p->period <= 0) throw std::invalid_argument("period must be positive");
            if (static_cast<int>(p->drift.size()) != d_) throw std::invalid_argument("drift has wrong length");
            if (p->start < t0_) throw std::invalid_argument("period starts before t0");
            if (p->start != t0_ && std::find(bps_.begin(), bps_.end(), p->start) == bps_.end())
                throw std::invalid_argument("period start must be t0 or a breakpoint");
        }
        if (auto* g = std::get_if<GeometricAlternation>(&tail_)) {
            if (g->ratio <= 1) throw std::invalid_argument("geometric ratio must exceed 1");
            if (g->blocks.empty()) throw std::invalid_argument("geometric tail needs blocks");
            for (auto& b : g->blocks) {
                if (b.duration <= 0) throw std::invalid_argument("block duration must be positive");
                Scalar w(0);
                for (auto& st : b.pattern) {
                    if (st.weight <= 0) throw std::invalid_argument("pattern weights must be positive");
                    if (static_cast<int>(st.slope.size()) != d_) throw std::invalid_argument("pattern slope has wrong length");
                    w += st.weight;
                }
                if (w != 1) throw std::invalid_argument("pattern weights must sum to 1");
            }
        }
        if (auto* f = std::get_if<FiniteHorizon>(&tail_)) {
            if (f->horizon < t0_) throw std::invalid_argument("horizon before t0");
        }
    }

    std::optional<Scalar> explicit_end_unchecked() const { return explicit_end(); }

    void merge() {
        std::vector<Scalar> nb;
        std::vector<Vec> ns;
        for (std::size_t i = 0; i < slopes_.size(); ++i) {
            const Scalar* bp = i < bps_.size() ? &bps_[i] : nullptr;
            bool keep_split = false;
            if (auto* p = std::get_if<PeriodicDrift>(&tail_))
                keep_split = i > 0 && bps_[i - 1] == p->start;
            if (!ns.empty() && ns.back() == slopes_[i] && !keep_split) {
                if (!nb.empty()) nb.pop_back();
            } else {
                ns.push_back(slopes_[i]);
            }
            if (bp) nb.push_back(*bp);
        }
        slopes_ = std::move(ns);
        bps_ = std::move(nb);
        build_pieces();
    }

    void build_pieces() {
        pieces_.clear();
        if (slopes_.empty()) return;
        auto end = explicit_end();
        Vec v = x0_;
        Scalar a = t0_;
        for (std::size_t i = 0; i < slopes_.size(); ++i) {
            Scalar b = i < bps_.size() ? bps_[i] : (end ? *end : a + 1);
            pieces_.push_back(Piece{a, b, slopes_[i], v});
            v = v + (b - a) * slopes_[i];
            a = b;
        }
    }

    Vec eval_explicit(const Scalar& t) const {
        if (pieces_.empty()) return x0_;
        auto it = std::upper_bound(pieces_.begin(), pieces_.end(), t,
                                   [](const Scalar& x, const Piece& p) { return x < p.a; });
        const Piece& p = *(it == pieces_.begin() ? it : it - 1);
        return p.value_at(t);
    }

    Vec eval_geometric(const GeometricAlternation& g, const Scalar& t) const {
        Scalar s = g.start;
        Vec v = pieces_.empty() ? x0_ : pieces_.back().end_value();
        Scalar A = round_length(g);
        Vec D = round_displacement(g);
        Scalar scale(1);
        while (s + scale * A <= t) {
            s += scale * A;
            v = v + scale * D;
            scale *= g.ratio;
        }
        for (auto& blk : g.blocks) {
            for (auto& st : blk.pattern) {
                Scalar len = scale * blk.duration * st.weight;
                if (t <= s + len) return v + (t - s) * st.slope;
                v = v + len * st.slope;
                s += len;
            }
        }
        return v;
    }
};

inline bool operator==(const FiniteHorizon& a, const FiniteHorizon& b) { return a.horizon == b.horizon; }
inline bool operator==(const Unbounded&, const Unbounded&) { return true; }
inline bool operator==(const PeriodicDrift& a, const PeriodicDrift& b) {
    return a.start == b.start && a.period == b.period && a.drift == b.drift;
}
inline bool operator==(const PhaseStep& a, const PhaseStep& b) { return a.weight == b.weight && a.slope == b.slope; }
inline bool operator==(const Block& a, const Block& b) { return a.duration == b.duration && a.pattern == b.pattern; }
inline bool operator==(const GeometricAlternation& a, const GeometricAlternation& b) {
    return a.start == b.start && a.ratio == b.ratio && a.blocks == b.blocks;
}

inline bool PiecewisePath::operator==(const PiecewisePath& o) const {
    return d_ == o.d_ && t0_ == o.t0_ && bps_ == o.bps_ && x0_ == o.x0_ && slopes_ == o.slopes_ && tail_ == o.tail_;
}

inline Vec eval(const PiecewisePath& path, const Scalar& t) { return path.eval(t); }

inline std::vector<Piece> linear_pieces(const PiecewisePath& path, const Scalar& ta, const Scalar& tb) {
    return path.linear_pieces(ta, tb);
}

namespace detail {
inline Scalar head_sum(const Vec& v, int j) {
    Scalar s(0);
    for (int i = 0; i < j; ++i) s += v[i];
    return s;
}
inline Vec head_sum1(const Vec& v, int j) { return Vec{head_sum(v, j)}; }
} // namespace detail

// F_j as a one-dimensional path
inline PiecewisePath partial_sum_path(const PiecewisePath& path, int j) {
    if (j < 1 || j > path.dim()) throw std::out_of_range("partial_sum_path: j out of range");
    using detail::head_sum1;
    std::vector<Vec> slopes;
    for (auto& s : path.slopes()) slopes.push_back(head_sum1(s, j));
    Tail tail = std::visit([&](const auto& t) -> Tail {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, PeriodicDrift>) {
            return PeriodicDrift{t.start, t.period, head_sum1(t.drift, j)};
        } else if constexpr (std::is_same_v<T, GeometricAlternation>) {
            GeometricAlternation g{t.start, {}, t.ratio};
            for (auto& b : t.blocks) {
                Block nb{b.duration, {}};
                for (auto& st : b.pattern) nb.pattern.push_back({st.weight, head_sum1(st.slope, j)});
                g.blocks.push_back(nb);
            }
            return g;
        } else {
            return t;
        }
    }, path.tail());
    return PiecewisePath(1, path.t0(), path.breakpoints(), head_sum1(path.values_at_t0(), j), slopes, tail);
}

} // namespace pgn
