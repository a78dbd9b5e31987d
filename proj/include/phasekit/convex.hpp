// Copyright 2026 The phasekit authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Convex counterpart of the RAAR operator, V(A,B,beta) = beta*T + (1-beta)*P_B
// with T = (R_A R_B + I)/2, instantiated on closed convex sets with exact
// projectors. The catalog is deliberately restricted to shapes whose nearest
// points are available in closed form, so the fixed-point and gap-vector
// checks never rest on an approximate inner solver.

namespace phasekit::convex {

using Point = std::vector<double>;

inline double dot(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Point& a) { return std::sqrt(dot(a, a)); }

inline double distance(const Point& a, const Point& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline Point subtract(const Point& a, const Point& b) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Point add_scaled(const Point& a, double t, const Point& b) {
    Point r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * b[i];
    return r;
}

/// Half-space { x : <normal, x> <= offset } with unit normal.
struct HalfSpace {
    Point normal;
    double offset;
};

/// Axis-aligned box [lo, hi] per coordinate.
struct Box {
    Point lo;
    Point hi;
};

struct Ball {
    Point center;
    double radius;
};

/// Affine subspace { point + span(basis) } with orthonormal basis vectors.
struct AffineSubspace {
    Point point;
    std::vector<Point> basis;
};

using ConvexSetSpec = std::variant<HalfSpace, Box, Ball, AffineSubspace>;

inline std::size_t dimension(const ConvexSetSpec& s) {
    return std::visit(
        [](const auto& shape) -> std::size_t {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, HalfSpace>) return shape.normal.size();
            else if constexpr (std::is_same_v<T, Box>) return shape.lo.size();
            else if constexpr (std::is_same_v<T, Ball>) return shape.center.size();
            else return shape.point.size();
        },
        s);
}

inline ConvexSetSpec half_space(Point normal, double offset) {
    const double n = norm(normal);
    if (!(n > 0.0)) throw std::invalid_argument("half_space: zero normal");
    for (double& v : normal) v /= n;
    return HalfSpace{std::move(normal), offset / n};
}

inline ConvexSetSpec box(Point lo, Point hi) {
    if (lo.size() != hi.size() || lo.empty()) {
        throw std::invalid_argument("box: bound ranks differ");
    }
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!(lo[i] <= hi[i])) throw std::invalid_argument("box: requires lo <= hi");
    }
    return Box{std::move(lo), std::move(hi)};
}

inline ConvexSetSpec ball(Point center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be positive");
    return Ball{std::move(center), radius};
}

inline ConvexSetSpec affine_subspace(Point point, std::vector<Point> basis) {
    // Orthonormality is a construction requirement, checked here once.
    for (std::size_t i = 0; i < basis.size(); ++i) {
        if (basis[i].size() != point.size()) {
            throw std::invalid_argument("affine_subspace: basis rank mismatch");
        }
        for (std::size_t j = 0; j <= i; ++j) {
            const double want = (i == j) ? 1.0 : 0.0;
            if (std::abs(dot(basis[i], basis[j]) - want) > 1e-12) {
                throw std::invalid_argument("affine_subspace: basis is not orthonormal");
            }
        }
    }
    return AffineSubspace{std::move(point), std::move(basis)};
}

/// Exact nearest-point projector of the set.
inline Point project_convex(const ConvexSetSpec& set, const Point& x) {
    if (dimension(set) != x.size()) {
        throw std::invalid_argument("project_convex: dimension mismatch");
    }
    return std::visit(
        [&](const auto& shape) -> Point {
            using T = std::decay_t<decltype(shape)>;
            if constexpr (std::is_same_v<T, HalfSpace>) {
                const double excess = dot(shape.normal, x) - shape.offset;
                if (excess <= 0.0) return x;
                return add_scaled(x, -excess, shape.normal);
            } else if constexpr (std::is_same_v<T, Box>) {
                Point r(x.size());
                for (std::size_t i = 0; i < x.size(); ++i) {
                    r[i] = std::min(std::max(x[i], shape.lo[i]), shape.hi[i]);
                }
                return r;
            } else if constexpr (std::is_same_v<T, Ball>) {
                const Point d = subtract(x, shape.center);
                const double n = norm(d);
                if (n <= shape.radius) return x;
                return add_scaled(shape.center, shape.radius / n, d);
            } else {
                const Point d = subtract(x, shape.point);
                Point r = shape.point;
                for (const Point& b : shape.basis) {
                    const double c = dot(d, b);
                    for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * b[i];
                }
                return r;
            }
        },
        set);
}

inline Point reflect_convex(const ConvexSetSpec& set, const Point& x) {
    Point p = project_convex(set, x);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = 2.0 * p[i] - x[i];
    return p;
}

/// One application of V(A,B,beta) = beta*(R_A R_B + I)/2 + (1-beta)*P_B.
/// beta = 1 is admitted for diagnostics of the unrelaxed operator.
inline Point raar_convex_operator(const ConvexSetSpec& A, const ConvexSetSpec& B,
                                  double beta, const Point& u) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw std::invalid_argument("raar_convex_operator: beta must lie in (0, 1]");
    }
    const Point rb = reflect_convex(B, u);
    const Point ra = reflect_convex(A, rb);
    const Point pb = project_convex(B, u);
    Point r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        r[i] = beta * 0.5 * (ra[i] + u[i]) + (1.0 - beta) * pb[i];
    }
    return r;
}

/// Identity residual u - T u - (P_B u - P_A R_B u); zero for every u.
inline double displacement_identity_residual(const ConvexSetSpec& A,
                                             const ConvexSetSpec& B, const Point& u) {
    const Point rb = reflect_convex(B, u);
    const Point ra = reflect_convex(A, rb);
    const Point pb = project_convex(B, u);
    const Point pa_rb = project_convex(A, rb);
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double tu = 0.5 * (ra[i] + u[i]);
        const double d = (u[i] - tu) - (pb[i] - pa_rb[i]);
        s += d * d;
    }
    return std::sqrt(s);
}

/// Raised when an iteration cap is exhausted before the tolerance is met
/// (for the gap computation this signals an unattained infimum).
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Gap vector g = P_{cl(B-A)}(0) with nearest-point representatives
/// f in F = argmin_B dist(.,A) and e in E = argmin_A dist(.,B).
struct ConvexDiagnostics {
    Point gap;
    Point nearest_in_B;
    Point nearest_in_A;
    bool consistent = false;
    std::size_t iterations = 0;
};

namespace detail {

inline bool closed_form_gap(const ConvexSetSpec& A, const ConvexSetSpec& B, Point& g) {
    if (const auto* a = std::get_if<Ball>(&A)) {
        if (const auto* b = std::get_if<Ball>(&B)) {
            const Point d = subtract(b->center, a->center);
            const double n = norm(d);
            const double gapn = n - a->radius - b->radius;
            if (gapn <= 0.0 || n == 0.0) {
                g.assign(a->center.size(), 0.0);
            } else {
                g = add_scaled(Point(d.size(), 0.0), gapn / n, d);
            }
            return true;
        }
    }
    if (const auto* a = std::get_if<HalfSpace>(&A)) {
        if (const auto* b = std::get_if<HalfSpace>(&B)) {
            const double c = dot(a->normal, b->normal);
            // Non-antiparallel half-spaces in any dimension always intersect.
            if (std::abs(c + 1.0) > 1e-12) {
                g.assign(a->normal.size(), 0.0);
                return true;
            }
            const double gapn = -b->offset - a->offset;  // distance along a->normal
            g = add_scaled(Point(a->normal.size(), 0.0), std::max(0.0, gapn), a->normal);
            return true;
        }
    }
    if (const auto* a = std::get_if<Box>(&A)) {
        if (const auto* b = std::get_if<Box>(&B)) {
            g.assign(a->lo.size(), 0.0);
            for (std::size_t i = 0; i < g.size(); ++i) {
                // Nearest-to-zero element of the interval [loB-hiA, hiB-loA].
                const double lo = b->lo[i] - a->hi[i];
                const double hi = b->hi[i] - a->lo[i];
                g[i] = std::max(lo, std::min(0.0, hi));
            }
            return true;
        }
    }
    return false;
}

} // namespace detail

/// Computes the gap vector: closed form where the catalog provides one,
/// otherwise the limit of alternating projections b <- P_B P_A b with
/// g = b - P_A b at convergence. Cap exhaustion is reported, not papered over.
inline ConvexDiagnostics gap_vector(const ConvexSetSpec& A, const ConvexSetSpec& B,
                                    double tol = 1e-12, std::size_t cap = 1000000) {
    if (dimension(A) != dimension(B)) {
        throw std::invalid_argument("gap_vector: dimension mismatch");
    }
    ConvexDiagnostics diag;

    // Alternating projections for the nearest-point representatives.
    Point b(dimension(A), 0.0);
    b = project_convex(B, b);
    std::size_t k = 0;
    for (; k < cap; ++k) {
        const Point next = project_convex(B, project_convex(A, b));
        const double step = distance(next, b);
        b = next;
        if (step <= tol * (1.0 + norm(b))) break;
    }
    if (k == cap) {
        throw ConvergenceError(
            "gap_vector: alternating projections hit the iteration cap; "
            "nearest points may not be attained");
    }
    diag.iterations = k + 1;
    diag.nearest_in_B = b;
    diag.nearest_in_A = project_convex(A, b);

    if (!detail::closed_form_gap(A, B, diag.gap)) {
        diag.gap = subtract(diag.nearest_in_B, diag.nearest_in_A);
    }
    diag.consistent = norm(diag.gap) <= 10.0 * tol * (1.0 + norm(b));
    return diag;
}

/// Iterates V(A,B,beta) from `start` until ||V u - u|| <= tol.
inline Point fixed_point_solve(const ConvexSetSpec& A, const ConvexSetSpec& B,
                               double beta, Point start, double tol = 1e-10,
                               std::size_t cap = 1000000) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw std::invalid_argument("fixed_point_solve: beta must lie in (0, 1)");
    }
    Point u = std::move(start);
    for (std::size_t k = 0; k < cap; ++k) {
        Point next = raar_convex_operator(A, B, beta, u);
        const double step = distance(next, u);
        u = std::move(next);
        if (step <= tol) return u;
    }
    throw ConvergenceError("fixed_point_solve: iteration cap exceeded");
}

struct CheckResult {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct TheoremReport {
    std::string geometry;
    double beta = 0.0;
    double gap_norm = 0.0;
    std::vector<CheckResult> checks;
    bool all_pass = true;
};

namespace detail {

inline void push_check(TheoremReport& rep, std::string name, double residual,
                       double tol) {
    const bool pass = residual <= tol;
    rep.checks.push_back({std::move(name), residual, tol, pass});
    rep.all_pass = rep.all_pass && pass;
}

inline std::mt19937_64 seeded_engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

inline double unit_uniform(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

inline Point random_point(std::mt19937_64& eng, std::size_t dim, double radius) {
    Point p(dim);
    for (double& v : p) v = (2.0 * unit_uniform(eng) - 1.0) * radius;
    return p;
}

} // namespace detail

/// Numerically verifies the fixed-point characterization
///   Fix V = F - beta/(1-beta) * g
/// at `samples` solved fixed points from random starts: (i) u = P_B u -
/// beta/(1-beta)*g, (ii) P_B u - P_A R_B u = g, (iii) P_B u in F and
/// P_A P_B u in E (membership tested through the exact projectors).
inline TheoremReport verify_theorem22(const ConvexSetSpec& A, const ConvexSetSpec& B,
                                      double beta, std::size_t samples,
                                      std::string geometry = "", std::uint64_t seed = 1,
                                      double solve_tol = 1e-10, double check_tol = 1e-6,
                                      std::size_t cap = 1000000) {
    TheoremReport rep;
    rep.geometry = std::move(geometry);
    rep.beta = beta;

    const auto diag = gap_vector(A, B);
    const Point& g = diag.gap;
    const double gap_norm = norm(g);
    rep.gap_norm = gap_norm;
    const double scale = beta / (1.0 - beta);

    auto eng = detail::seeded_engine(seed);
    const std::size_t dim = dimension(A);
    for (std::size_t s = 0; s < samples; ++s) {
        const Point start = detail::random_point(eng, dim, 10.0);
        const Point u = fixed_point_solve(A, B, beta, start, solve_tol, cap);
        const std::string tag = "sample" + std::to_string(s);

        const Point vu = raar_convex_operator(A, B, beta, u);
        detail::push_check(rep, tag + ":fixed_point_residual", distance(vu, u),
                           10.0 * solve_tol);

        const Point f = project_convex(B, u);
        const Point predicted = add_scaled(f, -scale, g);
        detail::push_check(rep, tag + ":i_translate", distance(u, predicted), check_tol);

        const Point rb = reflect_convex(B, u);
        const Point pa_rb = project_convex(A, rb);
        const Point gap_est = subtract(f, pa_rb);
        detail::push_check(rep, tag + ":ii_gap", distance(gap_est, g), check_tol);

        // f in F <=> dist(f, A) = ||g||; e = P_A f in E <=> dist(e, B) = ||g||.
        const double dist_f_a = distance(f, project_convex(A, f));
        detail::push_check(rep, tag + ":iii_nearest_B", std::abs(dist_f_a - gap_norm),
                           check_tol);
        const Point e = project_convex(A, f);
        const double dist_e_b = distance(e, project_convex(B, e));
        detail::push_check(rep, tag + ":iii_nearest_A", std::abs(dist_e_b - gap_norm),
                           check_tol);
    }
    return rep;
}

struct Prop23Report {
    std::string geometry;
    double beta_n = 0.0;
    double beta_next = 0.0;
    std::vector<CheckResult> checks;
    bool all_pass = true;
};

/// Verifies the step relation V_{b'}(u_b) = f_b - b'/(1-b) * g at a solved
/// fixed point u_b, and the nonexpansiveness consequence: points within delta
/// of u_b map to within delta of the predicted target.
inline Prop23Report verify_prop23(const ConvexSetSpec& A, const ConvexSetSpec& B,
                                  double beta_n, double beta_next,
                                  std::size_t delta_samples, double delta = 0.1,
                                  std::string geometry = "", std::uint64_t seed = 2,
                                  double exact_tol = 1e-8, double solve_tol = 1e-12,
                                  std::size_t cap = 1000000) {
    if (!(beta_n > 0.0 && beta_n < 1.0) || !(beta_next > 0.0 && beta_next < 1.0)) {
        throw std::invalid_argument("verify_prop23: betas must lie in (0, 1)");
    }
    Prop23Report rep;
    rep.geometry = std::move(geometry);
    rep.beta_n = beta_n;
    rep.beta_next = beta_next;

    const auto diag = gap_vector(A, B);
    const Point& g = diag.gap;
    const std::size_t dim = dimension(A);

    auto eng = detail::seeded_engine(seed);
    const Point u_fix =
        fixed_point_solve(A, B, beta_n, detail::random_point(eng, dim, 5.0), solve_tol, cap);
    const Point f = project_convex(B, u_fix);
    const Point predicted = add_scaled(f, -beta_next / (1.0 - beta_n), g);

    const Point stepped = raar_convex_operator(A, B, beta_next, u_fix);
    {
        const bool pass = distance(stepped, predicted) <= exact_tol;
        rep.checks.push_back({"step_relation", distance(stepped, predicted), exact_tol, pass});
        rep.all_pass = rep.all_pass && pass;
    }

    for (std::size_t s = 0; s < delta_samples; ++s) {
        Point dir = detail::random_point(eng, dim, 1.0);
        const double n = norm(dir);
        const double r = delta * 0.999 * detail::unit_uniform(eng);
        const Point u = (n > 0.0) ? add_scaled(u_fix, r / n, dir) : u_fix;
        const Point image = raar_convex_operator(A, B, beta_next, u);
        const double residual = distance(image, predicted);
        const bool pass = residual < delta;
        rep.checks.push_back(
            {"perturbation" + std::to_string(s), residual, delta, pass});
        rep.all_pass = rep.all_pass && pass;
    }
    return rep;
}

} // namespace phasekit::convex
