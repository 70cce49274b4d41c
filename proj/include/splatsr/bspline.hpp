#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "splatsr/types.hpp"

namespace splatsr {

// Clamped B-spline curve in R^3 over the parameter interval [0, 1].
template <class S>
struct BSpline {
    int degree = 3;
    std::vector<Vec3<S>> control_points;
    std::vector<S> knots;  // size = control count + degree + 1, non-decreasing

    int num_control() const { return static_cast<int>(control_points.size()); }
};

namespace detail {

// Knot span index for parameter u (NURBS book A2.1).
template <class S>
int find_span(const std::vector<S>& knots, int degree, int n_control, S u) {
    const int n = n_control - 1;
    if (u >= knots[n + 1]) return n;  // clamp the u == 1 endpoint into the last span
    if (u <= knots[degree]) return degree;
    int lo = degree, hi = n + 1;
    int mid = (lo + hi) / 2;
    while (u < knots[mid] || u >= knots[mid + 1]) {
        if (u < knots[mid])
            hi = mid;
        else
            lo = mid;
        mid = (lo + hi) / 2;
    }
    return mid;
}

// Nonzero basis functions N_{span-degree..span} at u (NURBS book A2.2).
template <class S>
void basis_funs(const std::vector<S>& knots, int span, int degree, S u, S* out) {
    std::vector<S> left(degree + 1), right(degree + 1);
    out[0] = S(1);
    for (int j = 1; j <= degree; ++j) {
        left[j] = u - knots[span + 1 - j];
        right[j] = knots[span + j] - u;
        S saved = S(0);
        for (int r = 0; r < j; ++r) {
            const S tmp = out[r] / (right[r + 1] + left[j - r]);
            out[r] = saved + right[r + 1] * tmp;
            saved = left[j - r] * tmp;
        }
        out[j] = saved;
    }
}

}  // namespace detail

// Clamped knot vector with uniformly spaced interior knots.
template <class S>
std::vector<S> clamped_uniform_knots(int degree, int n_control) {
    if (n_control < degree + 1)
        throw ValueError("bspline: need at least degree+1 control points");
    std::vector<S> knots(n_control + degree + 1);
    const int n_interior = n_control - degree - 1;
    for (int i = 0; i <= degree; ++i) knots[i] = S(0);
    for (int j = 1; j <= n_interior; ++j)
        knots[degree + j] = S(j) / S(n_interior + 1);
    for (int i = n_control; i < n_control + degree + 1; ++i) knots[i] = S(1);
    return knots;
}

// De Boor evaluation at u in [0, 1].
template <class S>
Vec3<S> bspline_eval(const BSpline<S>& spline, S u) {
    if (!(u >= S(0) && u <= S(1)))
        throw ValueError("bspline_eval: parameter outside [0, 1]");
    const int p = spline.degree;
    const int n = spline.num_control();
    const int span = detail::find_span(spline.knots, p, n, u);
    std::vector<S> basis(p + 1);
    detail::basis_funs(spline.knots, span, p, u, basis.data());
    Vec3<S> out = Vec3<S>::Zero();
    for (int j = 0; j <= p; ++j) out += basis[j] * spline.control_points[span - p + j];
    return out;
}

// Chord-length parameterization of an ordered point sequence, mapped to [0, 1].
template <class S>
std::vector<S> chord_length_params(const std::vector<Vec3<S>>& points) {
    const int m = static_cast<int>(points.size());
    std::vector<S> t(m, S(0));
    S total = S(0);
    for (int i = 1; i < m; ++i) total += (points[i] - points[i - 1]).norm();
    if (!(total > S(0)))
        throw ValueError("bspline_fit: degenerate input, all points coincide");
    S acc = S(0);
    for (int i = 1; i < m; ++i) {
        acc += (points[i] - points[i - 1]).norm();
        t[i] = acc / total;
    }
    t[m - 1] = S(1);
    return t;
}

// Least-squares clamped B-spline through `points`. Parameters default to the
// chord-length parameterization; passing them explicitly lets callers fit
// against a known assignment. The solution is the global least-squares
// minimum for the given parameters and the uniform interior knot vector.
template <class S>
BSpline<S> bspline_fit(const std::vector<Vec3<S>>& points, int degree, int n_control,
                       std::optional<std::vector<S>> params = std::nullopt) {
    const int m = static_cast<int>(points.size());
    if (degree < 1) throw ValueError("bspline_fit: degree must be >= 1");
    if (n_control < degree + 1)
        throw ValueError("bspline_fit: need n_control >= degree + 1");
    if (m < n_control)
        throw ValueError("bspline_fit: insufficient points, need at least n_control");

    std::vector<S> t = params ? std::move(*params) : chord_length_params(points);
    if (static_cast<int>(t.size()) != m)
        throw ValueError("bspline_fit: parameter count does not match point count");

    BSpline<S> spline;
    spline.degree = degree;
    spline.knots = clamped_uniform_knots<S>(degree, n_control);
    spline.control_points.resize(n_control);

    Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic> basis_matrix(m, n_control);
    basis_matrix.setZero();
    std::vector<S> basis(degree + 1);
    for (int i = 0; i < m; ++i) {
        if (!(t[i] >= S(0) && t[i] <= S(1)))
            throw ValueError("bspline_fit: parameters must lie in [0, 1]");
        const int span = detail::find_span(spline.knots, degree, n_control, t[i]);
        detail::basis_funs(spline.knots, span, degree, t[i], basis.data());
        for (int j = 0; j <= degree; ++j) basis_matrix(i, span - degree + j) = basis[j];
    }

    Eigen::ColPivHouseholderQR<Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>> qr(basis_matrix);
    qr.setThreshold(S(1e-10));
    if (qr.rank() < n_control)
        throw ValueError("bspline_fit: rank-deficient system (duplicate or clustered parameters)");

    Eigen::Matrix<S, Eigen::Dynamic, 3> rhs(m, 3);
    for (int i = 0; i < m; ++i) rhs.row(i) = points[i].transpose();
    Eigen::Matrix<S, Eigen::Dynamic, 3> solution = qr.solve(rhs);
    for (int j = 0; j < n_control; ++j)
        spline.control_points[j] = solution.row(j).transpose();
    return spline;
}

}  // namespace splatsr
