#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "dimersim/errors.hpp"

namespace dimersim::quadrature {

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
inline constexpr double kronrod_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kronrod_weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gauss_weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F>
inline void gk15(const F& f, double a, double b, double& value, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kronrod_nodes[i]);
        fv[14 - i] = f(c + h * kronrod_nodes[i]);
    }
    fv[7] = f(c);
    double kres = 0.0;
    for (int i = 0; i < 7; ++i) kres += kronrod_weights[i] * (fv[i] + fv[14 - i]);
    kres += kronrod_weights[7] * fv[7];
    double gres = 0.0;
    for (int i = 0; i < 3; ++i) gres += gauss_weights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    gres += gauss_weights[3] * fv[7];
    value = h * kres;
    err = std::abs(h * (kres - gres));
}

template <class F>
inline void adapt(const F& f, double a, double b, double rel_tol, double abs_tol,
                  int depth, double whole_scale, Result& out) {
    double v, e;
    gk15(f, a, b, v, e);
    const double tol = std::max(abs_tol, rel_tol * std::max(std::abs(v), whole_scale));
    if (e <= tol || depth >= 48 || !(std::abs(b - a) > 0.0)) {
        out.value += v;
        out.error += e;
        if (e > tol) out.converged = false;
        return;
    }
    const double m = 0.5 * (a + b);
    adapt(f, a, m, rel_tol, abs_tol, depth + 1, whole_scale, out);
    adapt(f, m, b, rel_tol, abs_tol, depth + 1, whole_scale, out);
}

} // namespace detail

// Adaptive Gauss-Kronrod integration on [a, b]. The relative tolerance is
// applied against the running magnitude of the whole integral so that
// cancelling segments do not force needless refinement.
template <class F>
inline Result integrate(const F& f, double a, double b, double rel_tol = 1e-10,
                        double abs_tol = 0.0) {
    Result out;
    if (a == b) return out;
    double v0, e0;
    detail::gk15(f, a, b, v0, e0);
    detail::adapt(f, a, b, rel_tol, abs_tol, 0, std::abs(v0), out);
    return out;
}

template <class F>
inline double integrate_or_throw(const F& f, double a, double b,
                                 double rel_tol = 1e-10, double abs_tol = 0.0,
                                 const char* what = "integral") {
    const Result r = integrate(f, a, b, rel_tol, abs_tol);
    if (!r.converged)
        throw numeric_error(std::string(what) + ": quadrature did not converge, achieved absolute error " +
                            std::to_string(r.error));
    return r.value;
}

} // namespace dimersim::quadrature
