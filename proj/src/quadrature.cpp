#include "frontlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace frontlab {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1,1].
const double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double res_g = fc * kWg[3];
    double res_k = fc * kWgk[7];
    for (int j = 0; j < 7; ++j) {
        const double x = h * kXgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        res_k += kWgk[j] * (f1 + f2);
        if (j % 2 == 1) res_g += kWg[j / 2] * (f1 + f2);
    }
    res_k *= h;
    res_g *= h;
    const double diff = std::fabs(res_k - res_g);
    // standard QUADPACK-style error sharpening
    double err = diff;
    if (diff > 0.0) {
        const double scaled = std::pow(200.0 * diff / std::max(std::fabs(res_k), 1e-300), 1.5);
        err = diff * std::min(1.0, scaled);
        err = std::max(err, 1e-300);
    }
    return {res_k, err};
}

void adapt(const std::function<double(double)>& f, double a, double b, double tol, int depth,
           int max_depth, QuadResult& out) {
    auto panel = gk15(f, a, b);
    out.evaluations += 15;
    if (panel.err <= tol || depth >= max_depth) {
        out.value += panel.kronrod;
        out.error += panel.err;
        return;
    }
    const double c = 0.5 * (a + b);
    adapt(f, a, c, 0.5 * tol, depth + 1, max_depth, out);
    adapt(f, c, b, 0.5 * tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                     double rel_tol, int max_depth) {
    if (!(a <= b)) throw std::invalid_argument("integrate: need a <= b");
    QuadResult out;
    if (a == b) return out;
    auto first = gk15(f, a, b);
    const double tol = std::max(abs_tol, rel_tol * std::fabs(first.kronrod));
    adapt(f, a, b, tol, 0, max_depth, out);
    return out;
}

}  // namespace frontlab
