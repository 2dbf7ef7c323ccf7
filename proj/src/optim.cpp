#include "copasbias/optim.hpp"

#include <algorithm>
#include <cmath>

namespace copasbias {

BrentResult brent_minimize(const std::function<double(double)>& f, double lo, double hi,
                           double tol, int max_iter) {
    const double golden = 0.5 * (3.0 - std::sqrt(5.0));
    double a = lo, b = hi;
    double x = a + golden * (b - a);
    double w = x, v = x;
    double fx = f(x), fw = fx, fv = fx;
    double d = 0.0, e = 0.0;

    BrentResult res;
    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter + 1;
        const double m = 0.5 * (a + b);
        const double tol1 = tol * std::abs(x) + 1e-12;
        const double tol2 = 2.0 * tol1;
        if (std::abs(x - m) <= tol2 - 0.5 * (b - a)) {
            res.converged = true;
            break;
        }
        bool parabolic = false;
        if (std::abs(e) > tol1) {
            // Trial parabolic fit through x, w, v.
            const double r = (x - w) * (fx - fv);
            double q = (x - v) * (fx - fw);
            double p = (x - v) * q - (x - w) * r;
            q = 2.0 * (q - r);
            if (q > 0.0) p = -p;
            q = std::abs(q);
            const double e_old = e;
            e = d;
            if (std::abs(p) < std::abs(0.5 * q * e_old) && p > q * (a - x) && p < q * (b - x)) {
                d = p / q;
                const double u = x + d;
                if (u - a < tol2 || b - u < tol2) d = (m > x) ? tol1 : -tol1;
                parabolic = true;
            }
        }
        if (!parabolic) {
            e = (x < m) ? b - x : a - x;
            d = golden * e;
        }
        const double u = (std::abs(d) >= tol1) ? x + d : x + ((d > 0.0) ? tol1 : -tol1);
        const double fu = f(u);
        if (fu <= fx) {
            if (u < x) b = x; else a = x;
            v = w; fv = fw;
            w = x; fw = fx;
            x = u; fx = fu;
        } else {
            if (u < x) a = u; else b = u;
            if (fu <= fw || w == x) {
                v = w; fv = fw;
                w = u; fw = fu;
            } else if (fu <= fv || v == x || v == w) {
                v = u; fv = fu;
            }
        }
    }
    res.x = x;
    res.fx = fx;
    return res;
}

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, std::vector<double> step,
                             double ftol, int max_iter) {
    const std::size_t n = start.size();
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step[i];
    std::vector<double> fvals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fvals[i] = f(pts[i]);

    NelderMeadResult res;
    std::vector<std::size_t> order(n + 1);
    for (int iter = 0; iter < max_iter; ++iter) {
        res.iterations = iter + 1;
        for (std::size_t i = 0; i <= n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fvals[a] < fvals[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        if (std::abs(fvals[worst] - fvals[best]) <=
            ftol * (std::abs(fvals[best]) + std::abs(fvals[worst])) + 1e-300) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += pts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double coef) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coef * (pts[worst][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = blend(-alpha);
        const double fr = f(xr);
        if (fr < fvals[best]) {
            std::vector<double> xe = blend(-gamma);
            const double fe = f(xe);
            if (fe < fr) { pts[worst] = std::move(xe); fvals[worst] = fe; }
            else { pts[worst] = std::move(xr); fvals[worst] = fr; }
        } else if (fr < fvals[second]) {
            pts[worst] = std::move(xr);
            fvals[worst] = fr;
        } else {
            const bool outside = fr < fvals[worst];
            std::vector<double> xc = blend(outside ? -rho : rho);
            const double fc = f(xc);
            if (fc < std::min(fr, fvals[worst])) {
                pts[worst] = std::move(xc);
                fvals[worst] = fc;
            } else {
                for (std::size_t i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        pts[i][j] = pts[best][j] + sigma * (pts[i][j] - pts[best][j]);
                    fvals[i] = f(pts[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fvals[i] < fvals[best]) best = i;
    res.x = pts[best];
    res.fx = fvals[best];
    return res;
}

}  // namespace copasbias
