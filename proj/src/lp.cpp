#include "cstrain/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "cstrain/errors.hpp"

namespace cstrain {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double step_to_boundary(const Eigen::VectorXd& v, const Eigen::VectorXd& dv,
                        const Eigen::ArrayXd& active) {
    double alpha = 1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (active(i) == 0.0) continue;
        if (dv(i) < 0.0) alpha = std::min(alpha, -v(i) / dv(i));
    }
    return alpha;
}

}  // namespace

LpResult solve_lp(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                  const Eigen::VectorXd& c, const Eigen::VectorXd& upper,
                  const LpOptions& opts) {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (b.size() != m || c.size() != n || upper.size() != n)
        fail("ShapeMismatch", "inconsistent LP dimensions");

    Eigen::ArrayXd bounded(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (upper(i) <= 0.0) fail("InvalidArgument", "upper bounds must be positive");
        bounded(i) = std::isfinite(upper(i)) ? 1.0 : 0.0;
    }
    const double nb = bounded.sum();

    // Interior start: centered for bounded coordinates, unit for free ones;
    // dual slack tracks |c| so badly scaled costs do not stall early steps.
    Eigen::VectorXd x(n), s(n), z(n), w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        x(i) = bounded(i) ? upper(i) / 2.0 : 1.0;
        s(i) = bounded(i) ? upper(i) - x(i) : 1.0;
        z(i) = 1.0 + std::abs(c(i));
        w(i) = bounded(i) ? 1.0 : 0.0;
    }
    Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

    const double bnorm = 1.0 + b.lpNorm<Eigen::Infinity>();
    const double cnorm = 1.0 + c.lpNorm<Eigen::Infinity>();
    double unorm = 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
        if (bounded(i)) unorm = std::max(unorm, upper(i));

    const double tol_feas = opts.feas_tol;
    const double tol_gap = opts.gap_tol;

    LpResult res;
    res.status = LpStatus::MaxIters;

    double best_score = kInf;
    int stall = 0;

    for (int iter = 0; iter <= opts.max_iters; ++iter) {
        Eigen::VectorXd rp = b - A * x;
        Eigen::VectorXd ru(n);
        for (Eigen::Index i = 0; i < n; ++i)
            ru(i) = bounded(i) ? upper(i) - x(i) - s(i) : 0.0;
        Eigen::VectorXd rd = c - A.transpose() * y - z + w;

        double mu = (x.dot(z) + s.cwiseProduct(w).dot(bounded.matrix())) /
                    (static_cast<double>(n) + nb);

        double rel_p = rp.lpNorm<Eigen::Infinity>() / bnorm;
        double rel_u = ru.lpNorm<Eigen::Infinity>() / unorm;
        double rel_d = rd.lpNorm<Eigen::Infinity>() / cnorm;
        double pobj = c.dot(x);
        double dobj = b.dot(y);
        for (Eigen::Index i = 0; i < n; ++i)
            if (bounded(i)) dobj -= upper(i) * w(i);
        double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj));

        res.x = x;
        res.y = y;
        res.z = z;
        res.w = w;
        res.objective = pobj;
        res.primal_infeas = std::max(rel_p, rel_u);
        res.dual_infeas = rel_d;
        res.gap = rel_gap;
        res.iterations = iter;

        if (res.primal_infeas <= tol_feas && rel_d <= tol_feas &&
            rel_gap <= tol_gap) {
            res.status = LpStatus::Optimal;
            return res;
        }
        double score = std::max({res.primal_infeas, rel_d, rel_gap});
        if (score < 0.9 * best_score) {
            best_score = score;
            stall = 0;
        } else if (++stall > 30) {
            return res;  // no progress; report best-effort iterate
        }
        if (iter == opts.max_iters) return res;

        // Normal equations matrix A diag(1/theta) A'.
        Eigen::ArrayXd theta = z.array() / x.array();
        for (Eigen::Index i = 0; i < n; ++i)
            if (bounded(i)) theta(i) += w(i) / s(i);
        Eigen::ArrayXd d = 1.0 / theta;

        Eigen::MatrixXd N = A * d.matrix().asDiagonal() * A.transpose();
        Eigen::LLT<Eigen::MatrixXd> llt;
        double ridge = 0.0;
        double nscale = N.diagonal().cwiseAbs().maxCoeff() + 1.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Eigen::MatrixXd Nr = N;
            if (ridge > 0.0) Nr.diagonal().array() += ridge;
            llt.compute(Nr);
            if (llt.info() == Eigen::Success) break;
            ridge = ridge == 0.0 ? 1e-14 * nscale : ridge * 100.0;
        }
        if (llt.info() != Eigen::Success) return res;

        auto solve_direction = [&](const Eigen::VectorXd& cxz,
                                   const Eigen::VectorXd& csw,
                                   Eigen::VectorXd& dx, Eigen::VectorXd& dy,
                                   Eigen::VectorXd& dz, Eigen::VectorXd& ds,
                                   Eigen::VectorXd& dw) {
            Eigen::VectorXd g = rd - (cxz.array() / x.array()).matrix();
            for (Eigen::Index i = 0; i < n; ++i)
                if (bounded(i)) g(i) += csw(i) / s(i) - (w(i) / s(i)) * ru(i);
            dy = llt.solve(rp + A * (d * g.array()).matrix());
            dx = (d * (A.transpose() * dy - g).array()).matrix();
            dz = ((cxz.array() - z.array() * dx.array()) / x.array()).matrix();
            ds.setZero(n);
            dw.setZero(n);
            for (Eigen::Index i = 0; i < n; ++i)
                if (bounded(i)) {
                    ds(i) = ru(i) - dx(i);
                    dw(i) = (csw(i) - w(i) * ds(i)) / s(i);
                }
        };

        // Predictor (affine scaling) step.
        Eigen::VectorXd cxz = (-x.array() * z.array()).matrix();
        Eigen::VectorXd csw(n);
        for (Eigen::Index i = 0; i < n; ++i)
            csw(i) = bounded(i) ? -s(i) * w(i) : 0.0;

        Eigen::VectorXd dx, dy, dz, ds, dw;
        solve_direction(cxz, csw, dx, dy, dz, ds, dw);

        Eigen::ArrayXd all = Eigen::ArrayXd::Ones(n);
        double ap = std::min(step_to_boundary(x, dx, all),
                             step_to_boundary(s, ds, bounded));
        double ad = std::min(step_to_boundary(z, dz, all),
                             step_to_boundary(w, dw, bounded));

        double mu_aff =
            ((x + ap * dx).dot(z + ad * dz) +
             ((s + ap * ds).array() * (w + ad * dw).array() * bounded).sum()) /
            (static_cast<double>(n) + nb);
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);
        sigma = std::clamp(sigma, 1e-8, 1.0 - 1e-8);

        // Corrector with centering.
        Eigen::VectorXd cxz2 =
            (sigma * mu - x.array() * z.array() - dx.array() * dz.array())
                .matrix();
        Eigen::VectorXd csw2(n);
        for (Eigen::Index i = 0; i < n; ++i)
            csw2(i) = bounded(i)
                          ? sigma * mu - s(i) * w(i) - ds(i) * dw(i)
                          : 0.0;
        solve_direction(cxz2, csw2, dx, dy, dz, ds, dw);

        ap = std::min(step_to_boundary(x, dx, all),
                      step_to_boundary(s, ds, bounded));
        ad = std::min(step_to_boundary(z, dz, all),
                      step_to_boundary(w, dw, bounded));
        ap = std::min(1.0, 0.9995 * ap);
        ad = std::min(1.0, 0.9995 * ad);

        x += ap * dx;
        y += ad * dy;
        z += ad * dz;
        for (Eigen::Index i = 0; i < n; ++i)
            if (bounded(i)) {
                s(i) += ap * ds(i);
                w(i) += ad * dw(i);
            }
    }
    return res;
}

}  // namespace cstrain
