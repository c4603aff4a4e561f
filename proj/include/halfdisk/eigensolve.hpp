#ifndef HALFDISK_EIGENSOLVE_HPP
#define HALFDISK_EIGENSOLVE_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "halfdisk/assembly.hpp"
#include "halfdisk/errors.hpp"

// Shift-invert Lanczos for the symmetric-definite pencil A v = lambda B v:
// Krylov iteration on (A - sigma B)^{-1} B in the B-inner product with full
// reorthogonalization, deflation of converged pairs, and a fixed-seed
// pseudorandom starting vector so repeated runs are bit-identical. (A
// structured start such as all-ones can be exactly orthogonal to an
// invariant subspace on symmetric meshes, silently skipping eigenpairs.)
//
// The tolerance is a backward-error style relative residual
//   ||Av - lambda Bv|| / ((||A|| + |lambda| ||B||) ||v||),
// accepted against tol directly. Scaling by the pencil norms keeps the
// criterion reachable in double precision uniformly across mesh levels;
// the naive ||Av - lambda Bv|| / ||Bv|| form has a rounding floor that
// grows like 1/h^2 on refined meshes and silently rejects converged
// near-shift pairs. (An absolute 1e-16 residual is likewise unreachable
// for general pencils.)

namespace halfdisk {

struct SolverConfig {
    double shift = 2.6;
    int num_eigenpairs = 5;
    double tolerance = 1e-12;
    int max_iterations = 400;
    int restart_dimension = 80;
};

struct EigenResult {
    double lambda = 0;
    Eigen::VectorXd vec;       // B-normalized, over free DOFs
    double residual = 0;       // ||Av - lBv|| / ((||A|| + |l| ||B||) ||v||)
    int iterations = 0;        // Krylov expansion steps spent in total
    double shift = 0;
};

namespace detail {

inline Eigen::SparseMatrix<double> to_colmajor(const SparseSym& m) {
    return Eigen::SparseMatrix<double>(m.eigen());
}

template <typename Mat>
double inf_norm(const Mat& m) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(m.rows());
    for (int k = 0; k < m.outerSize(); ++k)
        for (typename Mat::InnerIterator it(m, k); it; ++it)
            s[it.row()] += std::abs(it.value());
    return s.size() > 0 ? s.maxCoeff() : 0.0;
}

} // namespace detail

/// Number of pencil eigenvalues below sigma (inertia of A - sigma B).
inline int inertia_check(const SparseSym& A, const SparseSym& B, double sigma) {
    Eigen::SparseMatrix<double> C = detail::to_colmajor(A) - sigma * detail::to_colmajor(B);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(C);
    if (ldlt.info() != Eigen::Success)
        throw ShiftCollisionError("inertia_check: LDLT failed at sigma, try perturbing",
                                  sigma * (1 + 1e-3) + 1e-3);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.cwiseAbs().maxCoeff();
    int count = 0;
    for (int i = 0; i < d.size(); ++i) {
        if (std::abs(d[i]) <= 1e-13 * dmax)
            throw ShiftCollisionError("inertia_check: sigma collides with an eigenvalue",
                                      sigma * (1 + 1e-3) + 1e-3);
        if (d[i] < 0) ++count;
    }
    return count;
}

inline std::vector<EigenResult> shift_invert_solve(const SparseSym& A, const SparseSym& B,
                                                   const SolverConfig& cfg) {
    const int n = A.dim();
    if (cfg.tolerance < 1e-14)
        throw ConfigError("shift_invert_solve: tolerance below 1e-14");
    if (cfg.num_eigenpairs < 1) throw ConfigError("shift_invert_solve: k >= 1 required");
    if (cfg.restart_dimension <= cfg.num_eigenpairs)
        throw ConfigError("shift_invert_solve: restart dimension must exceed k");
    const int k = std::min(cfg.num_eigenpairs, n);

    const Eigen::SparseMatrix<double> Bc = detail::to_colmajor(B);
    const double anorm = detail::inf_norm(A.eigen());
    const double bnorm = detail::inf_norm(Bc);
    const auto rel_residual = [&](const Eigen::VectorXd& y, double lam,
                                  const Eigen::VectorXd& By) {
        const double scale = (anorm + std::abs(lam) * bnorm) * y.norm();
        return (A.eigen() * y - lam * By).norm() / std::max(scale, 1e-300);
    };
    Eigen::SparseMatrix<double> C = detail::to_colmajor(A) - cfg.shift * Bc;
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(C);
    if (lu.info() != Eigen::Success)
        throw ShiftCollisionError("shift_invert_solve: factorization of A - sigma B failed",
                                  cfg.shift * (1 + 1e-3) + 1e-3);

    const auto binner = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
        return x.dot(Bc * y);
    };

    std::vector<Eigen::VectorXd> locked;       // B-orthonormal converged vectors
    std::vector<double> locked_lambda;
    auto deflate = [&](Eigen::VectorXd& r) {
        for (const auto& q : locked) r -= binner(q, r) * q;
    };

    std::vector<Eigen::VectorXd> V;
    std::vector<double> alpha, beta;
    int total_iter = 0;
    double best_residual = 1e30;

    // Deterministic pseudorandom vectors (fixed seed, shared across calls).
    std::mt19937 rng(20050911u);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    auto random_vector = [&] {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) v[i] = unif(rng);
        return v;
    };

    auto fresh_start = [&](Eigen::VectorXd v) {
        V.clear();
        alpha.clear();
        beta.clear();
        // A small random component restores directions a previous Krylov
        // space may have lost (exact invariant-subspace breakdowns).
        v += 1e-2 * std::max(1.0, v.norm()) * random_vector().normalized();
        deflate(v);
        double nb = std::sqrt(std::max(0.0, binner(v, v)));
        for (int tries = 0; nb < 1e-12 && tries < 8; ++tries) {
            v = random_vector();
            deflate(v);
            nb = std::sqrt(std::max(0.0, binner(v, v)));
        }
        if (nb < 1e-12)
            throw ConvergenceError("shift_invert_solve: no admissible start vector",
                                   best_residual);
        V.push_back(v / nb);
    };

    auto try_lock = [&](double theta, const Eigen::VectorXd& y_unnorm) -> bool {
        Eigen::VectorXd y = y_unnorm;
        deflate(y);
        const double nb = std::sqrt(std::max(0.0, binner(y, y)));
        if (nb < 1e-10) return false;
        y /= nb;
        const double lam = cfg.shift + 1.0 / theta;
        const Eigen::VectorXd By = Bc * y;
        const double res = rel_residual(y, lam, By);
        best_residual = std::min(best_residual, res);
        if (res > cfg.tolerance) return false;
        // Deterministic sign: largest-magnitude entry positive.
        int imax = 0;
        y.cwiseAbs().maxCoeff(&imax);
        if (y[imax] < 0) y = -y;
        locked.push_back(y);
        locked_lambda.push_back(lam);
        return true;
    };

    fresh_start(random_vector());

    while (static_cast<int>(locked.size()) < k) {
        if (total_iter >= cfg.max_iterations)
            throw ConvergenceError("shift_invert_solve: max iterations exhausted",
                                   best_residual);

        // One Lanczos expansion step.
        const int j = static_cast<int>(V.size()) - 1;
        Eigen::VectorXd w = lu.solve(Bc * V[j]);
        ++total_iter;
        deflate(w);
        if (j > 0) w -= beta[j - 1] * V[j - 1];
        const double a = binner(V[j], w);
        alpha.push_back(a);
        w -= a * V[j];
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& v : V) w -= binner(v, w) * v;
        const double b = std::sqrt(std::max(0.0, binner(w, w)));

        const int msize = static_cast<int>(alpha.size());
        const bool breakdown = b < 1e-13 || msize + static_cast<int>(locked.size()) >= n;
        const bool at_restart = msize >= cfg.restart_dimension;

        if (!breakdown && !at_restart && msize < k - static_cast<int>(locked.size())) {
            beta.push_back(b);
            V.push_back(w / b);
            continue;
        }

        // Ritz extraction from the tridiagonal projection.
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(msize, msize);
        for (int i = 0; i < msize; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < msize) T(i, i + 1) = T(i + 1, i) = beta[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        // Largest |theta| first: closest to the shift.
        std::vector<int> order(msize);
        for (int i = 0; i < msize; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](int x, int y) {
            return std::abs(es.eigenvalues()[x]) > std::abs(es.eigenvalues()[y]);
        });

        bool any_locked = false;
        Eigen::VectorXd next_seed;
        for (int oi = 0; oi < msize && static_cast<int>(locked.size()) < k; ++oi) {
            const int i = order[oi];
            const double theta = es.eigenvalues()[i];
            if (std::abs(theta) < 1e-14) continue;
            const double tail = std::abs(b * es.eigenvectors()(msize - 1, i));
            const bool plausible = breakdown || tail <= 10 * cfg.tolerance * std::abs(theta);
            if (!plausible && !at_restart) continue;
            Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
            for (int r = 0; r < msize; ++r) y += es.eigenvectors()(r, i) * V[r];
            if (try_lock(theta, y))
                any_locked = true;
            else if (next_seed.size() == 0)
                next_seed = y;
        }

        if (static_cast<int>(locked.size()) >= k) break;

        if (breakdown || at_restart || any_locked) {
            if (next_seed.size() == 0) next_seed = random_vector();
            fresh_start(next_seed);
        } else {
            beta.push_back(b);
            V.push_back(w / b);
        }
    }

    std::vector<int> order(locked.size());
    for (std::size_t i = 0; i < locked.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return locked_lambda[x] < locked_lambda[y]; });
    std::vector<EigenResult> out;
    for (int i : order) {
        EigenResult r;
        r.lambda = locked_lambda[i];
        r.vec = locked[i];
        r.residual = rel_residual(r.vec, r.lambda, Bc * r.vec);
        r.iterations = total_iter;
        r.shift = cfg.shift;
        out.push_back(std::move(r));
    }
    return out;
}

} // namespace halfdisk

#endif
