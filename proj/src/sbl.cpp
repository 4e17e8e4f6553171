#include "lwadoa/sbl.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>

namespace lwadoa {

namespace {

std::vector<int> active_indices(const VecD& gamma) {
    std::vector<int> idx;
    idx.reserve(static_cast<std::size_t>(gamma.size()));
    for (int p = 0; p < gamma.size(); ++p)
        if (gamma[p] > 0.0) idx.push_back(p);
    return idx;
}

MatC select_columns(const MatC& m, const std::vector<int>& idx) {
    MatC out(m.rows(), static_cast<int>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j) out.col(static_cast<int>(j)) = m.col(idx[j]);
    return out;
}

// Hermitian solve with one jitter retry; returns X = H^-1 Rhs.
MatC hermitian_solve(const MatC& h, const MatC& rhs) {
    Eigen::LDLT<MatC> ldlt(h);
    if (ldlt.info() == Eigen::Success) {
        MatC x = ldlt.solve(rhs);
        if (x.allFinite()) return x;
    }
    const double jitter = 1e-12 * h.real().trace();
    MatC hj = h + jitter * MatC::Identity(h.rows(), h.cols());
    Eigen::LDLT<MatC> retry(hj);
    if (retry.info() == Eigen::Success) {
        MatC x = retry.solve(rhs);
        if (x.allFinite()) return x;
    }
    throw NumericalError("posterior solve lost positive-definiteness");
}

}  // namespace

void SblConfig::validate() const {
    if (max_iter < 1 || !(tol > 0.0) || !(tol < 1.0) || !(varsigma > 0.0) ||
        !(gamma_prior_c > 0.0) || !(gamma_prior_d > 0.0) || !(gamma_init > 0.0) ||
        !(prune_threshold > 0.0) || !(prune_threshold < 1.0) ||
        !(sigma2_init_scale > 0.0) || beta_burn_in < 0 || !(beta_tol_factor > 0.0))
        throw InvalidParamsError("invalid SBL configuration");
}

PosteriorStats posterior_update(const MatC& phi, const MatC& y, const VecD& gamma,
                                double sigma2, PosteriorForm form) {
    const int p = static_cast<int>(phi.cols());
    const int ns = static_cast<int>(phi.rows());
    const int t = static_cast<int>(y.cols());
    if (y.rows() != ns || gamma.size() != p)
        throw InvalidParamsError("posterior_update: inconsistent dimensions");
    if (!(sigma2 > 0.0)) throw InvalidParamsError("sigma2 must be positive");

    PosteriorStats stats;
    stats.mean = MatC::Zero(p, t);
    stats.cov = MatC::Zero(p, p);

    const std::vector<int> act = active_indices(gamma);
    if (act.empty()) return stats;

    const MatC pa = select_columns(phi, act);
    const int na = static_cast<int>(act.size());

    if (form == PosteriorForm::kAuto)
        form = (na <= 2 * ns) ? PosteriorForm::kInformation : PosteriorForm::kCovarianceForm;

    MatC cov_a;
    if (form == PosteriorForm::kInformation) {
        MatC h = (pa.adjoint() * pa) / sigma2;
        for (int i = 0; i < na; ++i) h(i, i) += 1.0 / gamma[act[static_cast<std::size_t>(i)]];
        cov_a = hermitian_solve(h, MatC::Identity(na, na));
    } else {
        VecD ga(na);
        for (int i = 0; i < na; ++i) ga[i] = gamma[act[static_cast<std::size_t>(i)]];
        MatC c = pa * ga.asDiagonal() * pa.adjoint();
        for (int i = 0; i < ns; ++i) c(i, i) += sigma2;
        const MatC cinv_pa = hermitian_solve(c, pa);
        cov_a = -(ga.asDiagonal() * (pa.adjoint() * cinv_pa) * ga.asDiagonal());
        for (int i = 0; i < na; ++i) cov_a(i, i) += ga[i];
    }
    const MatC mean_a = cov_a * (pa.adjoint() * y) / sigma2;

    for (int i = 0; i < na; ++i) {
        stats.mean.row(act[static_cast<std::size_t>(i)]) = mean_a.row(i);
        for (int j = 0; j < na; ++j)
            stats.cov(act[static_cast<std::size_t>(i)], act[static_cast<std::size_t>(j)]) = cov_a(i, j);
    }
    return stats;
}

VecD gamma_update_em(const MatC& posterior_mean, const VecD& sigma_diag, int t) {
    VecD g(posterior_mean.rows());
    for (int p = 0; p < g.size(); ++p)
        g[p] = posterior_mean.row(p).squaredNorm() / t + sigma_diag[p];
    return g;
}

VecD gamma_update_regularized(const VecD& u_row_norms2, const VecD& sigma_diag,
                              int t, double varsigma) {
    if (!(varsigma > 0.0)) throw InvalidParamsError("varsigma must be positive");
    const double td = static_cast<double>(t);
    VecD g(u_row_norms2.size());
    for (int p = 0; p < g.size(); ++p) {
        const double s = u_row_norms2[p] + td * sigma_diag[p];
        g[p] = 2.0 * s / (std::sqrt(td * td + 4.0 * varsigma * s) + td);
    }
    return g;
}

double noise_update(const MatC& y, const MatC& phi, const MatC& posterior_mean,
                    const VecD& gamma, const VecD& sigma_diag, double sigma2_prev,
                    double c, double d) {
    const double t = static_cast<double>(y.cols());
    const double ns = static_cast<double>(y.rows());
    const double residual = (y - phi * posterior_mean).squaredNorm();
    double trace_term = 0.0;
    for (int p = 0; p < gamma.size(); ++p)
        if (gamma[p] > 0.0) trace_term += 1.0 - sigma_diag[p] / gamma[p];
    const double s2 = (residual + sigma2_prev * t * trace_term + d) / (ns * t + c - 1.0);
    const double mean_pow = y.squaredNorm() / static_cast<double>(y.size());
    return std::max({s2, 1e-12 * mean_pow, 1e-300});
}

double log_evidence(const MatC& y, const MatC& phi, const VecD& gamma,
                    double sigma2) {
    const int ns = static_cast<int>(y.rows());
    const int t = static_cast<int>(y.cols());
    const std::vector<int> act = active_indices(gamma);
    MatC c = MatC::Zero(ns, ns);
    if (!act.empty()) {
        const MatC pa = select_columns(phi, act);
        VecD ga(static_cast<int>(act.size()));
        for (std::size_t i = 0; i < act.size(); ++i) ga[static_cast<int>(i)] = gamma[act[i]];
        c = pa * ga.asDiagonal() * pa.adjoint();
    }
    for (int i = 0; i < ns; ++i) c(i, i) += sigma2;

    Eigen::LDLT<MatC> ldlt(c);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("evidence: covariance not positive definite");
    double logdet = 0.0;
    for (int i = 0; i < ns; ++i) logdet += std::log(ldlt.vectorD()[i].real());
    const double quad = y.cwiseProduct(ldlt.solve(y).conjugate()).real().sum();
    return -t * ns * std::log(kPi) - t * logdet - quad;
}

MatC effective_dictionary(const MatC& a, const MatC& b, const VecD& beta_deg) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || beta_deg.size() != a.cols())
        throw InvalidParamsError("effective_dictionary: inconsistent shapes");
    return a + b * beta_deg.asDiagonal();
}

double beta_update_paper(const VecC& a_col, const VecC& b_col, const MatC& w,
                         double clamp_halfwidth, double previous) {
    const double den = (b_col.adjoint() * w * b_col)(0).real();
    if (!(den > 1e-300)) return previous;
    const double num = (a_col.adjoint() * w * b_col)(0).real();
    return std::clamp(num / den, -clamp_halfwidth, clamp_halfwidth);
}

void beta_update_ogsbi(const MatC& a, const MatC& b, const MatC& posterior_mean,
                       const MatC& posterior_cov, const MatC& y,
                       const std::vector<int>& active, VecD& beta_deg,
                       double clamp_halfwidth) {
    if (active.empty()) throw InvalidParamsError("beta_update_ogsbi: empty active set");
    const int na = static_cast<int>(active.size());
    const int t = static_cast<int>(y.cols());
    const double td = static_cast<double>(t);

    // Inactive rows contribute nothing, so everything below works on the
    // active columns only.
    const MatC a_s = select_columns(a, active);
    const MatC b_s = select_columns(b, active);
    MatC mean_s(na, t);
    MatC cov_ss(na, na);
    for (int i = 0; i < na; ++i) {
        mean_s.row(i) = posterior_mean.row(active[static_cast<std::size_t>(i)]);
        for (int j = 0; j < na; ++j)
            cov_ss(i, j) = posterior_cov(active[static_cast<std::size_t>(i)],
                                         active[static_cast<std::size_t>(j)]);
    }

    // Residual with every active offset applied; coordinate p is added
    // back before its own update (Gauss-Seidel with latest values).
    MatC residual = y - a_s * mean_s;
    for (int j = 0; j < na; ++j)
        residual.noalias() -=
            beta_deg[active[static_cast<std::size_t>(j)]] * (b_s.col(j) * mean_s.row(j));

    // Expected-residual correction (A Sigma)_{:,p} over active columns.
    const MatC a_sigma = a_s * cov_ss;

    for (int j = 0; j < na; ++j) {
        const int p = active[static_cast<std::size_t>(j)];
        const double mu_pow = mean_s.row(j).squaredNorm();
        const double bn2 = b_s.col(j).squaredNorm();
        const double sig_pp = cov_ss(j, j).real();
        const double den = (mu_pow + td * sig_pp) * bn2;
        if (!(den > 1e-300)) continue;

        const VecC r_p = residual * mean_s.row(j).adjoint() + beta_deg[p] * mu_pow * b_s.col(j);
        const double num = (b_s.col(j).adjoint() * r_p)(0).real() -
                           td * (b_s.col(j).adjoint() * a_sigma.col(j))(0).real();
        const double updated = std::clamp(num / den, -clamp_halfwidth, clamp_halfwidth);
        if (updated != beta_deg[p]) {
            residual.noalias() -= (updated - beta_deg[p]) * (b_s.col(j) * mean_s.row(j));
            beta_deg[p] = updated;
        }
    }
}

namespace {

// Shared EM loop. With `offgrid` false the base dictionary is used as-is
// and no offsets are touched, which keeps run_ongrid and a
// refinement-disabled run_offgrid bit-identical.
//
// The loop works on the active columns only, assembling the E-step from
// Gram matrices cached once per run:
//   Phi^H Phi = A^H A + (A^H B) D + D (A^H B)^H + D (B^H B) D
//   Phi^H Y   = A^H Y + D (B^H Y)            with D = diag(beta).
// After pruning sets in, iterations touch a handful of columns and the
// per-iteration cost collapses.
OffGridState run_sbl(const MatC& a, const MatC* b, const MatC& y,
                     const SblConfig& config, BetaUpdate variant,
                     double grid_step_deg, std::vector<IterationTrace>* trace) {
    config.validate();
    const bool offgrid = (b != nullptr);
    const int p = static_cast<int>(a.cols());
    const int ns = static_cast<int>(a.rows());
    const int t = static_cast<int>(y.cols());
    if (y.rows() != ns) throw InvalidParamsError("run_sbl: inconsistent dimensions");

    const MatC g_aa = a.adjoint() * a;
    const MatC r_a = a.adjoint() * y;
    MatC g_ab, g_bb, r_b;
    if (offgrid) {
        g_ab = a.adjoint() * (*b);
        g_bb = b->adjoint() * (*b);
        r_b = b->adjoint() * y;
    }
    const double y_pow = y.squaredNorm();
    const double mean_pow = y.size() > 0 ? y_pow / static_cast<double>(y.size()) : 0.0;

    OffGridState st;
    st.gamma = VecD::Constant(p, config.gamma_init);
    st.beta_deg = VecD::Zero(p);
    st.clamp_halfwidth = offgrid ? grid_step_deg / 2.0 : 0.0;
    st.sigma2 = std::max(config.sigma2_init_scale * mean_pow, 1e-300);

    if (mean_pow <= 0.0) {
        // zero data: empty support, no refinement, nothing to iterate
        st.gamma.setZero();
        st.posterior_mean = MatC::Zero(p, t);
        st.posterior_cov = MatC::Zero(p, p);
        st.iterations = 0;
        st.converged = true;
        return st;
    }

    const double beta_tol = config.beta_tol_factor * grid_step_deg;
    const double td = static_cast<double>(t);

    std::vector<int> act = active_indices(st.gamma);
    MatC mean_s, cov_ss;  // current compressed posterior statistics

    auto gather = [&act](const MatC& m) {
        MatC out(static_cast<int>(act.size()), static_cast<int>(act.size()));
        for (std::size_t i = 0; i < act.size(); ++i)
            for (std::size_t j = 0; j < act.size(); ++j)
                out(static_cast<int>(i), static_cast<int>(j)) = m(act[i], act[j]);
        return out;
    };
    auto gather_rows = [&act](const MatC& m) {
        MatC out(static_cast<int>(act.size()), m.cols());
        for (std::size_t i = 0; i < act.size(); ++i)
            out.row(static_cast<int>(i)) = m.row(act[i]);
        return out;
    };

    for (int it = 1; it <= config.max_iter; ++it) {
        st.iterations = it;
        const int na = static_cast<int>(act.size());
        const bool beta_live =
            offgrid && na > 0 && [&] {
                for (int q : act)
                    if (st.beta_deg[q] != 0.0) return true;
                return false;
            }();

        VecD gamma_new = VecD::Zero(p);
        VecD sigma_diag_full = VecD::Zero(p);
        double sigma2_new = st.sigma2;
        double beta_delta = 0.0;

        if (na > 0) {
            VecD gam_s(na), beta_s(na);
            for (int i = 0; i < na; ++i) {
                gam_s[i] = st.gamma[act[static_cast<std::size_t>(i)]];
                beta_s[i] = st.beta_deg[act[static_cast<std::size_t>(i)]];
            }

            MatC gram = gather(g_aa);
            MatC rhs = gather_rows(r_a);
            if (beta_live) {
                const MatC gab_s = gather(g_ab);
                gram += gab_s * beta_s.asDiagonal();
                gram += beta_s.asDiagonal() * gab_s.adjoint();
                gram += beta_s.asDiagonal() * gather(g_bb) * beta_s.asDiagonal();
                rhs += beta_s.asDiagonal() * gather_rows(r_b);
            }

            if (na <= 2 * ns) {
                MatC h = gram / st.sigma2;
                for (int i = 0; i < na; ++i) h(i, i) += 1.0 / gam_s[i];
                cov_ss = hermitian_solve(h, MatC::Identity(na, na));
                mean_s = cov_ss * rhs / st.sigma2;
            } else {
                MatC phi_s(ns, na);
                for (int i = 0; i < na; ++i) {
                    phi_s.col(i) = a.col(act[static_cast<std::size_t>(i)]);
                    if (beta_live) phi_s.col(i) += beta_s[i] * b->col(act[static_cast<std::size_t>(i)]);
                }
                MatC c = phi_s * gam_s.asDiagonal() * phi_s.adjoint();
                for (int i = 0; i < ns; ++i) c(i, i) += st.sigma2;
                const MatC cinv_phi = hermitian_solve(c, phi_s);
                cov_ss = -(gam_s.asDiagonal() * (phi_s.adjoint() * cinv_phi) * gam_s.asDiagonal());
                for (int i = 0; i < na; ++i) cov_ss(i, i) += gam_s[i];
                // dual form of the mean, cheaper when ns << na
                mean_s = gam_s.asDiagonal() * (phi_s.adjoint() * hermitian_solve(c, y));
            }

            VecD sigma_diag(na), row_norms2(na);
            for (int i = 0; i < na; ++i) {
                sigma_diag[i] = cov_ss(i, i).real();
                row_norms2[i] = mean_s.row(i).squaredNorm();
            }
            const VecD gam_new_s =
                (config.gamma_update == GammaUpdate::kEm)
                    ? gamma_update_em(mean_s, sigma_diag, t)
                    : gamma_update_regularized(row_norms2, sigma_diag, t, config.varsigma);
            for (int i = 0; i < na; ++i) {
                gamma_new[act[static_cast<std::size_t>(i)]] = gam_new_s[i];
                sigma_diag_full[act[static_cast<std::size_t>(i)]] = sigma_diag[i];
            }

            // |Y - Phi U|^2 through the cached Grams
            const double cross = (mean_s.conjugate().cwiseProduct(rhs)).real().sum();
            const double quad = (mean_s.conjugate().cwiseProduct(gram * mean_s)).real().sum();
            const double residual = std::max(y_pow - 2.0 * cross + quad, 0.0);
            double trace_term = 0.0;
            for (int i = 0; i < na; ++i) trace_term += 1.0 - sigma_diag[i] / gam_s[i];
            sigma2_new = (residual + st.sigma2 * td * trace_term + config.gamma_prior_d) /
                         (static_cast<double>(ns) * td + config.gamma_prior_c - 1.0);
            sigma2_new = std::max({sigma2_new, 1e-12 * mean_pow, 1e-300});

            if (offgrid && it > config.beta_burn_in) {
                const VecD beta_prev = st.beta_deg;
                const std::vector<int> act_new = active_indices(gamma_new);
                if (!act_new.empty()) {
                    // scatter the posterior for the offset update
                    MatC mean_full = MatC::Zero(p, t);
                    MatC cov_full = MatC::Zero(p, p);
                    for (int i = 0; i < na; ++i) {
                        mean_full.row(act[static_cast<std::size_t>(i)]) = mean_s.row(i);
                        for (int j = 0; j < na; ++j)
                            cov_full(act[static_cast<std::size_t>(i)], act[static_cast<std::size_t>(j)]) =
                                cov_ss(i, j);
                    }
                    if (variant == BetaUpdate::kOgsbi) {
                        beta_update_ogsbi(a, *b, mean_full, cov_full, y, act_new,
                                          st.beta_deg, st.clamp_halfwidth);
                    } else {
                        MatC phi_s(ns, na);
                        for (int i = 0; i < na; ++i) {
                            phi_s.col(i) = a.col(act[static_cast<std::size_t>(i)]);
                            if (beta_live)
                                phi_s.col(i) += beta_s[i] * b->col(act[static_cast<std::size_t>(i)]);
                        }
                        const MatC w = phi_s * cov_ss * phi_s.adjoint();
                        for (int q : act_new)
                            st.beta_deg[q] = beta_update_paper(a.col(q), b->col(q), w,
                                                               st.clamp_halfwidth,
                                                               st.beta_deg[q]);
                    }
                }
                beta_delta = (st.beta_deg - beta_prev).cwiseAbs().maxCoeff();
            }
        }

        // Relative pruning keeps the active dictionary shrinking.
        const double gmax = gamma_new.size() > 0 ? gamma_new.maxCoeff() : 0.0;
        for (int q = 0; q < p; ++q)
            if (gamma_new[q] < config.prune_threshold * gmax) gamma_new[q] = 0.0;

        const double dgamma = (gamma_new - st.gamma).cwiseAbs().maxCoeff() / (gmax + 1e-30);
        st.gamma = gamma_new;
        st.sigma2 = sigma2_new;
        act = active_indices(st.gamma);

        if (trace) {
            IterationTrace rec;
            rec.iteration = it;
            rec.gamma_max = gmax;
            rec.sigma2 = st.sigma2;
            const bool live = offgrid && st.beta_deg.cwiseAbs().maxCoeff() > 0.0;
            rec.log_evidence =
                log_evidence(y, live ? effective_dictionary(a, *b, st.beta_deg) : a,
                             st.gamma, st.sigma2);
            rec.beta_max_abs = offgrid ? st.beta_deg.cwiseAbs().maxCoeff() : 0.0;
            trace->push_back(rec);
        }

        const bool gamma_done = dgamma < config.tol;
        const bool beta_done = !offgrid || (it > config.beta_burn_in && beta_delta < beta_tol);
        if (gamma_done && beta_done && (!offgrid || it > config.beta_burn_in)) {
            st.converged = true;
            break;
        }
    }

    // Final posterior refresh on the pruned support so the reported
    // statistics match the returned gamma.
    const bool beta_live = offgrid && st.beta_deg.cwiseAbs().maxCoeff() > 0.0;
    const MatC phi = beta_live ? effective_dictionary(a, *b, st.beta_deg) : a;
    PosteriorStats stats = posterior_update(phi, y, st.gamma, st.sigma2);
    st.posterior_mean = std::move(stats.mean);
    st.posterior_cov = std::move(stats.cov);
    return st;
}

}  // namespace

SblState run_ongrid(const MatC& a, const MatC& y, const SblConfig& config,
                    std::vector<IterationTrace>* trace) {
    return run_sbl(a, nullptr, y, config, BetaUpdate::kOgsbi, 1.0, trace);
}

OffGridState run_offgrid(const MatC& a, const MatC& b, const MatC& y,
                         const SblConfig& config, BetaUpdate variant,
                         double grid_step_deg,
                         std::vector<IterationTrace>* trace) {
    if (!(grid_step_deg > 0.0)) throw InvalidParamsError("grid step must be positive");
    return run_sbl(a, &b, y, config, variant, grid_step_deg, trace);
}

}  // namespace lwadoa
