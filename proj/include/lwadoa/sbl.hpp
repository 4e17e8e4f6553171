#pragma once

#include <vector>

#include "lwadoa/types.hpp"

namespace lwadoa {

enum class GammaUpdate { kEm, kRegularized };
enum class BetaUpdate { kPaper, kOgsbi };
enum class PosteriorForm { kAuto, kInformation, kCovarianceForm };

struct SblConfig {
    int max_iter = 500;
    double tol = 1e-4;              // relative hyperparameter change threshold
    double varsigma = 1e-2;         // regularization of the gamma update
    double gamma_prior_c = 1e-4;    // Gamma prior on the noise precision
    double gamma_prior_d = 1e-4;
    double gamma_init = 1.0;
    double prune_threshold = 1e-3;  // fraction of max gamma below which rows prune
    GammaUpdate gamma_update = GammaUpdate::kRegularized;
    double sigma2_init_scale = 0.1; // sigma^2 starts at this fraction of mean |Y|^2
    int beta_burn_in = 12;          // iterations before offset refinement starts
    double beta_tol_factor = 0.01;  // offsets converged when |dbeta| < factor * step

    void validate() const;
};

struct SblState {
    VecD gamma;          // P variances; pruned rows are exactly zero
    double sigma2 = 0.0;
    MatC posterior_mean; // P x T, zero rows for pruned entries
    MatC posterior_cov;  // P x P, zero rows/columns for pruned entries
    int iterations = 0;
    bool converged = false;
};

struct OffGridState : SblState {
    VecD beta_deg;            // P offsets, frozen at last value once pruned
    double clamp_halfwidth = 0.0;
};

struct IterationTrace {
    int iteration = 0;
    double gamma_max = 0.0;
    double sigma2 = 0.0;
    double log_evidence = 0.0;
    double beta_max_abs = 0.0;
};

struct PosteriorStats {
    MatC mean;  // P x T
    MatC cov;   // P x P
};

/// E-step statistics for the model Y = Phi X + N with row priors
/// CN(0, gamma_p I_T). Rows with gamma_p = 0 are excluded and their
/// posterior entries are exactly zero. The information form
/// (diag(gamma)^-1 + Phi^H Phi / sigma^2)^-1 is used when P <= 2 N_s,
/// otherwise the covariance form Gamma - Gamma Phi^H C^-1 Phi Gamma.
/// Throws NumericalError when the solve fails beyond one jitter retry.
PosteriorStats posterior_update(const MatC& phi, const MatC& y, const VecD& gamma,
                                double sigma2,
                                PosteriorForm form = PosteriorForm::kAuto);

/// EM sparsity update: gamma_p = |u_p|^2 / T + Sigma_pp.
VecD gamma_update_em(const MatC& posterior_mean, const VecD& sigma_diag, int t);

/// Regularized sparsity update
/// gamma_p = (sqrt(T^2 + 4 vs (|u_p|^2 + T Sigma_pp)) - T) / (2 vs),
/// evaluated in the cancellation-free form 2 S / (sqrt(T^2 + 4 vs S) + T).
VecD gamma_update_regularized(const VecD& u_row_norms2, const VecD& sigma_diag,
                              int t, double varsigma);

/// Evidence-maximization noise update
/// (|Y - Phi U|_F^2 + sigma2_prev T sum_p(1 - Sigma_pp / gamma_p) + d)
///   / (N_s T + c - 1),
/// summing over retained rows, clamped below at 1e-12 mean |Y|^2.
double noise_update(const MatC& y, const MatC& phi, const MatC& posterior_mean,
                    const VecD& gamma, const VecD& sigma_diag, double sigma2_prev,
                    double c, double d);

/// Gaussian log marginal likelihood of Y under C = sigma2 I + Phi G Phi^H.
double log_evidence(const MatC& y, const MatC& phi, const VecD& gamma,
                    double sigma2);

/// First-order Taylor dictionary Phi = A + B diag(beta).
MatC effective_dictionary(const MatC& a, const MatC& b, const VecD& beta_deg);

/// Quadratic-form offset rule: beta = Re{a^H W b} / Re{b^H W b} clamped to
/// [-clamp, clamp]; W is the posterior covariance carried to observation
/// space. Returns `previous` when the denominator is degenerate.
double beta_update_paper(const VecC& a_col, const VecC& b_col, const MatC& w,
                         double clamp_halfwidth, double previous);

/// One Gauss-Seidel sweep of the linearized least-squares offset update
/// over the active rows; beta entries are clamped to the half grid step.
void beta_update_ogsbi(const MatC& a, const MatC& b, const MatC& posterior_mean,
                       const MatC& posterior_cov, const MatC& y,
                       const std::vector<int>& active, VecD& beta_deg,
                       double clamp_halfwidth);

/// On-grid SBL: alternates posterior_update, the configured gamma update
/// and noise_update until the relative gamma change drops below tol.
SblState run_ongrid(const MatC& a, const MatC& y, const SblConfig& config,
                    std::vector<IterationTrace>* trace = nullptr);

/// Off-grid SBL over the Taylor dictionary Phi(beta); offsets refine once
/// per outer iteration after beta_burn_in on-grid iterations and stay
/// clamped to half the grid step.
OffGridState run_offgrid(const MatC& a, const MatC& b, const MatC& y,
                         const SblConfig& config, BetaUpdate variant,
                         double grid_step_deg,
                         std::vector<IterationTrace>* trace = nullptr);

}  // namespace lwadoa
