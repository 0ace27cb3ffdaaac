//! Convergence measures: squared distance between paired curves,
//! exponential fits in `N`, and the normalized discrepancy `ε(ΔH)`.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64 as C64;

use crate::embedding::{block_operator, EmbeddingMap};
use crate::error::{Result, SpinError};
use crate::observables::{rg_step, ChainModel, TimeSeries};
use crate::operator::{OperatorSum, DEFAULT_DENSE_CAP};
use crate::state::StateVector;

/// `Σ_k (s1_k − s2_k)²` over a shared grid.
pub fn chi_squared(s1: &TimeSeries, s2: &TimeSeries) -> Result<f64> {
    if s1.grid != s2.grid {
        return Err(SpinError::SeriesMismatch("grids differ".into()));
    }
    if s1.label.kind != s2.label.kind {
        return Err(SpinError::SeriesMismatch(format!(
            "observables differ: {} vs {}",
            s1.label.kind, s2.label.kind
        )));
    }
    if s1.values.len() != s2.values.len() {
        return Err(SpinError::SeriesMismatch("lengths differ".into()));
    }
    Ok(s1
        .values
        .iter()
        .zip(&s2.values)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitModel {
    /// `a·2^(−bN)`
    Exponential,
    /// `a·2^(−bN) + c`
    ExponentialWithOffset,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// Sum of squared deviations of the data from the fitted curve.
    pub residual: f64,
    pub model: FitModel,
    /// Coefficient of determination of the `log₂ y` vs `N` regression
    /// (log-linear path only).
    pub r_squared: Option<f64>,
    pub iterations: usize,
    /// No finite minimizer: constant data (only `c` is meaningful) or data
    /// that pushes `b` to its bound.
    pub degenerate: bool,
}

impl FitResult {
    pub fn predict(&self, n: f64) -> f64 {
        self.a * (-self.b * n).exp2() + self.c
    }
}

const MAX_ITERATIONS: usize = 2000;
const STEP_TOL: f64 = 1e-10;
/// Iterations between checks for a stalled cost.
const STALL_WINDOW: usize = 100;
/// Relative cost decrease over one window below which the fit is stalled.
const STALL_TOL: f64 = 1e-9;

/// Least-squares fit of `a·2^(−bN)` (optionally `+ c`, `c ≥ 0`) to `(N, y)` points.
pub fn fit_exponential(points: &[(f64, f64)], with_offset: bool) -> Result<FitResult> {
    let min_points = 3;
    if points.len() < min_points {
        return Err(SpinError::Fit(format!(
            "need at least {min_points} points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|(n, y)| !n.is_finite() || !y.is_finite()) {
        return Err(SpinError::Fit("non-finite data".into()));
    }
    if with_offset {
        fit_with_offset(points)
    } else if points.iter().all(|&(_, y)| y > 0.0) {
        Ok(fit_log_linear(points))
    } else {
        let (a0, b0) = positive_part_guess(points, 0.0);
        let fit = levenberg_marquardt(points, [a0, b0, 0.0], false)?;
        Ok(FitResult {
            model: FitModel::Exponential,
            ..fit
        })
    }
}

/// Ordinary least squares `y = slope·x + intercept`, with `R²`.
fn linear_regression(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, intercept, r2)
}

fn fit_log_linear(points: &[(f64, f64)]) -> FitResult {
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log2()).collect();
    let (slope, intercept, r2) = linear_regression(&xs, &ys);
    let a = intercept.exp2();
    let b = -slope;
    FitResult {
        a,
        b,
        c: 0.0,
        residual: sse(points, a, b, 0.0),
        model: FitModel::Exponential,
        r_squared: Some(r2),
        iterations: 0,
        degenerate: false,
    }
}

fn sse(points: &[(f64, f64)], a: f64, b: f64, c: f64) -> f64 {
    points
        .iter()
        .map(|&(n, y)| {
            let r = a * (-b * n).exp2() + c - y;
            r * r
        })
        .sum()
}

/// Log-linear guess for `(a, b)` from the points with `y − c > 0`.
fn positive_part_guess(points: &[(f64, f64)], c: f64) -> (f64, f64) {
    let pos: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(_, y)| y - c > 0.0)
        .map(|&(n, y)| (n, y - c))
        .collect();
    if pos.len() < 2 {
        let ymax = points.iter().map(|p| p.1).fold(0.0, f64::max);
        return (ymax.max(0.0), 0.0);
    }
    let fit = fit_log_linear(&pos);
    (fit.a, fit.b)
}

fn fit_with_offset(points: &[(f64, f64)]) -> Result<FitResult> {
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let ymin = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let ymax = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if ymax - ymin <= 1e-14 * ymax.abs().max(f64::MIN_POSITIVE) {
        return Ok(FitResult {
            a: 0.0,
            b: 0.0,
            c: ymin.max(0.0),
            residual: sse(points, 0.0, 0.0, ymin.max(0.0)),
            model: FitModel::ExponentialWithOffset,
            r_squared: None,
            iterations: 0,
            degenerate: true,
        });
    }
    let c0 = (ymin / 2.0).max(0.0);
    let (a0, b0) = positive_part_guess(points, c0);
    levenberg_marquardt(points, [a0, b0, c0], true)
}

/// Damped Gauss–Newton on `(a, b, c)`; `a, c` are kept non-negative by
/// projection. `c` is held at zero when `fit_c` is false.
///
/// Works internally with `N` shifted to start at zero so the amplitude stays
/// of the order of the data even when `b` grows large.
fn levenberg_marquardt(points: &[(f64, f64)], start: [f64; 3], fit_c: bool) -> Result<FitResult> {
    let n0 = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let shifted: Vec<(f64, f64)> = points.iter().map(|&(n, y)| (n - n0, y)).collect();
    let unshift = |a: f64, b: f64| a * (b * n0).exp2();
    let start = [start[0] * (-start[1] * n0).exp2(), start[1], start[2]];
    // Past |b|·gap = 64 the exponential is invisible beyond one point, so cap b there.
    let mut ns: Vec<f64> = shifted.iter().map(|p| p.0).collect();
    ns.sort_by(f64::total_cmp);
    let gap = ns
        .windows(2)
        .map(|w| w[1] - w[0])
        .filter(|&d| d > 0.0)
        .fold(f64::INFINITY, f64::min);
    let b_max = if gap.is_finite() { 64.0 / gap } else { 64.0 };
    let start = [start[0], start[1].clamp(-b_max, b_max), start[2]];
    match lm_shifted(&shifted, start, fit_c, b_max) {
        Ok(fit) => Ok(FitResult {
            a: unshift(fit.a, fit.b),
            residual: sse(points, unshift(fit.a, fit.b), fit.b, fit.c),
            ..fit
        }),
        Err(SpinError::FitNotConverged { iterations, a, b, c }) => Err(SpinError::FitNotConverged {
            iterations,
            a: unshift(a, b),
            b,
            c,
        }),
        Err(e) => Err(e),
    }
}

fn lm_shifted(points: &[(f64, f64)], start: [f64; 3], fit_c: bool, b_max: f64) -> Result<FitResult> {
    let ln2 = std::f64::consts::LN_2;
    let mut p = Vector3::new(start[0].max(0.0), start[1], if fit_c { start[2].max(0.0) } else { 0.0 });
    let mut cost = sse(points, p[0], p[1], p[2]);
    let mut lambda = 1e-3;
    let mut window_cost = cost;

    for iter in 1..=MAX_ITERATIONS {
        let mut jtj = Matrix3::<f64>::zeros();
        let mut jtr = Vector3::<f64>::zeros();
        for &(n, y) in points {
            let e = (-p[1] * n).exp2();
            let r = p[0] * e + p[2] - y;
            let g = Vector3::new(e, -p[0] * n * ln2 * e, if fit_c { 1.0 } else { 0.0 });
            jtj += g * g.transpose();
            jtr += g * r;
        }
        // Parameters resting on their bound with the gradient pointing outward stay put.
        let mut pinned = [false, false, !fit_c];
        for k in [0, 2] {
            if p[k] <= 0.0 && jtr[k] > 0.0 {
                pinned[k] = true;
            }
        }
        if (p[1] >= b_max && jtr[1] < 0.0) || (p[1] <= -b_max && jtr[1] > 0.0) {
            pinned[1] = true;
        }
        for k in 0..3 {
            if pinned[k] {
                for m in 0..3 {
                    jtj[(k, m)] = 0.0;
                    jtj[(m, k)] = 0.0;
                }
                jtj[(k, k)] = 1.0;
                jtr[k] = 0.0;
            }
        }
        let mut accepted = false;
        let mut step_size = f64::INFINITY;
        for _ in 0..60 {
            let mut damped = jtj;
            for k in 0..3 {
                damped[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(delta) = damped.lu().solve(&(-jtr)) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p + delta;
            trial[0] = trial[0].max(0.0);
            trial[1] = trial[1].clamp(-b_max, b_max);
            if fit_c {
                trial[2] = trial[2].max(0.0);
            } else {
                trial[2] = 0.0;
            }
            let trial_cost = sse(points, trial[0], trial[1], trial[2]);
            if trial_cost <= cost {
                step_size = (trial - p)
                    .iter()
                    .zip(p.iter())
                    .map(|(d, x)| d.abs() / (1.0 + x.abs()))
                    .fold(0.0, f64::max);
                p = trial;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                break;
            }
            lambda *= 2.0;
        }
        // Data with no finite minimizer (e.g. non-monotone) drives `a, b` off to infinity
        // while the cost creeps towards its infimum; report that iterate as degenerate.
        let stalled = iter % STALL_WINDOW == 0 && window_cost - cost <= STALL_TOL * window_cost;
        if iter % STALL_WINDOW == 0 {
            window_cost = cost;
        }
        if !accepted || step_size < STEP_TOL || stalled {
            return Ok(FitResult {
                a: p[0],
                b: p[1],
                c: p[2],
                residual: cost,
                model: FitModel::ExponentialWithOffset,
                r_squared: None,
                iterations: iter,
                degenerate: (stalled && step_size >= STEP_TOL) || p[1].abs() >= b_max,
            });
        }
    }
    Err(SpinError::FitNotConverged {
        iterations: MAX_ITERATIONS,
        a: p[0],
        b: p[1],
        c: p[2],
    })
}

/// `ε(ΔH) = (Tr{PH²} − Tr{(PH)²}) / Tr{H²}` with `P = TT†`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    pub n_spins: usize,
    pub tr_ph2: f64,
    pub tr_phph: f64,
    pub tr_h2: f64,
    pub epsilon: f64,
}

impl DiscrepancyReport {
    fn new(n_spins: usize, tr_ph2: f64, tr_phph: f64, tr_h2: f64) -> Self {
        Self {
            n_spins,
            tr_ph2,
            tr_phph,
            tr_h2,
            epsilon: (tr_ph2 - tr_phph) / tr_h2,
        }
    }
}

fn check_target(h: &OperatorSum, t: &EmbeddingMap) -> Result<()> {
    if h.n_spins() != t.target_spins() {
        return Err(SpinError::DimensionMismatch {
            expected: t.target_spins(),
            found: h.n_spins(),
        });
    }
    Ok(())
}

/// Traces evaluated through the columns of `T`, without factorization.
///
/// `Tr{PH²} = Σ_j ‖H T e_j‖²`, `Tr{(PH)²} = ‖T†HT‖²_F` and
/// `Tr{H²} = Σ_b ‖H e_b‖²`.
pub fn epsilon_direct(h: &OperatorSum, t: &EmbeddingMap) -> Result<DiscrepancyReport> {
    check_target(h, t)?;
    let n = h.n_spins();
    if n > DEFAULT_DENSE_CAP {
        return Err(SpinError::DenseCapExceeded {
            n_spins: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let n_coarse = t.source_spins();
    let mut tr_ph2 = 0.0;
    let mut tr_phph = 0.0;
    for j in 0..1usize << n_coarse {
        let col = t.apply_t(&StateVector::basis(n_coarse, j)?)?;
        let hcol = h.apply(&col)?;
        tr_ph2 += hcol.norm().powi(2);
        let back = t.apply_t_dagger(&hcol, false).map(|tr| tr.state);
        if let Ok(back) = back {
            tr_phph += back.norm().powi(2);
        }
    }
    let mut tr_h2 = 0.0;
    for b in 0..1usize << n {
        tr_h2 += h.column(b).iter().map(|(_, z)| z.norm_sqr()).sum::<f64>();
    }
    Ok(DiscrepancyReport::new(n, tr_ph2, tr_phph, tr_h2))
}

/// Per-term block factors: `(coefficient, block → local operator)`.
type BlockFactors = (f64, Vec<(usize, DMatrix<C64>)>);

fn lookup(f: &BlockFactors, blk: usize) -> Option<&DMatrix<C64>> {
    f.1.iter().find(|(k, _)| *k == blk).map(|(_, m)| m)
}

/// Traces from `P = ⊗P_i` and the block structure of every Pauli term;
/// cost is quadratic in the number of terms and linear in `N`.
pub fn epsilon_factorized(h: &OperatorSum, t: &EmbeddingMap) -> Result<DiscrepancyReport> {
    check_target(h, t)?;
    let b = t.block_size();
    let d = (1usize << b) as f64;
    let nb = t.n_blocks();
    let projectors: Vec<DMatrix<C64>> = (0..nb)
        .map(|k| t.block_projector(k).map(|x| C64::new(x, 0.0)))
        .collect();
    let terms: Vec<BlockFactors> = h
        .all_terms()
        .iter()
        .map(|term| {
            let blocks = t
                .group_by_block(term.factors())
                .into_iter()
                .map(|(blk, local)| (blk, block_operator(&local, b)))
                .collect();
            (term.coefficient(), blocks)
        })
        .collect();


    let (mut tr_h2, mut tr_ph2, mut tr_phph) = (0.0, 0.0, 0.0);
    for tk in &terms {
        for tl in &terms {
            let mut support: Vec<usize> = tk.1.iter().chain(&tl.1).map(|(k, _)| *k).collect();
            support.sort_unstable();
            support.dedup();
            let free = (nb - support.len()) as i32;
            // Blocks outside the support contribute Tr I = d, Tr P = Tr P² = 2.
            let mut f_h2 = C64::new(d.powi(free), 0.0);
            let mut f_ph2 = C64::new(2f64.powi(free), 0.0);
            let mut f_phph = C64::new(2f64.powi(free), 0.0);
            for &blk in &support {
                let p = &projectors[blk];
                let id = DMatrix::<C64>::identity(1 << b, 1 << b);
                let a = lookup(tk, blk).unwrap_or(&id);
                let c = lookup(tl, blk).unwrap_or(&id);
                let ac = a * c;
                f_h2 *= ac.trace();
                f_ph2 *= (p * &ac).trace();
                f_phph *= (p * a * p * c).trace();
            }
            let w = tk.0 * tl.0;
            tr_h2 += w * f_h2.re;
            tr_ph2 += w * f_ph2.re;
            tr_phph += w * f_phph.re;
        }
    }
    Ok(DiscrepancyReport::new(h.n_spins(), tr_ph2, tr_phph, tr_h2))
}

/// `ε(ΔH)` of one blocking step of `model`, by the factorized route.
pub fn epsilon_delta_h(model: &ChainModel) -> Result<DiscrepancyReport> {
    let step = rg_step(model)?;
    epsilon_factorized(&model.hamiltonian(), &step.embedding)
}
