//! Generalized-rank certificates: activations with chord-slope budgets,
//! embedding verification f(x) = σ(⟨w(f), φ(x)⟩), the Forster sign-rank
//! lower bound, numeric rank, heuristic embedding search, and the closed-form
//! eluder upper bounds that come with a verified certificate.
//!
//! Everything in this module is floating-point: certificates are numeric
//! objects with an explicit tolerance, unlike the exact-rational dimension
//! searches.

use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ratio::to_f64;
use crate::table::{FunctionClassTable, Kind};

// ---------------------------------------------------------------------------
// activations

#[derive(Debug, Clone, PartialEq)]
pub enum ActivationForm {
    Identity,
    Sign,
    Relu,
    /// Breakpoints (z, σ(z)) with strictly increasing z; linear with
    /// `slope_below` before the first and `slope_above` after the last.
    PiecewiseLinear {
        breakpoints: Vec<(f64, f64)>,
        slope_below: f64,
        slope_above: f64,
    },
}

/// An activation together with its declared chord-slope bounds [mu, L].
#[derive(Debug, Clone, PartialEq)]
pub struct ActivationSpec {
    pub form: ActivationForm,
    pub mu: f64,
    pub l: f64,
}

impl ActivationSpec {
    pub fn identity() -> Self {
        Self { form: ActivationForm::Identity, mu: 1.0, l: 1.0 }
    }

    pub fn sign() -> Self {
        Self { form: ActivationForm::Sign, mu: 0.0, l: f64::INFINITY }
    }

    pub fn relu() -> Self {
        Self { form: ActivationForm::Relu, mu: 0.0, l: 1.0 }
    }

    pub fn piecewise(breakpoints: Vec<(f64, f64)>, slope_below: f64, slope_above: f64, mu: f64, l: f64) -> Result<Self> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidParameter("piecewise activation needs breakpoints".into()));
        }
        if breakpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidParameter("breakpoints must be strictly increasing".into()));
        }
        Ok(Self { form: ActivationForm::PiecewiseLinear { breakpoints, slope_below, slope_above }, mu, l })
    }

    pub fn apply(&self, z: f64) -> f64 {
        match &self.form {
            ActivationForm::Identity => z,
            ActivationForm::Sign => {
                if z > 0.0 {
                    1.0
                } else {
                    -1.0
                }
            }
            ActivationForm::Relu => z.max(0.0),
            ActivationForm::PiecewiseLinear { breakpoints, slope_below, slope_above } => {
                let (z0, v0) = breakpoints[0];
                let (zk, vk) = *breakpoints.last().expect("nonempty");
                if z <= z0 {
                    return v0 + slope_below * (z - z0);
                }
                if z >= zk {
                    return vk + slope_above * (z - zk);
                }
                let hi = breakpoints.partition_point(|&(b, _)| b < z);
                let (za, va) = breakpoints[hi - 1];
                let (zb, vb) = breakpoints[hi];
                va + (vb - va) * (z - za) / (zb - za)
            }
        }
    }

    /// Whether the activation is strictly increasing with all chord slopes
    /// at least `mu` > 0 (needed for inversion).
    pub fn strictly_monotone(&self) -> bool {
        self.mu > 0.0 && self.realized_slopes().iter().all(|s| *s >= self.mu)
    }

    fn realized_slopes(&self) -> Vec<f64> {
        match &self.form {
            ActivationForm::Identity => vec![1.0],
            ActivationForm::Sign => vec![0.0, f64::INFINITY],
            ActivationForm::Relu => vec![0.0, 1.0],
            ActivationForm::PiecewiseLinear { breakpoints, slope_below, slope_above } => {
                let mut s = vec![*slope_below, *slope_above];
                s.extend(
                    breakpoints
                        .windows(2)
                        .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)),
                );
                s
            }
        }
    }

    /// σ⁻¹(y) for strictly monotone activations, by interval bisection.
    pub fn invert(&self, y: f64) -> Result<f64> {
        if !self.strictly_monotone() {
            return Err(Error::InvalidParameter(
                "activation is not strictly monotone; no inverse".into(),
            ));
        }
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while self.apply(lo) > y {
            lo *= 2.0;
        }
        while self.apply(hi) < y {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.apply(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// All realized chord slopes (consecutive breakpoint chords and the two
/// terminal slopes — sufficient for every chord of a piecewise-linear
/// function) lie within [mu, L].
pub fn slope_check(spec: &ActivationSpec) -> bool {
    if spec.mu < 0.0 || spec.l <= 0.0 || spec.mu > spec.l {
        return false;
    }
    spec.realized_slopes()
        .iter()
        .all(|&s| s >= spec.mu - 1e-12 && s <= spec.l + 1e-12)
}

// ---------------------------------------------------------------------------
// certificates

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCertificate {
    pub d: usize,
    /// |X| × d point embeddings
    pub phi: Vec<Vec<f64>>,
    /// |F| × d function weights
    pub w: Vec<Vec<f64>>,
    pub activation: ActivationSpec,
    pub r_phi: f64,
    pub r_w: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingCheck {
    pub ok: bool,
    pub norms_ok: bool,
    pub worst_residual: f64,
    /// (point, function) attaining the worst residual
    pub worst_at: (usize, usize),
}

fn row_norm(row: &[f64]) -> f64 {
    row.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Check max_(x,f) |f(x) − σ(⟨w(f), φ(x)⟩)| ≤ tolerance and the row-norm
/// budgets ‖φ(x)‖ ≤ R_φ, ‖w(f)‖ ≤ R_w.
pub fn verify_embedding(
    table: &FunctionClassTable,
    cert: &EmbeddingCertificate,
) -> Result<EmbeddingCheck> {
    if cert.phi.len() != table.n_points()
        || cert.w.len() != table.n_funcs()
        || cert.phi.iter().chain(cert.w.iter()).any(|r| r.len() != cert.d)
    {
        return Err(Error::InvalidCertificate(format!(
            "certificate shapes (|phi| = {}, |w| = {}, d = {}) do not match a {}x{} table",
            cert.phi.len(),
            cert.w.len(),
            cert.d,
            table.n_points(),
            table.n_funcs()
        )));
    }
    let slack = 1e-9;
    let norms_ok = cert.phi.iter().all(|r| row_norm(r) <= cert.r_phi * (1.0 + slack) + slack)
        && cert.w.iter().all(|r| row_norm(r) <= cert.r_w * (1.0 + slack) + slack);
    let mut worst = -1.0f64;
    let mut worst_at = (0, 0);
    for x in 0..table.n_points() {
        for f in 0..table.n_funcs() {
            let pred = cert.activation.apply(dot(&cert.w[f], &cert.phi[x]));
            let res = (to_f64(table.entry(x, f)) - pred).abs();
            if res > worst {
                worst = res;
                worst_at = (x, f);
            }
        }
    }
    Ok(EmbeddingCheck {
        ok: norms_ok && worst <= cert.tolerance,
        norms_ok,
        worst_residual: worst,
        worst_at,
    })
}

/// Re-verify a certificate under enlarged norm budgets (shrinking is
/// rejected; enlarging can never break a certificate).
pub fn certificate_monotonicity_check(
    table: &FunctionClassTable,
    cert: &EmbeddingCertificate,
    r_phi: f64,
    r_w: f64,
) -> Result<bool> {
    if r_phi < cert.r_phi || r_w < cert.r_w {
        return Err(Error::InvalidParameter(
            "norm budgets may only be enlarged, not shrunk".into(),
        ));
    }
    let enlarged = EmbeddingCertificate { r_phi, r_w, ..cert.clone() };
    Ok(verify_embedding(table, &enlarged)?.ok)
}

/// Lift a verified strictly-monotone certificate on a binary table to a sign
/// certificate one dimension higher: f(x) = sign(⟨w(f), φ(x)⟩ − σ⁻¹(0)).
pub fn sign_lift(
    table: &FunctionClassTable,
    cert: &EmbeddingCertificate,
) -> Result<EmbeddingCertificate> {
    if table.kind() != Kind::Binary {
        return Err(Error::WrongKind("sign lift applies to binary tables".into()));
    }
    if !cert.activation.strictly_monotone() {
        return Err(Error::InvalidCertificate(
            "sign lift needs a strictly monotone activation".into(),
        ));
    }
    let check = verify_embedding(table, cert)?;
    if !check.ok {
        return Err(Error::InvalidCertificate(format!(
            "certificate does not verify (worst residual {:.3e})",
            check.worst_residual
        )));
    }
    let t = cert.activation.invert(0.0)?;
    let phi: Vec<Vec<f64>> = cert
        .phi
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(1.0);
            v
        })
        .collect();
    let w: Vec<Vec<f64>> = cert
        .w
        .iter()
        .map(|r| {
            let mut v = r.clone();
            v.push(-t);
            v
        })
        .collect();
    let r_phi = phi.iter().map(|r| row_norm(r)).fold(0.0, f64::max);
    let r_w = w.iter().map(|r| row_norm(r)).fold(0.0, f64::max);
    let lifted = EmbeddingCertificate {
        d: cert.d + 1,
        phi,
        w,
        activation: ActivationSpec::sign(),
        r_phi,
        r_w,
        tolerance: 1e-6,
    };
    let check = verify_embedding(table, &lifted)?;
    if !check.ok {
        return Err(Error::ConstructionFailure(format!(
            "sign lift fails at {:?} with residual {:.3e}",
            check.worst_at, check.worst_residual
        )));
    }
    Ok(lifted)
}

// ---------------------------------------------------------------------------
// spectral quantities

fn to_matrix(table: &FunctionClassTable) -> DMatrix<f64> {
    DMatrix::from_fn(table.n_points(), table.n_funcs(), |i, j| to_f64(table.entry(i, j)))
}

/// Spectral norm by power iteration on AᵀA with the deterministic all-ones
/// start; returns (norm, achieved relative tolerance).
pub fn spectral_norm_power(a: &DMatrix<f64>) -> (f64, f64) {
    let n = a.ncols();
    let mut v = nalgebra::DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut sigma = 0.0f64;
    let mut tol = f64::INFINITY;
    for _ in 0..20_000 {
        let av = a * &v;
        let atav = a.transpose() * av;
        let norm = atav.norm();
        if norm == 0.0 {
            return (0.0, 0.0);
        }
        let next = norm.sqrt();
        tol = ((next - sigma) / next).abs();
        sigma = next;
        v = atav / norm;
        if tol < 1e-14 {
            break;
        }
    }
    (sigma, tol)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForsterBound {
    pub value: f64,
    pub spectral_norm: f64,
    /// relative tolerance achieved by the power iteration
    pub tolerance: f64,
}

/// Forster's sign-rank lower bound √(|X|·|F|)/‖A‖ for a sign matrix.
pub fn forster_bound(table: &FunctionClassTable) -> Result<ForsterBound> {
    if table.kind() != Kind::Binary {
        return Err(Error::WrongKind("the Forster bound applies to sign matrices".into()));
    }
    let a = to_matrix(table);
    let (norm, tol) = spectral_norm_power(&a);
    let value = ((table.n_points() * table.n_funcs()) as f64).sqrt() / norm;
    Ok(ForsterBound { value, spectral_norm: norm, tolerance: tol })
}

/// Number of singular values above `tol` × (largest singular value).
pub fn numeric_rank(table: &FunctionClassTable, tol: f64) -> Result<usize> {
    if tol < 0.0 {
        return Err(Error::InvalidParameter("rank tolerance must be nonnegative".into()));
    }
    let svals = to_matrix(table).svd(false, false).singular_values;
    let max = svals.iter().cloned().fold(0.0f64, f64::max);
    if max == 0.0 {
        return Ok(0);
    }
    Ok(svals.iter().filter(|&&s| s > tol * max).count())
}

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// closed-form upper bounds

const E: f64 = std::f64::consts::E;

/// (3e/(e−1)) · d · ln(24 R_φ² R_w² / ε²) — the eluder upper bound that comes
/// with an identity (linear) certificate.
pub fn bound_claim_b2(d: usize, r_phi: f64, r_w: f64, eps: f64) -> Result<f64> {
    if d == 0 || r_phi <= 0.0 || r_w <= 0.0 || eps <= 0.0 {
        return Err(Error::InvalidParameter("all bound parameters must be positive".into()));
    }
    if eps >= r_phi * r_w {
        return Err(Error::InvalidParameter(format!(
            "bound is vacuous for eps = {eps} >= R_phi*R_w = {}",
            r_phi * r_w
        )));
    }
    Ok((3.0 * E / (E - 1.0)) * d as f64 * (24.0 * r_phi * r_phi * r_w * r_w / (eps * eps)).ln())
}

/// The M_μ^L version: an extra L²/μ² factor and L² inside the logarithm.
pub fn bound_claim_b3(d: usize, r_phi: f64, r_w: f64, mu: f64, l: f64, eps: f64) -> Result<f64> {
    if d == 0 || r_phi <= 0.0 || r_w <= 0.0 || mu <= 0.0 || l < mu || eps <= 0.0 {
        return Err(Error::InvalidParameter(
            "need positive parameters with 0 < mu <= L".into(),
        ));
    }
    if eps >= r_phi * r_w * l {
        return Err(Error::InvalidParameter(format!(
            "bound is vacuous for eps = {eps} >= R_phi*R_w*L = {}",
            r_phi * r_w * l
        )));
    }
    Ok((3.0 * E / (E - 1.0))
        * d as f64
        * (l * l / (mu * mu))
        * (24.0 * r_phi * r_phi * r_w * r_w * l * l / (eps * eps)).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum B1Outcome {
    /// the hypothesis (1+α)^k ≤ 1+βk fails, nothing to check
    Vacuous,
    Holds,
    Violated,
}

/// If (1+α)^k ≤ 1+βk then k ≤ (e/(e−1)) · ((1+α)/α) · ln(2β(1+α)/α).
pub fn lemma_b1_check(alpha: f64, beta: f64, k: u32) -> Result<B1Outcome> {
    if alpha <= 0.0 || beta <= 0.0 || k == 0 {
        return Err(Error::InvalidParameter("need alpha, beta > 0 and k >= 1".into()));
    }
    if (1.0 + alpha).powi(k as i32) > 1.0 + beta * k as f64 {
        return Ok(B1Outcome::Vacuous);
    }
    let bound = (E / (E - 1.0)) * ((1.0 + alpha) / alpha) * (2.0 * beta * (1.0 + alpha) / alpha).ln();
    Ok(if (k as f64) <= bound { B1Outcome::Holds } else { B1Outcome::Violated })
}

// ---------------------------------------------------------------------------
// embedding search

/// Best-effort search for a dimension-d certificate. Identity goes through a
/// truncated SVD factorization; strictly monotone activations invert the
/// targets first and then factorize; sign runs an alternating perceptron
/// from a deterministic start plus seeded random restarts. Returning `None`
/// never proves nonexistence.
pub fn embedding_search(
    table: &FunctionClassTable,
    d: usize,
    activation: &ActivationSpec,
    budget: u64,
    seed: u64,
) -> Result<Option<EmbeddingCertificate>> {
    if d == 0 || budget == 0 {
        return Err(Error::InvalidParameter("need d >= 1 and budget >= 1".into()));
    }
    match activation.form {
        ActivationForm::Identity => {
            Ok(factorization_certificate(&to_matrix(table), d, activation)
                .and_then(|c| confirm(table, c)))
        }
        ActivationForm::Sign => sign_search(table, d, budget, seed),
        _ if activation.strictly_monotone() => {
            let mut z = to_matrix(table);
            for v in z.iter_mut() {
                *v = activation.invert(*v)?;
            }
            Ok(factorization_certificate(&z, d, activation).and_then(|c| confirm(table, c)))
        }
        _ => hill_climb_search(table, d, activation, budget, seed),
    }
}

fn confirm(table: &FunctionClassTable, cert: EmbeddingCertificate) -> Option<EmbeddingCertificate> {
    verify_embedding(table, &cert).ok().filter(|c| c.ok).map(|_| cert)
}

/// φ = U√Σ, w = V√Σ from the truncated SVD; fails when the matrix needs more
/// than d dimensions at tolerance 1e−6.
fn factorization_certificate(
    z: &DMatrix<f64>,
    d: usize,
    activation: &ActivationSpec,
) -> Option<EmbeddingCertificate> {
    let svd = z.clone().svd(true, true);
    let u = svd.u.as_ref()?;
    let vt = svd.v_t.as_ref()?;
    let k = d.min(svd.singular_values.len());
    let mut phi = vec![vec![0.0; d]; z.nrows()];
    let mut w = vec![vec![0.0; d]; z.ncols()];
    for t in 0..k {
        let s = svd.singular_values[t].max(0.0).sqrt();
        for (i, row) in phi.iter_mut().enumerate() {
            row[t] = u[(i, t)] * s;
        }
        for (j, row) in w.iter_mut().enumerate() {
            row[t] = vt[(t, j)] * s;
        }
    }
    let r_phi = phi.iter().map(|r| row_norm(r)).fold(0.0, f64::max).max(1e-12);
    let r_w = w.iter().map(|r| row_norm(r)).fold(0.0, f64::max).max(1e-12);
    Some(EmbeddingCertificate {
        d,
        phi,
        w,
        activation: activation.clone(),
        r_phi,
        r_w,
        tolerance: 1e-6,
    })
}

fn sign_search(
    table: &FunctionClassTable,
    d: usize,
    budget: u64,
    seed: u64,
) -> Result<Option<EmbeddingCertificate>> {
    if table.kind() != Kind::Binary {
        return Err(Error::WrongKind("sign embeddings need a binary table".into()));
    }
    let n = table.n_points();
    let nf = table.n_funcs();
    let signs: Vec<Vec<f64>> = (0..n)
        .map(|x| (0..nf).map(|f| table.sign_entry(x, f) as f64).collect())
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = 0u64;
    let mut restart = 0usize;
    while evals < budget {
        // deterministic first start: the natural "index plus bias" embedding,
        // which already separates monotone classes; later starts are random
        let mut phi: Vec<Vec<f64>> = if restart == 0 && d >= 2 {
            (0..n)
                .map(|x| {
                    let mut r = vec![0.0; d];
                    r[0] = (x as f64 + 1.0) / n as f64;
                    r[1] = 1.0;
                    normalize(&mut r);
                    r
                })
                .collect()
        } else {
            (0..n).map(|_| random_unit(&mut rng, d)).collect()
        };
        let mut w: Vec<Vec<f64>> = vec![vec![0.0; d]; nf];
        for _round in 0..24 {
            let mut mistakes = 0usize;
            // fit each function's weights by perceptron over the points
            for f in 0..nf {
                mistakes += perceptron_fit(&mut w[f], &phi, |x| signs[x][f], 64);
            }
            evals += (n * nf) as u64;
            if mistakes == 0 {
                let cert = finish_sign_cert(d, phi, w);
                if let Some(cert) = confirm(table, cert) {
                    return Ok(Some(cert));
                }
                break;
            }
            // symmetric pass: refit each point's embedding over the functions
            for x in 0..n {
                perceptron_fit(&mut phi[x], &w, |f| signs[x][f], 64);
                normalize(&mut phi[x]);
            }
            evals += (n * nf) as u64;
            if evals >= budget {
                break;
            }
        }
        restart += 1;
    }
    Ok(None)
}

fn finish_sign_cert(d: usize, phi: Vec<Vec<f64>>, w: Vec<Vec<f64>>) -> EmbeddingCertificate {
    let r_phi = phi.iter().map(|r| row_norm(r)).fold(0.0, f64::max).max(1e-12);
    let r_w = w.iter().map(|r| row_norm(r)).fold(0.0, f64::max).max(1e-12);
    EmbeddingCertificate {
        d,
        phi,
        w,
        activation: ActivationSpec::sign(),
        r_phi,
        r_w,
        tolerance: 1e-6,
    }
}

/// Classic perceptron passes; returns the number of mistakes in the final
/// pass (0 = consistent).
fn perceptron_fit(
    weights: &mut [f64],
    features: &[Vec<f64>],
    label: impl Fn(usize) -> f64,
    max_passes: usize,
) -> usize {
    let mut mistakes = 0;
    for _ in 0..max_passes {
        mistakes = 0;
        for (i, x) in features.iter().enumerate() {
            let y = label(i);
            let pred = if dot(weights, x) > 0.0 { 1.0 } else { -1.0 };
            if pred != y {
                mistakes += 1;
                for (wt, xt) in weights.iter_mut().zip(x) {
                    *wt += y * xt;
                }
            }
        }
        if mistakes == 0 {
            break;
        }
    }
    mistakes
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = row_norm(&v);
        if n > 1e-3 {
            for a in &mut v {
                *a /= n;
            }
            return v;
        }
    }
}

fn normalize(v: &mut [f64]) {
    let n = row_norm(v);
    if n > 0.0 {
        for a in v.iter_mut() {
            *a /= n;
        }
    }
}

/// Fallback for non-invertible real activations: start from the raw
/// factorization and accept random perturbations that shrink the worst
/// residual.
fn hill_climb_search(
    table: &FunctionClassTable,
    d: usize,
    activation: &ActivationSpec,
    budget: u64,
    seed: u64,
) -> Result<Option<EmbeddingCertificate>> {
    let mut cert = match factorization_certificate(&to_matrix(table), d, activation) {
        Some(c) => c,
        None => return Ok(None),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc1_1b);
    let mut best = verify_embedding(table, &cert)?.worst_residual;
    let mut evals = 1u64;
    let mut step = 0.5f64;
    while evals < budget && best > cert.tolerance {
        let mut candidate = cert.clone();
        let rows = candidate.phi.len() + candidate.w.len();
        let pick = rng.gen_range(0..rows);
        let row = if pick < candidate.phi.len() {
            &mut candidate.phi[pick]
        } else {
            &mut candidate.w[pick - candidate.phi.len()]
        };
        for a in row.iter_mut() {
            *a += rng.gen_range(-step..step);
        }
        candidate.r_phi = candidate.phi.iter().map(|r| row_norm(r)).fold(0.0, f64::max).max(1e-12);
        candidate.r_w = candidate.w.iter().map(|r| row_norm(r)).fold(0.0, f64::max).max(1e-12);
        let res = verify_embedding(table, &candidate)?.worst_residual;
        evals += 1;
        if res < best {
            best = res;
            cert = candidate;
        } else {
            step = (step * 0.999).max(1e-4);
        }
    }
    Ok((best <= cert.tolerance).then_some(cert))
}

// ---------------------------------------------------------------------------
// named certificates

/// The two-dimensional sign certificate for thresholds: φ(x) = (x, 1)
/// normalized, w(f_t) = (1, 0.5 − t) — sign(x − t + 0.5) reproduces
/// 1{x ≥ t} on integer points.
pub fn sign_certificate_thresholds(n: usize) -> Result<(FunctionClassTable, EmbeddingCertificate)> {
    let table = crate::table::gen_thresholds(n)?;
    let scale = ((n * n + 1) as f64).sqrt();
    let phi: Vec<Vec<f64>> = (1..=n).map(|x| vec![x as f64 / scale, 1.0 / scale]).collect();
    let w: Vec<Vec<f64>> = (1..=n + 1).map(|t| vec![1.0, 0.5 - t as f64]).collect();
    let r_phi = phi.iter().map(|r| row_norm(r)).fold(0.0, f64::max);
    let r_w = w.iter().map(|r| row_norm(r)).fold(0.0, f64::max);
    let cert = EmbeddingCertificate {
        d: 2,
        phi,
        w,
        activation: ActivationSpec::sign(),
        r_phi,
        r_w,
        tolerance: 1e-6,
    };
    Ok((table, cert))
}

/// The (d+1)-dimensional relu certificate for the packed relu class:
/// φ(x) = (x, 1)/√2 and w(f_u) = √2·(R/2)·(u, −c) reproduce
/// relu(⟨u, x⟩ − c)·R/2 exactly.
pub fn relu_certificate(
    d: usize,
    eps: &BigRational,
    r: &BigRational,
) -> Result<(FunctionClassTable, EmbeddingCertificate)> {
    let (table, _) = crate::scaledim::gen_relu_star_witness(d, eps, r)?;
    let vectors = crate::scaledim::relu_class_vectors(d, eps, r)?;
    let c = 1.0 - 2.0 * to_f64(eps) / to_f64(r);
    let half_r = to_f64(r) / 2.0;
    let s2 = 2.0f64.sqrt();
    let phi: Vec<Vec<f64>> = vectors
        .iter()
        .map(|u| {
            let mut row: Vec<f64> = u.iter().map(|a| a / s2).collect();
            row.push(1.0 / s2);
            row
        })
        .collect();
    let w: Vec<Vec<f64>> = vectors
        .iter()
        .map(|u| {
            let mut row: Vec<f64> = u.iter().map(|a| a * s2 * half_r).collect();
            row.push(-c * s2 * half_r);
            row
        })
        .collect();
    let r_phi = phi.iter().map(|r| row_norm(r)).fold(0.0, f64::max);
    let r_w = w.iter().map(|r| row_norm(r)).fold(0.0, f64::max);
    let cert = EmbeddingCertificate {
        d: d + 1,
        phi,
        w,
        activation: ActivationSpec::relu(),
        r_phi,
        r_w,
        tolerance: 1e-6,
    };
    Ok((table, cert))
}

// ---------------------------------------------------------------------------
// JSON forms

pub fn activation_to_json(a: &ActivationSpec) -> serde_json::Value {
    let form = match &a.form {
        ActivationForm::Identity => serde_json::json!("identity"),
        ActivationForm::Sign => serde_json::json!("sign"),
        ActivationForm::Relu => serde_json::json!("relu"),
        ActivationForm::PiecewiseLinear { breakpoints, slope_below, slope_above } => serde_json::json!({
            "breakpoints": breakpoints.iter().map(|&(z, v)| vec![z, v]).collect::<Vec<_>>(),
            "slope_below": slope_below,
            "slope_above": slope_above,
        }),
    };
    serde_json::json!({ "form": form, "mu": a.mu, "L": a.l })
}

pub fn activation_from_json(v: &serde_json::Value) -> Result<ActivationSpec> {
    let mu = v.get("mu").and_then(|m| m.as_f64()).unwrap_or(0.0);
    let l = v.get("L").and_then(|m| m.as_f64()).unwrap_or(f64::INFINITY);
    match v.get("form") {
        Some(serde_json::Value::String(s)) => match s.as_str() {
            "identity" => Ok(ActivationSpec { mu, l, ..ActivationSpec::identity() }),
            "sign" => Ok(ActivationSpec { mu, l, ..ActivationSpec::sign() }),
            "relu" => Ok(ActivationSpec { mu, l, ..ActivationSpec::relu() }),
            other => Err(Error::Malformed(format!("unknown activation {other:?}"))),
        },
        Some(obj) => {
            let bps = obj
                .get("breakpoints")
                .and_then(|b| b.as_array())
                .ok_or_else(|| Error::Malformed("piecewise activation needs breakpoints".into()))?
                .iter()
                .map(|p| {
                    let p = p.as_array().filter(|p| p.len() == 2);
                    match p {
                        Some(p) => Ok((
                            p[0].as_f64().ok_or_else(|| Error::Malformed("bad breakpoint".into()))?,
                            p[1].as_f64().ok_or_else(|| Error::Malformed("bad breakpoint".into()))?,
                        )),
                        None => Err(Error::Malformed("breakpoint must be [z, value]".into())),
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let below = obj.get("slope_below").and_then(|s| s.as_f64()).unwrap_or(0.0);
            let above = obj.get("slope_above").and_then(|s| s.as_f64()).unwrap_or(0.0);
            ActivationSpec::piecewise(bps, below, above, mu, l)
        }
        None => Err(Error::Malformed("activation needs a \"form\"".into())),
    }
}

pub fn certificate_to_json(c: &EmbeddingCertificate) -> serde_json::Value {
    serde_json::json!({
        "d": c.d,
        "phi": c.phi,
        "w": c.w,
        "activation": activation_to_json(&c.activation),
        "R_phi": c.r_phi,
        "R_w": c.r_w,
        "tol": c.tolerance,
    })
}

pub fn certificate_from_json(v: &serde_json::Value) -> Result<EmbeddingCertificate> {
    let d = v
        .get("d")
        .and_then(|d| d.as_u64())
        .ok_or_else(|| Error::Malformed("certificate needs \"d\"".into()))? as usize;
    let rows = |key: &str| -> Result<Vec<Vec<f64>>> {
        v.get(key)
            .and_then(|m| m.as_array())
            .ok_or_else(|| Error::Malformed(format!("certificate needs \"{key}\"")))?
            .iter()
            .map(|r| {
                r.as_array()
                    .ok_or_else(|| Error::Malformed(format!("{key} rows must be arrays")))?
                    .iter()
                    .map(|x| x.as_f64().ok_or_else(|| Error::Malformed(format!("bad {key} entry"))))
                    .collect()
            })
            .collect()
    };
    let activation = activation_from_json(
        v.get("activation").ok_or_else(|| Error::Malformed("certificate needs activation".into()))?,
    )?;
    let get = |key: &str| v.get(key).and_then(|x| x.as_f64());
    Ok(EmbeddingCertificate {
        d,
        phi: rows("phi")?,
        w: rows("w")?,
        activation,
        r_phi: get("R_phi").ok_or_else(|| Error::Malformed("certificate needs R_phi".into()))?,
        r_w: get("R_w").ok_or_else(|| Error::Malformed("certificate needs R_w".into()))?,
        tolerance: get("tol").unwrap_or(1e-6),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio::parse_rational;
    use crate::table::{gen_exp_class, gen_parities, gen_thresholds};
    use crate::testutil::{random_binary_table, random_rational_table};
    use crate::witness::ReferenceFunction;

    #[test]
    fn slope_checks() {
        assert!(slope_check(&ActivationSpec::identity()));
        assert!(slope_check(&ActivationSpec::relu()));
        let mut bad_relu = ActivationSpec::relu();
        bad_relu.mu = 0.1;
        assert!(!slope_check(&bad_relu));
        // clamped exponential: slope 1 below 0, e^z on [0,1] (sampled on a
        // fine grid), slope e above
        let grid = 1 << 10;
        let bps: Vec<(f64, f64)> =
            (0..=grid).map(|i| { let z = i as f64 / grid as f64; (z, z.exp()) }).collect();
        let clamped = ActivationSpec::piecewise(bps, 1.0, std::f64::consts::E, 1.0, std::f64::consts::E).unwrap();
        assert!(slope_check(&clamped));
        assert!(clamped.strictly_monotone());
        let z0 = clamped.invert(0.0).unwrap();
        assert!((clamped.apply(z0)).abs() < 1e-9);
    }

    #[test]
    fn threshold_sign_certificate_verifies() {
        let (table, cert) = sign_certificate_thresholds(6).unwrap();
        let check = verify_embedding(&table, &cert).unwrap();
        assert!(check.ok, "worst residual {} at {:?}", check.worst_residual, check.worst_at);
        assert!(certificate_monotonicity_check(&table, &cert, cert.r_phi * 2.0, cert.r_w * 2.0).unwrap());
        assert!(certificate_monotonicity_check(&table, &cert, cert.r_phi, cert.r_w).unwrap());
        assert!(certificate_monotonicity_check(&table, &cert, cert.r_phi / 2.0, cert.r_w).is_err());
    }

    #[test]
    fn relu_certificate_verifies() {
        let (table, cert) = relu_certificate(2, &parse_rational("0.05").unwrap(), &parse_rational("2").unwrap()).unwrap();
        assert_eq!(cert.d, 3);
        let check = verify_embedding(&table, &cert).unwrap();
        assert!(check.ok, "worst residual {}", check.worst_residual);
        assert!(certificate_monotonicity_check(&table, &cert, cert.r_phi * 2.0, cert.r_w * 2.0).unwrap());
    }

    #[test]
    fn perturbed_certificate_fails_with_location() {
        let (table, mut cert) = sign_certificate_thresholds(4).unwrap();
        cert.w[2][0] = -cert.w[2][0]; // flips some signs of f_3
        let check = verify_embedding(&table, &cert).unwrap();
        assert!(!check.ok);
        assert!(check.worst_residual > 1.0);
        assert_eq!(check.worst_at.1, 2);
    }

    #[test]
    fn forster_values() {
        let f = forster_bound(&gen_parities(2).unwrap()).unwrap();
        assert!((f.value - 2.0).abs() < 1e-9, "got {}", f.value);
        let f4 = forster_bound(&gen_parities(4).unwrap()).unwrap();
        assert!((f4.value - 4.0).abs() < 1e-9, "got {}", f4.value);
        let ones = FunctionClassTable::new(
            (0..3).map(|i| format!("x{i}")).collect(),
            (0..3).map(|j| format!("f{j}")).collect(),
            vec![vec![crate::ratio::rat_i64(1); 3]; 3],
            Kind::Binary,
        )
        .unwrap();
        let f1 = forster_bound(&ones).unwrap();
        assert!((f1.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn forster_never_exceeds_dimensions() {
        for seed in 0..30u64 {
            let t = random_binary_table(5, 7, seed);
            let f = forster_bound(&t).unwrap();
            assert!(f.value <= 5.0f64.min(7.0) + 1e-6, "seed {seed}: {}", f.value);
        }
    }

    #[test]
    fn power_iteration_matches_svd() {
        for seed in 0..40u64 {
            let t = random_rational_table(4 + (seed as usize % 5), 4 + (seed as usize % 4), seed);
            let a = to_matrix(&t);
            let (power, _) = spectral_norm_power(&a);
            let svd_norm = a.svd(false, false).singular_values.iter().cloned().fold(0.0f64, f64::max);
            assert!((power - svd_norm).abs() < 1e-8, "seed {seed}: {power} vs {svd_norm}");
        }
    }

    #[test]
    fn numeric_rank_values() {
        assert_eq!(numeric_rank(&gen_exp_class(4, 4).unwrap(), DEFAULT_RANK_TOL).unwrap(), 4);
        // rank-1 outer product
        let t = FunctionClassTable::new(
            (0..3).map(|i| format!("x{i}")).collect(),
            (0..4).map(|j| format!("f{j}")).collect(),
            (1..=3i64)
                .map(|i| (1..=4i64).map(|j| crate::ratio::rat_i64(i * j)).collect())
                .collect(),
            Kind::Real,
        )
        .unwrap();
        assert_eq!(numeric_rank(&t, DEFAULT_RANK_TOL).unwrap(), 1);
    }

    #[test]
    fn triangular_rank_consistency() {
        // 1-d relu-style family on 5 points: with a strictly monotone
        // activation, the matrix ⟨w_i, φ_j⟩ − σ⁻¹(0) of a consistent
        // certificate is triangular-like and has rank ≥ n−1
        let n = 5usize;
        let act = ActivationSpec::piecewise(vec![(0.0, 0.0), (1.0, 1.0)], 0.5, 1.0, 0.5, 1.0).unwrap();
        let t0 = act.invert(0.0).unwrap();
        let z = DMatrix::from_fn(n, n, |i, j| if i >= j { (i - j + 1) as f64 } else { t0 });
        let shifted = z.map(|v| v - t0);
        let svals = shifted.svd(false, false).singular_values;
        let max = svals.iter().cloned().fold(0.0f64, f64::max);
        let rank = svals.iter().filter(|&&s| s > 1e-9 * max).count();
        assert!(rank >= n - 1);
    }

    #[test]
    fn bound_formulas() {
        let b = bound_claim_b2(1, 1.0, 1.0, 0.1).unwrap();
        assert!((b - 36.94).abs() < 0.01, "got {b}");
        // mu = L collapse: b3(d, Rφ, Rw, L, L, eps) = b2(d, Rφ, Rw·L, eps)
        for (d, rp, rw, l, eps) in [(1, 1.0, 1.0, 2.0, 0.3), (3, 0.5, 2.0, 1.5, 0.7)] {
            let lhs = bound_claim_b3(d, rp, rw, l, l, eps).unwrap();
            let rhs = bound_claim_b2(d, rp, rw * l, eps).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
        }
        assert!(bound_claim_b2(1, 1.0, 1.0, 1.1).is_err());
        assert!(bound_claim_b3(1, 1.0, 1.0, 0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn lemma_b1_outcomes() {
        assert_eq!(lemma_b1_check(1.0, 2.0, 3).unwrap(), B1Outcome::Vacuous);
        assert_eq!(lemma_b1_check(1.0, 2.0, 2).unwrap(), B1Outcome::Holds);
        for (a, b) in [(0.5, 1.0), (0.1, 3.0), (2.0, 5.0)] {
            assert_eq!(lemma_b1_check(a, b, 1).unwrap(), B1Outcome::Holds);
        }
    }

    #[test]
    fn lemma_b1_never_violated_randomized() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let alpha = rng.gen_range(1e-6..10.0);
            let beta = rng.gen_range(alpha..100.0);
            let k = rng.gen_range(1..=50u32);
            assert_ne!(lemma_b1_check(alpha, beta, k).unwrap(), B1Outcome::Violated);
        }
    }

    #[test]
    fn search_identity_factorizes() {
        for seed in 0..8u64 {
            let t = random_rational_table(4, 5, seed);
            let r = numeric_rank(&t, DEFAULT_RANK_TOL).unwrap();
            let cert = embedding_search(&t, r.max(1), &ActivationSpec::identity(), 1000, 0)
                .unwrap()
                .expect("rank factorization must succeed at d = rank");
            assert!(verify_embedding(&t, &cert).unwrap().ok);
        }
    }

    #[test]
    fn search_sign_recovers_thresholds_and_fails_on_parity() {
        let t = gen_thresholds(4).unwrap();
        let cert = embedding_search(&t, 2, &ActivationSpec::sign(), 200_000, 1)
            .unwrap()
            .expect("thresholds embed in the plane with sign");
        assert!(verify_embedding(&t, &cert).unwrap().ok);
        // XOR-patterned columns cannot be separated on a line
        let p = gen_parities(2).unwrap();
        assert!(embedding_search(&p, 1, &ActivationSpec::sign(), 50_000, 1).unwrap().is_none());
        // consistency of bounds: sign certificate of dimension d caps the
        // Forster bound at d+1... or rather the bound can never exceed d+1
        let f = forster_bound(&t).unwrap();
        assert!(f.value <= (cert.d + 1) as f64 + 1e-6);
    }

    #[test]
    fn sign_lift_of_monotone_certificates() {
        // identity certificate on a binary table lifts to a sign certificate
        // one dimension up
        let t = gen_thresholds(4).unwrap();
        let r = numeric_rank(&t, DEFAULT_RANK_TOL).unwrap();
        let cert = embedding_search(&t, r, &ActivationSpec::identity(), 1000, 0)
            .unwrap()
            .expect("exact factorization");
        let lifted = sign_lift(&t, &cert).unwrap();
        assert_eq!(lifted.d, cert.d + 1);
        assert!(verify_embedding(&t, &lifted).unwrap().ok);
    }

    #[test]
    fn b2_bounds_eluder_for_identity_certificates() {
        use crate::scaledim::{edim_scale, ScaleSearchConfig};
        for seed in 0..6u64 {
            let t = random_rational_table(3, 4, seed);
            let r = numeric_rank(&t, DEFAULT_RANK_TOL).unwrap().max(1);
            let Some(cert) = embedding_search(&t, r, &ActivationSpec::identity(), 1000, 0).unwrap()
            else {
                continue;
            };
            for eps in ["0.5", "1"] {
                let eps_r = parse_rational(eps).unwrap();
                let eps_f = to_f64(&eps_r);
                if eps_f >= cert.r_phi * cert.r_w {
                    continue;
                }
                let b2 = bound_claim_b2(cert.d, cert.r_phi, cert.r_w, eps_f).unwrap();
                let b3 = bound_claim_b3(cert.d, cert.r_phi, cert.r_w, 1.0, 1.0, eps_f).unwrap();
                let cfg = ScaleSearchConfig::new(eps_r).unwrap();
                let e = edim_scale(&t, &ReferenceFunction::zeros(3), &cfg).unwrap();
                assert!(
                    (e.value as f64) <= b2 && (e.value as f64) <= b3,
                    "seed {seed} eps {eps}: edim {} vs b2 {b2}, b3 {b3}",
                    e.value
                );
            }
        }
    }

    #[test]
    fn relu_star_size_outgrows_b2_formula() {
        // the guaranteed packing size (R/4eps)^{d/2} overtakes the d+1
        // dimensional linear-certificate bound as eps shrinks: polynomial in
        // 1/eps beats logarithmic
        let (r, d) = (2.0f64, 2usize);
        // certificate geometry: phi rows are unit, w rows are
        // sqrt(2)*(R/2)*sqrt(1+c^2) with c < 1
        let r_phi = 1.0;
        let r_w = 2.0 * r;
        let mut crossed = false;
        for exp in 1..=8 {
            let eps = 10f64.powi(-exp);
            let target = (r / (4.0 * eps)).powf(d as f64 / 2.0);
            let b2 = bound_claim_b2(d + 1, r_phi, r_w, eps).unwrap();
            if target > b2 {
                crossed = true;
            }
        }
        assert!(crossed, "packing guarantee never exceeded the linear bound");
        // and at the moderate scale where the table is actually built, the
        // witness length matches the guarantee
        let (table, cert) = relu_certificate(2, &parse_rational("0.05").unwrap(), &parse_rational("2").unwrap()).unwrap();
        assert!(table.n_points() >= 10);
        assert!(cert.r_phi <= r_phi + 1e-9 && cert.r_w <= r_w + 1e-9);
    }

    #[test]
    fn certificate_json_round_trip() {
        let (_, cert) = sign_certificate_thresholds(3).unwrap();
        let j = certificate_to_json(&cert);
        assert_eq!(certificate_from_json(&j).unwrap(), cert);
        let bad = serde_json::json!({"d": 2});
        assert!(certificate_from_json(&bad).is_err());
    }

    use crate::table::FunctionClassTable;
    use crate::table::Kind;
}
