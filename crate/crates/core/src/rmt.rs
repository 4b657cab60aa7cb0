//! Random-matrix benchmark for correlation spectra.
//!
//! A correlation matrix of `N` mutually uncorrelated series of length `L`
//! has, for `N, L → ∞` at fixed `Q = L/N > 1`, the Marchenko-Pastur
//! eigenvalue density supported on `[λ−, λ+]`. Eigenvalues outside that
//! band ("deviating") carry structure such as the market mode or industry
//! sectors; eigenvectors are summarised by their inverse participation
//! ratio and by projections onto industry groups.
//!
//! `ρ(q, s)` matrices are not Gram matrices for `q ≠ 2` and may have negative
//! eigenvalues; the band computed from the panel's `Q` is then a heuristic
//! reference, not a theorem.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{config_err, data_err, Error, Result};
use crate::seriesio::{validate_groups, ReturnPanel};

/// Pearson correlation `C = R Rᵀ / L` of the standardized rows.
pub fn pearson_matrix(panel: &ReturnPanel) -> Result<DMatrix<f64>> {
    let n = panel.n_assets();
    let l = panel.len();
    let mut z = DMatrix::zeros(n, l);
    for (i, row) in panel.returns.iter().enumerate() {
        let mean = row.iter().sum::<f64>() / l as f64;
        let sd = (row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / l as f64).sqrt();
        if !(sd > 0.0) {
            return Err(Error::DegenerateSeries(format!("{} is constant", panel.tickers[i])));
        }
        for (t, x) in row.iter().enumerate() {
            z[(i, t)] = (x - mean) / sd;
        }
    }
    let mut c = (&z * z.transpose()) / l as f64;
    for i in 0..n {
        c[(i, i)] = 1.0;
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    Ok(c)
}

/// Marchenko-Pastur spectrum edges for aspect ratio `Q = L/N`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MpBounds {
    pub q_ratio: f64,
    pub lambda_minus: f64,
    pub lambda_plus: f64,
}

pub fn mp_bounds(n: usize, l: usize) -> Result<MpBounds> {
    if n == 0 || l <= n {
        return Err(config_err!("Marchenko-Pastur bounds need L > N, got N={n}, L={l}"));
    }
    Ok(mp_bounds_for_ratio(l as f64 / n as f64))
}

pub fn mp_bounds_for_ratio(q_ratio: f64) -> MpBounds {
    let inv = 1.0 / q_ratio;
    MpBounds {
        q_ratio,
        lambda_minus: 1.0 + inv - 2.0 * inv.sqrt(),
        lambda_plus: 1.0 + inv + 2.0 * inv.sqrt(),
    }
}

/// `P(λ) = Q/(2π) · sqrt((λ+ − λ)(λ − λ−)) / λ` inside the band, 0 outside.
pub fn mp_density(lambda: f64, bounds: &MpBounds) -> f64 {
    if lambda <= bounds.lambda_minus || lambda >= bounds.lambda_plus {
        return 0.0;
    }
    bounds.q_ratio / (2.0 * PI) * ((bounds.lambda_plus - lambda) * (lambda - bounds.lambda_minus)).sqrt() / lambda
}

/// Eigenvalues in ascending order with matching orthonormal eigenvectors
/// stored as matrix columns.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DMatrix<f64>,
}

impl EigenSystem {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> nalgebra::DVectorView<'_, f64> {
        self.eigenvectors.column(k)
    }
}

/// Symmetric eigendecomposition with a deterministic sign convention: in
/// every eigenvector the first component of largest magnitude is positive.
pub fn eig_sym(matrix: &DMatrix<f64>) -> Result<EigenSystem> {
    let n = matrix.nrows();
    if matrix.ncols() != n {
        return Err(data_err!("matrix is {}x{}, expected square", n, matrix.ncols()));
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("matrix has non-finite entries".into()));
    }
    for i in 0..n {
        for j in 0..i {
            if (matrix[(i, j)] - matrix[(j, i)]).abs() > 1e-10 {
                return Err(data_err!("matrix not symmetric at ({i}, {j})"));
            }
        }
    }
    let eig = SymmetricEigen::new(matrix.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = eig.eigenvectors.column(src).into_owned();
        let top = col.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let pivot = col.iter().position(|v| v.abs() >= top - 1e-12).expect("non-empty eigenvector");
        if col[pivot] < 0.0 {
            col.neg_mut();
        }
        eigenvectors.set_column(dst, &col);
    }
    Ok(EigenSystem { eigenvalues, eigenvectors })
}

/// Split eigen indices into those inside `[λ−, λ+]` and those outside.
pub fn classify_eigenvalues(es: &EigenSystem, bounds: &MpBounds) -> (Vec<usize>, Vec<usize>) {
    (0..es.n()).partition(|&k| {
        let l = es.eigenvalues[k];
        l >= bounds.lambda_minus && l <= bounds.lambda_plus
    })
}

/// Inverse participation ratio `I_k = Σ_l (u_k^l)^4` of every eigenvector.
pub fn ipr(es: &EigenSystem) -> Vec<f64> {
    es.eigenvectors
        .column_iter()
        .map(|u| u.iter().map(|x| x.powi(4)).sum())
        .collect()
}

/// `1 / I_k`, roughly the number of components that matter.
pub fn participation_ratio(es: &EigenSystem) -> Vec<f64> {
    ipr(es).into_iter().map(|i| 1.0 / i).collect()
}

/// Group-membership projection `P_li = 1/N_l` if asset `i` is in group `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct SectorProjection {
    /// Group of each asset, `1..=G`.
    pub membership: Vec<usize>,
    /// `N_l` for `l = 1..=G` (index `l - 1`).
    pub sizes: Vec<usize>,
}

impl SectorProjection {
    pub fn new(membership: Vec<usize>) -> Result<Self> {
        let g = validate_groups(&membership, membership.len())?;
        let mut sizes = vec![0; g];
        for &l in &membership {
            sizes[l - 1] += 1;
        }
        Ok(SectorProjection { membership, sizes })
    }

    pub fn n_groups(&self) -> usize {
        self.sizes.len()
    }

    /// Dense `G × N` weight matrix.
    pub fn weights(&self) -> DMatrix<f64> {
        let mut w = DMatrix::zeros(self.n_groups(), self.membership.len());
        for (i, &l) in self.membership.iter().enumerate() {
            w[(l - 1, i)] = 1.0 / self.sizes[l - 1] as f64;
        }
        w
    }
}

/// `X_k^l = Σ_i P_li (u_k^i)²` for every group `l` (returned in group order).
pub fn sector_contributions(es: &EigenSystem, proj: &SectorProjection, k: usize) -> Result<Vec<f64>> {
    if proj.membership.len() != es.n() {
        return Err(data_err!("projection covers {} assets, eigensystem has {}", proj.membership.len(), es.n()));
    }
    if k >= es.n() {
        return Err(config_err!("eigen index {k} out of range 0..{}", es.n()));
    }
    let mut x = vec![0.0; proj.n_groups()];
    for (u, &l) in es.vector(k).iter().zip(&proj.membership) {
        x[l - 1] += u * u / proj.sizes[l - 1] as f64;
    }
    Ok(x)
}

/// `C − λ_N U_N U_Nᵀ`: the matrix with its largest mode removed.
pub fn deflate_market_mode(matrix: &DMatrix<f64>, es: &EigenSystem) -> DMatrix<f64> {
    let top = es.n() - 1;
    let u = es.vector(top);
    let mut out = matrix - (u * u.transpose()) * es.eigenvalues[top];
    let n = out.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Per-matrix spectral summary written by the `rmt` subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenReport {
    pub q: f64,
    pub s: usize,
    pub bounds: MpBounds,
    pub eigenvalues: Vec<f64>,
    pub ipr: Vec<f64>,
    pub pr: Vec<f64>,
    /// 1-based indices into the ascending eigenvalue list.
    pub deviating: Vec<usize>,
}

impl EigenReport {
    pub fn new(q: f64, s: usize, es: &EigenSystem, bounds: MpBounds) -> Self {
        let (_, deviating) = classify_eigenvalues(es, &bounds);
        let ipr = ipr(es);
        EigenReport {
            q,
            s,
            bounds,
            eigenvalues: es.eigenvalues.clone(),
            pr: ipr.iter().map(|i| 1.0 / i).collect(),
            ipr,
            deviating: deviating.into_iter().map(|k| k + 1).collect(),
        }
    }
}
