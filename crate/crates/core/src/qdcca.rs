//! q-dependent detrended cross-correlation.
//!
//! For a pair of series the coefficient is built in three steps:
//!
//! 1. integrate each mean-removed series into a [`Profile`];
//! 2. cut both profiles into `2·⌊l/s⌋` boxes of `s` samples (one tiling from
//!    the front, one from the back) and remove a least-squares polynomial of
//!    order `m` from every box;
//! 3. average the box covariances raised to `q/2`, keeping their sign, and
//!    normalise by the matching variance averages.
//!
//! `q < 2` emphasises boxes with small fluctuations, `q > 2` boxes with large
//! ones; `q = 2` is the ordinary DCCA coefficient.
//!
//! Box residuals and per-series fluctuation sums only depend on one series
//! and one scale, so [`corr_matrices_at_scale`] computes them once per row
//! and reuses them for every pair and every `q`.

use std::io::{Read, Write};
use std::ops::Range;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{config_err, data_err, Error, Result};
use crate::seriesio::ReturnPanel;

/// Box variances at or below this fraction of the profile's mean square are
/// treated as exactly zero (rounding noise of an exact polynomial fit).
pub const ZERO_VARIANCE_REL: f64 = 1e-24;

/// Highest supported detrending polynomial order.
pub const MAX_POLY_ORDER: usize = 5;

/// Cumulative sum of the mean-removed series.
#[derive(Clone, Debug, PartialEq)]
pub struct Profile(Vec<f64>);

impl Profile {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn mean_square(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>() / self.0.len().max(1) as f64
    }
}

pub fn profile(series: &[f64]) -> Profile {
    let mean = series.iter().sum::<f64>() / series.len().max(1) as f64;
    let mut acc = 0.0;
    Profile(
        series
            .iter()
            .map(|x| {
                acc += x - mean;
                acc
            })
            .collect(),
    )
}

/// Zero-based, half-open box ranges: `⌊l/s⌋` boxes tiled from the start,
/// then `⌊l/s⌋` boxes tiled backwards from the end.
pub fn segment_bounds(l: usize, s: usize) -> Result<Vec<Range<usize>>> {
    if s < 2 {
        return Err(config_err!("scale {s} must be at least 2"));
    }
    if s > l {
        return Err(config_err!("scale {s} exceeds series length {l}"));
    }
    let boxes = l / s;
    let forward = (0..boxes).map(|v| v * s..(v + 1) * s);
    let backward = (0..boxes).map(|v| l - (v + 1) * s..l - v * s);
    Ok(forward.chain(backward).collect())
}

/// Least-squares polynomial detrending on a fixed box length.
///
/// Holds an orthonormal basis of the degree-`order` polynomials sampled at
/// `i = 1..s`, so a residual is one projection per basis vector.
#[derive(Clone, Debug)]
pub struct PolyDetrender {
    len: usize,
    order: usize,
    basis: Vec<Vec<f64>>,
}

impl PolyDetrender {
    pub fn new(len: usize, order: usize) -> Result<Self> {
        if len < order + 2 {
            return Err(Error::Numerical(format!(
                "degenerate fit: box length {len} needs at least {} samples for order {order}",
                order + 2
            )));
        }
        // Abscissae mapped onto [-1, 1] before orthogonalization.
        let half = (len as f64 - 1.0) / 2.0;
        let t: Vec<f64> = (0..len).map(|i| (i as f64 - half) / half).collect();
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(order + 1);
        for k in 0..=order {
            let mut v: Vec<f64> = t.iter().map(|x| x.powi(k as i32)).collect();
            // Two passes of modified Gram-Schmidt.
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(b, &v);
                    v.iter_mut().zip(b).for_each(|(x, bi)| *x -= c * bi);
                }
            }
            let norm = dot(&v, &v).sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        Ok(PolyDetrender { len, order, basis })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Overwrite `out` with `window` minus its least-squares polynomial fit.
    pub fn residuals_into(&self, window: &[f64], out: &mut [f64]) {
        debug_assert_eq!(window.len(), self.len);
        out.copy_from_slice(window);
        for b in &self.basis {
            let c = dot(b, out);
            out.iter_mut().zip(b).for_each(|(x, bi)| *x -= c * bi);
        }
    }

    pub fn residuals(&self, window: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.residuals_into(window, &mut out);
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Residuals of `profile[range]` after removing an order-`m` polynomial.
pub fn detrend_residuals(profile: &Profile, range: Range<usize>, m: usize) -> Result<Vec<f64>> {
    if range.end > profile.len() || range.start >= range.end {
        return Err(config_err!("box {range:?} outside profile of length {}", profile.len()));
    }
    let det = PolyDetrender::new(range.len(), m)?;
    Ok(det.residuals(&profile.values()[range]))
}

/// Box covariance `(1/s) Σ X_i Y_i`; negative values are meaningful.
pub fn box_cov(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    dot(x, y) / x.len() as f64
}

/// All detrended boxes of one series at one scale.
#[derive(Clone, Debug)]
pub struct ScaleResiduals {
    scale: usize,
    residuals: Vec<f64>,
    /// `f²_ZZ` per box; exactly zero for boxes below the zero-variance cutoff.
    variances: Vec<f64>,
}

impl ScaleResiduals {
    pub fn new(series: &[f64], det: &PolyDetrender) -> Result<Self> {
        let prof = profile(series);
        let s = det.len();
        let ranges = segment_bounds(series.len(), s)?;
        let cutoff = ZERO_VARIANCE_REL * prof.mean_square();
        let mut residuals = vec![0.0; ranges.len() * s];
        let mut variances = Vec::with_capacity(ranges.len());
        for (chunk, r) in residuals.chunks_exact_mut(s).zip(ranges) {
            det.residuals_into(&prof.values()[r], chunk);
            let var = box_cov(chunk, chunk);
            if var <= cutoff {
                chunk.fill(0.0);
                variances.push(0.0);
            } else {
                variances.push(var);
            }
        }
        Ok(ScaleResiduals { scale: s, residuals, variances })
    }

    pub fn scale(&self) -> usize {
        self.scale
    }

    pub fn n_boxes(&self) -> usize {
        self.variances.len()
    }

    pub fn box_variances(&self) -> &[f64] {
        &self.variances
    }

    /// True when every box has zero detrended variance.
    pub fn is_degenerate(&self) -> bool {
        self.variances.iter().all(|&v| v == 0.0)
    }

    /// `f²_XY` for every box, in box order.
    pub fn cross_covariances(&self, other: &ScaleResiduals) -> Vec<f64> {
        debug_assert_eq!(self.scale, other.scale);
        self.residuals
            .chunks_exact(self.scale)
            .zip(other.residuals.chunks_exact(self.scale))
            .map(|(x, y)| box_cov(x, y))
            .collect()
    }

    /// `F^q_ZZ = (1/2M_s) Σ_v (f²_ZZ)^{q/2}`.
    pub fn fluctuation(&self, q: f64) -> f64 {
        signed_power_mean(&self.variances, q)
    }
}

/// `(1/n) Σ sgn(c)|c|^{q/2}` with `0^{q/2} = 0`.
pub fn signed_power_mean(values: &[f64], q: f64) -> f64 {
    let h = q / 2.0;
    let sum: f64 = values.iter().map(|&c| power_term(log_abs(c), h)).sum();
    sum / values.len() as f64
}

/// `(sgn c, ln|c|)`; the sign is 0 for `c == 0`.
fn log_abs(c: f64) -> (f64, f64) {
    if c == 0.0 {
        (0.0, 0.0)
    } else {
        (c.signum(), c.abs().ln())
    }
}

// Both the pairwise and the matrix path go through here so that identical
// rows produce bit-identical numerator and denominator terms.
fn power_term((sign, ln): (f64, f64), h: f64) -> f64 {
    if sign == 0.0 {
        0.0
    } else {
        sign * (h * ln).exp()
    }
}

/// The three order-`q` fluctuation functions of a pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fluctuations {
    pub xy: f64,
    pub xx: f64,
    pub yy: f64,
}

impl Fluctuations {
    /// `F_XY / sqrt(F_XX F_YY)`, clamped to [-1, 1] against rounding.
    pub fn rho(&self) -> Option<f64> {
        let denom = (self.xx * self.yy).sqrt();
        (denom > 0.0).then(|| (self.xy / denom).clamp(-1.0, 1.0))
    }
}

fn check_q(q: f64) -> Result<()> {
    if !(q.is_finite() && q > 0.0) {
        return Err(config_err!("multifractal order q must be positive, got {q}"));
    }
    Ok(())
}

pub fn fluctuation_q(xs: &[f64], ys: &[f64], q: f64, s: usize, m: usize) -> Result<Fluctuations> {
    check_q(q)?;
    if xs.len() != ys.len() {
        return Err(data_err!("series lengths differ: {} vs {}", xs.len(), ys.len()));
    }
    let det = PolyDetrender::new(s, m)?;
    let x = ScaleResiduals::new(xs, &det)?;
    let y = ScaleResiduals::new(ys, &det)?;
    Ok(Fluctuations {
        xy: signed_power_mean(&x.cross_covariances(&y), q),
        xx: x.fluctuation(q),
        yy: y.fluctuation(q),
    })
}

/// The q-dependent detrended cross-correlation coefficient `ρ(q, s)`.
pub fn rho_q(xs: &[f64], ys: &[f64], q: f64, s: usize, m: usize) -> Result<f64> {
    let f = fluctuation_q(xs, ys, q, s, m)?;
    if f.xx == 0.0 {
        return Err(Error::DegenerateSeries("first series has zero detrended variance".into()));
    }
    if f.yy == 0.0 {
        return Err(Error::DegenerateSeries("second series has zero detrended variance".into()));
    }
    Ok(f.rho().expect("positive denominator"))
}

/// Orders and scales of a (q, s) grid plus the detrending order.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct DetrendConfig {
    pub poly_order: usize,
    pub min_scale: usize,
    pub max_scale: usize,
    pub scale_step: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub q_step: f64,
}

impl Default for DetrendConfig {
    fn default() -> Self {
        DetrendConfig {
            poly_order: 2,
            min_scale: 30,
            max_scale: 1000,
            scale_step: 40,
            q_min: 0.2,
            q_max: 5.0,
            q_step: 0.2,
        }
    }
}

/// Round grid values so that `0.2 + 2*0.2` prints as `0.6`.
pub fn grid_value(x: f64) -> f64 {
    (x * 1e10).round() / 1e10
}

impl DetrendConfig {
    pub fn single(q: f64, s: usize, poly_order: usize) -> Self {
        DetrendConfig {
            poly_order,
            min_scale: s,
            max_scale: s,
            scale_step: 1,
            q_min: q,
            q_max: q,
            q_step: 1.0,
        }
    }

    /// Scales `min_scale, min_scale + step, ...` up to and including `max_scale`.
    pub fn scales(&self) -> Vec<usize> {
        (self.min_scale..=self.max_scale).step_by(self.scale_step.max(1)).collect()
    }

    pub fn qs(&self) -> Vec<f64> {
        if self.q_max <= self.q_min || self.q_step <= 0.0 {
            return vec![grid_value(self.q_min)];
        }
        let count = ((self.q_max - self.q_min) / self.q_step + 1e-9).floor() as usize;
        (0..=count).map(|k| grid_value(self.q_min + k as f64 * self.q_step)).collect()
    }

    /// Check the grid against a series length `l`.
    pub fn validate(&self, l: usize) -> Result<()> {
        if !(1..=MAX_POLY_ORDER).contains(&self.poly_order) {
            return Err(config_err!("poly order {} outside 1..={MAX_POLY_ORDER}", self.poly_order));
        }
        if self.scale_step == 0 || self.min_scale > self.max_scale {
            return Err(config_err!("invalid scale range {}..={} step {}", self.min_scale, self.max_scale, self.scale_step));
        }
        if self.min_scale < self.poly_order + 2 {
            return Err(config_err!(
                "min scale {} must be at least poly order + 2 = {}",
                self.min_scale,
                self.poly_order + 2
            ));
        }
        let top = *self.scales().last().expect("non-empty scale range");
        if 4 * top > l {
            return Err(config_err!("scale {top} leaves fewer than 4 boxes per end in a series of length {l}"));
        }
        if !(self.q_min.is_finite() && self.q_min > 0.0) {
            return Err(config_err!("q values must be positive, got q_min = {}", self.q_min));
        }
        if !self.q_max.is_finite() || !self.q_step.is_finite() || self.q_max < self.q_min || (self.q_max > self.q_min && self.q_step <= 0.0) {
            return Err(config_err!("invalid q range {}..={} step {}", self.q_min, self.q_max, self.q_step));
        }
        Ok(())
    }
}

/// `ρ(q, s)` for every pair of assets.
#[derive(Clone, Debug, PartialEq)]
pub struct QCorrMatrix {
    pub q: f64,
    pub s: usize,
    pub poly_order: usize,
    pub tickers: Vec<String>,
    pub rho: DMatrix<f64>,
}

impl QCorrMatrix {
    /// Wrap a matrix, checking symmetry, unit diagonal and the [-1, 1] bound.
    pub fn new(q: f64, s: usize, poly_order: usize, tickers: Vec<String>, rho: DMatrix<f64>) -> Result<Self> {
        let m = QCorrMatrix { q, s, poly_order, tickers, rho };
        m.check()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.rho.nrows()
    }

    pub fn check(&self) -> Result<()> {
        let n = self.rho.nrows();
        if self.rho.ncols() != n || self.tickers.len() != n {
            return Err(data_err!("matrix is {}x{} with {} labels", n, self.rho.ncols(), self.tickers.len()));
        }
        for i in 0..n {
            if self.rho[(i, i)] != 1.0 {
                return Err(data_err!("diagonal entry {i} is {}, expected 1", self.rho[(i, i)]));
            }
            for j in 0..i {
                let (a, b) = (self.rho[(i, j)], self.rho[(j, i)]);
                if (a - b).abs() > 1e-12 {
                    return Err(data_err!("matrix not symmetric at ({i}, {j})"));
                }
                if !(-1.0..=1.0).contains(&a) {
                    return Err(data_err!("entry ({i}, {j}) = {a} outside [-1, 1]"));
                }
            }
        }
        Ok(())
    }

    /// Strictly-upper-triangle entries in row-major order.
    pub fn upper_triangle(&self) -> Vec<f64> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.rho[(i, j)]);
            }
        }
        out
    }

    /// CSV with a `ticker` header cell, ticker header row and ticker first column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(writer);
        let mut header = vec!["ticker".to_string()];
        header.extend(self.tickers.iter().cloned());
        wtr.write_record(&header)?;
        for (i, t) in self.tickers.iter().enumerate() {
            let mut rec = vec![t.clone()];
            rec.extend(self.rho.row(i).iter().map(|v| v.to_string()));
            wtr.write_record(&rec)?;
        }
        wtr.flush().map_err(|e| Error::io("<matrix csv>", e))?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R, q: f64, s: usize, poly_order: usize) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let tickers: Vec<String> = rdr.headers()?.iter().skip(1).map(str::to_string).collect();
        let n = tickers.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != n + 1 || i >= n || rec[0] != tickers[i] {
                return Err(data_err!("malformed matrix row {}", i + 1));
            }
            for cell in rec.iter().skip(1) {
                data.push(cell.parse::<f64>().map_err(|_| data_err!("bad matrix entry `{cell}`"))?);
            }
        }
        if data.len() != n * n {
            return Err(data_err!("matrix has {} entries, expected {}", data.len(), n * n));
        }
        QCorrMatrix::new(q, s, poly_order, tickers, DMatrix::from_row_slice(n, n, &data))
    }
}

/// Matrices for every `q` in `qs` at one scale.
///
/// Residuals and `F^q_ZZ` are computed once per row; entry `(i, j)` is
/// reduced over boxes in fixed order, so output does not depend on thread
/// scheduling.
pub fn corr_matrices_at_scale(panel: &ReturnPanel, qs: &[f64], s: usize, poly_order: usize) -> Result<Vec<QCorrMatrix>> {
    for &q in qs {
        check_q(q)?;
    }
    let l = panel.len();
    if 4 * s > l {
        return Err(config_err!("scale {s} leaves fewer than 4 boxes per end in a series of length {l}"));
    }
    let det = PolyDetrender::new(s, poly_order)?;
    let residuals: Vec<ScaleResiduals> = panel
        .returns
        .par_iter()
        .map(|row| ScaleResiduals::new(row, &det))
        .collect::<Result<_>>()?;
    if let Some(i) = residuals.iter().position(ScaleResiduals::is_degenerate) {
        return Err(Error::DegenerateSeries(format!(
            "{} has zero detrended variance at s={s}",
            panel.tickers[i]
        )));
    }
    let n = panel.n_assets();
    let nq = qs.len();
    let halves: Vec<f64> = qs.iter().map(|q| q / 2.0).collect();
    // fzz[i * nq + k] = F^{q_k}_ZZ of row i
    let fzz: Vec<f64> = residuals
        .iter()
        .flat_map(|r| qs.iter().map(move |&q| r.fluctuation(q)))
        .collect();

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut out = vec![0.0; (n - i - 1) * nq];
            let mut logs = Vec::new();
            for (jj, j) in (i + 1..n).enumerate() {
                let covs = residuals[i].cross_covariances(&residuals[j]);
                logs.clear();
                logs.extend(covs.iter().map(|&c| log_abs(c)));
                for (k, &h) in halves.iter().enumerate() {
                    let sum: f64 = logs.iter().map(|&t| power_term(t, h)).sum();
                    let f = Fluctuations {
                        xy: sum / covs.len() as f64,
                        xx: fzz[i * nq + k],
                        yy: fzz[j * nq + k],
                    };
                    out[jj * nq + k] = f.rho().expect("non-degenerate rows");
                }
            }
            out
        })
        .collect();

    qs.iter()
        .enumerate()
        .map(|(k, &q)| {
            let mut rho = DMatrix::identity(n, n);
            for (i, row) in rows.iter().enumerate() {
                for (jj, j) in (i + 1..n).enumerate() {
                    let v = row[jj * nq + k];
                    rho[(i, j)] = v;
                    rho[(j, i)] = v;
                }
            }
            QCorrMatrix::new(q, s, poly_order, panel.tickers.clone(), rho)
        })
        .collect()
}

/// `ρ(q, s)` matrix of a panel at one grid point.
pub fn corr_matrix(panel: &ReturnPanel, q: f64, s: usize, config: &DetrendConfig) -> Result<QCorrMatrix> {
    Ok(corr_matrices_at_scale(panel, &[q], s, config.poly_order)?.remove(0))
}

/// Moments of the strictly-upper-triangle entries (population convention).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MatrixMoments {
    pub mean: f64,
    pub variance: f64,
    /// `None` when the variance is zero.
    pub skewness: Option<f64>,
    /// Raw (non-excess) fourth standardized moment; `None` when the variance is zero.
    pub kurtosis: Option<f64>,
}

pub fn moments(values: &[f64]) -> MatrixMoments {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let defined = m2 > 1e-30;
    MatrixMoments {
        mean,
        variance: m2,
        skewness: defined.then(|| m3 / m2.powf(1.5)),
        kurtosis: defined.then(|| m4 / (m2 * m2)),
    }
}

pub fn matrix_moments(m: &QCorrMatrix) -> Result<MatrixMoments> {
    if m.n() < 3 {
        return Err(config_err!("moments need N >= 3, got {}", m.n()));
    }
    Ok(moments(&m.upper_triangle()))
}
