//! Centrality-based stock selection and mean-variance portfolios.
//!
//! Every node of a correlation network is ranked by five centralities, each
//! in a weighted and an unweighted version, and the ranks are folded into a
//! composite score `η ∈ [0, 2]`. Portfolios of the `m` lowest-`η`
//! (peripheral) or highest-`η` (central) stocks are then weighted by the
//! closed-form Markowitz solution with short sales allowed.

use std::collections::{BTreeMap, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Error, Result};
use crate::graph::{shortest_path_dag, WeightedAdjacency};
use crate::pmfg::PmfgGraph;
use crate::rmt::eig_sym;
use crate::seriesio::{ReturnPanel, Seed};

/// Relative tolerance under which two centrality values share a rank.
pub const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TieRule {
    /// Tied values share the mean of the ranks they span.
    #[default]
    Average,
    /// Tied values all take the lowest rank they span.
    Min,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Metric {
    Degree,
    Betweenness,
    Eccentricity,
    Closeness,
    Eigenvector,
}

impl Metric {
    pub const ALL: [Metric; 5] = [Metric::Degree, Metric::Betweenness, Metric::Eccentricity, Metric::Closeness, Metric::Eigenvector];
}

/// One centrality in one flavour.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRanks {
    pub metric: Metric,
    pub weighted: bool,
    pub values: Vec<f64>,
    /// 1..=N, N most central.
    pub ranks: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralityScores {
    pub metrics: Vec<MetricRanks>,
    pub eta: Vec<f64>,
}

impl CentralityScores {
    pub fn ranks(&self, metric: Metric, weighted: bool) -> &[f64] {
        &self
            .metrics
            .iter()
            .find(|r| r.metric == metric && r.weighted == weighted)
            .expect("every metric is scored")
            .ranks
    }
}

/// Ascending ranks `1..=N`; values within [`TIE_TOLERANCE`] of the first
/// member of their run are tied.
pub fn rank_values(values: &[f64], rule: TieRule) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let head = values[order[start]];
        let mut end = start + 1;
        while end < n && values[order[end]] - head <= TIE_TOLERANCE * head.abs().max(values[order[end]].abs()).max(1.0) {
            end += 1;
        }
        let r = match rule {
            TieRule::Average => (start + end + 1) as f64 / 2.0,
            TieRule::Min => (start + 1) as f64,
        };
        for &i in &order[start..end] {
            ranks[i] = r;
        }
        start = end;
    }
    ranks
}

/// Brandes betweenness for an undirected graph, each pair counted once.
pub fn betweenness(adj: &WeightedAdjacency) -> Vec<f64> {
    let n = adj.len();
    let mut bc = vec![0.0; n];
    let mut delta = vec![0.0; n];
    for s in 0..n {
        let dag = shortest_path_dag(adj, s);
        delta.iter_mut().for_each(|d| *d = 0.0);
        for &w in dag.order.iter().rev() {
            for &v in &dag.preds[w] {
                delta[v] += dag.sigma[v] / dag.sigma[w] * (1.0 + delta[w]);
            }
            if w != s {
                bc[w] += delta[w];
            }
        }
    }
    bc.iter().map(|b| b / 2.0).collect()
}

/// Closeness `(N − 1) / Σ d` and eccentricity `max d` of every node.
fn distance_scores(adj: &WeightedAdjacency) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = adj.len();
    let mut closeness = Vec::with_capacity(n);
    let mut ecc = Vec::with_capacity(n);
    for v in 0..n {
        let dist = shortest_path_dag(adj, v).dist;
        if dist.iter().any(|d| d.is_infinite()) {
            return Err(Error::Numerical("centrality needs a connected graph".into()));
        }
        let total: f64 = dist.iter().sum();
        closeness.push(if total > 0.0 { (n - 1) as f64 / total } else { 0.0 });
        ecc.push(dist.iter().fold(0.0f64, |m, &d| m.max(d)));
    }
    Ok((closeness, ecc))
}

/// Absolute Perron vector of a non-negative symmetric matrix.
fn eigenvector_scores(adj: &WeightedAdjacency) -> Result<Vec<f64>> {
    let n = adj.len();
    let mut a = DMatrix::zeros(n, n);
    for (v, nb) in adj.iter().enumerate() {
        for &(w, x) in nb {
            a[(v, w)] = x;
        }
    }
    let es = eig_sym(&a)?;
    Ok(es.vector(n - 1).iter().map(|x| x.abs()).collect())
}

fn metric_values(adj: &WeightedAdjacency, dist_adj: &WeightedAdjacency, eig_adj: &WeightedAdjacency) -> Result<Vec<(Metric, Vec<f64>)>> {
    let degree = adj.iter().map(|nb| nb.iter().map(|e| e.1).sum()).collect();
    let (closeness, ecc) = distance_scores(dist_adj)?;
    Ok(vec![
        (Metric::Degree, degree),
        (Metric::Betweenness, betweenness(dist_adj)),
        (Metric::Eccentricity, ecc),
        (Metric::Closeness, closeness),
        (Metric::Eigenvector, eigenvector_scores(eig_adj)?),
    ])
}

/// Composite centrality
/// `η = (ΣR_D + ΣR_BC − 4) / (4(N − 1)) + (ΣR_E + ΣR_C + ΣR_EC − 6) / (6(N − 1))`,
/// each sum running over the weighted and unweighted rank.
///
/// Weighted degree sums `ρ`; weighted path metrics use `√(2(1 − ρ))`;
/// weighted eigenvector centrality uses `(1 + ρ) / 2`.
pub fn centrality_eta(pmfg: &PmfgGraph, rule: TieRule) -> Result<CentralityScores> {
    let n = pmfg.n();
    if n < 2 {
        return Err(config_err!("centrality needs at least 2 nodes"));
    }
    let g = pmfg.graph();
    let unit = g.unit_adjacency();
    let weights = pmfg.weight_adjacency();
    let shifted: WeightedAdjacency = weights.iter().map(|nb| nb.iter().map(|&(w, r)| (w, (1.0 + r) / 2.0)).collect()).collect();
    let mut metrics = Vec::with_capacity(10);
    for (weighted, values) in [(true, metric_values(&weights, &pmfg.distance_adjacency(), &shifted)?), (false, metric_values(&unit, &unit, &unit)?)] {
        for (metric, values) in values {
            let key: Vec<f64> = match metric {
                Metric::Eccentricity => values.iter().map(|v| -v).collect(),
                _ => values.clone(),
            };
            metrics.push(MetricRanks { metric, weighted, ranks: rank_values(&key, rule), values });
        }
    }
    let nm1 = (n - 1) as f64;
    let eta = (0..n)
        .map(|i| {
            let sum = |ms: &[Metric]| -> f64 { metrics.iter().filter(|r| ms.contains(&r.metric)).map(|r| r.ranks[i]).sum() };
            (sum(&[Metric::Degree, Metric::Betweenness]) - 4.0) / (4.0 * nm1)
                + (sum(&[Metric::Eccentricity, Metric::Closeness, Metric::Eigenvector]) - 6.0) / (6.0 * nm1)
        })
        .collect();
    Ok(CentralityScores { metrics, eta })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Peripheral,
    Central,
    Random,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Peripheral => "peripheral",
            Mode::Central => "central",
            Mode::Random => "random",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "peripheral" => Ok(Mode::Peripheral),
            "central" => Ok(Mode::Central),
            "random" => Ok(Mode::Random),
            other => Err(config_err!("unknown portfolio mode `{other}`")),
        }
    }
}

/// `m` node indices, sorted ascending. Equal `η` is broken by node index.
pub fn select_portfolio(eta: &[f64], m: usize, mode: Mode, seed: Seed) -> Result<Vec<usize>> {
    let n = eta.len();
    if m > n {
        return Err(config_err!("portfolio size {m} exceeds {n} assets"));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let mut members: Vec<usize> = match mode {
        Mode::Peripheral => {
            order.sort_by(|&a, &b| eta[a].total_cmp(&eta[b]).then(a.cmp(&b)));
            order.truncate(m);
            order
        }
        Mode::Central => {
            order.sort_by(|&a, &b| eta[b].total_cmp(&eta[a]).then(a.cmp(&b)));
            order.truncate(m);
            order
        }
        Mode::Random => sample(&mut seed.rng(0), n, m).into_vec(),
    };
    members.sort_unstable();
    Ok(members)
}

/// Mean-variance problem `min ωᵀΣω − τ Rᵀω` s.t. `1ᵀω = 1`, pre-solved so
/// that every `τ` costs one vector operation.
///
/// With `a = 1ᵀΣ⁻¹1`, `b = 1ᵀΣ⁻¹R`, `c = RᵀΣ⁻¹R` and `d = c − b²/a`:
/// `ω(τ) = Σ⁻¹1/a + (τ/2)(Σ⁻¹R − (b/a)Σ⁻¹1)`, variance `1/a + τ²d/4`,
/// expected return `b/a + τd/2`.
#[derive(Clone, Debug)]
pub struct MeanVariance {
    pub cov: DMatrix<f64>,
    pub mean: DVector<f64>,
    min_var: DVector<f64>,
    tilt: DVector<f64>,
    a: f64,
    spread: f64,
}

impl MeanVariance {
    pub fn new(cov: DMatrix<f64>, mean: DVector<f64>, labels: &[String]) -> Result<Self> {
        let m = cov.nrows();
        if m < 2 || cov.ncols() != m || mean.len() != m || labels.len() != m {
            return Err(config_err!("mean-variance problem needs a square covariance of size >= 2 matching the mean vector"));
        }
        check_conditioning(&cov, labels)?;
        let chol = cov.clone().cholesky().ok_or_else(|| Error::DegenerateCovariance("covariance is not positive definite".into()))?;
        let inv_one = chol.solve(&DVector::from_element(m, 1.0));
        let inv_mean = chol.solve(&mean);
        let a = inv_one.sum();
        let b = inv_mean.sum();
        let c = mean.dot(&inv_mean);
        let min_var = &inv_one / a;
        let tilt = (&inv_mean - &inv_one * (b / a)) * 0.5;
        Ok(MeanVariance { cov, mean, min_var, tilt, a, spread: (c - b * b / a).max(0.0) })
    }

    pub fn weights(&self, tau: f64) -> DVector<f64> {
        &self.min_var + &self.tilt * tau
    }

    pub fn min_risk(&self) -> f64 {
        1.0 / self.a
    }

    pub fn risk(&self, w: &DVector<f64>) -> f64 {
        w.dot(&(&self.cov * w))
    }

    /// Expected return gained per unit `τ / 2`; zero when all assets share
    /// one risk-adjusted mean and the frontier collapses to a point.
    pub fn spread(&self) -> f64 {
        self.spread
    }

    /// The `τ ≥ 0` whose portfolio has variance `risk`.
    pub fn tau_for_risk(&self, risk: f64) -> Result<f64> {
        let floor = self.min_risk();
        if risk < floor * (1.0 - 1e-9) {
            return Err(config_err!("risk level {risk:e} is below the minimum variance {floor:e}"));
        }
        if self.spread <= 1e-15 * self.mean.dot(&self.mean).max(f64::MIN_POSITIVE) * self.a {
            return Ok(0.0);
        }
        Ok(2.0 * ((risk - floor).max(0.0) / self.spread).sqrt())
    }
}

/// Population covariance, mean and column sum of every row over `window`.
fn window_moments(panel: &ReturnPanel, window: std::ops::Range<usize>) -> (DMatrix<f64>, DVector<f64>, DVector<f64>) {
    let n = panel.n_assets();
    let len = window.len() as f64;
    let sum = DVector::from_iterator(n, panel.returns.iter().map(|r| r[window.clone()].iter().sum::<f64>()));
    let mean = &sum / len;
    let centered = DMatrix::from_fn(n, window.len(), |i, t| panel.returns[i][window.start + t] - mean[i]);
    let mut cov = (&centered * centered.transpose()) / len;
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (cov[(i, j)] + cov[(j, i)]);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }
    (cov, mean, sum)
}

/// Reject covariances whose condition number exceeds `1e12`, naming the
/// near-null direction.
fn check_conditioning(cov: &DMatrix<f64>, labels: &[String]) -> Result<()> {
    let es = eig_sym(cov)?;
    let (lo, hi) = (es.eigenvalues[0], es.eigenvalues[es.n() - 1]);
    if hi > 0.0 && lo > 1e-12 * hi {
        return Ok(());
    }
    let u = es.vector(0);
    let mut comps: Vec<usize> = (0..u.len()).collect();
    comps.sort_by(|&a, &b| u[b].abs().total_cmp(&u[a].abs()).then(a.cmp(&b)));
    let direction: Vec<String> = comps.iter().take(4).filter(|&&k| u[k].abs() > 1e-6).map(|&k| format!("{:+.3}*{}", u[k], labels[k])).collect();
    Err(Error::DegenerateCovariance(format!("eigenvalue {lo:e} vs {hi:e}, near-null direction {}", direction.join(" "))))
}

/// Markowitz weights for one risk tolerance.
pub fn markowitz_weights(cov: &DMatrix<f64>, expret: &DVector<f64>, tau: f64) -> Result<DVector<f64>> {
    let labels: Vec<String> = (0..cov.nrows()).map(|k| format!("asset{k}")).collect();
    Ok(MeanVariance::new(cov.clone(), expret.clone(), &labels)?.weights(tau))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrontierPoint {
    pub tau: f64,
    /// `Ω² = ωᵀΣω`.
    pub risk: f64,
    /// `Φ = Σ_t Σ_i ω_i r_i(t)`.
    pub ret: f64,
}

/// Which dates estimate the model and which evaluate it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub enum Evaluation {
    #[default]
    InSample,
    /// Fit on the leading fraction of dates, evaluate on the rest.
    TrainTest { train_fraction: f64 },
}

impl Evaluation {
    fn windows(self, len: usize) -> Result<(std::ops::Range<usize>, std::ops::Range<usize>)> {
        match self {
            Evaluation::InSample => Ok((0..len, 0..len)),
            Evaluation::TrainTest { train_fraction } => {
                let cut = (len as f64 * train_fraction).round() as usize;
                if !(0.0..1.0).contains(&train_fraction) || cut < 2 || len - cut < 2 {
                    return Err(config_err!("train fraction {train_fraction} leaves fewer than 2 dates on one side"));
                }
                Ok((0..cut, cut..len))
            }
        }
    }
}

/// Moments of a whole panel, from which any subset's problem is sliced.
#[derive(Clone, Debug)]
pub struct Universe {
    pub tickers: Vec<String>,
    fit_cov: DMatrix<f64>,
    fit_mean: DVector<f64>,
    eval_cov: DMatrix<f64>,
    eval_sum: DVector<f64>,
}

impl Universe {
    pub fn new(panel: &ReturnPanel, evaluation: Evaluation) -> Result<Self> {
        let (fit, eval) = evaluation.windows(panel.len())?;
        let (fit_cov, fit_mean, fit_sum) = window_moments(panel, fit.clone());
        let (eval_cov, eval_sum) = if eval == fit { (fit_cov.clone(), fit_sum) } else {
            let (c, _, s) = window_moments(panel, eval);
            (c, s)
        };
        Ok(Universe { tickers: panel.tickers.clone(), fit_cov, fit_mean, eval_cov, eval_sum })
    }

    pub fn n(&self) -> usize {
        self.tickers.len()
    }

    pub fn evaluator(&self, members: &[usize]) -> Result<Evaluator> {
        if let Some(&i) = members.iter().find(|&&i| i >= self.n()) {
            return Err(config_err!("asset index {i} out of range"));
        }
        let m = members.len();
        let sub = |c: &DMatrix<f64>| DMatrix::from_fn(m, m, |a, b| c[(members[a], members[b])]);
        let pick = |v: &DVector<f64>| DVector::from_iterator(m, members.iter().map(|&i| v[i]));
        let labels: Vec<String> = members.iter().map(|&i| self.tickers[i].clone()).collect();
        Ok(Evaluator {
            model: MeanVariance::new(sub(&self.fit_cov), pick(&self.fit_mean), &labels)?,
            eval_cov: sub(&self.eval_cov),
            eval_sum: pick(&self.eval_sum),
        })
    }
}

/// A fitted portfolio universe that can be evaluated at any `τ`.
#[derive(Clone, Debug)]
pub struct Evaluator {
    pub model: MeanVariance,
    eval_cov: DMatrix<f64>,
    eval_sum: DVector<f64>,
}

impl Evaluator {
    pub fn point(&self, tau: f64) -> FrontierPoint {
        let w = self.model.weights(tau);
        FrontierPoint { tau, risk: w.dot(&(&self.eval_cov * &w)), ret: w.dot(&self.eval_sum) }
    }

    /// Frontier return at the fitted model's variance `risk`.
    pub fn return_at_risk(&self, risk: f64) -> Result<f64> {
        Ok(self.point(self.model.tau_for_risk(risk)?).ret)
    }
}

fn check_taus(taus: &[f64]) -> Result<()> {
    match taus.iter().find(|t| !(**t >= 0.0)) {
        Some(t) => Err(config_err!("risk tolerance must be >= 0, got {t}")),
        None => Ok(()),
    }
}

fn sort_by_risk(points: &mut [FrontierPoint]) {
    points.sort_by(|a, b| a.risk.total_cmp(&b.risk).then(a.tau.total_cmp(&b.tau)));
}

/// Frontier points for every `τ`, sorted by risk.
pub fn frontier(universe: &Universe, members: &[usize], taus: &[f64]) -> Result<Vec<FrontierPoint>> {
    check_taus(taus)?;
    let ev = universe.evaluator(members)?;
    let mut points: Vec<FrontierPoint> = taus.iter().map(|&t| ev.point(t)).collect();
    sort_by_risk(&mut points);
    Ok(points)
}

/// Pointwise mean of the frontiers of `draws` random `m`-subsets.
pub fn random_frontier(universe: &Universe, m: usize, taus: &[f64], draws: usize, seed: Seed) -> Result<Vec<FrontierPoint>> {
    check_taus(taus)?;
    if draws == 0 {
        return Err(config_err!("random frontier needs at least one draw"));
    }
    let n = universe.n();
    let mut acc: Vec<FrontierPoint> = taus.iter().map(|&tau| FrontierPoint { tau, risk: 0.0, ret: 0.0 }).collect();
    for d in 0..draws {
        let members = select_portfolio(&vec![0.0; n], m, Mode::Random, seed.derive(d as u64))?;
        let ev = universe.evaluator(&members)?;
        for p in acc.iter_mut() {
            let f = ev.point(p.tau);
            p.risk += f.risk / draws as f64;
            p.ret += f.ret / draws as f64;
        }
    }
    sort_by_risk(&mut acc);
    Ok(acc)
}

/// `η` for one network of the `(q, s)` grid.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkScores {
    pub q: f64,
    pub s: usize,
    pub eta: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaPoint {
    pub q: f64,
    /// Mean over `s` of the peripheral return at the risk level.
    pub peripheral: f64,
    pub central: f64,
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaCurve {
    pub risk_level: f64,
    pub points: Vec<DeltaPoint>,
}

/// `Δ(q) = Φ_peripheral − Φ_central` at one fixed risk level, each return
/// averaged over every scale available for `q`.
///
/// Without an explicit level, the largest minimum-variance risk over all
/// selected portfolios, plus 10%, is used so that every point is feasible.
pub fn delta_curve(universe: &Universe, nets: &[NetworkScores], m: usize, risk_level: Option<f64>) -> Result<DeltaCurve> {
    let mut models: HashMap<Vec<usize>, Evaluator> = HashMap::new();
    let mut chosen = Vec::with_capacity(nets.len());
    for net in nets {
        let p = select_portfolio(&net.eta, m, Mode::Peripheral, Seed(0))?;
        let c = select_portfolio(&net.eta, m, Mode::Central, Seed(0))?;
        for members in [&p, &c] {
            if !models.contains_key(members) {
                models.insert(members.clone(), universe.evaluator(members)?);
            }
        }
        chosen.push((net, p, c));
    }
    let floor = models.values().map(|e| e.model.min_risk()).fold(0.0f64, f64::max);
    let level = risk_level.unwrap_or(1.1 * floor);
    let mut by_q: BTreeMap<u64, (f64, f64, f64, usize)> = BTreeMap::new();
    for (net, p, c) in &chosen {
        let at = |members: &Vec<usize>| {
            models[members]
                .return_at_risk(level)
                .map_err(|e| config_err!("at q={}, s={}: {e}", net.q, net.s))
        };
        let (rp, rc) = (at(p)?, at(c)?);
        let entry = by_q.entry(order_key(net.q)).or_insert((net.q, 0.0, 0.0, 0));
        entry.1 += rp;
        entry.2 += rc;
        entry.3 += 1;
    }
    let points = by_q
        .into_values()
        .map(|(q, sp, sc, k)| {
            let (peripheral, central) = (sp / k as f64, sc / k as f64);
            DeltaPoint { q, peripheral, central, delta: peripheral - central }
        })
        .collect();
    Ok(DeltaCurve { risk_level: level, points })
}

/// Monotone map from finite `f64` to `u64`, for ordered keys.
fn order_key(x: f64) -> u64 {
    let b = x.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}
