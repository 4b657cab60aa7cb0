//! End-to-end runs over a price file.
//!
//! Output layout under the run directory:
//!
//! ```text
//! grid/manifest.json            every (q, s) matrix with its content hash
//! grid/rho_q{q}_s{s}.csv|.json  matrix and sidecar
//! rmt/moments.csv               entry moments across the grid
//! rmt/eigen/q{q}_s{s}.json      spectrum, IPR, PR, deviating modes
//! rmt/spectrum/q{q}_s{s}.csv    P(λ) for original, shuffled, simulated panels
//! rmt/entries/q{q}_s{s}.csv     P(ρ) for the same three panels
//! rmt/sectors/q{q}_s{s}.csv     group contributions (needs a group map)
//! pmfg/edges/q{q}_s{s}.csv      filtered network
//! pmfg/topology.csv             C, L, γ, A across the grid
//! portfolio/frontier_m{m}.csv   frontiers per selection mode
//! portfolio/delta_m{m}.csv      peripheral minus central return per q
//! ```
//!
//! Every file is written to a temporary name and renamed into place, and
//! every random draw derives from the run seed, so identical configurations
//! give byte-identical trees.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{config_err, data_err, Error, Result};
use crate::pmfg::{build_pmfg, TopologyReport};
use crate::portfolio::{centrality_eta, delta_curve, frontier, random_frontier, select_portfolio, Evaluation, Mode, NetworkScores, TieRule, Universe};
use crate::qdcca::{corr_matrices_at_scale, grid_value, matrix_moments, DetrendConfig, QCorrMatrix};
use crate::rmt::{eig_sym, deflate_market_mode, mp_bounds, sector_contributions, EigenReport, EigenSystem, MpBounds, SectorProjection};
use crate::seriesio::{
    load_groups, log_returns, prices_from_returns, read_prices, shuffle_panel, simulate_factor_market, simulate_gaussian, write_groups, write_prices,
    FactorMarket, ReturnPanel, Seed,
};
use crate::stats::{histogram, mean, std_dev};

pub const DEFAULT_SIZES: [usize; 6] = [10, 20, 30, 40, 50, 60];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub prices: PathBuf,
    pub groups: Option<PathBuf>,
    pub detrend: DetrendConfig,
    pub out: PathBuf,
    pub seed: Seed,
    /// Worker threads; `None` uses every core.
    pub jobs: Option<usize>,
    /// Portfolio sizes; `None` means [`DEFAULT_SIZES`] capped at the panel size.
    pub sizes: Option<Vec<usize>>,
    pub modes: Vec<Mode>,
    /// Fixed `Ω²` for `Δ(q)`; `None` derives one per size.
    pub risk_level: Option<f64>,
    pub taus: Vec<f64>,
    pub evaluation: Evaluation,
    /// `Δ(q)` runs over `q_min..=max(q_max, delta_q_max)`.
    pub delta_q_max: f64,
    pub random_draws: usize,
    /// Number of leading modes reported per sector table.
    pub sector_modes: usize,
    pub spectrum_bins: (f64, f64, f64),
    pub tie_rule: TieRule,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            prices: PathBuf::from("prices.csv"),
            groups: None,
            detrend: DetrendConfig::default(),
            out: PathBuf::from("out"),
            seed: Seed(0),
            jobs: None,
            sizes: None,
            modes: vec![Mode::Peripheral, Mode::Central, Mode::Random],
            risk_level: None,
            taus: (0..=20).map(|k| grid_value(0.05 * k as f64)).collect(),
            evaluation: Evaluation::InSample,
            delta_q_max: 10.0,
            random_draws: 100,
            sector_modes: 5,
            spectrum_bins: (0.0, 2.0, 0.05),
            tie_rule: TieRule::Average,
        }
    }
}

impl RunConfig {
    fn check_paths(&self) -> Result<()> {
        for p in std::iter::once(&self.prices).chain(self.groups.as_ref()) {
            if !p.is_file() {
                return Err(config_err!("input file {} does not exist", p.display()));
            }
        }
        if self.jobs == Some(0) {
            return Err(config_err!("--jobs must be at least 1"));
        }
        Ok(())
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(j) = self.jobs {
            b = b.num_threads(j);
        }
        b.build().map_err(|e| config_err!("cannot start worker pool: {e}"))
    }
}

/// The return panel of a run and the hash of the bytes it came from.
#[derive(Clone, Debug)]
pub struct Input {
    pub panel: ReturnPanel,
    pub source_hash: String,
    pub dropped_dates: Vec<String>,
}

/// Read the input and check the grid against its length.
pub fn load_input(config: &RunConfig) -> Result<Input> {
    let input = read_input(config)?;
    config.detrend.validate(input.panel.len())?;
    Ok(input)
}

fn read_input(config: &RunConfig) -> Result<Input> {
    config.check_paths()?;
    let bytes = fs::read(&config.prices).map_err(|e| Error::io(&config.prices, e))?;
    let load = read_prices(bytes.as_slice()).map_err(|e| e.context(config.prices.display()))?;
    let mut panel = log_returns(&load.panel);
    if let Some(g) = &config.groups {
        let groups = load_groups(g, &panel.tickers)?;
        panel = panel.with_groups(groups)?;
    }
    Ok(Input { panel, source_hash: sha256_hex(&bytes), dropped_dates: load.dropped_dates })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Write `bytes` to a sibling temp file, then rename over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

fn point_name(q: f64, s: usize) -> String {
    format!("q{}_s{s}", grid_value(q))
}

/// Total order on grid points: by `q`, then `s`.
fn point_cmp(a: &(f64, usize), b: &(f64, usize)) -> std::cmp::Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn grid_points(detrend: &DetrendConfig) -> Vec<(f64, usize)> {
    let mut pts: Vec<(f64, usize)> = detrend.qs().into_iter().flat_map(|q| detrend.scales().into_iter().map(move |s| (q, s))).collect();
    pts.sort_by(point_cmp);
    pts
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridEntry {
    pub q: f64,
    pub s: usize,
    pub file: String,
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridManifest {
    pub source_hash: String,
    pub poly_order: usize,
    pub n: usize,
    pub len: usize,
    pub tickers: Vec<String>,
    pub entries: Vec<GridEntry>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    q: f64,
    s: usize,
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    len: usize,
    source_hash: &'a str,
}

#[derive(Clone, Debug)]
pub struct GridRun {
    pub manifest: GridManifest,
    /// Grid points computed in this run (the rest were reused).
    pub computed: usize,
}

fn grid_dir(out: &Path) -> PathBuf {
    out.join("grid")
}

pub fn read_manifest(out: &Path) -> Result<GridManifest> {
    let path = grid_dir(out).join("manifest.json");
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_slice(&bytes)?)
}

/// Compute every missing `ρ(q, s)` matrix of the configured grid.
pub fn cmd_grid(config: &RunConfig) -> Result<GridRun> {
    let input = load_input(config)?;
    config.pool()?.install(|| run_grid(config, &input, &config.detrend))
}

fn run_grid(config: &RunConfig, input: &Input, detrend: &DetrendConfig) -> Result<GridRun> {
    let panel = &input.panel;
    detrend.validate(panel.len())?;
    let dir = grid_dir(&config.out);
    let mut known: BTreeMap<(u64, usize), GridEntry> = BTreeMap::new();
    if let Ok(old) = read_manifest(&config.out) {
        if old.source_hash == input.source_hash && old.poly_order == detrend.poly_order && old.tickers == panel.tickers {
            for e in old.entries {
                let fresh = fs::read(dir.join(&e.file)).map(|b| sha256_hex(&b) == e.sha256).unwrap_or(false);
                if fresh {
                    known.insert((e.q.to_bits(), e.s), e);
                }
            }
        }
    }
    let qs = detrend.qs();
    let mut computed = 0;
    for s in detrend.scales() {
        let missing: Vec<f64> = qs.iter().copied().filter(|q| !known.contains_key(&(q.to_bits(), s))).collect();
        if missing.is_empty() {
            continue;
        }
        let mats = corr_matrices_at_scale(panel, &missing, s, detrend.poly_order).map_err(|e| e.context(format!("grid point s={s}")))?;
        for m in mats {
            let name = format!("rho_{}", point_name(m.q, s));
            let mut csv = Vec::new();
            m.write_csv(&mut csv)?;
            let side = Sidecar { q: m.q, s, m: detrend.poly_order, n: m.n(), len: panel.len(), source_hash: &input.source_hash };
            write_atomic(&dir.join(format!("{name}.csv")), &csv)?;
            write_atomic(&dir.join(format!("{name}.json")), &to_json(&side)?)?;
            let entry = GridEntry { q: m.q, s, file: format!("{name}.csv"), sha256: sha256_hex(&csv) };
            known.insert((m.q.to_bits(), s), entry);
            computed += 1;
        }
    }
    let mut entries: Vec<GridEntry> = known.into_values().collect();
    entries.sort_by(|a, b| point_cmp(&(a.q, a.s), &(b.q, b.s)));
    let manifest = GridManifest {
        source_hash: input.source_hash.clone(),
        poly_order: detrend.poly_order,
        n: panel.n_assets(),
        len: panel.len(),
        tickers: panel.tickers.clone(),
        entries,
    };
    write_atomic(&dir.join("manifest.json"), &to_json(&manifest)?)?;
    Ok(GridRun { manifest, computed })
}

/// Manifest of the current input, or an error if it is missing or stale.
fn current_manifest(config: &RunConfig, input: &Input) -> Result<GridManifest> {
    let m = read_manifest(&config.out).map_err(|e| e.context("no grid manifest; run `grid` first"))?;
    if m.source_hash != input.source_hash || m.tickers != input.panel.tickers {
        return Err(data_err!("grid manifest was built from different input; rerun `grid`"));
    }
    if m.poly_order != config.detrend.poly_order {
        return Err(config_err!("grid manifest uses poly order {}, config asks for {}", m.poly_order, config.detrend.poly_order));
    }
    Ok(m)
}

fn load_matrix(config: &RunConfig, manifest: &GridManifest, q: f64, s: usize) -> Result<QCorrMatrix> {
    let entry = manifest
        .entries
        .iter()
        .find(|e| e.q == q && e.s == s)
        .ok_or_else(|| data_err!("missing matrix file for q={q}, s={s}; rerun `grid`"))?;
    let path = grid_dir(&config.out).join(&entry.file);
    let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
    if sha256_hex(&bytes) != entry.sha256 {
        return Err(data_err!("{} does not match its manifest hash", path.display()));
    }
    QCorrMatrix::read_csv(bytes.as_slice(), q, s, manifest.poly_order).map_err(|e| e.context(path.display()))
}

/// Moments table row; undefined moments are left empty.
fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn hist_table(header: &str, lo: f64, hi: f64, width: f64, samples: [&[f64]; 3]) -> Result<Vec<u8>> {
    let bins: Vec<_> = samples.iter().map(|v| histogram(v, lo, hi, width)).collect();
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header.split(','))?;
    for k in 0..bins[0].len() {
        let b = &bins[0][k];
        wtr.write_record([b.lo.to_string(), b.hi.to_string(), b.density.to_string(), bins[1][k].density.to_string(), bins[2][k].density.to_string()])?;
    }
    wtr.into_inner().map_err(|e| data_err!("csv buffer: {e}"))
}

fn sector_table(matrix: &QCorrMatrix, es: &EigenSystem, shuffled: &EigenSystem, proj: &SectorProjection, modes: usize) -> Result<Vec<u8>> {
    let n = es.n();
    let modes = modes.clamp(1, n);
    let mut columns = vec![sector_contributions(es, proj, n - 1)?];
    if modes > 1 {
        let deflated = eig_sym(&deflate_market_mode(&matrix.rho, es))?;
        for r in 1..modes {
            columns.push(sector_contributions(&deflated, proj, n - 1 - r)?);
        }
    }
    let baseline: Vec<Vec<f64>> = (0..n).map(|k| sector_contributions(shuffled, proj, k)).collect::<Result<_>>()?;
    let mut wtr = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["group".to_string(), "size".to_string(), "market".to_string()];
    header.extend((2..=modes).map(|r| format!("mode{r}")));
    header.extend(["shuffled_mean".to_string(), "shuffled_sd".to_string()]);
    wtr.write_record(&header)?;
    for (l, size) in proj.sizes.iter().enumerate() {
        let mut rec = vec![(l + 1).to_string(), size.to_string()];
        rec.extend(columns.iter().map(|c| c[l].to_string()));
        let base: Vec<f64> = baseline.iter().map(|x| x[l]).collect();
        rec.extend([mean(&base).to_string(), std_dev(&base).to_string()]);
        wtr.write_record(&rec)?;
    }
    wtr.into_inner().map_err(|e| data_err!("csv buffer: {e}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct RmtRun {
    pub bounds: MpBounds,
    pub points: usize,
    /// Grid points whose whole spectrum lies inside the band.
    pub all_bulk: usize,
}

/// Spectral reports for every grid point, with shuffled and Gaussian baselines.
pub fn cmd_rmt(config: &RunConfig) -> Result<RmtRun> {
    let input = load_input(config)?;
    config.pool()?.install(|| run_rmt(config, &input))
}

fn run_rmt(config: &RunConfig, input: &Input) -> Result<RmtRun> {
    let panel = &input.panel;
    let manifest = current_manifest(config, input)?;
    let bounds = mp_bounds(panel.n_assets(), panel.len())?;
    let shuffled = shuffle_panel(panel, config.seed.derive(1));
    let simulated = simulate_gaussian(panel.n_assets(), panel.len(), config.seed.derive(2))?;
    let proj = panel.groups.clone().map(SectorProjection::new).transpose()?;
    let (hlo, hhi, hw) = config.spectrum_bins;
    let dir = config.out.join("rmt");
    let qs = config.detrend.qs();
    let mut moments: Vec<((f64, usize), String)> = Vec::new();
    let mut all_bulk = 0;
    for s in config.detrend.scales() {
        let m = config.detrend.poly_order;
        let base_sh = corr_matrices_at_scale(&shuffled, &qs, s, m).map_err(|e| e.context(format!("shuffled baseline s={s}")))?;
        let base_si = corr_matrices_at_scale(&simulated, &qs, s, m).map_err(|e| e.context(format!("simulated baseline s={s}")))?;
        let results: Vec<_> = qs
            .par_iter()
            .zip(base_sh.par_iter().zip(base_si.par_iter()))
            .map(|(&q, (sh, si))| -> Result<_> {
                let mat = load_matrix(config, &manifest, q, s)?;
                let es = eig_sym(&mat.rho)?;
                let es_sh = eig_sym(&sh.rho)?;
                let es_si = eig_sym(&si.rho)?;
                let report = EigenReport::new(q, s, &es, bounds);
                let spectrum = hist_table("lo,hi,original,shuffled,simulated", hlo, hhi, hw, [&es.eigenvalues, &es_sh.eigenvalues, &es_si.eigenvalues])?;
                let entries = hist_table(
                    "lo,hi,original,shuffled,simulated",
                    -1.0,
                    1.0,
                    hw,
                    [&mat.upper_triangle(), &sh.upper_triangle(), &si.upper_triangle()],
                )?;
                let sectors = proj.as_ref().map(|p| sector_table(&mat, &es, &es_sh, p, config.sector_modes)).transpose()?;
                let mo = matrix_moments(&mat)?;
                let row = format!("{},{s},{},{},{},{}", q, mo.mean, mo.variance, opt(mo.skewness), opt(mo.kurtosis));
                Ok((q, report, spectrum, entries, sectors, row))
            })
            .collect::<Result<_>>()?;
        for (q, report, spectrum, entries, sectors, row) in results {
            let name = point_name(q, s);
            if report.deviating.is_empty() {
                all_bulk += 1;
            }
            write_atomic(&dir.join("eigen").join(format!("{name}.json")), &to_json(&report)?)?;
            write_atomic(&dir.join("spectrum").join(format!("{name}.csv")), &spectrum)?;
            write_atomic(&dir.join("entries").join(format!("{name}.csv")), &entries)?;
            if let Some(sec) = sectors {
                write_atomic(&dir.join("sectors").join(format!("{name}.csv")), &sec)?;
            }
            moments.push(((q, s), row));
        }
    }
    moments.sort_by(|a, b| point_cmp(&a.0, &b.0));
    let mut table = String::from("q,s,mean,variance,skewness,kurtosis\n");
    for (_, row) in &moments {
        table.push_str(row);
        table.push('\n');
    }
    write_atomic(&dir.join("moments.csv"), table.as_bytes())?;
    let run = RmtRun { bounds, points: moments.len(), all_bulk };
    write_atomic(&dir.join("summary.json"), &to_json(&run)?)?;
    Ok(run)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopologyRow {
    pub q: f64,
    pub s: usize,
    pub report: TopologyReport,
}

/// PMFG edge lists and the grid-wide topology table.
pub fn cmd_pmfg(config: &RunConfig) -> Result<Vec<TopologyRow>> {
    let input = load_input(config)?;
    config.pool()?.install(|| run_pmfg(config, &input))
}

fn run_pmfg(config: &RunConfig, input: &Input) -> Result<Vec<TopologyRow>> {
    let manifest = current_manifest(config, input)?;
    let dir = config.out.join("pmfg");
    let rows: Vec<(TopologyRow, Vec<u8>)> = grid_points(&config.detrend)
        .par_iter()
        .map(|&(q, s)| -> Result<_> {
            let mat = load_matrix(config, &manifest, q, s)?;
            let g = build_pmfg(&mat)?;
            let mut edges = Vec::new();
            g.write_edges_csv(&mut edges)?;
            let report = TopologyReport::new(&g.graph()).map_err(|e| e.context(format!("q={q}, s={s}")))?;
            Ok((TopologyRow { q, s, report }, edges))
        })
        .collect::<Result<_>>()?;
    let mut table = String::from("q,s,C,L,gamma,A\n");
    for (row, edges) in &rows {
        write_atomic(&dir.join("edges").join(format!("{}.csv", point_name(row.q, row.s))), edges)?;
        let r = &row.report;
        let a = r.assortativity.map_or("NaN".to_string(), |a| a.to_string());
        table.push_str(&format!("{},{},{},{},{},{a}\n", row.q, row.s, r.clustering, r.path_length, r.heterogeneity));
    }
    write_atomic(&dir.join("topology.csv"), table.as_bytes())?;
    Ok(rows.into_iter().map(|(r, _)| r).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PortfolioRun {
    pub sizes: Vec<usize>,
    /// `Ω²` used for `Δ(q)` at each size.
    pub risk_levels: Vec<f64>,
    pub taus: Vec<f64>,
    pub random_draws: usize,
    pub evaluation: Evaluation,
    pub delta: Vec<Vec<(f64, f64)>>,
}

/// Frontiers and `Δ(q)` curves. Extends the grid to `delta_q_max` first.
pub fn cmd_portfolio(config: &RunConfig) -> Result<PortfolioRun> {
    let input = load_input(config)?;
    config.pool()?.install(|| run_portfolio(config, &input))
}

/// `η` of every network on the grid.
pub fn network_scores(config: &RunConfig, manifest: &GridManifest, points: &[(f64, usize)]) -> Result<Vec<NetworkScores>> {
    points
        .par_iter()
        .map(|&(q, s)| {
            let g = build_pmfg(&load_matrix(config, manifest, q, s)?)?;
            let eta = centrality_eta(&g, config.tie_rule).map_err(|e| e.context(format!("q={q}, s={s}")))?.eta;
            Ok(NetworkScores { q, s, eta })
        })
        .collect()
}

fn run_portfolio(config: &RunConfig, input: &Input) -> Result<PortfolioRun> {
    let panel = &input.panel;
    let n = panel.n_assets();
    let sizes = match &config.sizes {
        Some(sz) => {
            if let Some(&m) = sz.iter().find(|&&m| m < 2 || m > n) {
                return Err(config_err!("portfolio size {m} outside 2..={n}"));
            }
            sz.clone()
        }
        None => DEFAULT_SIZES.iter().copied().filter(|&m| m <= n).collect(),
    };
    if sizes.is_empty() {
        return Err(config_err!("no portfolio size fits a panel of {n} assets"));
    }
    let mut extended = config.detrend.clone();
    extended.q_max = extended.q_max.max(config.delta_q_max);
    current_manifest(config, input)?;
    let manifest = run_grid(config, input, &extended)?.manifest;
    let points = grid_points(&extended);
    let nets = network_scores(config, &manifest, &points)?;
    let base_qs = config.detrend.qs();
    let universe = Universe::new(panel, config.evaluation)?;
    let dir = config.out.join("portfolio");
    let mut risk_levels = Vec::new();
    let mut deltas = Vec::new();
    for &m in &sizes {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        wtr.write_record(["q", "s", "mode", "tau", "risk", "return"])?;
        let mut cache: HashMap<Vec<usize>, Vec<crate::portfolio::FrontierPoint>> = HashMap::new();
        for net in nets.iter().filter(|nw| base_qs.contains(&nw.q)) {
            for &mode in config.modes.iter().filter(|&&md| md != Mode::Random) {
                let members = select_portfolio(&net.eta, m, mode, config.seed)?;
                if !cache.contains_key(&members) {
                    let pts = frontier(&universe, &members, &config.taus).map_err(|e| e.context(format!("q={}, s={}, m={m}", net.q, net.s)))?;
                    cache.insert(members.clone(), pts);
                }
                for p in &cache[&members] {
                    wtr.write_record([net.q.to_string(), net.s.to_string(), mode.as_str().into(), p.tau.to_string(), p.risk.to_string(), p.ret.to_string()])?;
                }
            }
        }
        if config.modes.contains(&Mode::Random) {
            for p in random_frontier(&universe, m, &config.taus, config.random_draws, config.seed.derive(3 + m as u64))? {
                wtr.write_record([String::new(), String::new(), "random".into(), p.tau.to_string(), p.risk.to_string(), p.ret.to_string()])?;
            }
        }
        write_atomic(&dir.join(format!("frontier_m{m}.csv")), &wtr.into_inner().map_err(|e| data_err!("csv buffer: {e}"))?)?;

        let curve = delta_curve(&universe, &nets, m, config.risk_level).map_err(|e| e.context(format!("m={m}")))?;
        let mut table = String::from("q,delta\n");
        for p in &curve.points {
            table.push_str(&format!("{},{}\n", p.q, p.delta));
        }
        write_atomic(&dir.join(format!("delta_m{m}.csv")), table.as_bytes())?;
        risk_levels.push(curve.risk_level);
        deltas.push(curve.points.iter().map(|p| (p.q, p.delta)).collect());
    }
    let run = PortfolioRun {
        sizes,
        risk_levels,
        taus: config.taus.clone(),
        random_draws: config.random_draws,
        evaluation: config.evaluation,
        delta: deltas,
    };
    write_atomic(&dir.join("summary.json"), &to_json(&run)?)?;
    Ok(run)
}

/// Synthetic inputs for `simulate`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum SimModel {
    Factor(FactorMarket),
    /// i.i.d. normal returns with 1% daily volatility.
    Gaussian { n: usize, len: usize },
}

/// Write `prices.csv` (and `groups.csv` for the factor model) into `out`.
pub fn cmd_simulate(out: &Path, model: &SimModel, seed: Seed) -> Result<PathBuf> {
    let (panel, groups) = match model {
        SimModel::Factor(market) => {
            let p = simulate_factor_market(market, seed)?;
            let g = p.groups.clone();
            (p, g)
        }
        SimModel::Gaussian { n, len } => {
            let mut p = simulate_gaussian(*n, *len, seed)?;
            p.returns.iter_mut().flatten().for_each(|r| *r *= 0.01);
            (p, None)
        }
    };
    let prices = prices_from_returns(&panel, 100.0)?;
    let mut buf = Vec::new();
    write_prices(&prices, &mut buf)?;
    let path = out.join("prices.csv");
    write_atomic(&path, &buf)?;
    if let Some(g) = groups {
        let mut buf = Vec::new();
        write_groups(&panel.tickers, &g, &mut buf)?;
        write_atomic(&out.join("groups.csv"), &buf)?;
    }
    Ok(path)
}

/// Write a row-shuffled copy of the input prices to `prices_shuffled.csv`.
pub fn cmd_shuffle(config: &RunConfig) -> Result<PathBuf> {
    let input = read_input(config)?;
    let shuffled = shuffle_panel(&input.panel, config.seed);
    let prices = prices_from_returns(&shuffled, 100.0)?;
    let mut buf = Vec::new();
    write_prices(&prices, &mut buf)?;
    let path = config.out.join("prices_shuffled.csv");
    write_atomic(&path, &buf)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_names_are_short() {
        assert_eq!(point_name(0.2 + 0.4, 30), "q0.6_s30");
        assert_eq!(point_name(2.0, 110), "q2_s110");
    }

    #[test]
    fn grid_points_sorted_by_q_then_s() {
        let d = DetrendConfig { q_min: 1.0, q_max: 2.0, q_step: 1.0, min_scale: 30, max_scale: 70, scale_step: 40, poly_order: 2 };
        assert_eq!(grid_points(&d), vec![(1.0, 30), (1.0, 70), (2.0, 30), (2.0, 70)]);
    }

    #[test]
    fn hash_is_hex_sha256() {
        assert_eq!(sha256_hex(b"abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    }

    #[test]
    fn missing_input_is_config_error() {
        let cfg = RunConfig { prices: PathBuf::from("/nonexistent/prices.csv"), ..RunConfig::default() };
        assert_eq!(load_input(&cfg).unwrap_err().exit_code(), 2);
    }
}
