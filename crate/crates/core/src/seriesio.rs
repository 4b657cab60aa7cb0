//! Price and return panels: CSV ingestion, log returns, and the two
//! reference models used as null benchmarks (row-shuffled panels and
//! i.i.d. Gaussian panels), plus a one-factor synthetic market.
//!
//! Every stochastic routine takes a [`Seed`] and derives one ChaCha
//! substream per row, so output does not depend on evaluation order or on
//! how many threads generate it.

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{config_err, data_err, Error, Result};

const DATE_FORMAT: &str = "%Y-%m-%d";

/// Seed for every stochastic operation in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Independent generator for substream `stream` of this seed.
    pub fn rng(self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.0);
        rng.set_stream(stream);
        rng
    }

    /// Derive a new seed, e.g. one per Monte Carlo replicate.
    pub fn derive(self, tag: u64) -> Seed {
        Seed(self.rng(tag ^ 0x9e37_79b9_7f4a_7c15).random())
    }
}

/// Aligned daily closing prices, one row per asset.
#[derive(Clone, Debug, PartialEq)]
pub struct PricePanel {
    pub tickers: Vec<String>,
    pub dates: Vec<NaiveDate>,
    /// `prices[i][t]`, strictly positive.
    pub prices: Vec<Vec<f64>>,
}

impl PricePanel {
    pub fn new(tickers: Vec<String>, dates: Vec<NaiveDate>, prices: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.len() < 2 {
            return Err(data_err!("need at least 2 assets, got {}", tickers.len()));
        }
        if dates.len() < 2 {
            return Err(data_err!("need at least 2 dates, got {}", dates.len()));
        }
        if prices.len() != tickers.len() {
            return Err(data_err!("{} price rows for {} tickers", prices.len(), tickers.len()));
        }
        check_unique(&tickers)?;
        if let Some(w) = dates.windows(2).find(|w| w[1] <= w[0]) {
            return Err(data_err!("dates not strictly increasing at {}", w[1]));
        }
        for (ticker, row) in tickers.iter().zip(&prices) {
            if row.len() != dates.len() {
                return Err(data_err!("ragged rows: {ticker} has {} prices for {} dates", row.len(), dates.len()));
            }
            if let Some(p) = row.iter().find(|p| !(p.is_finite() && **p > 0.0)) {
                return Err(data_err!("non-positive price {p} for {ticker}"));
            }
        }
        Ok(PricePanel { tickers, dates, prices })
    }

    pub fn n_assets(&self) -> usize {
        self.tickers.len()
    }

    pub fn n_dates(&self) -> usize {
        self.dates.len()
    }
}

/// Log returns, one row per asset, with optional industry-group labels.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnPanel {
    pub tickers: Vec<String>,
    /// Date of the closing price that ends each return interval.
    pub dates: Vec<NaiveDate>,
    pub returns: Vec<Vec<f64>>,
    /// `groups[i]` in `1..=G` for ticker `i`.
    pub groups: Option<Vec<usize>>,
}

impl ReturnPanel {
    pub fn new(tickers: Vec<String>, dates: Vec<NaiveDate>, returns: Vec<Vec<f64>>) -> Result<Self> {
        if tickers.len() < 2 {
            return Err(data_err!("need at least 2 assets, got {}", tickers.len()));
        }
        if returns.len() != tickers.len() {
            return Err(data_err!("{} return rows for {} tickers", returns.len(), tickers.len()));
        }
        check_unique(&tickers)?;
        if dates.len() < 2 {
            return Err(data_err!("need at least 2 observations, got {}", dates.len()));
        }
        for (ticker, row) in tickers.iter().zip(&returns) {
            if row.len() != dates.len() {
                return Err(data_err!("ragged rows: {ticker} has {} returns for {} dates", row.len(), dates.len()));
            }
            if row.iter().any(|r| !r.is_finite()) {
                return Err(data_err!("non-finite return for {ticker}"));
            }
        }
        Ok(ReturnPanel { tickers, dates, returns, groups: None })
    }

    /// Attach industry groups. Every ticker must be labelled and the labels
    /// must cover `1..=G` without gaps.
    pub fn with_groups(mut self, groups: Vec<usize>) -> Result<Self> {
        validate_groups(&groups, self.n_assets())?;
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn n_assets(&self) -> usize {
        self.tickers.len()
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.returns[i]
    }

    /// Sub-panel with the given rows, in the given order.
    pub fn select(&self, rows: &[usize]) -> ReturnPanel {
        ReturnPanel {
            tickers: rows.iter().map(|&i| self.tickers[i].clone()).collect(),
            dates: self.dates.clone(),
            returns: rows.iter().map(|&i| self.returns[i].clone()).collect(),
            groups: self.groups.as_ref().map(|g| rows.iter().map(|&i| g[i]).collect()),
        }
    }
}

fn check_unique(tickers: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for t in tickers {
        if t.is_empty() {
            return Err(data_err!("malformed header: empty ticker"));
        }
        if !seen.insert(t.as_str()) {
            return Err(data_err!("malformed header: duplicate ticker {t}"));
        }
    }
    Ok(())
}

pub(crate) fn validate_groups(groups: &[usize], n: usize) -> Result<usize> {
    if groups.len() != n {
        return Err(data_err!("{} group labels for {n} assets", groups.len()));
    }
    let g = groups.iter().copied().max().unwrap_or(0);
    if groups.contains(&0) {
        return Err(data_err!("group labels must start at 1"));
    }
    let mut sizes = vec![0usize; g];
    for &l in groups {
        sizes[l - 1] += 1;
    }
    if let Some(empty) = sizes.iter().position(|&c| c == 0) {
        return Err(data_err!("group {} has no members; labels must cover 1..={g}", empty + 1));
    }
    Ok(g)
}

/// A parsed price file plus the dates dropped for missing cells.
#[derive(Clone, Debug)]
pub struct PriceLoad {
    pub panel: PricePanel,
    pub dropped_dates: Vec<String>,
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("na") || c.eq_ignore_ascii_case("nan") || c.eq_ignore_ascii_case("null")
}

fn parse_header(headers: &csv::StringRecord) -> Result<Vec<String>> {
    let mut it = headers.iter();
    match it.next() {
        Some(first) if first.trim_start_matches('\u{feff}').trim().eq_ignore_ascii_case("date") => {}
        _ => return Err(data_err!("malformed header: first column must be `date`")),
    }
    let tickers: Vec<String> = it.map(|t| t.trim().to_string()).collect();
    check_unique(&tickers)?;
    Ok(tickers)
}

fn parse_date(cell: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(cell.trim(), DATE_FORMAT).map_err(|_| data_err!("malformed date `{cell}`"))
}

/// Parse a `date,T1,T2,...` price table. Dates with any missing cell are
/// dropped rather than imputed.
pub fn read_prices<R: Read>(reader: R) -> Result<PriceLoad> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let tickers = parse_header(rdr.headers()?)?;
    let width = tickers.len() + 1;
    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); tickers.len()];
    let mut dropped_dates = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(data_err!("ragged rows: line {} has {} cells, expected {width}", line + 2, rec.len()));
        }
        if rec.iter().skip(1).any(is_missing) {
            dropped_dates.push(rec[0].trim().to_string());
            continue;
        }
        dates.push(parse_date(&rec[0])?);
        for (k, cell) in rec.iter().skip(1).enumerate() {
            let p: f64 = cell
                .trim()
                .parse()
                .map_err(|_| data_err!("unparseable price `{cell}` for {} on line {}", tickers[k], line + 2))?;
            if !(p > 0.0) || !p.is_finite() {
                return Err(data_err!("non-positive price {p} for {} on line {}", tickers[k], line + 2));
            }
            columns[k].push(p);
        }
    }
    let panel = PricePanel::new(tickers, dates, columns)?;
    Ok(PriceLoad { panel, dropped_dates })
}

pub fn load_prices(path: impl AsRef<Path>) -> Result<PricePanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    Ok(read_prices(file)?.panel)
}

/// Parse a return table with the same `date,T1,...` layout.
pub fn read_returns<R: Read>(reader: R) -> Result<ReturnPanel> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);
    let tickers = parse_header(rdr.headers()?)?;
    let width = tickers.len() + 1;
    let mut dates = Vec::new();
    let mut columns = vec![Vec::new(); tickers.len()];
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != width {
            return Err(data_err!("ragged rows: line {} has {} cells, expected {width}", line + 2, rec.len()));
        }
        if rec.iter().skip(1).any(is_missing) {
            return Err(data_err!("missing return on line {}", line + 2));
        }
        dates.push(parse_date(&rec[0])?);
        for (k, cell) in rec.iter().skip(1).enumerate() {
            let r: f64 = cell.trim().parse().map_err(|_| data_err!("unparseable return `{cell}` on line {}", line + 2))?;
            columns[k].push(r);
        }
    }
    ReturnPanel::new(tickers, dates, columns)
}

pub fn load_returns(path: impl AsRef<Path>) -> Result<ReturnPanel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_returns(file)
}

/// Write a price panel as `date,T1,...` rows.
pub fn write_prices<W: Write>(panel: &PricePanel, writer: W) -> Result<()> {
    write_table(&panel.tickers, &panel.dates, &panel.prices, writer)
}

/// Write a `ticker,group` map.
pub fn write_groups<W: Write>(tickers: &[String], groups: &[usize], writer: W) -> Result<()> {
    validate_groups(groups, tickers.len())?;
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["ticker", "group"])?;
    for (t, g) in tickers.iter().zip(groups) {
        wtr.write_record([t.clone(), g.to_string()])?;
    }
    wtr.flush().map_err(|e| Error::io("<groups csv>", e))?;
    Ok(())
}

/// Write a return panel as `date,T1,...` rows.
pub fn write_returns<W: Write>(panel: &ReturnPanel, writer: W) -> Result<()> {
    write_table(&panel.tickers, &panel.dates, &panel.returns, writer)
}

fn write_table<W: Write>(tickers: &[String], dates: &[NaiveDate], rows: &[Vec<f64>], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header = vec!["date".to_string()];
    header.extend(tickers.iter().cloned());
    wtr.write_record(&header)?;
    let mut rec = Vec::with_capacity(header.len());
    for (t, date) in dates.iter().enumerate() {
        rec.clear();
        rec.push(date.format(DATE_FORMAT).to_string());
        rec.extend(rows.iter().map(|row| row[t].to_string()));
        wtr.write_record(&rec)?;
    }
    wtr.flush().map_err(|e| Error::io("<panel csv>", e))?;
    Ok(())
}

/// Parse a `ticker,group` map into labels aligned with `tickers`.
pub fn read_groups<R: Read>(reader: R, tickers: &[String]) -> Result<Vec<usize>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let cols: Vec<String> = headers.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
    if cols != ["ticker", "group"] {
        return Err(data_err!("malformed group header, expected `ticker,group`"));
    }
    let mut map = HashMap::new();
    for rec in rdr.records() {
        let rec = rec?;
        let ticker = rec[0].trim().to_string();
        let group: usize = rec[1].trim().parse().map_err(|_| data_err!("bad group label `{}` for {ticker}", &rec[1]))?;
        if map.insert(ticker.clone(), group).is_some() {
            return Err(data_err!("ticker {ticker} listed twice in group map"));
        }
    }
    let groups = tickers
        .iter()
        .map(|t| map.get(t).copied().ok_or_else(|| data_err!("ticker {t} missing from group map")))
        .collect::<Result<Vec<_>>>()?;
    validate_groups(&groups, tickers.len())?;
    Ok(groups)
}

pub fn load_groups(path: impl AsRef<Path>, tickers: &[String]) -> Result<Vec<usize>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_groups(file, tickers)
}

/// `r_i(t) = ln p_i(t+1) - ln p_i(t)`.
pub fn log_returns(panel: &PricePanel) -> ReturnPanel {
    let returns = panel
        .prices
        .iter()
        .map(|row| row.windows(2).map(|w| w[1].ln() - w[0].ln()).collect())
        .collect();
    ReturnPanel {
        tickers: panel.tickers.clone(),
        dates: panel.dates[1..].to_vec(),
        returns,
        groups: None,
    }
}

/// Independently permute every row. Marginals survive; temporal order and
/// cross-correlations do not.
pub fn shuffle_panel(panel: &ReturnPanel, seed: Seed) -> ReturnPanel {
    let returns = panel
        .returns
        .par_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row = row.clone();
            row.shuffle(&mut seed.rng(i as u64));
            row
        })
        .collect();
    ReturnPanel { returns, ..panel.clone() }
}

/// Business days (Mon-Fri) starting 2000-01-03; labels for synthetic panels.
pub fn synthetic_dates(len: usize) -> Vec<NaiveDate> {
    let mut d = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date");
    let mut out = Vec::with_capacity(len);
    while out.len() < len {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.checked_add_days(Days::new(1)).expect("date in range");
    }
    out
}

fn synthetic_tickers(n: usize) -> Vec<String> {
    let width = n.to_string().len().max(3);
    (0..n).map(|i| format!("S{i:0width$}")).collect()
}

/// `n` rows of `l` i.i.d. standard normal draws.
pub fn simulate_gaussian(n: usize, l: usize, seed: Seed) -> Result<ReturnPanel> {
    if n < 2 || l < 2 {
        return Err(config_err!("simulate_gaussian needs n >= 2 and l >= 2, got n={n}, l={l}"));
    }
    let returns = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.rng(i as u64);
            (0..l).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        })
        .collect();
    ReturnPanel::new(synthetic_tickers(n), synthetic_dates(l), returns)
}

/// One-factor market: the first `block` assets load on a common factor,
/// every asset carries independent noise.
///
/// `r_i(t) = drift + loading * f(t) + noise_vol * e_i(t)` for `i < block`,
/// `r_i(t) = drift + noise_vol * e_i(t)` otherwise, with `f, e` standard
/// normal scaled by `factor_vol` and `noise_vol`. Group labels are 1 for the
/// block and 2 for the rest.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FactorMarket {
    pub n: usize,
    pub len: usize,
    pub block: usize,
    pub loading: f64,
    pub factor_vol: f64,
    pub noise_vol: f64,
    pub drift: f64,
}

impl Default for FactorMarket {
    fn default() -> Self {
        FactorMarket {
            n: 50,
            len: 4000,
            block: 10,
            loading: 1.0,
            factor_vol: 0.01,
            noise_vol: 0.01,
            drift: 3e-4,
        }
    }
}

pub fn simulate_factor_market(market: &FactorMarket, seed: Seed) -> Result<ReturnPanel> {
    if market.n < 2 || market.len < 2 || market.block > market.n {
        return Err(config_err!("invalid factor market n={} len={} block={}", market.n, market.len, market.block));
    }
    let mut frng = seed.rng(u64::MAX);
    let factor: Vec<f64> = (0..market.len).map(|_| market.factor_vol * frng.sample::<f64, _>(StandardNormal)).collect();
    let returns = (0..market.n)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed.rng(i as u64);
            let beta = if i < market.block { market.loading } else { 0.0 };
            factor
                .iter()
                .map(|f| market.drift + beta * f + market.noise_vol * rng.sample::<f64, _>(StandardNormal))
                .collect()
        })
        .collect();
    let groups = (0..market.n).map(|i| if i < market.block || market.block == market.n { 1 } else { 2 }).collect();
    ReturnPanel::new(synthetic_tickers(market.n), synthetic_dates(market.len), returns)?.with_groups(groups)
}

/// Prices implied by a return panel, starting every asset at `start`.
pub fn prices_from_returns(panel: &ReturnPanel, start: f64) -> Result<PricePanel> {
    let first = panel.dates[0].checked_sub_days(Days::new(1)).expect("date in range");
    let mut dates = vec![first];
    dates.extend(panel.dates.iter().copied());
    let prices = panel
        .returns
        .iter()
        .map(|row| {
            let mut p = vec![start];
            let mut acc = 0.0;
            for r in row {
                acc += r;
                p.push(start * acc.exp());
            }
            p
        })
        .collect();
    PricePanel::new(panel.tickers.clone(), dates, prices)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn csv_panel(body: &str) -> Result<PricePanel> {
        read_prices(body.as_bytes()).map(|l| l.panel)
    }

    #[test]
    fn parses_small_panel() {
        let p = csv_panel(
            "date,A,B,C\n2020-01-01,1,2,3\n2020-01-02,1.1,2,3\n2020-01-03,1.2,2,3\n2020-01-06,1,2,3\n2020-01-07,1,2,3.5\n",
        )
        .unwrap();
        assert_eq!(p.n_assets(), 3);
        assert_eq!(p.n_dates(), 5);
        assert_eq!(p.tickers, ["A", "B", "C"]);
        assert_eq!(p.prices[2][4], 3.5);
    }

    #[test]
    fn rejects_non_positive_price() {
        let err = csv_panel("date,A,B\n2020-01-01,1,2\n2020-01-02,0.0,2\n").unwrap_err();
        assert!(err.to_string().contains("non-positive price"), "{err}");
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(csv_panel("day,A,B\n2020-01-01,1,2\n2020-01-02,1,2\n").is_err());
        assert!(csv_panel("date,A,A\n2020-01-01,1,2\n2020-01-02,1,2\n").is_err());
        assert!(csv_panel("date,A,B\n2020-01-01,1,2\n2020-01-02,1\n").unwrap_err().to_string().contains("ragged"));
        assert!(csv_panel("date,A\n2020-01-01,1\n2020-01-02,1\n").is_err());
        assert!(csv_panel("date,A,B\n2020-01-01,1,2\n").is_err());
        assert!(csv_panel("date,A,B\n2020-01-02,1,2\n2020-01-01,1,2\n").is_err());
    }

    #[test]
    fn drops_dates_with_missing_cells() {
        let load = read_prices("date,A,B\n2020-01-01,1,2\n2020-01-02,,2\n2020-01-03,1,NA\n2020-01-06,1,2\n".as_bytes()).unwrap();
        assert_eq!(load.panel.n_dates(), 2);
        assert_eq!(load.dropped_dates, ["2020-01-02", "2020-01-03"]);
    }

    #[test]
    fn log_return_examples() {
        let e = std::f64::consts::E;
        let p = PricePanel::new(
            vec!["A".into(), "B".into(), "C".into()],
            synthetic_dates(3),
            vec![vec![5.0, 5.0, 5.0], vec![1.0, e, e * e], vec![100.0, 110.0, 121.0]],
        )
        .unwrap();
        let r = log_returns(&p);
        assert_eq!(r.len(), 2);
        assert_eq!(r.returns[0], [0.0, 0.0]);
        assert!((r.returns[1][0] - 1.0).abs() < 1e-15 && (r.returns[1][1] - 1.0).abs() < 1e-15);
        assert!((r.returns[2][0] - 0.0953101798043249).abs() < 1e-15);
        assert_eq!(r.dates, p.dates[1..]);
    }

    #[test]
    fn shuffle_preserves_rows_and_is_deterministic() {
        let panel = simulate_gaussian(3, 200, Seed(7)).unwrap();
        let a = shuffle_panel(&panel, Seed(1));
        let b = shuffle_panel(&panel, Seed(1));
        assert_eq!(a, b);
        assert_ne!(a.returns, panel.returns);
        for (orig, shuf) in panel.returns.iter().zip(&a.returns) {
            let mut x = orig.clone();
            let mut y = shuf.clone();
            x.sort_by(f64::total_cmp);
            y.sort_by(f64::total_cmp);
            assert_eq!(x, y);
        }
        let flat = ReturnPanel::new(vec!["A".into(), "B".into()], synthetic_dates(4), vec![vec![2.0; 4], vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        assert_eq!(shuffle_panel(&flat, Seed(3)).returns[0], vec![2.0; 4]);
    }

    #[test]
    fn gaussian_moments_and_determinism() {
        let p = simulate_gaussian(2, 100_000, Seed(42)).unwrap();
        for row in &p.returns {
            let mean = row.iter().sum::<f64>() / row.len() as f64;
            let var = row.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / row.len() as f64;
            assert!(mean.abs() < 0.02, "mean {mean}");
            assert!((var - 1.0).abs() < 0.02, "var {var}");
        }
        assert_eq!(p, simulate_gaussian(2, 100_000, Seed(42)).unwrap());
        assert!(simulate_gaussian(1, 10, Seed(0)).is_err());
        let big = simulate_gaussian(401, 4024, Seed(1)).unwrap();
        assert_eq!((big.n_assets(), big.len()), (401, 4024));
    }

    #[test]
    fn groups_must_cover_every_ticker() {
        let tickers: Vec<String> = vec!["A".into(), "B".into(), "C".into()];
        assert_eq!(read_groups("ticker,group\nB,2\nA,1\nC,1\n".as_bytes(), &tickers).unwrap(), [1, 2, 1]);
        assert!(read_groups("ticker,group\nA,1\nB,2\n".as_bytes(), &tickers).is_err());
        assert!(read_groups("ticker,group\nA,1\nB,3\nC,1\n".as_bytes(), &tickers).is_err());
        assert!(read_groups("ticker,group\nA,1\nA,2\nB,1\nC,1\n".as_bytes(), &tickers).is_err());
    }

    #[test]
    fn returns_csv_round_trip() {
        let panel = simulate_gaussian(3, 20, Seed(5)).unwrap();
        let mut buf = Vec::new();
        write_returns(&panel, &mut buf).unwrap();
        assert_eq!(read_returns(buf.as_slice()).unwrap(), panel);
    }

    #[test]
    fn factor_market_labels_block() {
        let market = FactorMarket { n: 6, len: 50, block: 2, ..FactorMarket::default() };
        let p = simulate_factor_market(&market, Seed(9)).unwrap();
        assert_eq!(p.groups.as_deref(), Some(&[1, 1, 2, 2, 2, 2][..]));
        assert_eq!(p, simulate_factor_market(&market, Seed(9)).unwrap());
    }
}
