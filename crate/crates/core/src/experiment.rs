//! Monte Carlo experiments over random circulants, written as CSV with a
//! `#`-prefixed summary block.
//!
//! Trials run on the ambient rayon pool and are merged in trial order, so a
//! fixed spec and seed give byte-identical output unless timings are enabled.

use std::fmt;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::Serialize;

use crate::canon::{canonizer, CanonOptions};
use crate::error::{Error, Result};
use crate::graph::{cayley, relabel, ConnectionSet, Digraph, Permutation};
use crate::oracle::OracleConfig;
use crate::sampling::{is_firm, is_multiplier_free, sampler, trial_rng};
use crate::spectral::{
    distinct_eigenvalue_count, eigenvalue, has_saturated_spectrum, has_simple_spectrum,
    saturation_bound,
};
use crate::walk::{is_walk_discrete, is_walk_saturated, walk_matrix, walk_rank};
use crate::wl2::canonical_cayley_representation;

/// What to run and how.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub experiment: String,
    pub ns: Vec<usize>,
    pub trials: u64,
    /// Sampler name: `cayley`, `unlabeled` or `labeled`.
    pub model: String,
    pub directed: bool,
    pub seed: u64,
    /// `C` in the bound `C / sqrt(n)`.
    pub bound_constant: f64,
    /// Relative tolerance above the exact collision probability.
    pub tolerance: f64,
    /// Above `n = 32`, the walk cross-check runs on every k-th trial only.
    /// Exact walk ranks are computed for `n <= 40`.
    pub walk_check_every: u64,
    /// Random relabelings per instance in the canon pipeline.
    pub relabelings: usize,
    /// Firmness is recorded for `n` up to this bound.
    pub oracle_bound: usize,
    /// Record wall-clock times (makes the output nondeterministic).
    pub timings: bool,
}

impl ExperimentSpec {
    pub fn new(experiment: &str, ns: Vec<usize>, trials: u64) -> Self {
        Self {
            experiment: experiment.to_string(),
            ns,
            trials,
            model: "cayley".into(),
            directed: true,
            seed: 0,
            bound_constant: 3.0,
            tolerance: 0.1,
            walk_check_every: 32,
            relabelings: 1,
            oracle_bound: OracleConfig::default().aut_bound,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidInput("trials must be at least 1".into()));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::InvalidInput(
                "n-range must be non-empty and positive".into(),
            ));
        }
        if sampler(&self.model).is_none() {
            return Err(Error::InvalidInput(format!(
                "unknown model {:?}",
                self.model
            )));
        }
        if self.walk_check_every == 0 {
            return Err(Error::InvalidInput(
                "walk check interval must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One CSV row. Verdicts an experiment does not compute are left empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct TrialRecord {
    pub n: usize,
    pub trial: u64,
    pub seed: u64,
    pub model: String,
    pub set: String,
    pub size: usize,
    pub simple_spectrum: Option<bool>,
    pub saturated: Option<bool>,
    pub walk_discrete: Option<bool>,
    pub walk_saturated: Option<bool>,
    pub walk_rank: Option<usize>,
    pub distinct_eigenvalues: Option<usize>,
    pub collision: Option<bool>,
    pub balanced: Option<bool>,
    pub canon_success: Option<bool>,
    pub canon_consistent: Option<bool>,
    pub give_up: Option<String>,
    pub ccr_success: Option<bool>,
    pub firm: Option<bool>,
    pub multiplier_free: Option<bool>,
    pub time_us: Option<u64>,
}

/// Records plus the summary lines and the overall verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub records: Vec<TrialRecord>,
    pub summary: Vec<String>,
    pub passed: bool,
}

impl ExperimentReport {
    /// Header, one row per record, then the summary as `# ` lines.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for r in &self.records {
            w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
        }
        if self.records.is_empty() {
            w.write_record(CSV_HEADER)
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        let mut out = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        for line in &self.summary {
            writeln!(out, "# {line}").map_err(|e| Error::Io(e.to_string()))?;
        }
        writeln!(
            out,
            "# result: {}",
            if self.passed { "PASS" } else { "FAIL" }
        )
        .map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

const CSV_HEADER: [&str; 21] = [
    "n",
    "trial",
    "seed",
    "model",
    "set",
    "size",
    "simple_spectrum",
    "saturated",
    "walk_discrete",
    "walk_saturated",
    "walk_rank",
    "distinct_eigenvalues",
    "collision",
    "balanced",
    "canon_success",
    "canon_consistent",
    "give_up",
    "ccr_success",
    "firm",
    "multiplier_free",
    "time_us",
];

/// A registered experiment.
pub trait Experiment: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;

    fn run(&self, spec: &ExperimentSpec) -> Result<ExperimentReport>;
}

#[derive(Debug, Clone, Copy, Default)]
pub struct SimpleSpectrum;

#[derive(Debug, Clone, Copy, Default)]
pub struct Saturated;

#[derive(Debug, Clone, Copy, Default)]
pub struct Collision3p;

#[derive(Debug, Clone, Copy, Default)]
pub struct CanonPipeline;

static EXPERIMENTS: [&dyn Experiment; 4] =
    [&SimpleSpectrum, &Saturated, &Collision3p, &CanonPipeline];

pub fn experiments() -> &'static [&'static dyn Experiment] {
    &EXPERIMENTS
}

pub fn experiment(name: &str) -> Option<&'static dyn Experiment> {
    EXPERIMENTS.iter().copied().find(|e| e.name() == name)
}

/// Looks up `spec.experiment` and runs it.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentReport> {
    let e = experiment(&spec.experiment)
        .ok_or_else(|| Error::InvalidInput(format!("unknown experiment {:?}", spec.experiment)))?;
    e.run(spec)
}

/// Wilson score interval at confidence `z` (1.96 for 95%).
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let m = trials as f64;
    let p = successes as f64 / m;
    let z2 = z * z;
    let denom = 1.0 + z2 / m;
    let center = (p + z2 / (2.0 * m)) / denom;
    let half = z * (p * (1.0 - p) / m + z2 / (4.0 * m * m)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `C(2p, p) / 4^p`, the chance that two independent `Bin(p, 1/2)` agree.
pub fn central_binomial_probability(p: u64) -> f64 {
    (1..=p).fold(1.0, |acc, i| acc * (p + i) as f64 / (4.0 * i as f64))
}

/// One trial's input: the sampled (or enumerated) set and the graph to use.
struct Instance {
    trial: u64,
    set: ConnectionSet,
    graph: Digraph,
    rng: rand_chacha::ChaCha8Rng,
}

fn set_count(n: usize, directed: bool) -> u64 {
    let bits = if directed { n - 1 } else { n / 2 };
    if bits >= 63 {
        u64::MAX
    } else {
        1 << bits
    }
}

/// Whether the Cayley model at `n` is enumerated exhaustively instead of
/// sampled: the case when there are no more sets than trials.
pub fn is_exhaustive(spec: &ExperimentSpec, n: usize, directed: bool) -> bool {
    spec.model == "cayley" && set_count(n, directed) <= spec.trials
}

fn exhaustive_set(n: usize, directed: bool, index: u64) -> ConnectionSet {
    if directed {
        ConnectionSet::from_mask(n, index << 1, false).expect("index in range")
    } else {
        let elements = (1..=n / 2)
            .filter(|j| index >> (j - 1) & 1 == 1)
            .flat_map(|j| [j, n - j]);
        ConnectionSet::undirected(n, elements).expect("pairs are inverse-closed")
    }
}

fn trial_count(spec: &ExperimentSpec, n: usize, directed: bool) -> u64 {
    if is_exhaustive(spec, n, directed) {
        set_count(n, directed)
    } else {
        spec.trials
    }
}

fn instance(spec: &ExperimentSpec, n: usize, directed: bool, trial: u64) -> Result<Instance> {
    let mut rng = trial_rng(spec.seed, n, trial);
    if is_exhaustive(spec, n, directed) {
        let set = exhaustive_set(n, directed, trial);
        return Ok(Instance {
            trial,
            graph: cayley(&set),
            set,
            rng,
        });
    }
    let s = sampler(&spec.model)
        .ok_or_else(|| Error::InvalidInput(format!("unknown model {:?}", spec.model)))?;
    let draw = s.sample(n, directed, &mut rng)?;
    Ok(Instance {
        trial,
        set: draw.set,
        graph: draw.graph,
        rng,
    })
}

fn base_record(spec: &ExperimentSpec, n: usize, inst: &Instance) -> TrialRecord {
    TrialRecord {
        n,
        trial: inst.trial,
        seed: spec.seed,
        model: spec.model.clone(),
        set: inst.set.to_string(),
        size: inst.set.len(),
        ..Default::default()
    }
}

fn run_trials<F>(spec: &ExperimentSpec, n: usize, directed: bool, f: F) -> Result<Vec<TrialRecord>>
where
    F: Fn(Instance) -> Result<TrialRecord> + Sync,
{
    (0..trial_count(spec, n, directed))
        .into_par_iter()
        .map(|t| f(instance(spec, n, directed, t)?))
        .collect()
}

fn walk_checked(spec: &ExperimentSpec, n: usize, trial: u64) -> bool {
    n <= 32 || trial.is_multiple_of(spec.walk_check_every)
}

const RANK_CHECK_MAX_N: usize = 40;

/// Fills the walk-side verdicts used for cross-checking the spectral ones.
fn walk_cross_check(r: &mut TrialRecord, set: &ConnectionSet, directed: bool) -> Result<()> {
    let g = cayley(set);
    if directed {
        r.walk_discrete = Some(is_walk_discrete(&g, 0)?);
    } else {
        r.walk_saturated = Some(is_walk_saturated(set)?);
    }
    if set.n() <= RANK_CHECK_MAX_N {
        r.walk_rank = Some(walk_rank(&walk_matrix(&g, &[0])?));
        r.distinct_eigenvalues = Some(distinct_eigenvalue_count(set));
    }
    Ok(())
}

/// The record-level identities: rank `W_0` equals the number of distinct
/// eigenvalues, a simple (saturated) spectrum forces walk-discrete
/// (walk-saturated) rows, and full rank is equivalent to the spectral verdict.
/// Distinct rows alone do not force a simple spectrum (`cay(Z_6, {1,2})`).
fn record_consistent(r: &TrialRecord) -> bool {
    let n = r.n;
    let rank_ok = match (r.walk_rank, r.distinct_eigenvalues) {
        (Some(a), Some(b)) => {
            a == b
                && r.simple_spectrum.is_none_or(|s| s == (a == n))
                && r.saturated.is_none_or(|s| s == (a == saturation_bound(n)))
        }
        _ => true,
    };
    let rows_ok = match (r.simple_spectrum, r.walk_discrete) {
        (Some(true), Some(w)) => w,
        _ => true,
    } && match (r.saturated, r.walk_saturated) {
        (Some(true), Some(w)) => w,
        _ => true,
    };
    rank_ok && rows_ok
}

/// Per-n failure statistics for the spectral experiments.
fn failure_summary(
    spec: &ExperimentSpec,
    records: &[TrialRecord],
    label: &str,
    failed: impl Fn(&TrialRecord) -> bool,
    consistent: fn(&TrialRecord) -> bool,
    directed: bool,
) -> (Vec<String>, bool) {
    let mut summary = vec![format!(
        "experiment={} model={} directed={} seed={} bound={}/sqrt(n)",
        spec.experiment, spec.model, directed, spec.seed, spec.bound_constant
    )];
    let mut passed = true;
    let mut prev: Option<(usize, f64)> = None;
    for &n in &spec.ns {
        let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
        let m = rs.len() as u64;
        let k = rs.iter().filter(|r| failed(r)).count() as u64;
        let inconsistent = rs.iter().filter(|r| !consistent(r)).count();
        let checked = rs
            .iter()
            .filter(|r| r.walk_discrete.is_some() || r.walk_saturated.is_some())
            .count();
        let f = k as f64 / m as f64;
        let (lo, hi) = wilson_interval(k, m, 1.96);
        let bound = spec.bound_constant / (n as f64).sqrt();
        let within = f <= bound;
        let trend = prev.is_none_or(|(_, prev_hi)| lo <= prev_hi);
        passed &= within && trend && inconsistent == 0;
        summary.push(format!(
            "n={n} trials={m}{} {label}_failures={k} f={f:.6} wilson95=[{lo:.6},{hi:.6}] bound={bound:.6} within_bound={within} trend_ok={trend} walk_checked={checked} inconsistent={inconsistent}",
            if is_exhaustive(spec, n, directed) { " exhaustive" } else { "" },
        ));
        prev = Some((n, hi));
    }
    (summary, passed)
}

impl Experiment for SimpleSpectrum {
    fn name(&self) -> &'static str {
        "simple-spectrum"
    }

    fn run(&self, spec: &ExperimentSpec) -> Result<ExperimentReport> {
        spec.validate()?;
        if !spec.directed {
            return Err(Error::InvalidInput(
                "simple-spectrum needs the digraph model".into(),
            ));
        }
        let mut records = Vec::new();
        for &n in &spec.ns {
            records.extend(run_trials(spec, n, true, |inst| {
                let mut r = base_record(spec, n, &inst);
                r.simple_spectrum = Some(has_simple_spectrum(&inst.set));
                if walk_checked(spec, n, inst.trial) {
                    walk_cross_check(&mut r, &inst.set, true)?;
                }
                Ok(r)
            })?);
        }
        let (summary, passed) = failure_summary(
            spec,
            &records,
            "non_simple",
            |r| r.simple_spectrum == Some(false),
            record_consistent,
            true,
        );
        Ok(ExperimentReport {
            records,
            summary,
            passed,
        })
    }
}

impl Experiment for Saturated {
    fn name(&self) -> &'static str {
        "saturated"
    }

    fn run(&self, spec: &ExperimentSpec) -> Result<ExperimentReport> {
        spec.validate()?;
        if spec.directed {
            return Err(Error::InvalidInput(
                "saturated needs the graph model".into(),
            ));
        }
        let mut records = Vec::new();
        for &n in &spec.ns {
            records.extend(run_trials(spec, n, false, |inst| {
                let mut r = base_record(spec, n, &inst);
                r.saturated = Some(has_saturated_spectrum(&inst.set)?);
                if walk_checked(spec, n, inst.trial) {
                    walk_cross_check(&mut r, &inst.set, false)?;
                }
                Ok(r)
            })?);
        }
        let (summary, passed) = failure_summary(
            spec,
            &records,
            "non_saturated",
            |r| r.saturated == Some(false),
            record_consistent,
            false,
        );
        Ok(ExperimentReport {
            records,
            summary,
            passed,
        })
    }
}

fn is_prime(p: usize) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

impl Experiment for Collision3p {
    fn name(&self) -> &'static str {
        "3p-collision"
    }

    fn run(&self, spec: &ExperimentSpec) -> Result<ExperimentReport> {
        spec.validate()?;
        if !spec.directed {
            return Err(Error::InvalidInput(
                "3p-collision needs the digraph model".into(),
            ));
        }
        for &n in &spec.ns {
            if n % 3 != 0 || !is_prime(n / 3) {
                return Err(Error::InvalidInput(format!(
                    "n = {n} is not 3p for a prime p"
                )));
            }
        }
        let mut records = Vec::new();
        for &n in &spec.ns {
            let p = n / 3;
            records.extend(run_trials(spec, n, true, |inst| {
                let mut r = base_record(spec, n, &inst);
                r.collision = Some(eigenvalue(&inst.set, p) == eigenvalue(&inst.set, 2 * p));
                let s1 = inst.set.elements().iter().filter(|&&j| j % 3 == 1).count();
                let s2 = inst.set.elements().iter().filter(|&&j| j % 3 == 2).count();
                r.balanced = Some(s1 == s2);
                Ok(r)
            })?);
        }
        let mut summary = vec![format!(
            "experiment={} model={} seed={} tolerance={}",
            spec.experiment, spec.model, spec.seed, spec.tolerance
        )];
        let mut passed = true;
        for &n in &spec.ns {
            let p = n / 3;
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
            let m = rs.len() as u64;
            let k = rs.iter().filter(|r| r.collision == Some(true)).count() as u64;
            let mismatched = rs.iter().filter(|r| r.collision != r.balanced).count();
            let measured = k as f64 / m as f64;
            let exact = central_binomial_probability(p as u64);
            let sigma = (exact * (1.0 - exact) / m as f64).sqrt();
            let (lo, hi) = wilson_interval(k, m, 1.96);
            let exhaustive = is_exhaustive(spec, n, true);
            // Sampling noise can put the estimate below the exact value, so the
            // lower bound allows three standard errors.
            let lower_ok = measured >= exact - 3.0 * sigma - 1e-12;
            let upper_ok = measured <= exact * (1.0 + spec.tolerance) + 1e-12;
            passed &= lower_ok && upper_ok && mismatched == 0;
            summary.push(format!(
                "n={n} p={p} trials={m}{} collisions={k} measured={measured:.6} exact={exact:.6} sigma={sigma:.6} wilson95=[{lo:.6},{hi:.6}] lower_ok={lower_ok} upper_ok={upper_ok} collision_ne_balanced={mismatched}",
                if exhaustive { " exhaustive" } else { "" },
            ));
        }
        Ok(ExperimentReport {
            records,
            summary,
            passed,
        })
    }
}

fn random_relabeling(x: &Digraph, rng: &mut rand_chacha::ChaCha8Rng) -> Digraph {
    let mut images: Vec<usize> = (0..x.n()).collect();
    images.shuffle(rng);
    relabel(
        x,
        &Permutation::new(images).expect("shuffle is a bijection"),
    )
    .expect("same order")
}

fn median(v: &mut [u64]) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_unstable();
    let m = v.len();
    Some(if m % 2 == 1 {
        v[m / 2] as f64
    } else {
        (v[m / 2 - 1] + v[m / 2]) as f64 / 2.0
    })
}

impl Experiment for CanonPipeline {
    fn name(&self) -> &'static str {
        "canon-pipeline"
    }

    fn run(&self, spec: &ExperimentSpec) -> Result<ExperimentReport> {
        spec.validate()?;
        let mode = if spec.directed { "digraph" } else { "graph" };
        let opts = CanonOptions {
            seed: spec.seed,
            ..CanonOptions::default()
        };
        let canon = canonizer(mode, opts).expect("registered mode");
        let cfg = OracleConfig::with_bound(spec.oracle_bound);
        let mut records = Vec::new();
        let mut times: Vec<(usize, Vec<u64>)> = Vec::new();
        for &n in &spec.ns {
            let rs = run_trials(spec, n, spec.directed, |mut inst| {
                let mut r = base_record(spec, n, &inst);
                let start = Instant::now();
                let first = canon.canonize(&inst.graph)?;
                let elapsed = start.elapsed().as_micros() as u64;
                let mut consistent = true;
                for _ in 0..spec.relabelings {
                    let y = random_relabeling(&inst.graph, &mut inst.rng);
                    let again = canon.canonize(&y)?;
                    consistent &=
                        again.is_success() == first.is_success() && again.form() == first.form();
                }
                r.canon_success = Some(first.is_success());
                r.canon_consistent = Some(consistent);
                r.give_up = first.give_up_reason().map(|g| g.code().to_string());
                if spec.directed {
                    r.simple_spectrum = Some(has_simple_spectrum(&inst.set));
                } else {
                    r.saturated = Some(has_saturated_spectrum(&inst.set)?);
                }
                if n <= 32 {
                    r.ccr_success = Some(canonical_cayley_representation(&inst.graph).is_success());
                }
                if n <= spec.oracle_bound {
                    r.firm = Some(is_firm(&inst.set, &cfg)?);
                }
                r.multiplier_free = Some(is_multiplier_free(&inst.set));
                r.time_us = Some(elapsed);
                Ok(r)
            })?;
            times.push((n, rs.iter().filter_map(|r| r.time_us).collect()));
            records.extend(rs);
        }

        let mut summary = vec![format!(
            "experiment={} mode={} model={} seed={} relabelings={} bound=1-{}/sqrt(n)",
            spec.experiment, mode, spec.model, spec.seed, spec.relabelings, spec.bound_constant
        )];
        let mut passed = true;
        let mut medians = Vec::new();
        for (n, mut ts) in times {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
            let m = rs.len() as u64;
            let ok = rs.iter().filter(|r| r.canon_success == Some(true)).count() as u64;
            let inconsistent = rs
                .iter()
                .filter(|r| r.canon_consistent == Some(false))
                .count();
            // A simple (digraphs) or saturated (graphs) spectrum guarantees success.
            let unexplained = rs
                .iter()
                .filter(|r| {
                    let sufficient = r.simple_spectrum.or(r.saturated) == Some(true);
                    sufficient && r.canon_success != Some(true)
                })
                .count();
            let ccr_missing = rs
                .iter()
                .filter(|r| {
                    spec.directed && r.canon_success == Some(true) && r.ccr_success == Some(false)
                })
                .count();
            let rate = ok as f64 / m as f64;
            let (lo, hi) = wilson_interval(ok, m, 1.96);
            let bound = 1.0 - spec.bound_constant / (n as f64).sqrt();
            let within = rate >= bound;
            passed &= within && inconsistent == 0 && unexplained == 0 && ccr_missing == 0;
            let mut line = format!(
                "n={n} trials={m} success={ok} rate={rate:.6} wilson95=[{lo:.6},{hi:.6}] bound={bound:.6} within_bound={within} inconsistent={inconsistent} spectral_sufficiency_violations={unexplained} ccr_dominance_violations={ccr_missing}"
            );
            if spec.timings {
                let med = median(&mut ts).unwrap_or(0.0);
                medians.push((n as f64, med.max(1.0)));
                line.push_str(&format!(" median_us={med:.1}"));
            }
            summary.push(line);
        }
        if spec.timings {
            match log_log_slope(&medians) {
                Some(slope) => {
                    passed &= slope <= 2.4;
                    summary.push(format!(
                        "log_log_slope={slope:.3} slope_ok={}",
                        slope <= 2.4
                    ));
                }
                None => summary.push("log_log_slope=n/a".into()),
            }
        } else {
            for r in &mut records {
                r.time_us = None;
            }
            summary.push("log_log_slope=not measured (timings disabled)".into());
        }
        Ok(ExperimentReport {
            records,
            summary,
            passed,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 10, 1.96);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.2775).abs() < 1e-3);
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }

    #[test]
    fn central_binomial_values() {
        assert!((central_binomial_probability(2) - 0.375).abs() < 1e-15);
        assert!((central_binomial_probability(5) - 252.0 / 1024.0).abs() < 1e-15);
        assert!((central_binomial_probability(11) - 705432.0 / 4194304.0).abs() < 1e-15);
    }

    #[test]
    fn slope_of_a_power_law() {
        let pts: Vec<(f64, f64)> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powi(2)))
            .collect();
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert!(log_log_slope(&pts[..1]).is_none());
    }

    #[test]
    fn exhaustive_small_orders() {
        let spec = ExperimentSpec::new("simple-spectrum", vec![2, 3], 100);
        let report = run_experiment(&spec).unwrap();
        let f3: Vec<&TrialRecord> = report.records.iter().filter(|r| r.n == 3).collect();
        assert_eq!(f3.len(), 4);
        let fails: Vec<&str> = f3
            .iter()
            .filter(|r| r.simple_spectrum == Some(false))
            .map(|r| r.set.as_str())
            .collect();
        // The empty set fails too: its three eigenvalues are all 0.
        assert_eq!(fails, ["3:", "3: 1,2"]);
        assert_eq!(report.records.iter().filter(|r| r.n == 2).count(), 2);
        assert!(report.passed);

        let mut spec = ExperimentSpec::new("saturated", vec![5], 100);
        spec.directed = false;
        let report = run_experiment(&spec).unwrap();
        let saturated = report
            .records
            .iter()
            .filter(|r| r.saturated == Some(true))
            .count();
        // {1,4} and {2,3} are 5-cycles; the empty set and K5 have 1 and 2 eigenvalues.
        assert_eq!((report.records.len(), saturated), (4, 2));
    }

    #[test]
    fn collision_exhaustive_is_exact() {
        let spec = ExperimentSpec::new("3p-collision", vec![6], 1000);
        let report = run_experiment(&spec).unwrap();
        let k = report
            .records
            .iter()
            .filter(|r| r.collision == Some(true))
            .count();
        assert_eq!(k * 16, 6 * report.records.len());
        assert!(report.passed);
        let bad = ExperimentSpec::new("3p-collision", vec![12], 10);
        assert!(run_experiment(&bad).is_err());
    }

    #[test]
    fn output_is_deterministic() {
        let mut spec = ExperimentSpec::new("canon-pipeline", vec![9, 16], 20);
        spec.relabelings = 2;
        let a = run_experiment(&spec).unwrap().to_csv_string().unwrap();
        let b = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap()
            .install(|| run_experiment(&spec).unwrap().to_csv_string().unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with("n,trial,seed,model,set,size,"));
        assert!(a.contains("\n# result: "));
    }

    #[test]
    fn spec_validation() {
        assert!(ExperimentSpec::new("simple-spectrum", vec![], 1)
            .validate()
            .is_err());
        assert!(ExperimentSpec::new("simple-spectrum", vec![4], 0)
            .validate()
            .is_err());
        let mut s = ExperimentSpec::new("simple-spectrum", vec![4], 1);
        s.model = "bogus".into();
        assert!(s.validate().is_err());
        assert!(run_experiment(&ExperimentSpec::new("bogus", vec![4], 1)).is_err());
        for e in experiments() {
            assert_eq!(experiment(e.name()).unwrap().name(), e.name());
        }
    }
}
