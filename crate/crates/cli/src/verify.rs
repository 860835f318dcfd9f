//! The `verify` subcommand: quick invariant checks per module, each reported
//! with the measured value, its limit and the remaining margin.

use clap::ValueEnum;
use fqh_core::bounds::*;
use fqh_core::correlations::*;
use fqh_core::hamiltonian::{apply_to_state, boundary_mode_block, build, Boundary, ModelParams};
use fqh_core::spectra::*;
use fqh_core::tiling::*;
use fqh_core::vmd_states::{norm_sq_closed, norm_sq_recursive, vmd_state};
use num_bigint::BigUint;
use serde_json::json;

use crate::output::{fmt_f64, Table};
use crate::{emit_table, CliError, Common};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    All,
    Tiling,
    VmdStates,
    Hamiltonian,
    Spectra,
    Bounds,
    Correlations,
}

/// One checked invariant: `value ≤ limit` passes with margin `limit − value`.
struct Check {
    suite: &'static str,
    name: String,
    value: f64,
    limit: f64,
}

impl Check {
    fn passed(&self) -> bool {
        self.value <= self.limit
    }
}

struct Checks {
    suite: &'static str,
    items: Vec<Check>,
}

impl Checks {
    fn new(suite: &'static str) -> Self {
        Checks { suite, items: Vec::new() }
    }

    fn at_most(&mut self, name: impl Into<String>, value: f64, limit: f64) {
        self.items.push(Check { suite: self.suite, name: name.into(), value, limit });
    }

    /// Records a count of violations, which must be zero.
    fn none(&mut self, name: impl Into<String>, violations: usize) {
        self.at_most(name, violations as f64, 0.0);
    }
}

fn tiling() -> Result<Checks, CliError> {
    let mut c = Checks::new("tiling");
    let bad = (1..=14).filter(|&l| BigUint::from(enumerate_roots(l).len()) != count_roots(l)).count();
    c.none("enumeration matches count for L <= 14", bad);
    let mut not_injective = 0;
    for l in 1..=12 {
        for root in enumerate_roots(l) {
            for t in expand_root(&root) {
                let parsed = parse_configuration(&particle_content(&t));
                if parsed.as_ref() != Some(&t) || root_of(&t) != root {
                    not_injective += 1;
                }
            }
        }
    }
    c.none("configurations determine tilings and roots for L <= 12", not_injective);
    let ratio = {
        let q = count_roots(60) * BigUint::from(10u64).pow(15) / count_roots(59);
        q.to_string().parse::<f64>().unwrap_or(f64::NAN) / 1e15
    };
    let mut mu: f64 = 1.5;
    for _ in 0..50 {
        mu -= (mu.powi(3) - mu * mu - 1.0) / (3.0 * mu * mu - 2.0 * mu);
    }
    c.at_most("growth ratio at L = 60 vs root of mu^3 - mu^2 - 1", (ratio - mu).abs(), 1e-3);
    Ok(c)
}

fn vmd_states() -> Result<Checks, CliError> {
    let mut c = Checks::new("vmd_states");
    let mut residual: f64 = 0.0;
    let mut overlap: f64 = 0.0;
    for l in 8..=10 {
        let roots = enumerate_roots(l);
        for lambda in [0.5, 1.0, 2.0] {
            let p = ModelParams::new(lambda, 1.0)?;
            let states = roots.iter().map(|r| vmd_state(r, lambda)).collect::<Result<Vec<_>, _>>()?;
            for (i, a) in states.iter().enumerate() {
                residual = residual.max((apply_to_state(&p, Boundary::Open, a)?.norm() / a.norm()).abs());
                for b in &states[i + 1..] {
                    overlap = overlap.max(a.dot(b).abs() / (a.norm() * b.norm()));
                }
            }
        }
    }
    c.at_most("max |H psi|/|psi| over roots at L = 8..10", residual, 1e-12);
    c.at_most("max normalized overlap of distinct VMD states", overlap, 1e-12);
    let mut norm_diff: f64 = 0.0;
    for r in [0.1, 1.0, 4.0] {
        for n in 0..=40 {
            let closed = norm_sq_closed(n, r);
            norm_diff = norm_diff.max((closed - norm_sq_recursive(n, r)).abs() / closed);
        }
    }
    c.at_most("closed-form vs recursive norms (relative)", norm_diff, 1e-12);
    Ok(c)
}

fn hamiltonian() -> Result<Checks, CliError> {
    let mut c = Checks::new("hamiltonian");
    let p = ModelParams::physical(1.0)?;
    for bc in [Boundary::Open, Boundary::Periodic, Boundary::Dirichlet] {
        let h = build(10, &p, bc)?;
        c.at_most(format!("asymmetry of H ({})", bc.name()), h.asymmetry(), 1e-14);
    }
    let (_, modes) = boundary_mode_block(&p);
    let ev = full_spectrum(9, &p, Boundary::Open)?;
    let miss = modes
        .iter()
        .map(|m| ev.iter().map(|e| (e - m).abs()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    c.at_most("boundary modes in the L = 9 spectrum", miss, 1e-10);
    let g = spectral_gap(9, &ModelParams::new(0.0, 0.3)?, Boundary::Open, None)?;
    c.at_most("gap at lambda = 0 and kappa = 0.3", (g - 0.3).abs(), 1e-10);
    Ok(c)
}

fn spectra() -> Result<Checks, CliError> {
    let mut c = Checks::new("spectra");
    let p = ModelParams::new(1.0, 1.0)?;
    let mut bad = 0;
    for (l, expected) in [(5, 11), (6, 17), (7, 26), (8, 37)] {
        let ev = full_spectrum(l, &p, Boundary::Open)?;
        if ev.iter().filter(|&&e| e < 1e-10).count() != expected {
            bad += 1;
        }
    }
    c.none("kernel dimensions 11 17 26 37 at L = 5..8", bad);
    let (_, op) = fqh_core::hamiltonian::build_sector(10, 3, &p, Boundary::Open)?;
    let dense = dense_spectrum(&op)?;
    let lanczos = lowest_eigenvalues(&op, 6, 1e-10)?;
    let diff = lanczos.iter().zip(&dense).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    c.at_most("Lanczos vs dense at L = 10 and N = 3", diff, 1e-8);
    Ok(c)
}

fn bounds() -> Result<Checks, CliError> {
    let mut c = Checks::new("bounds");
    let grid: Vec<f64> = (0..=2809).map(|i| i as f64 * 0.01).collect();
    let curve = FCurve::new(grid, F_CERT_NMAX)?;
    let worst = curve.certified().map_or(f64::INFINITY, |v| v.into_iter().fold(0.0, f64::max));
    c.at_most("certified f on [0; 28.09] below 1/3", worst, 1.0 / 3.0);
    c.at_most("decrease of the f curve", curve.max_decrease(), 1e-12);
    for l in [11, 12] {
        for lambda in [0.5, 1.0, 2.0] {
            let m = martingale_epsilon(l, lambda)?;
            let f = f_approx(lambda * lambda, F_CERT_NMAX)?.certified.unwrap_or(f64::NAN);
            c.at_most(format!("epsilon^2 <= certified f at L = {l} and lambda = {lambda}"), m.epsilon_sq, f + 1e-8);
            c.at_most(
                format!("reduction identity at L = {l} and lambda = {lambda}"),
                (m.epsilon_sq - m.reduced_sq).abs(),
                1e-10,
            );
        }
    }
    for lambda in [0.5, 1.0, 2.0] {
        let p = ModelParams::physical(lambda)?;
        let bound = obc_gap_bound(lambda, &small_gaps(&p)?)?;
        let gap = spectral_gap(11, &p, Boundary::Open, None)?;
        c.at_most(format!("open-chain bound <= gap at L = 11 and lambda = {lambda}"), bound.value, gap);
    }
    Ok(c)
}

fn correlations() -> Result<Checks, CliError> {
    let mut c = Checks::new("correlations");
    let root = RootTiling::pure_monomer(400)?;
    let pairs = default_fit_pairs(400)?;
    for lambda in [0.5, 1.0, 2.0] {
        let rate = decay_rate(lambda)?;
        let fit = fit_decay(&root, lambda, &pairs)?;
        c.at_most(format!("fitted rate within 5% of c at lambda = {lambda}"), (fit.rate - rate).abs(), 0.05 * rate);
    }
    let center = diag_expectation(&root, 1.0, &DiagonalObservable::density(199))?;
    c.at_most("bulk density at r = 1", (center - 1.0 / 5f64.sqrt()).abs(), 1e-8);
    for r in [0.5f64, 1.0, 2.0] {
        let (oz, bare) = string_order(&root, 16, 116, r.sqrt())?;
        let (ez, eb) = string_order_limits(r)?;
        c.at_most(format!("string order at r = {r}"), (oz - ez).abs().max((bare - eb).abs()), 1e-6);
    }
    let mut worst: f64 = 0.0;
    for r in [0.5f64, 1.0, 2.0] {
        for k in -3i64..=3 {
            for j in (2i64..=40).step_by(2) {
                let dp = dislocation_dp(200, k, r.sqrt(), &[0, 3 * j])?;
                worst = worst.max((dp - dislocation_pair(k, j, r)?).abs());
            }
        }
    }
    c.at_most("dislocation closed forms vs recursion", worst, 1e-8);
    Ok(c)
}

pub fn run(suite: Suite, common: &Common) -> Result<(), CliError> {
    let suites: Vec<fn() -> Result<Checks, CliError>> = match suite {
        Suite::All => vec![tiling, vmd_states, hamiltonian, spectra, bounds, correlations],
        Suite::Tiling => vec![tiling],
        Suite::VmdStates => vec![vmd_states],
        Suite::Hamiltonian => vec![hamiltonian],
        Suite::Spectra => vec![spectra],
        Suite::Bounds => vec![bounds],
        Suite::Correlations => vec![correlations],
    };
    let mut table = Table::new(["suite", "check", "passed", "value", "limit", "margin"]);
    let mut failures = 0;
    for s in suites {
        for check in s()?.items {
            failures += usize::from(!check.passed());
            table.push(vec![
                check.suite.to_string(),
                check.name.clone(),
                check.passed().to_string(),
                fmt_f64(check.value),
                fmt_f64(check.limit),
                fmt_f64(check.limit - check.value),
            ]);
        }
    }
    emit_table(common, &format!("verify {suite:?}"), &table, json!({"failures": failures}))?;
    if failures > 0 {
        return Err(CliError::Numeric(format!("{failures} check(s) failed")));
    }
    Ok(())
}
