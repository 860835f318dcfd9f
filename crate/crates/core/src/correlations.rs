//! Expectations of diagonal observables in VMD states.
//!
//! A normalized VMD state defines a probability measure on tilings in which
//! every dimer carries weight `r = λ²`. The measure factorizes over the tiles
//! of the root that are not monomers, and along each monomer run it is a
//! two-step Markov recursion over monomer slots. Expectations of products of
//! single-site factors are therefore computed in `O(L)` time without building
//! any state vector, which makes chains of thousands of sites cheap.
//!
//! The dislocation states `ω_{3k}` of the infinite chain have a single void at
//! site `3k` and pure monomer runs on either side; closed forms for their
//! densities and pair correlations are provided together with smeared
//! mixtures over `k`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::SpectralConstants;
use crate::error::{Error, Result};
use crate::tiling::{DominoKind, LeftBoundary, RightBoundary, RootTiling};

/// An observable `Π_x w_x(n_x)` with a weight pair `[w(0), w(1)]` per site.
///
/// Sites without an entry carry the weight 1 for both occupations.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct DiagonalObservable {
    factors: BTreeMap<usize, [f64; 2]>,
}

impl DiagonalObservable {
    /// The identity.
    pub fn identity() -> Self {
        DiagonalObservable::default()
    }

    /// The occupation number `n_x`.
    pub fn density(x: usize) -> Self {
        DiagonalObservable::identity().with_factor(x, [0.0, 1.0])
    }

    /// The product `n_x n_y`.
    pub fn pair(x: usize, y: usize) -> Self {
        DiagonalObservable::density(x).with_factor(y, [0.0, 1.0])
    }

    /// The sign `(−1)^{n_x}`.
    pub fn parity(x: usize) -> Self {
        DiagonalObservable::identity().with_factor(x, [1.0, -1.0])
    }

    /// Multiplies the observable by the site factor `w(n_x)`.
    pub fn with_factor(mut self, x: usize, w: [f64; 2]) -> Self {
        let entry = self.factors.entry(x).or_insert([1.0, 1.0]);
        entry[0] *= w[0];
        entry[1] *= w[1];
        self
    }

    /// Product of two observables.
    pub fn product(&self, other: &DiagonalObservable) -> DiagonalObservable {
        other.factors.iter().fold(self.clone(), |acc, (&x, &w)| acc.with_factor(x, w))
    }

    /// Weight of occupation `n` at site `x`.
    pub fn weight(&self, x: usize, n: bool) -> f64 {
        self.factors.get(&x).map_or(1.0, |w| w[usize::from(n)])
    }

    /// Sites carrying a nontrivial factor, ascending.
    pub fn sites(&self) -> impl Iterator<Item = usize> + '_ {
        self.factors.keys().copied()
    }

    /// Operator norm `Π_x max(|w_x(0)|, |w_x(1)|)`.
    pub fn norm(&self) -> f64 {
        self.factors.values().map(|w| w[0].abs().max(w[1].abs())).product()
    }

    /// The same observable moved by `shift` sites to the right.
    pub fn shifted(&self, shift: usize) -> DiagonalObservable {
        DiagonalObservable { factors: self.factors.iter().map(|(&x, &w)| (x + shift, w)).collect() }
    }

    /// Weight of the occupation pattern `bits` (bit `i` ↔ site `start + i`)
    /// on the sites `start .. start + len`.
    fn pattern_weight(&self, start: usize, len: usize, bits: u64) -> f64 {
        self.factors
            .range(start..start + len)
            .map(|(&x, w)| w[((bits >> (x - start)) & 1) as usize])
            .product()
    }
}

/// `⟨n_{x_1}⋯n_{x_k}⟩`-style expectation `⟨ψ, O ψ⟩/‖ψ‖²` in the VMD state of a root.
///
/// Sites are 1-based positions of the root's interval.
pub fn diag_expectation(root: &RootTiling, lambda: f64, obs: &DiagonalObservable) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    let l = root.interval_length();
    if let Some(x) = obs.sites().find(|&x| x == 0 || x > l) {
        return Err(Error::InvalidArgument(format!("observable site {x} outside [1, {l}]")));
    }
    let r = lambda * lambda;
    let tiles = root.tiles();
    let mut value = 1.0;
    let mut i = 0;
    while i < tiles.len() {
        if tiles[i].kind != DominoKind::Monomer {
            let t = tiles[i];
            value *= obs.pattern_weight(t.start, t.kind.length(), t.kind.pattern());
            i += 1;
            continue;
        }
        let mut slots = Vec::new();
        while i < tiles.len() {
            let t = tiles[i];
            match t.kind {
                DominoKind::Monomer => slots.push((t.start, 3)),
                DominoKind::Right1Monomer | DominoKind::Right2Monomer => slots.push((t.start, t.kind.length())),
                _ => break,
            }
            i += 1;
            if t.kind != DominoKind::Monomer {
                break;
            }
        }
        value *= run_expectation(&slots, r, obs);
        if value == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(value)
}

/// Expectation over one monomer run given as `(start, length)` slots.
///
/// With `b_i` the partition function of the first `i` slots and `a_i` the
/// weighted one, the ratios `q_i = a_i/b_i` obey
/// `q_i = q_{i−1} ρ_i w_mono(i) + q_{i−2} r ρ_{i−1} ρ_i w_dimer(i−1, i)`,
/// where `ρ_i = b_{i−1}/b_i ∈ (0, 1]`. No quantity can overflow.
fn run_expectation(slots: &[(usize, usize)], r: f64, obs: &DiagonalObservable) -> f64 {
    let (mut q_prev, mut q) = (1.0, 1.0);
    // ρ_{i−1}, starting from ρ_1 = b_0/b_1 = 1.
    let mut rho_prev = 1.0;
    for (i, &(start, len)) in slots.iter().enumerate() {
        let mono = obs.pattern_weight(start, len, 0b1);
        if i == 0 {
            q = mono;
            continue;
        }
        let rho = 1.0 / (1.0 + r * rho_prev);
        let (pstart, plen) = slots[i - 1];
        let dimer = obs.pattern_weight(pstart, plen + len, 0b110);
        let q_next = q * rho * mono + q_prev * r * rho_prev * rho * dimer;
        q_prev = q;
        q = q_next;
        rho_prev = rho;
    }
    q
}

/// Truncated correlation `⟨n_x n_y⟩ − ⟨n_x⟩⟨n_y⟩`.
pub fn truncated_pair(root: &RootTiling, lambda: f64, x: usize, y: usize) -> Result<f64> {
    if x == y {
        return Err(Error::InvalidArgument("truncated pair needs distinct sites".into()));
    }
    let e = |o: DiagonalObservable| diag_expectation(root, lambda, &o);
    Ok(e(DiagonalObservable::pair(x, y))? - e(DiagonalObservable::density(x))? * e(DiagonalObservable::density(y))?)
}

/// The decay rate `c(λ) = (1/3) ln((√(4λ²+1)+1)/(√(4λ²+1)−1))`.
pub fn decay_rate(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidArgument(format!("decay rate needs finite lambda > 0, got {lambda}")));
    }
    let d = (4.0 * lambda * lambda + 1.0).sqrt();
    // (d+1)/(d−1) = (d+1)²/(4λ²) avoids cancellation for small λ.
    Ok(((d + 1.0).powi(2) / (4.0 * lambda * lambda)).ln() / 3.0)
}

/// Densities of the squeezed Tao–Thouless state on the classes `3k+1`
/// (`class = 0`) and `3k+1 ± 1` (`class = ±1`).
pub fn tt_density_exact(class: i32, r: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(Error::InvalidArgument(format!("r must be nonnegative, got {r}")));
    }
    let center = 1.0 / (4.0 * r + 1.0).sqrt();
    match class {
        0 => Ok(center),
        1 | -1 => Ok(0.5 * (1.0 - center)),
        _ => Err(Error::InvalidArgument(format!("site class must be -1, 0 or 1, got {class}"))),
    }
}

/// Smallest separation used by default decay fits.
pub const FIT_MIN_SEPARATION: usize = 30;
/// Largest separation used by default decay fits.
pub const FIT_MAX_SEPARATION: usize = 150;
/// Truncated correlations below this magnitude are dropped from fits.
pub const FIT_FLOOR: f64 = 1e-13;

/// Result of a least-squares fit of `ln |truncated|` against separation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Magnitude of the fitted slope.
    pub rate: f64,
    /// Number of points used.
    pub points: usize,
}

/// Fits the exponential decay of truncated density pairs.
///
/// Every pair must have a separation divisible by 3 so that both sites lie in
/// the same residue class. Pairs with `|truncated| < 1e−13` are discarded.
pub fn fit_decay(root: &RootTiling, lambda: f64, pairs: &[(usize, usize)]) -> Result<DecayFit> {
    if let Some(&(x, y)) = pairs.iter().find(|&&(x, y)| x == y || x.abs_diff(y) % 3 != 0) {
        return Err(Error::InvalidArgument(format!("pair ({x}, {y}) is not a same-residue pair")));
    }
    let samples: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(x, y)| Ok((x.abs_diff(y) as f64, truncated_pair(root, lambda, x, y)?.abs())))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .filter(|&(_, v)| v >= FIT_FLOOR)
        .map(|(d, v)| (d, v.ln()))
        .collect();
    if samples.len() < 4 {
        return Err(Error::InvalidArgument(format!(
            "only {} usable points for the decay fit, need 4",
            samples.len()
        )));
    }
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidArgument("decay fit needs at least two separations".into()));
    }
    Ok(DecayFit { rate: (sxy / sxx).abs(), points: samples.len() })
}

/// Same-residue pairs `(x, x + d)` for `d = 30, 33, …, 150`, with `x ≡ 1 (mod 3)`
/// placed so that the pairs sit in the middle of an interval of `l` sites.
pub fn default_fit_pairs(l: usize) -> Result<Vec<(usize, usize)>> {
    if l < FIT_MAX_SEPARATION + 6 {
        return Err(Error::InvalidArgument(format!("interval of {l} sites too short for the default fit")));
    }
    let x0 = 3 * ((l - FIT_MAX_SEPARATION) / 6) + 1;
    Ok((FIT_MIN_SEPARATION..=FIT_MAX_SEPARATION).step_by(3).map(|d| (x0, x0 + d)).collect())
}

/// Right side `8 ‖A‖‖B‖ e^{−c(λ)(d − 20)/2}` of the clustering bound for
/// single-site observables of unit norm at distance `d`.
pub fn clustering_bound(lambda: f64, d: usize) -> Result<f64> {
    Ok(8.0 * (-decay_rate(lambda)? * (d as f64 - 20.0) / 2.0).exp())
}

/// The string `Π_{j=k+1}^{ℓ−1} (−1)^{n_{3j+2} + n_{3j}}`.
pub fn string_operator(k: usize, l: usize) -> DiagonalObservable {
    (k + 1..l).fold(DiagonalObservable::identity(), |acc, j| {
        acc.with_factor(3 * j + 2, [1.0, -1.0]).with_factor(3 * j, [1.0, -1.0])
    })
}

/// Expectations of `O^z_{3k,3ℓ} = −(n_{3k+2} − n_{3k}) S (n_{3ℓ+2} − n_{3ℓ})`
/// and of the bare string `S`, with sites numbered as in the root.
pub fn string_order(root: &RootTiling, k: usize, l: usize, lambda: f64) -> Result<(f64, f64)> {
    if k == 0 || l <= k {
        return Err(Error::InvalidArgument(format!("string order needs 1 <= k < l, got k = {k}, l = {l}")));
    }
    let s = string_operator(k, l);
    let bare = diag_expectation(root, lambda, &s)?;
    let mut oz = 0.0;
    for (a, ca) in [(3 * k + 2, 1.0), (3 * k, -1.0)] {
        for (b, cb) in [(3 * l + 2, 1.0), (3 * l, -1.0)] {
            let term = s.product(&DiagonalObservable::pair(a, b));
            oz -= ca * cb * diag_expectation(root, lambda, &term)?;
        }
    }
    Ok((oz, bare))
}

/// Limits of the two string order parameters at `r = λ²`.
pub fn string_order_limits(r: f64) -> Result<(f64, f64)> {
    let c = SpectralConstants::new(r)?;
    let d2 = c.delta_mu * c.delta_mu;
    Ok(((c.delta_mu - 1.0).powi(2) / d2, 1.0 / d2))
}

fn check_r(r: f64) -> Result<SpectralConstants> {
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("dislocation formulas need r > 0, got {r}")));
    }
    SpectralConstants::new(r)
}

/// `ω_{3k}(n_{3j})`, the density at site `3j` in the state with a void at `3k`.
pub fn dislocation_expectation(k: i64, j: i64, r: f64) -> Result<f64> {
    let c = check_r(r)?;
    let f = (1.0 - c.mu.powi((j - k).unsigned_abs() as i32)) / c.delta_mu;
    Ok(match j.cmp(&k) {
        std::cmp::Ordering::Less => f,
        std::cmp::Ordering::Equal => 0.0,
        std::cmp::Ordering::Greater => f * r / c.mu_plus,
    })
}

/// `ω_{3k}(n_0 n_{3j})` for `j > 1`.
pub fn dislocation_pair(k: i64, j: i64, r: f64) -> Result<f64> {
    if j <= 1 {
        return Err(Error::InvalidArgument(format!("dislocation pair needs j > 1, got {j}")));
    }
    let c = check_r(r)?;
    let d2 = c.delta_mu * c.delta_mu;
    let p = |e: i64| c.mu.powi(e as i32);
    Ok(if j < k {
        (1.0 - p(j)) * (1.0 - p(k - j)) / d2
    } else if k >= 0 {
        dislocation_expectation(k, 0, r)? * dislocation_expectation(k, j, r)?
    } else {
        r * r / (c.mu_plus * c.mu_plus * d2) * (1.0 - p(j - 1)) * (1.0 - p(-k))
    })
}

/// The finite-volume dislocation root: `n + k` monomers, a void, `n − k` monomers.
///
/// Site `x` of the infinite chain sits at position `x + 3n + 1` of this root.
pub fn dislocation_root(n: usize, k: i64) -> Result<RootTiling> {
    if k.unsigned_abs() as usize > n {
        return Err(Error::InvalidArgument(format!("|k| = {} exceeds n = {n}", k.abs())));
    }
    let left = (n as i64 + k) as usize;
    let right = (n as i64 - k) as usize;
    let mut interior = vec![DominoKind::Monomer; left];
    interior.push(DominoKind::Void);
    interior.extend(std::iter::repeat_n(DominoKind::Monomer, right));
    RootTiling::new(LeftBoundary::Empty, interior, RightBoundary::Empty)
}

/// `ω_{3k}(O)` evaluated on the finite dislocation root with `n` monomers on
/// each side of the origin; `obs` uses infinite-chain site labels.
pub fn dislocation_dp(n: usize, k: i64, lambda: f64, sites: &[i64]) -> Result<f64> {
    let root = dislocation_root(n, k)?;
    let offset = 3 * n as i64 + 1;
    let mut obs = DiagonalObservable::identity();
    for &x in sites {
        let pos = x + offset;
        if pos < 1 {
            return Err(Error::InvalidArgument(format!("site {x} left of the finite chain")));
        }
        obs = obs.with_factor(pos as usize, [0.0, 1.0]);
    }
    diag_expectation(&root, lambda, &obs)
}

/// Mixing weights `|c_k|²` of a smeared dislocation state.
///
/// Besides finitely many explicit weights a mass may sit at `k = +∞`, where
/// all dislocation expectations take their limits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DislocationWeights {
    weights: Vec<(i64, f64)>,
    tail_mass: f64,
}

impl DislocationWeights {
    /// Explicit weights `|c_k|²` and a mass at `k = +∞`; the total must be 1 within 1e−12.
    pub fn new(mut weights: Vec<(i64, f64)>, tail_mass: f64) -> Result<Self> {
        if weights.iter().any(|w| !(w.1 >= 0.0)) || !(tail_mass >= 0.0) {
            return Err(Error::InvalidArgument("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().map(|w| w.1).sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}, not 1")));
        }
        weights.sort_by_key(|w| w.0);
        Ok(DislocationWeights { weights, tail_mass })
    }

    /// A single dislocation at `k`.
    pub fn single(k: i64) -> Self {
        DislocationWeights { weights: vec![(k, 1.0)], tail_mass: 0.0 }
    }

    /// `c_k ∝ 1/max(k, 1)` for `k ≥ 0`: explicit weights below `cutoff`, the
    /// remaining mass `Σ_{k ≥ cutoff} k^{−2}` placed at infinity.
    pub fn inverse_k(cutoff: usize) -> Result<Self> {
        if cutoff < 2 {
            return Err(Error::InvalidArgument("cutoff must be at least 2".into()));
        }
        let raw: Vec<(i64, f64)> = (0..cutoff).map(|k| (k as i64, 1.0 / (k.max(1) as f64).powi(2))).collect();
        // Euler–Maclaurin for Σ_{k≥K} k^{−2}.
        let kf = cutoff as f64;
        let tail = 1.0 / kf + 0.5 / (kf * kf) + 1.0 / (6.0 * kf.powi(3));
        let z: f64 = raw.iter().map(|w| w.1).sum::<f64>() + tail;
        DislocationWeights::new(raw.into_iter().map(|(k, w)| (k, w / z)).collect(), tail / z)
    }

    /// Explicit weights in ascending `k`.
    pub fn weights(&self) -> &[(i64, f64)] {
        &self.weights
    }

    /// Mass at `k = +∞`.
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// `p(j) = Σ_{k ≤ j} |c_k|²`.
    pub fn cumulative(&self, j: i64) -> f64 {
        self.weights.iter().filter(|w| w.0 <= j).map(|w| w.1).sum()
    }
}

/// Truncated correlation `ω(n_0 n_{3j}) − ω(n_0) ω(n_{3j})` in the smeared state.
pub fn smeared_correlation(w: &DislocationWeights, j: i64, r: f64) -> Result<f64> {
    if j <= 1 {
        return Err(Error::InvalidArgument(format!("smeared correlation needs j > 1, got {j}")));
    }
    let c = check_r(r)?;
    let mut pair = w.tail_mass * (1.0 - c.mu.powi(j as i32)) / (c.delta_mu * c.delta_mu);
    let mut at_zero = w.tail_mass / c.delta_mu;
    let mut at_j = w.tail_mass / c.delta_mu;
    for &(k, p) in w.weights() {
        pair += p * dislocation_pair(k, j, r)?;
        at_zero += p * dislocation_expectation(k, 0, r)?;
        at_j += p * dislocation_expectation(k, j, r)?;
    }
    Ok(pair - at_zero * at_j)
}
