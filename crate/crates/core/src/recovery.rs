//! Local recovery of erased symbols and its failure probability on an iid
//! erasure channel.
//!
//! A symbol at `target` is recoverable from one of its recovery sets (the
//! other `q - 1` points on a curve or line through it) when at least `d` of
//! those points are known: the restriction is a polynomial of degree `< d`,
//! so `d` samples pin it down.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::{point_index, CodeInstance, CodeSpec, Family};
use crate::error::{Error, Result};
use crate::gf::FieldElement;
use crate::monomial::{Curve, Line};
use crate::poly::lagrange_eval;

/// A coordinate `(x, y)` of the evaluation plane.
pub type Point = (FieldElement, FieldElement);

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

/// Trials handed to one worker at a time.
const CHUNK: u64 = 2048;

/// The curve or line a recovery set lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Member {
    Curve(Curve),
    Line(Line),
}

/// One point of a recovery set, with its parameter along the member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SetPoint {
    pub param: FieldElement,
    pub point: Point,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecoverySet {
    pub member: Member,
    /// Parameter of the target along the member.
    pub target_param: FieldElement,
    /// The `q - 1` other points, ordered by parameter.
    pub others: Vec<SetPoint>,
}

/// All recovery sets of `target`: `q^2` curves for the quadratic-curve code,
/// `q + 1` lines for the line-lifted code.
pub fn recovery_sets(spec: &CodeSpec, target: Point) -> Vec<RecoverySet> {
    let ctx = spec.field();
    let q = spec.q();
    let (x0, y0) = target;
    let along = |param_is_x: bool, member: Member, y_of: &dyn Fn(FieldElement) -> Point| {
        let others = ctx
            .elements()
            .map(|t| (t, y_of(t)))
            .filter(|&(_, p)| p != target)
            .map(|(param, point)| SetPoint {
                param,
                point,
                index: point_index(q, point.0, point.1),
            })
            .collect();
        RecoverySet {
            member,
            target_param: if param_is_x { x0 } else { y0 },
            others,
        }
    };
    let mut sets = Vec::new();
    match spec.family {
        Family::QcLrs => {
            let x0sq = ctx.mul(x0, x0);
            for alpha in ctx.elements() {
                for beta in ctx.elements() {
                    let gamma = ctx.add(y0, ctx.add(ctx.mul(alpha, x0sq), ctx.mul(beta, x0)));
                    let curve = Curve::new(alpha, beta, gamma);
                    sets.push(along(true, Member::Curve(curve), &|x| (x, curve.y_at(&ctx, x))));
                }
            }
        }
        Family::Lrs => {
            for slope in ctx.elements() {
                let line = Line::Sloped {
                    slope,
                    intercept: ctx.add(y0, ctx.mul(slope, x0)),
                };
                sets.push(along(true, Member::Line(line), &|t| line.point(&ctx, t)));
            }
            let vertical = Line::Vertical { x0 };
            sets.push(along(false, Member::Line(vertical), &|t| vertical.point(&ctx, t)));
        }
    }
    sets
}

/// Recovers the erased symbol at `target` from the first recovery set with
/// at least `d` known points, interpolating through the `d` of them with the
/// smallest parameters. `Ok(None)` when every set has `r` or more erasures.
pub fn recover_symbol(
    inst: &CodeInstance,
    word: &[Option<FieldElement>],
    target: Point,
) -> Result<Option<FieldElement>> {
    let spec = inst.spec();
    if word.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: word.len(),
        });
    }
    if word[point_index(spec.q(), target.0, target.1)].is_some() {
        return Err(Error::Parameter("the target symbol is not erased".into()));
    }
    let d = spec.d as usize;
    for set in recovery_sets(&spec, target) {
        let known: Vec<(FieldElement, FieldElement)> = set
            .others
            .iter()
            .filter_map(|p| word[p.index].map(|v| (p.param, v)))
            .take(d)
            .collect();
        if known.len() == d {
            return lagrange_eval(inst.field(), &known, set.target_param).map(Some);
        }
    }
    Ok(None)
}

/// Exact local-recovery failure probability of the line-lifted code: its
/// `q + 1` recovery sets are disjoint, and each fails with probability
/// `P[Binomial(q - 1, tau) >= r]`.
pub fn lrs_failure_closed_form(q: u32, r: u32, tau: f64) -> Result<f64> {
    if q < 2 || !q.is_power_of_two() {
        return Err(Error::Parameter(format!("q={q} is not a power of two")));
    }
    if r < 1 || r > q - 1 {
        return Err(Error::Parameter(format!(
            "redundancy r={r} outside [1, {}]",
            q - 1
        )));
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Parameter(format!("tau={tau} outside [0, 1]")));
    }
    let n = u64::from(q - 1);
    let per_set = binomial_tail(n, u64::from(r), tau);
    Ok(per_set.powi(q as i32 + 1))
}

/// `P[Binomial(n, p) >= k]`, summing terms in log space.
fn binomial_tail(n: u64, k: u64, p: f64) -> f64 {
    if p == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    if p == 1.0 {
        return if k <= n { 1.0 } else { 0.0 };
    }
    let (lp, lq) = (p.ln(), (-p).ln_1p());
    let mut ln_choose = 0.0f64;
    let mut total = 0.0;
    for i in 0..=n {
        if i > 0 {
            ln_choose += ((n - i + 1) as f64).ln() - (i as f64).ln();
        }
        if i >= k {
            total += (ln_choose + i as f64 * lp + (n - i) as f64 * lq).exp();
        }
    }
    total.min(1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig {
    pub spec: CodeSpec,
    /// Erasure probability of each non-target symbol.
    pub tau: f64,
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Parameter(format!("tau={} outside [0, 1]", self.tau)));
        }
        if self.trials == 0 {
            return Err(Error::Parameter("trials must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimEstimate {
    pub failure_rate: f64,
    /// Half-width of the 95% Agresti-Coull interval; stays positive when no
    /// failure (or no success) was observed.
    pub half_width: f64,
    pub failures: u64,
    pub trials: u64,
}

impl SimEstimate {
    pub fn from_counts(failures: u64, trials: u64) -> Self {
        let n = trials as f64;
        let z2 = Z95 * Z95;
        let n_adj = n + z2;
        let p_adj = (failures as f64 + z2 / 2.0) / n_adj;
        SimEstimate {
            failure_rate: failures as f64 / n,
            half_width: Z95 * (p_adj * (1.0 - p_adj) / n_adj).sqrt(),
            failures,
            trials,
        }
    }
}

/// Bit sets over the `q^2` positions: one per recovery set of `target`.
struct FailureOracle {
    words: usize,
    sets: Vec<Vec<u64>>,
    positions: Vec<usize>,
    r: u32,
}

impl FailureOracle {
    fn new(spec: &CodeSpec, target: Point) -> Self {
        let n = spec.n();
        let words = n.div_ceil(64);
        let sets = recovery_sets(spec, target)
            .iter()
            .map(|set| {
                let mut mask = vec![0u64; words];
                for p in &set.others {
                    mask[p.index / 64] |= 1 << (p.index % 64);
                }
                mask
            })
            .collect();
        let t = point_index(spec.q(), target.0, target.1);
        FailureOracle {
            words,
            sets,
            positions: (0..n).filter(|&i| i != t).collect(),
            r: spec.r(),
        }
    }

    /// Every recovery set holds at least `r` erasures among its other points.
    fn fails(&self, erased: &[u64]) -> bool {
        self.sets.iter().all(|set| {
            let hits: u32 = set.iter().zip(erased).map(|(s, e)| (s & e).count_ones()).sum();
            hits >= self.r
        })
    }

    fn trial(&self, base: &ChaCha8Rng, index: u64, tau: f64, erased: &mut [u64]) -> bool {
        let mut rng = base.clone();
        rng.set_stream(index);
        erased.fill(0);
        for &pos in &self.positions {
            if rng.gen::<f64>() < tau {
                erased[pos / 64] |= 1 << (pos % 64);
            }
        }
        self.fails(erased)
    }
}

/// Failure probability of recovering the symbol at the origin.
pub fn simulate_failure(config: &SimConfig) -> Result<SimEstimate> {
    simulate_failure_at(config, (FieldElement::ZERO, FieldElement::ZERO))
}

/// Failure probability of recovering the symbol at `target`.
///
/// Trial `i` draws its erasures from ChaCha stream `i` under `seed`, so the
/// estimate does not depend on how trials are spread over threads.
pub fn simulate_failure_at(config: &SimConfig, target: Point) -> Result<SimEstimate> {
    config.validate()?;
    let q = config.spec.q();
    if u32::from(target.0.value()) >= q || u32::from(target.1.value()) >= q {
        return Err(Error::Parameter("target lies outside the plane".into()));
    }
    let oracle = FailureOracle::new(&config.spec, target);
    let base = ChaCha8Rng::seed_from_u64(config.seed);
    let chunks = config.trials.div_ceil(CHUNK);
    let failures: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut erased = vec![0u64; oracle.words];
            let end = ((c + 1) * CHUNK).min(config.trials);
            (c * CHUNK..end)
                .filter(|&i| oracle.trial(&base, i, config.tau, &mut erased))
                .count() as u64
        })
        .sum();
    Ok(SimEstimate::from_counts(failures, config.trials))
}

/// The combinatorial failure criterion for an explicit erasure pattern
/// (`erased[i]` for every position; the target's own entry is ignored).
pub fn local_recovery_fails(spec: &CodeSpec, target: Point, erased: &[bool]) -> Result<bool> {
    if erased.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: erased.len(),
        });
    }
    let oracle = FailureOracle::new(spec, target);
    let mut bits = vec![0u64; oracle.words];
    for (i, _) in erased.iter().enumerate().filter(|(_, &e)| e) {
        bits[i / 64] |= 1 << (i % 64);
    }
    let t = point_index(spec.q(), target.0, target.1);
    bits[t / 64] &= !(1 << (t % 64));
    Ok(oracle.fails(&bits))
}

/// Erasure probabilities `min, min + step, ...` up to `max`, generated from
/// integer step counts and rounded to 1e-9 so grids print cleanly.
pub fn tau_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&min) || !(0.0..=1.0).contains(&max) || min > max {
        return Err(Error::Parameter(format!(
            "tau range [{min}, {max}] is not inside [0, 1]"
        )));
    }
    if !(step > 0.0) {
        return Err(Error::Parameter(format!("tau step {step} must be positive")));
    }
    let steps = ((max - min) / step + 1e-9).floor() as u64;
    Ok((0..=steps)
        .map(|k| ((min + k as f64 * step) * 1e9).round() / 1e9)
        .collect())
}

/// Hides the symbols flagged in `erased`.
pub fn erase(word: &[FieldElement], erased: &[bool]) -> Vec<Option<FieldElement>> {
    word.iter()
        .zip(erased)
        .map(|(&v, &e)| if e { None } else { Some(v) })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::build_code;

    fn origin() -> Point {
        (FieldElement::ZERO, FieldElement::ZERO)
    }

    #[test]
    fn recovery_set_counts() {
        let qc = CodeSpec::with_redundancy(Family::QcLrs, 3, 3).unwrap();
        let sets = recovery_sets(&qc, (FieldElement::from_raw(5), FieldElement::from_raw(2)));
        assert_eq!(sets.len(), 64);
        assert!(sets.iter().all(|s| s.others.len() == 7));

        let lrs = CodeSpec::with_redundancy(Family::Lrs, 3, 4).unwrap();
        let sets = recovery_sets(&lrs, origin());
        assert_eq!(sets.len(), 9);
        let mut seen = std::collections::HashSet::new();
        for s in &sets {
            for p in &s.others {
                assert!(seen.insert(p.index), "lines through a point overlap elsewhere");
            }
        }
        assert_eq!(seen.len(), 63);
    }

    #[test]
    fn closed_form_endpoints() {
        assert_eq!(lrs_failure_closed_form(8, 4, 0.0).unwrap(), 0.0);
        assert!((lrs_failure_closed_form(8, 4, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(lrs_failure_closed_form(8, 8, 0.5).is_err());
        assert!(lrs_failure_closed_form(8, 4, 1.5).is_err());
        // 1 - P[Bin(7, 1/2) <= 3] = 1/2, raised to the 9th.
        let v = lrs_failure_closed_form(8, 4, 0.5).unwrap();
        assert!((v - 0.5f64.powi(9)).abs() < 1e-15);
    }

    #[test]
    fn zero_erasure_never_fails() {
        let spec = CodeSpec::with_redundancy(Family::QcLrs, 3, 3).unwrap();
        let est = simulate_failure(&SimConfig { spec, tau: 0.0, trials: 500, seed: 1 }).unwrap();
        assert_eq!(est.failures, 0);
        assert!(est.half_width > 0.0);
        let est = simulate_failure(&SimConfig { spec, tau: 1.0, trials: 500, seed: 1 }).unwrap();
        assert_eq!(est.failures, 500);
    }

    #[test]
    fn config_validation() {
        let spec = CodeSpec::with_redundancy(Family::Lrs, 3, 4).unwrap();
        assert!(simulate_failure(&SimConfig { spec, tau: -0.1, trials: 5, seed: 0 }).is_err());
        assert!(simulate_failure(&SimConfig { spec, tau: 0.5, trials: 0, seed: 0 }).is_err());
    }

    #[test]
    fn recover_rejects_known_target() {
        let inst = build_code(CodeSpec::with_redundancy(Family::Lrs, 2, 2).unwrap()).unwrap();
        let word = vec![Some(FieldElement::ZERO); 16];
        assert!(recover_symbol(&inst, &word, origin()).is_err());
        let all_erased = vec![None; 16];
        assert_eq!(recover_symbol(&inst, &all_erased, origin()).unwrap(), None);
    }

    #[test]
    fn grid_shape() {
        let g = tau_grid(0.3, 1.0, 0.02).unwrap();
        assert_eq!(g.len(), 36);
        assert_eq!(g[1], 0.32);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(tau_grid(0.5, 0.4, 0.1).is_err());
        assert!(tau_grid(0.1, 0.4, 0.0).is_err());
    }
}
