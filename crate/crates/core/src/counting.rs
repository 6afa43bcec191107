//! Counting bad monomials of the quadratic-curve-lifted code.
//!
//! For `q = 2^ell` and local redundancy `r`, the pair `(a, b)` lies in
//! `S_t(ell)` when some `i <=_2 b`, `j <=_2 b - i` hit
//! `2i + j + a = q - r' + t q` for an `r'` in `[1, r]`. `S*(ell)` uses the
//! offset `t (q - 1)` instead and is exactly the set of bad monomials for
//! `d = q - r`. The sizes of `S_0, S_1, S_2` obey a linear recursion whose
//! dominant eigenvalue `2 + sqrt 2` sets the asymptotic rate.

use crate::error::{Error, Result};
use crate::monomial::shadow_pairs;

/// Largest level accepted by the brute-force enumerations (`q^2` pairs).
pub const MAX_ENUM_ELL: u32 = 14;

/// Largest level accepted by the recursion; counts grow like
/// `(2 + sqrt 2)^ell` and stay far inside `u128` here.
pub const MAX_RECURSION_ELL: u32 = 32;

/// `log2(2 + sqrt 2)`, the growth exponent of `|S_0(ell)|`.
pub fn growth_exponent() -> f64 {
    (2.0 + std::f64::consts::SQRT_2).log2()
}

/// Exponent of `q/r` in the redundancy `1 - rate` of the quadratic-curve code.
pub fn qc_rate_exponent() -> f64 {
    growth_exponent() - 2.0
}

/// Same exponent for the line-lifted code, `log2 3 - 2`.
pub fn lrs_rate_exponent() -> f64 {
    3f64.log2() - 2.0
}

fn check_level(ell: u32, max: u32) -> Result<()> {
    if !(1..=max).contains(&ell) {
        return Err(Error::Parameter(format!(
            "level ell={ell} outside [1, {max}]"
        )));
    }
    Ok(())
}

fn check_redundancy(ell: u32, r: u32) -> Result<()> {
    let q = 1u64 << ell;
    if r < 1 || u64::from(r) >= q {
        return Err(Error::Parameter(format!(
            "redundancy r={r} outside [1, {}]",
            q - 1
        )));
    }
    Ok(())
}

/// Sorted distinct values of `2i + j` over all shadow pairs of `b`.
fn shift_sums(b: u32) -> Vec<u64> {
    let mut sums: Vec<u64> = shadow_pairs(b)
        .map(|(i, j)| 2 * u64::from(i) + u64::from(j))
        .collect();
    sums.sort_unstable();
    sums.dedup();
    sums
}

/// Whether `v + a` lands in `[lo, hi]` for some `v` in the sorted `sums`.
fn hits_window(sums: &[u64], a: u64, lo: u64, hi: u64) -> bool {
    if hi < a {
        return false;
    }
    let start = sums.partition_point(|&v| v + a < lo);
    sums.get(start).is_some_and(|&v| v + a <= hi)
}

/// Collects the pairs `(a, b)` for which some shift sum hits one of `windows`.
fn collect_pairs(ell: u32, windows: &[(u64, u64)]) -> Vec<(u32, u32)> {
    let q = 1u32 << ell;
    let sums: Vec<Vec<u64>> = (0..q).map(shift_sums).collect();
    let mut out = Vec::new();
    for a in 0..q {
        for b in 0..q {
            let s = &sums[b as usize];
            if windows
                .iter()
                .any(|&(lo, hi)| hits_window(s, u64::from(a), lo, hi))
            {
                out.push((a, b));
            }
        }
    }
    out
}

/// `S_t(ell)` as a sorted list of `(a, b)` pairs.
#[allow(non_snake_case)]
pub fn enumerate_S_t(ell: u32, r: u32, t: u32) -> Result<Vec<(u32, u32)>> {
    check_level(ell, MAX_ENUM_ELL)?;
    check_redundancy(ell, r)?;
    let q = 1u64 << ell;
    let top = q * (u64::from(t) + 1);
    Ok(collect_pairs(ell, &[(top - u64::from(r), top - 1)]))
}

/// `S*(ell)`: the exponent pairs of the monomials that are bad for `d = q - r`.
#[allow(non_snake_case)]
pub fn enumerate_S_star(ell: u32, r: u32) -> Result<Vec<(u32, u32)>> {
    check_level(ell, MAX_ENUM_ELL)?;
    check_redundancy(ell, r)?;
    let q = 1u64 << ell;
    // 2i + j + a <= 3(q - 1), so offsets t >= 3 are unreachable.
    let windows: Vec<(u64, u64)> = (0..3)
        .map(|t| {
            let top = q + t * (q - 1);
            (top - u64::from(r), top - 1)
        })
        .collect();
    Ok(collect_pairs(ell, &windows))
}

/// `(|S_0|, |S_1|, |S_2|)` at one level for one redundancy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateVector {
    pub ell: u32,
    pub r: u32,
    pub s0: u128,
    pub s1: u128,
    pub s2: u128,
}

impl StateVector {
    /// Counts by direct enumeration.
    pub fn enumerate(ell: u32, r: u32) -> Result<Self> {
        let count = |t| enumerate_S_t(ell, r, t).map(|s| s.len() as u128);
        Ok(StateVector {
            ell,
            r,
            s0: count(0)?,
            s1: count(1)?,
            s2: count(2)?,
        })
    }

    fn step(&self) -> Self {
        StateVector {
            ell: self.ell + 1,
            r: self.r,
            s0: 3 * self.s0 + self.s1,
            s1: self.s0 + self.s1 + self.s2,
            s2: self.s2,
        }
    }
}

/// Lowest level at which `r` is a valid redundancy, `r < 2^ell`.
///
/// From here on every recursion step to level `ell + 1` satisfies
/// `r < 2^(ell+1) / 2`.
pub fn initial_level(r: u32) -> Result<u32> {
    if r < 1 {
        return Err(Error::Parameter("redundancy must be positive".into()));
    }
    Ok(32 - r.leading_zeros())
}

/// The enumerated state at [`initial_level`].
pub fn initial_state(r: u32) -> Result<StateVector> {
    let ell0 = initial_level(r)?;
    StateVector::enumerate(ell0, r)
}

/// Applies `A = [[3,1,0],[1,1,1],[0,0,1]]` until `target_ell` is reached.
pub fn recurse_state(initial: StateVector, target_ell: u32) -> Result<StateVector> {
    if target_ell < initial.ell {
        return Err(Error::Parameter(format!(
            "target level {target_ell} is below the initial level {}",
            initial.ell
        )));
    }
    if target_ell > MAX_RECURSION_ELL {
        return Err(Error::Parameter(format!(
            "target level {target_ell} exceeds {MAX_RECURSION_ELL}"
        )));
    }
    // Each step to level l needs r < 2^(l-1); the first step is the tightest.
    if target_ell > initial.ell && u64::from(initial.r) >= 1u64 << initial.ell {
        return Err(Error::Parameter(format!(
            "recursion from level {} needs r < {}, got r={}",
            initial.ell,
            1u64 << initial.ell,
            initial.r
        )));
    }
    let mut state = initial;
    while state.ell < target_ell {
        state = state.step();
    }
    Ok(state)
}

/// `|S_0(ell)|` for redundancy `r` via enumeration at the initial level and
/// the recursion above it.
pub fn s0_by_recursion(ell: u32, r: u32) -> Result<u128> {
    let init = initial_state(r)?;
    if ell < init.ell {
        return Err(Error::Parameter(format!(
            "r={r} is not a valid redundancy at level {ell}"
        )));
    }
    Ok(recurse_state(init, ell)?.s0)
}

/// Closed forms of `|S_0(ell)|` for `r = 1` and `r = 3`, with surd
/// coefficients evaluated from their exact expressions.
#[allow(non_snake_case)]
pub fn closed_form_S0(ell: u32, r: u32) -> Result<f64> {
    let s2 = std::f64::consts::SQRT_2;
    let l1 = 2.0 + s2;
    let l2 = 2.0 - s2;
    let e = ell as i32;
    match r {
        1 if ell >= 1 => {
            let c1 = (5.0 * s2 + 7.0) / (2.0 * (3.0 * s2 + 4.0));
            let c2 = (5.0 * s2 - 7.0) / (2.0 * (3.0 * s2 - 4.0));
            Ok(c1 * l1.powi(e) + c2 * l2.powi(e))
        }
        3 if ell >= 2 => {
            let c1 = (65.0 * s2 + 92.0) / (4.0 * (12.0 * s2 + 17.0));
            let c2 = (65.0 * s2 - 92.0) / (4.0 * (12.0 * s2 - 17.0));
            Ok(c1 * l1.powi(e) + c2 * l2.powi(e) - 1.0)
        }
        1 | 3 => Err(Error::Parameter(format!(
            "closed form for r={r} needs a larger level than {ell}"
        ))),
        _ => Err(Error::Parameter(format!(
            "closed form only available for r in {{1, 3}}, got r={r}"
        ))),
    }
}

/// Removes exactly `q = 2^ell` from `2i + j` by clearing bits of `i` and `j`.
///
/// Scans positions `h = ell, ell-1, ..., 0` of the sum, where bit `h-1` of `i`
/// and bit `h` of `j` both carry weight `2^h`. `need` is the amount still to
/// remove in units of `2^h`. When the two bits cannot cover it they are both
/// cleared and the shortfall is carried down (doubling); otherwise the
/// matching bits are cleared and the scan stops.
///
/// Requires `i, j < q`, `i & j == 0` and `2i + j >= q`.
pub fn deduct_q(i: u32, j: u32, ell: u32) -> Result<(u32, u32)> {
    check_level(ell, 31)?;
    let q = 1u64 << ell;
    if u64::from(i) >= q || u64::from(j) >= q {
        return Err(Error::Parameter(format!(
            "i={i} and j={j} must both be below q={q}"
        )));
    }
    if i & j != 0 {
        return Err(Error::Parameter(format!(
            "i={i} and j={j} share a bit, so j is not in the shadow of b - i"
        )));
    }
    if 2 * u64::from(i) + u64::from(j) < q {
        return Err(Error::Parameter(format!(
            "2i + j = {} is below q={q}",
            2 * u64::from(i) + u64::from(j)
        )));
    }
    let bit = |v: u32, k: i64| -> i64 {
        if (0..32).contains(&k) {
            i64::from((v >> k) & 1)
        } else {
            0
        }
    };
    let (mut ip, mut jp) = (i, j);
    let mut need: i64 = 1;
    for h in (0..=i64::from(ell)).rev() {
        let ib = bit(ip, h - 1);
        let jb = bit(jp, h);
        let clear_i = |v: u32| if h >= 1 { v & !(1u32 << (h - 1)) } else { v };
        let clear_j = |v: u32| if h < 32 { v & !(1u32 << h) } else { v };
        let delta = need - ib - jb;
        if delta > 0 {
            ip = clear_i(ip);
            jp = clear_j(jp);
            need = 2 * delta;
        } else {
            if need == ib {
                ip = clear_i(ip);
            } else if need == jb {
                jp = clear_j(jp);
            } else {
                ip = clear_i(ip);
                jp = clear_j(jp);
            }
            return Ok((ip, jp));
        }
    }
    Err(Error::Algorithm(format!(
        "no sub-sum of 2i + j equal to q found for i={i}, j={j}, ell={ell}"
    )))
}

/// Bounds on `|S*(ell)|` derived from the `r = 1` and `r = 3` closed forms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundsResult {
    pub lower: f64,
    pub upper: f64,
    /// Set when `r` is a power of two and the tight (non-strict) pair applies.
    pub exact_power_of_two: bool,
}

impl BoundsResult {
    /// Rate band `(rate_lb, rate_ub)` implied by the bounds at `q = 2^ell`.
    pub fn rate_band(&self, ell: u32) -> (f64, f64) {
        let n = 4f64.powi(ell as i32);
        (1.0 - self.upper / n, 1.0 - self.lower / n)
    }

    /// Whether `count` respects the bounds, strictly unless the tight branch
    /// applied.
    pub fn contains(&self, count: f64) -> bool {
        if self.exact_power_of_two {
            self.lower <= count && count <= self.upper
        } else {
            self.lower < count && count < self.upper
        }
    }
}

/// Lower and upper bounds on the number of bad monomials for `d = q - r`.
///
/// Requires `ell >= 2` and `1 <= r <= q/4`.
#[allow(non_snake_case)]
pub fn bounds_S_star(ell: u32, r: u32) -> Result<BoundsResult> {
    if !(2..=MAX_RECURSION_ELL).contains(&ell) {
        return Err(Error::Parameter(format!(
            "bounds need ell in [2, {MAX_RECURSION_ELL}], got {ell}"
        )));
    }
    let quarter = 1u64 << (ell - 2);
    if r < 1 || u64::from(r) > quarter {
        return Err(Error::Parameter(format!(
            "bounds need r in [1, q/4 = {quarter}], got r={r}"
        )));
    }
    let r2 = f64::from(r) * f64::from(r);
    let floor_log = 31 - r.leading_zeros();
    if r.is_power_of_two() {
        let level = ell - floor_log;
        return Ok(BoundsResult {
            lower: r2 * closed_form_S0(level, 1)?,
            upper: r2 * closed_form_S0(level, 3)?,
            exact_power_of_two: true,
        });
    }
    let ceil_log = floor_log + 1;
    Ok(BoundsResult {
        lower: r2 / 4.0 * closed_form_S0(ell - floor_log, 1)?,
        upper: 4.0 * r2 * closed_form_S0(ell - ceil_log, 3)?,
        exact_power_of_two: false,
    })
}

/// Least-squares slope of `log2(count)` against `ell`.
pub fn asymptotic_slope(samples: &[(u32, f64)]) -> Result<f64> {
    if samples.len() < 2 {
        return Err(Error::Parameter(format!(
            "slope needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if let Some(&(ell, c)) = samples.iter().find(|(_, c)| !(*c > 0.0)) {
        return Err(Error::Parameter(format!(
            "count at level {ell} must be positive, got {c}"
        )));
    }
    let n = samples.len() as f64;
    let mean_x = samples.iter().map(|&(l, _)| f64::from(l)).sum::<f64>() / n;
    let mean_y = samples.iter().map(|&(_, c)| c.log2()).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for &(l, c) in samples {
        let dx = f64::from(l) - mean_x;
        sxy += dx * (c.log2() - mean_y);
        sxx += dx * dx;
    }
    if sxx == 0.0 {
        return Err(Error::Parameter("all samples share one level".into()));
    }
    Ok(sxy / sxx)
}
