//! Monomial classification for curve- and line-lifted codes.
//!
//! A monomial `x^a y^b` is good for a family of curves when its restriction to
//! every member has degree below the bound `d`. Lucas' theorem turns this into
//! a statement about binary submasks of `b`, which is what [`is_qc_good`] and
//! [`is_lrs_good`] evaluate. [`restrict_to_curve`] and [`restrict_to_line`]
//! compute restrictions symbolically and serve as the brute-force reference.

use std::fmt;

use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};

/// The exponent pair `(a, b)` of `x^a y^b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub a: u32,
    pub b: u32,
}

impl Monomial {
    pub const fn new(a: u32, b: u32) -> Self {
        Monomial { a, b }
    }

    /// Every monomial with both exponents in `[0, q-1]`, `a` major.
    pub fn all(q: u32) -> impl Iterator<Item = Monomial> {
        (0..q).flat_map(move |a| (0..q).map(move |b| Monomial { a, b }))
    }

    pub fn eval(&self, ctx: &FieldContext, x: FieldElement, y: FieldElement) -> FieldElement {
        ctx.mul(ctx.pow(x, u64::from(self.a)), ctx.pow(y, u64::from(self.b)))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{} y^{}", self.a, self.b)
    }
}

/// The quadratic curve `y + alpha x^2 + beta x + gamma = 0`, i.e. the points
/// `(x, alpha x^2 + beta x + gamma)` in characteristic 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Curve {
    pub alpha: FieldElement,
    pub beta: FieldElement,
    pub gamma: FieldElement,
}

impl Curve {
    pub const fn new(alpha: FieldElement, beta: FieldElement, gamma: FieldElement) -> Self {
        Curve { alpha, beta, gamma }
    }

    /// The `y` coordinate of the curve point above `x`.
    pub fn y_at(&self, ctx: &FieldContext, x: FieldElement) -> FieldElement {
        ctx.eval_poly(&[self.gamma, self.beta, self.alpha], x)
    }

    /// All `q^3` curves, ordered by `(alpha, beta, gamma)`.
    pub fn all(ctx: &FieldContext) -> impl Iterator<Item = Curve> + '_ {
        ctx.elements().flat_map(move |alpha| {
            ctx.elements().flat_map(move |beta| {
                ctx.elements().map(move |gamma| Curve { alpha, beta, gamma })
            })
        })
    }
}

/// An affine line of the plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Line {
    /// `y = slope * x + intercept`, parametrized by `x`.
    Sloped {
        slope: FieldElement,
        intercept: FieldElement,
    },
    /// `x = x0`, parametrized by `y`.
    Vertical { x0: FieldElement },
}

impl Line {
    /// All `q^2 + q` lines: sloped ones first, then vertical.
    pub fn all(ctx: &FieldContext) -> impl Iterator<Item = Line> + '_ {
        let sloped = ctx.elements().flat_map(move |slope| {
            ctx.elements()
                .map(move |intercept| Line::Sloped { slope, intercept })
        });
        sloped.chain(ctx.elements().map(|x0| Line::Vertical { x0 }))
    }

    /// The point of the line with parameter `t`.
    pub fn point(&self, ctx: &FieldContext, t: FieldElement) -> (FieldElement, FieldElement) {
        match *self {
            Line::Sloped { slope, intercept } => (t, ctx.add(ctx.mul(slope, t), intercept)),
            Line::Vertical { x0 } => (x0, t),
        }
    }
}

/// Folds an exponent into `[0, q-1]` consistently with `x^q = x` on `F_q`:
/// positive multiples of `q - 1` go to `q - 1`, not to 0.
pub fn mod_star(a: u64, q: u64) -> u64 {
    if a < q {
        a
    } else if a % (q - 1) == 0 {
        q - 1
    } else {
        a % (q - 1)
    }
}

/// `a <=_2 b`: every binary digit of `a` is at most the matching digit of `b`.
pub fn in_shadow(a: u64, b: u64) -> bool {
    a & b == a
}

/// Submasks of a bit mask in descending numeric order, ending with 0.
#[derive(Clone, Debug)]
pub struct Submasks {
    mask: u32,
    next: Option<u32>,
}

pub fn submasks(mask: u32) -> Submasks {
    Submasks {
        mask,
        next: Some(mask),
    }
}

impl Iterator for Submasks {
    type Item = u32;

    fn next(&mut self) -> Option<u32> {
        let current = self.next?;
        self.next = if current == 0 {
            None
        } else {
            Some((current - 1) & self.mask)
        };
        Some(current)
    }
}

/// Every pair `(i, j)` with `i <=_2 b` and `j <=_2 b - i`; there are
/// `3^popcount(b)` of them.
pub fn shadow_pairs(b: u32) -> impl Iterator<Item = (u32, u32)> {
    submasks(b).flat_map(move |i| submasks(b ^ i).map(move |j| (i, j)))
}

fn check_degree_bound(q: u32, d: u32) -> Result<()> {
    if !q.is_power_of_two() || q < 2 {
        return Err(Error::Parameter(format!(
            "field size {q} is not a power of two"
        )));
    }
    if d < 1 || d > q - 1 {
        return Err(Error::Parameter(format!(
            "degree bound d={d} outside [1, {}]",
            q - 1
        )));
    }
    Ok(())
}

/// Good-monomial test for the quadratic-curve family: every exponent
/// `2i + j + a` reachable through submasks of `b` must fold below `d`.
pub fn is_qc_good(m: Monomial, q: u32, d: u32) -> Result<bool> {
    check_degree_bound(q, d)?;
    debug_assert!(m.a < q && m.b < q);
    let (a, q, d) = (u64::from(m.a), u64::from(q), u64::from(d));
    Ok(shadow_pairs(m.b).all(|(i, j)| mod_star(2 * u64::from(i) + u64::from(j) + a, q) < d))
}

/// Good-monomial test for the family of all affine lines.
///
/// Sloped lines contribute exponents `a + i` for `i <=_2 b`; vertical lines
/// leave `y^b` untouched, so `b < d` is also required.
pub fn is_lrs_good(m: Monomial, q: u32, d: u32) -> Result<bool> {
    check_degree_bound(q, d)?;
    debug_assert!(m.a < q && m.b < q);
    if m.b >= d {
        return Ok(false);
    }
    let (a, q, d) = (u64::from(m.a), u64::from(q), u64::from(d));
    Ok(submasks(m.b).all(|i| mod_star(a + u64::from(i), q) < d))
}

/// Product of two polynomials reduced modulo `x^q - x`.
fn mul_reduced(ctx: &FieldContext, lhs: &[FieldElement], rhs: &[FieldElement]) -> Vec<FieldElement> {
    let q = ctx.q() as usize;
    let mut out = vec![FieldElement::ZERO; q];
    for (i, &u) in lhs.iter().enumerate().filter(|(_, u)| !u.is_zero()) {
        for (j, &v) in rhs.iter().enumerate().filter(|(_, v)| !v.is_zero()) {
            let e = mod_star((i + j) as u64, q as u64) as usize;
            out[e] = ctx.add(out[e], ctx.mul(u, v));
        }
    }
    out
}

/// `coeff * t^k * base^power`, reduced modulo `t^q - t`.
fn monomial_times_power(
    ctx: &FieldContext,
    coeff: FieldElement,
    k: u32,
    base: &[FieldElement],
    power: u32,
) -> Vec<FieldElement> {
    let q = ctx.q() as usize;
    let mut acc = vec![FieldElement::ZERO; q];
    acc[mod_star(u64::from(k), q as u64) as usize] = coeff;
    for _ in 0..power {
        acc = mul_reduced(ctx, &acc, base);
    }
    acc
}

/// Coefficients (indexed by degree, length `q`) of
/// `x^a (alpha x^2 + beta x + gamma)^b mod (x^q - x)`, expanded symbolically.
pub fn restrict_to_curve(ctx: &FieldContext, m: Monomial, c: Curve) -> Vec<FieldElement> {
    let q = ctx.q() as usize;
    let mut base = vec![FieldElement::ZERO; q];
    base[0] = c.gamma;
    base[mod_star(1, q as u64) as usize] = ctx.add(base[mod_star(1, q as u64) as usize], c.beta);
    let sq = mod_star(2, q as u64) as usize;
    base[sq] = ctx.add(base[sq], c.alpha);
    monomial_times_power(ctx, FieldElement::ONE, m.a, &base, m.b)
}

/// Restriction of `x^a y^b` to a line, as a polynomial in the line's
/// parameter (`x` for sloped lines, `y` for vertical ones).
pub fn restrict_to_line(ctx: &FieldContext, m: Monomial, line: Line) -> Vec<FieldElement> {
    let q = ctx.q() as usize;
    match line {
        Line::Sloped { slope, intercept } => {
            let mut base = vec![FieldElement::ZERO; q];
            base[0] = intercept;
            let lin = mod_star(1, q as u64) as usize;
            base[lin] = ctx.add(base[lin], slope);
            monomial_times_power(ctx, FieldElement::ONE, m.a, &base, m.b)
        }
        Line::Vertical { x0 } => {
            let coeff = ctx.pow(x0, u64::from(m.a));
            let mut out = vec![FieldElement::ZERO; q];
            out[mod_star(u64::from(m.b), q as u64) as usize] = coeff;
            out
        }
    }
}

/// Degree of a coefficient vector; `None` for the zero polynomial.
pub fn degree(coeffs: &[FieldElement]) -> Option<usize> {
    coeffs.iter().rposition(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn el(v: u16) -> FieldElement {
        FieldElement::from_raw(v)
    }

    #[test]
    fn mod_star_branches() {
        assert_eq!(mod_star(5, 8), 5);
        assert_eq!(mod_star(14, 8), 7);
        assert_eq!(mod_star(9, 8), 2);
        assert_eq!(mod_star(0, 8), 0);
        assert_eq!(mod_star(7, 8), 7);
        assert_eq!(mod_star(21, 8), 7);
    }

    #[test]
    fn shadow_examples() {
        assert!(in_shadow(6, 6));
        assert!(in_shadow(5, 7));
        assert!(!in_shadow(1, 2));
        assert!(in_shadow(0, 9));
    }

    #[test]
    fn submask_enumeration_is_complete() {
        let masks: Vec<u32> = submasks(0b1011).collect();
        assert_eq!(masks, vec![11, 10, 9, 8, 3, 2, 1, 0]);
        assert_eq!(submasks(0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(shadow_pairs(0b111).count(), 27);
    }

    #[test]
    fn qc_good_examples() {
        assert!(is_qc_good(Monomial::new(0, 0), 8, 5).unwrap());
        assert!(!is_qc_good(Monomial::new(7, 0), 8, 5).unwrap());
        assert!(!is_qc_good(Monomial::new(0, 7), 8, 5).unwrap());
    }

    #[test]
    fn invalid_degree_bound_is_rejected() {
        let m = Monomial::new(0, 0);
        assert!(is_qc_good(m, 8, 0).is_err());
        assert!(is_qc_good(m, 8, 8).is_err());
        assert!(is_lrs_good(m, 8, 8).is_err());
        assert!(is_qc_good(m, 6, 3).is_err());
    }

    #[test]
    fn good_counts_at_q8() {
        let count = |f: fn(Monomial, u32, u32) -> Result<bool>, d| {
            Monomial::all(8).filter(|&m| f(m, 8, d).unwrap()).count()
        };
        assert_eq!(count(is_lrs_good, 4), 10);
        assert_eq!(count(is_lrs_good, 3), 6);
        assert_eq!(count(is_qc_good, 5), 10);
        assert_eq!(count(is_qc_good, 4), 6);
        for d in 1..8 {
            assert!(count(is_lrs_good, d) > 0);
        }
    }

    #[test]
    fn restriction_examples() {
        let f = FieldContext::new(3).unwrap();
        let xy = restrict_to_curve(&f, Monomial::new(1, 1), Curve::new(el(1), el(0), el(0)));
        let mut x3 = vec![FieldElement::ZERO; 8];
        x3[3] = FieldElement::ONE;
        assert_eq!(xy, x3);

        let gamma = el(5);
        let y = restrict_to_curve(&f, Monomial::new(0, 1), Curve::new(el(0), el(0), gamma));
        assert_eq!(degree(&y), Some(0));
        assert_eq!(y[0], gamma);

        let worst = Curve::all(&f)
            .map(|c| degree(&restrict_to_curve(&f, Monomial::new(7, 7), c)).unwrap_or(0))
            .max()
            .unwrap();
        assert!(worst >= 5);
    }

    #[test]
    fn line_restriction_examples() {
        let f4 = FieldContext::new(2).unwrap();
        let x = restrict_to_line(
            &f4,
            Monomial::new(1, 0),
            Line::Sloped { slope: el(1), intercept: el(0) },
        );
        assert_eq!(x, vec![el(0), el(1), el(0), el(0)]);

        let f8 = FieldContext::new(3).unwrap();
        let y3 = restrict_to_line(&f8, Monomial::new(0, 3), Line::Vertical { x0: el(6) });
        assert_eq!(degree(&y3), Some(3));
        assert_eq!(y3[3], FieldElement::ONE);

        // x^2 (x + 1) = x^3 + x^2, already reduced over GF(4).
        let p = restrict_to_line(
            &f4,
            Monomial::new(2, 1),
            Line::Sloped { slope: el(1), intercept: el(1) },
        );
        assert_eq!(p, vec![el(0), el(0), el(1), el(1)]);
    }

    #[test]
    fn family_sizes() {
        let f = FieldContext::new(2).unwrap();
        assert_eq!(Curve::all(&f).count(), 64);
        assert_eq!(Line::all(&f).count(), 20);
    }
}
