//! Univariate interpolation over GF(2^m).

use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};

/// Coefficients of the unique polynomial of degree `< n` through `n` points
/// with distinct abscissae.
pub fn lagrange_coeffs(
    ctx: &FieldContext,
    points: &[(FieldElement, FieldElement)],
) -> Result<Vec<FieldElement>> {
    let n = points.len();
    let mut out = vec![FieldElement::ZERO; n];
    for (k, &(xk, yk)) in points.iter().enumerate() {
        // Basis numerator prod_{m != k} (X - x_m), built up one factor at a time.
        let mut basis = vec![FieldElement::ONE];
        let mut denom = FieldElement::ONE;
        for (m, &(xm, _)) in points.iter().enumerate() {
            if m == k {
                continue;
            }
            let mut next = vec![FieldElement::ZERO; basis.len() + 1];
            for (e, &c) in basis.iter().enumerate() {
                next[e + 1] = ctx.add(next[e + 1], c);
                next[e] = ctx.add(next[e], ctx.mul(c, xm));
            }
            basis = next;
            denom = ctx.mul(denom, ctx.add(xk, xm));
        }
        let scale = ctx.mul(yk, inv_distinct(ctx, denom)?);
        for (o, &c) in out.iter_mut().zip(&basis) {
            *o = ctx.add(*o, ctx.mul(c, scale));
        }
    }
    Ok(out)
}

/// Value at `at` of the polynomial of degree `< n` through the `n` points.
pub fn lagrange_eval(
    ctx: &FieldContext,
    points: &[(FieldElement, FieldElement)],
    at: FieldElement,
) -> Result<FieldElement> {
    let mut acc = FieldElement::ZERO;
    for (k, &(xk, yk)) in points.iter().enumerate() {
        let mut num = FieldElement::ONE;
        let mut den = FieldElement::ONE;
        for (m, &(xm, _)) in points.iter().enumerate() {
            if m != k {
                num = ctx.mul(num, ctx.add(at, xm));
                den = ctx.mul(den, ctx.add(xk, xm));
            }
        }
        acc = ctx.add(acc, ctx.mul(yk, ctx.mul(num, inv_distinct(ctx, den)?)));
    }
    Ok(acc)
}

fn inv_distinct(ctx: &FieldContext, den: FieldElement) -> Result<FieldElement> {
    ctx.inv(den)
        .map_err(|_| Error::Parameter("interpolation points share an abscissa".into()))
}

/// Interpolation of functions given on all of `F_q`.
///
/// In characteristic 2 the interpolant of `f` is
/// `f(0) + sum_{k >= 1} X^k sum_x f(x) x^(q-1-k)`, so each coefficient is a
/// single inner product against a row of the power table.
#[derive(Clone, Debug)]
pub struct FullFieldInterpolator {
    q: usize,
    /// `powers[e * q + x] = x^e` with `0^0 = 1`.
    powers: Vec<FieldElement>,
    ctx: FieldContext,
}

impl FullFieldInterpolator {
    pub fn new(ctx: &FieldContext) -> Self {
        let q = ctx.q() as usize;
        let mut powers = Vec::with_capacity(q * q);
        for e in 0..q {
            powers.extend(ctx.elements().map(|x| ctx.pow(x, e as u64)));
        }
        FullFieldInterpolator {
            q,
            powers,
            ctx: ctx.clone(),
        }
    }

    /// Coefficient of `X^k` for values listed in field-element order.
    pub fn coefficient(&self, values: &[FieldElement], k: usize) -> FieldElement {
        debug_assert_eq!(values.len(), self.q);
        if k == 0 {
            return values[0];
        }
        let row = &self.powers[(self.q - 1 - k) * self.q..][..self.q];
        values
            .iter()
            .zip(row)
            .fold(FieldElement::ZERO, |acc, (&v, &p)| {
                self.ctx.add(acc, self.ctx.mul(v, p))
            })
    }

    pub fn coefficients(&self, values: &[FieldElement]) -> Vec<FieldElement> {
        (0..self.q).map(|k| self.coefficient(values, k)).collect()
    }

    /// Whether the interpolant has degree `< d`, checking the top
    /// coefficients first.
    pub fn degree_below(&self, values: &[FieldElement], d: usize) -> bool {
        (d..self.q).rev().all(|k| self.coefficient(values, k).is_zero())
    }
}
