//! Arithmetic in GF(2^m) for 1 <= m <= 16.
//!
//! Elements are stored in polynomial basis: bit `i` of the value is the
//! coefficient of `x^i`. Fields up to GF(256) multiply through log/antilog
//! tables; larger fields use shift-and-add carry-less multiplication with
//! interleaved reduction.

use std::fmt;

use crate::error::{Error, Result};

/// Largest supported field exponent.
pub const MAX_ELL: u32 = 16;

/// Largest exponent for which log/antilog tables are built.
const TABLE_MAX_ELL: u32 = 8;

/// Low-weight irreducible polynomials, indexed by degree. Bit `i` is the
/// coefficient of `x^i`; the top bit is the leading term.
const IRREDUCIBLE: [u32; (MAX_ELL + 1) as usize] = [
    0,
    0b11,     // x + 1
    0b111,    // x^2 + x + 1
    0b1011,   // x^3 + x + 1
    0b10011,  // x^4 + x + 1
    0b100101, // x^5 + x^2 + 1
    0x43,     // x^6 + x + 1
    0x83,     // x^7 + x + 1
    0x11d,    // x^8 + x^4 + x^3 + x^2 + 1
    0x211,    // x^9 + x^4 + 1
    0x409,    // x^10 + x^3 + 1
    0x805,    // x^11 + x^2 + 1
    0x1053,   // x^12 + x^6 + x^4 + x + 1
    0x201b,   // x^13 + x^4 + x^3 + x + 1
    0x4443,   // x^14 + x^10 + x^6 + x + 1
    0x8003,   // x^15 + x + 1
    0x1002b,  // x^16 + x^5 + x^3 + x + 1
];

/// The fixed irreducible modulus used for GF(2^ell).
pub fn default_modulus(ell: u32) -> Result<u32> {
    if !(1..=MAX_ELL).contains(&ell) {
        return Err(Error::Parameter(format!(
            "field exponent must lie in [1, {MAX_ELL}], got {ell}"
        )));
    }
    Ok(IRREDUCIBLE[ell as usize])
}

/// An element of GF(2^ell). Only meaningful together with the
/// [`FieldContext`] that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(u16);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    /// Wraps a raw value without range checking against a field.
    pub const fn from_raw(value: u16) -> Self {
        FieldElement(value)
    }

    pub const fn value(self) -> u16 {
        self.0
    }

    pub const fn index(self) -> usize {
        self.0 as usize
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Debug)]
struct LogTables {
    /// `log[x]` for nonzero x; `log[0]` is unused.
    log: Vec<u16>,
    /// `exp[k] = g^k` for k in [0, 2(q-1)), doubled to skip a modulo in `mul`.
    exp: Vec<u16>,
}

/// The field GF(2^ell) together with the tables defining its arithmetic.
///
/// Immutable after construction; every operation is a pure function of its
/// arguments.
#[derive(Clone, Debug)]
pub struct FieldContext {
    ell: u32,
    q: u32,
    modulus: u32,
    tables: Option<LogTables>,
}

impl FieldContext {
    /// GF(2^ell) with the crate's fixed irreducible modulus.
    pub fn new(ell: u32) -> Result<Self> {
        let modulus = default_modulus(ell)?;
        Ok(Self::build(ell, modulus))
    }

    /// GF(2^ell) with a caller-chosen modulus, which must be irreducible of
    /// degree exactly `ell`.
    pub fn with_modulus(ell: u32, modulus: u32) -> Result<Self> {
        default_modulus(ell)?;
        if modulus >> ell != 1 {
            return Err(Error::Parameter(format!(
                "modulus {modulus:#x} does not have degree {ell}"
            )));
        }
        if !is_irreducible(modulus) {
            return Err(Error::Parameter(format!(
                "modulus {modulus:#x} is reducible over GF(2)"
            )));
        }
        Ok(Self::build(ell, modulus))
    }

    fn build(ell: u32, modulus: u32) -> Self {
        let q = 1u32 << ell;
        let mut ctx = FieldContext {
            ell,
            q,
            modulus,
            tables: None,
        };
        if ell <= TABLE_MAX_ELL {
            ctx.tables = Some(ctx.log_tables());
        }
        ctx
    }

    fn log_tables(&self) -> LogTables {
        let order = (self.q - 1) as usize;
        let generator = (1..self.q)
            .find(|&g| self.multiplicative_order(g) == order)
            .expect("the multiplicative group of a finite field is cyclic");
        let mut log = vec![0u16; self.q as usize];
        let mut exp = vec![0u16; 2 * order];
        let mut acc = 1u32;
        for k in 0..order {
            exp[k] = acc as u16;
            exp[k + order] = acc as u16;
            log[acc as usize] = k as u16;
            acc = self.clmul_reduce(acc, generator);
        }
        LogTables { log, exp }
    }

    fn multiplicative_order(&self, g: u32) -> usize {
        let mut acc = g;
        let mut order = 1;
        while acc != 1 {
            acc = self.clmul_reduce(acc, g);
            order += 1;
        }
        order
    }

    /// Shift-and-add multiplication with reduction after every shift.
    fn clmul_reduce(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1u32 << self.ell;
        let mut acc = 0u32;
        while b != 0 {
            if b & 1 == 1 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    pub fn ell(&self) -> u32 {
        self.ell
    }

    /// Field size `q = 2^ell`.
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    /// Checked conversion from an integer in `[0, q-1]`.
    pub fn element(&self, value: u32) -> Result<FieldElement> {
        if value < self.q {
            Ok(FieldElement(value as u16))
        } else {
            Err(Error::Parameter(format!(
                "{value} is not an element of GF({})",
                self.q
            )))
        }
    }

    /// All field elements in integer order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + Clone {
        (0..self.q).map(|v| FieldElement(v as u16))
    }

    #[inline]
    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        FieldElement(x.0 ^ y.0)
    }

    #[inline]
    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.0 == 0 || y.0 == 0 {
            return FieldElement::ZERO;
        }
        match &self.tables {
            Some(t) => {
                let k = t.log[x.index()] as usize + t.log[y.index()] as usize;
                FieldElement(t.exp[k])
            }
            None => FieldElement(self.clmul_reduce(x.0 as u32, y.0 as u32) as u16),
        }
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement> {
        if x.is_zero() {
            return Err(Error::ZeroInverse);
        }
        Ok(match &self.tables {
            Some(t) => {
                let order = (self.q - 1) as usize;
                FieldElement(t.exp[(order - t.log[x.index()] as usize) % order])
            }
            None => self.pow(x, u64::from(self.q) - 2),
        })
    }

    /// `x^e` with the convention `0^0 = 1`.
    pub fn pow(&self, x: FieldElement, e: u64) -> FieldElement {
        if e == 0 {
            return FieldElement::ONE;
        }
        if x.is_zero() {
            return FieldElement::ZERO;
        }
        if let Some(t) = &self.tables {
            let order = u64::from(self.q - 1);
            let k = (u64::from(t.log[x.index()]) * (e % order)) % order;
            return FieldElement(t.exp[k as usize]);
        }
        let mut base = x;
        let mut e = e;
        let mut acc = FieldElement::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Horner evaluation of `sum coeffs[i] * x^i`.
    pub fn eval_poly(&self, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
        coeffs
            .iter()
            .rev()
            .fold(FieldElement::ZERO, |acc, &c| self.add(self.mul(acc, x), c))
    }
}

/// Trial division by every polynomial of degree at most half of `poly`'s.
pub(crate) fn is_irreducible(poly: u32) -> bool {
    let degree = 31 - poly.leading_zeros();
    if degree == 0 {
        return false;
    }
    (2u32..(1 << (degree / 2 + 1))).all(|divisor| poly_mod(poly, divisor) != 0)
}

fn poly_mod(mut num: u32, den: u32) -> u32 {
    let den_deg = 31 - den.leading_zeros();
    while num != 0 && 31 - num.leading_zeros() >= den_deg {
        let shift = (31 - num.leading_zeros()) - den_deg;
        num ^= den << shift;
    }
    num
}
