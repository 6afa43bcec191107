//! Construction of curve- and line-lifted codes as evaluation codes on
//! `F_q^2`, with membership testing and distance witnesses.
//!
//! Evaluation points are ordered by `index = x * q + y`, with `x` and `y` in
//! integer representation order.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gf::{FieldContext, FieldElement};
use crate::monomial::{is_lrs_good, is_qc_good, Curve, Line, Monomial};
use crate::poly::FullFieldInterpolator;

/// Largest codebook size searched exhaustively by [`exhaustive_min_weight`].
pub const EXHAUSTIVE_LIMIT: u64 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    /// Lifted along quadratic curves `y = alpha x^2 + beta x + gamma`.
    QcLrs,
    /// Lifted along all affine lines.
    Lrs,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::QcLrs => "qclrs",
            Family::Lrs => "lrs",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "qclrs" | "qc" => Ok(Family::QcLrs),
            "lrs" | "rm" => Ok(Family::Lrs),
            other => Err(Error::Parameter(format!("unknown code family {other:?}"))),
        }
    }
}

/// Family, field exponent and degree bound of a lifted code. The local
/// redundancy is `r = q - d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub family: Family,
    pub ell: u32,
    pub d: u32,
}

impl CodeSpec {
    pub fn new(family: Family, ell: u32, d: u32) -> Result<Self> {
        if !(1..=crate::gf::MAX_ELL).contains(&ell) {
            return Err(Error::Parameter(format!("field exponent {ell} out of range")));
        }
        let q = 1u32 << ell;
        if d < 1 || d > q - 1 {
            return Err(Error::Parameter(format!(
                "degree bound d={d} outside [1, {}]",
                q - 1
            )));
        }
        Ok(CodeSpec { family, ell, d })
    }

    pub fn with_redundancy(family: Family, ell: u32, r: u32) -> Result<Self> {
        let q = 1u32 << ell.min(31);
        if r < 1 || r >= q {
            return Err(Error::Parameter(format!(
                "redundancy r={r} outside [1, {}]",
                q.saturating_sub(1)
            )));
        }
        Self::new(family, ell, q - r)
    }

    pub fn q(&self) -> u32 {
        1 << self.ell
    }

    pub fn r(&self) -> u32 {
        self.q() - self.d
    }

    /// Block length `q^2`.
    pub fn n(&self) -> usize {
        (self.q() as usize).pow(2)
    }

    pub fn is_good(&self, m: Monomial) -> bool {
        let good = match self.family {
            Family::QcLrs => is_qc_good(m, self.q(), self.d),
            Family::Lrs => is_lrs_good(m, self.q(), self.d),
        };
        good.expect("degree bound validated at construction")
    }

    /// Good monomials in graded-lexicographic order (by `a + b`, then `a`).
    pub fn good_monomials(&self) -> Vec<Monomial> {
        let mut basis: Vec<Monomial> = Monomial::all(self.q()).filter(|&m| self.is_good(m)).collect();
        basis.sort_by_key(|m| (m.a + m.b, m.a));
        basis
    }

    pub fn bad_monomials(&self) -> Vec<Monomial> {
        Monomial::all(self.q()).filter(|&m| !self.is_good(m)).collect()
    }

    pub fn field(&self) -> FieldContext {
        FieldContext::new(self.ell).expect("field exponent validated at construction")
    }
}

/// A word of length `q^2` in evaluation-point order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Codeword(pub Vec<FieldElement>);

impl Codeword {
    pub fn values(&self) -> &[FieldElement] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|v| !v.is_zero()).count()
    }

    pub fn add(&self, ctx: &FieldContext, other: &Codeword) -> Codeword {
        Codeword(self.0.iter().zip(&other.0).map(|(&u, &v)| ctx.add(u, v)).collect())
    }

    pub fn at(&self, q: u32, x: FieldElement, y: FieldElement) -> FieldElement {
        self.0[point_index(q, x, y)]
    }
}

#[inline]
pub fn point_index(q: u32, x: FieldElement, y: FieldElement) -> usize {
    x.index() * q as usize + y.index()
}

/// Inverse of [`point_index`].
#[inline]
pub fn point_at(q: u32, index: usize) -> (FieldElement, FieldElement) {
    let q = q as usize;
    (
        FieldElement::from_raw((index / q) as u16),
        FieldElement::from_raw((index % q) as u16),
    )
}

/// Evaluation vector of an arbitrary function of `(x, y)`.
pub fn evaluate<F>(ctx: &FieldContext, f: F) -> Codeword
where
    F: Fn(FieldElement, FieldElement) -> FieldElement,
{
    Codeword(
        ctx.elements()
            .flat_map(|x| ctx.elements().map(move |y| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect(),
    )
}

pub fn evaluate_monomial(ctx: &FieldContext, m: Monomial) -> Codeword {
    evaluate(ctx, |x, y| m.eval(ctx, x, y))
}

/// A built code: basis of good monomials and the generator matrix whose rows
/// are their evaluation vectors.
#[derive(Clone, Debug)]
pub struct CodeInstance {
    spec: CodeSpec,
    ctx: FieldContext,
    basis: Vec<Monomial>,
    generator: Vec<Codeword>,
}

pub fn build_code(spec: CodeSpec) -> Result<CodeInstance> {
    let spec = CodeSpec::new(spec.family, spec.ell, spec.d)?;
    let ctx = spec.field();
    let basis = spec.good_monomials();
    let generator = basis.iter().map(|&m| evaluate_monomial(&ctx, m)).collect();
    Ok(CodeInstance {
        spec,
        ctx,
        basis,
        generator,
    })
}

impl CodeInstance {
    pub fn spec(&self) -> CodeSpec {
        self.spec
    }

    pub fn field(&self) -> &FieldContext {
        &self.ctx
    }

    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    pub fn generator(&self) -> &[Codeword] {
        &self.generator
    }

    /// Dimension.
    pub fn k(&self) -> usize {
        self.basis.len()
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.n() as f64
    }

    /// `message * G`.
    pub fn encode(&self, message: &[FieldElement]) -> Result<Codeword> {
        if message.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: message.len(),
            });
        }
        let mut out = vec![FieldElement::ZERO; self.n()];
        for (&coeff, row) in message.iter().zip(&self.generator) {
            if coeff.is_zero() {
                continue;
            }
            for (o, &g) in out.iter_mut().zip(row.values()) {
                *o = self.ctx.add(*o, self.ctx.mul(coeff, g));
            }
        }
        Ok(Codeword(out))
    }

    pub fn random_message<R: Rng>(&self, rng: &mut R) -> Vec<FieldElement> {
        let q = self.spec.q();
        (0..self.k())
            .map(|_| FieldElement::from_raw(rng.gen_range(0..q) as u16))
            .collect()
    }
}

/// Values of `word` along every member of the code's family, each listed by
/// the member's parameter in field order. Stops early when `visit` returns
/// `false`.
fn for_each_restriction<F>(spec: &CodeSpec, ctx: &FieldContext, word: &Codeword, mut visit: F) -> bool
where
    F: FnMut(&[FieldElement]) -> bool,
{
    let q = spec.q();
    let mut values = vec![FieldElement::ZERO; q as usize];
    match spec.family {
        Family::QcLrs => {
            for curve in Curve::all(ctx) {
                for x in ctx.elements() {
                    values[x.index()] = word.at(q, x, curve.y_at(ctx, x));
                }
                if !visit(&values) {
                    return false;
                }
            }
        }
        Family::Lrs => {
            for line in Line::all(ctx) {
                for t in ctx.elements() {
                    let (x, y) = line.point(ctx, t);
                    values[t.index()] = word.at(q, x, y);
                }
                if !visit(&values) {
                    return false;
                }
            }
        }
    }
    true
}

/// Whether every restriction of `word` to the family interpolates to a
/// polynomial of degree `< d`.
pub fn is_member(spec: &CodeSpec, word: &Codeword) -> Result<bool> {
    if word.len() != spec.n() {
        return Err(Error::LengthMismatch {
            expected: spec.n(),
            got: word.len(),
        });
    }
    let ctx = spec.field();
    let interp = FullFieldInterpolator::new(&ctx);
    let d = spec.d as usize;
    Ok(for_each_restriction(spec, &ctx, word, |values| {
        interp.degree_below(values, d)
    }))
}

/// Rank over the field by Gaussian elimination.
pub fn rank(ctx: &FieldContext, rows: &[Codeword]) -> usize {
    let mut m: Vec<Vec<FieldElement>> = rows.iter().map(|r| r.0.clone()).collect();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = ctx.inv(m[rank][col]).expect("pivot is nonzero");
        for v in m[rank].iter_mut() {
            *v = ctx.mul(*v, inv);
        }
        let pivot_row = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == rank || row[col].is_zero() {
                continue;
            }
            let factor = row[col];
            for (v, &p) in row.iter_mut().zip(&pivot_row).skip(col) {
                *v = ctx.add(*v, ctx.mul(factor, p));
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimensionCheck {
    /// Number of good monomials.
    pub count: usize,
    /// Rank of the generator matrix.
    pub rank: usize,
}

/// Good-monomial count against the generator rank.
pub fn verify_dimension(spec: &CodeSpec) -> Result<DimensionCheck> {
    let inst = build_code(*spec)?;
    Ok(DimensionCheck {
        count: inst.k(),
        rank: rank(inst.field(), inst.generator()),
    })
}

/// Whether every bad monomial's evaluation lies outside the row space, i.e.
/// appending it raises the rank.
pub fn bad_monomials_outside_span(inst: &CodeInstance) -> bool {
    let ctx = inst.field();
    let base = rank(ctx, inst.generator());
    let mut rows = inst.generator().to_vec();
    inst.spec().bad_monomials().into_iter().all(|m| {
        rows.push(evaluate_monomial(ctx, m));
        let grows = rank(ctx, &rows) == base + 1;
        rows.pop();
        grows
    })
}

/// Evaluation of `prod_{alpha in A} (x - alpha)` with `A` the first
/// `q - r - 1` field elements; its weight is `q r + q`.
pub fn distance_witness(spec: &CodeSpec) -> Result<Codeword> {
    if spec.family != Family::QcLrs {
        return Err(Error::Parameter(
            "the distance witness is defined for the quadratic-curve family".into(),
        ));
    }
    let ctx = spec.field();
    let roots = (spec.q() - spec.r() - 1) as usize;
    let column: Vec<FieldElement> = ctx
        .elements()
        .map(|x| {
            ctx.elements()
                .take(roots)
                .fold(FieldElement::ONE, |acc, a| ctx.mul(acc, ctx.add(x, a)))
        })
        .collect();
    Ok(evaluate(&ctx, |x, _| column[x.index()]))
}

/// Minimum weight over `trials` uniformly random nonzero messages.
pub fn sample_min_weight(inst: &CodeInstance, trials: usize, seed: u64) -> Result<usize> {
    if trials == 0 {
        return Err(Error::Parameter("trials must be at least 1".into()));
    }
    if inst.k() == 0 {
        return Err(Error::Parameter("the code has dimension 0".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = usize::MAX;
    let mut done = 0;
    while done < trials {
        let msg = inst.random_message(&mut rng);
        if msg.iter().all(|v| v.is_zero()) {
            continue;
        }
        best = best.min(inst.encode(&msg)?.weight());
        done += 1;
    }
    Ok(best)
}

/// Exact minimum distance by enumerating all `q^k - 1` nonzero codewords.
pub fn exhaustive_min_weight(inst: &CodeInstance) -> Result<usize> {
    let q = u64::from(inst.spec().q());
    let size = q.checked_pow(inst.k() as u32).filter(|&s| s <= EXHAUSTIVE_LIMIT);
    let Some(size) = size else {
        return Err(Error::Parameter(format!(
            "q^k = {q}^{} exceeds the exhaustive-search limit {EXHAUSTIVE_LIMIT}",
            inst.k()
        )));
    };
    if inst.k() == 0 {
        return Err(Error::Parameter("the code has dimension 0".into()));
    }
    let ctx = inst.field();
    // Walk messages as base-q counters, updating the codeword incrementally:
    // bumping digit i from v to v+1 adds ((v+1) - v) * row_i.
    let mut digits = vec![0u32; inst.k()];
    let mut word = vec![FieldElement::ZERO; inst.n()];
    let mut best = usize::MAX;
    for _ in 1..size {
        let mut i = 0;
        loop {
            let old = FieldElement::from_raw(digits[i] as u16);
            digits[i] = (digits[i] + 1) % q as u32;
            let new = FieldElement::from_raw(digits[i] as u16);
            let delta = ctx.add(old, new);
            for (w, &g) in word.iter_mut().zip(inst.generator()[i].values()) {
                *w = ctx.add(*w, ctx.mul(delta, g));
            }
            if digits[i] != 0 {
                break;
            }
            i += 1;
        }
        best = best.min(word.iter().filter(|v| !v.is_zero()).count());
    }
    Ok(best)
}

/// Writes a header row `family=..,ell=..,d=..` followed by one CSV row of
/// field-element integers per matrix row.
pub fn write_matrix_csv<W: Write>(spec: &CodeSpec, rows: &[Codeword], out: W) -> Result<()> {
    let io_err = |e: csv::Error| Error::Parameter(format!("csv write failed: {e}"));
    let mut w = csv::WriterBuilder::new()
        .flexible(true)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record([
        format!("family={}", spec.family),
        format!("ell={}", spec.ell),
        format!("d={}", spec.d),
    ])
    .map_err(io_err)?;
    for row in rows {
        w.write_record(row.values().iter().map(|v| v.value().to_string()))
            .map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| Error::Parameter(format!("csv write failed: {e}")))?;
    Ok(())
}

/// Inverse of [`write_matrix_csv`].
pub fn read_matrix_csv<R: BufRead>(input: R) -> Result<(CodeSpec, Vec<Codeword>)> {
    let bad = |msg: String| Error::Parameter(format!("malformed matrix csv: {msg}"));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(input);
    let mut records = reader.records();
    let header = records
        .next()
        .ok_or_else(|| bad("missing header".into()))?
        .map_err(|e| bad(e.to_string()))?;
    let field = |key: &str| -> Result<String> {
        header
            .iter()
            .find_map(|f| f.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .map(str::to_owned)
            .ok_or_else(|| bad(format!("header lacks {key}")))
    };
    let family: Family = field("family")?.parse()?;
    let ell: u32 = field("ell")?.parse().map_err(|_| bad("ell".into()))?;
    let d: u32 = field("d")?.parse().map_err(|_| bad("d".into()))?;
    let spec = CodeSpec::new(family, ell, d)?;
    let ctx = spec.field();
    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| {
                let v: u32 = f.trim().parse().map_err(|_| bad(format!("value {f:?}")))?;
                ctx.element(v)
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != spec.n() {
            return Err(Error::LengthMismatch {
                expected: spec.n(),
                got: row.len(),
            });
        }
        rows.push(Codeword(row));
    }
    Ok((spec, rows))
}
