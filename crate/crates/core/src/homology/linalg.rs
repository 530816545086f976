//! Fraction-free sparse elimination over the integers.
//!
//! Rows are reduced by their largest column index ("low"); a reduction step
//! replaces `r` by `(p_l/g)·r − (r_l/g)·p` and divides by the row content, so
//! every stored entry stays an integer and ranks are exact over the rationals.
//! Work starts in checked `i64` and restarts in `BigInt` on overflow.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type SparseRow<T> = Vec<(u32, T)>;

/// Integer-like scalars with overflow-aware arithmetic.
pub trait Scalar: Clone + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn from_i64(v: i64) -> Self;
    /// `a*x - b*y`, or `None` on overflow.
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn from_i64(v: i64) -> Self {
        v
    }
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn lin(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Debug)]
pub struct Overflow;

/// `a·r − b·p` on sorted sparse rows.
fn combine<T: Scalar>(a: &T, r: &[(u32, T)], b: &T, p: &[(u32, T)]) -> Result<SparseRow<T>, Overflow> {
    let zero = T::zero();
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map_or(u32::MAX, |e| e.0);
        let cj = p.get(j).map_or(u32::MAX, |e| e.0);
        let (col, v) = if ci < cj {
            i += 1;
            (ci, T::lin(a, &r[i - 1].1, b, &zero).ok_or(Overflow)?)
        } else if cj < ci {
            j += 1;
            (cj, T::lin(a, &zero, b, &p[j - 1].1).ok_or(Overflow)?)
        } else {
            i += 1;
            j += 1;
            (ci, T::lin(a, &r[i - 1].1, b, &p[j - 1].1).ok_or(Overflow)?)
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    Ok(out)
}

fn content<T: Scalar>(rows: &[&[(u32, T)]]) -> Option<T> {
    let mut g: Option<T> = None;
    for row in rows {
        for (_, v) in row.iter() {
            g = Some(match g {
                None => v.gcd(v),
                Some(acc) => acc.gcd(v),
            });
            if g.as_ref().unwrap().is_unit() {
                return g;
            }
        }
    }
    g
}

fn divide<T: Scalar>(row: &mut SparseRow<T>, d: &T) {
    for e in row.iter_mut() {
        e.1 = e.1.div_exact(d);
    }
}

/// Incremental row-echelon basis with optional tracking of row combinations.
#[derive(Clone, Debug)]
pub struct Reducer<T: Scalar> {
    pivots: Vec<SparseRow<T>>,
    /// combination of inserted row ids producing each pivot (when tracking)
    combos: Vec<SparseRow<T>>,
    by_low: HashMap<u32, usize>,
    track: bool,
    inserted: u32,
}

/// Outcome of inserting a row.
pub enum Inserted<T: Scalar> {
    /// The row was independent and became a pivot.
    Pivot,
    /// The row was dependent; with tracking, the combination of inserted ids summing to zero.
    Dependent(Option<SparseRow<T>>),
}

impl<T: Scalar> Reducer<T> {
    pub fn new(track: bool) -> Self {
        Reducer { pivots: Vec::new(), combos: Vec::new(), by_low: HashMap::new(), track, inserted: 0 }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces `row` (with its combination) until zero or its low is new.
    fn reduce(&self, mut row: SparseRow<T>, mut combo: SparseRow<T>) -> Result<(SparseRow<T>, SparseRow<T>), Overflow> {
        while let Some(&(low, ref rl)) = row.last() {
            let Some(&pi) = self.by_low.get(&low) else { break };
            let p = &self.pivots[pi];
            let pl = &p.last().unwrap().1;
            let g = pl.gcd(rl);
            let a = pl.div_exact(&g);
            let b = rl.div_exact(&g);
            row = combine(&a, &row, &b, p)?;
            if self.track {
                combo = combine(&a, &combo, &b, &self.combos[pi])?;
            }
            if let Some(c) = content(&[&row, &combo]) {
                if !c.is_unit() && !c.is_zero() {
                    divide(&mut row, &c);
                    divide(&mut combo, &c);
                }
            }
        }
        Ok((row, combo))
    }

    /// Adds a row; its id for tracking is the insertion count.
    pub fn insert(&mut self, row: SparseRow<T>) -> Result<Inserted<T>, Overflow> {
        let id = self.inserted;
        self.inserted += 1;
        let combo = if self.track { vec![(id, T::from_i64(1))] } else { Vec::new() };
        let (row, combo) = self.reduce(row, combo)?;
        match row.last() {
            None => Ok(Inserted::Dependent(if self.track { Some(combo) } else { None })),
            Some(&(low, _)) => {
                self.by_low.insert(low, self.pivots.len());
                self.pivots.push(row);
                if self.track {
                    self.combos.push(combo);
                }
                Ok(Inserted::Pivot)
            }
        }
    }

    /// Whether `row` lies in the span of the inserted rows.
    pub fn in_span(&self, row: SparseRow<T>) -> Result<bool, Overflow> {
        let (r, _) = self.reduce(row, Vec::new())?;
        Ok(r.is_empty())
    }
}

fn to_big_rows(rows: &[SparseRow<i64>]) -> Vec<SparseRow<BigInt>> {
    rows.iter().map(|r| r.iter().map(|(c, v)| (*c, BigInt::from(*v))).collect()).collect()
}

fn rank_with<T: Scalar>(rows: Vec<SparseRow<T>>) -> Result<usize, Overflow> {
    let mut red = Reducer::<T>::new(false);
    for r in rows {
        red.insert(r)?;
    }
    Ok(red.rank())
}

/// Exact rank over the rationals of an integer sparse matrix given by rows.
pub fn rank(rows: &[SparseRow<i64>]) -> usize {
    match rank_with(rows.to_vec()) {
        Ok(r) => r,
        Err(Overflow) => rank_with(to_big_rows(rows)).expect("big integers do not overflow"),
    }
}

/// Whether `target` is in the rational row span of `rows`.
pub fn in_row_span(rows: &[SparseRow<i64>], target: &SparseRow<BigInt>) -> bool {
    let small: Option<SparseRow<i64>> = target
        .iter()
        .map(|(c, v)| i64::try_from(v).ok().map(|v| (*c, v)))
        .collect();
    if let Some(t) = small {
        let attempt = (|| {
            let mut red = Reducer::<i64>::new(false);
            for r in rows {
                red.insert(r.clone())?;
            }
            red.in_span(t)
        })();
        if let Ok(b) = attempt {
            return b;
        }
    }
    let mut red = Reducer::<BigInt>::new(false);
    for r in to_big_rows(rows) {
        red.insert(r).expect("big integers do not overflow");
    }
    red.in_span(target.clone()).expect("big integers do not overflow")
}

/// A basis of the left kernel `{ c : Σ c_i row_i = 0 }`, as sparse combinations over row ids.
pub fn left_kernel(rows: &[SparseRow<i64>]) -> Vec<SparseRow<BigInt>> {
    let mut red = Reducer::<BigInt>::new(true);
    let mut out = Vec::new();
    for r in to_big_rows(rows) {
        if let Inserted::Dependent(Some(c)) = red.insert(r).expect("big integers do not overflow") {
            out.push(normalize_sign(c));
        }
    }
    out
}

fn normalize_sign(mut c: SparseRow<BigInt>) -> SparseRow<BigInt> {
    if c.last().is_some_and(|e| e.1.is_negative()) {
        for e in c.iter_mut() {
            e.1 = -e.1.clone();
        }
    }
    c
}
