//! Exact rational homology of order complexes (augmented, so degree −1 is
//! present), formal chain sums, and Lefschetz fixed-point profiles.

pub mod linalg;

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{Elt, GroupTable, Subgroup};
use crate::poset::{Chain, Poset, Tag, VERTEX_CAP};

use linalg::SparseRow;

/// Upper bound on the total number of chains materialized for one complex.
pub const CHAIN_CAP: u64 = 20_000_000;

/// A simplicial complex given by its faces, grouped by size (entry 0 is the empty face).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    faces: Vec<Vec<Chain>>,
    index: Vec<HashMap<Chain, u32>>,
}

impl ChainComplex {
    /// The augmented order complex of a poset, with `∂∂ = 0` verified.
    pub fn of_poset(x: &Poset) -> Result<ChainComplex> {
        if x.len() > VERTEX_CAP {
            return Err(Error::CapExceeded { cap: VERTEX_CAP });
        }
        let total: u64 = x.chain_counts().iter().sum();
        if total > CHAIN_CAP {
            return Err(Error::CapExceeded { cap: CHAIN_CAP as usize });
        }
        let cx = Self::from_faces(x.all_chains());
        cx.verify_boundary_squared()?;
        Ok(cx)
    }

    /// Complex generated by the given facets (all their faces are added).
    pub fn from_facets(facets: &[Chain]) -> ChainComplex {
        let mut sets: Vec<std::collections::BTreeSet<Chain>> = Vec::new();
        for f in facets {
            let n = f.len();
            // every subset of a chain is a chain
            for mask in 0u64..(1u64 << n) {
                let sub: Chain = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| f[i]).collect();
                let s = sub.len();
                if sets.len() <= s {
                    sets.resize_with(s + 1, Default::default);
                }
                sets[s].insert(sub);
            }
        }
        if sets.is_empty() {
            sets.push([Vec::new()].into_iter().collect());
        }
        Self::from_faces(sets.into_iter().map(|s| s.into_iter().collect()).collect())
    }

    /// Subcomplex of faces passing `keep`; the predicate must be closed under taking faces.
    pub fn filter(&self, keep: impl Fn(&Chain) -> bool) -> ChainComplex {
        let mut faces: Vec<Vec<Chain>> =
            self.faces.iter().map(|v| v.iter().filter(|c| keep(c)).cloned().collect()).collect();
        while faces.len() > 1 && faces.last().unwrap().is_empty() {
            faces.pop();
        }
        let cx = Self::from_faces(faces);
        debug_assert!(cx.is_closed());
        cx
    }

    fn from_faces(mut faces: Vec<Vec<Chain>>) -> ChainComplex {
        for v in faces.iter_mut() {
            v.sort();
        }
        let index = faces
            .iter()
            .map(|v| v.iter().enumerate().map(|(i, c)| (c.clone(), i as u32)).collect())
            .collect();
        ChainComplex { faces, index }
    }

    /// Top degree (number of members of the largest face, minus one).
    pub fn dim(&self) -> i32 {
        self.faces.len() as i32 - 2
    }

    /// Basis of `C_k` (`k ≥ −1`).
    pub fn chains(&self, k: i32) -> &[Chain] {
        let s = (k + 1) as usize;
        if k < -1 || s >= self.faces.len() {
            &[]
        } else {
            &self.faces[s]
        }
    }

    pub fn rank_of_degree(&self, k: i32) -> usize {
        self.chains(k).len()
    }

    pub fn contains(&self, c: &[u32]) -> bool {
        self.index.get(c.len()).is_some_and(|m| m.contains_key(c))
    }

    pub fn position(&self, c: &[u32]) -> Option<u32> {
        self.index.get(c.len()).and_then(|m| m.get(c).copied())
    }

    /// Every face of every face is present.
    pub fn is_closed(&self) -> bool {
        self.faces.iter().flatten().all(|c| (0..c.len()).all(|i| self.contains(&remove_at(c, i))))
    }

    /// Rows of `∂_k : C_k → C_{k−1}`, one per k-chain, in `C_{k−1}` coordinates.
    pub fn boundary_rows(&self, k: i32) -> Vec<SparseRow<i64>> {
        if k < 0 {
            return Vec::new();
        }
        self.chains(k)
            .iter()
            .map(|c| {
                let mut row: SparseRow<i64> = (0..c.len())
                    .map(|i| {
                        let col = self.position(&remove_at(c, i)).expect("complex closed under faces");
                        (col, if i % 2 == 0 { 1 } else { -1 })
                    })
                    .collect();
                row.sort_unstable_by_key(|e| e.0);
                row
            })
            .collect()
    }

    /// Checks `∂_{k−1} ∂_k = 0` exactly for every degree.
    pub fn verify_boundary_squared(&self) -> Result<()> {
        for k in 1..=self.dim() {
            for c in self.chains(k) {
                let s = FormalChainSum::from_chain(c.clone()).boundary().boundary();
                if !s.is_zero() {
                    return Err(Error::ConclusionFailed(format!("boundary of boundary nonzero on {c:?}")));
                }
            }
        }
        Ok(())
    }

    /// Exact ranks of `∂_k` for `k = 0..=dim`.
    pub fn boundary_ranks(&self) -> Vec<usize> {
        (0..=self.dim().max(-1)).into_par_iter().map(|k| linalg::rank(&self.boundary_rows(k))).collect()
    }

    /// Reduced Betti numbers; entry `i` is degree `i − 1`.
    pub fn reduced_betti(&self) -> BettiProfile {
        let ranks = self.boundary_ranks();
        let rk = |k: i32| if k < 0 || k as usize >= ranks.len() { 0 } else { ranks[k as usize] };
        let betti = (-1..=self.dim()).map(|k| self.rank_of_degree(k) - rk(k) - rk(k + 1)).collect();
        BettiProfile { betti }
    }

    /// Reduced Euler characteristic from face counts.
    pub fn euler_from_chains(&self) -> i64 {
        (-1..=self.dim()).map(|k| sign(k) * self.rank_of_degree(k) as i64).sum()
    }

    /// Coordinates of a degree-homogeneous sum; chains outside the complex get fresh columns.
    fn coordinates(&self, s: &FormalChainSum) -> SparseRow<BigInt> {
        let k = s.degree;
        let mut extra = self.rank_of_degree(k) as u32;
        let mut den = BigInt::one();
        for q in s.terms.values() {
            den = den.lcm(q.denom());
        }
        let mut row: SparseRow<BigInt> = s
            .terms
            .iter()
            .map(|(c, q)| {
                let col = self.position(c).unwrap_or_else(|| {
                    extra += 1;
                    extra - 1
                });
                (col, (q * BigRational::from_integer(den.clone())).to_integer())
            })
            .collect();
        row.sort_by_key(|e| e.0);
        row
    }

    /// Whether `σ = ∂γ` for some rational `γ` supported on this complex.
    pub fn is_boundary(&self, s: &FormalChainSum) -> Result<bool> {
        s.check_homogeneous()?;
        if s.is_zero() {
            return Ok(true);
        }
        Ok(linalg::in_row_span(&self.boundary_rows(s.degree + 1), &self.coordinates(s)))
    }

    /// A cycle of degree `k` that is not a boundary, when `H̃_k ≠ 0`.
    pub fn witness_cycle(&self, k: i32) -> Option<FormalChainSum> {
        self.kernel_basis(k).into_iter().find(|s| matches!(self.is_boundary(s), Ok(false)))
    }

    /// The members of a basis of `Z_k` that are not boundaries.
    pub fn nonbounding_cycles(&self, k: i32) -> Vec<FormalChainSum> {
        self.kernel_basis(k).into_iter().filter(|s| matches!(self.is_boundary(s), Ok(false))).collect()
    }

    /// A basis of the cycle group `Z_k`.
    fn kernel_basis(&self, k: i32) -> Vec<FormalChainSum> {
        let kernel: Vec<SparseRow<BigInt>> = if k == -1 {
            if self.rank_of_degree(-1) == 1 {
                vec![vec![(0, BigInt::one())]]
            } else {
                Vec::new()
            }
        } else {
            linalg::left_kernel(&self.boundary_rows(k))
        };
        let chains = self.chains(k);
        kernel
            .into_iter()
            .map(|combo| {
                let mut s = FormalChainSum::zero(k);
                for (id, c) in combo {
                    s.add_term(chains[id as usize].clone(), BigRational::from_integer(c));
                }
                s
            })
            .collect()
    }
}

fn sign(k: i32) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn remove_at(c: &[u32], i: usize) -> Chain {
    let mut v = Vec::with_capacity(c.len() - 1);
    v.extend_from_slice(&c[..i]);
    v.extend_from_slice(&c[i + 1..]);
    v
}

/// Reduced Betti numbers from degree −1 upward. Equality ignores trailing zero degrees.
#[derive(Clone, Debug)]
pub struct BettiProfile {
    /// entry `i` is the reduced Betti number in degree `i − 1`
    pub betti: Vec<usize>,
}

impl BettiProfile {
    pub fn get(&self, k: i32) -> usize {
        if k < -1 {
            return 0;
        }
        self.betti.get((k + 1) as usize).copied().unwrap_or(0)
    }

    pub fn euler(&self) -> i64 {
        self.betti.iter().enumerate().map(|(i, &b)| sign(i as i32 - 1) * b as i64).sum()
    }

    pub fn is_acyclic(&self) -> bool {
        self.betti.iter().all(|&b| b == 0)
    }

    /// Nonzero entries as `(degree, rank)`.
    pub fn nonzero(&self) -> Vec<(i32, usize)> {
        self.betti.iter().enumerate().filter(|(_, &b)| b > 0).map(|(i, &b)| (i as i32 - 1, b)).collect()
    }

    /// Degrees 0..=dim, plus degree −1 when it is nonzero.
    pub fn to_json(&self) -> serde_json::Value {
        let mut m = serde_json::Map::new();
        for (i, &b) in self.betti.iter().enumerate() {
            let k = i as i32 - 1;
            if k >= 0 || b > 0 {
                m.insert(k.to_string(), json!(b));
            }
        }
        json!({ "betti": m, "euler": self.euler() })
    }

    /// Profile with trailing zero degrees (beyond −1) dropped, for comparisons across complexes.
    pub fn trimmed(&self) -> BettiProfile {
        let mut b = self.betti.clone();
        while b.len() > 1 && *b.last().unwrap() == 0 {
            b.pop();
        }
        BettiProfile { betti: b }
    }
}

impl PartialEq for BettiProfile {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed().betti == other.trimmed().betti
    }
}

impl Eq for BettiProfile {}

impl std::fmt::Display for BettiProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.nonzero().iter().map(|(k, b)| format!("b{k}={b}")).collect();
        if parts.is_empty() {
            write!(f, "acyclic")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Reduced Betti numbers of a poset's order complex; the two Euler routes are cross-checked.
pub fn reduced_betti(x: &Poset) -> Result<BettiProfile> {
    let cx = ChainComplex::of_poset(x)?;
    let b = cx.reduced_betti();
    let by_counts = euler_from_counts(x);
    if b.euler() != by_counts || cx.euler_from_chains() != by_counts {
        return Err(Error::ConclusionFailed(format!(
            "Euler characteristic mismatch: Betti {} vs chain counts {}",
            b.euler(),
            by_counts
        )));
    }
    Ok(b)
}

/// Reduced Euler characteristic from chain counts alone.
pub fn euler_from_counts(x: &Poset) -> i64 {
    x.chain_counts().iter().enumerate().map(|(s, &c)| sign(s as i32 - 1) * c as i64).sum()
}

pub fn reduced_euler(x: &Poset) -> i64 {
    euler_from_counts(x)
}

/// A finite rational combination of equal-size chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormalChainSum {
    pub degree: i32,
    pub terms: BTreeMap<Chain, BigRational>,
}

impl FormalChainSum {
    pub fn zero(degree: i32) -> Self {
        FormalChainSum { degree, terms: BTreeMap::new() }
    }

    pub fn from_chain(c: Chain) -> Self {
        let mut s = Self::zero(c.len() as i32 - 1);
        s.terms.insert(c, BigRational::one());
        s
    }

    pub fn add_term(&mut self, c: Chain, q: BigRational) {
        debug_assert_eq!(c.len() as i32 - 1, self.degree);
        let e = self.terms.entry(c).or_insert_with(BigRational::zero);
        *e += q;
        if e.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_assign(&mut self, other: &FormalChainSum) {
        for (c, q) in &other.terms {
            self.add_term(c.clone(), q.clone());
        }
    }

    pub fn scaled(&self, q: &BigRational) -> FormalChainSum {
        if q.is_zero() {
            return Self::zero(self.degree);
        }
        FormalChainSum { degree: self.degree, terms: self.terms.iter().map(|(c, v)| (c.clone(), v * q)).collect() }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, c: &[u32]) -> BigRational {
        self.terms.get(c).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn check_homogeneous(&self) -> Result<()> {
        for c in self.terms.keys() {
            if c.len() as i32 - 1 != self.degree {
                return Err(Error::ChainDegree { expected: self.degree, found: c.len() as i32 - 1 });
            }
        }
        Ok(())
    }

    /// Alternating face sum; the empty chain has zero boundary.
    pub fn boundary(&self) -> FormalChainSum {
        let mut out = Self::zero(self.degree - 1);
        if self.degree < 0 {
            return out;
        }
        for (c, q) in &self.terms {
            for i in 0..c.len() {
                let v = if i % 2 == 0 { q.clone() } else { -q.clone() };
                out.add_term(remove_at(c, i), v);
            }
        }
        out
    }

    pub fn is_cycle(&self) -> bool {
        self.boundary().is_zero()
    }

    /// JSON with element labels taken from `x`.
    pub fn to_json(&self, x: &Poset) -> serde_json::Value {
        let terms: Vec<serde_json::Value> = self
            .terms
            .iter()
            .map(|(c, q)| {
                let labels: Vec<&str> = c.iter().map(|&i| x.label(i as usize)).collect();
                json!({ "chain": labels, "coeff": q.to_string() })
            })
            .collect();
        json!({ "degree": self.degree, "terms": terms })
    }
}

pub fn is_cycle(s: &FormalChainSum) -> Result<bool> {
    s.check_homogeneous()?;
    Ok(s.is_cycle())
}

pub fn is_boundary(s: &FormalChainSum, m: &ChainComplex) -> Result<bool> {
    m.is_boundary(s)
}

/// One row of a Lefschetz profile.
#[derive(Clone, Debug)]
pub struct LefschetzRow {
    pub representative: Elt,
    pub class_size: usize,
    pub fixed_size: usize,
    pub euler: i64,
    pub betti: BettiProfile,
}

#[derive(Clone, Debug)]
pub struct LefschetzProfile {
    pub rows: Vec<LefschetzRow>,
}

impl LefschetzProfile {
    /// Some class has nonzero reduced Euler characteristic on its fixed points.
    pub fn witness(&self) -> Option<&LefschetzRow> {
        self.rows.iter().find(|r| r.euler != 0)
    }

    pub fn to_tsv(&self, g: &GroupTable) -> String {
        let mut s = String::from("representative\tclass_size\tfixed_size\teuler\n");
        for r in &self.rows {
            s.push_str(&format!("{}\t{}\t{}\t{}\n", g.fmt_elt(r.representative), r.class_size, r.fixed_size, r.euler));
        }
        s
    }
}

/// Indices of elements whose subgroup tag is normalized by every element of `by`.
pub fn fixed_indices(x: &Poset, g: &GroupTable, by: &[Elt]) -> Vec<usize> {
    (0..x.len())
        .filter(|&i| match x.tag(i) {
            Tag::Sub(h) => {
                let hg = g.generators_of(h);
                by.iter().all(|&t| g.normalizes(t, h, &hg))
            }
            _ => panic!("fixed points need subgroup-tagged elements"),
        })
        .collect()
}

/// Per conjugacy class of `ambient`, the fixed subposet's Betti profile and reduced Euler
/// characteristic. `X^g` (fixed by `g`) and `X^⟨g⟩` (fixed by every power) are computed
/// separately and their Euler characteristics compared.
pub fn lefschetz_profile(x: &Poset, g: &GroupTable, ambient: &Subgroup) -> Result<LefschetzProfile> {
    let classes = g.conjugacy_classes(ambient);
    let rows: Result<Vec<LefschetzRow>> = classes
        .par_iter()
        .map(|cls| {
            let rep = cls[0];
            let fixed_g = x.subposet(&fixed_indices(x, g, &[rep]));
            let cyclic = g.closure(&[rep]);
            let fixed_cyc = x.subposet(&fixed_indices(x, g, cyclic.members()));
            let betti = reduced_betti(&fixed_g)?;
            let e2 = euler_from_counts(&fixed_cyc);
            if betti.euler() != e2 {
                return Err(Error::ConclusionFailed(format!(
                    "fixed points of {} and of its cyclic group disagree",
                    g.fmt_elt(rep)
                )));
            }
            Ok(LefschetzRow {
                representative: rep,
                class_size: cls.len(),
                fixed_size: fixed_g.len(),
                euler: e2,
                betti,
            })
        })
        .collect();
    Ok(LefschetzProfile { rows: rows? })
}

/// Rational helper: `n/1`.
pub fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Sign-normalizes a sum so its last term has positive coefficient.
pub fn normalized(s: &FormalChainSum) -> FormalChainSum {
    match s.terms.values().last() {
        Some(v) if v.is_negative() => s.scaled(&-BigRational::one()),
        _ => s.clone(),
    }
}
