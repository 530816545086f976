//! Chain-level products over pre-joins and machine checks of homology propagation.
//!
//! Conventions: chains are listed in ascending order, an `n`-chain has `n + 1`
//! members, and the empty chain spans degree −1.  For posets `X` and `Y`, the
//! pre-join `X ⊔join Y` uses the element layout of [`Poset::pre_join`]: the
//! elements `(x,1)`, then `(1,y)`, then `(x,y)` row-major.
//!
//! The shuffle sign is the parity of the shuffle as a permutation of the merged
//! positions.  With this sign the product satisfies the graded Leibniz rule
//! `∂(a × b) = ∂a × b + (−1)^{|a|} a × ∂b`, where `|a|` is the number of
//! members of `a` (one more than its degree).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{p_part, GroupTable, Subgroup};
use crate::homology::{reduced_betti, BettiProfile, ChainComplex, FormalChainSum};
use crate::poset::{Chain, Poset, PreJoin};
use crate::psubgroup::{build_p_poset, inclusion_poset, outer_and_image_posets, p_poset, PKind, PPoset};
use crate::replacement::{
    check_central_product, check_component, subgroup_label, w_poset, Condition, Member, ReplacementPoset, WVariant,
};

// ---------------------------------------------------------------------------
// shuffles

/// Sizes `(|X|, |Y|)` of the factors of a pre-join.
fn layout(pj: &PreJoin) -> (usize, usize) {
    let n = pj.coords.iter().filter(|c| c.1.is_none()).count();
    let m = pj.coords.iter().filter(|c| c.0.is_none()).count();
    (n, m)
}

/// Index of `(x, y)` in a pre-join with factors of sizes `n` and `m`.
fn pair_position(n: usize, m: usize, x: Option<usize>, y: Option<usize>) -> usize {
    match (x, y) {
        (Some(x), None) => x,
        (None, Some(y)) => n + y,
        (Some(x), Some(y)) => n + m + x * m + y,
        (None, None) => panic!("the double bottom is not a pre-join element"),
    }
}

/// Every interleaving of `k` left and `l` right items, with the parity of the
/// permutation taking the concatenation to the interleaving.  `true` marks a left item.
fn interleavings(k: usize, l: usize) -> Vec<(Vec<bool>, bool)> {
    fn go(k: usize, l: usize, seq: &mut Vec<bool>, rights: usize, odd: bool, out: &mut Vec<(Vec<bool>, bool)>) {
        if k == 0 && l == 0 {
            out.push((seq.clone(), odd));
            return;
        }
        if k > 0 {
            // a left item placed after `rights` right items crosses each of them
            seq.push(true);
            go(k - 1, l, seq, rights, odd ^ (rights % 2 == 1), out);
            seq.pop();
        }
        if l > 0 {
            seq.push(false);
            go(k, l - 1, seq, rights + 1, odd, out);
            seq.pop();
        }
    }
    let mut out = Vec::new();
    go(k, l, &mut Vec::with_capacity(k + l), 0, false, &mut out);
    out
}

/// Pre-join chain read off an interleaving: each step records the latest left
/// and right items seen so far.
fn interleaved_chain(n: usize, m: usize, ax: &[u32], b: &[u32], seq: &[bool]) -> Chain {
    let (mut i, mut j) = (0, 0);
    let (mut cur_x, mut cur_y) = (None, None);
    seq.iter()
        .map(|&left| {
            if left {
                cur_x = Some(ax[i] as usize);
                i += 1;
            } else {
                cur_y = Some(b[j] as usize);
                j += 1;
            }
            pair_position(n, m, cur_x, cur_y) as u32
        })
        .collect()
}

/// The classical shuffle product `aX × b`: the signed sum over all shuffles of the
/// sequence `aX` followed by `b`, each realized as a chain of the pre-join.
/// `ax` indexes the left factor and `b` the right factor of `pj`.
pub fn shuffle_product(pj: &PreJoin, ax: &[u32], b: &[u32]) -> FormalChainSum {
    let (n, m) = layout(pj);
    shuffle_in(n, m, ax, b)
}

fn shuffle_in(n: usize, m: usize, ax: &[u32], b: &[u32]) -> FormalChainSum {
    let mut out = FormalChainSum::zero(ax.len() as i32 + b.len() as i32 - 1);
    for (seq, odd) in interleavings(ax.len(), b.len()) {
        let c = interleaved_chain(n, m, ax, b, &seq);
        out.add_term(c, if odd { -BigRational::one() } else { BigRational::one() });
    }
    out
}

/// The chain `aX * b`: `aX` followed by `b`, all right members paired with `max(aX)`.
pub fn star_chain(pj: &PreJoin, ax: &[u32], b: &[u32]) -> Chain {
    let (n, m) = layout(pj);
    let seq: Vec<bool> = std::iter::repeat(true).take(ax.len()).chain(std::iter::repeat(false).take(b.len())).collect();
    interleaved_chain(n, m, ax, b, &seq)
}

// ---------------------------------------------------------------------------
// the (Zleft) context

/// The three conditions of the (Zleft) context.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZleftCondition {
    /// the pre-join and `Z` embed disjointly, with the pre-join order induced from `W`
    Containment,
    /// a `Z` element comparable with a pre-join element lies below it
    ComparableBelow,
    /// all of `Z` lies below every pre-join element with nontrivial right coordinate
    BelowPairs,
}

impl ZleftCondition {
    pub fn tag(self) -> &'static str {
        match self {
            ZleftCondition::Containment => "(i)",
            ZleftCondition::ComparableBelow => "(ii)",
            ZleftCondition::BelowPairs => "(iii)",
        }
    }
}

/// The first pair of elements violating a (Zleft) condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZleftViolation {
    pub condition: ZleftCondition,
    pub first: String,
    pub second: String,
    pub detail: String,
}

impl fmt::Display for ZleftViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(Zleft){} fails for {} and {}: {}", self.condition.tag(), self.first, self.second, self.detail)
    }
}

/// Role of an element of `W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    /// a pre-join element, by pre-join index
    Pair(usize),
    /// an element of `Z`, by position in `z_index`
    Z(usize),
    Other,
}

/// Posets `X`, `Y`, `W` with `X ⊔join Y` and `Z` embedded in `W`, satisfying (Zleft).
#[derive(Clone, Debug)]
pub struct ZleftInstance {
    pub name: String,
    pub x: Poset,
    pub y: Poset,
    pub w: Poset,
    pub pre_join: PreJoin,
    /// pre-join index → `W` index
    pub pair_index: Vec<usize>,
    /// `Z` element → `W` index; the order on `Z` is the one induced from `W`
    pub z_index: Vec<usize>,
    roles: Vec<Role>,
}

fn violation(cond: ZleftCondition, w: &Poset, a: usize, b: usize, detail: &str) -> ZleftViolation {
    ZleftViolation { condition: cond, first: w.label(a).into(), second: w.label(b).into(), detail: detail.into() }
}

/// Checks (Zleft) pairwise-exhaustively and returns the instance, or the first
/// violating pair.
pub fn zleft_check(
    name: &str,
    x: Poset,
    y: Poset,
    w: Poset,
    pair_index: Vec<usize>,
    z_index: Vec<usize>,
) -> std::result::Result<ZleftInstance, ZleftViolation> {
    use ZleftCondition::*;
    let pre_join = x.pre_join(&y);
    let bad_input = |detail: String| ZleftViolation {
        condition: Containment,
        first: String::new(),
        second: String::new(),
        detail,
    };
    if pair_index.len() != pre_join.poset.len() {
        return Err(bad_input(format!(
            "{} pre-join elements but {} embedding entries",
            pre_join.poset.len(),
            pair_index.len()
        )));
    }
    let mut roles = vec![Role::Other; w.len()];
    for (u, &i) in pair_index.iter().enumerate() {
        if i >= w.len() {
            return Err(bad_input(format!("embedding target {i} outside W")));
        }
        if roles[i] != Role::Other {
            return Err(violation(Containment, &w, i, i, "two pre-join elements share an image"));
        }
        roles[i] = Role::Pair(u);
    }
    for (zi, &i) in z_index.iter().enumerate() {
        if i >= w.len() {
            return Err(bad_input(format!("embedding target {i} outside W")));
        }
        if let Role::Pair(_) | Role::Z(_) = roles[i] {
            return Err(violation(Containment, &w, i, i, "Z meets the pre-join or repeats an element"));
        }
        roles[i] = Role::Z(zi);
    }
    let pj = &pre_join.poset;
    for u in 0..pj.len() {
        for v in 0..pj.len() {
            if u != v && pj.lt(u, v) != w.lt(pair_index[u], pair_index[v]) {
                return Err(violation(
                    Containment,
                    &w,
                    pair_index[u],
                    pair_index[v],
                    "the pre-join order is not the order induced from W",
                ));
            }
        }
    }
    for (u, &i) in pair_index.iter().enumerate() {
        for &z in &z_index {
            if w.lt(i, z) {
                return Err(violation(ComparableBelow, &w, z, i, "the Z element lies above the pair"));
            }
            if pre_join.coords[u].1.is_some() && !w.lt(z, i) {
                return Err(violation(BelowPairs, &w, z, i, "the Z element is not below a pair with y ≠ 1"));
            }
        }
    }
    Ok(ZleftInstance { name: name.into(), x, y, w, pre_join, pair_index, z_index, roles })
}

fn zleft_error(v: ZleftViolation) -> Error {
    Error::HypothesisFailed(v.to_string())
}

impl ZleftInstance {
    pub fn role(&self, i: usize) -> Role {
        self.roles[i]
    }

    fn sizes(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    /// `W` index of `(x, 1)`.
    pub fn x_vertex(&self, x: usize) -> usize {
        self.pair_index[x]
    }

    /// `W` index of the pre-join element `(x, y)`.
    pub fn pair_vertex(&self, x: Option<usize>, y: Option<usize>) -> usize {
        let (n, m) = self.sizes();
        self.pair_index[pair_position(n, m, x, y)]
    }

    /// Coordinates of a `W` element that is a pre-join element.
    pub fn coords(&self, i: usize) -> Option<(Option<usize>, Option<usize>)> {
        match self.roles[i] {
            Role::Pair(u) => Some(self.pre_join.coords[u]),
            _ => None,
        }
    }

    fn in_x(&self, i: usize) -> bool {
        matches!(self.coords(i), Some((Some(_), None)))
    }

    fn in_z(&self, i: usize) -> bool {
        matches!(self.roles[i], Role::Z(_))
    }

    /// Whether `i` lies in `X ∪ Z` (with `X` embedded as `X × 1`).
    pub fn in_xz(&self, i: usize) -> bool {
        self.in_x(i) || self.in_z(i)
    }

    /// Whether `i` lies in `(X ⊔join Y) ∪ Z`.
    pub fn in_core(&self, i: usize) -> bool {
        !matches!(self.roles[i], Role::Other)
    }

    /// `W` indices of `X ∪ Z`, ascending.
    pub fn xz_vertices(&self) -> Vec<usize> {
        (0..self.w.len()).filter(|&i| self.in_xz(i)).collect()
    }

    pub fn z_poset(&self) -> Poset {
        self.w.subposet(&self.z_index)
    }

    /// The order complex of `X ∪ Z` inside `W`.
    pub fn xz_complex(&self) -> Result<ChainComplex> {
        Ok(ChainComplex::of_poset(&self.w)?.filter(|c| c.iter().all(|&i| self.in_xz(i as usize))))
    }

    /// Splits a chain of `X ∪ Z` (in `W` indices) into its `Z` part (in `W`
    /// indices) and its `X` part (in `X` indices).
    pub fn split(&self, a: &[u32]) -> Result<(Chain, Chain)> {
        if !self.w.is_chain(a) {
            return Err(Error::PreconditionFailed(format!("{a:?} is not an ascending chain of W")));
        }
        let (mut az, mut ax) = (Vec::new(), Vec::new());
        for &i in a {
            match self.coords(i as usize) {
                Some((Some(x), None)) => ax.push(x as u32),
                _ if self.in_z(i as usize) => az.push(i),
                _ => {
                    return Err(Error::PreconditionFailed(format!("{} is not in X ∪ Z", self.w.label(i as usize))))
                }
            }
        }
        Ok((az, ax))
    }

    fn check_y_chain(&self, b: &[u32]) -> Result<()> {
        if !self.y.is_chain(b) {
            return Err(Error::PreconditionFailed(format!("{b:?} is not an ascending chain of Y")));
        }
        Ok(())
    }

    /// Prepends `a_Z` to a pre-join chain (given in `W` indices); every `Z`
    /// member must lie below every member of the chain.
    fn prepend(&self, az: &[u32], c: &[u32]) -> Result<Chain> {
        for &z in az {
            if let Some(&bad) = c.iter().find(|&&v| !self.w.lt(z as usize, v as usize)) {
                return Err(Error::HypothesisFailed(format!(
                    "(Zleft): {} is not below {}",
                    self.w.label(z as usize),
                    self.w.label(bad as usize)
                )));
            }
        }
        let mut out = az.to_vec();
        out.extend_from_slice(c);
        Ok(out)
    }

    fn to_w(&self, c: &[u32]) -> Chain {
        c.iter().map(|&u| self.pair_index[u as usize] as u32).collect()
    }

    /// The initial shuffle product `T(a, b) = a_Z ∪ (a_X × b)`, in `W` indices.
    pub fn t_pair(&self, a: &[u32], b: &[u32]) -> Result<FormalChainSum> {
        let (az, ax) = self.split(a)?;
        self.check_y_chain(b)?;
        let (n, m) = self.sizes();
        let shuffled = shuffle_in(n, m, &ax, b);
        let mut out = FormalChainSum::zero(a.len() as i32 + b.len() as i32 - 1);
        for (c, q) in shuffled.terms {
            out.add_term(self.prepend(&az, &self.to_w(&c))?, q);
        }
        Ok(out)
    }

    /// `a_Z ∪ (a_X * b)`, the expected `a`-initial part of `T(a, b)`.
    pub fn star(&self, a: &[u32], b: &[u32]) -> Result<Chain> {
        let (az, ax) = self.split(a)?;
        self.check_y_chain(b)?;
        let (n, m) = self.sizes();
        let seq: Vec<bool> = std::iter::repeat(true).take(ax.len()).chain(std::iter::repeat(false).take(b.len())).collect();
        self.prepend(&az, &self.to_w(&interleaved_chain(n, m, &ax, b, &seq)))
    }

    /// `T_*(α ⊗ β)`, extended bilinearly; `α` is over `X ∪ Z` in `W` indices and
    /// `β` over `Y`.  The result has degree `deg α + deg β + 1`.
    pub fn t_star(&self, alpha: &FormalChainSum, beta: &FormalChainSum) -> Result<FormalChainSum> {
        alpha.check_homogeneous()?;
        beta.check_homogeneous()?;
        let mut out = FormalChainSum::zero(alpha.degree + beta.degree + 1);
        for (a, qa) in &alpha.terms {
            for (b, qb) in &beta.terms {
                let t = self.t_pair(a, b)?;
                out.add_assign(&t.scaled(&(qa * qb)));
            }
        }
        Ok(out)
    }

    /// `T_*(∂(a ⊗ b)) = T_*(∂a ⊗ b) + (−1)^{|a|} T_*(a ⊗ ∂b)`.
    pub fn t_of_tensor_boundary(&self, a: &[u32], b: &[u32]) -> Result<FormalChainSum> {
        let fa = FormalChainSum::from_chain(a.to_vec());
        let fb = FormalChainSum::from_chain(b.to_vec());
        let mut out = self.t_star(&fa.boundary(), &fb)?;
        let sign = if a.len() % 2 == 0 { BigRational::one() } else { -BigRational::one() };
        if !b.is_empty() {
            out.add_assign(&self.t_star(&fa, &fb.boundary())?.scaled(&sign));
        }
        Ok(out)
    }

    /// Checks `K((X ⊔join Y) ∪ Z) ⊆ M ⊆ K(W)`.
    pub fn check_intermediate(&self, m: &ChainComplex) -> Result<()> {
        for k in -1..=m.dim() {
            if let Some(c) = m.chains(k).iter().find(|c| c.iter().any(|&i| i as usize >= self.w.len()) || !self.w.is_chain(c)) {
                return Err(Error::PreconditionFailed(format!("face {c:?} of M is not a chain of W")));
            }
        }
        let core: Vec<usize> = (0..self.w.len()).filter(|&i| self.in_core(i)).collect();
        let sub = self.w.subposet(&core);
        for level in sub.all_chains() {
            for c in level {
                let wc: Chain = c.iter().map(|&i| core[i as usize] as u32).collect();
                if !m.contains(&wc) {
                    let labels: Vec<&str> = wc.iter().map(|&i| self.w.label(i as usize)).collect();
                    return Err(Error::PreconditionFailed(format!("chain {labels:?} of (X ⊔join Y) ∪ Z is missing from M")));
                }
            }
        }
        Ok(())
    }

    /// Link condition on `a`: every vertex extending `a` inside `M` is `(max(a), y)` with `y ∈ Y`.
    pub fn link_condition(&self, m: &ChainComplex, a: &[u32]) -> Condition {
        if a.iter().any(|&i| i as usize >= self.w.len()) || !self.w.is_chain(a) {
            return Condition::new("2b", false, format!("{a:?} is not a chain of W"));
        }
        let top = a.last().and_then(|&t| match self.coords(t as usize) {
            Some((Some(x), None)) => Some(x),
            _ => None,
        });
        for v in complex_link(m, &self.w, a) {
            let ok = match (top, self.coords(v)) {
                (Some(x), Some((Some(x2), Some(_)))) => x == x2,
                _ => false,
            };
            if !ok {
                return Condition::new("2b", false, format!("link vertex {} is not of the form (max(a), y)", self.w.label(v)));
            }
        }
        Condition::new("2b", true, "Lk_M(a) ⊆ K({max(a)} × Y)")
    }

    /// Labels of a chain in `W`.
    pub fn labels(&self, c: &[u32]) -> Vec<String> {
        c.iter().map(|&i| self.w.label(i as usize).to_string()).collect()
    }
}

// ---------------------------------------------------------------------------
// links, full chains and initial parts

/// Vertices `v ∉ c` with `c ∪ {v}` a face of `m`; faces are ascending in `order`.
pub fn complex_link(m: &ChainComplex, order: &Poset, c: &[u32]) -> Vec<usize> {
    (0..order.len())
        .filter(|&v| !c.contains(&(v as u32)))
        .filter(|&v| {
            c.iter().all(|&u| order.comparable(u as usize, v)) && {
                let mut d = c.to_vec();
                d.push(v as u32);
                order.sort_chain(&mut d);
                m.contains(&d)
            }
        })
        .collect()
}

/// Whether every vertex of the link of `c` in `m` lies above `max(c)`.
pub fn is_full_in(m: &ChainComplex, order: &Poset, c: &[u32]) -> bool {
    match c.last() {
        Some(&top) => complex_link(m, order, c).iter().all(|&v| order.lt(top as usize, v)),
        None => true,
    }
}

/// The `c`-initial part: terms whose chain contains `c`, with every other member above `max(c)`.
pub fn initial_part(s: &FormalChainSum, c: &[u32], order: &Poset) -> FormalChainSum {
    let mut out = FormalChainSum::zero(s.degree);
    for (d, q) in &s.terms {
        let contains = c.iter().all(|x| d.contains(x));
        let after = match c.last() {
            Some(&top) => d.iter().filter(|x| !c.contains(x)).all(|&x| order.lt(top as usize, x as usize)),
            None => true,
        };
        if contains && after {
            out.add_term(d.clone(), q.clone());
        }
    }
    out
}

// ---------------------------------------------------------------------------
// propagation

/// Hypotheses and conclusion of one propagation check.
#[derive(Clone, Debug)]
pub struct PropagationReport {
    pub degree_alpha: i32,
    pub degree_beta: i32,
    /// tagged `1`, `2a`, `2b`, `3`
    pub hypotheses: Vec<Condition>,
    pub product: FormalChainSum,
    pub product_is_cycle: bool,
    pub product_nonbounding: bool,
}

impl PropagationReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|c| c.holds)
    }

    pub fn conclusion_holds(&self) -> bool {
        self.product_is_cycle && self.product_nonbounding
    }

    /// All hypotheses hold and the product is a non-bounding cycle of `M`.
    pub fn certified(&self) -> bool {
        self.hypotheses_hold() && self.conclusion_holds()
    }

    pub fn failed(&self, tag: &str) -> bool {
        self.hypotheses.iter().any(|c| c.name == tag && !c.holds)
    }

    pub fn to_json(&self, w: &Poset) -> serde_json::Value {
        json!({
            "degree_alpha": self.degree_alpha,
            "degree_beta": self.degree_beta,
            "hypotheses": self.hypotheses.iter().map(|c| json!({"name": c.name, "holds": c.holds, "detail": c.detail})).collect::<Vec<_>>(),
            "product": self.product.to_json(w),
            "product_is_cycle": self.product_is_cycle,
            "product_nonbounding": self.product_nonbounding,
            "certified": self.certified(),
        })
    }
}

fn nonzero_class(name: &str, s: &FormalChainSum, cx: &ChainComplex, min_degree: i32, support: impl Fn(&[u32]) -> bool) -> Result<Condition> {
    if s.check_homogeneous().is_err() {
        return Ok(Condition::new(name, false, "not degree-homogeneous"));
    }
    if s.degree < min_degree {
        return Ok(Condition::new(name, false, format!("degree {} is below {min_degree}", s.degree)));
    }
    if let Some(c) = s.terms.keys().find(|c| !support(c)) {
        return Ok(Condition::new(name, false, format!("term {c:?} is not a chain of the expected poset")));
    }
    if !s.is_cycle() {
        return Ok(Condition::new(name, false, "not a cycle"));
    }
    if cx.is_boundary(s)? {
        return Ok(Condition::new(name, false, "a boundary"));
    }
    Ok(Condition::new(name, true, format!("non-bounding {}-cycle", s.degree)))
}

/// Verifies the hypotheses of the propagation theorem for `(α, a, β)` and,
/// independently, its conclusion that `T_*(α ⊗ β)` is a non-bounding cycle of `M`.
/// `α` and `a` are in `W` indices, `β` in `Y` indices.
///
/// Fails with `ConclusionFailed` if every hypothesis holds but the conclusion
/// does not; that would contradict the theorem.
pub fn propagate_check(
    inst: &ZleftInstance,
    m: &ChainComplex,
    alpha: &FormalChainSum,
    a: &[u32],
    beta: &FormalChainSum,
) -> Result<PropagationReport> {
    inst.check_intermediate(m)?;
    let xz = m.filter(|c| c.iter().all(|&i| inst.in_xz(i as usize)));
    let ycx = ChainComplex::of_poset(&inst.y)?;
    let mut hyps = Vec::new();
    hyps.push(nonzero_class("1", alpha, &xz, 0, |c| xz.contains(c))?);
    let q = alpha.coefficient(a);
    hyps.push(Condition::new(
        "2a",
        !q.is_zero(),
        if q.is_zero() { "a does not occur in α".to_string() } else { format!("coefficient {q}") },
    ));
    hyps.push(inst.link_condition(m, a));
    hyps.push(nonzero_class("3", beta, &ycx, -1, |c| ycx.contains(c))?);
    let splittable = alpha.terms.keys().all(|c| inst.split(c).is_ok()) && beta.terms.keys().all(|c| inst.y.is_chain(c));
    let (product, cycle, nonbounding) = if splittable && alpha.check_homogeneous().is_ok() && beta.check_homogeneous().is_ok() {
        let product = inst.t_star(alpha, beta)?;
        let cycle = product.is_cycle();
        let nonbounding = !m.is_boundary(&product)?;
        (product, cycle, nonbounding)
    } else {
        (FormalChainSum::zero(alpha.degree + beta.degree + 1), false, false)
    };
    let report = PropagationReport {
        degree_alpha: alpha.degree,
        degree_beta: beta.degree,
        hypotheses: hyps,
        product,
        product_is_cycle: cycle,
        product_nonbounding: nonbounding,
    };
    if report.hypotheses_hold() && !report.conclusion_holds() {
        return Err(Error::ConclusionFailed(format!(
            "propagation hypotheses hold on {} but T(α⊗β) is {}",
            inst.name,
            if cycle { "a boundary" } else { "not a cycle" }
        )));
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// instances from groups

/// Subgroup-indexed posets for the central-product instance
/// `X = A_p(H)`, `Y = A_p(K)`, `Z = ∅`, `W = A_p(G)`.
#[derive(Clone, Debug)]
pub struct ClassicalSetup {
    pub instance: ZleftInstance,
    pub ap_h: PPoset,
    pub ap_k: PPoset,
    pub ap_g: PPoset,
}

pub fn classical_instance(g: &GroupTable, h: &Subgroup, k: &Subgroup, p: u32) -> Result<ClassicalSetup> {
    check_central_product(g, h, k, p)?;
    let ap_g = p_poset(g, p, PKind::Ap)?;
    let ap_h = build_p_poset(g, h, p, PKind::Ap)?;
    let ap_k = build_p_poset(g, k, p, PKind::Ap)?;
    let index: HashMap<&Subgroup, usize> = ap_g.subgroups.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let pj = ap_h.poset.pre_join(&ap_k.poset);
    let pair_index = pj
        .coords
        .iter()
        .map(|&(x, y)| {
            let s = Member::Pair(x.map(|i| ap_h.subgroups[i].clone()), y.map(|j| ap_k.subgroups[j].clone())).subgroup(g);
            index.get(&s).copied().ok_or_else(|| {
                Error::HypothesisFailed(format!("(Zleft)(i): {} is not elementary abelian", s.describe(g)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let name = format!("classical(H={}, K={})", subgroup_label(g, h), subgroup_label(g, k));
    let instance = zleft_check(&name, ap_h.poset.clone(), ap_k.poset.clone(), ap_g.poset.clone(), pair_index, Vec::new())
        .map_err(zleft_error)?;
    Ok(ClassicalSetup { instance, ap_h, ap_k, ap_g })
}

/// The component instance: `H = L`, `K = C_G(LB)`, `X = B_p(L)`, `Y = A_p(K)`,
/// `Z` = the p-outers of `L` inside `LB`, `W = W^B_G(L, K)`.
#[derive(Clone, Debug)]
pub struct ComponentSetup {
    pub instance: ZleftInstance,
    pub w: ReplacementPoset,
    pub outer: Subgroup,
    pub centralizer: Subgroup,
    pub outposet: Vec<Subgroup>,
}

/// The elementary abelian p-subgroups of `N_E(L)` meeting `L C_E(L)` trivially.
pub fn outposet_in(g: &GroupTable, e: &Subgroup, l: &Subgroup, p: u32) -> Vec<Subgroup> {
    let n = g.normalizer(e, l);
    let inner = g.product(l, &g.centralizer_of(e, l));
    g.elementary_abelian_subgroups(&n, p).into_iter().filter(|b| b.intersection(&inner).is_trivial()).collect()
}

pub fn component_instance(g: &GroupTable, l: &Subgroup, b: &Subgroup, p: u32) -> Result<ComponentSetup> {
    check_component(g, l, p)?;
    let whole = Subgroup::whole(g);
    let nl = g.normalizer(&whole, l);
    let inner = g.product(l, &g.centralizer_of(&whole, l));
    if b.is_trivial() || !g.is_elementary_abelian(b, p) || !b.is_subgroup_of(&nl) || !b.intersection(&inner).is_trivial() {
        return Err(Error::PreconditionFailed(format!("{} is not a p-outer of the component", b.describe(g))));
    }
    let lb = g.product(l, b);
    let k = g.centralizer_of(&whole, &lb);
    let w = w_poset(g, l, &k, p, WVariant::B)?;
    let bp = build_p_poset(g, l, p, PKind::Bp)?;
    let ap_k = build_p_poset(g, &k, p, PKind::Ap)?;
    let pj = bp.poset.pre_join(&ap_k.poset);
    let index = w.index();
    let pair_index = pj
        .coords
        .iter()
        .map(|&(x, y)| {
            let mem = Member::Pair(x.map(|i| bp.subgroups[i].clone()), y.map(|j| ap_k.subgroups[j].clone()));
            index.get(&mem).copied().ok_or_else(|| Error::ConclusionFailed(format!("{mem:?} missing from W")))
        })
        .collect::<Result<Vec<_>>>()?;
    let outposet = outposet_in(g, &lb, l, p);
    let z_index = outposet
        .iter()
        .map(|f| {
            index.get(&Member::Outer(f.clone())).copied().ok_or_else(|| {
                Error::HypothesisFailed(format!("(Zleft)(i): the outer {} is not an element of W", f.describe(g)))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let name = format!("component(L={}, B={})", subgroup_label(g, l), subgroup_label(g, b));
    let instance =
        zleft_check(&name, bp.poset, ap_k.poset, w.poset.clone(), pair_index, z_index).map_err(zleft_error)?;
    Ok(ComponentSetup { instance, w, outer: b.clone(), centralizer: k, outposet })
}

// ---------------------------------------------------------------------------
// the component pipeline

/// Result of propagating from `X ∪ Z` to `W` for a component and one of its p-outers.
#[derive(Clone, Debug)]
pub struct ComponentPropagation {
    pub component: String,
    pub outer: String,
    /// target degree of the propagated class
    pub degree: i32,
    pub xz_betti: BettiProfile,
    pub y_betti: BettiProfile,
    pub propagation: Option<PropagationReport>,
    /// why no propagation was attempted, when none was
    pub note: String,
    /// reduced Betti numbers of `A_p(LB)` computed directly
    pub direct_betti: BettiProfile,
    pub bound: CentralizerBound,
    w_labels: Vec<String>,
}

impl ComponentPropagation {
    pub fn certified(&self) -> bool {
        self.propagation.as_ref().is_some_and(|r| r.certified())
    }

    pub fn direct_confirms(&self) -> bool {
        self.direct_betti.get(self.degree) >= 1
    }

    pub fn to_json(&self) -> serde_json::Value {
        let w = Poset::build(self.w_labels.clone(), &[]).expect("antichain");
        json!({
            "component": self.component,
            "outer": self.outer,
            "degree": self.degree,
            "xz_betti": self.xz_betti.to_json()["betti"].clone(),
            "y_betti": self.y_betti.to_json()["betti"].clone(),
            "propagation": self.propagation.as_ref().map(|r| r.to_json(&w)),
            "note": self.note,
            "direct_betti": self.direct_betti.to_json()["betti"].clone(),
            "certified": self.certified(),
            "direct_confirms": self.direct_confirms(),
            "bound": self.bound.to_json(),
        })
    }
}

/// The index ratio `|L|_{p'} / ((p−1)·|C_L(B)|_{p'})`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CentralizerBound {
    pub l_p_prime: usize,
    pub centralizer_order: usize,
    pub centralizer_p_prime: usize,
    pub ratio: BigRational,
}

impl CentralizerBound {
    pub fn new(g: &GroupTable, l: &Subgroup, b: &Subgroup, p: u32) -> Self {
        let lp = l.order() / p_part(l.order(), p);
        let c = g.centralizer_of(l, b).order();
        let cp = c / p_part(c, p);
        let ratio = BigRational::new(BigInt::from(lp), BigInt::from((p as usize - 1) * cp));
        CentralizerBound { l_p_prime: lp, centralizer_order: c, centralizer_p_prime: cp, ratio }
    }

    pub fn holds(&self) -> bool {
        self.ratio > BigRational::one()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "l_p_prime": self.l_p_prime,
            "centralizer_order": self.centralizer_order,
            "centralizer_p_prime": self.centralizer_p_prime,
            "ratio": self.ratio.to_string(),
            "holds": self.holds(),
        })
    }
}

/// Chooses a cyclic p-outer `B` of `l` (preferring `O_p(C_L(B)) = 1`), builds the
/// component instance, and tries to propagate a class of `X ∪ Z` to a
/// non-bounding `degree`-cycle of `W`; also computes `A_p(LB)` directly.
pub fn component_propagation(g: &GroupTable, l: &Subgroup, p: u32, degree: i32) -> Result<ComponentPropagation> {
    check_component(g, l, p)?;
    let outers = outer_and_image_posets(g, l, p)?.outer.subgroups;
    let cyclic: Vec<&Subgroup> = outers.iter().filter(|b| b.order() == p as usize).collect();
    let b = cyclic
        .iter()
        .find(|b| g.core_p(&g.centralizer_of(l, b), p).is_trivial())
        .or(cyclic.first())
        .copied()
        .ok_or_else(|| Error::PreconditionFailed("the component has no p-outer".into()))?
        .clone();
    let setup = component_instance(g, l, &b, p)?;
    let inst = &setup.instance;
    let m = ChainComplex::of_poset(&inst.w)?;
    let xz = m.filter(|c| c.iter().all(|&i| inst.in_xz(i as usize)));
    let ycx = ChainComplex::of_poset(&inst.y)?;
    let xz_betti = xz.reduced_betti();
    let y_betti = ycx.reduced_betti();
    let lb = g.product(l, &b);
    let direct_betti = reduced_betti(&build_p_poset(g, &lb, p, PKind::Ap)?.poset)?;
    let bound = CentralizerBound::new(g, l, &b, p);

    let beta = (-1..=ycx.dim()).find_map(|k| ycx.witness_cycle(k));
    let mut propagation = None;
    let note = match beta {
        None => "A_p(K) is acyclic".to_string(),
        Some(beta) => {
            let alpha_degree = degree - beta.degree - 1;
            let cycles = if alpha_degree >= 0 { xz.nonbounding_cycles(alpha_degree) } else { Vec::new() };
            'search: for alpha in &cycles {
                for a in alpha.terms.keys() {
                    if inst.link_condition(&m, a).holds {
                        propagation = Some(propagate_check(inst, &m, alpha, a, &beta)?);
                        break 'search;
                    }
                }
            }
            if propagation.is_some() {
                String::new()
            } else if cycles.is_empty() {
                format!("H̃_{alpha_degree}(X ∪ Z) = 0: no class to propagate")
            } else {
                "no chain of the found cycles satisfies the link condition".to_string()
            }
        }
    };
    Ok(ComponentPropagation {
        component: subgroup_label(g, l),
        outer: subgroup_label(g, &b),
        degree,
        xz_betti,
        y_betti,
        propagation,
        note,
        direct_betti,
        bound,
        w_labels: inst.w.labels().to_vec(),
    })
}

// ---------------------------------------------------------------------------
// classical propagation lemmas

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassicalKind {
    /// `A_p(G)_{>A} ⊆ A × K` and nonzero homology of `A_p(K)`
    AS027,
    /// the subposet version with `𝒩_G(K) ⊆ X`
    KP314,
}

impl ClassicalKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassicalKind::AS027 => "as027",
            ClassicalKind::KP314 => "kp314",
        }
    }
}

impl FromStr for ClassicalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "as027" => Ok(ClassicalKind::AS027),
            "kp314" => Ok(ClassicalKind::KP314),
            _ => Err(Error::InvalidSpec(format!("unknown propagation lemma '{s}'"))),
        }
    }
}

/// Cycles and chain for the classical checks; `None` fields are searched for.
/// `alpha` and `a` index `A_p(H)`, `beta` indexes `A_p(K)`.
#[derive(Clone, Debug, Default)]
pub struct ClassicalData {
    pub alpha: Option<FormalChainSum>,
    pub a: Option<Chain>,
    pub beta: Option<FormalChainSum>,
}

#[derive(Clone, Debug)]
pub struct ClassicalReport {
    pub kind: ClassicalKind,
    pub hypotheses: Vec<Condition>,
    /// Betti numbers of the target (`A_p(G)` or the subposet `X`)
    pub target_betti: BettiProfile,
    /// the same conclusion reached through the pre-join propagation theorem
    pub propagation: Option<PropagationReport>,
}

impl ClassicalReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|c| c.holds)
    }

    pub fn failed(&self, tag: &str) -> bool {
        self.hypotheses.iter().any(|c| c.name == tag && !c.holds)
    }

    pub fn conclusion_holds(&self) -> bool {
        !self.target_betti.is_acyclic()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind.name(),
            "hypotheses": self.hypotheses.iter().map(|c| json!({"name": c.name, "holds": c.holds, "detail": c.detail})).collect::<Vec<_>>(),
            "target_betti": self.target_betti.to_json()["betti"].clone(),
            "conclusion": self.conclusion_holds(),
            "propagation_certified": self.propagation.as_ref().map(|r| r.certified()),
        })
    }
}

/// `E ∈ A_p(G)_{>A}` implies `E = A × (E ∩ K)`.
fn above_in_product(g: &GroupTable, ap_g: &PPoset, a: &Subgroup, k: &Subgroup) -> Option<String> {
    ap_g.subgroups
        .iter()
        .filter(|e| e.order() > a.order() && a.is_subgroup_of(e))
        .find(|e| g.product(a, &e.intersection(k)) != **e)
        .map(|e| format!("{} lies above A but not in A × K", e.describe(g)))
}

fn chain_subgroups(ps: &PPoset, c: &[u32]) -> Vec<Subgroup> {
    c.iter().map(|&i| ps.subgroups[i as usize].clone()).collect()
}

/// Checks the hypotheses of a classical propagation lemma and confirms its
/// conclusion by direct homology.  For `AS027` the conclusion is reached a second
/// time through [`propagate_check`] on the central-product instance.
pub fn classical_check(
    kind: ClassicalKind,
    g: &GroupTable,
    h: &Subgroup,
    k: &Subgroup,
    p: u32,
    x: Option<&[Subgroup]>,
    data: &ClassicalData,
) -> Result<ClassicalReport> {
    let central = check_central_product(g, h, k, p);
    let ap_h = build_p_poset(g, h, p, PKind::Ap)?;
    let ap_k = build_p_poset(g, k, p, PKind::Ap)?;
    let ap_g = p_poset(g, p, PKind::Ap)?;
    let hcx = ChainComplex::of_poset(&ap_h.poset)?;
    let kcx = ChainComplex::of_poset(&ap_k.poset)?;

    let xs: Vec<Subgroup> = match x {
        Some(xs) => {
            let all: HashSet<&Subgroup> = ap_g.subgroups.iter().collect();
            if let Some(bad) = xs.iter().find(|s| !all.contains(s)) {
                return Err(Error::PreconditionFailed(format!("{} is not in A_p(G)", bad.describe(g))));
            }
            xs.to_vec()
        }
        None => ap_g.subgroups.clone(),
    };
    let x_set: HashSet<&Subgroup> = xs.iter().collect();
    let x_poset = inclusion_poset(g, &xs)?;
    let meets_k = |e: &Subgroup| !e.intersection(k).is_trivial();

    // conditions on the chain a, used to pick a default
    let key_condition = |a: &[u32]| -> Option<String> {
        let top = a.last().map(|&i| ap_h.subgroups[i as usize].clone()).unwrap_or_else(Subgroup::trivial);
        match kind {
            ClassicalKind::AS027 => {
                if a.is_empty() {
                    return Some("the chain is empty".into());
                }
                above_in_product(g, &ap_g, &top, k)
            }
            ClassicalKind::KP314 => {
                let subs = chain_subgroups(&ap_h, a);
                if let Some(s) = subs.iter().find(|s| !x_set.contains(s)) {
                    return Some(format!("{} is not in X", s.describe(g)));
                }
                let xa: Vec<u32> = subs.iter().map(|s| xs.iter().position(|t| t == s).unwrap() as u32).collect();
                let link = x_poset.link_of(&xa);
                if !link.full {
                    return Some("a is not full in X".into());
                }
                xs.iter()
                    .filter(|e| e.order() > top.order() && top.is_subgroup_of(e))
                    .find(|e| !meets_k(e))
                    .map(|e| format!("{} lies above max(a) in X but misses K", e.describe(g)))
            }
        }
    };

    let top_degree = g.p_rank(h, p) as i32 - 1;
    let (alpha, a) = match (&data.alpha, &data.a) {
        (Some(al), Some(a)) => (Some(al.clone()), Some(a.clone())),
        (given, _) => {
            let candidates = match given {
                Some(al) => vec![al.clone()],
                None => match kind {
                    ClassicalKind::AS027 => hcx.nonbounding_cycles(top_degree),
                    ClassicalKind::KP314 => (-1..=hcx.dim()).flat_map(|d| hcx.nonbounding_cycles(d)).collect(),
                },
            };
            let found = candidates
                .iter()
                .find_map(|al| al.terms.keys().find(|c| key_condition(c).is_none()).map(|c| (al.clone(), c.clone())));
            match found {
                Some((al, c)) => (Some(al), Some(c)),
                None => match candidates.first() {
                    Some(al) => (Some(al.clone()), al.terms.keys().next().cloned()),
                    None => (None, None),
                },
            }
        }
    };
    let beta = data.beta.clone().or_else(|| (-1..=kcx.dim()).find_map(|d| kcx.witness_cycle(d)));

    let alpha_condition = |name: &str, min_degree: i32| -> Result<Condition> {
        match (&alpha, &a) {
            (Some(al), Some(a)) => {
                let c = nonzero_class(name, al, &hcx, min_degree, |c| hcx.contains(c))?;
                if !c.holds {
                    return Ok(c);
                }
                if al.coefficient(a).is_zero() {
                    return Ok(Condition::new(name, false, "a does not occur in α"));
                }
                Ok(c)
            }
            _ => Ok(Condition::new(name, false, "A_p(H) has no non-bounding cycle")),
        }
    };
    let beta_condition = |name: &str| -> Result<Condition> {
        match &beta {
            Some(b) => nonzero_class(name, b, &kcx, -1, |c| kcx.contains(c)),
            None => Ok(Condition::new(name, false, "A_p(K) is acyclic")),
        }
    };

    let mut hyps = Vec::new();
    let central_cond = |name: &str| match &central {
        Ok(()) => Condition::new(name, true, "[H,K] = 1 and H ∩ K is a p'-group"),
        Err(e) => Condition::new(name, false, e.to_string()),
    };
    let target_betti;
    match kind {
        ClassicalKind::AS027 => {
            hyps.push(central_cond("central product"));
            let mut c = alpha_condition("(i)", top_degree)?;
            if c.holds && alpha.as_ref().unwrap().degree != top_degree {
                c = Condition::new("(i)", false, format!("α is not in degree m_p(H) − 1 = {top_degree}"));
            }
            if c.holds {
                if let Some(msg) = key_condition(a.as_ref().unwrap()) {
                    c = Condition::new("(i)", false, msg);
                } else {
                    c.detail = format!("{}; A_p(G) above max(a) lies in max(a) × K", c.detail);
                }
            }
            hyps.push(c);
            hyps.push(beta_condition("(ii)")?);
            target_betti = reduced_betti(&ap_g.poset)?;
        }
        ClassicalKind::KP314 => {
            hyps.push(central_cond("(i)"));
            let missing = ap_g.subgroups.iter().find(|e| meets_k(e) && !x_set.contains(e));
            hyps.push(match missing {
                Some(e) => Condition::new("(ii)", false, format!("{} meets K but is missing from X", e.describe(g))),
                None => Condition::new("(ii)", true, "every member of A_p(G) meeting K lies in X"),
            });
            let mut c = alpha_condition("(iii)", -1)?;
            if c.holds {
                let al = alpha.as_ref().unwrap();
                let outside = al.terms.keys().flat_map(|t| chain_subgroups(&ap_h, t)).find(|s| !x_set.contains(s));
                if let Some(s) = outside {
                    c = Condition::new("(iii)", false, format!("α uses {} which is not in X", s.describe(g)));
                }
            }
            hyps.push(c);
            hyps.push(match &a {
                Some(a) => match key_condition(a) {
                    Some(msg) => Condition::new("(iv)", false, msg),
                    None => Condition::new("(iv)", true, "a is full in X and X above max(a) meets K"),
                },
                None => Condition::new("(iv)", false, "no chain a"),
            });
            hyps.push(beta_condition("(v)")?);
            target_betti = reduced_betti(&x_poset)?;
        }
    }

    let mut report = ClassicalReport { kind, hypotheses: hyps, target_betti, propagation: None };
    if report.hypotheses_hold() {
        if !report.conclusion_holds() {
            return Err(Error::ConclusionFailed(format!("{} hypotheses hold but the target is acyclic", kind.name())));
        }
        if kind == ClassicalKind::AS027 {
            let setup = classical_instance(g, h, k, p)?;
            let inst = &setup.instance;
            let to_w = |c: &Chain| -> Chain { c.iter().map(|&i| inst.x_vertex(i as usize) as u32).collect() };
            let al = alpha.as_ref().unwrap();
            let mut wa = FormalChainSum::zero(al.degree);
            for (c, q) in &al.terms {
                wa.add_term(to_w(c), q.clone());
            }
            let m = ChainComplex::of_poset(&inst.w)?;
            let r = propagate_check(inst, &m, &wa, &to_w(a.as_ref().unwrap()), beta.as_ref().unwrap())?;
            if !r.certified() {
                return Err(Error::ConclusionFailed(format!(
                    "as027 hypotheses hold but the propagation theorem's do not: {:?}",
                    r.hypotheses.iter().filter(|c| !c.holds).map(|c| &c.name).collect::<Vec<_>>()
                )));
            }
            report.propagation = Some(r);
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Quillen dimension

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QdVerdict {
    /// `O_p(G) > 1`: nothing to check
    VacuousPass,
    Pass,
    Fail,
}

#[derive(Clone, Debug)]
pub struct QdReport {
    pub p: u32,
    /// the p-rank `m_p(G)`
    pub rank: u32,
    pub op_order: usize,
    /// `β̃_{m_p − 1}(A_p(G))`, when computed
    pub top_betti: Option<usize>,
    pub verdict: QdVerdict,
}

impl QdReport {
    pub fn passed(&self) -> bool {
        self.verdict != QdVerdict::Fail
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "m_p": self.rank,
            "O_p_order": self.op_order,
            "top_betti": self.top_betti,
            "verdict": match self.verdict {
                QdVerdict::VacuousPass => "vacuous",
                QdVerdict::Pass => "pass",
                QdVerdict::Fail => "fail",
            },
        })
    }
}

/// Quillen-dimension check: if `O_p(G) = 1`, then `β̃_{m_p(G)−1}(A_p(G)) ≠ 0`.
pub fn qd_check(g: &GroupTable, p: u32) -> Result<QdReport> {
    let whole = Subgroup::whole(g);
    let op = g.core_p(&whole, p);
    let rank = g.p_rank(&whole, p);
    if !op.is_trivial() {
        return Ok(QdReport { p, rank, op_order: op.order(), top_betti: None, verdict: QdVerdict::VacuousPass });
    }
    let betti = reduced_betti(&p_poset(g, p, PKind::Ap)?.poset)?;
    let top = betti.get(rank as i32 - 1);
    let verdict = if top != 0 { QdVerdict::Pass } else { QdVerdict::Fail };
    Ok(QdReport { p, rank, op_order: 1, top_betti: Some(top), verdict })
}
