//! Finite posets with a dense strict-order matrix, chains, links, joins,
//! products, pre-joins and the retraction onto infima of maximal elements.

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::Subgroup;

/// Element limit for the dense relation matrix.
pub const VERTEX_CAP: usize = 4096;

/// Optional payload carried by a poset element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tag {
    None,
    Sub(Subgroup),
    /// A pre-join element `(x, y)`; `None` stands for the adjoined bottom `1`.
    Pair(Option<Subgroup>, Option<Subgroup>),
}

impl Tag {
    pub fn sub(&self) -> Option<&Subgroup> {
        match self {
            Tag::Sub(s) => Some(s),
            _ => None,
        }
    }
}

/// A chain, stored as ascending element indices.
pub type Chain = Vec<u32>;

#[derive(Clone, Debug)]
pub struct Poset {
    labels: Vec<String>,
    tags: Vec<Tag>,
    /// `above[i]` = `{ j : i < j }`
    above: Vec<FixedBitSet>,
    /// `below[i]` = `{ j : j < i }`
    below: Vec<FixedBitSet>,
}

#[derive(Serialize)]
struct PosetJson<'a> {
    elements: &'a [String],
    lt: Vec<[usize; 2]>,
}

/// Link of a chain together with its fullness classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinkInfo {
    pub link: Vec<usize>,
    /// every link element lies above the maximum of the chain
    pub full: bool,
    /// the link is empty
    pub maximal: bool,
}

/// The retraction sending `x` to the infimum of the maximal elements above it.
#[derive(Clone, Debug)]
pub struct IRetract {
    pub r: Vec<usize>,
    /// indices (in the original poset) of the fixed points, ascending
    pub fixed: Vec<usize>,
    pub poset: Poset,
}

impl Poset {
    pub fn empty() -> Poset {
        Poset { labels: Vec::new(), tags: Vec::new(), above: Vec::new(), below: Vec::new() }
    }

    /// Builds from generating pairs `(i, j)` meaning `i < j`, taking the transitive closure.
    pub fn build(labels: Vec<String>, pairs: &[(usize, usize)]) -> Result<Poset> {
        let n = labels.len();
        if n > VERTEX_CAP {
            return Err(Error::CapExceeded { cap: VERTEX_CAP });
        }
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for &(i, j) in pairs {
            assert!(i < n && j < n, "relation pair out of range");
            above[i].insert(j);
        }
        // Warshall over bit rows
        for k in 0..n {
            let row_k = above[k].clone();
            for row in above.iter_mut() {
                if row.contains(k) {
                    row.union_with(&row_k);
                }
            }
        }
        for (i, row) in above.iter().enumerate() {
            if row.contains(i) {
                return Err(Error::CycleDetected(labels[i].clone()));
            }
        }
        let tags = vec![Tag::None; n];
        Ok(Self::from_above(labels, tags, above))
    }

    /// Builds from a relation predicate that is claimed to be a strict order.
    /// Irreflexivity and transitivity are verified exhaustively.
    pub fn from_relation(
        labels: Vec<String>,
        tags: Vec<Tag>,
        lt: impl Fn(usize, usize) -> bool,
    ) -> Result<Poset> {
        let n = labels.len();
        if n > VERTEX_CAP {
            return Err(Error::CapExceeded { cap: VERTEX_CAP });
        }
        assert_eq!(tags.len(), n);
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for i in 0..n {
            for j in 0..n {
                if lt(i, j) {
                    if i == j {
                        return Err(Error::CycleDetected(labels[i].clone()));
                    }
                    above[i].insert(j);
                }
            }
        }
        let p = Self::from_above(labels, tags, above);
        p.verify_order()?;
        Ok(p)
    }

    fn from_above(labels: Vec<String>, tags: Vec<Tag>, above: Vec<FixedBitSet>) -> Poset {
        let n = labels.len();
        let mut below = vec![FixedBitSet::with_capacity(n); n];
        for (i, row) in above.iter().enumerate() {
            for j in row.ones() {
                below[j].insert(i);
            }
        }
        Poset { labels, tags, above, below }
    }

    /// Exhaustive irreflexivity, antisymmetry and transitivity check.
    pub fn verify_order(&self) -> Result<()> {
        for i in 0..self.len() {
            if self.above[i].contains(i) {
                return Err(Error::CycleDetected(self.labels[i].clone()));
            }
            for j in self.above[i].ones() {
                if self.above[j].contains(i) {
                    return Err(Error::CycleDetected(self.labels[i].clone()));
                }
                if !self.above[j].is_subset(&self.above[i]) {
                    let k = self.above[j].difference(&self.above[i]).next().unwrap();
                    return Err(Error::TransitivityViolation(format!(
                        "{} < {} < {} but not {} < {}",
                        self.labels[i], self.labels[j], self.labels[k], self.labels[i], self.labels[k]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn tags(&self) -> &[Tag] {
        &self.tags
    }

    pub fn tag(&self, i: usize) -> &Tag {
        &self.tags[i]
    }

    pub fn with_tags(mut self, tags: Vec<Tag>) -> Poset {
        assert_eq!(tags.len(), self.len());
        self.tags = tags;
        self
    }

    #[inline]
    pub fn lt(&self, i: usize, j: usize) -> bool {
        self.above[i].contains(j)
    }

    #[inline]
    pub fn le(&self, i: usize, j: usize) -> bool {
        i == j || self.lt(i, j)
    }

    #[inline]
    pub fn comparable(&self, i: usize, j: usize) -> bool {
        self.lt(i, j) || self.lt(j, i)
    }

    pub fn above(&self, i: usize) -> &FixedBitSet {
        &self.above[i]
    }

    pub fn below(&self, i: usize) -> &FixedBitSet {
        &self.below[i]
    }

    pub fn relation_count(&self) -> usize {
        self.above.iter().map(|r| r.count_ones(..)).sum()
    }

    pub fn relation_pairs(&self) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for (i, row) in self.above.iter().enumerate() {
            for j in row.ones() {
                v.push((i, j));
            }
        }
        v
    }

    pub fn maximal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.above[i].is_clear()).collect()
    }

    pub fn minimal_elements(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.below[i].is_clear()).collect()
    }

    /// Element comparable with every other element, if any.
    pub fn cone_point(&self) -> Option<usize> {
        let n = self.len();
        (0..n).find(|&i| self.above[i].count_ones(..) + self.below[i].count_ones(..) == n - 1)
    }

    /// Induced subposet on `keep` (in the given order).
    pub fn subposet(&self, keep: &[usize]) -> Poset {
        let labels = keep.iter().map(|&i| self.labels[i].clone()).collect();
        let tags = keep.iter().map(|&i| self.tags[i].clone()).collect();
        let n = keep.len();
        let mut above = vec![FixedBitSet::with_capacity(n); n];
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                if self.lt(i, j) {
                    above[a].insert(b);
                }
            }
        }
        Self::from_above(labels, tags, above)
    }

    pub fn opposite(&self) -> Poset {
        Poset {
            labels: self.labels.clone(),
            tags: self.tags.clone(),
            above: self.below.clone(),
            below: self.above.clone(),
        }
    }

    pub fn is_chain(&self, c: &[u32]) -> bool {
        c.windows(2).all(|w| self.lt(w[0] as usize, w[1] as usize))
    }

    /// Sorts a set of pairwise comparable elements ascending.
    pub fn sort_chain(&self, c: &mut Chain) {
        c.sort_by(|&a, &b| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if self.lt(a as usize, b as usize) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        });
    }

    /// Chains with `k + 1` members; `k = -1` gives the single empty chain.
    pub fn chains(&self, k: i32) -> Vec<Chain> {
        if k < -1 {
            return Vec::new();
        }
        if k == -1 {
            return vec![Vec::new()];
        }
        let size = (k + 1) as usize;
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(size);
        for x in 0..self.len() {
            cur.push(x as u32);
            self.extend_chains(&mut cur, size, &mut out);
            cur.pop();
        }
        out
    }

    fn extend_chains(&self, cur: &mut Chain, size: usize, out: &mut Vec<Chain>) {
        if cur.len() == size {
            out.push(cur.clone());
            return;
        }
        let last = *cur.last().unwrap() as usize;
        for y in self.above[last].ones() {
            cur.push(y as u32);
            self.extend_chains(cur, size, out);
            cur.pop();
        }
    }

    /// All chains grouped by size: entry `s` holds chains with `s` members (entry 0 is the empty chain).
    pub fn all_chains(&self) -> Vec<Vec<Chain>> {
        let mut by_size: Vec<Vec<Chain>> = vec![vec![Vec::new()]];
        let mut cur = Vec::new();
        for x in 0..self.len() {
            cur.push(x as u32);
            self.collect_all(&mut cur, &mut by_size);
            cur.pop();
        }
        for v in by_size.iter_mut() {
            v.sort();
        }
        by_size
    }

    fn collect_all(&self, cur: &mut Chain, by_size: &mut Vec<Vec<Chain>>) {
        if by_size.len() <= cur.len() {
            by_size.push(Vec::new());
        }
        by_size[cur.len()].push(cur.clone());
        let last = *cur.last().unwrap() as usize;
        for y in self.above[last].ones() {
            cur.push(y as u32);
            self.collect_all(cur, by_size);
            cur.pop();
        }
    }

    /// Number of chains of each size, without materializing them.
    pub fn chain_counts(&self) -> Vec<u64> {
        // counts[x][s] = chains of size s with minimum x, computed top-down
        let n = self.len();
        let order = self.linear_extension();
        let mut per: Vec<Vec<u64>> = vec![Vec::new(); n];
        for &x in order.iter().rev() {
            let mut v = vec![0u64, 1];
            for y in self.above[x].ones() {
                for (s, &c) in per[y].iter().enumerate().skip(1) {
                    if v.len() <= s + 1 {
                        v.resize(s + 2, 0);
                    }
                    v[s + 1] += c;
                }
            }
            per[x] = v;
        }
        let mut total = vec![1u64];
        for v in &per {
            if total.len() < v.len() {
                total.resize(v.len(), 0);
            }
            for (s, &c) in v.iter().enumerate().skip(1) {
                total[s] += c;
            }
        }
        total
    }

    /// Indices sorted so that `i < j` in the poset implies `i` comes first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        // number of elements below is strictly monotone along <
        idx.sort_by_key(|&i| (self.below[i].count_ones(..), i));
        idx
    }

    /// Link of a (possibly empty) chain: elements that extend it to a longer chain.
    pub fn link_of(&self, a: &[u32]) -> LinkInfo {
        let link: Vec<usize> = (0..self.len())
            .filter(|&x| !a.contains(&(x as u32)) && a.iter().all(|&y| self.comparable(x, y as usize)))
            .collect();
        let full = match a.last() {
            Some(&m) => link.iter().all(|&x| self.lt(m as usize, x)),
            None => true,
        };
        LinkInfo { maximal: link.is_empty(), full, link }
    }

    /// Join: disjoint union with every element of `self` below every element of `other`.
    pub fn join(&self, other: &Poset) -> Poset {
        let (n, m) = (self.len(), other.len());
        let mut labels: Vec<String> = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        let mut tags = self.tags.clone();
        tags.extend(other.tags.iter().cloned());
        let mut above = vec![FixedBitSet::with_capacity(n + m); n + m];
        for i in 0..n {
            for j in self.above[i].ones() {
                above[i].insert(j);
            }
            above[i].insert_range(n..n + m);
        }
        for i in 0..m {
            for j in other.above[i].ones() {
                above[n + i].insert(n + j);
            }
        }
        Self::from_above(labels, tags, above)
    }

    /// Cartesian product with the componentwise order.
    pub fn cartesian(&self, other: &Poset) -> Poset {
        let (n, m) = (self.len(), other.len());
        let mut labels = Vec::with_capacity(n * m);
        for i in 0..n {
            for j in 0..m {
                labels.push(format!("({},{})", self.labels[i], other.labels[j]));
            }
        }
        let mut above = vec![FixedBitSet::with_capacity(n * m); n * m];
        for i in 0..n {
            for j in 0..m {
                for i2 in 0..n {
                    for j2 in 0..m {
                        if (i, j) != (i2, j2) && self.le(i, i2) && other.le(j, j2) {
                            above[i * m + j].insert(i2 * m + j2);
                        }
                    }
                }
            }
        }
        Self::from_above(labels, vec![Tag::None; n * m], above)
    }

    /// Pre-join: product of the bottom-adjoined posets minus the double bottom.
    ///
    /// Element order: `(x,1)` for each x, then `(1,y)` for each y, then `(x,y)` row-major.
    pub fn pre_join(&self, other: &Poset) -> PreJoin {
        let (n, m) = (self.len(), other.len());
        let mut coords: Vec<(Option<usize>, Option<usize>)> = Vec::with_capacity(n + m + n * m);
        coords.extend((0..n).map(|i| (Some(i), None)));
        coords.extend((0..m).map(|j| (None, Some(j))));
        for i in 0..n {
            for j in 0..m {
                coords.push((Some(i), Some(j)));
            }
        }
        let le_opt = |p: &Poset, a: Option<usize>, b: Option<usize>| match (a, b) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => p.le(a, b),
        };
        let total = coords.len();
        let mut above = vec![FixedBitSet::with_capacity(total); total];
        for (u, &(x, y)) in coords.iter().enumerate() {
            for (v, &(x2, y2)) in coords.iter().enumerate() {
                if u != v && le_opt(self, x, x2) && le_opt(other, y, y2) {
                    above[u].insert(v);
                }
            }
        }
        let labels = coords
            .iter()
            .map(|&(x, y)| {
                format!(
                    "({},{})",
                    x.map_or("1", |i| self.labels[i].as_str()),
                    y.map_or("1", |j| other.labels[j].as_str())
                )
            })
            .collect();
        let tags = coords
            .iter()
            .map(|&(x, y)| {
                Tag::Pair(
                    x.and_then(|i| self.tags[i].sub().cloned()),
                    y.and_then(|j| other.tags[j].sub().cloned()),
                )
            })
            .collect();
        PreJoin { poset: Self::from_above(labels, tags, above), coords }
    }

    /// The retraction `x -> inf(maximal elements above x)` and its image.
    pub fn i_retract(&self) -> Result<IRetract> {
        let n = self.len();
        let maxes = self.maximal_elements();
        let mut r = vec![0; n];
        for x in 0..n {
            let ms: Vec<usize> = maxes.iter().copied().filter(|&m| self.le(x, m)).collect();
            // common lower bounds of ms, then their greatest element
            let mut lower = FixedBitSet::with_capacity(n);
            lower.insert_range(..);
            for &m in &ms {
                let mut le_m = self.below[m].clone();
                le_m.insert(m);
                lower.intersect_with(&le_m);
            }
            let top = lower
                .ones()
                .find(|&z| lower.ones().all(|w| self.le(w, z)))
                .ok_or_else(|| Error::NoInfimum(self.labels[x].clone()))?;
            r[x] = top;
        }
        let fixed: Vec<usize> = (0..n).filter(|&x| r[x] == x).collect();
        let poset = self.subposet(&fixed);
        Ok(IRetract { r, fixed, poset })
    }

    /// Checks that `f` (given on indices) preserves `<=` from `self` to `target`.
    pub fn is_order_preserving(&self, target: &Poset, f: &[usize]) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in self.above[i].ones() {
                if !target.le(f[i], f[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn to_json(&self) -> String {
        let lt = self.relation_pairs().into_iter().map(|(i, j)| [i, j]).collect();
        serde_json::to_string(&PosetJson { elements: &self.labels, lt }).expect("poset serializes")
    }

    /// Covering pairs of the order.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in self.above[i].ones() {
                let mut between = self.above[i].clone();
                between.intersect_with(&self.below[j]);
                if between.is_clear() {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn to_dot(&self) -> String {
        let mut s = String::from("graph hasse {\n");
        for (i, l) in self.labels.iter().enumerate() {
            s.push_str(&format!("  n{} [label=\"{}\"];\n", i, l.replace('"', "'")));
        }
        for (i, j) in self.hasse_edges() {
            s.push_str(&format!("  n{} -- n{};\n", i, j));
        }
        s.push_str("}\n");
        s
    }
}

/// A pre-join with the coordinates of each element.
#[derive(Clone, Debug)]
pub struct PreJoin {
    pub poset: Poset,
    /// `(x, y)` coordinates; `None` is the adjoined bottom.
    pub coords: Vec<(Option<usize>, Option<usize>)>,
}

impl PreJoin {
    pub fn index_of(&self, x: Option<usize>, y: Option<usize>) -> Option<usize> {
        self.coords.iter().position(|&c| c == (x, y))
    }
}
