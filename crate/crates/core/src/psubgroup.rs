//! Posets of nontrivial p-subgroups ordered by inclusion, their variants,
//! fixed-point subposets, outer/image posets and the N/F split.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{is_prime, Elt, GroupTable, Subgroup};
use crate::poset::{Poset, Tag, VERTEX_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PKind {
    /// all nontrivial p-subgroups
    Sp,
    /// nontrivial elementary abelian p-subgroups
    Ap,
    /// p-radical subgroups: `P = O_p(N_G(P))`
    Bp,
    /// image of the infimum retraction on `Ap`
    IAp,
    /// image of the infimum retraction on `Sp` (nontrivial Sylow intersections)
    ISp,
}

impl PKind {
    pub const ALL: [PKind; 5] = [PKind::Sp, PKind::Ap, PKind::Bp, PKind::IAp, PKind::ISp];

    pub fn name(self) -> &'static str {
        match self {
            PKind::Sp => "sp",
            PKind::Ap => "ap",
            PKind::Bp => "bp",
            PKind::IAp => "iap",
            PKind::ISp => "isp",
        }
    }
}

impl fmt::Display for PKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<PKind> {
        PKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown poset kind '{s}'")))
    }
}

/// A poset of p-subgroups with its subgroup list (same indexing as the poset).
#[derive(Clone, Debug)]
pub struct PPoset {
    pub poset: Poset,
    pub subgroups: Vec<Subgroup>,
    pub p: u32,
    pub kind: PKind,
}

/// Inclusion poset on distinct subgroups, labelled in cycle notation.
pub fn inclusion_poset(g: &GroupTable, subs: &[Subgroup]) -> Result<Poset> {
    if subs.len() > VERTEX_CAP {
        return Err(Error::CapExceeded { cap: VERTEX_CAP });
    }
    let gens: Vec<Vec<Elt>> = subs.par_iter().map(|s| g.generators_of(s)).collect();
    let labels: Vec<String> = subs.iter().zip(&gens).map(|(_, gs)| label_from_gens(g, gs)).collect();
    let tags = subs.iter().cloned().map(Tag::Sub).collect();
    Poset::from_relation(labels, tags, |i, j| {
        let (a, b) = (&subs[i], &subs[j]);
        a.order() < b.order() && b.order() % a.order() == 0 && gens[i].iter().all(|&x| b.contains(x))
    })
}

/// `<g1,g2,...>` in cycle notation, or `1` for no generators.
pub fn label_from_gens(g: &GroupTable, gens: &[Elt]) -> String {
    if gens.is_empty() {
        return "1".into();
    }
    let parts: Vec<String> = gens.iter().map(|&x| g.fmt_elt(x)).collect();
    format!("<{}>", parts.join(","))
}

fn sort_canonical(v: &mut [Subgroup]) {
    v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
}

/// Whether `P = O_p(N_ambient(P))`.
pub fn is_radical(g: &GroupTable, ambient: &Subgroup, pg: &Subgroup, p: u32) -> bool {
    let n = g.normalizer(ambient, pg);
    g.core_p(&n, p) == *pg
}

/// `Ω_1(Z(Ω_1(C_ambient(E))))`.
pub fn omega_center_omega_centralizer(g: &GroupTable, ambient: &Subgroup, e: &Subgroup, p: u32) -> Subgroup {
    let c = g.centralizer_of(ambient, e);
    let o = g.omega1(&c, p);
    let z = g.center(&o);
    g.omega1(&z, p)
}

fn subgroup_list(g: &GroupTable, ambient: &Subgroup, p: u32, kind: PKind) -> Result<Vec<Subgroup>> {
    if !is_prime(p) || ambient.order() % p as usize != 0 {
        return Ok(Vec::new());
    }
    let mut v = match kind {
        PKind::Sp => g.p_subgroups(ambient, p),
        PKind::Ap => g.elementary_abelian_subgroups(ambient, p),
        PKind::Bp => {
            let all = g.p_subgroups(ambient, p);
            all.into_par_iter().filter(|s| is_radical(g, ambient, s, p)).collect()
        }
        PKind::IAp => {
            let ap = build_p_poset(g, ambient, p, PKind::Ap)?;
            let by_retract = retract_subgroups(&ap)?;
            let by_formula: Vec<Subgroup> = ap
                .subgroups
                .par_iter()
                .filter(|e| omega_center_omega_centralizer(g, ambient, e, p) == **e)
                .cloned()
                .collect();
            if !same_sets(&by_retract, &by_formula) {
                return Err(Error::ConclusionFailed(format!(
                    "iAp routes disagree: retraction gives {}, centralizer formula gives {}",
                    by_retract.len(),
                    by_formula.len()
                )));
            }
            by_retract
        }
        PKind::ISp => {
            let sp = build_p_poset(g, ambient, p, PKind::Sp)?;
            let by_retract = retract_subgroups(&sp)?;
            let by_intersections = sylow_intersections(g, ambient, p);
            if !same_sets(&by_retract, &by_intersections) {
                return Err(Error::ConclusionFailed(format!(
                    "iSp routes disagree: retraction gives {}, Sylow intersections give {}",
                    by_retract.len(),
                    by_intersections.len()
                )));
            }
            by_retract
        }
    };
    sort_canonical(&mut v);
    Ok(v)
}

fn retract_subgroups(x: &PPoset) -> Result<Vec<Subgroup>> {
    let r = x.poset.i_retract()?;
    Ok(r.fixed.iter().map(|&i| x.subgroups[i].clone()).collect())
}

fn same_sets(a: &[Subgroup], b: &[Subgroup]) -> bool {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort();
    b.sort();
    a == b
}

/// Nontrivial intersections of nonempty families of Sylow p-subgroups.
pub fn sylow_intersections(g: &GroupTable, ambient: &Subgroup, p: u32) -> Vec<Subgroup> {
    let sylows = g.all_sylow(ambient, p);
    let mut found: std::collections::BTreeSet<Subgroup> = sylows.iter().cloned().collect();
    let mut frontier: Vec<Subgroup> = sylows.clone();
    while let Some(h) = frontier.pop() {
        for s in &sylows {
            let i = h.intersection(s);
            if !i.is_trivial() && found.insert(i.clone()) {
                frontier.push(i);
            }
        }
    }
    found.into_iter().collect()
}

/// Builds the requested p-subgroup poset of `ambient`.
pub fn build_p_poset(g: &GroupTable, ambient: &Subgroup, p: u32, kind: PKind) -> Result<PPoset> {
    let subgroups = subgroup_list(g, ambient, p, kind)?;
    let poset = inclusion_poset(g, &subgroups)?;
    Ok(PPoset { poset, subgroups, p, kind })
}

/// The poset for the whole group.
pub fn p_poset(g: &GroupTable, p: u32, kind: PKind) -> Result<PPoset> {
    build_p_poset(g, &Subgroup::whole(g), p, kind)
}

/// Elements of a subgroup-tagged poset normalized by every element of `gens`.
pub fn fixed_indices(x: &Poset, g: &GroupTable, gens: &[Elt]) -> Vec<usize> {
    crate::homology::fixed_indices(x, g, gens)
}

/// Subposet of elements normalized by every generator of `q`.
pub fn fixed_subposet(x: &Poset, g: &GroupTable, q: &Subgroup) -> Poset {
    let gens = g.generators_of(q);
    x.subposet(&fixed_indices(x, g, &gens))
}

/// p-outer subgroups of `l` and the image poset.
#[derive(Clone, Debug)]
pub struct OuterImage {
    /// `{B ∈ A_p(N_G(L)) : B ∩ L C_G(L) = 1}`
    pub outer: PPoset,
    /// `L C_G(L)`
    pub inner: Subgroup,
    pub centralizer: Subgroup,
    /// one element per distinct `B C_G(L)` with `B ∈ A_p(N_G(L))`, `C_B(L) = 1`,
    /// ordered by containment; tags are the subgroups `B C_G(L)`
    pub image: Poset,
    /// for each outer element, the index of its image
    pub image_of: Vec<usize>,
}

pub fn outer_and_image_posets(g: &GroupTable, l: &Subgroup, p: u32) -> Result<OuterImage> {
    let whole = Subgroup::whole(g);
    let nl = g.normalizer(&whole, l);
    let cl = g.centralizer_of(&whole, l);
    let inner = g.product(l, &cl);
    let candidates = g.elementary_abelian_subgroups(&nl, p);
    let mut outer: Vec<Subgroup> =
        candidates.iter().filter(|b| b.intersection(&inner).is_trivial()).cloned().collect();
    sort_canonical(&mut outer);
    let outer_poset = inclusion_poset(g, &outer)?;

    let faithful: Vec<&Subgroup> = candidates.iter().filter(|b| b.intersection(&cl).is_trivial()).collect();
    let mut classes: BTreeMap<Subgroup, &Subgroup> = BTreeMap::new();
    for b in faithful {
        let bc = g.product(b, &cl);
        let e = classes.entry(bc).or_insert(b);
        if b.order() < e.order() || (b.order() == e.order() && b < *e) {
            *e = b;
        }
    }
    let mut reps: Vec<Subgroup> = classes.keys().cloned().collect();
    sort_canonical(&mut reps);
    let index: BTreeMap<&Subgroup, usize> = reps.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let image_of = outer.iter().map(|b| index[&g.product(b, &cl)]).collect();
    let suffix = if cl.is_trivial() { "" } else { "C" };
    let labels = reps
        .iter()
        .map(|r| format!("{}{suffix}", label_from_gens(g, &g.generators_of(classes[r]))))
        .collect();
    let tags = reps.iter().cloned().map(Tag::Sub).collect();
    let image = Poset::from_relation(labels, tags, |i, j| {
        reps[i].order() < reps[j].order() && reps[i].is_subgroup_of(&reps[j])
    })?;
    Ok(OuterImage {
        outer: PPoset { poset: outer_poset, subgroups: outer, p, kind: PKind::Ap },
        inner,
        centralizer: cl,
        image,
        image_of,
    })
}

/// Split of a poset of elementary abelian subgroups by whether they meet `h`.
#[derive(Clone, Debug)]
pub struct NfSplit {
    /// `{E : E ∩ H ≠ 1}`
    pub n: Vec<usize>,
    /// `{E : E ∩ H = 1}`
    pub f: Vec<usize>,
}

/// `b` must contain every element of `A_p(h)`; verifies that in each chain the `F`-part comes first.
pub fn nf_split(g: &GroupTable, b: &PPoset, h: &Subgroup) -> Result<NfSplit> {
    let aph = g.elementary_abelian_subgroups(h, b.p);
    let present: std::collections::HashSet<&Subgroup> = b.subgroups.iter().collect();
    if let Some(missing) = aph.iter().find(|e| !present.contains(e)) {
        return Err(Error::PreconditionFailed(format!("{} is not in the given poset", missing.describe(g))));
    }
    let (mut n, mut f) = (Vec::new(), Vec::new());
    for (i, e) in b.subgroups.iter().enumerate() {
        if e.intersection(h).is_trivial() {
            f.push(i);
        } else {
            n.push(i);
        }
    }
    for &ni in &n {
        for &fi in &f {
            if b.poset.lt(ni, fi) {
                return Err(Error::ConclusionFailed(format!(
                    "{} lies below {} although only the latter avoids H",
                    b.poset.label(ni),
                    b.poset.label(fi)
                )));
            }
        }
    }
    Ok(NfSplit { n, f })
}
