//! Replacement posets for `A_p(G)` and their homology-level certification.
//!
//! Every replacement poset splits into a subgroup side (built from `H`, or a
//! pre-join of posets of `H` and `K`) and an *outer* part `F` of elementary
//! abelian subgroups meeting `H` trivially.  The cross relation between the two
//! parts is what distinguishes the kinds.  Equivalences with `A_p(G)` are
//! certified by (a) order preservation of an explicit comparison map, (b)
//! acyclicity of every fiber join, and (c) equality of global Betti profiles.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{Elt, GroupTable, Subgroup};
use crate::homology::{reduced_betti, BettiProfile};
use crate::poset::{Poset, Tag};
use crate::psubgroup::{build_p_poset, label_from_gens, nf_split, outer_and_image_posets, p_poset, PKind, PPoset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ReplacementKind {
    X,
    Xi,
    Thevenaz,
    WA,
    WS,
    WB,
    TildeX,
    TildeWA,
    TildeWS,
    TildeWB,
    Removal,
}

impl ReplacementKind {
    pub const ALL: [ReplacementKind; 11] = [
        ReplacementKind::X,
        ReplacementKind::Xi,
        ReplacementKind::Thevenaz,
        ReplacementKind::WA,
        ReplacementKind::WS,
        ReplacementKind::WB,
        ReplacementKind::TildeX,
        ReplacementKind::TildeWA,
        ReplacementKind::TildeWS,
        ReplacementKind::TildeWB,
        ReplacementKind::Removal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ReplacementKind::X => "x",
            ReplacementKind::Xi => "xi",
            ReplacementKind::Thevenaz => "thevenaz",
            ReplacementKind::WA => "wa",
            ReplacementKind::WS => "ws",
            ReplacementKind::WB => "wb",
            ReplacementKind::TildeX => "tx",
            ReplacementKind::TildeWA => "twa",
            ReplacementKind::TildeWS => "tws",
            ReplacementKind::TildeWB => "twb",
            ReplacementKind::Removal => "removal",
        }
    }

    /// Whether the kind is built from a component `L` rather than from `H` (and `K`).
    pub fn needs_component(self) -> bool {
        matches!(
            self,
            ReplacementKind::TildeX
                | ReplacementKind::TildeWA
                | ReplacementKind::TildeWS
                | ReplacementKind::TildeWB
                | ReplacementKind::Removal
        )
    }
}

impl fmt::Display for ReplacementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ReplacementKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        ReplacementKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown replacement kind '{s}'")))
    }
}

/// Which poset of `H` forms the left factor of a pre-join.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WVariant {
    A,
    S,
    B,
}

impl WVariant {
    fn kind(self) -> PKind {
        match self {
            WVariant::A => PKind::Ap,
            WVariant::S => PKind::Sp,
            WVariant::B => PKind::Bp,
        }
    }
}

/// Identity of an element of a replacement poset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Member {
    /// an element of the subgroup-side poset
    Inner(Subgroup),
    /// a pre-join element; `None` is the adjoined bottom
    Pair(Option<Subgroup>, Option<Subgroup>),
    /// an elementary abelian subgroup meeting the base subgroup trivially
    Outer(Subgroup),
}

impl Member {
    /// The subgroup represented (the product for pairs).
    pub fn subgroup(&self, g: &GroupTable) -> Subgroup {
        match self {
            Member::Inner(s) | Member::Outer(s) => s.clone(),
            Member::Pair(b, c) => match (b, c) {
                (Some(b), Some(c)) => g.product(b, c),
                (Some(s), None) | (None, Some(s)) => s.clone(),
                (None, None) => Subgroup::trivial(),
            },
        }
    }

    pub fn is_outer(&self) -> bool {
        matches!(self, Member::Outer(_))
    }
}

/// Construction parameters, kept so a poset can be certified later.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub p: u32,
    /// subgroup whose avoiders form the outer part (`H`, `HK` or `L C_G(L)`)
    pub base: Subgroup,
    pub h: Subgroup,
    pub k: Option<Subgroup>,
    pub l: Option<Subgroup>,
    /// intermediate poset `A_p(H) ⊆ B ⊆ A_p(G)`; `None` means `A_p(G)`
    pub b: Option<PPoset>,
    /// removed set for the removal kind
    pub removed: Vec<Subgroup>,
}

#[derive(Clone, Debug)]
pub struct ReplacementPoset {
    pub kind: ReplacementKind,
    pub poset: Poset,
    pub members: Vec<Member>,
    pub provenance: Provenance,
    /// outers `B` of the component with `O_p(C_G(LB)) > 1` (tilde kinds)
    pub conical_outers: Vec<Subgroup>,
    /// outer/subgroup-side pairs dropped by the tilde exclusion rule
    pub excluded_pairs: usize,
}

impl ReplacementPoset {
    pub fn outer_count(&self) -> usize {
        self.members.iter().filter(|m| m.is_outer()).count()
    }

    pub fn index(&self) -> HashMap<&Member, usize> {
        self.members.iter().enumerate().map(|(i, m)| (m, i)).collect()
    }

    /// Whether every comparable outer/non-outer pair has the outer on the
    /// prescribed side (left for all kinds except the reverse-ordered one).
    pub fn outer_side_holds(&self) -> bool {
        let right = self.kind == ReplacementKind::Thevenaz;
        let n = self.members.len();
        (0..n).all(|i| {
            self.poset.above(i).ones().all(|j| {
                let (oi, oj) = (self.members[i].is_outer(), self.members[j].is_outer());
                if oi == oj {
                    true
                } else if right {
                    oj
                } else {
                    oi
                }
            })
        })
    }
}

// ---------------------------------------------------------------------------
// group helpers

/// Whether some nontrivial element of `a` commutes with every element of `gens`.
fn centralizes_something(g: &GroupTable, a: &[Elt], gens: &[Elt]) -> bool {
    a.iter().any(|&x| x != 0 && gens.iter().all(|&f| g.commute(x, f)))
}

/// `C_A(F)` for a subgroup or product set `a`.
fn centralized_part(g: &GroupTable, a: &[Elt], gens: &[Elt]) -> Vec<Elt> {
    a.iter().copied().filter(|&x| gens.iter().all(|&f| g.commute(x, f))).collect()
}

fn product_set(g: &GroupTable, b: Option<&Subgroup>, c: Option<&Subgroup>) -> Vec<Elt> {
    match (b, c) {
        (Some(b), Some(c)) => g.product(b, c).members().to_vec(),
        (Some(s), None) | (None, Some(s)) => s.members().to_vec(),
        (None, None) => vec![0],
    }
}

/// Elements of order dividing `p` in `set`, as a subgroup (or `None` if trivial).
/// Fails if they do not form an elementary abelian subgroup.
fn p_elements(g: &GroupTable, set: &Subgroup, p: u32) -> Result<Option<Subgroup>> {
    let elts: Vec<Elt> = set.members().iter().copied().filter(|&x| g.pow(x, p) == 0).collect();
    if elts.len() == 1 {
        return Ok(None);
    }
    let s = g.closure(&elts);
    if s.order() != elts.len() || !g.is_elementary_abelian(&s, p) {
        return Err(Error::ConclusionFailed(format!(
            "p-elements of {} do not form an elementary abelian subgroup",
            set.describe(g)
        )));
    }
    Ok(Some(s))
}

/// Checks `[H, K] = 1` and that `H ∩ K` has order prime to `p`.
pub fn check_central_product(g: &GroupTable, h: &Subgroup, k: &Subgroup, p: u32) -> Result<()> {
    if !g.commutator(h, k).is_trivial() {
        return Err(Error::HypothesisFailed("[H,K] is nontrivial".into()));
    }
    let meet = h.intersection(k);
    if meet.order() % p as usize == 0 {
        return Err(Error::HypothesisFailed(format!("H ∩ K has order {} divisible by {p}", meet.order())));
    }
    Ok(())
}

/// Projection of `A ≤ HK` to `(p-part of AK ∩ H, p-part of AH ∩ K)`.
fn central_projection(g: &GroupTable, a: &Subgroup, h: &Subgroup, k: &Subgroup, p: u32) -> Result<Member> {
    let ph = p_elements(g, &g.product(a, k).intersection(h), p)?;
    let pk = p_elements(g, &g.product(a, h).intersection(k), p)?;
    if ph.is_none() && pk.is_none() {
        return Err(Error::ConclusionFailed(format!("{} projects to the double bottom", a.describe(g))));
    }
    Ok(Member::Pair(ph, pk))
}

// ---------------------------------------------------------------------------
// assembly

struct Side {
    poset: Poset,
    members: Vec<Member>,
}

impl Side {
    fn of_p_poset(x: &PPoset) -> Side {
        Side { poset: x.poset.clone(), members: x.subgroups.iter().cloned().map(Member::Inner).collect() }
    }

    fn pre_join(left: &PPoset, right: &PPoset) -> Side {
        let pj = left.poset.pre_join(&right.poset);
        let members = pj
            .coords
            .iter()
            .map(|&(x, y)| Member::Pair(x.map(|i| left.subgroups[i].clone()), y.map(|j| right.subgroups[j].clone())))
            .collect();
        Side { poset: pj.poset, members }
    }
}

/// Outer part as a subposet of a p-subgroup poset.
struct Outers {
    poset: Poset,
    subgroups: Vec<Subgroup>,
}

impl Outers {
    fn avoiding(b: &PPoset, base: &Subgroup) -> Outers {
        let idx: Vec<usize> = (0..b.subgroups.len()).filter(|&i| b.subgroups[i].intersection(base).is_trivial()).collect();
        Outers { poset: b.poset.subposet(&idx), subgroups: idx.iter().map(|&i| b.subgroups[i].clone()).collect() }
    }
}

/// Joins a subgroup side and an outer part with the cross relation `cross(f, s)`.
/// Outers sit below related side elements, or above them when `outers_on_right`
/// (in which case the outer part is reverse-ordered).
fn assemble(
    g: &GroupTable,
    side: Side,
    outers: &Outers,
    outers_on_right: bool,
    cross: impl Fn(&[Elt], &Subgroup, &Member) -> bool + Sync,
) -> Result<(Poset, Vec<Member>)> {
    let ns = side.members.len();
    let nf = outers.subgroups.len();
    let fgens: Vec<Vec<Elt>> = outers.subgroups.par_iter().map(|f| g.generators_of(f)).collect();
    let rel: Vec<Vec<bool>> = (0..nf)
        .into_par_iter()
        .map(|fi| side.members.iter().map(|m| cross(&fgens[fi], &outers.subgroups[fi], m)).collect())
        .collect();
    let mut labels: Vec<String> = side.poset.labels().to_vec();
    labels.extend(outers.poset.labels().iter().cloned());
    let mut tags: Vec<Tag> = side.poset.tags().to_vec();
    tags.extend(outers.subgroups.iter().cloned().map(Tag::Sub));
    let poset = Poset::from_relation(labels, tags, |i, j| match (i < ns, j < ns) {
        (true, true) => side.poset.lt(i, j),
        (false, false) => {
            if outers_on_right {
                outers.poset.lt(j - ns, i - ns)
            } else {
                outers.poset.lt(i - ns, j - ns)
            }
        }
        (false, true) => !outers_on_right && rel[i - ns][j],
        (true, false) => outers_on_right && rel[j - ns][i],
    })?;
    let mut members = side.members;
    members.extend(outers.subgroups.iter().cloned().map(Member::Outer));
    Ok((poset, members))
}

fn default_b(g: &GroupTable, p: u32, b: Option<&PPoset>) -> Result<PPoset> {
    match b {
        Some(b) => {
            if b.kind != PKind::Ap || b.p != p {
                return Err(Error::PreconditionFailed("B must be a subposet of A_p(G) for the same p".into()));
            }
            Ok(b.clone())
        }
        None => p_poset(g, p, PKind::Ap),
    }
}

/// Condition on `B`: whenever `C_{D∩H}(F) > 1` for `D` meeting `H` and `F` avoiding it,
/// both `C_D(F)` and `C_D(F) F` are members of `B`.
pub fn check_b_condition(g: &GroupTable, b: &PPoset, h: &Subgroup) -> Result<()> {
    let split = nf_split(g, b, h)?;
    let present: HashSet<&Subgroup> = b.subgroups.iter().collect();
    let failure = split.f.par_iter().find_map_any(|&fi| {
        let f = &b.subgroups[fi];
        let fg = g.generators_of(f);
        for &di in &split.n {
            let d = &b.subgroups[di];
            let dh = d.intersection(h);
            if !centralizes_something(g, dh.members(), &fg) {
                continue;
            }
            let cd = g.closure(&centralized_part(g, d.members(), &fg));
            let cdf = g.join(&cd, f);
            if !present.contains(&cd) || !present.contains(&cdf) {
                return Some(format!(
                    "for {} and {}, C_D(F) or C_D(F)F is missing from B",
                    b.poset.label(fi),
                    b.poset.label(di)
                ));
            }
        }
        None
    });
    match failure {
        Some(msg) => Err(Error::HypothesisFailed(msg)),
        None => Ok(()),
    }
}

fn outer_below_rule(g: &GroupTable, fgens: &[Elt], m: &Member) -> bool {
    match m {
        Member::Inner(a) => centralizes_something(g, a.members(), fgens),
        Member::Pair(b, c) => centralizes_something(g, &product_set(g, b.as_ref(), c.as_ref()), fgens),
        Member::Outer(_) => false,
    }
}

// ---------------------------------------------------------------------------
// builders

/// `X_B(H)`: `A_p(H)` together with the members of `B` avoiding `H`, where an
/// outer `F` lies below `A` iff `C_A(F) > 1`.  Refuses `B` violating the
/// centralizer condition (see [`check_b_condition`]).
pub fn x_poset(g: &GroupTable, h: &Subgroup, p: u32, b: Option<&PPoset>) -> Result<ReplacementPoset> {
    x_family(g, h, p, b, PKind::Ap, ReplacementKind::X)
}

/// `X_B(i(H))`: as [`x_poset`] with `A_p(H)` replaced by its retract `i(A_p(H))`.
pub fn x_i_poset(g: &GroupTable, h: &Subgroup, p: u32, b: Option<&PPoset>) -> Result<ReplacementPoset> {
    x_family(g, h, p, b, PKind::IAp, ReplacementKind::Xi)
}

fn x_family(
    g: &GroupTable,
    h: &Subgroup,
    p: u32,
    b: Option<&PPoset>,
    side_kind: PKind,
    kind: ReplacementKind,
) -> Result<ReplacementPoset> {
    let bp = default_b(g, p, b)?;
    check_b_condition(g, &bp, h)?;
    let side = Side::of_p_poset(&build_p_poset(g, h, p, side_kind)?);
    let outers = Outers::avoiding(&bp, h);
    let (poset, members) = assemble(g, side, &outers, false, |fg, _, m| outer_below_rule(g, fg, m))?;
    Ok(ReplacementPoset {
        kind,
        poset,
        members,
        provenance: Provenance {
            p,
            base: h.clone(),
            h: h.clone(),
            k: None,
            l: None,
            b: b.cloned(),
            removed: Vec::new(),
        },
        conical_outers: Vec::new(),
        excluded_pairs: 0,
    })
}

/// The reverse-ordered variant: outers of `A_p(G)` avoiding `H`, ordered by
/// reverse inclusion and placed above `A ∈ A_p(H)` whenever `A ≤ C_H(F)`.
pub fn thevenaz_poset(g: &GroupTable, h: &Subgroup, p: u32) -> Result<ReplacementPoset> {
    let ap = p_poset(g, p, PKind::Ap)?;
    let side = Side::of_p_poset(&build_p_poset(g, h, p, PKind::Ap)?);
    let outers = Outers::avoiding(&ap, h);
    let (poset, members) = assemble(g, side, &outers, true, |fg, _, m| match m {
        Member::Inner(a) => a.members().iter().all(|&x| fg.iter().all(|&f| g.commute(x, f))),
        _ => false,
    })?;
    Ok(ReplacementPoset {
        kind: ReplacementKind::Thevenaz,
        poset,
        members,
        provenance: Provenance { p, base: h.clone(), h: h.clone(), k: None, l: None, b: None, removed: Vec::new() },
        conical_outers: Vec::new(),
        excluded_pairs: 0,
    })
}

/// `W^{A/S/B}_G(H,K)`: the pre-join of the selected poset of `H` with `A_p(K)`,
/// together with the outers avoiding `HK`; `F` lies below `(B, C)` iff `C_{BC}(F) > 1`.
pub fn w_poset(g: &GroupTable, h: &Subgroup, k: &Subgroup, p: u32, variant: WVariant) -> Result<ReplacementPoset> {
    check_central_product(g, h, k, p)?;
    let kind = match variant {
        WVariant::A => ReplacementKind::WA,
        WVariant::S => ReplacementKind::WS,
        WVariant::B => ReplacementKind::WB,
    };
    let hk = g.product(h, k);
    let ap = p_poset(g, p, PKind::Ap)?;
    let side = Side::pre_join(&build_p_poset(g, h, p, variant.kind())?, &build_p_poset(g, k, p, PKind::Ap)?);
    let outers = Outers::avoiding(&ap, &hk);
    let (poset, members) = assemble(g, side, &outers, false, |fg, _, m| outer_below_rule(g, fg, m))?;
    Ok(ReplacementPoset {
        kind,
        poset,
        members,
        provenance: Provenance { p, base: hk, h: h.clone(), k: Some(k.clone()), l: None, b: None, removed: Vec::new() },
        conical_outers: Vec::new(),
        excluded_pairs: 0,
    })
}

/// Checks that `l` is a component of `g` whose center has order prime to `p`.
pub fn check_component(g: &GroupTable, l: &Subgroup, p: u32) -> Result<()> {
    let comps = g.components(&Subgroup::whole(g))?;
    if !comps.contains(l) {
        return Err(Error::PreconditionFailed(format!("{} is not a component", l.describe(g))));
    }
    let z = g.center(l);
    if z.order() % p as usize == 0 {
        return Err(Error::HypothesisFailed(format!("Z(L) has order {} divisible by {p}", z.order())));
    }
    Ok(())
}

/// Outers `B` of `l` (elementary abelian, normalizing `l`, meeting `L C_G(L)` trivially)
/// with `O_p(C_G(LB)) > 1`.
pub fn conical_outers(g: &GroupTable, l: &Subgroup, p: u32) -> Result<Vec<Subgroup>> {
    let whole = Subgroup::whole(g);
    let oi = outer_and_image_posets(g, l, p)?;
    Ok(oi
        .outer
        .subgroups
        .into_par_iter()
        .filter(|b| {
            let lb = g.product(l, b);
            let c = g.centralizer_of(&whole, &lb);
            !g.core_p(&c, p).is_trivial()
        })
        .collect())
}

/// Tilde kinds: `X_G(L C_G(L))` (or `W_G(L, C_G(L))`) with the pairs `F ⊏ A`
/// dropped when `F` is a conical outer and `C_A(F) ≤ L`.
pub fn tilde_poset(g: &GroupTable, l: &Subgroup, p: u32, kind: ReplacementKind) -> Result<ReplacementPoset> {
    check_component(g, l, p)?;
    let whole = Subgroup::whole(g);
    let c = g.centralizer_of(&whole, l);
    let h = g.product(l, &c);
    let f1 = conical_outers(g, l, p)?;
    let f1_set: HashSet<Subgroup> = f1.iter().cloned().collect();
    let ap = p_poset(g, p, PKind::Ap)?;
    let side = match kind {
        ReplacementKind::TildeX => Side::of_p_poset(&build_p_poset(g, &h, p, PKind::Ap)?),
        ReplacementKind::TildeWA | ReplacementKind::TildeWS | ReplacementKind::TildeWB => {
            let v = match kind {
                ReplacementKind::TildeWA => WVariant::A,
                ReplacementKind::TildeWS => WVariant::S,
                _ => WVariant::B,
            };
            check_central_product(g, l, &c, p)?;
            Side::pre_join(&build_p_poset(g, l, p, v.kind())?, &build_p_poset(g, &c, p, PKind::Ap)?)
        }
        _ => return Err(Error::PreconditionFailed(format!("{kind} is not a tilde kind"))),
    };
    let outers = Outers::avoiding(&ap, &h);
    let excluded = std::sync::atomic::AtomicUsize::new(0);
    let (poset, members) = assemble(g, side, &outers, false, |fg, f, m| {
        let set = match m {
            Member::Inner(a) => a.members().to_vec(),
            Member::Pair(b, cc) => product_set(g, b.as_ref(), cc.as_ref()),
            Member::Outer(_) => return false,
        };
        let cent = centralized_part(g, &set, fg);
        if cent.len() <= 1 {
            return false;
        }
        if f1_set.contains(f) && cent.iter().all(|&x| l.contains(x)) {
            excluded.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
            return false;
        }
        true
    })?;
    Ok(ReplacementPoset {
        kind,
        poset,
        members,
        provenance: Provenance { p, base: h, h: l.clone(), k: Some(c), l: Some(l.clone()), b: None, removed: Vec::new() },
        conical_outers: f1,
        excluded_pairs: excluded.into_inner(),
    })
}

/// `{E ∈ A_p(N_G(L)) : E ∩ L > 1, C_E(L) = 1, some conical outer lies strictly below E}`.
pub fn removable_set(g: &GroupTable, l: &Subgroup, p: u32, conical: &[Subgroup]) -> Vec<Subgroup> {
    let whole = Subgroup::whole(g);
    let nl = g.normalizer(&whole, l);
    let cl = g.centralizer_of(&whole, l);
    let mut out: Vec<Subgroup> = g
        .elementary_abelian_subgroups(&nl, p)
        .into_par_iter()
        .filter(|e| {
            !e.intersection(l).is_trivial()
                && e.intersection(&cl).is_trivial()
                && conical.iter().any(|b| b.order() < e.order() && b.is_subgroup_of(e))
        })
        .collect();
    out.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
    out
}

/// `A_p(G) − N` for a subset `N` of the removable set that is upward closed in it.
/// `removed = None` removes the whole removable set.
pub fn removal_poset(g: &GroupTable, l: &Subgroup, p: u32, removed: Option<&[Subgroup]>) -> Result<ReplacementPoset> {
    if l.order() % p as usize != 0 {
        return Err(Error::PreconditionFailed(format!("|L| = {} is prime to {p}", l.order())));
    }
    check_component(g, l, p)?;
    let f1 = conical_outers(g, l, p)?;
    let n1 = removable_set(g, l, p, &f1);
    let n: Vec<Subgroup> = match removed {
        Some(n) => n.to_vec(),
        None => n1.clone(),
    };
    let n1_set: HashSet<&Subgroup> = n1.iter().collect();
    let n_set: HashSet<&Subgroup> = n.iter().collect();
    if let Some(bad) = n.iter().find(|e| !n1_set.contains(e)) {
        return Err(Error::PreconditionFailed(format!("{} is not removable", bad.describe(g))));
    }
    for e in &n {
        for e2 in &n1 {
            if e.order() < e2.order() && e.is_subgroup_of(e2) && !n_set.contains(e2) {
                return Err(Error::NotUpwardClosed(format!("{} lies below {}", e.describe(g), e2.describe(g))));
            }
        }
    }
    let ap = p_poset(g, p, PKind::Ap)?;
    let keep: Vec<usize> = (0..ap.subgroups.len()).filter(|&i| !n_set.contains(&ap.subgroups[i])).collect();
    let whole = Subgroup::whole(g);
    let c = g.centralizer_of(&whole, l);
    Ok(ReplacementPoset {
        kind: ReplacementKind::Removal,
        poset: ap.poset.subposet(&keep),
        members: keep.iter().map(|&i| Member::Inner(ap.subgroups[i].clone())).collect(),
        provenance: Provenance {
            p,
            base: g.product(l, &c),
            h: l.clone(),
            k: Some(c),
            l: Some(l.clone()),
            b: None,
            removed: n,
        },
        conical_outers: f1,
        excluded_pairs: 0,
    })
}

/// Builds any kind from the CLI-level selectors; `h` is `L` for component kinds.
pub fn build(
    g: &GroupTable,
    kind: ReplacementKind,
    h: &Subgroup,
    k: Option<&Subgroup>,
    p: u32,
) -> Result<ReplacementPoset> {
    let trivial = Subgroup::trivial();
    let k = k.unwrap_or(&trivial);
    match kind {
        ReplacementKind::X => x_poset(g, h, p, None),
        ReplacementKind::Xi => x_i_poset(g, h, p, None),
        ReplacementKind::Thevenaz => thevenaz_poset(g, h, p),
        ReplacementKind::WA => w_poset(g, h, k, p, WVariant::A),
        ReplacementKind::WS => w_poset(g, h, k, p, WVariant::S),
        ReplacementKind::WB => w_poset(g, h, k, p, WVariant::B),
        ReplacementKind::Removal => removal_poset(g, h, p, None),
        _ => tilde_poset(g, h, p, kind),
    }
}

// ---------------------------------------------------------------------------
// fiber checks

/// Which fibers of a map `f : X → Y` are tested.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiberMode {
    /// `f^{-1}(Y_{≤y}) * Y_{>y}`
    Down,
    /// `f^{-1}(Y_{≥y}) * Y_{<y}`
    Up,
}

impl FiberMode {
    pub fn name(self) -> &'static str {
        match self {
            FiberMode::Down => "down",
            FiberMode::Up => "up",
        }
    }
}

impl FromStr for FiberMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "down" => Ok(FiberMode::Down),
            "up" => Ok(FiberMode::Up),
            _ => Err(Error::InvalidSpec(format!("unknown fiber mode '{s}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Fiber {
    /// index in the target poset
    pub target: usize,
    /// vertices of the fiber join
    pub size: usize,
    /// acyclicity was decided by a cone point
    pub cone: bool,
    pub betti: BettiProfile,
}

#[derive(Clone, Debug)]
pub struct FiberReport {
    /// `None` for preimage-cover checks
    pub mode: Option<FiberMode>,
    /// degrees `-1..=n-1` are checked; `None` means all degrees
    pub degree_limit: Option<i32>,
    pub fibers: Vec<Fiber>,
}

impl FiberReport {
    fn in_range(&self, b: &BettiProfile) -> bool {
        b.nonzero().iter().all(|&(k, _)| self.degree_limit.is_some_and(|n| k > n - 1))
    }

    pub fn failures(&self) -> Vec<&Fiber> {
        self.fibers.iter().filter(|f| !self.in_range(&f.betti)).collect()
    }

    pub fn acyclic(&self) -> bool {
        self.failures().is_empty()
    }

    pub fn to_json(&self, target_labels: &[String]) -> serde_json::Value {
        json!({
            "mode": self.mode.map_or("cover", |m| m.name()),
            "fibers": self.fibers.len(),
            "cones": self.fibers.iter().filter(|f| f.cone).count(),
            "acyclic": self.acyclic(),
            "failures": self.failures().iter().map(|f| json!({
                "target": target_labels[f.target],
                "betti": f.betti.to_json()["betti"].clone(),
            })).collect::<Vec<_>>(),
        })
    }
}

fn betti_or_cone(x: &Poset) -> Result<(bool, BettiProfile)> {
    if x.cone_point().is_some() {
        return Ok((true, BettiProfile { betti: vec![0] }));
    }
    Ok((false, reduced_betti(x)?))
}

/// Verifies `f : X → Y` is order-preserving, then computes for every `y` the
/// reduced Betti numbers of the fiber join selected by `mode`.
pub fn fiber_check(
    x: &Poset,
    y: &Poset,
    f: &[usize],
    mode: FiberMode,
    degree_limit: Option<i32>,
) -> Result<FiberReport> {
    assert_eq!(f.len(), x.len());
    if let Some((i, j)) = x.is_order_preserving(y, f) {
        return Err(Error::NotOrderPreserving(format!(
            "{} < {} but {} is not below {}",
            x.label(i),
            x.label(j),
            y.label(f[i]),
            y.label(f[j])
        )));
    }
    let fibers: Result<Vec<Fiber>> = (0..y.len())
        .into_par_iter()
        .map(|t| {
            let (pre, rest): (Vec<usize>, Vec<usize>) = match mode {
                FiberMode::Down => {
                    ((0..x.len()).filter(|&i| y.le(f[i], t)).collect(), y.above(t).ones().collect())
                }
                FiberMode::Up => ((0..x.len()).filter(|&i| y.le(t, f[i])).collect(), y.below(t).ones().collect()),
            };
            let join = x.subposet(&pre).join(&y.subposet(&rest));
            let (cone, betti) = betti_or_cone(&join)?;
            Ok(Fiber { target: t, size: join.len(), cone, betti })
        })
        .collect();
    Ok(FiberReport { mode: Some(mode), degree_limit, fibers: fibers? })
}

/// For an element map `phi : Y → X` that sends chains to chains, computes for
/// every `x` the reduced Betti numbers of `{y : phi(y) ≤ x}` as a subposet of `Y`.
pub fn preimage_cover_check(source: &Poset, target: &Poset, phi: &[usize]) -> Result<FiberReport> {
    let fibers: Result<Vec<Fiber>> = (0..target.len())
        .into_par_iter()
        .map(|t| {
            let pre: Vec<usize> = (0..source.len()).filter(|&i| target.le(phi[i], t)).collect();
            let z = source.subposet(&pre);
            let (cone, betti) = betti_or_cone(&z)?;
            Ok(Fiber { target: t, size: z.len(), cone, betti })
        })
        .collect();
    Ok(FiberReport { mode: None, degree_limit: None, fibers: fibers? })
}

// ---------------------------------------------------------------------------
// certification

/// Outcome of checking one comparison map.
#[derive(Clone, Debug)]
pub struct MapCheck {
    pub name: String,
    pub order_preserving: bool,
    pub report: Option<FiberReport>,
    /// label of the target poset's elements, kept for reporting
    target_labels: Vec<String>,
}

impl MapCheck {
    pub fn passed(&self) -> bool {
        self.order_preserving && self.report.as_ref().is_some_and(|r| r.acyclic())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let fibers = self.report.as_ref().map(|r| r.to_json(&self.target_labels));
        json!({"map": self.name, "order_preserving": self.order_preserving, "fibers": fibers, "passed": self.passed()})
    }
}

fn map_check(name: &str, x: &Poset, y: &Poset, f: &[usize], mode: FiberMode) -> Result<MapCheck> {
    let labels = y.labels().to_vec();
    match fiber_check(x, y, f, mode, None) {
        Ok(r) => Ok(MapCheck { name: name.into(), order_preserving: true, report: Some(r), target_labels: labels }),
        Err(Error::NotOrderPreserving(_)) => {
            Ok(MapCheck { name: name.into(), order_preserving: false, report: None, target_labels: labels })
        }
        Err(e) => Err(e),
    }
}

/// A named pass/fail condition with detail.
#[derive(Clone, Debug)]
pub struct Condition {
    pub name: String,
    pub holds: bool,
    pub detail: String,
}

impl Condition {
    pub fn new(name: &str, holds: bool, detail: impl Into<String>) -> Self {
        Condition { name: name.into(), holds, detail: detail.into() }
    }
}

#[derive(Clone, Debug)]
pub struct Certificate {
    pub kind: ReplacementKind,
    pub vertices: usize,
    pub relations: usize,
    pub outers: usize,
    pub conical_outers: usize,
    pub excluded_pairs: usize,
    pub transitive: bool,
    pub outer_side: bool,
    pub conditions: Vec<Condition>,
    pub maps: Vec<MapCheck>,
    pub betti: BettiProfile,
    pub reference: BettiProfile,
}

impl Certificate {
    pub fn betti_equal(&self) -> bool {
        self.betti == self.reference
    }

    pub fn passed(&self) -> bool {
        self.transitive
            && self.outer_side
            && self.conditions.iter().all(|c| c.holds)
            && self.maps.iter().all(|m| m.passed())
            && self.betti_equal()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "kind": self.kind.name(),
            "vertices": self.vertices,
            "relations": self.relations,
            "outers": self.outers,
            "conical_outers": self.conical_outers,
            "excluded_pairs": self.excluded_pairs,
            "transitive": self.transitive,
            "outer_side": self.outer_side,
            "conditions": self.conditions.iter().map(|c| json!({"name": c.name, "holds": c.holds, "detail": c.detail})).collect::<Vec<_>>(),
            "maps": self.maps.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
            "betti": self.betti.to_json()["betti"].clone(),
            "reference_betti": self.reference.to_json()["betti"].clone(),
            "betti_equal": self.betti_equal(),
            "passed": self.passed(),
        })
    }
}

fn lookup(index: &HashMap<&Member, usize>, m: &Member) -> Result<usize> {
    index
        .get(m)
        .copied()
        .ok_or_else(|| Error::ConclusionFailed(format!("map image {m:?} is not an element of the target")))
}

/// Deflation `D ↦ D ∩ base` (if nontrivial) or `D`, from a subposet of `A_p(G)`.
pub fn deflation_map(subs: &[Subgroup], target: &ReplacementPoset) -> Result<Vec<usize>> {
    let index = target.index();
    let base = &target.provenance.base;
    subs.iter()
        .map(|d| {
            let m = d.intersection(base);
            let m = if m.is_trivial() { Member::Outer(d.clone()) } else { Member::Inner(m) };
            lookup(&index, &m)
        })
        .collect()
}

/// Projection `A ↦ (p_H(A), p_K(A))` on the subgroup side, identity on outers.
fn projection(g: &GroupTable, src: &ReplacementPoset, target: &ReplacementPoset) -> Result<Vec<usize>> {
    let index = target.index();
    let (h, k, p) = (&target.provenance.h, target.provenance.k.clone().unwrap_or_else(Subgroup::trivial), target.provenance.p);
    src.members
        .iter()
        .map(|m| match m {
            Member::Inner(a) => lookup(&index, &central_projection(g, a, h, &k, p)?),
            other => lookup(&index, other),
        })
        .collect()
}

fn inclusion(src: &ReplacementPoset, target: &ReplacementPoset) -> Result<Vec<usize>> {
    let index = target.index();
    src.members.iter().map(|m| lookup(&index, m)).collect()
}

/// Conclusion for outers of `X_B(H)`: the subgroup-side elements above `F` are
/// exactly the `A ∈ A_p(H)` meeting `C_H(F)` nontrivially.
fn upper_link_condition(g: &GroupTable, x: &ReplacementPoset) -> Condition {
    let h = &x.provenance.h;
    for (i, m) in x.members.iter().enumerate() {
        let Member::Outer(f) = m else { continue };
        let chf = g.centralizer_of(h, f);
        for (j, a) in x.members.iter().enumerate() {
            if let Member::Inner(a) = a {
                let by_rule = x.poset.lt(i, j);
                let by_meet = !a.intersection(&chf).is_trivial();
                if by_rule != by_meet {
                    return Condition::new(
                        "upper links of outers",
                        false,
                        format!("{} vs {}", x.poset.label(i), x.poset.label(j)),
                    );
                }
            }
        }
    }
    Condition::new("upper links of outers", true, "A_p(H) above F equals {A : A ∩ C_H(F) > 1}")
}

fn base_certificate(x: &ReplacementPoset, reference: &BettiProfile) -> Result<Certificate> {
    Ok(Certificate {
        kind: x.kind,
        vertices: x.poset.len(),
        relations: x.poset.relation_count(),
        outers: x.outer_count(),
        conical_outers: x.conical_outers.len(),
        excluded_pairs: x.excluded_pairs,
        transitive: x.poset.verify_order().is_ok(),
        outer_side: x.outer_side_holds(),
        conditions: Vec::new(),
        maps: Vec::new(),
        betti: reduced_betti(&x.poset)?,
        reference: reference.clone(),
    })
}

/// Certifies a replacement poset against `A_p(G)` (or against `B` when one was supplied).
pub fn certify(g: &GroupTable, x: &ReplacementPoset) -> Result<Certificate> {
    let pv = &x.provenance;
    let p = pv.p;
    let ap = default_b(g, p, pv.b.as_ref())?;
    let reference = reduced_betti(&ap.poset)?;
    let mut cert = base_certificate(x, &reference)?;
    match x.kind {
        ReplacementKind::X | ReplacementKind::Xi => {
            let plain = if x.kind == ReplacementKind::X { x.clone() } else { x_poset(g, &pv.h, p, pv.b.as_ref())? };
            cert.conditions.push(Condition::new("centralizer condition on B", true, "checked at construction"));
            cert.conditions.push(upper_link_condition(g, &plain));
            let alpha = deflation_map(&ap.subgroups, &plain)?;
            cert.maps.push(map_check("deflation B -> X_B(H)", &ap.poset, &plain.poset, &alpha, FiberMode::Up)?);
            if x.kind == ReplacementKind::Xi {
                let hp = build_p_poset(g, &pv.h, p, PKind::Ap)?;
                let r = hp.poset.i_retract()?;
                let index = x.index();
                let rhat: Result<Vec<usize>> = plain
                    .members
                    .iter()
                    .map(|m| match m {
                        Member::Inner(a) => {
                            let pos = hp.subgroups.iter().position(|s| s == a).expect("member of A_p(H)");
                            lookup(&index, &Member::Inner(hp.subgroups[r.r[pos]].clone()))
                        }
                        other => lookup(&index, other),
                    })
                    .collect();
                cert.maps.push(map_check("retraction X_B(H) -> X_B(iH)", &plain.poset, &x.poset, &rhat?, FiberMode::Down)?);
            }
        }
        ReplacementKind::Thevenaz => {
            let (cond, report) = thevenaz_cover(g, &ap, x)?;
            cert.conditions.push(cond);
            cert.maps.push(MapCheck {
                name: "deflation on chains A_p(G)' -> X'".into(),
                order_preserving: true,
                report: Some(report),
                target_labels: x.poset.labels().to_vec(),
            });
        }
        ReplacementKind::WA | ReplacementKind::WS | ReplacementKind::WB => {
            let h = &pv.h;
            let k = pv.k.clone().unwrap_or_else(Subgroup::trivial);
            cert.conditions.push(Condition::new("[H,K] = 1 and H ∩ K is p'", true, "checked at construction"));
            let xhk = x_poset(g, &pv.base, p, None)?;
            let alpha = deflation_map(&ap.subgroups, &xhk)?;
            cert.maps.push(map_check("deflation A_p(G) -> X_G(HK)", &ap.poset, &xhk.poset, &alpha, FiberMode::Up)?);
            let wa = if x.kind == ReplacementKind::WA { x.clone() } else { w_poset(g, h, &k, p, WVariant::A)? };
            let pi = projection(g, &xhk, &wa)?;
            cert.maps.push(map_check("projection X_G(HK) -> W^A", &xhk.poset, &wa.poset, &pi, FiberMode::Down)?);
            push_w_inclusions(g, x, &wa, |v| w_poset(g, h, &k, p, v), &mut cert)?;
        }
        ReplacementKind::TildeX | ReplacementKind::TildeWA | ReplacementKind::TildeWS | ReplacementKind::TildeWB => {
            let l = pv.l.as_ref().expect("component");
            let removal = removal_poset(g, l, p, None)?;
            let rem_subs: Vec<Subgroup> =
                removal.members.iter().map(|m| m.subgroup(g)).collect();
            let ap_index: HashMap<&Subgroup, usize> = ap.subgroups.iter().enumerate().map(|(i, s)| (s, i)).collect();
            let incl: Vec<usize> = rem_subs.iter().map(|s| ap_index[s]).collect();
            cert.maps.push(map_check("inclusion A_p(G) - N_1 -> A_p(G)", &removal.poset, &ap.poset, &incl, FiberMode::Up)?);
            let tx = if x.kind == ReplacementKind::TildeX { x.clone() } else { tilde_poset(g, l, p, ReplacementKind::TildeX)? };
            let alpha = deflation_map(&rem_subs, &tx)?;
            cert.maps.push(map_check("deflation A_p(G) - N_1 -> tilde X", &removal.poset, &tx.poset, &alpha, FiberMode::Up)?);
            if x.kind != ReplacementKind::TildeX {
                let twa =
                    if x.kind == ReplacementKind::TildeWA { x.clone() } else { tilde_poset(g, l, p, ReplacementKind::TildeWA)? };
                let pi = projection(g, &tx, &twa)?;
                cert.maps.push(map_check("projection tilde X -> tilde W^A", &tx.poset, &twa.poset, &pi, FiberMode::Down)?);
                push_w_inclusions(
                    g,
                    x,
                    &twa,
                    |v| {
                        let kind = match v {
                            WVariant::A => ReplacementKind::TildeWA,
                            WVariant::S => ReplacementKind::TildeWS,
                            WVariant::B => ReplacementKind::TildeWB,
                        };
                        tilde_poset(g, l, p, kind)
                    },
                    &mut cert,
                )?;
            }
        }
        ReplacementKind::Removal => {
            let l = pv.l.as_ref().expect("component");
            let whole = Subgroup::whole(g);
            let inner = g.product(l, &g.centralizer_of(&whole, l));
            let kept: HashSet<Subgroup> = x.members.iter().map(|m| m.subgroup(g)).collect();
            let local = g.elementary_abelian_subgroups(&inner, p);
            let missing = local.iter().find(|e| !kept.contains(e));
            cert.conditions.push(Condition::new(
                "A_p(L C_G(L)) is kept",
                missing.is_none(),
                missing.map_or(String::new(), |e| e.describe(g)),
            ));
            let ap_index: HashMap<&Subgroup, usize> = ap.subgroups.iter().enumerate().map(|(i, s)| (s, i)).collect();
            let incl: Vec<usize> = x.members.iter().map(|m| ap_index[&m.subgroup(g)]).collect();
            cert.maps.push(map_check("inclusion A_p(G) - N -> A_p(G)", &x.poset, &ap.poset, &incl, FiberMode::Up)?);
        }
    }
    Ok(cert)
}

/// Inclusions `W^A ⊆ W^S` and `W^B ⊆ W^S` as needed for the kind of `x`.
fn push_w_inclusions(
    _g: &GroupTable,
    x: &ReplacementPoset,
    wa: &ReplacementPoset,
    make: impl Fn(WVariant) -> Result<ReplacementPoset>,
    cert: &mut Certificate,
) -> Result<()> {
    let is = |k: ReplacementKind| x.kind == k;
    let needs_s = !(is(ReplacementKind::WA) || is(ReplacementKind::TildeWA));
    if !needs_s {
        return Ok(());
    }
    let s_kind = is(ReplacementKind::WS) || is(ReplacementKind::TildeWS);
    let ws = if s_kind { x.clone() } else { make(WVariant::S)? };
    let f = inclusion(wa, &ws)?;
    cert.maps.push(map_check("inclusion W^A -> W^S", &wa.poset, &ws.poset, &f, FiberMode::Down)?);
    if !s_kind {
        let f = inclusion(x, &ws)?;
        cert.maps.push(map_check("inclusion W^B -> W^S", &x.poset, &ws.poset, &f, FiberMode::Down)?);
    }
    Ok(())
}

/// For the reverse-ordered kind: the deflation sends chains of `A_p(G)` to chains,
/// and every preimage of a lower set is acyclic; preimages are computed both
/// through the element map and from their closed-form descriptions.
fn thevenaz_cover(g: &GroupTable, ap: &PPoset, x: &ReplacementPoset) -> Result<(Condition, FiberReport)> {
    let h = &x.provenance.h;
    let phi = deflation_map(&ap.subgroups, x)?;
    for i in 0..ap.poset.len() {
        for j in ap.poset.above(i).ones() {
            if !(phi[i] == phi[j] || x.poset.comparable(phi[i], phi[j])) {
                return Ok((
                    Condition::new("deflation sends chains to chains", false, format!("{} < {}", ap.poset.label(i), ap.poset.label(j))),
                    FiberReport { mode: None, degree_limit: None, fibers: Vec::new() },
                ));
            }
        }
    }
    for (t, m) in x.members.iter().enumerate() {
        let by_map: Vec<usize> = (0..ap.subgroups.len()).filter(|&i| x.poset.le(phi[i], t)).collect();
        let bound = match m {
            Member::Inner(a) => a.clone(),
            Member::Outer(f) => g.centralizer_of(h, f),
            Member::Pair(..) => unreachable!("no pairs in this kind"),
        };
        let by_formula: Vec<usize> = (0..ap.subgroups.len())
            .filter(|&i| {
                let d = &ap.subgroups[i];
                let dh = d.intersection(h);
                if dh.is_trivial() {
                    matches!(m, Member::Outer(f) if f.is_subgroup_of(d))
                } else {
                    dh.is_subgroup_of(&bound)
                }
            })
            .collect();
        if by_map != by_formula {
            return Err(Error::ConclusionFailed(format!("preimage of {} disagrees with its description", x.poset.label(t))));
        }
    }
    let report = preimage_cover_check(&ap.poset, &x.poset, &phi)?;
    Ok((Condition::new("deflation sends chains to chains", true, ""), report))
}

// ---------------------------------------------------------------------------
// image poset of a simple component

#[derive(Clone, Debug)]
pub struct ImageCheck {
    /// every outer `B` has `O_p(C_L(B)) > 1`
    pub all_conical: bool,
    pub outers: usize,
    pub image_size: usize,
    pub inclusion: MapCheck,
    pub betti_l: BettiProfile,
    pub betti_image: BettiProfile,
}

impl ImageCheck {
    pub fn passed(&self) -> bool {
        self.inclusion.passed() && self.betti_l == self.betti_image
    }
}

/// For a component `l` with trivial center: the inclusion `A ↦ A C_G(L)` of
/// `A_p(L)` into the image poset, with fibers and global Betti numbers.
pub fn image_check(g: &GroupTable, l: &Subgroup, p: u32) -> Result<ImageCheck> {
    check_component(g, l, p)?;
    if !g.center(l).is_trivial() {
        return Err(Error::PreconditionFailed("L has nontrivial center".into()));
    }
    let oi = outer_and_image_posets(g, l, p)?;
    let all_conical = oi.outer.subgroups.iter().all(|b| {
        let c = g.centralizer_of(l, b);
        !g.core_p(&c, p).is_trivial()
    });
    let apl = build_p_poset(g, l, p, PKind::Ap)?;
    let index: HashMap<Subgroup, usize> =
        oi.image.tags().iter().enumerate().map(|(i, t)| (t.sub().expect("subgroup tag").clone(), i)).collect();
    let f: Result<Vec<usize>> = apl
        .subgroups
        .iter()
        .map(|a| {
            let ac = g.product(a, &oi.centralizer);
            index.get(&ac).copied().ok_or_else(|| Error::ConclusionFailed(format!("{} has no image", a.describe(g))))
        })
        .collect();
    let inclusion = map_check("A_p(L) -> image poset", &apl.poset, &oi.image, &f?, FiberMode::Down)?;
    Ok(ImageCheck {
        all_conical,
        outers: oi.outer.subgroups.len(),
        image_size: oi.image.len(),
        inclusion,
        betti_l: reduced_betti(&apl.poset)?,
        betti_image: reduced_betti(&oi.image)?,
    })
}

/// Cycle-notation label of a subgroup.
pub fn subgroup_label(g: &GroupTable, s: &Subgroup) -> String {
    label_from_gens(g, &g.generators_of(s))
}
