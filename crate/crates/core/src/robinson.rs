//! Robinson subgroups: q-elementary p′-subgroups certifying the fixed-point
//! Euler-characteristic form of Quillen's conjecture, Properties R₀(p)/R(p),
//! the product assembly over components, and the local-rank criterion.
//!
//! The automorphism group of a simple group `L` is never computed: callers supply
//! an overgroup `A ⊵ L` with `C_A(L) = 1` acting on `L` by conjugation.

use serde_json::json;

use crate::error::{Error, Result};
use crate::group::{p_part, Elt, GroupTable, Subgroup};
use crate::homology::reduced_euler;
use crate::psubgroup::{build_p_poset, fixed_subposet, p_poset, PKind};
use crate::replacement::{subgroup_label, Condition};

/// `Q = ⟨g⟩ × O_q(Q)` with `g` of order prime to `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QElementary {
    pub generator: Elt,
    pub q_core: Subgroup,
}

fn identity_of(g: &GroupTable, h: &Subgroup) -> Elt {
    *h.members().iter().find(|&&x| g.elt_order(x) == 1).expect("a subgroup contains the identity")
}

/// Splits `qs` as `⟨g⟩ × O_q(qs)` when it is q-elementary; `g` is the least element id that works.
pub fn q_elementary(g: &GroupTable, qs: &Subgroup, q: u32) -> Option<QElementary> {
    let core = g.core_p(qs, q);
    if core.order() != p_part(qs.order(), q) {
        return None;
    }
    let index = (qs.order() / core.order()) as u32;
    if index == 1 {
        return Some(QElementary { generator: identity_of(g, qs), q_core: core });
    }
    let core_gens = g.generators_of(&core);
    qs.members()
        .iter()
        .copied()
        .find(|&x| g.elt_order(x) == index && core_gens.iter().all(|&c| g.commute(x, c)))
        .map(|x| QElementary { generator: x, q_core: core })
}

/// Reduced Euler characteristic of `A_p(H)^Q` (members normalized by `Q`).
pub fn fixed_euler(g: &GroupTable, h: &Subgroup, qs: &Subgroup, p: u32) -> Result<i64> {
    let x = build_p_poset(g, h, p, PKind::Ap)?;
    Ok(reduced_euler(&fixed_subposet(&x.poset, g, qs)))
}

fn residue(x: i64, q: u32) -> u32 {
    x.rem_euclid(q as i64) as u32
}

/// Evaluated conditions of Property R₀(p) (and R(p)) for one supplied `Q ≤ L`.
#[derive(Clone, Debug)]
pub struct RobinsonCertificate {
    pub component: String,
    pub overgroup_order: usize,
    pub q_subgroup: String,
    pub p: u32,
    pub q: u32,
    pub decomposition: Option<QElementary>,
    /// tagged `(1)`–`(4)`, `(3+)`, `(4+)`, `(5)`, and `reduction`
    pub conditions: Vec<Condition>,
    /// `χ̃(A_p(L)^Q)`
    pub euler: i64,
    pub euler_mod_q: u32,
    /// `χ̃(A_p(L)^{⟨g⟩})`
    pub euler_generator: Option<i64>,
    /// number of members of `A_p(A)^Q`
    pub overgroup_fixed: usize,
    generator_text: Option<String>,
}

impl RobinsonCertificate {
    pub fn condition(&self, tag: &str) -> Option<&Condition> {
        self.conditions.iter().find(|c| c.name == tag)
    }

    pub fn holds(&self, tag: &str) -> bool {
        self.condition(tag).is_some_and(|c| c.holds)
    }

    /// Conditions (1)–(4).
    pub fn satisfies_r0(&self) -> bool {
        ["(1)", "(2)", "(3)", "(4)"].iter().all(|t| self.holds(t))
    }

    /// Conditions (1)–(5).
    pub fn satisfies_r(&self) -> bool {
        self.satisfies_r0() && self.holds("(5)")
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "component": self.component,
            "overgroup_order": self.overgroup_order,
            "Q": self.q_subgroup,
            "p": self.p,
            "q": self.q,
            "generator": self.generator_text,
            "q_core": self.decomposition.as_ref().map(|d| d.q_core.order()),
            "conditions": self.conditions.iter().map(|c| json!({"name": c.name, "holds": c.holds, "detail": c.detail})).collect::<Vec<_>>(),
            "euler": self.euler,
            "euler_mod_q": self.euler_mod_q,
            "euler_generator": self.euler_generator,
            "overgroup_fixed": self.overgroup_fixed,
            "R0": self.satisfies_r0(),
            "R": self.satisfies_r(),
        })
    }
}

/// Checks that `A` is an admissible overgroup: `L ⊴ A` and `C_A(L) = 1`.
pub fn check_overgroup(a: &GroupTable, l: &Subgroup) -> Result<()> {
    let whole = Subgroup::whole(a);
    if !a.is_normal_in(l, &whole) {
        return Err(Error::BadOvergroup(format!("{} is not normal in the overgroup", l.describe(a))));
    }
    let c = a.centralizer_of(&whole, l);
    if !c.is_trivial() {
        return Err(Error::BadOvergroup(format!("C_A(L) = {} is nontrivial", c.describe(a))));
    }
    Ok(())
}

/// Evaluates Property R₀(p) items (1)–(4) for `Q ≤ L ⊴ A`, together with
/// (3+) `A_p(A)^Q = ∅`, (4+) every member of `A_p(A)^Q` meets `L`, (5) the
/// preferred prime pairing, and the reduction `χ̃(A_p(L)^Q) ≡ χ̃(A_p(L)^{⟨g⟩}) mod q`.
pub fn r0_check(a: &GroupTable, l: &Subgroup, qs: &Subgroup, p: u32, q: u32) -> Result<RobinsonCertificate> {
    check_overgroup(a, l)?;
    if !qs.is_subgroup_of(l) {
        return Err(Error::PreconditionFailed(format!("{} is not contained in L", qs.describe(a))));
    }
    if p == q {
        return Err(Error::PreconditionFailed(format!("q = {q} must differ from p")));
    }
    let whole = Subgroup::whole(a);
    let mut conds = Vec::new();

    let decomposition = q_elementary(a, qs, q);
    let p_prime = qs.order() % p as usize != 0;
    conds.push(Condition::new(
        "(1)",
        p_prime && decomposition.is_some(),
        match (&decomposition, p_prime) {
            (_, false) => format!("|Q| = {} is divisible by p", qs.order()),
            (None, _) => "Q is not a cyclic group times its q-core".to_string(),
            (Some(d), _) => format!("Q = <{}> x O_q(Q), |O_q(Q)| = {}", a.fmt_elt(d.generator), d.q_core.order()),
        },
    ));
    let oq = a.core_p(qs, q);
    conds.push(Condition::new("(2)", !oq.is_trivial(), format!("|O_q(Q)| = {}", oq.order())));

    let euler = fixed_euler(a, l, qs, p)?;
    let euler_mod_q = residue(euler, q);
    conds.push(Condition::new("(3)", euler_mod_q != 0, format!("χ̃(A_p(L)^Q) = {euler} ≡ {euler_mod_q} mod {q}")));

    let centralizer = a.centralizer_of(&whole, qs);
    let outside = a.elements_of_order(&centralizer, p).into_iter().find(|&x| !l.contains(x));
    conds.push(match outside {
        Some(x) => Condition::new("(4)", false, format!("{} centralizes Q but lies outside L", a.fmt_elt(x))),
        None => Condition::new("(4)", true, "A_p(C_A(Q)) ⊆ A_p(L)"),
    });

    let ap_a = p_poset(a, p, PKind::Ap)?;
    let gens = a.generators_of(qs);
    let fixed: Vec<&Subgroup> = ap_a
        .subgroups
        .iter()
        .filter(|e| gens.iter().all(|&x| a.conjugate(e, x) == **e))
        .collect();
    conds.push(match fixed.first() {
        Some(e) => Condition::new("(3+)", false, format!("{} is normalized by Q", e.describe(a))),
        None => Condition::new("(3+)", true, "A_p(A)^Q is empty"),
    });
    let missing = fixed.iter().find(|e| e.intersection(l).is_trivial());
    conds.push(match missing {
        Some(e) => Condition::new("(4+)", false, format!("{} is normalized by Q and meets L trivially", e.describe(a))),
        None => Condition::new("(4+)", true, "every member of A_p(A)^Q meets L"),
    });

    let preferred = if p == 2 { 3 } else { 2 };
    conds.push(Condition::new("(5)", q == preferred, format!("q = {q}, preferred {preferred}")));

    let euler_generator = match &decomposition {
        Some(d) => Some(fixed_euler(a, l, &a.closure(&[d.generator]), p)?),
        None => None,
    };
    if let Some(eg) = euler_generator {
        let ok = residue(eg, q) == euler_mod_q;
        conds.push(Condition::new("reduction", ok, format!("χ̃(A_p(L)^<g>) = {eg} ≡ {} mod {q}", residue(eg, q))));
    }

    Ok(RobinsonCertificate {
        component: subgroup_label(a, l),
        overgroup_order: a.order(),
        q_subgroup: qs.describe(a),
        p,
        q,
        generator_text: decomposition.as_ref().map(|d| a.fmt_elt(d.generator)),
        decomposition,
        conditions: conds,
        euler,
        euler_mod_q,
        euler_generator,
        overgroup_fixed: fixed.len(),
    })
}

/// R₀(p) with `Q` a Sylow `r`-subgroup of `L` (for `L` of Lie type in characteristic `r`,
/// as asserted by the caller) and `q = r`.
pub fn sylow_r_robinson(a: &GroupTable, l: &Subgroup, p: u32, r: u32) -> Result<RobinsonCertificate> {
    if p == r {
        return Err(Error::PreconditionFailed(format!(
            "the defining characteristic r = {r} must differ from p"
        )));
    }
    let x = a.sylow(l, r);
    r0_check(a, l, &x, p, r)
}

/// The three-case subgroup `Q ≤ Alt_n` for `n ≥ 6`, given the natural action of `g` on `n` points.
pub fn alternating_q(g: &GroupTable) -> Result<Subgroup> {
    let n = g.degree();
    if n < 6 {
        return Err(Error::PreconditionFailed(format!("degree {n} is below 6")));
    }
    let cycle = |from: usize, to: usize| -> Vec<usize> { (from..to).collect() };
    let cycles: Vec<Vec<usize>> = if n % 2 == 0 {
        vec![cycle(0, 3), cycle(3, n)]
    } else if n % 3 == 0 {
        vec![cycle(0, n)]
    } else {
        vec![cycle(0, 3), cycle(3, 6), cycle(6, n)]
    };
    let gens = cycles
        .into_iter()
        .filter(|c| c.len() > 1)
        .map(|c| {
            g.id_of_cycles(&[c.clone()])
                .ok_or_else(|| Error::PreconditionFailed(format!("the cycle {c:?} is not in the group")))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(g.closure(&gens))
}

// ---------------------------------------------------------------------------
// orbit lemma

/// Orbits of `qs` on the points `0..degree`, each sorted, in order of least point.
pub fn point_orbits(g: &GroupTable, qs: &Subgroup) -> Vec<Vec<usize>> {
    let n = g.degree();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut orbit: Vec<usize> = qs.members().iter().map(|&x| g.element(x).images[s] as usize).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &i in &orbit {
            seen[i] = true;
        }
        out.push(orbit);
    }
    out
}

/// Outcome of the orbit-divisibility check over `A_p(G)^Q`.
#[derive(Clone, Debug)]
pub struct OrbitLemmaReport {
    pub fixed_members: usize,
    /// pairs `(E, orbit)` with `E` stabilizing the orbit and acting nontrivially on it
    pub nontrivial_pairs: usize,
    /// pairs `(E, orbit)` with `E` moving the orbit off itself; these carry no constraint
    pub unstable_pairs: usize,
    /// first pair violating `p | |orbit|`
    pub violation: Option<(String, Vec<usize>)>,
}

impl OrbitLemmaReport {
    pub fn holds(&self) -> bool {
        self.violation.is_none()
    }
}

/// For every `E ∈ A_p(G)^Q` and every `Q`-orbit `O` that `E` stabilizes and moves, checks `p | |O|`.
///
/// A `Q`-invariant `E` need not stabilize each `Q`-orbit (on 7 points, the four-group
/// `<(4 5)(6 7), (4 6)(5 7)>` is normalized by `<(1 2 3), (4 5 6)>` yet moves 6 to 7), and
/// no divisibility holds for orbits that `E` does not stabilize.
pub fn orbit_lemma_check(g: &GroupTable, qs: &Subgroup, p: u32) -> Result<OrbitLemmaReport> {
    let orbits = point_orbits(g, qs);
    let ap = p_poset(g, p, PKind::Ap)?;
    let gens = g.generators_of(qs);
    let mut report = OrbitLemmaReport { fixed_members: 0, nontrivial_pairs: 0, unstable_pairs: 0, violation: None };
    for e in ap.subgroups.iter().filter(|e| gens.iter().all(|&x| g.conjugate(e, x) == **e)) {
        report.fixed_members += 1;
        for o in &orbits {
            let stable = e.members().iter().all(|&x| o.iter().all(|&i| o.binary_search(&(g.element(x).images[i] as usize)).is_ok()));
            if !stable {
                report.unstable_pairs += 1;
                continue;
            }
            let moves = e.members().iter().any(|&x| o.iter().any(|&i| g.element(x).images[i] as usize != i));
            if moves {
                report.nontrivial_pairs += 1;
                if o.len() % p as usize != 0 && report.violation.is_none() {
                    report.violation = Some((e.describe(g), o.clone()));
                }
            }
        }
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// assembly over components

#[derive(Clone, Debug)]
pub struct ComponentFactor {
    pub component: String,
    pub q_subgroup: String,
    /// `χ̃(A_p(L_i)^{Q_i})`
    pub euler: i64,
}

/// The product assembly `Q = ⟨g₁⋯g_t⟩ × ∏ O_q(Q_i)` and its fixed-point Euler characteristics.
#[derive(Clone, Debug)]
pub struct LqcReport {
    pub p: u32,
    pub q: u32,
    pub factors: Vec<ComponentFactor>,
    pub witness: Elt,
    pub witness_text: String,
    pub q_order: usize,
    /// `χ̃(A_p(G)^Q)`, computed directly
    pub euler_q: i64,
    /// `χ̃(A_p(G)^{⟨g⟩})`, computed directly
    pub euler_witness: i64,
    /// `(−1)^{t−1} ∏ χ̃(A_p(L_i)^{Q_i})`
    pub product: i64,
}

impl LqcReport {
    /// The product formula holds modulo `q`.
    pub fn congruence_holds(&self) -> bool {
        residue(self.euler_q, self.q) == residue(self.product, self.q)
    }

    /// `χ̃(A_p(G)^g) ≡ χ̃(A_p(G)^Q) mod q`.
    pub fn reduction_holds(&self) -> bool {
        residue(self.euler_witness, self.q) == residue(self.euler_q, self.q)
    }

    /// `g` witnesses the fixed-point form of the conjecture.
    pub fn witnessed(&self) -> bool {
        self.euler_witness != 0
    }

    pub fn passed(&self) -> bool {
        self.congruence_holds() && self.reduction_holds() && self.witnessed()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "q": self.q,
            "factors": self.factors.iter().map(|f| json!({"component": f.component, "Q": f.q_subgroup, "euler": f.euler})).collect::<Vec<_>>(),
            "witness": self.witness_text,
            "Q_order": self.q_order,
            "euler_Q": self.euler_q,
            "euler_Q_mod_q": residue(self.euler_q, self.q),
            "euler_witness": self.euler_witness,
            "product": self.product,
            "congruence": self.congruence_holds(),
            "reduction": self.reduction_holds(),
            "witnessed": self.witnessed(),
        })
    }
}

/// Assembles `Q` from per-component q-elementary subgroups (`qs[i] ≤ L_i`, in the
/// component order of `fitting_data`), computes `χ̃(A_p(G)^Q)` directly and via the
/// product formula, and reports the element `g = g₁⋯g_t` as the witness.
pub fn lqc_check(g: &GroupTable, qs: &[Subgroup], p: u32, q: u32) -> Result<LqcReport> {
    let whole = Subgroup::whole(g);
    let op = g.core_p(&whole, p);
    if !op.is_trivial() {
        return Err(Error::HypothesisFailed(format!("O_p(G) = {} is nontrivial", op.describe(g))));
    }
    let opp = g.core_p_prime(&whole, p);
    if !opp.is_trivial() {
        return Err(Error::HypothesisFailed(format!("O_p'(G) = {} is nontrivial", opp.describe(g))));
    }
    let comps = g.fitting_data(&whole)?.components;
    if comps.len() != qs.len() {
        return Err(Error::PreconditionFailed(format!("{} components but {} subgroups supplied", comps.len(), qs.len())));
    }
    let mut witness = identity_of(g, &whole);
    let mut r = Subgroup::trivial();
    let mut factors = Vec::new();
    let mut product: i64 = if comps.len() % 2 == 1 { 1 } else { -1 };
    for (l, qi) in comps.iter().zip(qs) {
        if !qi.is_subgroup_of(l) {
            return Err(Error::PreconditionFailed(format!("{} is not inside {}", qi.describe(g), l.describe(g))));
        }
        let d = q_elementary(g, qi, q)
            .ok_or_else(|| Error::PreconditionFailed(format!("{} is not q-elementary", qi.describe(g))))?;
        witness = g.mul(witness, d.generator);
        r = g.join(&r, &d.q_core);
        let euler = fixed_euler(g, l, qi, p)?;
        product *= euler;
        factors.push(ComponentFactor { component: subgroup_label(g, l), q_subgroup: qi.describe(g), euler });
    }
    let big_q = g.join(&g.closure(&[witness]), &r);
    let ap = p_poset(g, p, PKind::Ap)?;
    let euler_q = reduced_euler(&fixed_subposet(&ap.poset, g, &big_q));
    let euler_witness = reduced_euler(&fixed_subposet(&ap.poset, g, &g.closure(&[witness])));
    Ok(LqcReport {
        p,
        q,
        factors,
        witness,
        witness_text: g.fmt_elt(witness),
        q_order: big_q.order(),
        euler_q,
        euler_witness,
        product,
    })
}

// ---------------------------------------------------------------------------
// local-rank criterion

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub p: u32,
    pub q: u32,
    /// `m_q(L)`
    pub rank_l: u32,
    /// `m_{p,q}(A)`
    pub local_rank_a: u32,
    /// `m_{p,q}(A) < m_q(L)`
    pub rank_criterion: bool,
    /// no `E ∈ A_p(A)` has `N_L(E)` containing a Sylow q-subgroup of `L`
    pub sylow_criterion: bool,
    pub sylow_witness: Option<String>,
}

impl CriterionReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "p": self.p,
            "q": self.q,
            "m_q(L)": self.rank_l,
            "m_pq(A)": self.local_rank_a,
            "rank_criterion": self.rank_criterion,
            "sylow_criterion": self.sylow_criterion,
            "sylow_witness": self.sylow_witness,
        })
    }
}

/// Computes `m_q(L)` and `m_{p,q}(A)` and evaluates both sufficient criteria for R(p).
pub fn criterion_check(a: &GroupTable, l: &Subgroup, p: u32, q: u32) -> Result<CriterionReport> {
    check_overgroup(a, l)?;
    let whole = Subgroup::whole(a);
    let rank_l = a.p_rank(l, q);
    let local_rank_a = a.m_local(&whole, p, q);
    let sylow_q = p_part(l.order(), q);
    let ap = p_poset(a, p, PKind::Ap)?;
    let witness = ap
        .subgroups
        .iter()
        .find(|e| p_part(a.normalizer(l, e).order(), q) == sylow_q)
        .map(|e| e.describe(a));
    Ok(CriterionReport {
        p,
        q,
        rank_l,
        local_rank_a,
        rank_criterion: local_rank_a < rank_l,
        sylow_criterion: witness.is_none(),
        sylow_witness: witness,
    })
}
