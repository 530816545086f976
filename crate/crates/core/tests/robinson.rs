mod common;

use std::collections::BTreeSet;

use common::*;
use qplab::corpus;
use qplab::group::{GroupTable, Permutation, Subgroup};
use qplab::homology::{reduced_betti, reduced_euler};
use qplab::poset::Poset;
use qplab::psubgroup::{fixed_subposet, p_poset, PKind};
use qplab::robinson::*;
use qplab::Error;

type PermSet = BTreeSet<Perm>;

fn alt(g: &GroupTable) -> Subgroup {
    g.derived_subgroup(&Subgroup::whole(g))
}

fn sub(g: &GroupTable, cycles: &[&[usize]]) -> Subgroup {
    let ids: Vec<u32> = cycles.iter().map(|c| g.id_of_cycles(&[c.to_vec()]).unwrap()).collect();
    g.closure(&ids)
}

fn perm_set(g: &GroupTable, s: &Subgroup) -> PermSet {
    s.members().iter().map(|&x| g.element(x).images.clone()).collect()
}

/// Minimal `Q`-invariant elementary abelian 2-subgroups, found independently: a
/// `Q`-invariant `E` contains the `Q`-orbit of each of its involutions, so the
/// minimal ones are the orbit closures that happen to be elementary abelian.
fn invariant_orbit_closures(n: usize, group: &[Perm], q_gens: &[Perm]) -> BTreeSet<PermSet> {
    let mut out = BTreeSet::new();
    for x in group.iter().filter(|x| order_of(x) == 2) {
        let mut orbit: BTreeSet<Perm> = BTreeSet::from([x.clone()]);
        loop {
            let next: BTreeSet<Perm> = orbit
                .iter()
                .flat_map(|y| q_gens.iter().map(move |g| compose(&compose(&inverse(g), y), g)))
                .collect();
            if next.is_subset(&orbit) {
                break;
            }
            orbit.extend(next);
        }
        let gens: Vec<Perm> = orbit.into_iter().collect();
        let e = close(n, &gens);
        if e.iter().all(|y| order_of(y) <= 2) && e.iter().all(|y| e.iter().all(|z| commutes(y, z))) {
            out.insert(e);
        }
    }
    out
}

fn raw_group(name: &str) -> (usize, Vec<Perm>) {
    let spec = corpus::spec(name).unwrap();
    (spec.degree, close(spec.degree, &spec.images()).into_iter().collect())
}

#[test]
fn alternating_q_cases() {
    let s6 = corpus::load("s6");
    assert_eq!(alternating_q(&s6).unwrap(), sub(&s6, &[&[0, 1, 2], &[3, 4, 5]]));
    let s7 = corpus::load("s7");
    assert_eq!(alternating_q(&s7).unwrap(), sub(&s7, &[&[0, 1, 2], &[3, 4, 5]]));
    assert!(alternating_q(&corpus::load("s5")).is_err());
}

#[test]
fn sym6_fixed_points_are_empty() {
    let g = corpus::load("s6");
    let q = alternating_q(&g).unwrap();
    let x = p_poset(&g, 2, PKind::Ap).unwrap();
    let fixed = fixed_subposet(&x.poset, &g, &q);
    assert!(fixed.is_empty());
    assert_eq!(reduced_euler(&fixed), -1);
    let (n, all) = raw_group("s6");
    let q_gens = vec![cyc(n, &[&[1, 2, 3]]), cyc(n, &[&[4, 5, 6]])];
    assert!(invariant_orbit_closures(n, &all, &q_gens).is_empty());
}

#[test]
fn sym7_fixed_points_are_two_points() {
    let g = corpus::load("s7");
    let q = alternating_q(&g).unwrap();
    let x = p_poset(&g, 2, PKind::Ap).unwrap();
    let keep = qplab::psubgroup::fixed_indices(&x.poset, &g, &g.generators_of(&q));
    assert_eq!(keep.len(), 2);
    let fixed = x.poset.subposet(&keep);
    assert!(!fixed.comparable(0, 1));
    assert_eq!(reduced_euler(&fixed), 1);
    // both lie in Alt_7
    let a7 = alt(&g);
    assert!(keep.iter().all(|&i| x.subgroups[i].is_subgroup_of(&a7)));

    let (n, all) = raw_group("s7");
    let q_gens = vec![cyc(n, &[&[1, 2, 3]]), cyc(n, &[&[4, 5, 6]])];
    let oracle = invariant_orbit_closures(n, &all, &q_gens);
    let found: BTreeSet<PermSet> = keep.iter().map(|&i| perm_set(&g, &x.subgroups[i])).collect();
    assert_eq!(oracle, found);
}

#[test]
fn alt7_robinson_certificate() {
    let g = corpus::load("s7");
    let l = alt(&g);
    let q = alternating_q(&g).unwrap();
    let c = r0_check(&g, &l, &q, 2, 3).unwrap();
    assert!(c.satisfies_r0(), "{}", c.to_json());
    assert!(c.satisfies_r());
    assert_eq!(c.euler, 1);
    assert_eq!(c.euler_mod_q, 1);
    assert!(!c.holds("(3+)"));
    assert!(c.holds("(4+)"));
    assert!(c.holds("reduction"));
    assert_eq!(c.overgroup_fixed, 2);
    // Q is a 3-group, so the cyclic part is trivial
    assert_eq!(c.decomposition.as_ref().unwrap().q_core.order(), 9);
    assert_eq!(g.elt_order(c.decomposition.as_ref().unwrap().generator), 1);
}

#[test]
fn trivial_q_core_fails_condition_two() {
    let g = corpus::load("s7");
    let l = alt(&g);
    let q = sub(&g, &[&[0, 1, 2, 3, 4]]);
    let c = r0_check(&g, &l, &q, 2, 3).unwrap();
    assert!(c.holds("(1)"));
    assert!(!c.holds("(2)"));
    assert!(!c.satisfies_r0());
}

#[test]
fn alt5_outer_involution_breaks_condition_four() {
    let g = corpus::load("s5");
    let l = alt(&g);
    let q = sub(&g, &[&[0, 1, 2]]);
    let c = r0_check(&g, &l, &q, 2, 3).unwrap();
    let four = c.condition("(4)").unwrap();
    assert!(!four.holds);
    assert!(four.detail.contains("(4 5)"), "{}", four.detail);
    // brute force: (45) is odd and commutes with (123)
    let t = g.id_of_cycles(&[vec![3, 4]]).unwrap();
    assert!(!l.contains(t));
    assert!(g.commute(t, g.id_of_cycles(&[vec![0, 1, 2]]).unwrap()));
}

#[test]
fn overgroup_and_prime_preconditions() {
    let g = corpus::load("s5xs3");
    let l = g.components(&Subgroup::whole(&g)).unwrap().remove(0);
    let q = sub(&g, &[&[0, 1, 2]]);
    assert!(matches!(r0_check(&g, &l, &q, 2, 3), Err(Error::BadOvergroup(_))));
    let s5 = corpus::load("s5");
    assert!(matches!(sylow_r_robinson(&s5, &alt(&s5), 2, 2), Err(Error::PreconditionFailed(_))));
    let outside = sub(&s5, &[&[0, 1]]);
    assert!(matches!(r0_check(&s5, &alt(&s5), &outside, 3, 2), Err(Error::PreconditionFailed(_))));
}

#[test]
fn sylow_robinson_certificates() {
    let g = corpus::load("pgammal28");
    let l = alt(&g);
    let c = sylow_r_robinson(&g, &l, 3, 2).unwrap();
    assert!(c.holds("(3+)"), "{}", c.to_json());
    assert_eq!(c.overgroup_fixed, 0);
    assert!(c.satisfies_r(), "{}", c.to_json());
    assert_eq!(c.euler, -1);

    let s5 = corpus::load("s5");
    let c = sylow_r_robinson(&s5, &alt(&s5), 3, 2).unwrap();
    assert!(c.satisfies_r0(), "{}", c.to_json());
    assert!(c.holds("(3+)"));
}

#[test]
fn emptiness_implies_conditions_three_and_four() {
    // every subgroup generated by one or two 3-cycles or 3-elements of Alt_6, acted on by Sym_6
    let g = corpus::load("s6");
    let l = alt(&g);
    let threes: Vec<u32> = g.elements_of_order(&l, 3);
    let mut seen = BTreeSet::new();
    let mut checked = 0;
    for &a in threes.iter().take(12) {
        for &b in threes.iter().take(24) {
            let q = g.closure(&[a, b]);
            if !seen.insert(q.clone()) || q.order() % 2 == 0 {
                continue;
            }
            let c = r0_check(&g, &l, &q, 2, 3).unwrap();
            if c.holds("(3+)") {
                assert!(c.holds("(3)") && c.holds("(4)"), "{}", c.to_json());
            }
            if c.holds("(1)") {
                assert!(c.holds("reduction"), "{}", c.to_json());
            }
            checked += 1;
        }
    }
    assert!(checked >= 3);
}

#[test]
fn lqc_on_alt7() {
    let g = corpus::load("a7");
    let q = alternating_q(&g).unwrap();
    let r = lqc_check(&g, &[q], 2, 3).unwrap();
    assert_eq!(r.factors.len(), 1);
    assert_eq!(r.euler_q, 1);
    assert_eq!(r.product, 1);
    assert!(r.congruence_holds());
    assert!(r.reduction_holds());
    assert!(r.witnessed(), "{}", r.to_json());
    assert!(r.passed());
    assert_eq!(r.q_order, 9);
}

#[test]
fn lqc_rejects_nontrivial_cores() {
    let s4 = corpus::load("s4");
    assert!(matches!(lqc_check(&s4, &[], 2, 3), Err(Error::HypothesisFailed(_))));
    // S3 x S3 at 2: the 3-core is normal of odd order
    let g = corpus::load("s3xs3");
    assert!(matches!(lqc_check(&g, &[], 2, 3), Err(Error::HypothesisFailed(_))));
}

#[test]
fn product_formula_at_poset_level() {
    let g = corpus::load("s3xs3");
    let b = reduced_betti(&p_poset(&g, 2, PKind::Ap).unwrap().poset).unwrap();
    let three = Poset::build(vec!["a".into(), "b".into(), "c".into()], &[]).unwrap();
    let j = reduced_betti(&three.join(&three)).unwrap();
    assert_eq!(b, j);
    assert_eq!(b.get(1), 4);
    // χ̃(X * Y) = −χ̃(X) χ̃(Y) with χ̃ = 2 for each antichain
    assert_eq!(b.euler(), -4);
}

#[test]
fn local_rank_criterion() {
    let s7 = corpus::load("s7");
    let r = criterion_check(&s7, &alt(&s7), 2, 3).unwrap();
    // Sylow 3-subgroups of Alt_7 are C3 x C3, and the four-group on {1,2,3,4} has
    // normalizer S4 x S3 of 3-rank 2: neither criterion applies to Alt_7
    assert_eq!((r.rank_l, r.local_rank_a), (2, 2));
    assert!(!r.rank_criterion);
    assert!(!r.sylow_criterion);

    let s5 = corpus::load("s5");
    let r = criterion_check(&s5, &alt(&s5), 2, 3).unwrap();
    assert_eq!((r.rank_l, r.local_rank_a), (1, 1));
    assert!(!r.rank_criterion);
    // C_{A5}((12)) ≅ S3 contains a Sylow 3-subgroup
    assert!(!r.sylow_criterion);
    assert!(r.sylow_witness.is_some());

    let r = criterion_check(&s5, &alt(&s5), 2, 7).unwrap();
    assert_eq!((r.rank_l, r.local_rank_a), (0, 0));
    assert!(!r.rank_criterion);
}

#[test]
fn rank_criterion_implies_sylow_criterion() {
    for (name, p, q) in [("s7", 2, 3), ("s6", 2, 3), ("s5", 2, 3), ("pgammal28", 2, 3), ("pgammal28", 3, 2)] {
        let g = corpus::load(name);
        let r = criterion_check(&g, &alt(&g), p, q).unwrap();
        if r.rank_criterion {
            assert!(r.sylow_criterion, "{name}: {}", r.to_json());
        }
    }
}

#[test]
fn orbit_lemma_holds() {
    let s7 = corpus::load("s7");
    let r = orbit_lemma_check(&s7, &alternating_q(&s7).unwrap(), 2).unwrap();
    assert!(r.holds());
    assert_eq!(r.fixed_members, 2);
    // each fixed four-group moves one 3-orbit and the fixed point off themselves
    assert_eq!((r.nontrivial_pairs, r.unstable_pairs), (0, 4));
    let s6 = corpus::load("s6");
    for cycles in [&[&[0usize, 1, 2][..]][..], &[&[0, 1, 2, 3, 4, 5]], &[&[0, 1, 2, 3, 4]], &[&[0, 1]]] {
        let q = sub(&s6, cycles);
        let r = orbit_lemma_check(&s6, &q, 2).unwrap();
        assert!(r.holds(), "{cycles:?}");
    }
    // a regular 6-cycle: ⟨(1 4)(2 5)(3 6)⟩ is invariant and moves the single orbit of even size
    let r = orbit_lemma_check(&s6, &sub(&s6, &[&[0, 1, 2, 3, 4, 5]]), 2).unwrap();
    assert!(r.nontrivial_pairs > 0);
    // odd transitive action: nothing fixed
    let s5 = corpus::load("s5");
    let r = orbit_lemma_check(&s5, &sub(&s5, &[&[0, 1, 2, 3, 4]]), 2).unwrap();
    assert_eq!(r.fixed_members, 0);
}

#[test]
fn point_orbits_partition_the_points() {
    let s7 = corpus::load("s7");
    let orbits = point_orbits(&s7, &alternating_q(&s7).unwrap());
    assert_eq!(orbits, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6]]);
    let id = Permutation::identity(7);
    assert!(s7.id_of(&id).is_some());
}
