mod common;

use std::collections::BTreeSet;

use common::complex::betti_oracle;
use common::*;
use proptest::prelude::*;
use qplab::corpus;
use qplab::group::{prime_divisors, GroupTable, Permutation, Subgroup};
use qplab::homology::{lefschetz_profile, reduced_betti};
use qplab::psubgroup::*;

type PermSet = BTreeSet<Perm>;

fn raw_elements(name: &str) -> (usize, Vec<Perm>) {
    let spec = corpus::spec(name).unwrap();
    (spec.degree, close(spec.degree, &spec.images()).into_iter().collect())
}

/// All nontrivial p-subgroups by repeatedly adjoining p-elements to known p-subgroups.
fn p_subgroups_oracle(n: usize, all: &[Perm], p: usize) -> BTreeSet<PermSet> {
    let p_elements: Vec<&Perm> = all.iter().filter(|x| order_of(x) > 1 && is_p_power(order_of(x), p)).collect();
    let mut found: BTreeSet<PermSet> = p_elements.iter().map(|x| close(n, &[(*x).clone()])).collect();
    let mut frontier: Vec<PermSet> = found.iter().cloned().collect();
    while let Some(h) = frontier.pop() {
        for x in &p_elements {
            if h.contains(*x) {
                continue;
            }
            let mut gens: Vec<Perm> = h.iter().cloned().collect();
            gens.push((*x).clone());
            let k = close(n, &gens);
            if is_p_power(k.len(), p) && found.insert(k.clone()) {
                frontier.push(k);
            }
        }
    }
    found
}

fn is_elementary_abelian(s: &PermSet, p: usize) -> bool {
    s.iter().all(|x| order_of(x) == 1 || order_of(x) == p) && s.iter().all(|x| s.iter().all(|y| commutes(x, y)))
}

/// `P = O_p(N_G(P))`, with `O_p` the intersection of the maximal p-subgroups of the normalizer.
fn is_radical_oracle(p_subs: &BTreeSet<PermSet>, all: &[Perm], s: &PermSet) -> bool {
    let normalizer: Vec<Perm> = all.iter().filter(|x| is_normal(s, std::slice::from_ref(*x))).cloned().collect();
    let in_n: Vec<&PermSet> = p_subs.iter().filter(|t| t.iter().all(|y| normalizer.contains(y))).collect();
    let maximal: Vec<&PermSet> =
        in_n.iter().filter(|t| !in_n.iter().any(|u| u.len() > t.len() && t.is_subset(u))).cloned().collect();
    let core: PermSet = maximal.iter().fold(maximal[0].clone(), |acc, t| acc.intersection(t).cloned().collect());
    core == *s
}

fn relation(subs: &[PermSet]) -> Vec<Vec<bool>> {
    subs.iter().map(|a| subs.iter().map(|b| a.len() < b.len() && a.is_subset(b)).collect()).collect()
}

fn to_sub(g: &GroupTable, s: &PermSet) -> Subgroup {
    let ids: Vec<u32> = s.iter().map(|p| g.id_of(&Permutation { images: p.clone() }).unwrap()).collect();
    g.closure(&ids)
}

const SMALL: [&str; 8] = ["c3", "c4", "s3", "d8", "a4", "s4", "sl23", "a5"];

#[test]
fn subgroup_lists_match_brute_force() {
    let mut oracle_betti_checks = 0;
    for name in SMALL {
        let g = corpus::load(name);
        let (n, all) = raw_elements(name);
        for p in prime_divisors(all.len()) {
            let oracle_sp = p_subgroups_oracle(n, &all, p as usize);
            let oracle_ap: BTreeSet<PermSet> =
                oracle_sp.iter().filter(|s| is_elementary_abelian(s, p as usize)).cloned().collect();
            let oracle_bp: BTreeSet<PermSet> =
                oracle_sp.iter().filter(|s| is_radical_oracle(&oracle_sp, &all, s)).cloned().collect();
            for (kind, oracle) in [(PKind::Sp, &oracle_sp), (PKind::Ap, &oracle_ap), (PKind::Bp, &oracle_bp)] {
                let x = p_poset(&g, p, kind).unwrap();
                let lib: BTreeSet<Subgroup> = x.subgroups.iter().cloned().collect();
                let expected: BTreeSet<Subgroup> = oracle.iter().map(|s| to_sub(&g, s)).collect();
                assert_eq!(lib, expected, "{name} p={p} {kind}");
                // the order relation is inclusion
                let ordered: Vec<PermSet> = x
                    .subgroups
                    .iter()
                    .map(|s| s.members().iter().map(|&e| g.element(e).images.clone()).collect())
                    .collect();
                let rel = relation(&ordered);
                for i in 0..x.poset.len() {
                    for j in 0..x.poset.len() {
                        assert_eq!(x.poset.lt(i, j), rel[i][j], "{name} p={p} {kind}");
                    }
                }
                if rel.len() <= 16 {
                    assert_eq!(reduced_betti(&x.poset).unwrap().betti, betti_oracle(&rel), "{name} p={p} {kind}");
                    oracle_betti_checks += 1;
                }
            }
        }
    }
    assert!(oracle_betti_checks >= 12, "{oracle_betti_checks}");
}

#[test]
fn known_census() {
    let s4 = corpus::load("s4");
    let counts: Vec<usize> = PKind::ALL.iter().map(|&k| p_poset(&s4, 2, k).unwrap().subgroups.len()).collect();
    // S_2: 9 involutions, 3 cyclic and 4 Klein four-groups, 3 dihedral Sylows
    assert_eq!(counts[0], 19);
    // A_2: the 9 involution subgroups and 4 four-groups
    assert_eq!(counts[1], 13);
    let a4 = corpus::load("a4");
    let a3 = p_poset(&a4, 3, PKind::Ap).unwrap();
    assert_eq!(a3.subgroups.len(), 4);
    assert_eq!(reduced_betti(&a3.poset).unwrap().get(0), 3);
    let s5 = corpus::load("s5");
    assert_eq!(p_poset(&s5, 7, PKind::Ap).unwrap().subgroups.len(), 0);
}

#[test]
fn five_kinds_share_betti_profiles() {
    for name in ["c3", "c4", "s3", "d8", "a4", "s4", "sl23", "a5", "s5", "a5xa5", "psl28"] {
        let g = corpus::load(name);
        for p in prime_divisors(g.order()) {
            let profiles: Vec<_> =
                PKind::ALL.iter().map(|&k| reduced_betti(&p_poset(&g, p, k).unwrap().poset).unwrap()).collect();
            for (k, b) in PKind::ALL.iter().zip(&profiles) {
                assert_eq!(*b, profiles[0], "{name} p={p}: {k} differs from sp");
            }
        }
    }
}

#[test]
fn fixed_subposets_share_profiles() {
    for (name, p) in [("s4", 2), ("a5", 2), ("a5", 3), ("s5", 3), ("sl23", 2)] {
        let g = corpus::load(name);
        let whole = Subgroup::whole(&g);
        let rows: Vec<Vec<_>> = PKind::ALL
            .iter()
            .map(|&k| lefschetz_profile(&p_poset(&g, p, k).unwrap().poset, &g, &whole).unwrap().rows)
            .collect();
        for kind_rows in &rows[1..] {
            for (r, s) in kind_rows.iter().zip(&rows[0]) {
                assert_eq!(r.representative, s.representative);
                assert_eq!(r.betti, s.betti, "{name} p={p} class of {}", g.fmt_elt(r.representative));
            }
        }
    }
}

#[test]
fn nontrivial_p_core_makes_posets_acyclic() {
    let mut instances = 0;
    for (name, _) in corpus::FILES {
        let g = corpus::load(name);
        if g.order() > 1000 {
            continue;
        }
        let whole = Subgroup::whole(&g);
        for p in prime_divisors(g.order()) {
            if g.core_p(&whole, p).is_trivial() {
                continue;
            }
            instances += 1;
            for kind in [PKind::Sp, PKind::Ap] {
                let b = reduced_betti(&p_poset(&g, p, kind).unwrap().poset).unwrap();
                assert!(b.is_acyclic(), "{name} p={p} {kind}: {b}");
            }
        }
    }
    assert!(instances >= 10, "{instances}");
}

#[test]
fn retract_routes_agree_with_closed_forms() {
    // building iAp and iSp runs both routes and errors if they disagree
    for name in SMALL {
        let g = corpus::load(name);
        for p in prime_divisors(g.order()) {
            let iap = p_poset(&g, p, PKind::IAp).unwrap();
            let ap: BTreeSet<Subgroup> = p_poset(&g, p, PKind::Ap).unwrap().subgroups.into_iter().collect();
            assert!(iap.subgroups.iter().all(|s| ap.contains(s)));
            let isp = p_poset(&g, p, PKind::ISp).unwrap();
            let sylows = g.all_sylow(&Subgroup::whole(&g), p);
            assert!(sylows.iter().all(|s| isp.subgroups.contains(s)), "{name}");
            assert_eq!(isp.subgroups.len(), sylow_intersections(&g, &Subgroup::whole(&g), p).len());
        }
    }
}

#[test]
fn kind_names_round_trip() {
    for k in PKind::ALL {
        assert_eq!(k.name().parse::<PKind>().unwrap(), k);
    }
    assert!("zz".parse::<PKind>().is_err());
}

#[test]
fn image_poset_of_s5_alternating_component() {
    let g = corpus::load("s5");
    let l = g.derived_subgroup(&Subgroup::whole(&g));
    let oi = outer_and_image_posets(&g, &l, 2).unwrap();
    // outer elementary abelian 2-subgroups: the 10 transposition subgroups
    assert_eq!(oi.outer.subgroups.len(), 10);
    assert!(oi.centralizer.is_trivial());
    // every faithful B gives its own image: all of A_2(S5), 25 involutions and 20 four-groups
    assert_eq!(oi.image.len(), p_poset(&g, 2, PKind::Ap).unwrap().subgroups.len());
    assert_eq!(oi.image.len(), 45);
    assert!(oi.image_of.iter().all(|&i| i < oi.image.len()));
    let ap = p_poset(&g, 2, PKind::Ap).unwrap();
    let split = nf_split(&g, &ap, &l).unwrap();
    assert_eq!(split.f.len(), 10);
    assert_eq!(split.n.len() + split.f.len(), ap.subgroups.len());
    // a poset missing part of A_2(S5) (the transpositions) is refused when splitting by S5
    let ap_of_l = qplab::psubgroup::build_p_poset(&g, &l, 2, PKind::Ap).unwrap();
    assert!(nf_split(&g, &ap_of_l, &Subgroup::whole(&g)).is_err());
}

fn corpus_pairs() -> impl Strategy<Value = (&'static str, usize)> {
    prop::sample::select(vec!["s3", "s4", "a4", "d8", "a5", "sl23", "c4"]).prop_flat_map(|n| (Just(n), 0usize..3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn fixed_points_of_conjugates_are_isomorphic((name, pi) in corpus_pairs(), seed in any::<u32>()) {
        let g = corpus::load(name);
        let primes = prime_divisors(g.order());
        let p = primes[pi % primes.len()];
        let x = p_poset(&g, p, PKind::Ap).unwrap();
        let a = seed % g.order() as u32;
        let t = (seed / 7 + 1) % g.order() as u32;
        let b = g.conj(a, t);
        let fa = x.poset.subposet(&fixed_indices(&x.poset, &g, &[a]));
        let fb = x.poset.subposet(&fixed_indices(&x.poset, &g, &[b]));
        prop_assert_eq!(fa.len(), fb.len());
        prop_assert_eq!(reduced_betti(&fa).unwrap(), reduced_betti(&fb).unwrap());
    }
}
