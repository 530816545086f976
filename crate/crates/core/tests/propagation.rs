mod common;

use std::collections::BTreeMap;

use common::complex::{random_order, to_poset};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use qplab::corpus;
use qplab::group::{GroupSpec, GroupTable, Subgroup};
use qplab::homology::{q, ChainComplex, FormalChainSum};
use qplab::poset::{Chain, Poset};
use qplab::propagation::*;
use qplab::psubgroup::{build_p_poset, p_poset, PKind};
use qplab::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn alt(g: &GroupTable) -> Subgroup {
    g.derived_subgroup(&Subgroup::whole(g))
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn labelled(n: usize, prefix: &str) -> Vec<String> {
    (0..n).map(|i| format!("{prefix}{i}")).collect()
}

fn chain_poset(n: usize, prefix: &str) -> Poset {
    let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Poset::build(labelled(n, prefix), &pairs).unwrap()
}

// ---------------------------------------------------------------------------
// brute-force shuffle oracle

fn permutation_parity(perm: &[usize]) -> bool {
    let mut seen = vec![false; perm.len()];
    let mut odd = false;
    for i in 0..perm.len() {
        let mut len = 0;
        let mut j = i;
        while !seen[j] {
            seen[j] = true;
            j = perm[j];
            len += 1;
        }
        if len > 0 && len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every permutation of the concatenation `a ++ b` that keeps both blocks in
/// order, with its parity, realized through running maxima in the pre-join.
fn shuffle_oracle(x: &Poset, y: &Poset, a: &[u32], b: &[u32]) -> BTreeMap<Chain, BigRational> {
    let pj = x.pre_join(y);
    let k = a.len();
    let mut out: BTreeMap<Chain, BigRational> = BTreeMap::new();
    for perm in permutations(k + b.len()) {
        // perm[slot] = which original item sits at that slot
        let lefts: Vec<usize> = perm.iter().copied().filter(|&i| i < k).collect();
        let rights: Vec<usize> = perm.iter().copied().filter(|&i| i >= k).collect();
        if lefts.windows(2).any(|w| w[0] > w[1]) || rights.windows(2).any(|w| w[0] > w[1]) {
            continue;
        }
        let (mut cx, mut cy) = (None, None);
        let chain: Chain = perm
            .iter()
            .map(|&i| {
                if i < k {
                    cx = Some(a[i] as usize);
                } else {
                    cy = Some(b[i - k] as usize);
                }
                pj.index_of(cx, cy).unwrap() as u32
            })
            .collect();
        assert!(pj.poset.is_chain(&chain));
        let sign = if permutation_parity(&perm) { -BigRational::one() } else { BigRational::one() };
        *out.entry(chain).or_insert_with(BigRational::zero) += sign;
    }
    out.retain(|_, v| !v.is_zero());
    out
}

#[test]
fn shuffle_matches_permutation_oracle() {
    for (m, n) in [(0, 0), (1, 0), (0, 2), (1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 2)] {
        let x = chain_poset(m, "x");
        let y = chain_poset(n, "y");
        let a: Chain = (0..m as u32).collect();
        let b: Chain = (0..n as u32).collect();
        let s = shuffle_product(&x.pre_join(&y), &a, &b);
        assert_eq!(s.terms, shuffle_oracle(&x, &y, &a, &b), "m={m} n={n}");
        assert_eq!(s.terms.len(), binomial(m + n, m));
        assert_eq!(s.degree, (m + n) as i32 - 1);
    }
}

#[test]
fn shuffle_worked_example() {
    let x = chain_poset(2, "x");
    let y = chain_poset(2, "y");
    let pj = x.pre_join(&y);
    let s = shuffle_product(&pj, &[0, 1], &[0, 1]);
    // the order (y1, y2, x1, x2) passes through (1,y1) < (1,y2) < (x1,y2) < (x2,y2)
    let c = vec![
        pj.index_of(None, Some(0)).unwrap() as u32,
        pj.index_of(None, Some(1)).unwrap() as u32,
        pj.index_of(Some(0), Some(1)).unwrap() as u32,
        pj.index_of(Some(1), Some(1)).unwrap() as u32,
    ];
    assert_eq!(s.coefficient(&c), q(1));
    // the identity shuffle is a_X * b
    let star = star_chain(&pj, &[0, 1], &[0, 1]);
    assert_eq!(s.coefficient(&star), q(1));
    assert_eq!(
        star,
        vec![
            pj.index_of(Some(0), None).unwrap() as u32,
            pj.index_of(Some(1), None).unwrap() as u32,
            pj.index_of(Some(1), Some(0)).unwrap() as u32,
            pj.index_of(Some(1), Some(1)).unwrap() as u32,
        ]
    );
    // an empty right factor leaves the chain unchanged
    let t = shuffle_product(&pj, &[0, 1], &[]);
    assert_eq!(t.terms.len(), 1);
    assert_eq!(t.coefficient(&[0, 1]), q(1));
}

#[test]
fn point_times_point_boundary_sign() {
    // ∂(x × y) = (1,y) − (x,1): forces the sign (−1)^{|a|} on a × ∂b
    let x = chain_poset(1, "x");
    let y = chain_poset(1, "y");
    let inst = zleft_check("pt", x.clone(), y.clone(), x.pre_join(&y).poset, vec![0, 1, 2], vec![]).unwrap();
    let t = inst.t_pair(&[0], &[0]).unwrap();
    let bd = t.boundary();
    assert_eq!(bd.coefficient(&[1]), q(1));
    assert_eq!(bd.coefficient(&[0]), q(-1));
    assert_eq!(bd, inst.t_of_tensor_boundary(&[0], &[0]).unwrap());
}

// ---------------------------------------------------------------------------
// synthetic (Zleft) instances

/// `W = (X ⊔join Y) ∪ Z` with every `z` below each pair having `y ≠ 1` and below
/// a random selection of the `(x, 1)`.
fn synthetic(rng: &mut ChaCha8Rng, nx: usize, ny: usize, nz: usize) -> ZleftInstance {
    let x = to_poset(&random_order(rng, nx, 0.4));
    let y = to_poset(&random_order(rng, ny, 0.4));
    let z = to_poset(&random_order(rng, nz, 0.4));
    let pj = x.pre_join(&y);
    let np = pj.poset.len();
    let mut labels: Vec<String> = (0..np).map(|i| format!("p{i}")).collect();
    labels.extend((0..nz).map(|i| format!("z{i}")));
    let mut pairs: Vec<(usize, usize)> = pj.poset.relation_pairs();
    pairs.extend(z.relation_pairs().into_iter().map(|(a, b)| (np + a, np + b)));
    for zi in 0..nz {
        for (u, c) in pj.coords.iter().enumerate() {
            if c.1.is_some() || rng.gen_bool(0.4) {
                pairs.push((np + zi, u));
            }
        }
    }
    let w = Poset::build(labels, &pairs).unwrap();
    zleft_check("synthetic", x, y, w, (0..np).collect(), (np..np + nz).collect()).unwrap()
}

fn random_chain(rng: &mut ChaCha8Rng, chains: &[Chain]) -> Chain {
    chains.choose(rng).unwrap().clone()
}

/// Chains of `X ∪ Z` (in `W` indices) and of `Y`.
fn chain_pools(inst: &ZleftInstance) -> (Vec<Chain>, Vec<Chain>) {
    let xz = inst.xz_complex().unwrap();
    let a: Vec<Chain> = (0..=xz.dim()).flat_map(|k| xz.chains(k).to_vec()).collect();
    let b: Vec<Chain> = inst.y.all_chains().into_iter().flatten().collect();
    (a, b)
}

fn check_chain_map(inst: &ZleftInstance, rng: &mut ChaCha8Rng, trials: usize) {
    let (pool_a, pool_b) = chain_pools(inst);
    if pool_a.is_empty() {
        return;
    }
    for _ in 0..trials {
        let a = random_chain(rng, &pool_a);
        let b = random_chain(rng, &pool_b);
        let t = inst.t_pair(&a, &b).unwrap();
        assert_eq!(t.degree, a.len() as i32 + b.len() as i32 - 1);
        assert_eq!(t.boundary(), inst.t_of_tensor_boundary(&a, &b).unwrap(), "{}: a={a:?} b={b:?}", inst.name);
        let star = inst.star(&a, &b).unwrap();
        assert!(inst.w.is_chain(&star));
        let init = initial_part(&t, &a, &inst.w);
        let expected = FormalChainSum::from_chain(star);
        // the a-initial part of T(a, b) is exactly a_Z ∪ (a_X * b)
        if !a.iter().any(|&i| inst.role(i as usize) == Role::Other) {
            assert_eq!(init, expected, "{}: a={a:?} b={b:?}", inst.name);
        }
    }
}

#[test]
fn chain_map_on_synthetic_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let (nx, ny, nz) = (rng.gen_range(1..5), rng.gen_range(0..4), rng.gen_range(0..4));
        let inst = synthetic(&mut rng, nx, ny, nz);
        check_chain_map(&inst, &mut rng, 10);
    }
}

#[test]
fn chain_map_on_group_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = corpus::load("a4xa4");
    let (h, k) = a4_factors(&g);
    let setup = classical_instance(&g, &h, &k, 3).unwrap();
    check_chain_map(&setup.instance, &mut rng, 200);

    let s = corpus::load("s5xs3");
    let l = s.components(&Subgroup::whole(&s)).unwrap().remove(0);
    let b = transposition_outer(&s);
    let setup = component_instance(&s, &l, &b, 2).unwrap();
    assert_eq!(setup.outposet.len(), 10);
    assert_eq!(setup.centralizer.order(), 6);
    check_chain_map(&setup.instance, &mut rng, 200);
}

fn a4_factors(g: &GroupTable) -> (Subgroup, Subgroup) {
    let left: Vec<u32> = [vec![vec![0, 1, 2]], vec![vec![1, 2, 3]]].iter().map(|c| g.id_of_cycles(c).unwrap()).collect();
    let right: Vec<u32> = [vec![vec![4, 5, 6]], vec![vec![5, 6, 7]]].iter().map(|c| g.id_of_cycles(c).unwrap()).collect();
    (g.closure(&left), g.closure(&right))
}

fn transposition_outer(g: &GroupTable) -> Subgroup {
    g.closure(&[g.id_of_cycles(&[vec![0, 1]]).unwrap()])
}

fn pgammal_outer(g: &GroupTable, l: &Subgroup) -> Subgroup {
    // a field automorphism of order 3
    let outers = qplab::psubgroup::outer_and_image_posets(g, l, 3).unwrap().outer.subgroups;
    outers.into_iter().find(|b| b.order() == 3).unwrap()
}

#[test]
fn pgammal28_instance_satisfies_zleft() {
    let g = corpus::load("pgammal28");
    let l = alt(&g);
    let b = pgammal_outer(&g, &l);
    let c = g.centralizer_of(&l, &b);
    assert_eq!(c.order(), 6);
    // C_L(B) ≅ S3 has a nontrivial 3-core
    assert_eq!(g.core_p(&c, 3).order(), 3);
    let setup = component_instance(&g, &l, &b, 3).unwrap();
    assert!(setup.centralizer.is_trivial());
    assert!(setup.instance.y.is_empty());
    // X = B_3(L): the 28 cyclic Sylow 3-subgroups of order 9 (order-3 subgroups are not radical)
    assert_eq!(setup.instance.x.len(), 28);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    check_chain_map(&setup.instance, &mut rng, 50);
}

#[test]
fn zleft_violations_are_reported() {
    let x = chain_poset(1, "x");
    let y = chain_poset(1, "y");
    let pj = x.pre_join(&y);
    // z above (x,1)
    let mut labels = pj.poset.labels().to_vec();
    labels.push("z".into());
    let mut pairs = pj.poset.relation_pairs();
    pairs.push((0, 3));
    pairs.push((3, 2));
    let w = Poset::build(labels.clone(), &pairs).unwrap();
    let err = zleft_check("bad", x.clone(), y.clone(), w, vec![0, 1, 2], vec![3]).unwrap_err();
    assert_eq!(err.condition, ZleftCondition::ComparableBelow);
    // z not below (1,y)
    let mut pairs = pj.poset.relation_pairs();
    pairs.push((3, 2));
    let w = Poset::build(labels.clone(), &pairs).unwrap();
    let err = zleft_check("bad", x.clone(), y.clone(), w, vec![0, 1, 2], vec![3]).unwrap_err();
    assert_eq!(err.condition, ZleftCondition::BelowPairs);
    assert!(err.to_string().contains("(iii)"));
    // Z overlapping the pre-join
    let err = zleft_check("bad", x.clone(), y.clone(), pj.poset.clone(), vec![0, 1, 2], vec![2]).unwrap_err();
    assert_eq!(err.condition, ZleftCondition::Containment);
    // order not induced: drop (x,1) < (x,y)
    let w = Poset::build(pj.poset.labels().to_vec(), &[(1, 2)]).unwrap();
    let err = zleft_check("bad", x, y, w, vec![0, 1, 2], vec![]).unwrap_err();
    assert_eq!(err.condition, ZleftCondition::Containment);
}

// ---------------------------------------------------------------------------
// full chains

#[test]
fn full_chain_initial_part_commutes_with_boundary() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut tested = 0;
    while tested < 100 {
        let n = rng.gen_range(3..8);
        let x = to_poset(&random_order(&mut rng, n, 0.45));
        let m = ChainComplex::of_poset(&x).unwrap();
        let all: Vec<Chain> = (0..=m.dim()).flat_map(|k| m.chains(k).to_vec()).collect();
        let c = random_chain(&mut rng, &all);
        if !is_full_in(&m, &x, &c) {
            continue;
        }
        let d = rng.gen_range(c.len() as i32 - 1..=m.dim().max(c.len() as i32 - 1));
        let mut gamma = FormalChainSum::zero(d);
        for ch in m.chains(d) {
            if rng.gen_bool(0.6) {
                gamma.add_term(ch.clone(), q(rng.gen_range(-3..=3)));
            }
        }
        let lhs = initial_part(&gamma.boundary(), &c, &x);
        let rhs = initial_part(&initial_part(&gamma, &c, &x).boundary(), &c, &x);
        assert_eq!(lhs, rhs, "c={c:?}");
        tested += 1;
    }
}

#[test]
fn link_and_fullness() {
    let x = chain_poset(3, "c");
    let m = ChainComplex::of_poset(&x).unwrap();
    assert!(is_full_in(&m, &x, &[0, 1]));
    assert!(!is_full_in(&m, &x, &[1]));
    assert_eq!(complex_link(&m, &x, &[1]), vec![0, 2]);
}

// ---------------------------------------------------------------------------
// propagation checks

#[test]
fn cycle_times_cycle_is_a_cycle() {
    let g = corpus::load("a4xa4");
    let (h, k) = a4_factors(&g);
    let setup = classical_instance(&g, &h, &k, 3).unwrap();
    let inst = &setup.instance;
    let xz = inst.xz_complex().unwrap();
    let ycx = ChainComplex::of_poset(&inst.y).unwrap();
    let alpha = xz.witness_cycle(0).unwrap();
    let beta = ycx.witness_cycle(0).unwrap();
    let t = inst.t_star(&alpha, &beta).unwrap();
    assert_eq!(t.degree, 1);
    assert!(t.is_cycle());
    let m = ChainComplex::of_poset(&inst.w).unwrap();
    assert!(!m.is_boundary(&t).unwrap());
}

#[test]
fn propagation_certifies_a4_squared() {
    let g = corpus::load("a4xa4");
    let (h, k) = a4_factors(&g);
    let setup = classical_instance(&g, &h, &k, 3).unwrap();
    let inst = &setup.instance;
    let m = ChainComplex::of_poset(&inst.w).unwrap();
    let xz = inst.xz_complex().unwrap();
    let alpha = xz.witness_cycle(0).unwrap();
    let a = alpha.terms.keys().next().unwrap().clone();
    let beta = ChainComplex::of_poset(&inst.y).unwrap().witness_cycle(0).unwrap();
    let r = propagate_check(inst, &m, &alpha, &a, &beta).unwrap();
    assert!(r.certified(), "{}", r.to_json(&inst.w));
    assert_eq!(r.product.degree, 1);

    // β a boundary: hypothesis 3 fails and nothing is claimed
    let ycx = ChainComplex::of_poset(&inst.y).unwrap();
    let bd = FormalChainSum::from_chain(vec![0]).boundary();
    assert!(ycx.is_boundary(&bd).unwrap());
    let r = propagate_check(inst, &m, &alpha, &a, &bd).unwrap();
    assert!(r.failed("3"));
    assert!(!r.certified());

    // a outside α
    let r = propagate_check(inst, &m, &alpha, &[99], &beta).unwrap();
    assert!(r.failed("2a"));
}

#[test]
fn link_condition_fails_when_the_chain_is_not_full() {
    // X and Y are two-point antichains; one Z element lies below x0 and below every pair
    let x = Poset::build(labelled(2, "x"), &[]).unwrap();
    let y = Poset::build(labelled(2, "y"), &[]).unwrap();
    let pj = x.pre_join(&y);
    let np = pj.poset.len();
    let mut labels = pj.poset.labels().to_vec();
    labels.push("z".into());
    let mut pairs = pj.poset.relation_pairs();
    for (u, c) in pj.coords.iter().enumerate() {
        if c.1.is_some() || c.0 == Some(0) {
            pairs.push((np, u));
        }
    }
    let w = Poset::build(labels, &pairs).unwrap();
    let inst = zleft_check("z-below-x0", x, y, w, (0..np).collect(), vec![np]).unwrap();
    let m = ChainComplex::of_poset(&inst.w).unwrap();
    let x0 = inst.x_vertex(0) as u32;
    let x1 = inst.x_vertex(1) as u32;
    let mut alpha = FormalChainSum::from_chain(vec![x0]);
    alpha.add_term(vec![x1], q(-1));
    let beta = ChainComplex::of_poset(&inst.y).unwrap().witness_cycle(0).unwrap();
    // z lies below x0, so the link of (x0) contains z: not of the form (x0, y)
    let r = propagate_check(&inst, &m, &alpha, &[x0], &beta).unwrap();
    assert!(r.failed("2b"));
    assert!(r.hypotheses.iter().find(|c| c.name == "2b").unwrap().detail.contains('z'));
    // (x1) has no Z below it and its link consists of pairs (x1, y)
    let r = propagate_check(&inst, &m, &alpha, &[x1], &beta).unwrap();
    assert!(r.certified(), "{}", r.to_json(&inst.w));
}

#[test]
fn intermediate_complex_must_contain_the_core() {
    let g = corpus::load("a4xa4");
    let (h, k) = a4_factors(&g);
    let setup = classical_instance(&g, &h, &k, 3).unwrap();
    let inst = &setup.instance;
    let m = ChainComplex::of_poset(&inst.w).unwrap();
    let too_small = m.filter(|c| c.len() < 2);
    let alpha = inst.xz_complex().unwrap().witness_cycle(0).unwrap();
    let a = alpha.terms.keys().next().unwrap().clone();
    let beta = ChainComplex::of_poset(&inst.y).unwrap().witness_cycle(0).unwrap();
    assert!(matches!(propagate_check(inst, &too_small, &alpha, &a, &beta), Err(Error::PreconditionFailed(_))));
}

#[test]
fn component_propagation_on_s5xs3() {
    let g = corpus::load("s5xs3");
    let l = g.components(&Subgroup::whole(&g)).unwrap().remove(0);
    // X ∪ Z is the incidence graph of ten transpositions and five four-groups: β̃_1 = 16
    let r = component_propagation(&g, &l, 2, 2).unwrap();
    assert_eq!(r.xz_betti.get(1), 16);
    assert_eq!(r.y_betti.get(0), 2);
    // a 1-cycle of X ∪ Z times a point difference of A_2(S3) gives a 2-class of W
    assert!(r.certified(), "{}", r.to_json());
    let p = r.propagation.as_ref().unwrap();
    assert_eq!((p.degree_alpha, p.degree_beta, p.product.degree), (1, 0, 2));
    // the same degree asked one lower has no class to start from
    let r = component_propagation(&g, &l, 2, 1).unwrap();
    assert!(!r.certified());
}

#[test]
fn pgammal28_pipeline_reports_missing_class() {
    // X ∪ Z is W itself here and has no 1-dimensional homology, so nothing propagates;
    // the centralizer bound nevertheless holds
    let g = corpus::load("pgammal28");
    let l = alt(&g);
    let r = component_propagation(&g, &l, 3, 1).unwrap();
    assert!(!r.certified());
    assert_eq!(r.xz_betti.get(1), 0);
    assert!(r.note.contains("H̃_1"), "{}", r.note);
    assert_eq!(r.bound.l_p_prime, 56);
    assert_eq!(r.bound.centralizer_p_prime, 2);
    assert_eq!(r.bound.ratio, BigRational::new(14.into(), 1.into()));
    assert!(r.bound.holds());
    assert_eq!(r.direct_betti.get(1), 0);
}

// ---------------------------------------------------------------------------
// classical lemmas

#[test]
fn classical_lemmas_on_a4_squared() {
    let g = corpus::load("a4xa4");
    let (h, k) = a4_factors(&g);
    for kind in [ClassicalKind::AS027, ClassicalKind::KP314] {
        let r = classical_check(kind, &g, &h, &k, 3, None, &ClassicalData::default()).unwrap();
        assert!(r.hypotheses_hold(), "{}", r.to_json());
        assert!(r.conclusion_holds());
        assert_eq!(r.target_betti.get(1), 9);
        assert_eq!(kind.name().parse::<ClassicalKind>().unwrap(), kind);
    }
    let r = classical_check(ClassicalKind::AS027, &g, &h, &k, 3, None, &ClassicalData::default()).unwrap();
    assert!(r.propagation.as_ref().unwrap().certified());
}

#[test]
fn classical_lemmas_detect_acyclic_centralizer() {
    let spec = GroupSpec::new("a4xs3", 7, vec![vec![vec![0, 1, 2]], vec![vec![1, 2, 3]], vec![vec![4, 5]], vec![vec![4, 5, 6]]]).unwrap();
    let g = GroupTable::generate(&spec).unwrap();
    assert_eq!(g.order(), 72);
    let h = g.closure(&[g.id_of_cycles(&[vec![0, 1, 2]]).unwrap(), g.id_of_cycles(&[vec![1, 2, 3]]).unwrap()]);
    let k = g.closure(&[g.id_of_cycles(&[vec![4, 5]]).unwrap(), g.id_of_cycles(&[vec![4, 5, 6]]).unwrap()]);
    let r = classical_check(ClassicalKind::AS027, &g, &h, &k, 3, None, &ClassicalData::default()).unwrap();
    assert!(r.failed("(ii)"), "{}", r.to_json());
    let r = classical_check(ClassicalKind::KP314, &g, &h, &k, 3, None, &ClassicalData::default()).unwrap();
    assert!(r.failed("(v)"), "{}", r.to_json());
}

#[test]
fn kp314_requires_the_neighbourhood_of_k() {
    let g = corpus::load("a4xa4");
    let (h, k) = a4_factors(&g);
    let all = p_poset(&g, 3, PKind::Ap).unwrap().subgroups;
    let dropped = all.iter().position(|e| !e.intersection(&k).is_trivial()).unwrap();
    let xs: Vec<Subgroup> = all.iter().enumerate().filter(|&(i, _)| i != dropped).map(|(_, s)| s.clone()).collect();
    let r = classical_check(ClassicalKind::KP314, &g, &h, &k, 3, Some(&xs), &ClassicalData::default()).unwrap();
    assert!(r.failed("(ii)"));
    assert!("bogus".parse::<ClassicalKind>().is_err());
}

// ---------------------------------------------------------------------------
// Quillen dimension

#[test]
fn quillen_dimension_examples() {
    let a4 = corpus::load("a4");
    let r = qd_check(&a4, 3).unwrap();
    assert_eq!((r.rank, r.top_betti, r.verdict), (1, Some(3), QdVerdict::Pass));
    // p-groups: O_p(G) = G
    for (name, p) in [("d8", 2), ("c4", 2), ("c3", 3)] {
        let r = qd_check(&corpus::load(name), p).unwrap();
        assert_eq!(r.verdict, QdVerdict::VacuousPass, "{name}");
    }
    // solvable groups with trivial p-core
    for (name, p) in [("s3", 2), ("s4", 3), ("a4", 3), ("s3xs3", 2)] {
        let g = corpus::load(name);
        let r = qd_check(&g, p).unwrap();
        assert!(r.passed(), "{name} p={p}: {}", r.to_json());
    }
    // the 2-core of S4 is the normal four-group
    assert_eq!(qd_check(&corpus::load("s4"), 2).unwrap().op_order, 4);
    // A5 at 2: each of the fifteen involutions lies in exactly one of the five four-groups,
    // so A_2(A5) is five contractible stars and the top homology vanishes
    let a5 = corpus::load("a5");
    let r = qd_check(&a5, 2).unwrap();
    assert_eq!(r.rank, 2);
    let x = build_p_poset(&a5, &Subgroup::whole(&a5), 2, PKind::Ap).unwrap();
    assert_eq!(x.poset.len(), 20);
    assert_eq!(r.top_betti, Some(qplab::homology::reduced_betti(&x.poset).unwrap().get(1)));
    assert_eq!(r.top_betti, Some(0));
    assert_eq!(r.verdict, QdVerdict::Fail);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shuffle_oracle_on_random_chains(seed in any::<u64>(), nx in 1usize..6, ny in 1usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = to_poset(&random_order(&mut rng, nx, 0.5));
        let y = to_poset(&random_order(&mut rng, ny, 0.5));
        let ca: Vec<Chain> = x.all_chains().into_iter().flatten().collect();
        let cb: Vec<Chain> = y.all_chains().into_iter().flatten().collect();
        let a = random_chain(&mut rng, &ca);
        let b = random_chain(&mut rng, &cb);
        let s = shuffle_product(&x.pre_join(&y), &a, &b);
        prop_assert_eq!(s.terms.clone(), shuffle_oracle(&x, &y, &a, &b));
        prop_assert_eq!(s.terms.len(), binomial(a.len() + b.len(), a.len()));
    }

    #[test]
    fn synthetic_chain_map(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (nx, ny, nz) = (rng.gen_range(1..5), rng.gen_range(0..4), rng.gen_range(0..4));
        let inst = synthetic(&mut rng, nx, ny, nz);
        check_chain_map(&inst, &mut rng, 5);
    }
}
