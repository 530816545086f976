//! Brute-force oracles working on raw image arrays, independent of `GroupTable`.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet};

pub type Perm = Vec<u32>;

pub fn compose(a: &Perm, b: &Perm) -> Perm {
    a.iter().map(|&x| b[x as usize]).collect()
}

pub fn identity(n: usize) -> Perm {
    (0..n as u32).collect()
}

pub fn inverse(a: &Perm) -> Perm {
    let mut r = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        r[x as usize] = i as u32;
    }
    r
}

/// Permutation from 1-based cycles.
pub fn cyc(n: usize, cycles: &[&[u32]]) -> Perm {
    let mut p = identity(n);
    for c in cycles {
        for i in 0..c.len() {
            p[(c[i] - 1) as usize] = c[(i + 1) % c.len()] - 1;
        }
    }
    p
}

pub fn close(n: usize, gens: &[Perm]) -> BTreeSet<Perm> {
    let mut set = BTreeSet::new();
    set.insert(identity(n));
    let mut stack = vec![identity(n)];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = compose(&x, g);
            if set.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    set
}

pub fn order_of(p: &Perm) -> usize {
    let id = identity(p.len());
    let mut k = 1;
    let mut q = p.clone();
    while q != id {
        q = compose(&q, p);
        k += 1;
    }
    k
}

/// Every subgroup generated by at most two elements.
pub fn two_generated(n: usize, g: &[Perm]) -> BTreeSet<BTreeSet<Perm>> {
    let mut out = BTreeSet::new();
    let mut cyclic: HashSet<BTreeSet<Perm>> = HashSet::new();
    for a in g {
        cyclic.insert(close(n, &[a.clone()]));
    }
    let cyc: Vec<BTreeSet<Perm>> = cyclic.into_iter().collect();
    for (i, a) in cyc.iter().enumerate() {
        out.insert(a.clone());
        let ga = a.iter().find(|x| order_of(x) == a.len()).unwrap().clone();
        for b in &cyc[i..] {
            let gb = b.iter().find(|x| order_of(x) == b.len()).unwrap().clone();
            out.insert(close(n, &[ga.clone(), gb]));
        }
    }
    out
}

pub fn commutes(a: &Perm, b: &Perm) -> bool {
    compose(a, b) == compose(b, a)
}

pub fn is_normal(h: &BTreeSet<Perm>, g: &[Perm]) -> bool {
    g.iter().all(|x| {
        let xi = inverse(x);
        h.iter().all(|y| h.contains(&compose(&compose(&xi, y), x)))
    })
}

pub fn is_p_power(mut n: usize, p: usize) -> bool {
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

pub mod complex;
