use std::fmt;

use crate::group::table::{Elt, GroupTable};

/// A subgroup, identified by its sorted element ids in the parent table.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subgroup {
    members: Vec<Elt>,
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(order {})", self.members.len())
    }
}

impl Subgroup {
    /// Caller guarantees `members` is sorted, deduplicated and closed.
    pub(crate) fn from_sorted(members: Vec<Elt>) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        Subgroup { members }
    }

    pub fn trivial() -> Self {
        Subgroup { members: vec![0] }
    }

    pub fn whole(g: &GroupTable) -> Self {
        Subgroup { members: (0..g.order() as Elt).collect() }
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[Elt] {
        &self.members
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }

    #[inline]
    pub fn contains(&self, x: Elt) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.len() <= other.members.len() && self.members.iter().all(|&x| other.contains(x))
    }

    pub fn intersection(&self, other: &Subgroup) -> Subgroup {
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.members, &other.members);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        Subgroup { members: out }
    }

    /// Checks closure under multiplication and inversion exactly.
    pub fn is_closed(&self, g: &GroupTable) -> bool {
        self.contains(0)
            && self.members.iter().all(|&x| self.contains(g.inv(x)))
            && self
                .members
                .iter()
                .all(|&x| self.members.iter().all(|&y| self.contains(g.mul(x, y))))
    }

    /// Members rendered in cycle notation.
    pub fn describe(&self, g: &GroupTable) -> String {
        let gens = g.generators_of(self);
        if gens.is_empty() {
            return "1".to_string();
        }
        let parts: Vec<String> = gens.iter().map(|&x| g.fmt_elt(x)).collect();
        format!("<{}>", parts.join(", "))
    }
}

impl GroupTable {
    /// Subgroup generated by `gens`.
    pub fn closure(&self, gens: &[Elt]) -> Subgroup {
        let gens: Vec<Elt> = gens.iter().copied().filter(|&x| x != 0).collect();
        let mut seen = vec![false; self.order()];
        seen[0] = true;
        let mut list = vec![0];
        let mut i = 0;
        while i < list.len() {
            let x = list[i];
            for &s in &gens {
                let y = self.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    list.push(y);
                }
            }
            i += 1;
        }
        list.sort_unstable();
        Subgroup::from_sorted(list)
    }

    /// Subgroup generated by two subgroups.
    pub fn join(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut gens = self.generators_of(a);
        gens.extend(self.generators_of(b));
        self.closure(&gens)
    }

    /// Small generating set, chosen greedily in id order.
    pub fn generators_of(&self, h: &Subgroup) -> Vec<Elt> {
        let mut gens = Vec::new();
        let mut cur = Subgroup::trivial();
        for &x in h.members() {
            if !cur.contains(x) {
                gens.push(x);
                cur = self.closure(&gens);
                if cur.order() == h.order() {
                    break;
                }
            }
        }
        gens
    }

    /// `{g in ambient : g s = s g for all s in set}`.
    pub fn centralizer(&self, ambient: &Subgroup, set: &[Elt]) -> Subgroup {
        let members =
            ambient.members().iter().copied().filter(|&g| set.iter().all(|&s| self.commute(g, s))).collect();
        Subgroup::from_sorted(members)
    }

    pub fn centralizer_of(&self, ambient: &Subgroup, h: &Subgroup) -> Subgroup {
        self.centralizer(ambient, &self.generators_of(h))
    }

    pub fn center(&self, h: &Subgroup) -> Subgroup {
        self.centralizer_of(h, h)
    }

    pub fn normalizes(&self, g: Elt, h: &Subgroup, h_gens: &[Elt]) -> bool {
        h_gens.iter().all(|&x| h.contains(self.conj(x, g)))
    }

    /// `{g in ambient : h^g = h}`.
    pub fn normalizer(&self, ambient: &Subgroup, h: &Subgroup) -> Subgroup {
        let gens = self.generators_of(h);
        let members =
            ambient.members().iter().copied().filter(|&g| self.normalizes(g, h, &gens)).collect();
        Subgroup::from_sorted(members)
    }

    pub fn conjugate(&self, h: &Subgroup, g: Elt) -> Subgroup {
        let mut m: Vec<Elt> = h.members().iter().map(|&x| self.conj(x, g)).collect();
        m.sort_unstable();
        Subgroup::from_sorted(m)
    }

    pub fn is_normal_in(&self, h: &Subgroup, ambient: &Subgroup) -> bool {
        let gens = self.generators_of(ambient);
        let hg = self.generators_of(h);
        gens.iter().all(|&g| self.normalizes(g, h, &hg))
    }

    /// Product set `AB`, which is a subgroup when one factor normalizes the other.
    pub fn product(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut m: Vec<Elt> =
            a.members().iter().flat_map(|&x| b.members().iter().map(move |&y| (x, y))).map(|(x, y)| self.mul(x, y)).collect();
        m.sort_unstable();
        m.dedup();
        Subgroup::from_sorted(m)
    }

    /// Commutator subgroup `[a, b]`: normal closure in `<a, b>` of the generator commutators.
    pub fn commutator(&self, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let ga = self.generators_of(a);
        let gb = self.generators_of(b);
        let mut gens = Vec::new();
        for &x in &ga {
            for &y in &gb {
                let c = self.mul(self.mul(self.inv(x), self.inv(y)), self.mul(x, y));
                if c != 0 {
                    gens.push(c);
                }
            }
        }
        let mut amb_gens = ga;
        amb_gens.extend(gb);
        self.normal_closure(&gens, &amb_gens)
    }

    /// Smallest subgroup containing `gens` and normalized by `by`.
    pub fn normal_closure(&self, gens: &[Elt], by: &[Elt]) -> Subgroup {
        let mut h = self.closure(gens);
        loop {
            let hg = self.generators_of(&h);
            let mut extra = Vec::new();
            for &s in by {
                for &x in &hg {
                    let c = self.conj(x, s);
                    if !h.contains(c) {
                        extra.push(c);
                    }
                }
            }
            if extra.is_empty() {
                return h;
            }
            let mut all = hg;
            all.extend(extra);
            h = self.closure(&all);
        }
    }

    pub fn derived_subgroup(&self, h: &Subgroup) -> Subgroup {
        self.commutator(h, h)
    }

    pub fn is_abelian(&self, h: &Subgroup) -> bool {
        let gens = self.generators_of(h);
        gens.iter().all(|&x| gens.iter().all(|&y| self.commute(x, y)))
    }

    pub fn is_p_group(&self, h: &Subgroup, p: u32) -> bool {
        is_power_of(h.order(), p)
    }

    pub fn is_elementary_abelian(&self, h: &Subgroup, p: u32) -> bool {
        !h.is_trivial()
            && self.is_p_group(h, p)
            && h.members().iter().all(|&x| x == 0 || self.elt_order(x) == p)
            && self.is_abelian(h)
    }

    pub fn is_p_element(&self, x: Elt, p: u32) -> bool {
        is_power_of(self.elt_order(x) as usize, p)
    }
}

pub fn is_power_of(mut n: usize, p: u32) -> bool {
    let p = p as usize;
    if n == 0 {
        return false;
    }
    while n % p == 0 {
        n /= p;
    }
    n == 1
}

/// Largest power of `p` dividing `n`.
pub fn p_part(mut n: usize, p: u32) -> usize {
    let p = p as usize;
    let mut r = 1;
    while n > 0 && n % p == 0 {
        n /= p;
        r *= p;
    }
    r
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..n).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

pub fn prime_divisors(mut n: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u32);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n as u32);
    }
    out
}
