use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::group::subgroup::{prime_divisors, Subgroup};
use crate::group::table::{Elt, GroupTable};

/// Components and Fitting-type subgroups of a group.
#[derive(Clone, Debug)]
pub struct FittingData {
    pub components: Vec<Subgroup>,
    pub e: Subgroup,
    pub f: Subgroup,
    pub fstar: Subgroup,
}

#[derive(Clone, Debug)]
pub struct PInvariants {
    pub m_p: u32,
    pub omega1: Subgroup,
    pub center: Subgroup,
}

/// Budget on subnormal-descent steps when searching for components.
const COMPONENT_BUDGET: usize = 10_000;

impl GroupTable {
    /// Conjugacy classes of `ambient`, each sorted, ordered by least member.
    pub fn conjugacy_classes(&self, ambient: &Subgroup) -> Vec<Vec<Elt>> {
        let gens = self.generators_of(ambient);
        let mut assigned: HashMap<Elt, usize> = HashMap::new();
        let mut classes = Vec::new();
        for &x in ambient.members() {
            if assigned.contains_key(&x) {
                continue;
            }
            let mut cls = vec![x];
            assigned.insert(x, classes.len());
            let mut i = 0;
            while i < cls.len() {
                let y = cls[i];
                for &g in &gens {
                    let z = self.conj(y, g);
                    if let std::collections::hash_map::Entry::Vacant(e) = assigned.entry(z) {
                        e.insert(classes.len());
                        cls.push(z);
                    }
                }
                i += 1;
            }
            cls.sort_unstable();
            classes.push(cls);
        }
        classes
    }

    /// All normal subgroups of `ambient`, by order then members.
    ///
    /// Normal subgroups are exactly the closed unions of classes; every one is
    /// generated by some set of classes, so joining class closures exhausts them.
    pub fn normal_subgroups(&self, ambient: &Subgroup) -> Vec<Subgroup> {
        let classes = self.conjugacy_classes(ambient);
        let amb_gens = self.generators_of(ambient);
        let class_closures: Vec<Subgroup> =
            classes.iter().map(|c| self.normal_closure(c, &amb_gens)).collect();
        let mut found: BTreeSet<Subgroup> = BTreeSet::new();
        found.insert(Subgroup::trivial());
        let mut frontier = vec![Subgroup::trivial()];
        while let Some(n) = frontier.pop() {
            for cc in &class_closures {
                if cc.is_subgroup_of(&n) {
                    continue;
                }
                let j = self.join(&n, cc);
                if found.insert(j.clone()) {
                    frontier.push(j);
                }
            }
        }
        let mut v: Vec<Subgroup> = found.into_iter().collect();
        v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        v
    }

    pub fn is_perfect(&self, h: &Subgroup) -> bool {
        self.derived_subgroup(h) == *h
    }

    /// Perfect, and simple modulo its center.
    pub fn is_quasisimple(&self, h: &Subgroup) -> bool {
        if h.is_trivial() || !self.is_perfect(h) {
            return false;
        }
        let z = self.center(h);
        if z == *h {
            return false;
        }
        self.normal_subgroups(h).iter().all(|n| n == h || n.is_subgroup_of(&z))
    }

    /// Perfect core: the last term of the derived series.
    pub fn perfect_core(&self, h: &Subgroup) -> Subgroup {
        let mut cur = h.clone();
        loop {
            let d = self.derived_subgroup(&cur);
            if d == cur {
                return cur;
            }
            cur = d;
        }
    }

    /// Quasisimple subnormal subgroups of `ambient`.
    pub fn components(&self, ambient: &Subgroup) -> Result<Vec<Subgroup>> {
        let mut out = BTreeSet::new();
        let mut visited = BTreeSet::new();
        let mut work = 0usize;
        let core = self.perfect_core(ambient);
        self.components_rec(&core, &mut out, &mut visited, &mut work)?;
        let mut v: Vec<Subgroup> = out.into_iter().collect();
        v.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        Ok(v)
    }

    // Components of a perfect group D are D itself if quasisimple, otherwise
    // the components of its proper normal subgroups (each taken to its perfect core).
    fn components_rec(
        &self,
        d: &Subgroup,
        out: &mut BTreeSet<Subgroup>,
        visited: &mut BTreeSet<Subgroup>,
        work: &mut usize,
    ) -> Result<()> {
        if d.is_trivial() || !visited.insert(d.clone()) {
            return Ok(());
        }
        *work += 1;
        if *work > COMPONENT_BUDGET {
            return Err(Error::CapExceeded { cap: COMPONENT_BUDGET });
        }
        if self.is_quasisimple(d) {
            out.insert(d.clone());
            return Ok(());
        }
        for n in self.normal_subgroups(d) {
            if n != *d && !n.is_trivial() {
                let core = self.perfect_core(&n);
                self.components_rec(&core, out, visited, work)?;
            }
        }
        Ok(())
    }

    pub fn fitting_data(&self, ambient: &Subgroup) -> Result<FittingData> {
        let components = self.components(ambient)?;
        let mut e = Subgroup::trivial();
        for c in &components {
            e = self.join(&e, c);
        }
        let mut f = Subgroup::trivial();
        for p in prime_divisors(ambient.order()) {
            let op = self.core_p(ambient, p);
            f = self.join(&f, &op);
        }
        let fstar = self.join(&e, &f);
        Ok(FittingData { components, e, f, fstar })
    }

    /// Subgroup generated by the elements of order `p`.
    pub fn omega1(&self, ambient: &Subgroup, p: u32) -> Subgroup {
        self.closure(&self.elements_of_order(ambient, p))
    }

    pub fn p_invariants(&self, ambient: &Subgroup, p: u32) -> PInvariants {
        PInvariants {
            m_p: self.p_rank(ambient, p),
            omega1: self.omega1(ambient, p),
            center: self.center(ambient),
        }
    }

    /// `m_{p,q}`: largest q-rank of a normalizer of a nontrivial p-subgroup.
    pub fn m_local(&self, ambient: &Subgroup, p: u32, q: u32) -> u32 {
        if ambient.order() % q as usize != 0 {
            return 0;
        }
        let mut best = 0;
        let mut seen = BTreeSet::new();
        for pg in self.p_subgroups(ambient, p) {
            let n = self.normalizer(ambient, &pg);
            if seen.insert(n.clone()) {
                best = best.max(self.p_rank(&n, q));
            }
        }
        best
    }

    /// Largest normal subgroup of order prime to `p`.
    pub fn core_p_prime(&self, ambient: &Subgroup, p: u32) -> Subgroup {
        self.normal_subgroups(ambient)
            .into_iter()
            .filter(|n| n.order() % p as usize != 0)
            .max_by_key(|n| n.order())
            .unwrap_or_else(Subgroup::trivial)
    }
}
