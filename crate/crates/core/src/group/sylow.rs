use std::collections::{BTreeSet, HashSet};

use crate::group::subgroup::{p_part, Subgroup};
use crate::group::table::{Elt, GroupTable};

impl GroupTable {
    /// A Sylow p-subgroup of `ambient`, grown one p-element at a time inside normalizers.
    pub fn sylow(&self, ambient: &Subgroup, p: u32) -> Subgroup {
        let target = p_part(ambient.order(), p);
        let mut pg = Subgroup::trivial();
        while pg.order() < target {
            let n = self.normalizer(ambient, &pg);
            let x = n
                .members()
                .iter()
                .copied()
                .find(|&x| !pg.contains(x) && self.is_p_element(x, p))
                .expect("a non-Sylow p-subgroup has a p-element in its normalizer outside it");
            let mut gens = self.generators_of(&pg);
            gens.push(x);
            pg = self.closure(&gens);
        }
        pg
    }

    /// All Sylow p-subgroups of `ambient`, sorted canonically.
    pub fn all_sylow(&self, ambient: &Subgroup, p: u32) -> Vec<Subgroup> {
        let s = self.sylow(ambient, p);
        self.conjugacy_orbit(ambient, &s)
    }

    /// Conjugates of `h` under `ambient`, sorted and deduplicated.
    pub fn conjugacy_orbit(&self, ambient: &Subgroup, h: &Subgroup) -> Vec<Subgroup> {
        let mut set = BTreeSet::new();
        set.insert(h.clone());
        let gens = self.generators_of(ambient);
        let mut frontier = vec![h.clone()];
        while let Some(k) = frontier.pop() {
            for &g in &gens {
                let c = self.conjugate(&k, g);
                if set.insert(c.clone()) {
                    frontier.push(c);
                }
            }
        }
        set.into_iter().collect()
    }

    /// `O_p(ambient)`: intersection of all Sylow p-subgroups.
    pub fn core_p(&self, ambient: &Subgroup, p: u32) -> Subgroup {
        let sylows = self.all_sylow(ambient, p);
        let mut acc = sylows[0].clone();
        for s in &sylows[1..] {
            acc = acc.intersection(s);
            if acc.is_trivial() {
                break;
            }
        }
        acc
    }

    /// Elements of order exactly `p` in `ambient`.
    pub fn elements_of_order(&self, ambient: &Subgroup, p: u32) -> Vec<Elt> {
        ambient.members().iter().copied().filter(|&x| self.elt_order(x) == p).collect()
    }

    /// Every nontrivial p-subgroup of `ambient`, ordered by (order, members).
    ///
    /// Each p-subgroup has a normal subgroup of index p, so extending already-found
    /// subgroups by p-elements of their normalizers reaches all of them.
    pub fn p_subgroups(&self, ambient: &Subgroup, p: u32) -> Vec<Subgroup> {
        let pelts: Vec<Elt> =
            ambient.members().iter().copied().filter(|&x| x != 0 && self.is_p_element(x, p)).collect();
        let mut seen: HashSet<Subgroup> = HashSet::new();
        let mut layer: Vec<Subgroup> = Vec::new();
        for &x in &pelts {
            if self.elt_order(x) == p {
                let c = self.closure(&[x]);
                if seen.insert(c.clone()) {
                    layer.push(c);
                }
            }
        }
        let mut all = layer.clone();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for pg in &layer {
                let gens = self.generators_of(pg);
                for &x in &pelts {
                    if pg.contains(x) || !self.normalizes(x, pg, &gens) {
                        continue;
                    }
                    // x^p must land in pg for an index-p extension
                    if !pg.contains(self.pow(x, p)) {
                        continue;
                    }
                    let mut g2 = gens.clone();
                    g2.push(x);
                    let c = self.closure(&g2);
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        all
    }

    /// Every nontrivial elementary abelian p-subgroup of `ambient`, by rank then members.
    pub fn elementary_abelian_subgroups(&self, ambient: &Subgroup, p: u32) -> Vec<Subgroup> {
        let ords = self.elements_of_order(ambient, p);
        let mut seen: HashSet<Subgroup> = HashSet::new();
        let mut layer = Vec::new();
        for &x in &ords {
            let c = self.closure(&[x]);
            if seen.insert(c.clone()) {
                layer.push(c);
            }
        }
        let mut all = layer.clone();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for e in &layer {
                let gens = self.generators_of(e);
                for &y in &ords {
                    if e.contains(y) || !gens.iter().all(|&g| self.commute(g, y)) {
                        continue;
                    }
                    let mut g2 = gens.clone();
                    g2.push(y);
                    let c = self.closure(&g2);
                    if seen.insert(c.clone()) {
                        next.push(c);
                    }
                }
            }
            all.extend(next.iter().cloned());
            layer = next;
        }
        all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.cmp(b)));
        all
    }

    /// `m_p(ambient)`: the largest rank of an elementary abelian p-subgroup.
    pub fn p_rank(&self, ambient: &Subgroup, p: u32) -> u32 {
        // depth-first search is enough for the maximum; no need to keep every subgroup
        let ords = self.elements_of_order(ambient, p);
        let mut best = 0u32;
        let mut seen: HashSet<Subgroup> = HashSet::new();
        let mut stack: Vec<(Subgroup, u32)> = Vec::new();
        for &x in &ords {
            let c = self.closure(&[x]);
            if seen.insert(c.clone()) {
                stack.push((c, 1));
            }
        }
        while let Some((e, r)) = stack.pop() {
            best = best.max(r);
            let gens = self.generators_of(&e);
            for &y in &ords {
                if e.contains(y) || !gens.iter().all(|&g| self.commute(g, y)) {
                    continue;
                }
                let mut g2 = gens.clone();
                g2.push(y);
                let c = self.closure(&g2);
                if seen.insert(c.clone()) {
                    stack.push((c, r + 1));
                }
            }
        }
        best
    }
}
