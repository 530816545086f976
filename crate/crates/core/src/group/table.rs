use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::spec::GroupSpec;

/// Element identifier inside a [`GroupTable`]; id 0 is the identity.
pub type Elt = u32;

pub const DEFAULT_CAP: usize = 20_000;

/// Largest order for which a full multiplication table is stored.
const TABLE_LIMIT: usize = 6_000;

/// Order cap, overridable with `QPLAB_CAP`.
pub fn default_cap() -> usize {
    std::env::var("QPLAB_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    pub images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation { images: (0..degree as u32).collect() }
    }

    /// `self` first, then `other` (points are acted on from the right).
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// Nontrivial cycles, each starting at its least point.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut c = vec![s];
            seen[s] = true;
            let mut x = self.images[s] as usize;
            while x != s {
                seen[x] = true;
                c.push(x);
                x = self.images[x] as usize;
            }
            if c.len() > 1 {
                out.push(c);
            }
        }
        out
    }
}

impl fmt::Display for Permutation {
    /// 1-based cycle notation; the identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs = self.cycles();
        if cs.is_empty() {
            return write!(f, "()");
        }
        for c in cs {
            let pts: Vec<String> = c.iter().map(|p| (p + 1).to_string()).collect();
            write!(f, "({})", pts.join(" "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A fully enumerated permutation group.
pub struct GroupTable {
    pub name: String,
    degree: usize,
    elements: Vec<Permutation>,
    index: HashMap<Vec<u32>, Elt>,
    table: Option<Vec<u16>>,
    inv: Vec<Elt>,
    orders: Vec<u32>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GroupTable({}, degree {}, order {})", self.name, self.degree, self.order())
    }
}

impl GroupTable {
    pub fn generate(spec: &GroupSpec) -> Result<GroupTable> {
        Self::generate_with_cap(spec, default_cap())
    }

    pub fn generate_with_cap(spec: &GroupSpec, cap: usize) -> Result<GroupTable> {
        spec.validate()?;
        let gens: Vec<Permutation> =
            spec.images().into_iter().map(|images| Permutation { images }).collect();
        Self::from_generators(&spec.name, spec.degree, &gens, cap)
    }

    pub fn from_generators(
        name: &str,
        degree: usize,
        gens: &[Permutation],
        cap: usize,
    ) -> Result<GroupTable> {
        for g in gens {
            if g.images.len() != degree {
                return Err(Error::InvalidSpec("generator degree differs from group degree".into()));
            }
        }
        let id = Permutation::identity(degree);
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        seen.insert(id.images.clone(), ());
        let mut list = vec![id];
        let mut i = 0;
        while i < list.len() {
            let x = list[i].clone();
            for g in gens {
                let y = x.then(g);
                if !seen.contains_key(&y.images) {
                    if list.len() >= cap {
                        return Err(Error::CapExceeded { cap });
                    }
                    seen.insert(y.images.clone(), ());
                    list.push(y);
                }
            }
            i += 1;
        }
        // identity is the lexicographically least image array, so it lands at id 0
        list.sort();
        Ok(Self::from_sorted(name, degree, list))
    }

    fn from_sorted(name: &str, degree: usize, elements: Vec<Permutation>) -> GroupTable {
        let n = elements.len();
        let index: HashMap<Vec<u32>, Elt> =
            elements.iter().enumerate().map(|(i, p)| (p.images.clone(), i as Elt)).collect();
        let inv: Vec<Elt> = elements.iter().map(|p| index[&p.inverse().images]).collect();
        let table = if n <= TABLE_LIMIT {
            let mut t = vec![0u16; n * n];
            for (a, pa) in elements.iter().enumerate() {
                for (b, pb) in elements.iter().enumerate() {
                    t[a * n + b] = index[&pa.then(pb).images] as u16;
                }
            }
            Some(t)
        } else {
            None
        };
        let mut g = GroupTable {
            name: name.to_string(),
            degree,
            elements,
            index,
            table,
            inv,
            orders: Vec::new(),
        };
        g.orders = (0..n as Elt).map(|x| g.compute_order(x)).collect();
        g
    }

    fn compute_order(&self, x: Elt) -> u32 {
        let mut k = 1;
        let mut y = x;
        while y != 0 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element(&self, x: Elt) -> &Permutation {
        &self.elements[x as usize]
    }

    pub fn elements(&self) -> &[Permutation] {
        &self.elements
    }

    pub fn id_of(&self, p: &Permutation) -> Option<Elt> {
        self.index.get(&p.images).copied()
    }

    /// Element id of a permutation given by 0-based cycles.
    pub fn id_of_cycles(&self, cycles: &[Vec<usize>]) -> Option<Elt> {
        let mut img: Vec<u32> = (0..self.degree as u32).collect();
        for c in cycles {
            for i in 0..c.len() {
                if c[i] >= self.degree {
                    return None;
                }
                img[c[i]] = c[(i + 1) % c.len()] as u32;
            }
        }
        self.index.get(&img).copied()
    }

    #[inline]
    pub fn mul(&self, a: Elt, b: Elt) -> Elt {
        match &self.table {
            Some(t) => t[a as usize * self.elements.len() + b as usize] as Elt,
            None => self.index[&self.elements[a as usize].then(&self.elements[b as usize]).images],
        }
    }

    #[inline]
    pub fn inv(&self, a: Elt) -> Elt {
        self.inv[a as usize]
    }

    /// `a^g = g^-1 a g`.
    #[inline]
    pub fn conj(&self, a: Elt, g: Elt) -> Elt {
        self.mul(self.mul(self.inv(g), a), g)
    }

    #[inline]
    pub fn commute(&self, a: Elt, b: Elt) -> bool {
        self.mul(a, b) == self.mul(b, a)
    }

    #[inline]
    pub fn elt_order(&self, a: Elt) -> u32 {
        self.orders[a as usize]
    }

    pub fn pow(&self, a: Elt, k: u32) -> Elt {
        let mut r = 0;
        for _ in 0..k {
            r = self.mul(r, a);
        }
        r
    }

    pub fn fmt_elt(&self, a: Elt) -> String {
        self.element(a).to_string()
    }
}
