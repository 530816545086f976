//! Brute-force order-complex oracles on boolean relation matrices: chains by
//! subset enumeration, ranks by dense rational Gaussian elimination.

use num_rational::BigRational;
use num_traits::{One, Zero};
use qplab::poset::Poset;
use rand::Rng;

pub type Rel = Vec<Vec<bool>>;

/// Random strict order on `n` points: random forward edges, then transitive closure.
pub fn random_order<R: Rng>(rng: &mut R, n: usize, density: f64) -> Rel {
    let mut lt = vec![vec![false; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                lt[i][j] = true;
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if lt[i][k] && lt[k][j] {
                    lt[i][j] = true;
                }
            }
        }
    }
    lt
}

pub fn to_poset(lt: &Rel) -> Poset {
    let n = lt.len();
    let labels = (0..n).map(|i| format!("v{i}")).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if lt[i][j] {
                pairs.push((i, j));
            }
        }
    }
    Poset::build(labels, &pairs).unwrap()
}

pub fn relation_of(x: &Poset) -> Rel {
    (0..x.len()).map(|i| (0..x.len()).map(|j| x.lt(i, j)).collect()).collect()
}

/// Every chain (as an ascending index list), grouped by size, by testing all subsets.
pub fn chains_by_subsets(lt: &Rel) -> Vec<Vec<Vec<usize>>> {
    let n = lt.len();
    assert!(n <= 16);
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    for mask in 0u32..(1 << n) {
        let mut s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let ok = s.iter().all(|&a| s.iter().all(|&b| a == b || lt[a][b] || lt[b][a]));
        if ok {
            s.sort_by(|&a, &b| if lt[a][b] { std::cmp::Ordering::Less } else if a == b { std::cmp::Ordering::Equal } else { std::cmp::Ordering::Greater });
            out[s.len()].push(s);
        }
    }
    while out.len() > 1 && out.last().unwrap().is_empty() {
        out.pop();
    }
    out
}

/// Rank over Q of a dense matrix.
pub fn dense_rank(mut m: Vec<Vec<BigRational>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = BigRational::one() / m[r][c].clone();
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone() * inv.clone();
                for j in c..cols {
                    let t = m[r][j].clone() * f.clone();
                    m[i][j] -= t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Reduced Betti numbers, entry `i` = degree `i - 1`.
pub fn betti_oracle(lt: &Rel) -> Vec<usize> {
    let chains = chains_by_subsets(lt);
    let rank_d = |s: usize| -> usize {
        // boundary from chains of size s to size s-1
        if s == 0 || s >= chains.len() {
            return 0;
        }
        let lower = &chains[s - 1];
        let m: Vec<Vec<BigRational>> = chains[s]
            .iter()
            .map(|c| {
                let mut row = vec![BigRational::zero(); lower.len()];
                for i in 0..c.len() {
                    let mut f = c.clone();
                    f.remove(i);
                    let col = lower.iter().position(|x| *x == f).unwrap();
                    row[col] = if i % 2 == 0 { BigRational::one() } else { -BigRational::one() };
                }
                row
            })
            .collect();
        dense_rank(m)
    };
    (0..chains.len()).map(|s| chains[s].len() - rank_d(s) - rank_d(s + 1)).collect()
}

pub fn euler_oracle(lt: &Rel) -> i64 {
    chains_by_subsets(lt).iter().enumerate().map(|(s, v)| if s % 2 == 1 { v.len() as i64 } else { -(v.len() as i64) }).sum()
}

/// Join of two relations: disjoint union with all of the first below all of the second.
pub fn join_rel(a: &Rel, b: &Rel) -> Rel {
    let (n, m) = (a.len(), b.len());
    let mut lt = vec![vec![false; n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            lt[i][j] = a[i][j];
        }
        for j in 0..m {
            lt[i][n + j] = true;
        }
    }
    for i in 0..m {
        for j in 0..m {
            lt[n + i][n + j] = b[i][j];
        }
    }
    lt
}
