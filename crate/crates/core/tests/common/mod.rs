//! Random algebra corpus and brute-force oracles shared by the integration
//! tests. Nothing here calls the library's tensor, kernel or ideal code.

#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zcl::cli::builtins::{builtin_catalog, sample_names};
use zcl::exactnum::{FieldSpec, Scalar};
use zcl::galg::{AlgebraPresentation, BasisElement, ProductEntry};

pub const FIELDS: [FieldSpec; 4] = [
    FieldSpec::Prime { p: 2 },
    FieldSpec::Prime { p: 3 },
    FieldSpec::Prime { p: 5 },
    FieldSpec::Rational,
];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn builtins() -> Vec<AlgebraPresentation> {
    sample_names()
        .iter()
        .map(|n| builtin_catalog(n).expect("sample builtins exist"))
        .collect()
}

type Monomial = Vec<u32>;

fn monomials(degrees: &[u32], max_degree: u32) -> Vec<Monomial> {
    fn go(k: usize, degrees: &[u32], budget: u32, cur: &mut Monomial, out: &mut Vec<Monomial>) {
        if k == degrees.len() {
            out.push(cur.clone());
            return;
        }
        let cap = if degrees[k] % 2 == 1 { 1 } else { budget / degrees[k] };
        for e in 0..=cap.min(budget / degrees[k]) {
            cur.push(e);
            go(k + 1, degrees, budget - e * degrees[k], cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, degrees, max_degree, &mut Vec::new(), &mut out);
    out
}

fn monomial_degree(m: &Monomial, degrees: &[u32]) -> u32 {
    m.iter().zip(degrees).map(|(e, d)| e * d).sum()
}

/// Sign of `m · n` when both are written with generators in index order.
fn monomial_sign(m: &Monomial, n: &Monomial, degrees: &[u32]) -> bool {
    let mut swaps = 0;
    for a in 0..m.len() {
        for b in 0..a {
            if degrees[a] % 2 == 1 && degrees[b] % 2 == 1 {
                swaps += m[a] * n[b];
            }
        }
    }
    swaps % 2 == 1
}

fn random_scalar(rng: &mut ChaCha8Rng, field: FieldSpec) -> Scalar {
    field.from_i64(rng.gen_range(-4..=4))
}

/// Gauss-Jordan inverse; `None` when singular.
pub fn invert(m: &[Vec<Scalar>], field: FieldSpec) -> Option<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut aug: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { field.one() } else { field.zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !aug[r][col].is_zero())?;
        aug.swap(col, piv);
        let inv = aug[col][col].inv().ok()?;
        aug[col] = aug[col].iter().map(|x| x * &inv).collect();
        for r in 0..n {
            if r != col && !aug[r][col].is_zero() {
                let f = aug[r][col].clone();
                let pivot_row = aug[col].clone();
                for (x, y) in aug[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &(&f * y);
                }
            }
        }
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// A monomial algebra (an order ideal of monomials in graded-commutative
/// generators) presented in a randomly changed homogeneous basis.
pub fn random_presentation(
    rng: &mut ChaCha8Rng,
    field: FieldSpec,
    max_dim: usize,
    max_degree: u32,
) -> AlgebraPresentation {
    let ngens = rng.gen_range(1..=3);
    // low degrees leave room for products below max_degree
    let degrees: Vec<u32> = (0..ngens)
        .map(|_| {
            let top = if rng.gen_bool(0.7) {
                2.min(max_degree)
            } else {
                max_degree
            };
            rng.gen_range(1..=top)
        })
        .collect();
    let all = monomials(&degrees, max_degree);
    let target = if rng.gen_bool(0.7) {
        max_dim
    } else {
        rng.gen_range(1..=max_dim)
    };
    let mut ideal: Vec<Monomial> = vec![vec![0; ngens]];
    while ideal.len() < target {
        let candidates: Vec<&Monomial> = all
            .iter()
            .filter(|m| !ideal.contains(m))
            .filter(|m| {
                (0..ngens).filter(|&k| m[k] > 0).all(|k| {
                    let mut d = (*m).clone();
                    d[k] -= 1;
                    ideal.contains(&d)
                })
            })
            .collect();
        match candidates.choose(rng) {
            Some(m) => ideal.push((*m).clone()),
            None => break,
        }
    }
    let mut positive: Vec<Monomial> = ideal[1..].to_vec();
    positive.shuffle(rng);
    let basis: Vec<Monomial> = std::iter::once(ideal[0].clone()).chain(positive).collect();
    let dim = basis.len();
    let deg: Vec<u32> = basis.iter().map(|m| monomial_degree(m, &degrees)).collect();

    // monomial structure constants
    let mut table = vec![vec![vec![field.zero(); dim]; dim]; dim];
    for i in 0..dim {
        for j in 0..dim {
            let sum: Monomial = basis[i].iter().zip(&basis[j]).map(|(x, y)| x + y).collect();
            if let Some(k) = basis.iter().position(|m| *m == sum) {
                table[i][j][k] = field.one().signed(monomial_sign(&basis[i], &basis[j], &degrees));
            }
        }
    }

    // per-degree change of basis: new_p = Σ_q g[p][q] old_q
    let mut g = vec![vec![field.zero(); dim]; dim];
    g[0][0] = field.one();
    let mut blocks: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for i in 1..dim {
        blocks.entry(deg[i]).or_default().push(i);
    }
    for idx in blocks.values() {
        loop {
            let m: Vec<Vec<Scalar>> = idx
                .iter()
                .map(|_| idx.iter().map(|_| random_scalar(rng, field)).collect())
                .collect();
            if invert(&m, field).is_some() {
                for (a, &p) in idx.iter().enumerate() {
                    for (b, &q) in idx.iter().enumerate() {
                        g[p][q] = m[a][b].clone();
                    }
                }
                break;
            }
        }
    }
    let h = invert(&g, field).expect("block-diagonal of invertible blocks");

    let labels: Vec<String> = (0..dim)
        .map(|i| if i == 0 { "1".into() } else { format!("e{i}") })
        .collect();
    let mut products = Vec::new();
    for p in 1..dim {
        for s in p..dim {
            let mut old = vec![field.zero(); dim];
            for q in 0..dim {
                for t in 0..dim {
                    if g[p][q].is_zero() || g[s][t].is_zero() {
                        continue;
                    }
                    let c = &g[p][q] * &g[s][t];
                    for (u, coeff) in table[q][t].iter().enumerate() {
                        if !coeff.is_zero() {
                            old[u] = &old[u] + &(&c * coeff);
                        }
                    }
                }
            }
            let mut terms = Vec::new();
            for v in 0..dim {
                let mut c = field.zero();
                for u in 0..dim {
                    c = &c + &(&old[u] * &h[u][v]);
                }
                if !c.is_zero() {
                    terms.push((c, v));
                }
            }
            if !terms.is_empty() {
                products.push(ProductEntry {
                    left: p,
                    right: s,
                    terms,
                });
            }
        }
    }
    AlgebraPresentation {
        name: format!("random-{field}-{dim}"),
        field,
        basis: labels
            .into_iter()
            .zip(&deg)
            .map(|(label, &degree)| BasisElement { label, degree })
            .collect(),
        products,
    }
}

pub fn random_corpus(seed: u64, count: usize, max_dim: usize, max_degree: u32) -> Vec<AlgebraPresentation> {
    let mut rng = rng(seed);
    (0..count)
        .map(|k| random_presentation(&mut rng, FIELDS[k % FIELDS.len()], max_dim, max_degree))
        .collect()
}

/// Dense multiplication table straight from a presentation.
pub struct Table {
    pub field: FieldSpec,
    pub degrees: Vec<u32>,
    pub mul: Vec<Vec<Vec<Scalar>>>,
}

impl Table {
    pub fn new(p: &AlgebraPresentation) -> Self {
        let field = p.field;
        let n = p.basis.len();
        let degrees: Vec<u32> = p.basis.iter().map(|b| b.degree).collect();
        let mut mul = vec![vec![vec![field.zero(); n]; n]; n];
        for i in 0..n {
            mul[0][i][i] = field.one();
            mul[i][0][i] = field.one();
        }
        for e in &p.products {
            for (c, k) in &e.terms {
                mul[e.left][e.right][*k] = &mul[e.left][e.right][*k] + c;
            }
            if e.left != e.right {
                let odd = degrees[e.left] % 2 == 1 && degrees[e.right] % 2 == 1;
                mul[e.right][e.left] = mul[e.left][e.right].iter().map(|c| c.clone().signed(odd)).collect();
            }
        }
        Table { field, degrees, mul }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn multiply(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let n = self.dim();
        let mut out = vec![self.field.zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let c = &x[i] * &y[j];
                for k in 0..n {
                    if !self.mul[i][j][k].is_zero() {
                        out[k] = &out[k] + &(&c * &self.mul[i][j][k]);
                    }
                }
            }
        }
        out
    }
}

/// The tensor power `A^r` as a dense table, basis tuples in mixed radix with
/// the first factor most significant.
pub fn tensor_table(a: &Table, r: usize) -> Table {
    let n = a.dim();
    let size = n.pow(r as u32);
    let tuple = |mut i: usize| {
        let mut t = vec![0; r];
        for k in (0..r).rev() {
            t[k] = i % n;
            i /= n;
        }
        t
    };
    let tuples: Vec<Vec<usize>> = (0..size).map(tuple).collect();
    let degrees: Vec<u32> = tuples.iter().map(|t| t.iter().map(|&i| a.degrees[i]).sum()).collect();
    let field = a.field;
    let mut mul = vec![vec![vec![field.zero(); size]; size]; size];
    for (x, u) in tuples.iter().enumerate() {
        for (y, v) in tuples.iter().enumerate() {
            // v_j moves past u_i for every i > j
            let mut swaps = 0u64;
            for i in 0..r {
                for j in 0..i {
                    swaps += (a.degrees[u[i]] * a.degrees[v[j]]) as u64;
                }
            }
            let mut acc: Vec<(usize, Scalar)> = vec![(0, field.one().signed(swaps % 2 == 1))];
            for k in 0..r {
                let slot = &a.mul[u[k]][v[k]];
                let mut next = Vec::new();
                for (idx, c) in &acc {
                    for (t, s) in slot.iter().enumerate() {
                        if !s.is_zero() {
                            next.push((idx * n + t, c * s));
                        }
                    }
                }
                acc = next;
            }
            for (idx, c) in acc {
                mul[x][y][idx] = &mul[x][y][idx] + &c;
            }
        }
    }
    Table { field, degrees, mul }
}

/// Null space of `m` (rows × cols) as a list of column-space vectors.
pub fn null_space(m: &[Vec<Scalar>], cols: usize, field: FieldSpec) -> Vec<Vec<Scalar>> {
    let mut rows: Vec<Vec<Scalar>> = m.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = rows[r][c].inv().unwrap();
        rows[r] = rows[r].iter().map(|x| x * &inv).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                let pr = rows[r].clone();
                for (x, y) in rows[i].iter_mut().zip(&pr) {
                    *x = &*x - &(&f * y);
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![field.zero(); cols];
        v[free] = field.one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[i][free].clone();
        }
        basis.push(v);
    }
    basis
}

fn normalize(v: &[Scalar]) -> Vec<Scalar> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(lead) => {
            let inv = lead.inv().unwrap();
            v.iter().map(|x| x * &inv).collect()
        }
        None => v.to_vec(),
    }
}

/// Homogeneous basis of `ker μ_r`, degree by degree.
pub fn kernel_of_mu(a: &Table, t: &Table, r: usize) -> Vec<Vec<Scalar>> {
    let n = a.dim();
    let size = t.dim();
    let mut image = Vec::with_capacity(size);
    for x in 0..size {
        let mut digits = vec![0; r];
        let mut i = x;
        for k in (0..r).rev() {
            digits[k] = i % n;
            i /= n;
        }
        let mut acc = vec![a.field.zero(); n];
        acc[0] = a.field.one();
        for &d in &digits {
            let mut e = vec![a.field.zero(); n];
            e[d] = a.field.one();
            acc = a.multiply(&acc, &e);
        }
        image.push(acc);
    }
    let mut by_degree: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for x in 0..size {
        by_degree.entry(t.degrees[x]).or_default().push(x);
    }
    let mut out = Vec::new();
    for idx in by_degree.values() {
        // rows = target coordinates, columns = tuples of this degree
        let m: Vec<Vec<Scalar>> = (0..n)
            .map(|k| idx.iter().map(|&x| image[x][k].clone()).collect())
            .collect();
        for v in null_space(&m, idx.len(), a.field) {
            let mut full = vec![a.field.zero(); size];
            for (c, &x) in v.into_iter().zip(idx) {
                full[x] = c;
            }
            out.push(full);
        }
    }
    out
}

/// Longest nonzero product of kernel basis elements, by exhaustive
/// depth-first search over nondecreasing index sequences.
pub fn zcl_bruteforce(p: &AlgebraPresentation, r: usize) -> usize {
    let a = Table::new(p);
    let t = tensor_table(&a, r);
    let k = kernel_of_mu(&a, &t, r);
    let mut memo: HashMap<(Vec<Scalar>, usize), usize> = HashMap::new();
    fn best(
        t: &Table,
        k: &[Vec<Scalar>],
        p: Vec<Scalar>,
        start: usize,
        memo: &mut HashMap<(Vec<Scalar>, usize), usize>,
    ) -> usize {
        let key = (normalize(&p), start);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut top = 0;
        for j in start..k.len() {
            let q = t.multiply(&p, &k[j]);
            if q.iter().any(|x| !x.is_zero()) {
                top = top.max(1 + best(t, k, q, j, memo));
            }
        }
        memo.insert(key, top);
        top
    }
    (0..k.len())
        .map(|i| 1 + best(&t, &k, k[i].clone(), i, &mut memo))
        .max()
        .unwrap_or(0)
}

/// Cup-length from the presentation alone: longest nonzero product of
/// positive-degree basis elements.
pub fn cl_bruteforce(p: &AlgebraPresentation) -> usize {
    let a = Table::new(p);
    let n = a.dim();
    let mut memo: HashMap<(Vec<Scalar>, usize), usize> = HashMap::new();
    fn best(a: &Table, p: Vec<Scalar>, start: usize, memo: &mut HashMap<(Vec<Scalar>, usize), usize>) -> usize {
        let key = (normalize(&p), start);
        if let Some(&v) = memo.get(&key) {
            return v;
        }
        let mut top = 0;
        for j in start.max(1)..a.dim() {
            let mut e = vec![a.field.zero(); a.dim()];
            e[j] = a.field.one();
            let q = a.multiply(&p, &e);
            if q.iter().any(|x| !x.is_zero()) {
                top = top.max(1 + best(a, q, j, memo));
            }
        }
        memo.insert(key, top);
        top
    }
    let mut unit = vec![a.field.zero(); n];
    unit[0] = a.field.one();
    best(&a, unit, 1, &mut memo)
}
