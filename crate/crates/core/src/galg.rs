//! Finite-dimensional connected graded-commutative algebras.
//!
//! An [`Algebra`] is either an explicit multiplication table (validated from an
//! [`AlgebraPresentation`]) or a tensor product of such tables. Tensor products
//! are never materialized: a product of two tuple basis elements is computed
//! from the factor tables together with the Koszul sign
//!
//! ```text
//! (u1 ⊗ … ⊗ ur)(v1 ⊗ … ⊗ vr) = (-1)^{Σ_{i<j} |v_i||u_j|} u1v1 ⊗ … ⊗ urvr
//! ```
//!
//! Tensor bases are ordered lexicographically by tuple, so index 0 is always
//! the unit `1 ⊗ … ⊗ 1`.

use std::collections::hash_map::DefaultHasher;
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::exactla::{kernel_basis, LinAlgError, Matrix, Subspace, Vector};
use crate::exactnum::{FieldSpec, NumError, Scalar};

/// Default cap on `dim(A)^r` for computations that need the whole tensor power.
pub const DEFAULT_DIM_CEILING: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("basis is empty")]
    EmptyBasis,
    #[error("duplicate basis label {0:?}")]
    DuplicateLabel(String),
    #[error("no basis element of degree 0 (the unit)")]
    NoUnit,
    #[error("algebra is not connected: several degree-0 basis elements {0:?}")]
    MultipleUnits(Vec<String>),
    #[error("the degree-0 unit {0:?} must be the first basis element")]
    UnitNotFirst(String),
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("product {left}·{right} must be listed with the left factor first in basis order")]
    NonCanonicalOrder { left: String, right: String },
    #[error("product {left}·{right} involves the unit; unit products are implied")]
    UnitProduct { left: String, right: String },
    #[error("product {left}·{right} is listed twice")]
    DuplicateProduct { left: String, right: String },
    #[error("product {left}·{right} has degree {expected} but term {target} has degree {got}")]
    Inhomogeneous {
        left: String,
        right: String,
        target: String,
        expected: u32,
        got: u32,
    },
    #[error("coefficient in {left}·{right} is over {got}, algebra is over {expected}")]
    CoefficientField {
        left: String,
        right: String,
        expected: FieldSpec,
        got: FieldSpec,
    },
    #[error("graded commutativity fails: {0}·{0} must vanish for an odd-degree element")]
    NotGradedCommutative(String),
    #[error("associativity fails: ({a}·{b})·{c} ≠ {a}·({b}·{c})")]
    NotAssociative { a: String, b: String, c: String },
    #[error("tensor exponent must be at least 1, got {0}")]
    InvalidExponent(usize),
    #[error("dimension {requested} exceeds the resource ceiling {ceiling}")]
    ResourceCeiling { requested: u128, ceiling: usize },
    #[error("element does not belong to this algebra")]
    AlgebraMismatch,
    #[error("algebras over different fields ({0} and {1})")]
    FieldMismatch(FieldSpec, FieldSpec),
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasisElement {
    pub label: String,
    pub degree: u32,
}

/// `left · right = Σ coeff · basis[index]`, listed for `left ≤ right` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductEntry {
    pub left: usize,
    pub right: usize,
    pub terms: Vec<(Scalar, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgebraPresentation {
    pub name: String,
    pub field: FieldSpec,
    pub basis: Vec<BasisElement>,
    pub products: Vec<ProductEntry>,
}

impl AlgebraPresentation {
    pub fn new(name: impl Into<String>, field: FieldSpec, basis: &[(&str, u32)]) -> Self {
        AlgebraPresentation {
            name: name.into(),
            field,
            basis: basis
                .iter()
                .map(|(l, d)| BasisElement {
                    label: l.to_string(),
                    degree: *d,
                })
                .collect(),
            products: Vec::new(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.basis.iter().position(|b| b.label == label)
    }

    /// Adds `left · right = Σ coeff · target` by label. Panics on unknown labels,
    /// so this is meant for hard-coded presentations.
    pub fn with_product(mut self, left: &str, right: &str, terms: &[(i64, &str)]) -> Self {
        let idx = |l: &str| self.index_of(l).unwrap_or_else(|| panic!("unknown label {l:?}"));
        let entry = ProductEntry {
            left: idx(left),
            right: idx(right),
            terms: terms.iter().map(|(c, t)| (self.field.from_i64(*c), idx(t))).collect(),
        };
        self.products.push(entry);
        self
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }
}

/// Sparse coordinates `(basis index, coefficient)`, sorted by index, no zeros.
pub type Terms = Vec<(usize, Scalar)>;

#[derive(Debug)]
struct TableData {
    labels: Vec<String>,
    degrees: Vec<u32>,
    // dim * dim entries, row-major in (left, right)
    table: Vec<Terms>,
}

#[derive(Debug)]
struct TensorData {
    factors: Vec<Algebra>,
    // strides[i] = product of dims of factors after i
    strides: Vec<usize>,
}

#[derive(Debug)]
enum Structure {
    Table(TableData),
    Tensor(TensorData),
}

#[derive(Debug)]
struct Inner {
    name: String,
    field: FieldSpec,
    dim: usize,
    fingerprint: u64,
    structure: Structure,
}

/// A validated algebra. Cheap to clone.
#[derive(Debug, Clone)]
pub struct Algebra {
    inner: Arc<Inner>,
}

/// Checks every axiom and returns the completed algebra.
pub fn validate_algebra(p: &AlgebraPresentation) -> Result<Algebra, AlgebraError> {
    let dim = p.basis.len();
    if dim == 0 {
        return Err(AlgebraError::EmptyBasis);
    }
    let mut seen = HashMap::new();
    for b in &p.basis {
        if seen.insert(b.label.as_str(), ()).is_some() {
            return Err(AlgebraError::DuplicateLabel(b.label.clone()));
        }
    }
    let units: Vec<usize> = (0..dim).filter(|&i| p.basis[i].degree == 0).collect();
    match units.as_slice() {
        [] => return Err(AlgebraError::NoUnit),
        [0] => {}
        [u] => return Err(AlgebraError::UnitNotFirst(p.basis[*u].label.clone())),
        many => {
            return Err(AlgebraError::MultipleUnits(
                many.iter().map(|&i| p.basis[i].label.clone()).collect(),
            ))
        }
    }
    let label = |i: usize| p.basis[i].label.clone();
    let degrees: Vec<u32> = p.basis.iter().map(|b| b.degree).collect();
    let field = p.field;

    let mut table: Vec<Terms> = vec![Vec::new(); dim * dim];
    for i in 0..dim {
        table[i] = vec![(i, field.one())];
        table[i * dim] = vec![(i, field.one())];
    }
    let mut listed = vec![false; dim * dim];
    for entry in &p.products {
        let (l, r) = (entry.left, entry.right);
        for idx in std::iter::once(l)
            .chain(std::iter::once(r))
            .chain(entry.terms.iter().map(|t| t.1))
        {
            if idx >= dim {
                return Err(AlgebraError::IndexOutOfRange { index: idx, dim });
            }
        }
        if l == 0 || r == 0 {
            return Err(AlgebraError::UnitProduct {
                left: label(l),
                right: label(r),
            });
        }
        if l > r {
            return Err(AlgebraError::NonCanonicalOrder {
                left: label(l),
                right: label(r),
            });
        }
        if std::mem::replace(&mut listed[l * dim + r], true) {
            return Err(AlgebraError::DuplicateProduct {
                left: label(l),
                right: label(r),
            });
        }
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (coeff, target) in &entry.terms {
            if coeff.field() != field {
                return Err(AlgebraError::CoefficientField {
                    left: label(l),
                    right: label(r),
                    expected: field,
                    got: coeff.field(),
                });
            }
            if degrees[*target] != degrees[l] + degrees[r] {
                return Err(AlgebraError::Inhomogeneous {
                    left: label(l),
                    right: label(r),
                    target: label(*target),
                    expected: degrees[l] + degrees[r],
                    got: degrees[*target],
                });
            }
            accumulate(&mut acc, *target, coeff.clone());
        }
        let terms: Terms = acc.into_iter().collect();
        let swapped: Terms = if (degrees[l] * degrees[r]) % 2 == 1 {
            terms.iter().map(|(k, c)| (*k, -c)).collect()
        } else {
            terms.clone()
        };
        table[l * dim + r] = terms;
        table[r * dim + l] = swapped;
    }

    // For i = j the derived entry must agree with itself: u·u = (-1)^{|u|²} u·u.
    for i in 1..dim {
        if degrees[i] % 2 == 1 && field.characteristic() != 2 && !table[i * dim + i].is_empty() {
            return Err(AlgebraError::NotGradedCommutative(label(i)));
        }
    }

    let algebra = Algebra::from_table(
        p.name.clone(),
        field,
        TableData {
            labels: p.basis.iter().map(|b| b.label.clone()).collect(),
            degrees,
            table,
        },
    );
    check_associative(&algebra)?;
    Ok(algebra)
}

fn accumulate(acc: &mut BTreeMap<usize, Scalar>, k: usize, c: Scalar) {
    use std::collections::btree_map::Entry;
    match acc.entry(k) {
        Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        Entry::Occupied(mut o) => {
            o.get_mut().add_assign_ref(&c);
            if o.get().is_zero() {
                o.remove();
            }
        }
    }
}

fn check_associative(a: &Algebra) -> Result<(), AlgebraError> {
    let dim = a.dim();
    for i in 1..dim {
        for j in 1..dim {
            let ij = a.basis_product(i, j);
            for k in 1..dim {
                let left = a.multiply_terms(&ij, &[(k, a.field().one())]);
                let jk = a.basis_product(j, k);
                let right = a.multiply_terms(&[(i, a.field().one())], &jk);
                if left != right {
                    return Err(AlgebraError::NotAssociative {
                        a: a.label(i),
                        b: a.label(j),
                        c: a.label(k),
                    });
                }
            }
        }
    }
    Ok(())
}

fn hash_of<T: Hash>(value: &T) -> u64 {
    let mut h = DefaultHasher::new();
    value.hash(&mut h);
    h.finish()
}

fn tensor_fingerprint(factors: &[u64]) -> u64 {
    hash_of(&("tensor", factors))
}

/// Fingerprint that `tensor_power(a, r)` will carry, without building it.
pub fn tensor_power_fingerprint(a: &Algebra, r: usize) -> u64 {
    let base = a.factor_fingerprints();
    let all: Vec<u64> = (0..r).flat_map(|_| base.iter().copied()).collect();
    tensor_fingerprint(&all)
}

impl Algebra {
    fn from_table(name: String, field: FieldSpec, data: TableData) -> Self {
        let dim = data.labels.len();
        let table_text: Vec<Vec<(usize, String)>> = data
            .table
            .iter()
            .map(|t| t.iter().map(|(k, c)| (*k, c.to_string())).collect())
            .collect();
        let fingerprint = hash_of(&(&name, field, &data.labels, &data.degrees, table_text));
        Algebra {
            inner: Arc::new(Inner {
                name,
                field,
                dim,
                fingerprint,
                structure: Structure::Table(data),
            }),
        }
    }

    pub fn name(&self) -> &str {
        &self.inner.name
    }

    pub fn field(&self) -> FieldSpec {
        self.inner.field
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    pub fn fingerprint(&self) -> u64 {
        self.inner.fingerprint
    }

    /// Number of tensor factors; 1 for a plain table.
    pub fn tensor_rank(&self) -> usize {
        match &self.inner.structure {
            Structure::Table(_) => 1,
            Structure::Tensor(t) => t.factors.len(),
        }
    }

    fn factor_fingerprints(&self) -> Vec<u64> {
        match &self.inner.structure {
            Structure::Table(_) => vec![self.fingerprint()],
            Structure::Tensor(t) => t.factors.iter().map(Algebra::fingerprint).collect(),
        }
    }

    fn factors(&self) -> Vec<Algebra> {
        match &self.inner.structure {
            Structure::Table(_) => vec![self.clone()],
            Structure::Tensor(t) => t.factors.clone(),
        }
    }

    /// Tuple of factor basis indices for a tensor basis index.
    pub fn tuple_of(&self, mut i: usize) -> Vec<usize> {
        match &self.inner.structure {
            Structure::Table(_) => vec![i],
            Structure::Tensor(t) => t
                .strides
                .iter()
                .map(|s| {
                    let q = i / s;
                    i %= s;
                    q
                })
                .collect(),
        }
    }

    pub fn index_of_tuple(&self, tuple: &[usize]) -> usize {
        match &self.inner.structure {
            Structure::Table(_) => tuple[0],
            Structure::Tensor(t) => tuple.iter().zip(&t.strides).map(|(a, s)| a * s).sum(),
        }
    }

    pub fn degree(&self, i: usize) -> u32 {
        match &self.inner.structure {
            Structure::Table(t) => t.degrees[i],
            Structure::Tensor(t) => self.tuple_of(i).iter().zip(&t.factors).map(|(&k, f)| f.degree(k)).sum(),
        }
    }

    pub fn degrees(&self) -> Vec<u32> {
        (0..self.dim()).map(|i| self.degree(i)).collect()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.inner.structure {
            Structure::Table(t) => t.labels[i].clone(),
            Structure::Tensor(t) => self
                .tuple_of(i)
                .iter()
                .zip(&t.factors)
                .map(|(&k, f)| f.label(k))
                .collect::<Vec<_>>()
                .join("⊗"),
        }
    }

    pub fn top_degree(&self) -> u32 {
        match &self.inner.structure {
            Structure::Table(t) => t.degrees.iter().copied().max().unwrap_or(0),
            Structure::Tensor(t) => t.factors.iter().map(Algebra::top_degree).sum(),
        }
    }

    /// Product of two basis elements.
    pub fn basis_product(&self, i: usize, j: usize) -> Terms {
        match &self.inner.structure {
            Structure::Table(t) => t.table[i * self.dim() + j].clone(),
            Structure::Tensor(t) => {
                let u = self.tuple_of(i);
                let v = self.tuple_of(j);
                let mut odd = false;
                let mut passed = 0u32;
                for (k, f) in t.factors.iter().enumerate() {
                    odd ^= (passed * f.degree(u[k])) % 2 == 1;
                    passed += f.degree(v[k]);
                }
                let mut out: Terms = vec![(0, self.field().one().signed(odd))];
                for (k, f) in t.factors.iter().enumerate() {
                    let part = f.basis_product(u[k], v[k]);
                    if part.is_empty() {
                        return Vec::new();
                    }
                    let mut next = Vec::with_capacity(out.len() * part.len());
                    for (idx, c) in &out {
                        for (pk, pc) in &part {
                            next.push((idx + pk * t.strides[k], c * pc));
                        }
                    }
                    out = next;
                }
                out.sort_by_key(|(k, _)| *k);
                out
            }
        }
    }

    fn multiply_terms(&self, u: &[(usize, Scalar)], v: &[(usize, Scalar)]) -> Terms {
        let mut acc = BTreeMap::new();
        for (i, a) in u {
            for (j, b) in v {
                let ab = a * b;
                for (k, c) in self.basis_product(*i, *j) {
                    accumulate(&mut acc, k, &ab * &c);
                }
            }
        }
        acc.into_iter().collect()
    }

    pub fn element(&self, terms: impl IntoIterator<Item = (usize, Scalar)>) -> Result<Element, AlgebraError> {
        let mut acc = BTreeMap::new();
        for (k, c) in terms {
            if k >= self.dim() {
                return Err(AlgebraError::IndexOutOfRange {
                    index: k,
                    dim: self.dim(),
                });
            }
            if c.field() != self.field() {
                return Err(NumError::FieldMismatch(self.field(), c.field()).into());
            }
            accumulate(&mut acc, k, c);
        }
        Ok(Element {
            fingerprint: self.fingerprint(),
            terms: acc,
        })
    }

    pub fn zero(&self) -> Element {
        Element {
            fingerprint: self.fingerprint(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(&self) -> Element {
        self.basis_element(0)
    }

    pub fn basis_element(&self, i: usize) -> Element {
        assert!(i < self.dim());
        Element {
            fingerprint: self.fingerprint(),
            terms: BTreeMap::from([(i, self.field().one())]),
        }
    }

    pub fn from_vector(&self, v: &Vector) -> Result<Element, AlgebraError> {
        if v.len() != self.dim() {
            return Err(AlgebraError::AlgebraMismatch);
        }
        self.element(v.coords().iter().cloned().enumerate())
    }

    pub fn to_vector(&self, u: &Element) -> Result<Vector, AlgebraError> {
        self.check(u)?;
        let mut coords = vec![self.field().zero(); self.dim()];
        for (k, c) in &u.terms {
            coords[*k] = c.clone();
        }
        Ok(Vector::new(self.field(), coords)?)
    }

    fn check(&self, u: &Element) -> Result<(), AlgebraError> {
        if u.fingerprint != self.fingerprint() {
            return Err(AlgebraError::AlgebraMismatch);
        }
        Ok(())
    }

    /// Bilinear extension of the basis multiplication.
    pub fn multiply(&self, u: &Element, v: &Element) -> Result<Element, AlgebraError> {
        self.check(u)?;
        self.check(v)?;
        let mut acc = BTreeMap::new();
        for (i, a) in &u.terms {
            for (j, b) in &v.terms {
                let ab = a * b;
                for (k, c) in self.basis_product(*i, *j) {
                    accumulate(&mut acc, k, &ab * &c);
                }
            }
        }
        Ok(Element {
            fingerprint: self.fingerprint(),
            terms: acc,
        })
    }

    /// Ordered product `factors[0] · factors[1] · …`; the unit for an empty list.
    pub fn product_of(&self, factors: &[Element]) -> Result<Element, AlgebraError> {
        let mut acc = self.one();
        for f in factors {
            acc = self.multiply(&acc, f)?;
        }
        Ok(acc)
    }

    /// The degree of `u` if it is homogeneous and nonzero.
    pub fn homogeneous_degree(&self, u: &Element) -> Option<u32> {
        let mut degrees = u.terms.keys().map(|&k| self.degree(k));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Canonical text form, e.g. `a2⊗a2 + 2·1⊗a3` or `1⊗a − a⊗1` over ℚ.
    pub fn format_element(&self, u: &Element) -> String {
        if u.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (n, (k, c)) in u.terms.iter().enumerate() {
            let c = match (n, c.is_negative()) {
                (0, true) => {
                    out.push('−');
                    -c.clone()
                }
                (0, false) => c.clone(),
                (_, true) => {
                    out.push_str(" − ");
                    -c.clone()
                }
                (_, false) => {
                    out.push_str(" + ");
                    c.clone()
                }
            };
            if c.is_one() {
                out.push_str(&self.label(*k));
            } else {
                let _ = write!(out, "{}·{}", c, self.label(*k));
            }
        }
        out
    }

    /// Basis indices grouped by degree.
    pub fn grading(&self) -> Grading {
        let mut blocks: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        let mut degree_of = Vec::with_capacity(self.dim());
        let mut local_of = Vec::with_capacity(self.dim());
        for i in 0..self.dim() {
            let d = self.degree(i);
            let block = blocks.entry(d).or_default();
            degree_of.push(d);
            local_of.push(block.len());
            block.push(i);
        }
        Grading {
            blocks,
            degree_of,
            local_of,
        }
    }

    /// Explicit presentation of this algebra (materializes tensor tables).
    pub fn to_presentation(&self) -> AlgebraPresentation {
        let dim = self.dim();
        let basis = (0..dim)
            .map(|i| BasisElement {
                label: self.label(i),
                degree: self.degree(i),
            })
            .collect();
        let mut products = Vec::new();
        for i in 1..dim {
            for j in i..dim {
                let terms = self.basis_product(i, j);
                if !terms.is_empty() {
                    products.push(ProductEntry {
                        left: i,
                        right: j,
                        terms: terms.into_iter().map(|(k, c)| (c, k)).collect(),
                    });
                }
            }
        }
        AlgebraPresentation {
            name: self.name().to_string(),
            field: self.field(),
            basis,
            products,
        }
    }

    /// True if both algebras have the same degrees and the same completed table.
    pub fn same_structure(&self, other: &Algebra) -> bool {
        let dim = self.dim();
        self.field() == other.field()
            && dim == other.dim()
            && (0..dim).all(|i| self.degree(i) == other.degree(i))
            && (0..dim).all(|i| (0..dim).all(|j| self.basis_product(i, j) == other.basis_product(i, j)))
    }
}

/// Basis indices grouped by degree, with each index's position inside its block.
#[derive(Debug, Clone)]
pub struct Grading {
    pub blocks: BTreeMap<u32, Vec<usize>>,
    pub degree_of: Vec<u32>,
    pub local_of: Vec<usize>,
}

/// An element of an algebra, stored as sparse coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Element {
    fingerprint: u64,
    terms: BTreeMap<usize, Scalar>,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Scalar)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn coeff(&self, k: usize) -> Option<&Scalar> {
        self.terms.get(&k)
    }

    pub fn support_len(&self) -> usize {
        self.terms.len()
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn add(&self, other: &Element) -> Result<Element, AlgebraError> {
        if self.fingerprint != other.fingerprint {
            return Err(AlgebraError::AlgebraMismatch);
        }
        let mut terms = self.terms.clone();
        for (k, c) in &other.terms {
            accumulate(&mut terms, *k, c.clone());
        }
        Ok(Element {
            fingerprint: self.fingerprint,
            terms,
        })
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            accumulate(&mut terms, *k, c * s);
        }
        Element {
            fingerprint: self.fingerprint,
            terms,
        }
    }

    pub fn neg(&self) -> Element {
        Element {
            fingerprint: self.fingerprint,
            terms: self.terms.iter().map(|(k, c)| (*k, -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Element) -> Result<Element, AlgebraError> {
        self.add(&other.neg())
    }
}

fn check_dim(requested: u128, ceiling: usize) -> Result<usize, AlgebraError> {
    if requested > ceiling as u128 {
        return Err(AlgebraError::ResourceCeiling { requested, ceiling });
    }
    Ok(requested as usize)
}

/// `dim(a)^r`, saturating at `u128::MAX`.
pub fn power_dim(a: &Algebra, r: usize) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..r {
        acc = acc.saturating_mul(a.dim() as u128);
    }
    acc
}

/// `a ⊗ b` with the Koszul sign rule. Tensor factors are flattened, so
/// `(a ⊗ b) ⊗ c` and `a ⊗ (b ⊗ c)` are the same algebra.
pub fn tensor_product(a: &Algebra, b: &Algebra, ceiling: usize) -> Result<Algebra, AlgebraError> {
    if a.field() != b.field() {
        return Err(AlgebraError::FieldMismatch(a.field(), b.field()));
    }
    let mut factors = a.factors();
    factors.extend(b.factors());
    build_tensor(factors, ceiling)
}

/// The r-fold tensor power `A ⊗ … ⊗ A`, on lexicographically ordered tuples.
pub fn tensor_power(a: &Algebra, r: usize, ceiling: usize) -> Result<Algebra, AlgebraError> {
    if r < 1 {
        return Err(AlgebraError::InvalidExponent(r));
    }
    let base = a.factors();
    let factors = (0..r).flat_map(|_| base.iter().cloned()).collect();
    build_tensor(factors, ceiling)
}

fn build_tensor(factors: Vec<Algebra>, ceiling: usize) -> Result<Algebra, AlgebraError> {
    let requested = factors.iter().fold(1u128, |acc, f| acc.saturating_mul(f.dim() as u128));
    let dim = check_dim(requested, ceiling)?;
    let mut strides = vec![1usize; factors.len()];
    for k in (0..factors.len().saturating_sub(1)).rev() {
        strides[k] = strides[k + 1] * factors[k + 1].dim();
    }
    let fingerprint = tensor_fingerprint(&factors.iter().map(Algebra::fingerprint).collect::<Vec<_>>());
    let name = factors.iter().map(Algebra::name).collect::<Vec<_>>().join("⊗");
    Ok(Algebra {
        inner: Arc::new(Inner {
            name,
            field: factors[0].field(),
            dim,
            fingerprint,
            structure: Structure::Tensor(TensorData { factors, strides }),
        }),
    })
}

/// The multiplication map `μ_r: A^r → A`, `a1⊗…⊗ar ↦ a1·…·ar`.
pub fn mu(a: &Algebra, r: usize, u: &Element) -> Result<Element, AlgebraError> {
    if u.fingerprint != tensor_power_fingerprint(a, r) {
        return Err(AlgebraError::AlgebraMismatch);
    }
    let radix = a.dim();
    let mut acc = BTreeMap::new();
    for (idx, c) in &u.terms {
        for (k, v) in mu_basis(a, r, radix, *idx) {
            accumulate(&mut acc, k, c * &v);
        }
    }
    Ok(Element {
        fingerprint: a.fingerprint(),
        terms: acc,
    })
}

// μ_r of a single tuple basis element, folding left to right.
fn mu_basis(a: &Algebra, r: usize, radix: usize, mut idx: usize) -> Terms {
    let mut tuple = vec![0; r];
    for slot in tuple.iter_mut().rev() {
        *slot = idx % radix;
        idx /= radix;
    }
    let mut acc: Terms = vec![(tuple[0], a.field().one())];
    for &t in &tuple[1..] {
        if t == 0 {
            continue;
        }
        acc = a.multiply_terms(&acc, &[(t, a.field().one())]);
        if acc.is_empty() {
            break;
        }
    }
    acc
}

/// A subspace split into degree components; each component is an RREF
/// subspace of the span of that degree's basis vectors.
#[derive(Debug, Clone)]
pub struct GradedSubspace {
    pub ambient_dim: usize,
    pub field: FieldSpec,
    pub blocks: BTreeMap<u32, (Vec<usize>, Subspace)>,
}

impl GradedSubspace {
    pub fn dim(&self) -> usize {
        self.blocks.values().map(|(_, s)| s.dim()).sum()
    }

    /// Basis rows as sparse global coordinates, in global RREF order.
    pub fn basis_terms(&self) -> Vec<Terms> {
        let mut rows: Vec<(usize, Terms)> = Vec::new();
        for (indices, s) in self.blocks.values() {
            for (v, &p) in s.basis().zip(s.pivots()) {
                let terms: Terms = v
                    .coords()
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(local, c)| (indices[local], c.clone()))
                    .collect();
                rows.push((indices[p], terms));
            }
        }
        rows.sort_by_key(|(p, _)| *p);
        rows.into_iter().map(|(_, t)| t).collect()
    }

    /// The same subspace as one dense RREF basis of the ambient space.
    pub fn to_subspace(&self) -> Subspace {
        let mut rows = Vec::new();
        for (indices, s) in self.blocks.values() {
            for (v, &p) in s.basis().zip(s.pivots()) {
                let mut coords = vec![self.field.zero(); self.ambient_dim];
                for (local, c) in v.coords().iter().enumerate() {
                    coords[indices[local]] = c.clone();
                }
                rows.push((indices[p], coords));
            }
        }
        Subspace::from_rref_rows(self.field, self.ambient_dim, rows)
    }
}

/// `ker μ_r` computed one degree at a time.
pub fn graded_kernel_mu(a: &Algebra, r: usize, ceiling: usize) -> Result<GradedSubspace, AlgebraError> {
    if r < 2 {
        return Err(AlgebraError::InvalidExponent(r));
    }
    let power = tensor_power(a, r, ceiling)?;
    let base_grading = a.grading();
    let field = a.field();
    let mut blocks = BTreeMap::new();
    for (degree, indices) in power.grading().blocks {
        let targets = base_grading.blocks.get(&degree).cloned().unwrap_or_default();
        let mut m = Matrix::zeros(field, targets.len(), indices.len());
        for (col, &idx) in indices.iter().enumerate() {
            for (k, c) in mu_basis(a, r, a.dim(), idx) {
                m.set(base_grading.local_of[k], col, c);
            }
        }
        let kernel = kernel_basis(&m);
        if !kernel.is_zero() {
            blocks.insert(degree, (indices, kernel));
        }
    }
    Ok(GradedSubspace {
        ambient_dim: power.dim(),
        field,
        blocks,
    })
}

/// RREF basis of the zero-divisor ideal `ker μ_r ⊂ A^r`.
pub fn kernel_mu(a: &Algebra, r: usize, ceiling: usize) -> Result<Subspace, AlgebraError> {
    Ok(graded_kernel_mu(a, r, ceiling)?.to_subspace())
}

/// The `μ_r` matrix (rows: basis of A, columns: tuples of A^r).
pub fn mu_matrix(a: &Algebra, r: usize, ceiling: usize) -> Result<Matrix, AlgebraError> {
    let n = check_dim(power_dim(a, r), ceiling)?;
    let mut m = Matrix::zeros(a.field(), a.dim(), n);
    for idx in 0..n {
        for (k, c) in mu_basis(a, r, a.dim(), idx) {
            m.set(k, idx, c);
        }
    }
    Ok(m)
}
