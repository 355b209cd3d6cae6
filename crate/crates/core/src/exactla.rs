//! Dense exact linear algebra: RREF, kernels, membership and subspace products.

use thiserror::Error;

use crate::exactnum::{FieldSpec, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinAlgError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch: expected {expected}, got {got}")]
    FieldMismatch { expected: FieldSpec, got: FieldSpec },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vector {
    field: FieldSpec,
    coords: Vec<Scalar>,
}

impl Vector {
    pub fn new(field: FieldSpec, coords: Vec<Scalar>) -> Result<Self, LinAlgError> {
        if let Some(bad) = coords.iter().find(|c| c.field() != field) {
            return Err(LinAlgError::FieldMismatch {
                expected: field,
                got: bad.field(),
            });
        }
        Ok(Vector { field, coords })
    }

    pub fn zero(field: FieldSpec, n: usize) -> Self {
        Vector {
            field,
            coords: vec![field.zero(); n],
        }
    }

    pub fn unit(field: FieldSpec, n: usize, i: usize) -> Self {
        let mut v = Self::zero(field, n);
        v.coords[i] = field.one();
        v
    }

    pub fn from_i64(field: FieldSpec, values: &[i64]) -> Self {
        Vector {
            field,
            coords: values.iter().map(|&x| field.from_i64(x)).collect(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Scalar] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Scalar> {
        self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Scalar::is_zero)
    }

    pub fn leading(&self) -> Option<usize> {
        self.coords.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, s: &Scalar) -> Vector {
        Vector {
            field: self.field,
            coords: self.coords.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Vector) -> Vector {
        assert_eq!(self.len(), other.len());
        Vector {
            field: self.field,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + b).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matrix {
    field: FieldSpec,
    ncols: usize,
    rows: Vec<Vec<Scalar>>,
}

impl Matrix {
    pub fn new(field: FieldSpec, ncols: usize, rows: Vec<Vector>) -> Result<Self, LinAlgError> {
        let mut out = Vec::with_capacity(rows.len());
        for row in rows {
            if row.len() != ncols {
                return Err(LinAlgError::DimensionMismatch {
                    expected: ncols,
                    got: row.len(),
                });
            }
            if row.field != field {
                return Err(LinAlgError::FieldMismatch {
                    expected: field,
                    got: row.field,
                });
            }
            out.push(row.coords);
        }
        Ok(Matrix {
            field,
            ncols,
            rows: out,
        })
    }

    pub fn from_i64(field: FieldSpec, rows: &[&[i64]]) -> Self {
        let ncols = rows.first().map_or(0, |r| r.len());
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols);
                r.iter().map(|&x| field.from_i64(x)).collect()
            })
            .collect();
        Matrix { field, ncols, rows }
    }

    pub fn zeros(field: FieldSpec, nrows: usize, ncols: usize) -> Self {
        Matrix {
            field,
            ncols,
            rows: vec![vec![field.zero(); ncols]; nrows],
        }
    }

    pub fn identity(field: FieldSpec, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.rows[i][i] = field.one();
        }
        m
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> Vector {
        Vector {
            field: self.field,
            coords: self.rows[i].clone(),
        }
    }

    pub fn rows(&self) -> impl Iterator<Item = Vector> + '_ {
        (0..self.nrows()).map(|i| self.row(i))
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.rows[i][j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert_eq!(value.field(), self.field);
        self.rows[i][j] = value;
    }

    /// `self * v` for a column vector `v`.
    pub fn apply(&self, v: &Vector) -> Result<Vector, LinAlgError> {
        if v.len() != self.ncols {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.ncols,
                got: v.len(),
            });
        }
        let coords = self
            .rows
            .iter()
            .map(|row| {
                let mut acc = self.field.zero();
                for (a, b) in row.iter().zip(&v.coords) {
                    if !a.is_zero() && !b.is_zero() {
                        acc.add_assign_ref(&(a * b));
                    }
                }
                acc
            })
            .collect();
        Ok(Vector {
            field: self.field,
            coords,
        })
    }
}

/// Output of [`rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Reduced row-echelon form with zero rows dropped.
///
/// Pivoting is deterministic: for each column in order, the first remaining
/// row with a nonzero entry is used.
pub fn rref(m: &Matrix) -> Rref {
    let field = m.field;
    let mut rows = m.rows.clone();
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..m.ncols {
        let Some(found) = (next..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let inv = rows[next][col].inv().expect("nonzero pivot");
        for x in rows[next].iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        let pivot_row = rows[next].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            eliminate(row, &pivot_row, &factor, col);
        }
        pivots.push(col);
        next += 1;
        if next == rows.len() {
            break;
        }
    }
    rows.truncate(next);
    let rank = next;
    Rref {
        matrix: Matrix {
            field,
            ncols: m.ncols,
            rows,
        },
        rank,
        pivots,
    }
}

// row -= factor * pivot_row, touching only columns from `start` on.
fn eliminate(row: &mut [Scalar], pivot_row: &[Scalar], factor: &Scalar, start: usize) {
    for (x, p) in row[start..].iter_mut().zip(&pivot_row[start..]) {
        if !p.is_zero() {
            *x = &*x - &(factor * p);
        }
    }
}

/// A subspace of `field^ambient_dim`, stored as its RREF basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subspace {
    field: FieldSpec,
    ambient_dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace {
            field,
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(field: FieldSpec, ambient_dim: usize) -> Self {
        let m = Matrix::identity(field, ambient_dim);
        Subspace {
            field,
            ambient_dim,
            rows: m.rows,
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn span(
        field: FieldSpec,
        ambient_dim: usize,
        vectors: impl IntoIterator<Item = Vector>,
    ) -> Result<Self, LinAlgError> {
        let mut b = EchelonBuilder::new(field, ambient_dim);
        for v in vectors {
            b.insert(v)?;
        }
        Ok(b.finish())
    }

    /// Assembles a subspace from already-reduced rows. Callers guarantee the
    /// RREF shape; it is checked in debug builds.
    pub(crate) fn from_rref_rows(field: FieldSpec, ambient_dim: usize, mut rows: Vec<(usize, Vec<Scalar>)>) -> Self {
        rows.sort_by_key(|(p, _)| *p);
        let pivots: Vec<usize> = rows.iter().map(|(p, _)| *p).collect();
        let rows: Vec<Vec<Scalar>> = rows.into_iter().map(|(_, r)| r).collect();
        let s = Subspace {
            field,
            ambient_dim,
            rows,
            pivots,
        };
        debug_assert!(s.is_rref());
        s
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> impl Iterator<Item = Vector> + '_ {
        self.rows.iter().map(|r| Vector {
            field: self.field,
            coords: r.clone(),
        })
    }

    pub fn basis_matrix(&self) -> Matrix {
        Matrix {
            field: self.field,
            ncols: self.ambient_dim,
            rows: self.rows.clone(),
        }
    }

    fn check(&self, v: &Vector) -> Result<(), LinAlgError> {
        if v.len() != self.ambient_dim {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        if v.field != self.field {
            return Err(LinAlgError::FieldMismatch {
                expected: self.field,
                got: v.field,
            });
        }
        Ok(())
    }

    /// Reduces `v` against the basis; the result is zero iff `v` lies in the subspace.
    pub fn reduce(&self, v: &Vector) -> Result<Vector, LinAlgError> {
        self.check(v)?;
        let mut coords = v.coords.clone();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !coords[p].is_zero() {
                let factor = coords[p].clone();
                eliminate(&mut coords, row, &factor, p);
            }
        }
        Ok(Vector {
            field: self.field,
            coords,
        })
    }

    pub fn contains(&self, v: &Vector) -> Result<bool, LinAlgError> {
        Ok(self.reduce(v)?.is_zero())
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool, LinAlgError> {
        for v in self.basis() {
            if !other.contains(&v)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn is_rref(&self) -> bool {
        self.pivots.windows(2).all(|w| w[0] < w[1])
            && self.rows.iter().zip(&self.pivots).enumerate().all(|(i, (row, &p))| {
                row.len() == self.ambient_dim
                    && row[..p].iter().all(Scalar::is_zero)
                    && row[p].is_one()
                    && self
                        .rows
                        .iter()
                        .enumerate()
                        .all(|(j, other)| j == i || other[p].is_zero())
            })
    }
}

/// Incremental basis builder that keeps its rows fully reduced.
///
/// Inserting vectors one at a time and calling [`EchelonBuilder::finish`]
/// gives exactly the RREF of the matrix whose rows are the inserted vectors.
#[derive(Debug, Clone)]
pub struct EchelonBuilder {
    field: FieldSpec,
    ambient_dim: usize,
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl EchelonBuilder {
    pub fn new(field: FieldSpec, ambient_dim: usize) -> Self {
        EchelonBuilder {
            field,
            ambient_dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ambient_dim
    }

    pub fn insert(&mut self, v: Vector) -> Result<bool, LinAlgError> {
        if v.len() != self.ambient_dim {
            return Err(LinAlgError::DimensionMismatch {
                expected: self.ambient_dim,
                got: v.len(),
            });
        }
        if v.field != self.field {
            return Err(LinAlgError::FieldMismatch {
                expected: self.field,
                got: v.field,
            });
        }
        Ok(self.insert_coords(v.coords))
    }

    /// Adds a raw coordinate row; returns true if it enlarged the span.
    pub fn insert_coords(&mut self, mut coords: Vec<Scalar>) -> bool {
        debug_assert_eq!(coords.len(), self.ambient_dim);
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if !coords[p].is_zero() {
                let factor = coords[p].clone();
                eliminate(&mut coords, row, &factor, 0);
            }
        }
        let Some(p) = coords.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let inv = coords[p].inv().expect("nonzero pivot");
        for x in coords.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for row in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let factor = row[p].clone();
                eliminate(row, &coords, &factor, 0);
            }
        }
        self.rows.push(coords);
        self.pivots.push(p);
        true
    }

    pub fn finish(self) -> Subspace {
        let rows = self.pivots.into_iter().zip(self.rows).collect();
        Subspace::from_rref_rows(self.field, self.ambient_dim, rows)
    }
}

/// Null space `{v : m v = 0}` as an RREF subspace of `field^ncols`.
pub fn kernel_basis(m: &Matrix) -> Subspace {
    let n = m.ncols;
    let field = m.field;
    let r = rref(m);
    let mut is_pivot = vec![false; n];
    for &p in &r.pivots {
        is_pivot[p] = true;
    }
    let vectors = (0..n).filter(|&j| !is_pivot[j]).map(|free| {
        let mut coords = vec![field.zero(); n];
        coords[free] = field.one();
        for (row, &p) in r.matrix.rows.iter().zip(&r.pivots) {
            coords[p] = -&row[free];
        }
        Vector { field, coords }
    });
    Subspace::span(field, n, vectors).expect("kernel vectors have ambient length")
}

/// Span of all pairwise products of basis vectors of `s` and `t`.
///
/// `multiply` must be bilinear; then basis products span every product.
pub fn subspace_product<F>(s: &Subspace, t: &Subspace, multiply: F) -> Result<Subspace, LinAlgError>
where
    F: Fn(&Vector, &Vector) -> Vector,
{
    if s.ambient_dim != t.ambient_dim {
        return Err(LinAlgError::DimensionMismatch {
            expected: s.ambient_dim,
            got: t.ambient_dim,
        });
    }
    if s.field != t.field {
        return Err(LinAlgError::FieldMismatch {
            expected: s.field,
            got: t.field,
        });
    }
    let mut builder = EchelonBuilder::new(s.field, s.ambient_dim);
    'outer: for u in s.basis() {
        for w in t.basis() {
            if builder.is_full() {
                break 'outer;
            }
            builder.insert(multiply(&u, &w))?;
        }
    }
    Ok(builder.finish())
}
