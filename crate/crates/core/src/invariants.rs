//! Cup-length and zero-divisors-cup-length.
//!
//! Both numbers are nilpotency lengths of ideals: `cl(A) = max{n : (A⁺)ⁿ ≠ 0}`
//! and `zcl_r(A) = max{n : Kⁿ ≠ 0}` for `K = ker μ_r`. Powers are computed one
//! degree at a time; since every generator is homogeneous, `Iⁿ⁺¹` is spanned
//! by products `f · g` of a generator `f` of `I` with a recorded generator `g`
//! of `Iⁿ`. Each recorded generator remembers the word of factors that
//! produced it, which is how witnesses are extracted.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::exactla::EchelonBuilder;
use crate::exactnum::Scalar;
use crate::galg::{graded_kernel_mu, mu, power_dim, tensor_power, Algebra, AlgebraError, Element, Grading, Terms};

/// Largest algebra accepted by [`cup_length_oracle`].
pub const ORACLE_MAX_DIM: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("r must be at least 2, got {0}")]
    InvalidR(usize),
    #[error("oracle is limited to dimension {ORACLE_MAX_DIM}, algebra has dimension {0}")]
    OracleGuard(usize),
    #[error("witness has no factors")]
    EmptyWitness,
    #[error("cup-length chain is empty")]
    EmptyChain,
    #[error("chain element {0} is not homogeneous of positive degree")]
    BadChainElement(usize),
    #[error("chain product is zero")]
    ChainProductZero,
    #[error("internal invariant violated: {0}")]
    Violation(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClResult {
    pub value: usize,
    /// Basis indices of positive degree whose ordered product is nonzero.
    pub chain: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZclMethod {
    Exact,
    Bounds,
}

impl ZclMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            ZclMethod::Exact => "exact",
            ZclMethod::Bounds => "bounds",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZclResult {
    pub r: usize,
    /// Known only when `lower == upper` or the computation was exact.
    pub value: Option<usize>,
    pub method: ZclMethod,
    pub lower: usize,
    /// Always `r · cl(A)`.
    pub upper: usize,
    pub witness: Option<Witness>,
    /// `dim Kⁿ` for `n = 1, 2, …` as far as the exact computation went.
    pub power_dims: Vec<usize>,
}

/// Zero divisors in `A^r` with a nonzero ordered product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub r: usize,
    pub factors: Vec<Element>,
    pub product: Element,
    /// Present when the witness was produced by [`witness_extend`].
    pub projection: Option<Projection>,
}

impl Witness {
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Data for the slot-projection check of an extended witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Projection {
    /// Product of the witness that was extended, in `A^{r-1}`.
    pub seed_product: Element,
    /// The cup-length product `y₁ ⋯ y_ℓ'` in `A`.
    pub chain_product: Element,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessCheck {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

struct Generator {
    word: Vec<usize>,
    degree: u32,
    terms: Terms,
}

struct Level {
    gens: Vec<Generator>,
    builders: BTreeMap<u32, EchelonBuilder>,
}

impl Level {
    fn dim(&self) -> usize {
        self.builders.values().map(EchelonBuilder::rank).sum()
    }
}

/// Successive powers `I, I², …` of the ideal spanned by homogeneous `factors`,
/// stopping at the first zero power or after `max_len` levels.
fn ideal_powers(alg: &Algebra, grading: &Grading, factors: &[(u32, Terms)], max_len: Option<usize>) -> Vec<Level> {
    let field = alg.field();
    let mut first = Level {
        gens: Vec::new(),
        builders: BTreeMap::new(),
    };
    for (i, (degree, terms)) in factors.iter().enumerate() {
        let block = &grading.blocks[degree];
        let builder = first
            .builders
            .entry(*degree)
            .or_insert_with(|| EchelonBuilder::new(field, block.len()));
        let mut local = vec![field.zero(); block.len()];
        for (k, c) in terms {
            local[grading.local_of[*k]] = c.clone();
        }
        if builder.insert_coords(local) {
            first.gens.push(Generator {
                word: vec![i],
                degree: *degree,
                terms: terms.clone(),
            });
        }
    }
    if first.gens.is_empty() {
        return Vec::new();
    }
    let mut levels = vec![first];
    while max_len.is_none_or(|m| levels.len() < m) {
        let prev = levels.last().expect("nonempty");
        let mut next = Level {
            gens: Vec::new(),
            builders: BTreeMap::new(),
        };
        for (i, (fdeg, fterms)) in factors.iter().enumerate() {
            for g in &prev.gens {
                let degree = fdeg + g.degree;
                let Some(block) = grading.blocks.get(&degree) else {
                    continue;
                };
                let builder = next
                    .builders
                    .entry(degree)
                    .or_insert_with(|| EchelonBuilder::new(field, block.len()));
                if builder.is_full() {
                    continue;
                }
                let mut local = vec![field.zero(); block.len()];
                let mut nonzero = false;
                for (a_idx, a) in fterms {
                    for (b_idx, b) in &g.terms {
                        for (k, c) in alg.basis_product(*a_idx, *b_idx) {
                            local[grading.local_of[k]].add_assign_ref(&(&(a * b) * &c));
                            nonzero = true;
                        }
                    }
                }
                if !nonzero || local.iter().all(Scalar::is_zero) {
                    continue;
                }
                let terms: Terms = local
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(l, c)| (block[l], c.clone()))
                    .collect();
                if builder.insert_coords(local) {
                    let mut word = Vec::with_capacity(g.word.len() + 1);
                    word.push(i);
                    word.extend_from_slice(&g.word);
                    next.gens.push(Generator { word, degree, terms });
                }
            }
        }
        if next.gens.is_empty() {
            break;
        }
        levels.push(next);
    }
    levels
}

/// `cl(A)` as the nilpotency length of the augmentation ideal, with a chain of
/// basis elements realizing it.
pub fn cup_length(a: &Algebra) -> ClResult {
    let grading = a.grading();
    let positive: Vec<usize> = (0..a.dim()).filter(|&i| a.degree(i) > 0).collect();
    let factors: Vec<(u32, Terms)> = positive
        .iter()
        .map(|&i| (a.degree(i), vec![(i, a.field().one())]))
        .collect();
    let levels = ideal_powers(a, &grading, &factors, None);
    let chain = levels
        .last()
        .map(|top| top.gens[0].word.iter().map(|&w| positive[w]).collect())
        .unwrap_or_default();
    ClResult {
        value: levels.len(),
        chain: Some(chain),
    }
}

/// `cl(A)` by exhaustive search over products of positive-degree basis elements.
pub fn cup_length_oracle(a: &Algebra) -> Result<usize, InvariantError> {
    if a.dim() > ORACLE_MAX_DIM {
        return Err(InvariantError::OracleGuard(a.dim()));
    }
    let positive: Vec<Element> = (1..a.dim()).map(|i| a.basis_element(i)).collect();
    let mut memo = HashMap::new();
    let mut best = 0;
    for e in &positive {
        best = best.max(1 + longest_extension(a, e, &positive, &mut memo)?);
    }
    Ok(best)
}

// Longest n such that v·e₁⋯eₙ ≠ 0 for some choice of the given elements.
// Only the line through v matters, so states are normalized to a leading 1.
fn longest_extension(
    a: &Algebra,
    v: &Element,
    gens: &[Element],
    memo: &mut HashMap<Vec<(usize, Scalar)>, usize>,
) -> Result<usize, InvariantError> {
    let key = normalized(v);
    if let Some(&n) = memo.get(&key) {
        return Ok(n);
    }
    let mut best = 0;
    for g in gens {
        let w = a.multiply(v, g)?;
        if !w.is_zero() {
            best = best.max(1 + longest_extension(a, &w, gens, memo)?);
        }
    }
    memo.insert(key, best);
    Ok(best)
}

fn normalized(v: &Element) -> Vec<(usize, Scalar)> {
    let inv = v.terms().next().map(|(_, c)| c.inv().expect("nonzero"));
    v.terms()
        .map(|(k, c)| (k, inv.as_ref().map_or(c.clone(), |i| c * i)))
        .collect()
}

/// `zcl_r(A) = max{n : Kⁿ ≠ 0}`, `K = ker μ_r`, stopping early at `r · cl(A)`.
pub fn zcl_exact(a: &Algebra, r: usize, ceiling: usize) -> Result<ZclResult, InvariantError> {
    if r < 2 {
        return Err(InvariantError::InvalidR(r));
    }
    let kernel = graded_kernel_mu(a, r, ceiling)?;
    let power = tensor_power(a, r, ceiling)?;
    let upper = r * cup_length(a).value;
    let grading = power.grading();
    let factors: Vec<(u32, Terms)> = kernel
        .basis_terms()
        .into_iter()
        .map(|t| (power.degree(t[0].0), t))
        .collect();
    let levels = ideal_powers(&power, &grading, &factors, Some(upper.max(1)));
    let value = if upper == 0 { 0 } else { levels.len() };
    let witness = match levels.last() {
        Some(top) if value > 0 => {
            let elems = top.gens[0]
                .word
                .iter()
                .map(|&i| power.element(factors[i].1.iter().cloned()))
                .collect::<Result<Vec<_>, _>>()?;
            let product = power.product_of(&elems)?;
            if product.is_zero() {
                return Err(InvariantError::Violation(
                    "recorded ideal-power generator has a zero product".into(),
                ));
            }
            Some(Witness {
                r,
                factors: elems,
                product,
                projection: None,
            })
        }
        _ => None,
    };
    Ok(ZclResult {
        r,
        value: Some(value),
        method: ZclMethod::Exact,
        lower: value,
        upper,
        witness,
        power_dims: levels.iter().map(Level::dim).collect(),
    })
}

/// Certified bounds `lower ≤ zcl_r(A) ≤ r · cl(A)`.
///
/// The lower bound comes from an exact witness at the largest `r₀ ≤ r` with
/// `dim(A)^r₀ ≤ seed_ceiling`, extended one step at a time by the cup-length
/// chain. If even `r₀ = 2` is out of reach the chain alone seeds `r = 2`.
pub fn zcl_bounds(a: &Algebra, r: usize, seed_ceiling: usize) -> Result<ZclResult, InvariantError> {
    if r < 2 {
        return Err(InvariantError::InvalidR(r));
    }
    let cl = cup_length(a);
    let upper = r * cl.value;
    if cl.value == 0 {
        return Ok(ZclResult {
            r,
            value: Some(0),
            method: ZclMethod::Bounds,
            lower: 0,
            upper: 0,
            witness: None,
            power_dims: Vec::new(),
        });
    }
    let chain: Vec<Element> = cl
        .chain
        .as_ref()
        .expect("cup_length always records a chain")
        .iter()
        .map(|&i| a.basis_element(i))
        .collect();
    let seed_r = (2..=r).rev().find(|&s| power_dim(a, s) <= seed_ceiling as u128);
    let (mut witness, power_dims) = match seed_r {
        Some(s) => {
            let exact = zcl_exact(a, s, seed_ceiling)?;
            let w = exact.witness.ok_or_else(|| {
                InvariantError::Violation("exact zcl with positive cup-length gave no witness".into())
            })?;
            let dims = if s == r { exact.power_dims } else { Vec::new() };
            (w, dims)
        }
        None => {
            let unit = tensor_power(a, 1, usize::MAX)?.one();
            (extend_unchecked(a, 1, &[], &unit, &chain)?, Vec::new())
        }
    };
    while witness.r < r {
        witness = witness_extend(a, &witness, &chain)?;
    }
    let lower = witness.len();
    Ok(ZclResult {
        r,
        value: (lower == upper).then_some(lower),
        method: ZclMethod::Bounds,
        lower,
        upper,
        witness: Some(witness),
        power_dims,
    })
}

/// Lifts a witness for `r` to one for `r + 1`: the old factors become
/// `x_j ⊗ 1`, followed by `ȳ_i = 1⊗⋯⊗1⊗y_i − y_i⊗1⊗⋯⊗1` for each chain element.
pub fn witness_extend(a: &Algebra, w: &Witness, chain: &[Element]) -> Result<Witness, InvariantError> {
    if w.factors.is_empty() {
        return Err(InvariantError::EmptyWitness);
    }
    extend_unchecked(a, w.r, &w.factors, &w.product, chain)
}

fn extend_unchecked(
    a: &Algebra,
    r: usize,
    factors: &[Element],
    product: &Element,
    chain: &[Element],
) -> Result<Witness, InvariantError> {
    if chain.is_empty() {
        return Err(InvariantError::EmptyChain);
    }
    for (i, y) in chain.iter().enumerate() {
        if y.fingerprint() != a.fingerprint() {
            return Err(AlgebraError::AlgebraMismatch.into());
        }
        if !a.homogeneous_degree(y).is_some_and(|d| d > 0) {
            return Err(InvariantError::BadChainElement(i));
        }
    }
    let chain_product = a.product_of(chain)?;
    if chain_product.is_zero() {
        return Err(InvariantError::ChainProductZero);
    }
    let lifted = tensor_power(a, r + 1, usize::MAX)?;
    let dim = a.dim();
    let shift = lifted.dim() / dim;

    let mut new_factors = Vec::with_capacity(factors.len() + chain.len());
    for x in factors {
        new_factors.push(lifted.element(x.terms().map(|(k, c)| (k * dim, c.clone())))?);
    }
    for y in chain {
        let right = y.terms().map(|(k, c)| (k, c.clone()));
        let left = y.terms().map(|(k, c)| (k * shift, -c));
        new_factors.push(lifted.element(right.chain(left))?);
    }
    let new_product = lifted.product_of(&new_factors)?;
    if new_product.is_zero() {
        return Err(InvariantError::Violation(format!(
            "extended witness at r = {} has zero product",
            r + 1
        )));
    }
    Ok(Witness {
        r: r + 1,
        factors: new_factors,
        product: new_product,
        projection: Some(Projection {
            seed_product: product.clone(),
            chain_product,
        }),
    })
}

/// Re-checks a witness from scratch; for extended witnesses also applies
/// `1⊗⋯⊗1⊗ψ` and compares with the seed product.
pub fn verify_witness(a: &Algebra, w: &Witness) -> WitnessCheck {
    let mut diagnostics = Vec::new();
    let power = match tensor_power(a, w.r, usize::MAX) {
        Ok(p) => p,
        Err(e) => {
            return WitnessCheck {
                valid: false,
                diagnostics: vec![format!("cannot lay out A^{}: {e}", w.r)],
            }
        }
    };
    if w.factors.is_empty() {
        diagnostics.push("witness has no factors".to_string());
    }
    for (i, f) in w.factors.iter().enumerate() {
        match mu(a, w.r, f) {
            Ok(image) if image.is_zero() => {}
            Ok(_) => diagnostics.push(format!("factor {i} is not a zero divisor")),
            Err(e) => diagnostics.push(format!("factor {i}: {e}")),
        }
    }
    match power.product_of(&w.factors) {
        Ok(p) => {
            if p != w.product {
                diagnostics.push("recorded product differs from the recomputed product".to_string());
            }
            if p.is_zero() {
                diagnostics.push("product of factors is zero".to_string());
            }
        }
        Err(e) => diagnostics.push(format!("product: {e}")),
    }
    if let Some(proj) = &w.projection {
        match project_last_slot(a, w, proj) {
            Ok(image) => {
                if image.is_zero() {
                    diagnostics.push("ψ-projection of the product is zero".to_string());
                } else if image != proj.seed_product {
                    diagnostics.push("ψ-projection differs from the seed product".to_string());
                }
            }
            Err(e) => diagnostics.push(format!("ψ-projection: {e}")),
        }
    }
    WitnessCheck {
        valid: diagnostics.is_empty(),
        diagnostics,
    }
}

/// Applies `1⊗⋯⊗1⊗ψ: A^r → A^{r-1}` to the witness product, where ψ is the
/// coordinate functional at the leading basis index of the chain product,
/// scaled so that ψ(y₁⋯y_ℓ') = 1. ψ vanishes on every other basis element,
/// in particular on all other degrees.
pub fn project_last_slot(a: &Algebra, w: &Witness, proj: &Projection) -> Result<Element, InvariantError> {
    if w.r < 2 {
        return Err(InvariantError::InvalidR(w.r));
    }
    let (pivot, lead) = proj
        .chain_product
        .terms()
        .next()
        .ok_or(InvariantError::ChainProductZero)?;
    let psi = lead.inv().map_err(AlgebraError::from)?;
    let target = tensor_power(a, w.r - 1, usize::MAX)?;
    let dim = a.dim();
    let terms = w
        .product
        .terms()
        .filter(|(idx, _)| idx % dim == pivot)
        .map(|(idx, c)| (idx / dim, c * &psi));
    Ok(target.element(terms)?)
}
