//! Exact arithmetic and linear algebra over `F_p^n`.
//!
//! Vectors carry their modulus so that mixing groups is caught at the API
//! boundary. Subgroups are stored as the kernel of a reduced row-echelon
//! annihilator, so membership is a handful of dot products and two
//! `Subgroup` values are equal exactly when they are the same subgroup.

use std::fmt;
use std::ops::{Add, ControlFlow, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported prime.
pub const MAX_PRIME: u8 = 31;

/// Largest group order `p^n` any single run may touch.
pub const MAX_GROUP_ORDER: u64 = 1 << 24;

const PRIMES: [u8; 11] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31];

/// Validates a modulus and narrows it to the residue type.
pub fn check_prime(p: u32) -> Result<u8> {
    if p <= MAX_PRIME as u32 && PRIMES.contains(&(p as u8)) {
        Ok(p as u8)
    } else {
        Err(Error::InvalidModulus(p))
    }
}

/// `p^n`, or `None` on overflow.
pub fn group_order(p: u8, n: usize) -> Option<u64> {
    (p as u64).checked_pow(u32::try_from(n).ok()?)
}

/// `p^n`, failing with a resource error above [`MAX_GROUP_ORDER`].
pub fn checked_group_order(p: u8, n: usize) -> Result<u64> {
    match group_order(p, n) {
        Some(q) if q <= MAX_GROUP_ORDER => Ok(q),
        _ => Err(Error::guard(
            format!("group order {p}^{n} exceeds limit"),
            MAX_GROUP_ORDER,
        )),
    }
}

/// Multiplicative inverse of a nonzero residue.
pub fn inv_mod(a: u8, p: u8) -> u8 {
    debug_assert!(!a.is_multiple_of(p));
    // Fermat: a^(p-2)
    let (mut base, mut exp, mut acc) = (a as u32 % p as u32, p as u32 - 2, 1u32);
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p as u32;
        }
        base = base * base % p as u32;
        exp >>= 1;
    }
    acc as u8
}

/// Number of `k`-dimensional subspaces of `F_p^n` (the Gaussian binomial).
pub fn gaussian_binomial(n: usize, k: usize, p: u8) -> u128 {
    if k > n {
        return 0;
    }
    let q = p as u128;
    let mut num: u128 = 1;
    let mut den: u128 = 1;
    for i in 0..k {
        num *= q.pow((n - i) as u32) - 1;
        den *= q.pow((i + 1) as u32) - 1;
    }
    num / den
}

/// An element of `F_p^n`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpVec {
    p: u8,
    coords: Vec<u8>,
}

impl FpVec {
    pub fn new(p: u8, coords: Vec<u8>) -> Result<Self> {
        check_prime(p as u32)?;
        if let Some(&bad) = coords.iter().find(|&&c| c >= p) {
            return Err(Error::ResidueOutOfRange {
                value: bad as u32,
                p,
            });
        }
        Ok(FpVec { p, coords })
    }

    /// Reduces arbitrary integers mod `p`.
    pub fn from_ints(p: u8, coords: &[i64]) -> Result<Self> {
        check_prime(p as u32)?;
        let coords = coords
            .iter()
            .map(|&c| c.rem_euclid(p as i64) as u8)
            .collect();
        Ok(FpVec { p, coords })
    }

    pub fn zero(p: u8, n: usize) -> Self {
        FpVec {
            p,
            coords: vec![0; n],
        }
    }

    /// The standard basis vector with a one in coordinate `j` (zero-based).
    pub fn basis(p: u8, n: usize, j: usize) -> Self {
        let mut v = Self::zero(p, n);
        v.coords[j] = 1;
        v
    }

    /// Inverse of [`FpVec::index`].
    pub fn from_index(p: u8, n: usize, mut idx: u64) -> Self {
        let mut coords = vec![0u8; n];
        for c in coords.iter_mut().rev() {
            *c = (idx % p as u64) as u8;
            idx /= p as u64;
        }
        FpVec { p, coords }
    }

    /// Base-`p` index with the first coordinate most significant, so index
    /// order agrees with the lexicographic order of vectors.
    pub fn index(&self) -> u64 {
        self.coords
            .iter()
            .fold(0u64, |acc, &c| acc * self.p as u64 + c as u64)
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[u8] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Number of nonzero coordinates.
    pub fn weight(&self) -> usize {
        self.coords.iter().filter(|&&c| c != 0).count()
    }

    pub fn coord_sum(&self) -> u8 {
        (self.coords.iter().map(|&c| c as u32).sum::<u32>() % self.p as u32) as u8
    }

    /// Indices (zero-based) of nonzero coordinates.
    pub fn support(&self) -> Vec<usize> {
        self.coords
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn scale(&self, c: u8) -> FpVec {
        let p = self.p as u16;
        FpVec {
            p: self.p,
            coords: self
                .coords
                .iter()
                .map(|&x| (x as u16 * (c as u16 % p) % p) as u8)
                .collect(),
        }
    }

    pub fn ensure_compatible(&self, other: &FpVec) -> Result<()> {
        ensure_shape(other, self.p, self.dim())
    }

    pub fn checked_add(&self, other: &FpVec) -> Result<FpVec> {
        self.ensure_compatible(other)?;
        Ok(self + other)
    }

    pub fn checked_sub(&self, other: &FpVec) -> Result<FpVec> {
        self.ensure_compatible(other)?;
        Ok(self - other)
    }

    pub(crate) fn add_assign_scaled(&mut self, other: &FpVec, c: u8) {
        let p = self.p as u16;
        for (a, &b) in self.coords.iter_mut().zip(&other.coords) {
            *a = ((*a as u16 + b as u16 * c as u16) % p) as u8;
        }
    }
}

pub(crate) fn ensure_shape(v: &FpVec, p: u8, n: usize) -> Result<()> {
    if v.p != p {
        return Err(Error::ModulusMismatch {
            expected: p,
            found: v.p,
        });
    }
    if v.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: v.dim(),
        });
    }
    Ok(())
}

/// Coordinatewise sum. Panics if the operands live in different groups;
/// use [`FpVec::checked_add`] on unvalidated input.
impl Add for &FpVec {
    type Output = FpVec;

    fn add(self, rhs: &FpVec) -> FpVec {
        assert!(self.p == rhs.p && self.dim() == rhs.dim(), "group mismatch");
        let p = self.p;
        FpVec {
            p,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(&a, &b)| ((a as u16 + b as u16) % p as u16) as u8)
                .collect(),
        }
    }
}

impl Sub for &FpVec {
    type Output = FpVec;

    fn sub(self, rhs: &FpVec) -> FpVec {
        assert!(self.p == rhs.p && self.dim() == rhs.dim(), "group mismatch");
        let p = self.p;
        FpVec {
            p,
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(&a, &b)| ((a as u16 + p as u16 - b as u16) % p as u16) as u8)
                .collect(),
        }
    }
}

impl Neg for &FpVec {
    type Output = FpVec;

    fn neg(self) -> FpVec {
        let p = self.p;
        FpVec {
            p,
            coords: self.coords.iter().map(|&a| (p - a) % p).collect(),
        }
    }
}

impl fmt::Debug for FpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FpVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A dual vector `xi`, inducing the character `x -> e(<x, xi>)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct DualVec(pub FpVec);

impl DualVec {
    pub fn new(p: u8, coords: Vec<u8>) -> Result<Self> {
        FpVec::new(p, coords).map(DualVec)
    }

    pub fn as_vec(&self) -> &FpVec {
        &self.0
    }

    pub fn p(&self) -> u8 {
        self.0.p
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_zero()
    }
}

/// `sum_i coeffs[i] * vecs[i]` in `F_p^n`.
pub fn linear_combination(p: u8, n: usize, coeffs: &[u8], vecs: &[FpVec]) -> Result<FpVec> {
    check_prime(p as u32)?;
    if coeffs.len() != vecs.len() {
        return Err(Error::DimensionMismatch {
            expected: vecs.len(),
            found: coeffs.len(),
        });
    }
    let mut acc = FpVec::zero(p, n);
    for (&c, v) in coeffs.iter().zip(vecs) {
        ensure_shape(v, p, n)?;
        acc.add_assign_scaled(v, c % p);
    }
    Ok(acc)
}

/// The exponent `sum_n x_n xi_n mod p` of the character induced by `xi`, evaluated at `x`.
pub fn pairing(x: &FpVec, xi: &DualVec) -> Result<u8> {
    x.ensure_compatible(&xi.0)?;
    Ok(dot(x.coords(), xi.0.coords(), x.p))
}

#[inline]
pub(crate) fn dot(a: &[u8], b: &[u8], p: u8) -> u8 {
    let s: u32 = a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum();
    (s % p as u32) as u8
}

/// A `rows x cols` matrix over `F_p`, read as a homomorphism `F_p^cols -> F_p^rows`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FpMatrix {
    p: u8,
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl FpMatrix {
    pub fn new(p: u8, rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        check_prime(p as u32)?;
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: entries.len(),
            });
        }
        if let Some(&bad) = entries.iter().find(|&&e| e >= p) {
            return Err(Error::ResidueOutOfRange {
                value: bad as u32,
                p,
            });
        }
        Ok(FpMatrix {
            p,
            rows,
            cols,
            entries,
        })
    }

    pub fn zero(p: u8, rows: usize, cols: usize) -> Self {
        FpMatrix {
            p,
            rows,
            cols,
            entries: vec![0; rows * cols],
        }
    }

    pub fn identity(p: u8, n: usize) -> Self {
        let mut m = Self::zero(p, n, n);
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    /// Stacks dual vectors (or any vectors) of dimension `cols` as rows.
    pub fn from_rows(p: u8, cols: usize, rows: &[FpVec]) -> Result<Self> {
        check_prime(p as u32)?;
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            ensure_shape(r, p, cols)?;
            entries.extend_from_slice(r.coords());
        }
        Ok(FpMatrix {
            p,
            rows: rows.len(),
            cols,
            entries,
        })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.entries[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[u8] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_vec(&self, r: usize) -> FpVec {
        FpVec {
            p: self.p,
            coords: self.row(r).to_vec(),
        }
    }

    pub fn column(&self, c: usize) -> FpVec {
        FpVec {
            p: self.p,
            coords: (0..self.rows).map(|r| self.get(r, c)).collect(),
        }
    }

    pub fn columns(&self) -> Vec<FpVec> {
        (0..self.cols).map(|c| self.column(c)).collect()
    }

    pub fn apply(&self, x: &FpVec) -> Result<FpVec> {
        ensure_shape(x, self.p, self.cols)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &FpVec) -> FpVec {
        FpVec {
            p: self.p,
            coords: (0..self.rows)
                .map(|r| dot(self.row(r), x.coords(), self.p))
                .collect(),
        }
    }

    /// True when every row annihilates `x`.
    pub(crate) fn kills(&self, x: &[u8]) -> bool {
        (0..self.rows).all(|r| dot(self.row(r), x, self.p) == 0)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduced row-echelon form, rank, and pivot columns.
    pub fn rref(&self) -> (FpMatrix, usize, Vec<usize>) {
        let mut m = self.clone();
        let p = m.p as u16;
        let cols = m.cols;
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            m.swap_rows(row, pr);
            let inv = inv_mod(m.get(row, col), m.p) as u16;
            for c in 0..cols {
                let e = &mut m.entries[row * cols + c];
                *e = (*e as u16 * inv % p) as u8;
            }
            for r in 0..m.rows {
                let f = m.get(r, col) as u16;
                if r == row || f == 0 {
                    continue;
                }
                for c in 0..cols {
                    let sub = f * m.entries[row * cols + c] as u16 % p;
                    let e = &mut m.entries[r * cols + c];
                    *e = ((*e as u16 + p - sub) % p) as u8;
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, row, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1
    }

    /// Keeps the first `k` rows.
    fn truncated(mut self, k: usize) -> FpMatrix {
        self.entries.truncate(k * self.cols);
        self.rows = k;
        self
    }
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, "; ")?;
            }
            for (i, e) in self.row(r).iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{e}")?;
            }
        }
        write!(f, "] mod {}", self.p)
    }
}

pub fn hom_apply(m: &FpMatrix, x: &FpVec) -> Result<FpVec> {
    m.apply(x)
}

/// The unique homomorphism sending `e_j` to `images[j]`: the images become columns.
pub fn hom_from_basis_images(images: &[FpVec]) -> Result<FpMatrix> {
    let first = images
        .first()
        .ok_or_else(|| Error::input("no basis images given"))?;
    let (p, k) = (first.p(), first.dim());
    for v in images {
        ensure_shape(v, p, k)?;
    }
    let m = images.len();
    let mut entries = vec![0u8; k * m];
    for (j, v) in images.iter().enumerate() {
        for (i, &c) in v.coords().iter().enumerate() {
            entries[i * m + j] = c;
        }
    }
    FpMatrix::new(p, k, m, entries)
}

pub fn rref_rank(m: &FpMatrix) -> (FpMatrix, usize) {
    let (r, rank, _) = m.rref();
    (r, rank)
}

/// Basis of `{x : Mx = 0}`, one vector per free column in ascending order.
pub fn kernel_basis(m: &FpMatrix) -> Vec<FpVec> {
    let (r, rank, pivots) = m.rref();
    let p = m.p;
    let mut is_pivot = vec![false; m.cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..m.cols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = FpVec::zero(p, m.cols);
            v.coords[free] = 1;
            for (i, &pc) in pivots.iter().enumerate().take(rank) {
                v.coords[pc] = (p - r.get(i, free)) % p;
            }
            v
        })
        .collect()
}

/// A subgroup of `F_p^n`, stored as the kernel of its canonical annihilator.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Subgroup {
    n: usize,
    annihilator: FpMatrix,
}

impl Subgroup {
    /// The common kernel of the rows of `m`.
    pub fn kernel_of(m: &FpMatrix) -> Subgroup {
        let (r, rank, _) = m.rref();
        Subgroup {
            n: m.cols,
            annihilator: r.truncated(rank),
        }
    }

    /// `ker xi_1 ∩ ... ∩ ker xi_k`.
    pub fn from_characters(p: u8, n: usize, xis: &[DualVec]) -> Result<Subgroup> {
        let rows: Vec<FpVec> = xis.iter().map(|x| x.0.clone()).collect();
        Ok(Self::kernel_of(&FpMatrix::from_rows(p, n, &rows)?))
    }

    pub fn whole(p: u8, n: usize) -> Subgroup {
        Subgroup {
            n,
            annihilator: FpMatrix::zero(p, 0, n),
        }
    }

    pub fn trivial(p: u8, n: usize) -> Subgroup {
        Subgroup {
            n,
            annihilator: FpMatrix::identity(p, n),
        }
    }

    pub fn p(&self) -> u8 {
        self.annihilator.p
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn codim(&self) -> usize {
        self.annihilator.rows
    }

    pub fn dim(&self) -> usize {
        self.n - self.codim()
    }

    pub fn annihilator(&self) -> &FpMatrix {
        &self.annihilator
    }

    pub fn annihilator_rows(&self) -> Vec<DualVec> {
        (0..self.codim())
            .map(|r| DualVec(self.annihilator.row_vec(r)))
            .collect()
    }

    pub fn contains(&self, x: &FpVec) -> Result<bool> {
        ensure_shape(x, self.p(), self.n)?;
        Ok(self.annihilator.kills(x.coords()))
    }

    pub(crate) fn contains_unchecked(&self, x: &FpVec) -> bool {
        self.annihilator.kills(x.coords())
    }

    /// Number of elements, `p^(n-k)`, when it fits in a `u64`.
    pub fn order(&self) -> Option<u64> {
        group_order(self.p(), self.dim())
    }

    pub fn basis(&self) -> Vec<FpVec> {
        kernel_basis(&self.annihilator)
    }

    /// Every element, spanned from the kernel basis. Guarded by `limit`.
    pub fn elements(&self, limit: u64) -> Result<Vec<FpVec>> {
        let order = self.order().filter(|&o| o <= limit).ok_or_else(|| {
            Error::guard(
                format!("materializing a subgroup of order {}^{}", self.p(), self.dim()),
                limit,
            )
        })?;
        let basis = self.basis();
        let p = self.p();
        let mut out = Vec::with_capacity(order as usize);
        let mut coeffs = vec![0u8; basis.len()];
        loop {
            let mut v = FpVec::zero(p, self.n);
            for (b, &c) in basis.iter().zip(&coeffs) {
                if c != 0 {
                    v.add_assign_scaled(b, c);
                }
            }
            out.push(v);
            // odometer over coefficient tuples
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    return Ok(out);
                }
                coeffs[i] += 1;
                if coeffs[i] < p {
                    break;
                }
                coeffs[i] = 0;
                i += 1;
            }
        }
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subgroup(n={}, ker {:?})", self.n, self.annihilator)
    }
}

pub fn subgroup_contains(h: &Subgroup, x: &FpVec) -> Result<bool> {
    h.contains(x)
}

/// Upper bound on the number of subgroups [`enum_codim_subgroups`] will collect.
pub const MAX_SUBGROUP_LIST: u128 = 1 << 22;

/// Every codimension-`k` subgroup of `F_p^n`, in lexicographic order of canonical annihilators.
pub fn enum_codim_subgroups(p: u8, n: usize, k: usize) -> Result<Vec<Subgroup>> {
    check_prime(p as u32)?;
    if k > n {
        return Err(Error::input(format!("codimension {k} exceeds dimension {n}")));
    }
    let count = gaussian_binomial(n, k, p);
    if count > MAX_SUBGROUP_LIST {
        return Err(Error::guard(
            format!("listing {count} subgroups of codimension {k} in F_{p}^{n}"),
            MAX_SUBGROUP_LIST as u64,
        ));
    }
    let mut out = Vec::with_capacity(count as usize);
    let _ = for_each_codim_subgroup::<()>(p, n, k, |m| {
        out.push(Subgroup {
            n,
            annihilator: m.clone(),
        });
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Streams canonical annihilators of all codimension-`k` subgroups in
/// lexicographic order, stopping early when `visit` breaks.
///
/// The annihilators are generated entry by entry in row-major order with
/// values tried in ascending order, pruned so that every partial matrix
/// extends to a full-rank reduced row-echelon matrix. That makes the
/// output order lexicographic with no dead ends.
pub fn for_each_codim_subgroup<B>(
    p: u8,
    n: usize,
    k: usize,
    mut visit: impl FnMut(&FpMatrix) -> ControlFlow<B>,
) -> Result<Option<B>> {
    check_prime(p as u32)?;
    if k > n {
        return Err(Error::input(format!("codimension {k} exceeds dimension {n}")));
    }
    let mut gen = RrefGen {
        p,
        n,
        k,
        m: FpMatrix::zero(p, k, n),
        pivots: Vec::with_capacity(k),
        colzero: vec![true; n],
    };
    if k == 0 {
        return Ok(match visit(&gen.m) {
            ControlFlow::Break(b) => Some(b),
            ControlFlow::Continue(()) => None,
        });
    }
    Ok(match gen.row(0, &mut visit) {
        ControlFlow::Break(b) => Some(b),
        ControlFlow::Continue(()) => None,
    })
}

struct RrefGen {
    p: u8,
    n: usize,
    k: usize,
    m: FpMatrix,
    pivots: Vec<usize>,
    // column is zero in every completed row
    colzero: Vec<bool>,
}

impl RrefGen {
    fn row<B>(&mut self, r: usize, visit: &mut impl FnMut(&FpMatrix) -> ControlFlow<B>) -> ControlFlow<B> {
        if r == self.k {
            return visit(&self.m);
        }
        let floor = self.pivots.last().map_or(0, |&c| c + 1);
        // suffix[c] = usable pivot columns at index >= c for this row and later ones
        let mut suffix = vec![0usize; self.n + 1];
        for c in (0..self.n).rev() {
            suffix[c] = suffix[c + 1] + usize::from(c >= floor && self.colzero[c]);
        }
        self.leading(r, floor, &suffix, visit)
    }

    /// Places row `r`'s leading one at some column `c >= floor`, trying later columns
    /// first since a later pivot gives a lexicographically smaller row.
    fn leading<B>(
        &mut self,
        r: usize,
        floor: usize,
        suffix: &[usize],
        visit: &mut impl FnMut(&FpMatrix) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        let need = self.k - r;
        for c in (floor..self.n).rev() {
            if !self.colzero[c] || suffix[c] < need {
                continue;
            }
            self.m.entries[r * self.n + c] = 1;
            self.pivots.push(c);
            // later pivots must land on columns > c that stay zero in this row
            let avail = suffix[c + 1];
            let flow = self.tail(r, c + 1, avail, visit);
            self.pivots.pop();
            self.m.entries[r * self.n + c] = 0;
            flow?;
        }
        ControlFlow::Continue(())
    }

    /// Fills the entries of row `r` after its pivot.
    fn tail<B>(
        &mut self,
        r: usize,
        c: usize,
        avail: usize,
        visit: &mut impl FnMut(&FpMatrix) -> ControlFlow<B>,
    ) -> ControlFlow<B> {
        if c == self.n {
            let saved = self.colzero.clone();
            for col in 0..self.n {
                if self.m.entries[r * self.n + col] != 0 {
                    self.colzero[col] = false;
                }
            }
            let flow = self.row(r + 1, visit);
            self.colzero = saved;
            return flow;
        }
        let need = self.k - r - 1;
        let usable = self.colzero[c];
        for v in 0..self.p {
            let avail_after = if usable && v != 0 { avail - 1 } else { avail };
            if avail_after < need {
                break;
            }
            self.m.entries[r * self.n + c] = v;
            let flow = self.tail(r, c + 1, avail_after, visit);
            if flow.is_break() {
                self.m.entries[r * self.n + c] = 0;
                return flow;
            }
        }
        self.m.entries[r * self.n + c] = 0;
        ControlFlow::Continue(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(p: u8, c: &[u8]) -> FpVec {
        FpVec::new(p, c.to_vec()).unwrap()
    }

    fn mat(p: u8, rows: &[&[u8]]) -> FpMatrix {
        let cols = rows.first().map_or(0, |r| r.len());
        FpMatrix::new(p, rows.len(), cols, rows.concat()).unwrap()
    }

    #[test]
    fn rejects_composite_modulus_and_bad_residues() {
        assert_eq!(check_prime(4), Err(Error::InvalidModulus(4)));
        assert_eq!(check_prime(37), Err(Error::InvalidModulus(37)));
        assert!(FpVec::new(3, vec![0, 3]).is_err());
    }

    #[test]
    fn linear_combination_examples() {
        let r = linear_combination(2, 2, &[1, 1], &[v(2, &[1, 0]), v(2, &[1, 1])]).unwrap();
        assert_eq!(r, v(2, &[0, 1]));
        assert_eq!(linear_combination(3, 2, &[], &[]).unwrap(), v(3, &[0, 0]));
        let r = linear_combination(3, 2, &[2, 2], &[v(3, &[1, 0]), v(3, &[0, 1])]).unwrap();
        assert_eq!(r, v(3, &[2, 2]));
    }

    #[test]
    fn linear_combination_mismatch() {
        assert!(linear_combination(2, 2, &[1], &[v(2, &[1, 0, 1])]).is_err());
        assert!(linear_combination(2, 2, &[1], &[v(3, &[1, 0])]).is_err());
        assert!(linear_combination(2, 2, &[1, 1], &[v(2, &[1, 0])]).is_err());
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&v(2, &[1, 0, 1]), &DualVec(v(2, &[1, 1, 1]))).unwrap(), 0);
        assert_eq!(pairing(&v(5, &[0, 0]), &DualVec(v(5, &[3, 4]))).unwrap(), 0);
        assert_eq!(pairing(&v(3, &[1, 2]), &DualVec(v(3, &[2, 2]))).unwrap(), 0);
        assert!(pairing(&v(3, &[1, 2]), &DualVec(v(3, &[2]))).is_err());
    }

    #[test]
    fn hom_apply_examples() {
        let x = v(2, &[1, 1, 1]);
        assert_eq!(hom_apply(&FpMatrix::identity(2, 3), &x).unwrap(), x);
        assert!(hom_apply(&FpMatrix::zero(2, 2, 3), &x).unwrap().is_zero());
        let m = mat(2, &[&[1, 1, 0], &[0, 1, 1]]);
        assert_eq!(hom_apply(&m, &x).unwrap(), v(2, &[0, 0]));
        assert!(hom_apply(&m, &v(2, &[1, 1])).is_err());
    }

    #[test]
    fn basis_images_become_columns() {
        let m = hom_from_basis_images(&[v(2, &[1, 0]), v(2, &[1, 1])]).unwrap();
        assert_eq!(m, mat(2, &[&[1, 1], &[0, 1]]));
        let z = hom_from_basis_images(&[v(3, &[0, 0]), v(3, &[0, 0])]).unwrap();
        assert_eq!(z, FpMatrix::zero(3, 2, 2));
        assert!(hom_from_basis_images(&[]).is_err());
        assert!(hom_from_basis_images(&[v(3, &[0, 0]), v(3, &[0])]).is_err());
    }

    #[test]
    fn rref_examples() {
        let id = FpMatrix::identity(5, 4);
        assert_eq!(rref_rank(&id), (id.clone(), 4));
        let z = FpMatrix::zero(3, 2, 3);
        assert_eq!(rref_rank(&z), (z.clone(), 0));
        let m = mat(2, &[&[1, 1], &[1, 1]]);
        assert_eq!(rref_rank(&m), (mat(2, &[&[1, 1], &[0, 0]]), 1));
        // scaling to a leading one over F_5
        let m = mat(5, &[&[0, 3, 1], &[2, 4, 0]]);
        let (r, rank) = rref_rank(&m);
        assert_eq!(rank, 2);
        assert_eq!(r, mat(5, &[&[1, 0, 1], &[0, 1, 2]]));
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(kernel_basis(&mat(2, &[&[1, 1]])), vec![v(2, &[1, 1])]);
        assert!(kernel_basis(&FpMatrix::identity(3, 3)).is_empty());
        assert_eq!(kernel_basis(&mat(3, &[&[1, 2]])), vec![v(3, &[1, 1])]);
    }

    #[test]
    fn subgroup_membership() {
        let parity = Subgroup::kernel_of(&mat(2, &[&[1, 1, 1]]));
        assert!(parity.contains(&v(2, &[0, 0, 0])).unwrap());
        assert!(parity.contains(&v(2, &[1, 1, 0])).unwrap());
        assert!(!parity.contains(&v(2, &[1, 0, 0])).unwrap());
        assert!(parity.contains(&v(2, &[1, 0])).is_err());
        assert!(parity.contains(&v(3, &[1, 0, 0])).is_err());
    }

    #[test]
    fn equivalent_annihilators_give_equal_subgroups() {
        let a = Subgroup::kernel_of(&mat(3, &[&[1, 2, 0], &[0, 1, 1]]));
        let b = Subgroup::kernel_of(&mat(3, &[&[1, 0, 1], &[2, 1, 0], &[1, 0, 1]]));
        assert_eq!(a, b);
        assert_eq!(a.codim(), 2);
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enum_codim_subgroups(2, 3, 1).unwrap().len(), 7);
        assert_eq!(enum_codim_subgroups(3, 2, 1).unwrap().len(), 4);
        for p in [2, 3, 5] {
            let all = enum_codim_subgroups(p, 3, 0).unwrap();
            assert_eq!(all, vec![Subgroup::whole(p, 3)]);
        }
        assert_eq!(enum_codim_subgroups(2, 4, 4).unwrap(), vec![Subgroup::trivial(2, 4)]);
        assert!(enum_codim_subgroups(2, 3, 4).is_err());
    }

    #[test]
    fn enumeration_is_sorted_unique_and_canonical() {
        for (p, n) in [(2u8, 5usize), (3, 4), (5, 3), (7, 2)] {
            for k in 0..=n {
                let subs = enum_codim_subgroups(p, n, k).unwrap();
                assert_eq!(subs.len() as u128, gaussian_binomial(n, k, p));
                assert!(subs.windows(2).all(|w| w[0].annihilator().entries() < w[1].annihilator().entries()));
                for h in &subs {
                    assert_eq!(h.codim(), k);
                    assert_eq!(&Subgroup::kernel_of(h.annihilator()), h);
                }
            }
        }
    }

    #[test]
    fn early_exit_stops_the_stream() {
        let mut seen = 0;
        let hit = for_each_codim_subgroup(2, 4, 2, |_| {
            seen += 1;
            if seen == 3 {
                ControlFlow::Break(seen)
            } else {
                ControlFlow::Continue(())
            }
        })
        .unwrap();
        assert_eq!(hit, Some(3));
        assert_eq!(seen, 3);
    }

    #[test]
    fn elements_match_order() {
        let h = Subgroup::kernel_of(&mat(3, &[&[1, 1, 1, 0]]));
        let els = h.elements(1 << 10).unwrap();
        assert_eq!(els.len(), 27);
        assert!(els.iter().all(|x| h.contains(x).unwrap()));
        assert!(h.elements(10).is_err());
    }

    #[test]
    fn index_roundtrip_preserves_order() {
        let mut prev: Option<FpVec> = None;
        for i in 0..81 {
            let x = FpVec::from_index(3, 4, i);
            assert_eq!(x.index(), i);
            if let Some(q) = prev {
                assert!(q < x);
            }
            prev = Some(x);
        }
    }

    #[test]
    fn gaussian_binomial_values() {
        assert_eq!(gaussian_binomial(9, 3, 2), 788_035);
        assert_eq!(gaussian_binomial(4, 2, 3), 130);
        assert_eq!(gaussian_binomial(3, 5, 2), 0);
    }
}
