//! Generators for the concrete sets and families, and the encoding between
//! `F_2^(W*W)` and finite subsets of a `W x W` lattice window.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::colorings::Hypergraph;
use crate::error::{Error, Result};
use crate::fpgroup::{check_prime, FpVec};
use crate::setops::{for_each_subset, VecSet};

/// Largest binomial `C(n, d)` [`weight_d_set`] will materialize.
pub const MAX_WEIGHT_SET: u64 = 1 << 22;

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u64) / (i as u64 + 1);
    }
    acc
}

/// All 0/1 vectors of weight `d` in `F_p^n`, i.e. `{e_F : F ⊆ [1, n], |F| = d}`.
pub fn weight_d_set(p: u8, n: usize, d: usize) -> Result<VecSet> {
    check_prime(p as u32)?;
    if d == 0 || d > n {
        return Err(Error::input(format!("weight d={d} outside 1..={n}")));
    }
    let count = binomial(n, d);
    if count > MAX_WEIGHT_SET {
        return Err(Error::guard(format!("C({n},{d}) weight-{d} vectors"), MAX_WEIGHT_SET));
    }
    let mut out = Vec::with_capacity(count as usize);
    for_each_subset(n, d, |idx| {
        let mut v = vec![0u8; n];
        for &i in idx {
            v[i] = 1;
        }
        out.push(FpVec::new(p, v).expect("0/1 entries"));
    });
    VecSet::new(p, n, out)
}

/// Indicator vector of `F ⊆ [1, n]` (one-based).
pub fn e_of(f: &[usize], p: u8, n: usize) -> Result<FpVec> {
    check_prime(p as u32)?;
    let mut v = vec![0u8; n];
    for &i in f {
        if i == 0 || i > n {
            return Err(Error::input(format!("vertex {i} outside 1..={n}")));
        }
        v[i - 1] = 1;
    }
    FpVec::new(p, v)
}

/// `{e_F : F in family}` inside `F_p^N`.
pub fn edge_vectors(fam: &Hypergraph, p: u8) -> Result<VecSet> {
    let vs = fam
        .edges()
        .iter()
        .map(|e| e_of(e, p, fam.n()))
        .collect::<Result<Vec<_>>>()?;
    VecSet::new(p, fam.n(), vs)
}

/// All 3-term progressions `{a, a + d, a + 2d}` inside `[1, N]`.
pub fn ap3_hypergraph(n: usize) -> Result<Hypergraph> {
    if n < 3 {
        return Err(Error::input(format!("need N >= 3 for 3-term progressions, got {n}")));
    }
    let mut edges = Vec::new();
    for d in 1..=(n - 1) / 2 {
        for a in 1..=n - 2 * d {
            edges.push(vec![a, a + d, a + 2 * d]);
        }
    }
    Hypergraph::new(n, edges)
}

/// A `W x W` window of the integer lattice with points `(row, col)`, `1 <= row, col <= W`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LatticeWindow {
    w: usize,
}

impl LatticeWindow {
    pub fn new(w: usize) -> Result<Self> {
        if w < 2 {
            return Err(Error::input(format!("window side must be at least 2, got {w}")));
        }
        Ok(LatticeWindow { w })
    }

    pub fn side(&self) -> usize {
        self.w
    }

    pub fn len(&self) -> usize {
        self.w * self.w
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, (r, c): (usize, usize)) -> bool {
        (1..=self.w).contains(&r) && (1..=self.w).contains(&c)
    }

    /// Row-major bijection from `1..=W*W` onto the window.
    pub fn point(&self, i: usize) -> (usize, usize) {
        ((i - 1) / self.w + 1, (i - 1) % self.w + 1)
    }

    /// Inverse of [`LatticeWindow::point`].
    pub fn index(&self, (r, c): (usize, usize)) -> usize {
        (r - 1) * self.w + c
    }

    /// Top-left corners and side lengths of every axis-parallel square fully inside.
    pub fn squares(&self) -> Vec<[(usize, usize); 4]> {
        let mut out = Vec::new();
        for r in 1..self.w {
            for c in 1..self.w {
                for d in 1..=self.w - r.max(c) {
                    out.push([(r, c), (r, c + d), (r + d, c), (r + d, c + d)]);
                }
            }
        }
        out
    }
}

/// A finite set of lattice points inside a window; the group operation is
/// symmetric difference.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinSet {
    w: usize,
    points: BTreeSet<(usize, usize)>,
}

impl FinSet {
    pub fn new(window: LatticeWindow, points: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let points: BTreeSet<_> = points.into_iter().collect();
        if let Some(&pt) = points.iter().find(|&&pt| !window.contains(pt)) {
            return Err(Error::input(format!("point {pt:?} outside the {0}x{0} window", window.w)));
        }
        Ok(FinSet { w: window.w, points })
    }

    pub fn window(&self) -> LatticeWindow {
        LatticeWindow { w: self.w }
    }

    pub fn points(&self) -> &BTreeSet<(usize, usize)> {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn symmetric_difference(&self, other: &FinSet) -> Result<FinSet> {
        if self.w != other.w {
            return Err(Error::DimensionMismatch {
                expected: self.w,
                found: other.w,
            });
        }
        Ok(FinSet {
            w: self.w,
            points: self.points.symmetric_difference(&other.points).copied().collect(),
        })
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Sorted `(row,col)` pairs, e.g. `{(1,1) (1,2)}`.
impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (r, c)) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "({r},{c})")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for FinSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.points.iter().map(|&(r, c)| [r, c]))
    }
}

/// Axis-parallel square vertex sets in the window as a hypergraph on the
/// row-major point indices `1..=W*W`.
pub fn gallai_square_hypergraph(w: usize) -> Result<Hypergraph> {
    let win = LatticeWindow::new(w)?;
    let edges = win
        .squares()
        .into_iter()
        .map(|sq| sq.iter().map(|&pt| win.index(pt)).collect::<Vec<_>>());
    Hypergraph::new(win.len(), edges)
}

/// The same squares as four-point [`FinSet`]s.
pub fn s_square_set(w: usize) -> Result<Vec<FinSet>> {
    let win = LatticeWindow::new(w)?;
    let mut out: Vec<FinSet> = win
        .squares()
        .into_iter()
        .map(|sq| FinSet {
            w,
            points: sq.into_iter().collect(),
        })
        .collect();
    out.sort();
    Ok(out)
}

/// `x -> b(support(x))` with `b` the row-major window bijection.
pub fn fin_encode(x: &FpVec, window: LatticeWindow) -> Result<FinSet> {
    if x.p() != 2 {
        return Err(Error::input(format!("encoding needs p=2, got p={}", x.p())));
    }
    if let Some(&i) = x.support().iter().find(|&&i| i >= window.len()) {
        return Err(Error::input(format!(
            "coordinate {} outside the {}-point window",
            i + 1,
            window.len()
        )));
    }
    Ok(FinSet {
        w: window.w,
        points: x.support().into_iter().map(|i| window.point(i + 1)).collect(),
    })
}

/// Inverse of [`fin_encode`], landing in `F_2^(W*W)`.
pub fn fin_decode(s: &FinSet) -> FpVec {
    let win = s.window();
    let mut v = vec![0u8; win.len()];
    for &pt in &s.points {
        v[win.index(pt) - 1] = 1;
    }
    FpVec::new(2, v).expect("0/1 entries")
}

/// `Fin_2` of the window: all two-point sets, encoded in `F_2^(W*W)`.
pub fn fin2_vertices(w: usize) -> Result<VecSet> {
    let win = LatticeWindow::new(w)?;
    weight_d_set(2, win.len(), 2)
}

/// `S_□` of the window, encoded in `F_2^(W*W)`.
pub fn s_square_vectors(w: usize) -> Result<VecSet> {
    let win = LatticeWindow::new(w)?;
    VecSet::new(2, win.len(), s_square_set(w)?.iter().map(fin_decode))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_sets() {
        assert_eq!(weight_d_set(2, 4, 2).unwrap().len(), 6);
        for p in [2u8, 3, 5] {
            let all = weight_d_set(p, 5, 5).unwrap();
            assert_eq!(all.elements(), &[FpVec::new(p, vec![1; 5]).unwrap()]);
        }
        assert_eq!(
            weight_d_set(3, 3, 3).unwrap().elements(),
            &[FpVec::new(3, vec![1, 1, 1]).unwrap()]
        );
        assert!(weight_d_set(2, 3, 0).is_err());
        assert!(weight_d_set(2, 3, 4).is_err());
    }

    #[test]
    fn indicator_vectors() {
        assert!(e_of(&[], 3, 4).unwrap().is_zero());
        assert_eq!(e_of(&[1, 3], 2, 3).unwrap(), FpVec::new(2, vec![1, 0, 1]).unwrap());
        assert!(e_of(&[4], 2, 3).is_err());
        assert!(e_of(&[0], 2, 3).is_err());
        let mut pairs = Vec::new();
        for_each_subset(4, 2, |s| pairs.push(s.iter().map(|i| i + 1).collect::<Vec<_>>()));
        let fam = Hypergraph::new(4, pairs).unwrap();
        for p in [2u8, 3] {
            assert_eq!(edge_vectors(&fam, p).unwrap(), weight_d_set(p, 4, 2).unwrap());
        }
    }

    #[test]
    fn progressions() {
        let h = ap3_hypergraph(5).unwrap();
        assert_eq!(
            h.edges(),
            &[vec![1, 2, 3], vec![1, 3, 5], vec![2, 3, 4], vec![3, 4, 5]]
        );
        assert_eq!(ap3_hypergraph(3).unwrap().edges().len(), 1);
        assert!(ap3_hypergraph(2).is_err());
    }

    #[test]
    fn squares_small_windows() {
        assert_eq!(gallai_square_hypergraph(2).unwrap().edges(), &[vec![1, 2, 3, 4]]);
        let h = gallai_square_hypergraph(3).unwrap();
        assert_eq!(h.edges().len(), 5);
        assert!(h.edges().contains(&vec![1, 3, 7, 9]));
        assert!(gallai_square_hypergraph(1).is_err());
        assert_eq!(s_square_set(2).unwrap().len(), 1);
        let s3 = s_square_set(3).unwrap();
        assert_eq!(s3.len(), 5);
        assert!(s3.iter().all(|s| s.len() == 4));
        assert!(s_square_set(0).is_err());
    }

    #[test]
    fn encoding_examples() {
        let win = LatticeWindow::new(3).unwrap();
        assert!(fin_encode(&FpVec::zero(2, 9), win).unwrap().is_empty());
        let e1 = fin_encode(&FpVec::basis(2, 9, 0), win).unwrap();
        assert_eq!(e1.points().iter().copied().collect::<Vec<_>>(), vec![(1, 1)]);
        assert_eq!(e1.to_string(), "{(1,1)}");
        assert!(fin_encode(&FpVec::basis(2, 10, 9), win).is_err());
        assert!(fin_encode(&FpVec::basis(3, 9, 0), win).is_err());
        assert!(FinSet::new(win, [(0, 1)]).is_err());
        assert_eq!(serde_json::to_string(&e1).unwrap(), "[[1,1]]");
    }

    #[test]
    fn encoding_is_a_group_isomorphism_on_3x3() {
        let win = LatticeWindow::new(3).unwrap();
        let all = VecSet::everything(2, 9).unwrap();
        for x in all.iter().step_by(7) {
            let ex = fin_encode(x, win).unwrap();
            assert_eq!(&fin_decode(&ex), x);
            for y in all.iter().step_by(11) {
                let ey = fin_encode(y, win).unwrap();
                assert_eq!(fin_encode(&(x + y), win).unwrap(), ex.symmetric_difference(&ey).unwrap());
            }
        }
    }
}
