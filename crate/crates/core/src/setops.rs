//! Finite sets of vectors and the set operators built on them: difference
//! sets, iterated differences, distinct-summand sumsets, and preimages.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fpgroup::{check_prime, checked_group_order, ensure_shape, FpMatrix, FpVec, Subgroup};

/// A sorted, duplicate-free set of vectors in one ambient group `F_p^n`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct VecSet {
    p: u8,
    n: usize,
    elements: Vec<FpVec>,
}

impl VecSet {
    pub fn new(p: u8, n: usize, elements: impl IntoIterator<Item = FpVec>) -> Result<Self> {
        check_prime(p as u32)?;
        let mut elements: Vec<FpVec> = elements.into_iter().collect();
        for v in &elements {
            ensure_shape(v, p, n)?;
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(VecSet { p, n, elements })
    }

    /// Builds from elements already known to share `(p, n)`.
    pub(crate) fn from_unchecked(p: u8, n: usize, mut elements: Vec<FpVec>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        VecSet { p, n, elements }
    }

    pub fn empty(p: u8, n: usize) -> Self {
        VecSet {
            p,
            n,
            elements: Vec::new(),
        }
    }

    /// All of `F_p^n`.
    pub fn everything(p: u8, n: usize) -> Result<Self> {
        let q = checked_group_order(p, n)?;
        Ok(VecSet {
            p,
            n,
            elements: (0..q).map(|i| FpVec::from_index(p, n, i)).collect(),
        })
    }

    pub fn p(&self) -> u8 {
        self.p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[FpVec] {
        &self.elements
    }

    pub fn iter(&self) -> std::slice::Iter<'_, FpVec> {
        self.elements.iter()
    }

    pub fn contains(&self, x: &FpVec) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn contains_zero(&self) -> bool {
        self.elements.first().is_some_and(FpVec::is_zero)
    }

    pub fn ensure_same_group(&self, other: &VecSet) -> Result<()> {
        if self.p != other.p {
            return Err(Error::ModulusMismatch {
                expected: self.p,
                found: other.p,
            });
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        Ok(())
    }

    pub fn intersection(&self, other: &VecSet) -> Result<VecSet> {
        self.ensure_same_group(other)?;
        Ok(VecSet {
            p: self.p,
            n: self.n,
            elements: self
                .elements
                .iter()
                .filter(|x| other.contains(x))
                .cloned()
                .collect(),
        })
    }

    pub fn union(&self, other: &VecSet) -> Result<VecSet> {
        self.ensure_same_group(other)?;
        let mut all = self.elements.clone();
        all.extend(other.elements.iter().cloned());
        Ok(Self::from_unchecked(self.p, self.n, all))
    }

    pub fn is_subset(&self, other: &VecSet) -> bool {
        self.p == other.p && self.n == other.n && self.elements.iter().all(|x| other.contains(x))
    }

    /// Image under a homomorphism.
    pub fn image(&self, rho: &FpMatrix) -> Result<VecSet> {
        if rho.p() != self.p {
            return Err(Error::ModulusMismatch {
                expected: self.p,
                found: rho.p(),
            });
        }
        if rho.cols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: rho.cols(),
            });
        }
        Ok(Self::from_unchecked(
            self.p,
            rho.rows(),
            self.elements.iter().map(|x| rho.apply_unchecked(x)).collect(),
        ))
    }

    /// First element (in set order) lying in `h`.
    pub fn first_in(&self, h: &Subgroup) -> Option<&FpVec> {
        self.elements.iter().find(|x| h.contains_unchecked(x))
    }

    pub fn meets(&self, h: &Subgroup) -> bool {
        self.first_in(h).is_some()
    }
}

impl<'a> IntoIterator for &'a VecSet {
    type Item = &'a FpVec;
    type IntoIter = std::slice::Iter<'a, FpVec>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

/// `{a - a'}` over all pairs, or over pairs with `a != a'` when `distinct_only`.
pub fn difference_set(a: &VecSet, distinct_only: bool) -> VecSet {
    let mut out = BTreeSet::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in a.iter().enumerate() {
            if distinct_only && i == j {
                continue;
            }
            out.insert(x - y);
        }
    }
    VecSet::from_unchecked(a.p, a.n, out.into_iter().collect())
}

/// `{(a - b) - (c - d) : a, b, c, d mutually distinct}`.
///
/// Groups ordered pairs by their difference; a target `u - w` is reachable
/// iff some pair realizing `u` and some pair realizing `w` use four
/// distinct elements. Agrees with [`delta2_brute`].
pub fn delta2(a: &VecSet) -> VecSet {
    let m = a.len();
    if m < 4 {
        return VecSet::empty(a.p, a.n);
    }
    let mut by_diff: HashMap<FpVec, Vec<(usize, usize)>> = HashMap::new();
    for i in 0..m {
        for j in 0..m {
            if i != j {
                by_diff
                    .entry(&a.elements[i] - &a.elements[j])
                    .or_default()
                    .push((i, j));
            }
        }
    }
    let diffs: Vec<(&FpVec, &Vec<(usize, usize)>)> = by_diff.iter().collect();
    let mut out = BTreeSet::new();
    for (u, pu) in &diffs {
        for (w, pw) in &diffs {
            let t = *u - *w;
            if out.contains(&t) {
                continue;
            }
            let disjoint = pu.iter().any(|&(i, j)| {
                pw.iter()
                    .any(|&(k, l)| k != i && k != j && l != i && l != j)
            });
            if disjoint {
                out.insert(t);
            }
        }
    }
    VecSet::from_unchecked(a.p, a.n, out.into_iter().collect())
}

/// Reference form of [`delta2`]: all ordered quadruples of distinct indices.
pub fn delta2_brute(a: &VecSet) -> VecSet {
    let e = a.elements();
    let m = e.len();
    let mut out = BTreeSet::new();
    for i in 0..m {
        for j in 0..m {
            for k in 0..m {
                for l in 0..m {
                    if i == j || i == k || i == l || j == k || j == l || k == l {
                        continue;
                    }
                    out.insert(&(&e[i] - &e[j]) - &(&e[k] - &e[l]));
                }
            }
        }
    }
    VecSet::from_unchecked(a.p, a.n, out.into_iter().collect())
}

/// `{a_1 + ... + a_d : a_i in A mutually distinct}`.
///
/// A 0/1 knapsack over group elements: `reach[j]` holds the sums of `j`
/// distinct elements from the processed prefix. Cost is `|A| * d * p^n`.
pub fn dfold_distinct_sumset(a: &VecSet, d: usize) -> Result<VecSet> {
    if d < 1 {
        return Err(Error::input("sumset order d must be at least 1"));
    }
    if a.len() < d {
        return Ok(VecSet::empty(a.p, a.n));
    }
    let q = checked_group_order(a.p, a.n)? as usize;
    let mut reach = vec![vec![false; q]; d + 1];
    reach[0][0] = true;
    let p = a.p as usize;
    // digits least significant first
    let digits: Vec<Vec<usize>> = a
        .iter()
        .map(|x| x.coords().iter().rev().map(|&c| c as usize).collect())
        .collect();
    let shift = |mut x: usize, y: &[usize]| -> usize {
        let (mut out, mut mul) = (0, 1);
        for &yd in y {
            out += (x % p + yd) % p * mul;
            x /= p;
            mul *= p;
        }
        out
    };
    for (taken, e) in digits.iter().enumerate() {
        for j in (1..=d.min(taken + 1)).rev() {
            let (lo, hi) = reach.split_at_mut(j);
            let src = &lo[j - 1];
            let dst = &mut hi[0];
            for (x, &on) in src.iter().enumerate() {
                if on {
                    dst[shift(x, e)] = true;
                }
            }
        }
    }
    Ok(VecSet::from_unchecked(
        a.p,
        a.n,
        reach[d]
            .iter()
            .enumerate()
            .filter(|(_, &on)| on)
            .map(|(i, _)| FpVec::from_index(a.p, a.n, i as u64))
            .collect(),
    ))
}

/// Reference form of [`dfold_distinct_sumset`]: sums over all `d`-subsets.
pub fn dfold_distinct_sumset_brute(a: &VecSet, d: usize) -> Result<VecSet> {
    if d < 1 {
        return Err(Error::input("sumset order d must be at least 1"));
    }
    let mut out = BTreeSet::new();
    for_each_subset(a.len(), d, |idx| {
        let mut s = FpVec::zero(a.p, a.n);
        for &i in idx {
            s = &s + &a.elements[i];
        }
        out.insert(s);
    });
    Ok(VecSet::from_unchecked(a.p, a.n, out.into_iter().collect()))
}

/// Calls `f` with every `d`-subset of `0..m` as an ascending index list.
pub fn for_each_subset(m: usize, d: usize, mut f: impl FnMut(&[usize])) {
    if d > m {
        return;
    }
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        f(&idx);
        let Some(i) = (0..d).rev().find(|&i| idx[i] != i + m - d) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `{x in E : rho(x) in S}`.
pub fn preimage_intersect(rho: &FpMatrix, s: &VecSet, e: &VecSet) -> Result<VecSet> {
    for (got, want) in [(rho.p(), s.p), (e.p, s.p)] {
        if got != want {
            return Err(Error::ModulusMismatch {
                expected: want,
                found: got,
            });
        }
    }
    if rho.cols() != e.n {
        return Err(Error::DimensionMismatch {
            expected: e.n,
            found: rho.cols(),
        });
    }
    if rho.rows() != s.n {
        return Err(Error::DimensionMismatch {
            expected: s.n,
            found: rho.rows(),
        });
    }
    Ok(VecSet {
        p: e.p,
        n: e.n,
        elements: e
            .iter()
            .filter(|x| s.contains(&rho.apply_unchecked(x)))
            .cloned()
            .collect(),
    })
}

/// A lifted element `c = e_F` found by the coset-class argument for
/// distinct-summand sumsets.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SumsetLift {
    /// Zero-based coordinates whose basis vectors are summed.
    pub support: Vec<usize>,
    pub lifted: FpVec,
    pub image: FpVec,
}

/// Searches `rho^{-1}(S) ∩ E_d ∩ H` the way the lifting argument does.
///
/// The basis vectors `e_1..e_m` are split into classes by their coset of
/// `H` (the coset of `e_j` is read off as column `j` of the annihilator).
/// Inside one class, any `d` distinct basis vectors whose images sum into
/// `S` give `c = e_F` with `rho(c) in S`; when `p | d` the sum of `d`
/// elements of one coset lies in `H`. Returns the first hit scanning
/// classes in order of their smallest coordinate.
pub fn lift_witness_sumset(
    rho: &FpMatrix,
    s: &VecSet,
    h: &Subgroup,
    d: usize,
    max_subsets: u64,
) -> Result<Option<SumsetLift>> {
    let p = rho.p();
    if h.ambient_dim() != rho.cols() || h.p() != p {
        return Err(Error::DimensionMismatch {
            expected: rho.cols(),
            found: h.ambient_dim(),
        });
    }
    if rho.rows() != s.dim() || s.p() != p {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: rho.rows(),
        });
    }
    if d == 0 || !d.is_multiple_of(p as usize) {
        return Err(Error::Precondition(format!(
            "d={d} must be a positive multiple of p={p}"
        )));
    }
    let images = rho.columns();
    let ann = h.annihilator();
    for class in coset_classes(ann) {
        let mut found = None;
        let mut budget = max_subsets;
        let mut stop = false;
        for_each_subset(class.len(), d, |idx| {
            if stop {
                return;
            }
            if budget == 0 {
                stop = true;
                return;
            }
            budget -= 1;
            let mut img = FpVec::zero(p, rho.rows());
            for &i in idx {
                img = &img + &images[class[i]];
            }
            if s.contains(&img) {
                let support: Vec<usize> = idx.iter().map(|&i| class[i]).collect();
                let mut lifted = FpVec::zero(p, rho.cols());
                for &j in &support {
                    lifted = &lifted + &FpVec::basis(p, rho.cols(), j);
                }
                found = Some(SumsetLift {
                    support,
                    lifted,
                    image: img,
                });
                stop = true;
            }
        });
        if found.is_some() {
            return Ok(found);
        }
        if budget == 0 {
            return Err(Error::guard("lift search over d-subsets", max_subsets));
        }
    }
    Ok(None)
}

/// Four distinct elements of `Q` realizing a lifted iterated difference.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DifferenceLift {
    pub q: [FpVec; 4],
    /// `q1 - q2 - q3 + q4`
    pub lifted: FpVec,
    pub image: FpVec,
}

/// Searches `rho^{-1}(S) ∩ Δ₂(Q) ∩ H`: partitions `Q` by cosets of `H` and
/// looks for distinct `q1..q4` in one class with `rho(q1 - q2 - q3 + q4) in S`.
/// Such a combination of same-coset elements always lies in `H`.
pub fn lift_witness_delta2(
    rho: &FpMatrix,
    s: &VecSet,
    q: &VecSet,
    h: &Subgroup,
) -> Result<Option<DifferenceLift>> {
    if q.dim() != rho.cols() || h.ambient_dim() != rho.cols() {
        return Err(Error::DimensionMismatch {
            expected: rho.cols(),
            found: q.dim(),
        });
    }
    if rho.rows() != s.dim() {
        return Err(Error::DimensionMismatch {
            expected: s.dim(),
            found: rho.rows(),
        });
    }
    let ann = h.annihilator();
    let mut classes: Vec<(FpVec, Vec<&FpVec>)> = Vec::new();
    for x in q {
        let key = ann.apply_unchecked(x);
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(x),
            None => classes.push((key, vec![x])),
        }
    }
    for (_, members) in &classes {
        let imgs: Vec<FpVec> = members.iter().map(|x| rho.apply_unchecked(x)).collect();
        let m = members.len();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for e in 0..m {
                        if a == b || a == c || a == e || b == c || b == e || c == e {
                            continue;
                        }
                        let img = &(&(&imgs[a] - &imgs[b]) - &imgs[c]) + &imgs[e];
                        if s.contains(&img) {
                            let lifted =
                                &(&(members[a] - members[b]) - members[c]) + members[e];
                            return Ok(Some(DifferenceLift {
                                q: [
                                    members[a].clone(),
                                    members[b].clone(),
                                    members[c].clone(),
                                    members[e].clone(),
                                ],
                                lifted,
                                image: img,
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(None)
}

/// Groups coordinates `0..n` by the coset of `H` containing `e_j`.
fn coset_classes(ann: &FpMatrix) -> Vec<Vec<usize>> {
    let mut classes: Vec<(FpVec, Vec<usize>)> = Vec::new();
    for j in 0..ann.cols() {
        let key = ann.column(j);
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(j),
            None => classes.push((key, vec![j])),
        }
    }
    classes.into_iter().map(|(_, m)| m).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(p: u8, c: &[u8]) -> FpVec {
        FpVec::new(p, c.to_vec()).unwrap()
    }

    fn set(p: u8, n: usize, vs: &[&[u8]]) -> VecSet {
        VecSet::new(p, n, vs.iter().map(|c| v(p, c))).unwrap()
    }

    #[test]
    fn new_sorts_and_dedups() {
        let s = set(3, 2, &[&[2, 1], &[0, 1], &[2, 1]]);
        assert_eq!(s.elements(), &[v(3, &[0, 1]), v(3, &[2, 1])]);
        assert!(VecSet::new(3, 2, [v(3, &[1])]).is_err());
    }

    #[test]
    fn difference_set_examples() {
        let one = set(3, 2, &[&[1, 2]]);
        assert!(difference_set(&one, true).is_empty());
        assert_eq!(difference_set(&one, false), set(3, 2, &[&[0, 0]]));
        let a = set(2, 2, &[&[0, 0], &[1, 1]]);
        assert_eq!(difference_set(&a, true), set(2, 2, &[&[1, 1]]));
    }

    #[test]
    fn delta2_examples() {
        let three = set(3, 2, &[&[0, 0], &[1, 0], &[0, 1]]);
        assert!(delta2(&three).is_empty());
        let basis = set(2, 4, &[&[1, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 0], &[0, 0, 0, 1]]);
        assert_eq!(delta2(&basis), set(2, 4, &[&[1, 1, 1, 1]]));
        assert_eq!(delta2_brute(&basis), set(2, 4, &[&[1, 1, 1, 1]]));
    }

    #[test]
    fn dfold_examples() {
        let zero = set(3, 1, &[&[0]]);
        assert!(dfold_distinct_sumset(&zero, 2).unwrap().is_empty());
        let all = set(3, 1, &[&[0], &[1], &[2]]);
        assert_eq!(dfold_distinct_sumset(&all, 3).unwrap(), set(3, 1, &[&[0]]));
        assert!(dfold_distinct_sumset(&all, 0).is_err());
        assert!(dfold_distinct_sumset_brute(&all, 0).is_err());
    }

    #[test]
    fn preimage_examples() {
        let p = 2;
        let e = set(p, 2, &[&[0, 1], &[1, 1]]);
        let s = set(p, 2, &[&[1, 1], &[1, 0]]);
        let id = FpMatrix::identity(p, 2);
        assert_eq!(preimage_intersect(&id, &s, &e).unwrap(), e.intersection(&s).unwrap());
        let zero = FpMatrix::zero(p, 2, 2);
        assert!(preimage_intersect(&zero, &s, &e).unwrap().is_empty());

        let rho = crate::fpgroup::hom_from_basis_images(&[
            v(2, &[0, 0]),
            v(2, &[0, 1]),
            v(2, &[1, 0]),
            v(2, &[1, 1]),
        ])
        .unwrap();
        let e4 = set(2, 4, &[&[1, 1, 1, 1]]);
        let with_zero = set(2, 2, &[&[0, 0]]);
        assert_eq!(preimage_intersect(&rho, &with_zero, &e4).unwrap(), e4);
        let without = set(2, 2, &[&[0, 1], &[1, 1]]);
        assert!(preimage_intersect(&rho, &without, &e4).unwrap().is_empty());
        assert!(preimage_intersect(&rho, &e4, &e4).is_err());
    }

    #[test]
    fn subsets_enumerated_in_order() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| seen.push(s.to_vec()));
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        let mut count = 0;
        for_each_subset(3, 0, |_| count += 1);
        assert_eq!(count, 1);
        for_each_subset(2, 3, |_| panic!("no 3-subsets of a 2-set"));
    }

    #[test]
    fn sumset_lift_lands_in_subgroup() {
        // rho: F_3^9 -> F_3^1, columns cycle through 0,1,2
        let p = 3;
        let images: Vec<FpVec> = (0..9).map(|j| v(p, &[(j % 3) as u8])).collect();
        let rho = crate::fpgroup::hom_from_basis_images(&images).unwrap();
        let s = set(p, 1, &[&[1]]);
        for h in crate::fpgroup::enum_codim_subgroups(p, 9, 1).unwrap().iter().take(50) {
            if let Some(w) = lift_witness_sumset(&rho, &s, h, 3, 1 << 20).unwrap() {
                assert!(h.contains(&w.lifted).unwrap());
                assert_eq!(w.lifted.weight(), 3);
                assert!(s.contains(&rho.apply(&w.lifted).unwrap()));
            }
        }
    }

    #[test]
    fn delta2_lift_lands_in_subgroup() {
        let p = 2;
        let n = 5;
        let q = VecSet::new(p, n, (0..n).map(|j| FpVec::basis(p, n, j))).unwrap();
        let rho = FpMatrix::identity(p, n);
        let s = delta2(&q);
        let h = Subgroup::whole(p, n);
        let w = lift_witness_delta2(&rho, &s, &q, &h).unwrap().unwrap();
        assert!(s.contains(&w.lifted));
        let distinct: BTreeSet<_> = w.q.iter().collect();
        assert_eq!(distinct.len(), 4);
    }
}
