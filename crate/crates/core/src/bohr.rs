//! Leveled recurrence certification.
//!
//! In `F_p^n` every Bohr neighborhood of zero contains a subgroup, so a set
//! fails to be recurrent exactly when some subgroup misses it. The
//! deficiency level of `S` is the least codimension at which that happens.

use std::collections::HashSet;
use std::f64::consts::PI;
use std::ops::ControlFlow;

use num_traits::Float;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::fpgroup::{
    check_prime, checked_group_order, enum_codim_subgroups, for_each_codim_subgroup,
    gaussian_binomial, DualVec, FpVec, Subgroup,
};
use crate::setops::VecSet;

/// Most subgroups a single level of a deficiency scan may visit.
pub const MAX_LEVEL_SUBGROUPS: u128 = 1 << 24;

/// Largest `p^n` for which the element-listing oracle runs.
pub const ORACLE_MAX_ORDER: u64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Outcome {
    DeficientAt { k: usize, witness: Subgroup },
    RecurrentUpTo { k_max: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelScan {
    pub k: usize,
    /// Subgroups examined at this level.
    pub checked: u128,
    /// All codimension-`k` subgroups.
    pub total: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeficiencyReport {
    pub set_id: String,
    pub p: u8,
    pub n: usize,
    pub k_max: usize,
    pub outcome: Outcome,
    pub levels: Vec<LevelScan>,
}

impl DeficiencyReport {
    /// The level at which the set fails, if any.
    pub fn deficient_at(&self) -> Option<usize> {
        match self.outcome {
            Outcome::DeficientAt { k, .. } => Some(k),
            Outcome::RecurrentUpTo { .. } => None,
        }
    }

    pub fn witness(&self) -> Option<&Subgroup> {
        match &self.outcome {
            Outcome::DeficientAt { witness, .. } => Some(witness),
            Outcome::RecurrentUpTo { .. } => None,
        }
    }

    /// JSON form used by the CLI; `wall_time_ms` is added only when given.
    pub fn to_json(&self, wall_time_ms: Option<u64>) -> Value {
        let (outcome, level, witness) = match &self.outcome {
            Outcome::DeficientAt { k, witness } => (
                "deficient",
                json!(k),
                json!(annihilator_rows(witness)),
            ),
            Outcome::RecurrentUpTo { k_max } => ("recurrent", json!(k_max), Value::Null),
        };
        let mut v = json!({
            "set_id": self.set_id,
            "p": self.p,
            "n": self.n,
            "k_max": self.k_max,
            "outcome": outcome,
            "level": level,
            "witness_annihilator": witness,
            "counts": self.levels.iter().map(|l| json!({
                "k": l.k,
                "checked": l.checked.to_string(),
                "total": l.total.to_string(),
            })).collect::<Vec<_>>(),
        });
        if let Some(ms) = wall_time_ms {
            v["wall_time_ms"] = json!(ms);
        }
        v
    }
}

pub(crate) fn annihilator_rows(h: &Subgroup) -> Vec<Vec<u8>> {
    (0..h.codim())
        .map(|r| h.annihilator().row(r).to_vec())
        .collect()
}

/// Lexicographically least codimension-`k` subgroup avoiding `s`, and the
/// number of subgroups examined to find it (or all of them).
pub fn find_avoiding_subgroup(s: &VecSet, k: usize) -> Result<(Option<Subgroup>, u128)> {
    let (p, n) = (s.p(), s.dim());
    if k > n {
        return Err(Error::input(format!("level {k} exceeds dimension {n}")));
    }
    let total = gaussian_binomial(n, k, p);
    if total > MAX_LEVEL_SUBGROUPS {
        return Err(Error::guard(
            format!("{total} subgroups of codimension {k} in F_{p}^{n}"),
            MAX_LEVEL_SUBGROUPS as u64,
        ));
    }
    let mut checked = 0u128;
    let hit = for_each_codim_subgroup(p, n, k, |ann| {
        checked += 1;
        if s.iter().any(|x| ann_kills(ann, x)) {
            ControlFlow::Continue(())
        } else {
            ControlFlow::Break(Subgroup::kernel_of(ann))
        }
    })?;
    Ok((hit, checked))
}

#[inline]
fn ann_kills(ann: &crate::fpgroup::FpMatrix, x: &FpVec) -> bool {
    ann.kills(x.coords())
}

/// Scans levels `1..=k_max` in order and stops at the first avoiding subgroup.
pub fn bohr_deficiency(s: &VecSet, k_max: usize) -> Result<DeficiencyReport> {
    bohr_deficiency_named(s, k_max, "S")
}

pub fn bohr_deficiency_named(s: &VecSet, k_max: usize, set_id: &str) -> Result<DeficiencyReport> {
    let (p, n) = (s.p(), s.dim());
    if k_max > n {
        return Err(Error::input(format!("k_max {k_max} exceeds dimension {n}")));
    }
    for k in 1..=k_max {
        let total = gaussian_binomial(n, k, p);
        if total > MAX_LEVEL_SUBGROUPS {
            return Err(Error::guard(
                format!("{total} subgroups of codimension {k} in F_{p}^{n}"),
                MAX_LEVEL_SUBGROUPS as u64,
            ));
        }
    }
    let mut levels = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let total = gaussian_binomial(n, k, p);
        let (hit, checked) = find_avoiding_subgroup(s, k)?;
        levels.push(LevelScan { k, checked, total });
        if let Some(witness) = hit {
            return Ok(DeficiencyReport {
                set_id: set_id.to_string(),
                p,
                n,
                k_max,
                outcome: Outcome::DeficientAt { k, witness },
                levels,
            });
        }
    }
    Ok(DeficiencyReport {
        set_id: set_id.to_string(),
        p,
        n,
        k_max,
        outcome: Outcome::RecurrentUpTo { k_max },
        levels,
    })
}

/// True iff every codimension-`k` subgroup meets `s`, checked by listing
/// each subgroup's elements from its kernel basis and probing a hash set.
pub fn meets_all_subgroups_oracle(s: &VecSet, k: usize) -> Result<bool> {
    let (p, n) = (s.p(), s.dim());
    if k > n {
        return Err(Error::input(format!("level {k} exceeds dimension {n}")));
    }
    let order = checked_group_order(p, n)?;
    if order > ORACLE_MAX_ORDER {
        return Err(Error::guard(
            format!("element-listing oracle on F_{p}^{n}"),
            ORACLE_MAX_ORDER,
        ));
    }
    let members: HashSet<&FpVec> = s.iter().collect();
    for h in enum_codim_subgroups(p, n, k)? {
        let hit = h
            .elements(ORACLE_MAX_ORDER)?
            .iter()
            .any(|x| members.contains(x));
        if !hit {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of evaluating a Bohr set of characters on `F_p^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BohrSet {
    Whole,
    Subgroup(Subgroup),
}

/// Distances `|e(t/p) - 1|` for nontrivial `t`, bracketed outward.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharacterThresholds {
    pub p: u8,
    /// Bracket around `2 sin(pi/p)`, the smallest nontrivial distance.
    pub min_lo: f64,
    pub min_hi: f64,
}

impl CharacterThresholds {
    pub fn for_prime(p: u8) -> Result<Self> {
        check_prime(p as u32)?;
        let t = match p {
            2 => 2.0,
            3 => 3f64.sqrt(),
            _ => 2.0 * (PI / p as f64).sin(),
        };
        let slack = 8.0 * f64::EPSILON * t;
        Ok(CharacterThresholds {
            p,
            min_lo: t - slack,
            min_hi: t + slack,
        })
    }

    /// True when every nontrivial character value is at distance at least `eps`
    /// from 1. Inside the rounding bracket this answers true, treating `eps`
    /// as equal to the threshold.
    pub fn all_nontrivial_violate(&self, eps: f64) -> bool {
        eps <= self.min_hi
    }
}

/// `{x : max_j |chi_j(x) - 1| < eps}` for characters `chi_j = e(<., xi_j>)`.
///
/// When `eps <= 2 sin(pi/p)` the set is `∩ ker chi_j`. When `eps > 2` it is
/// everything. In between, each nonzero character takes some value closer
/// than `eps` to 1 and is dropped, so the result is the whole group; for
/// `p <= 3` this is exact, for larger `p` the true Bohr set is not a
/// subgroup and the whole group is returned as its subgroup hull.
pub fn bohr_set_from_characters<F: Float>(p: u8, n: usize, xis: &[DualVec], eps: F) -> Result<BohrSet> {
    let eps = eps
        .to_f64()
        .ok_or_else(|| Error::input("epsilon is not a number"))?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::input(format!("epsilon must be positive, got {eps}")));
    }
    for xi in xis {
        crate::fpgroup::ensure_shape(xi.as_vec(), p, n)?;
    }
    if eps > 2.0 {
        return Ok(BohrSet::Whole);
    }
    let table = CharacterThresholds::for_prime(p)?;
    let binding: Vec<DualVec> = if table.all_nontrivial_violate(eps) {
        xis.iter().filter(|x| !x.is_trivial()).cloned().collect()
    } else {
        Vec::new()
    };
    let h = Subgroup::from_characters(p, n, &binding)?;
    Ok(if h.codim() == 0 {
        BohrSet::Whole
    } else {
        BohrSet::Subgroup(h)
    })
}

/// Direct membership in the Bohr set, evaluating the characters on the unit circle.
pub fn in_bohr_set(x: &FpVec, xis: &[DualVec], eps: f64) -> Result<bool> {
    for xi in xis {
        let t = crate::fpgroup::pairing(x, xi)? as f64;
        let angle = 2.0 * PI * t / x.p() as f64;
        let dist = ((angle.cos() - 1.0).powi(2) + angle.sin().powi(2)).sqrt();
        if dist >= eps {
            return Ok(false);
        }
    }
    Ok(true)
}
