//! Experiment drivers and their JSON reports.
//!
//! Every driver checks its scale guard before doing any work, draws all
//! randomness from a seeded ChaCha stream recorded in the report, and
//! re-verifies every witness it embeds. Reports carry no wall-clock data
//! unless the caller attaches it, so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::bohr::{annihilator_rows, bohr_deficiency_named, find_avoiding_subgroup, DeficiencyReport};
use crate::colorings::{
    build_cayley, characters_to_coloring, chromatic_number_bounded, chromatic_number_exact,
    coloring_to_avoiding_subgroup, component_histogram, components_classify, hypergraph_chromatic,
    verify, BoundedChromatic, CellPartition, Chromatic, ComponentKind, Hypergraph, Target, Witness,
};
use crate::error::{Error, Result};
use crate::families::{
    ap3_hypergraph, edge_vectors, fin2_vertices, fin_encode, gallai_square_hypergraph,
    s_square_vectors, weight_d_set, LatticeWindow,
};
use crate::fpgroup::{
    check_prime, checked_group_order, for_each_codim_subgroup, gaussian_binomial, FpMatrix, FpVec,
    Subgroup,
};
use crate::setops::{dfold_distinct_sumset, difference_set, for_each_subset, lift_witness_sumset, preimage_intersect, VecSet};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidatorResult {
    pub name: String,
    pub passed: bool,
    pub checked: u64,
    pub failures: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ValidatorResult {
    fn new(name: &str, checked: u64, failures: u64, detail: Option<String>) -> Self {
        ValidatorResult {
            name: name.to_string(),
            passed: failures == 0,
            checked,
            failures,
            detail,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub tool_version: String,
    pub parameters: Map<String, Value>,
    pub input_digest: String,
    pub summary: Value,
    pub instances: Vec<Value>,
    pub validators: Vec<ValidatorResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<u64>,
}

impl ExperimentReport {
    fn new(experiment: &str, parameters: Value, inputs: &str) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        let mut h = Sha256::new();
        h.update(experiment.as_bytes());
        h.update(b"\0");
        h.update(Value::Object(parameters.clone()).to_string().as_bytes());
        h.update(b"\0");
        h.update(inputs.as_bytes());
        ExperimentReport {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            tool_version: TOOL_VERSION.to_string(),
            parameters,
            input_digest: hex::encode(h.finalize()),
            summary: Value::Null,
            instances: Vec::new(),
            validators: Vec::new(),
            wall_time_ms: None,
        }
    }

    /// True when every validator passed.
    pub fn passed(&self) -> bool {
        self.validators.iter().all(|v| v.passed)
    }

    pub fn validator(&self, name: &str) -> Option<&ValidatorResult> {
        self.validators.iter().find(|v| v.name == name)
    }

    pub fn with_wall_time(mut self, ms: u64) -> Self {
        self.wall_time_ms = Some(ms);
        self
    }

    pub fn to_json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Tab-separated form: one row per parameter, summary field, validator, and instance.
    pub fn to_tsv(&self) -> String {
        let mut out = format!(
            "# experiment={} schema_version={} tool_version={} input_digest={}\n",
            self.experiment, self.schema_version, self.tool_version, self.input_digest
        );
        for (k, v) in &self.parameters {
            out.push_str(&format!("parameter\t{k}\t{v}\n"));
        }
        match &self.summary {
            Value::Object(m) => {
                for (k, v) in m {
                    out.push_str(&format!("summary\t{k}\t{v}\n"));
                }
            }
            Value::Null => {}
            other => out.push_str(&format!("summary\tvalue\t{other}\n")),
        }
        for v in &self.validators {
            out.push_str(&format!(
                "validator\t{}\t{}\t{}\t{}\n",
                v.name,
                if v.passed { "pass" } else { "fail" },
                v.checked,
                v.failures
            ));
        }
        for (i, inst) in self.instances.iter().enumerate() {
            out.push_str(&format!("instance\t{i}\t{inst}\n"));
        }
        if let Some(ms) = self.wall_time_ms {
            out.push_str(&format!("timing\twall_time_ms\t{ms}\n"));
        }
        out
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coords_json(v: &FpVec) -> Value {
    json!(v.coords())
}

// ---------------------------------------------------------------------------
// Axis-parallel squares

pub const S_SQUARE_MAX_W: usize = 8;

/// `Cay(Fin_2, S_□)` on a `W x W` window: chromatic number, component
/// shapes, and a validated optimal coloring.
pub fn exp_s_square(w: usize) -> Result<ExperimentReport> {
    if w < 2 {
        return Err(Error::input(format!("window side must be at least 2, got {w}")));
    }
    if w > S_SQUARE_MAX_W {
        return Err(Error::guard(format!("window side {w}"), S_SQUARE_MAX_W as u64));
    }
    let mut report = ExperimentReport::new("s-square", json!({ "w": w }), "");
    let win = LatticeWindow::new(w)?;
    let verts = fin2_vertices(w)?;
    let squares = s_square_vectors(w)?;
    let cay = build_cayley(&verts, &squares)?;
    let g = &cay.graph;
    let chi = chromatic_number_exact(g);
    let info = components_classify(g);
    let hist = component_histogram(&info);
    let others = info
        .iter()
        .filter(|c| matches!(c.kind, ComponentKind::Other(_)))
        .count() as u64;

    let (chi_value, proper) = match &chi {
        Chromatic::Finite { chi, coloring } => {
            let verdict = verify(Witness::Coloring(coloring), Target::Graph(g))?;
            for (v, &c) in coloring.colors.iter().enumerate() {
                report.instances.push(json!({
                    "vertex": fin_encode(&verts.elements()[v], win)?,
                    "color": c,
                }));
            }
            (json!(chi), verdict.is_valid())
        }
        Chromatic::Infinite => (json!("infinite"), false),
    };
    let longest_path = info
        .iter()
        .filter(|c| c.kind == ComponentKind::Path)
        .map(|c| c.vertices.len())
        .max()
        .unwrap_or(0);
    report.summary = json!({
        "chi": chi_value,
        "vertices": g.n(),
        "edges": g.edge_count(),
        "squares_in_window": squares.len(),
        "components": info.len(),
        "component_histogram": hist,
        "longest_path_vertices": longest_path,
        "truncation": "only squares with all four corners inside the window; infinite paths appear truncated",
    });
    report.validators = vec![
        ValidatorResult::new("coloring_proper", 1, u64::from(!proper), None),
        ValidatorResult::new(
            "chi_equals_two",
            1,
            u64::from(chi.value() != Some(2)),
            Some(format!("chi = {chi}")),
        ),
        ValidatorResult::new("component_trichotomy", info.len() as u64, others, None),
    ];
    Ok(report)
}

// ---------------------------------------------------------------------------
// Partition / subgroup round trip

/// A family of vertex sets of `[1, N]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FamilySpec {
    /// Three-term progressions in `[1, N]`.
    Ap3 { n: usize },
    /// Axis-parallel squares in a `W x W` window (`N = W^2`).
    GallaiSquares { w: usize },
    /// Every `p`-element subset of `[1, N]`.
    AllSubsets { n: usize },
    Custom(Hypergraph),
}

impl FamilySpec {
    pub fn build(&self, p: u8) -> Result<Hypergraph> {
        match self {
            FamilySpec::Ap3 { n } => ap3_hypergraph(*n),
            FamilySpec::GallaiSquares { w } => gallai_square_hypergraph(*w),
            FamilySpec::AllSubsets { n } => {
                let mut edges = Vec::new();
                for_each_subset(*n, p as usize, |s| edges.push(s.iter().map(|i| i + 1).collect()));
                Hypergraph::new(*n, edges)
            }
            FamilySpec::Custom(h) => Ok(h.clone()),
        }
    }

    fn describe(&self) -> Value {
        match self {
            FamilySpec::Ap3 { n } => json!({ "kind": "ap3", "n": n }),
            FamilySpec::GallaiSquares { w } => json!({ "kind": "gallai-squares", "w": w }),
            FamilySpec::AllSubsets { n } => json!({ "kind": "all-subsets", "n": n }),
            FamilySpec::Custom(h) => json!({ "kind": "custom", "n": h.n(), "edges": h.edges().len() }),
        }
    }
}

pub const ROUNDTRIP_MAX_N: usize = 12;
/// Set partitions are enumerated exhaustively up to this many, sampled beyond.
pub const ROUNDTRIP_PARTITION_BUDGET: u64 = 200_000;
/// Subgroup levels are scanned exhaustively while the running count fits.
pub const ROUNDTRIP_SUBGROUP_BUDGET: u128 = 1 << 18;
const ROUNDTRIP_SAMPLES: usize = 2_000;
const ROUNDTRIP_LISTED: usize = 50;

fn bell(n: usize) -> u64 {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for &x in &row {
            next.push(next.last().unwrap().saturating_add(x));
        }
        row = next;
    }
    row[0]
}

/// Calls `f` with the restricted growth string of every set partition of `0..n`.
fn for_each_set_partition(n: usize, mut f: impl FnMut(&[usize])) {
    fn rec(i: usize, max: usize, labels: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if i == labels.len() {
            f(labels);
            return;
        }
        for c in 0..=max {
            labels[i] = c;
            rec(i + 1, max.max(c + 1), labels, f);
        }
    }
    if n == 0 {
        f(&[]);
        return;
    }
    let mut labels = vec![0; n];
    rec(1, 1, &mut labels, &mut f);
}

fn random_subgroup(rng: &mut ChaCha8Rng, p: u8, n: usize, k: usize) -> Subgroup {
    loop {
        let entries: Vec<u8> = (0..k * n).map(|_| rng.gen_range(0..p)).collect();
        let m = FpMatrix::new(p, k, n, entries).expect("residues in range");
        let h = Subgroup::kernel_of(&m);
        if h.codim() == k {
            return h;
        }
    }
}

/// Runs both constructions between proper partitions of `[1, N]` and
/// subgroups of `F_p^N` avoiding `{e_F}` for a family of vertex sets.
///
/// Direction (a) turns each proper partition into `∩ ker psi_j` and checks
/// avoidance and `codim <= cells`. Direction (b) turns each avoiding
/// subgroup's annihilator rows into a partition and checks properness and
/// `cells <= p^codim`. Any violation fails the run.
pub fn exp_ep_roundtrip(p: u8, family: &FamilySpec, seed: u64) -> Result<ExperimentReport> {
    if ![2u8, 3, 5].contains(&p) {
        return Err(Error::input(format!("p must be 2, 3 or 5, got {p}")));
    }
    let fam = family.build(p)?;
    let n = fam.n();
    if n > ROUNDTRIP_MAX_N {
        return Err(Error::guard(format!("family on {n} vertices"), ROUNDTRIP_MAX_N as u64));
    }
    checked_group_order(p, n)?;
    let mut report = ExperimentReport::new(
        "ep-roundtrip",
        json!({ "p": p, "family": family.describe(), "seed": seed }),
        &crate::io::write_hypergraph(&fam),
    );
    let targets = edge_vectors(&fam, p)?;
    let p_uniform = fam.uniform_size() == Some(p as usize) || fam.edges().is_empty();
    let mut rng = rng(seed);

    let (chi, chi_part) = hypergraph_chromatic(&fam)?;
    let chi_ok = verify(Witness::Partition(&chi_part), Target::Hypergraph(&fam))?.is_valid();

    // direction (a)
    let mut a_checked = 0u64;
    let mut a_inapplicable = 0u64;
    let mut a_violations = 0u64;
    let mut a_tight = 0u64;
    let mut a_listed = Vec::new();
    let exhaustive_partitions = bell(n) <= ROUNDTRIP_PARTITION_BUDGET;
    let mut run_a = |labels: &[usize]| -> Result<()> {
        let part = CellPartition::from_labels(labels);
        if !verify(Witness::Partition(&part), Target::Hypergraph(&fam))?.is_valid() {
            return Ok(());
        }
        match coloring_to_avoiding_subgroup(&part, &fam, p) {
            Ok(h) => {
                a_checked += 1;
                let avoids = verify(Witness::Subgroup(&h), Target::Set(&targets))?.is_valid();
                let bound = h.codim() <= part.num_cells();
                if !(avoids && bound) {
                    a_violations += 1;
                }
                if h.codim() == part.num_cells() {
                    a_tight += 1;
                }
                if a_listed.len() < ROUNDTRIP_LISTED {
                    a_listed.push(json!({
                        "cells": part.cells(),
                        "codim": h.codim(),
                        "annihilator": annihilator_rows(&h),
                        "avoids": avoids,
                    }));
                }
            }
            Err(Error::Precondition(_)) if !p_uniform => a_inapplicable += 1,
            Err(e) => return Err(e),
        }
        Ok(())
    };
    if exhaustive_partitions {
        let mut err = None;
        for_each_set_partition(n, |labels| {
            if err.is_none() {
                if let Err(e) = run_a(labels) {
                    err = Some(e);
                }
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
    } else {
        for _ in 0..ROUNDTRIP_SAMPLES {
            let r = rng.gen_range(chi.max(1)..=chi.max(1) + 2);
            let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..r)).collect();
            run_a(&labels)?;
        }
    }

    // direction (b)
    let mut b_checked = 0u64;
    let mut b_violations = 0u64;
    let mut b_min_codim: Option<usize> = None;
    let mut b_listed = Vec::new();
    let mut exhaustive_levels = Vec::new();
    let mut sampled_levels = Vec::new();
    let mut budget = ROUNDTRIP_SUBGROUP_BUDGET;
    let mut run_b = |h: &Subgroup| -> Result<()> {
        if !targets.iter().all(|x| !h.contains_unchecked(x)) {
            return Ok(());
        }
        b_checked += 1;
        let part = characters_to_coloring(&h.annihilator_rows(), n)?;
        let proper = verify(Witness::Partition(&part), Target::Hypergraph(&fam))?.is_valid();
        let bound = (part.num_cells() as u128) <= (p as u128).pow(h.codim() as u32);
        if !(proper && bound) {
            b_violations += 1;
        }
        b_min_codim = Some(b_min_codim.map_or(h.codim(), |m| m.min(h.codim())));
        if b_listed.len() < ROUNDTRIP_LISTED {
            b_listed.push(json!({
                "codim": h.codim(),
                "annihilator": annihilator_rows(h),
                "cells": part.cells(),
                "proper": proper,
            }));
        }
        Ok(())
    };
    for k in 0..=n {
        let count = gaussian_binomial(n, k, p);
        if count <= budget {
            budget -= count;
            exhaustive_levels.push(k);
            let mut err = None;
            for_each_codim_subgroup::<()>(p, n, k, |ann| {
                let h = Subgroup::kernel_of(ann);
                if let Err(e) = run_b(&h) {
                    err = Some(e);
                    return ControlFlow::Break(());
                }
                ControlFlow::Continue(())
            })?;
            if let Some(e) = err {
                return Err(e);
            }
        } else {
            sampled_levels.push(k);
            for _ in 0..ROUNDTRIP_SAMPLES {
                let h = random_subgroup(&mut rng, p, n, k);
                run_b(&h)?;
            }
        }
    }

    report.summary = json!({
        "vertices": n,
        "edges": fam.edges().len(),
        "edge_size_equals_p": p_uniform,
        "hypergraph_chi": chi,
        "chi_partition": chi_part.cells(),
        "a_partitions": if exhaustive_partitions { "exhaustive" } else { "sampled" },
        "a_checked": a_checked,
        "a_inapplicable": a_inapplicable,
        "a_codim_equals_cells": a_tight,
        "a_violations": a_violations,
        "b_exhaustive_levels": exhaustive_levels,
        "b_sampled_levels": sampled_levels,
        "b_checked": b_checked,
        "b_min_avoiding_codim": b_min_codim,
        "b_violations": b_violations,
    });
    report.instances = vec![
        json!({ "direction": "a", "listed": a_listed }),
        json!({ "direction": "b", "listed": b_listed }),
    ];
    report.validators = vec![
        ValidatorResult::new("chi_partition_proper", 1, u64::from(!chi_ok), None),
        ValidatorResult::new("a_avoids_with_codim_le_cells", a_checked, a_violations, None),
        ValidatorResult::new("b_proper_with_cells_le_p_pow_codim", b_checked, b_violations, None),
    ];
    Ok(report)
}

// ---------------------------------------------------------------------------
// Lifting through a homomorphism

pub const LIFT_MAX_SUBGROUPS: u128 = 1 << 17;
const LIFT_MAX_SUBSETS: u64 = 1 << 22;

/// Parameters for [`exp_lift_transfer`].
#[derive(Clone, Debug)]
pub struct LiftParams {
    pub p: u8,
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub k_max: usize,
    pub seed: u64,
}

/// Columns listing every element of `F_p^n` at seeded random positions, the
/// remaining columns uniform.
pub fn covering_hom(p: u8, n: usize, m: usize, seed: u64) -> Result<FpMatrix> {
    let q = checked_group_order(p, n)? as usize;
    if m < q {
        return Err(Error::input(format!("m={m} is smaller than p^n={q}")));
    }
    let mut rng = rng(seed);
    let mut cols: Vec<Option<FpVec>> = vec![None; m];
    let slots = sample(&mut rng, m, q).into_vec();
    for (i, slot) in slots.into_iter().enumerate() {
        cols[slot] = Some(FpVec::from_index(p, n, i as u64));
    }
    let images: Vec<FpVec> = cols
        .into_iter()
        .map(|c| c.unwrap_or_else(|| FpVec::from_index(p, n, rng.gen_range(0..q as u64))))
        .collect();
    if n == 0 {
        return Ok(FpMatrix::zero(p, 0, m));
    }
    crate::fpgroup::hom_from_basis_images(&images)
}

/// Builds `S' = rho^{-1}(S) ∩ E_d` in `F_p^m` for a seeded `rho` with
/// `rho(E_1) = F_p^n`, and reports the deficiency of `S` and `S'` side by
/// side together with, for every subgroup `H` up to level `k_max`, whether
/// the coset-class lifting search finds an element of `S' ∩ H`.
pub fn exp_lift_transfer(params: &LiftParams, s: &VecSet) -> Result<ExperimentReport> {
    let LiftParams { p, d, n, m, k_max, seed } = *params;
    check_prime(p as u32)?;
    if d <= 2 || d % p as usize != 0 {
        return Err(Error::input(format!("d={d} must exceed 2 and be divisible by p={p}")));
    }
    if s.p() != p || s.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: s.dim(),
        });
    }
    let q = checked_group_order(p, n)?;
    if (m as u64) < q {
        return Err(Error::input(format!("m={m} is smaller than p^n={q}")));
    }
    checked_group_order(p, m).map_err(|_| Error::guard(format!("ambient group {p}^{m}"), crate::fpgroup::MAX_GROUP_ORDER))?;
    if d > m {
        return Err(Error::input(format!("d={d} exceeds m={m}")));
    }
    let k_lift = k_max.min(m);
    let total: u128 = (1..=k_lift).map(|k| gaussian_binomial(m, k, p)).sum();
    if total > LIFT_MAX_SUBGROUPS {
        return Err(Error::guard(format!("{total} subgroups to lift through"), LIFT_MAX_SUBGROUPS as u64));
    }

    let mut report = ExperimentReport::new(
        "lift-transfer",
        json!({ "p": p, "d": d, "n": n, "m": m, "k_max": k_max, "seed": seed }),
        &crate::io::write_vecset(s),
    );
    let rho = covering_hom(p, n, m, seed)?;
    let e_d = weight_d_set(p, m, d)?;
    let lifted = preimage_intersect(&rho, s, &e_d)?;

    let into_s = lifted
        .iter()
        .filter(|x| !(s.contains(&rho.apply_unchecked(x)) && x.weight() == d && x.support().iter().all(|&i| x.coords()[i] == 1)))
        .count() as u64;

    let def_s = bohr_deficiency_named(s, k_max.min(n), "S")?;
    let def_lift = bohr_deficiency_named(&lifted, k_lift, "S'")?;
    let mut witness_failures = 0u64;
    let mut witnesses_checked = 0u64;
    for r in [&def_s, &def_lift] {
        if let Some(w) = r.witness() {
            witnesses_checked += 1;
            let set = if r.set_id == "S" { s } else { &lifted };
            if !verify(Witness::Subgroup(w), Target::Set(set))?.is_valid() {
                witness_failures += 1;
            }
        }
    }

    let mut per_level = Vec::new();
    let mut lift_bad = 0u64;
    let mut lift_found_total = 0u64;
    for k in 1..=k_lift {
        let mut found = 0u64;
        let mut missing = 0u64;
        let mut first_missing: Option<Value> = None;
        let mut err = None;
        for_each_codim_subgroup::<()>(p, m, k, |ann| {
            let h = Subgroup::kernel_of(ann);
            match lift_witness_sumset(&rho, s, &h, d, LIFT_MAX_SUBSETS) {
                Ok(Some(w)) => {
                    found += 1;
                    let ok = h.contains_unchecked(&w.lifted) && lifted.contains(&w.lifted);
                    if !ok {
                        lift_bad += 1;
                    }
                }
                Ok(None) => {
                    missing += 1;
                    if first_missing.is_none() {
                        first_missing = Some(json!(annihilator_rows(&h)));
                    }
                }
                Err(e) => {
                    err = Some(e);
                    return ControlFlow::Break(());
                }
            }
            ControlFlow::Continue(())
        })?;
        if let Some(e) = err {
            return Err(e);
        }
        lift_found_total += found;
        per_level.push(json!({
            "k": k,
            "subgroups": gaussian_binomial(m, k, p).to_string(),
            "lift_found": found,
            "lift_missing": missing,
            "first_missing_annihilator": first_missing,
        }));
    }

    report.summary = json!({
        "rho_columns": rho.columns().iter().map(coords_json).collect::<Vec<_>>(),
        "s_size": s.len(),
        "lifted_size": lifted.len(),
        "lifted": lifted.iter().map(coords_json).collect::<Vec<_>>(),
        "deficiency_s": def_s.to_json(None),
        "deficiency_lifted": def_lift.to_json(None),
        "lift_scan": per_level,
    });
    report.validators = vec![
        ValidatorResult::new("lifted_in_e_d_and_maps_into_s", lifted.len() as u64, into_s, None),
        ValidatorResult::new("deficiency_witnesses_avoid", witnesses_checked, witness_failures, None),
        ValidatorResult::new("lift_witnesses_in_h_and_lifted_set", lift_found_total, lift_bad, None),
    ];
    Ok(report)
}

// ---------------------------------------------------------------------------
// Pigeonhole recurrence of difference sets

/// Parameters for [`exp_poincare`].
#[derive(Clone, Debug)]
pub struct PoincareParams {
    pub p: u8,
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
}

pub const POINCARE_MAX_SUBGROUPS: u128 = 1 << 16;

/// For random `E` with `|E| = p^k + 1`, checks that `{a - b : a != b in E}`
/// meets every codimension-`k` subgroup; a second arm with `|E| = p^k` is
/// recorded without any verdict.
pub fn exp_poincare(params: &PoincareParams) -> Result<ExperimentReport> {
    let PoincareParams { p, n, k, trials, seed } = *params;
    check_prime(p as u32)?;
    if k >= n {
        return Err(Error::input(format!("need k < n, got k={k} n={n}")));
    }
    if trials == 0 {
        return Err(Error::input("need at least one trial"));
    }
    let q = checked_group_order(p, n)?;
    let subgroups = gaussian_binomial(n, k, p);
    if subgroups > POINCARE_MAX_SUBGROUPS {
        return Err(Error::guard(format!("{subgroups} subgroups per trial"), POINCARE_MAX_SUBGROUPS as u64));
    }
    let size = (p as u64).pow(k as u32) + 1;
    let mut report = ExperimentReport::new(
        "poincare",
        json!({ "p": p, "n": n, "k": k, "trials": trials, "seed": seed }),
        "",
    );
    let mut rng = rng(seed);
    let mut draw = |sz: u64| -> VecSet {
        let idx = sample(&mut rng, q as usize, sz as usize);
        VecSet::from_unchecked(p, n, idx.into_iter().map(|i| FpVec::from_index(p, n, i as u64)).collect())
    };
    let mut failures = 0u64;
    let mut failures_small = 0u64;
    let mut listed = Vec::new();
    for t in 0..trials {
        let e = draw(size);
        let d = difference_set(&e, true);
        let (hit, _) = find_avoiding_subgroup(&d, k)?;
        if let Some(h) = &hit {
            failures += 1;
            listed.push(json!({
                "trial": t,
                "arm": "p^k+1",
                "e": e.iter().map(FpVec::index).collect::<Vec<_>>(),
                "avoiding_annihilator": annihilator_rows(h),
            }));
        }
        let small = draw(size - 1);
        let (hit_small, _) = find_avoiding_subgroup(&difference_set(&small, true), k)?;
        if let Some(h) = &hit_small {
            failures_small += 1;
            if listed.len() < 20 {
                listed.push(json!({
                    "trial": t,
                    "arm": "p^k",
                    "e": small.iter().map(FpVec::index).collect::<Vec<_>>(),
                    "avoiding_annihilator": annihilator_rows(h),
                }));
            }
        }
    }
    report.summary = json!({
        "set_size": size,
        "subgroups_per_trial": subgroups.to_string(),
        "failures": failures,
        "observational_set_size": size - 1,
        "observational_failures": failures_small,
    });
    report.instances = listed;
    report.validators = vec![ValidatorResult::new(
        "difference_set_meets_every_subgroup",
        trials as u64,
        failures,
        None,
    )];
    Ok(report)
}

// ---------------------------------------------------------------------------
// Deficiency vs chromatic number profile

/// Which set `S_n ⊆ F_p^n` to profile.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProfileFamily {
    /// `E_d`, all 0/1 vectors of weight `d`.
    Weight { d: usize },
    /// `E_d ∪ {0}`.
    WeightWithZero { d: usize },
    /// `{e_F : F a 3-term progression in [1, n]}`.
    Ap3,
}

impl ProfileFamily {
    pub fn build(&self, p: u8, n: usize) -> Result<VecSet> {
        match self {
            ProfileFamily::Weight { d } => weight_d_set(p, n, *d),
            ProfileFamily::WeightWithZero { d } => {
                let e = weight_d_set(p, n, *d)?;
                e.union(&VecSet::new(p, n, [FpVec::zero(p, n)])?)
            }
            ProfileFamily::Ap3 => edge_vectors(&ap3_hypergraph(n)?, p),
        }
    }

    fn describe(&self) -> Value {
        match self {
            ProfileFamily::Weight { d } => json!({ "kind": "weight", "d": d }),
            ProfileFamily::WeightWithZero { d } => json!({ "kind": "weight-with-zero", "d": d }),
            ProfileFamily::Ap3 => json!({ "kind": "ap3" }),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProfileParams {
    pub p: u8,
    pub family: ProfileFamily,
    pub n_min: usize,
    pub n_max: usize,
    pub k_max: usize,
    pub r_max: usize,
    pub node_budget: u64,
}

pub const PROFILE_MAX_ORDER: u64 = 1 << 12;

/// For each `n`, the pair (deficiency level of `S_n`, chromatic number of
/// `Cay(F_p^n, S_n)`). Observational only.
pub fn exp_profile_scan(params: &ProfileParams) -> Result<ExperimentReport> {
    let ProfileParams { p, ref family, n_min, n_max, k_max, r_max, node_budget } = *params;
    check_prime(p as u32)?;
    if n_min > n_max {
        return Err(Error::input(format!("empty n range {n_min}..={n_max}")));
    }
    let top = checked_group_order(p, n_max)?;
    if top > PROFILE_MAX_ORDER {
        return Err(Error::guard(format!("Cayley graph on {p}^{n_max} vertices"), PROFILE_MAX_ORDER));
    }
    let mut report = ExperimentReport::new(
        "profile-scan",
        json!({
            "p": p, "family": family.describe(), "n_min": n_min, "n_max": n_max,
            "k_max": k_max, "r_max": r_max, "node_budget": node_budget,
        }),
        "",
    );
    let mut witness_checked = 0u64;
    let mut witness_bad = 0u64;
    let mut color_checked = 0u64;
    let mut color_bad = 0u64;
    for n in n_min..=n_max {
        let s = family.build(p, n)?;
        let def: DeficiencyReport = bohr_deficiency_named(&s, k_max.min(n), "S_n")?;
        if let Some(w) = def.witness() {
            witness_checked += 1;
            if !verify(Witness::Subgroup(w), Target::Set(&s))?.is_valid() {
                witness_bad += 1;
            }
        }
        let all = VecSet::everything(p, n)?;
        let cay = build_cayley(&all, &s)?;
        let chi = match chromatic_number_bounded(&cay.graph, r_max, node_budget) {
            BoundedChromatic::Infinite => json!("infinite"),
            BoundedChromatic::Exact { chi, coloring } => {
                color_checked += 1;
                if !verify(Witness::Coloring(&coloring), Target::Graph(&cay.graph))?.is_valid() {
                    color_bad += 1;
                }
                json!(chi)
            }
            BoundedChromatic::Exceeds { r_max } => json!(format!(">{r_max}")),
            BoundedChromatic::Unresolved { lower, upper } => {
                json!({ "lower": lower, "upper": upper })
            }
        };
        report.instances.push(json!({
            "n": n,
            "set_size": s.len(),
            "deficiency_level": def.deficient_at(),
            "recurrent_up_to": if def.deficient_at().is_none() { Some(def.k_max) } else { None },
            "chi": chi,
        }));
    }
    report.summary = json!({ "points": n_max - n_min + 1 });
    report.validators = vec![
        ValidatorResult::new("deficiency_witnesses_avoid", witness_checked, witness_bad, None),
        ValidatorResult::new("colorings_proper", color_checked, color_bad, None),
    ];
    Ok(report)
}

// ---------------------------------------------------------------------------
// Distinct-summand sumsets of cover cells

#[derive(Clone, Debug)]
pub struct BogParams {
    pub p: u8,
    pub d: usize,
    pub n: usize,
    pub r: usize,
    /// Number of covers to draw when enumeration is infeasible.
    pub covers: usize,
    /// Subgroup containment checks allowed per cover.
    pub budget: u64,
    pub seed: u64,
}

pub const BOG_MAX_ORDER: u64 = 1 << 12;

/// Least `c` such that some codimension-`c` subgroup lies inside `set`
/// (given as a membership bitmap over element indices), with the witness.
fn largest_contained_subgroup(
    p: u8,
    n: usize,
    member: &[bool],
    budget: &mut u64,
) -> Result<Option<(usize, Subgroup)>> {
    for c in 0..=n {
        let mut exhausted = false;
        let hit = for_each_codim_subgroup(p, n, c, |ann| {
            if *budget == 0 {
                exhausted = true;
                return ControlFlow::Break(None);
            }
            *budget -= 1;
            let h = Subgroup::kernel_of(ann);
            let basis = h.basis();
            if subgroup_inside(p, n, &basis, member) {
                ControlFlow::Break(Some(h))
            } else {
                ControlFlow::Continue(())
            }
        })?;
        match hit {
            Some(Some(h)) => return Ok(Some((c, h))),
            Some(None) if exhausted => {
                return Err(Error::guard("subgroup containment checks", 0));
            }
            _ => {}
        }
    }
    Ok(None)
}

/// Walks the span of `basis` and stops at the first element outside `member`.
fn subgroup_inside(p: u8, n: usize, basis: &[FpVec], member: &[bool]) -> bool {
    let mut coeffs = vec![0u8; basis.len()];
    let mut v = FpVec::zero(p, n);
    loop {
        if !member[v.index() as usize] {
            return false;
        }
        // Gray-style odometer: bump one coefficient, update v incrementally
        let mut i = 0;
        loop {
            if i == coeffs.len() {
                return true;
            }
            v = &v + &basis[i];
            coeffs[i] += 1;
            if coeffs[i] < p {
                break;
            }
            coeffs[i] = 0;
            i += 1;
        }
    }
}

/// Over `r`-covers of `F_p^n` (all of them when there are at most `covers`,
/// otherwise `covers` seeded random ones), records the least codimension
/// of a subgroup inside some cell's `d`-fold distinct sumset.
pub fn exp_bog_scan(params: &BogParams) -> Result<ExperimentReport> {
    let BogParams { p, d, n, r, covers, budget, seed } = *params;
    check_prime(p as u32)?;
    if d <= 2 || d % p as usize != 0 {
        return Err(Error::input(format!("d={d} must exceed 2 and be divisible by p={p}")));
    }
    if r == 0 {
        return Err(Error::input("need at least one cell"));
    }
    let q = checked_group_order(p, n)?;
    if q > BOG_MAX_ORDER {
        return Err(Error::guard(format!("group order {p}^{n}"), BOG_MAX_ORDER));
    }
    let mut report = ExperimentReport::new(
        "bog-scan",
        json!({ "p": p, "d": d, "n": n, "r": r, "covers": covers, "budget": budget, "seed": seed }),
        "",
    );
    let q = q as usize;
    let total_covers = (r as f64).powf(q as f64);
    let exhaustive = total_covers <= covers as f64;
    let labelings: Vec<Vec<usize>> = if exhaustive {
        let mut all = Vec::new();
        let mut lab = vec![0usize; q];
        loop {
            all.push(lab.clone());
            let Some(i) = (0..q).find(|&i| lab[i] + 1 < r) else { break };
            lab[i] += 1;
            for x in lab.iter_mut().take(i) {
                *x = 0;
            }
        }
        all
    } else {
        let mut rng = rng(seed);
        (0..covers)
            .map(|_| (0..q).map(|_| rng.gen_range(0..r)).collect())
            .collect()
    };

    let mut hist: BTreeMap<String, u64> = BTreeMap::new();
    let mut checked = 0u64;
    let mut bad = 0u64;
    for (ci, lab) in labelings.iter().enumerate() {
        let mut best: Option<(usize, usize, Subgroup)> = None;
        let mut sizes = vec![0usize; r];
        let mut exhausted = false;
        for (j, size) in sizes.iter_mut().enumerate() {
            let cell = VecSet::from_unchecked(
                p,
                n,
                (0..q)
                    .filter(|&i| lab[i] == j)
                    .map(|i| FpVec::from_index(p, n, i as u64))
                    .collect(),
            );
            *size = cell.len();
            let sums = dfold_distinct_sumset(&cell, d)?;
            if sums.is_empty() {
                continue;
            }
            let mut member = vec![false; q];
            for x in &sums {
                member[x.index() as usize] = true;
            }
            let mut left = budget;
            match largest_contained_subgroup(p, n, &member, &mut left) {
                Ok(Some((c, h))) if best.as_ref().is_none_or(|(bc, _, _)| c < *bc) => {
                    checked += 1;
                    let inside = h.elements(BOG_MAX_ORDER)?.iter().all(|x| sums.contains(x));
                    if !inside {
                        bad += 1;
                    }
                    best = Some((c, j, h));
                }
                Ok(_) => {}
                Err(Error::ResourceGuard { .. }) => exhausted = true,
                Err(e) => return Err(e),
            }
        }
        let key = match &best {
            Some((c, _, _)) => c.to_string(),
            None if exhausted => "budget_exhausted".to_string(),
            None => "none".to_string(),
        };
        *hist.entry(key).or_insert(0) += 1;
        report.instances.push(json!({
            "cover": ci,
            "cell_sizes": sizes,
            "least_codim": best.as_ref().map(|(c, _, _)| c),
            "cell": best.as_ref().map(|(_, j, _)| j),
            "annihilator": best.as_ref().map(|(_, _, h)| annihilator_rows(h)),
            "budget_exhausted": exhausted && best.is_none(),
        }));
    }
    report.summary = json!({
        "covers": labelings.len(),
        "enumeration": if exhaustive { "exhaustive" } else { "sampled" },
        "least_codim_histogram": hist,
    });
    report.validators = vec![ValidatorResult::new(
        "witness_subgroup_inside_sumset",
        checked,
        bad,
        None,
    )];
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_numbers() {
        let want = [1u64, 1, 2, 5, 15, 52, 203, 877];
        for (n, &b) in want.iter().enumerate() {
            assert_eq!(bell(n), b);
            let mut count = 0;
            for_each_set_partition(n, |_| count += 1);
            assert_eq!(count, b);
        }
    }

    #[test]
    fn odometer_walks_the_whole_subgroup() {
        let h = Subgroup::kernel_of(&FpMatrix::new(3, 1, 3, vec![1, 1, 1]).unwrap());
        let mut member = vec![false; 27];
        for x in h.elements(27).unwrap() {
            member[x.index() as usize] = true;
        }
        assert!(subgroup_inside(3, 3, &h.basis(), &member));
        let first = h.elements(27).unwrap().into_iter().find(|x| !x.is_zero()).unwrap();
        member[first.index() as usize] = false;
        assert!(!subgroup_inside(3, 3, &h.basis(), &member));
    }

    #[test]
    fn covering_hom_hits_every_element() {
        let rho = covering_hom(3, 2, 11, 7).unwrap();
        let imgs: std::collections::BTreeSet<_> = rho.columns().into_iter().collect();
        assert_eq!(imgs.len(), 9);
        assert!(covering_hom(3, 2, 8, 7).is_err());
    }

    #[test]
    fn s_square_guards() {
        assert!(matches!(exp_s_square(1), Err(Error::Input(_))));
        assert!(matches!(exp_s_square(9), Err(Error::ResourceGuard { .. })));
    }

    #[test]
    fn tsv_has_one_row_per_validator() {
        let r = exp_s_square(2).unwrap();
        let tsv = r.to_tsv();
        assert_eq!(tsv.lines().filter(|l| l.starts_with("validator\t")).count(), 3);
        assert!(tsv.starts_with("# experiment=s-square"));
    }
}
