//! Checkers for the three conditions characterising totally bounded
//! families in the F-norm (tail, translation, level) and for the two
//! classical `L^p` conditions.
//!
//! All checks run on a finite family `{f_1, ..., f_K}`. Existential
//! witnesses are found by doubling followed by bisection, so reported
//! witnesses are scan-grained rather than infimal.
//!
//! # Search bounds
//!
//! A finite family always has *some* tail radius and level, so an unbounded
//! search would pass every condition. Unless the caller fixes `r_max` /
//! `m_max`, the bound is the doubling candidate at which the leading `⌈K/2⌉`
//! members first pass: the family passes only if its later members need
//! nothing larger. A family
//! whose mass escapes (`g_k`) or whose peaks grow (`f_k`) fails this test,
//! while one that settles (`u_k`) passes. Reports carry `K` and the bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::GeneratorSpec;
use crate::fnorms::{lp_norm, NormParams};
use crate::grid::{common_multiple, GridFunction, Region, Tail, Transform};
use crate::operators::translate;

/// Nonempty finite family of functions that all lie in the space for `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    members: Vec<GridFunction>,
    params: NormParams,
    label: Option<String>,
}

impl FamilySpec {
    pub fn new(members: Vec<GridFunction>, params: NormParams) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyFamily);
        }
        for (i, m) in members.iter().enumerate() {
            m.check_membership(params.p())
                .map_err(|e| Error::member(i, e))?;
        }
        Ok(Self {
            members,
            params,
            label: None,
        })
    }

    /// Builds the members of a generator; the generator's own `p` wins over
    /// `default_p`.
    pub fn from_generator(spec: &GeneratorSpec, default_p: f64) -> Result<Self> {
        let params = NormParams::new(spec.p_or(default_p))?;
        Ok(Self::new(spec.build(params.p())?, params)?.with_label(spec.to_string()))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn members(&self) -> &[GridFunction] {
        &self.members
    }

    pub fn params(&self) -> NormParams {
        self.params
    }

    pub fn p(&self) -> f64 {
        self.params.p()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// First `n` members as a family of its own (`n` is clamped to `1..=K`).
    pub fn prefix(&self, n: usize) -> FamilySpec {
        let n = n.clamp(1, self.len());
        FamilySpec {
            members: self.members[..n].to_vec(),
            params: self.params,
            label: self.label.clone(),
        }
    }

    fn dim(&self) -> usize {
        self.members[0].dim()
    }

    /// Smallest spacing over all members and axes.
    fn min_spacing(&self) -> f64 {
        self.members
            .iter()
            .map(|m| m.grid().min_spacing())
            .fold(f64::INFINITY, f64::min)
    }

    /// Smallest step that every member grid can be shifted by.
    pub fn common_step(&self) -> Result<f64> {
        let mut step: Option<f64> = None;
        for m in &self.members {
            if m.is_empty() {
                continue;
            }
            for a in m.grid().axes() {
                step = Some(match step {
                    None => a.spacing,
                    Some(s) => common_multiple(s, a.spacing)?,
                });
            }
        }
        Ok(step.unwrap_or(1.0))
    }
}

/// Shifts `±j·step` for `j = 1..=count` on every axis (the full square
/// lattice without the origin in two dimensions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShiftLattice {
    pub step: f64,
    pub count: u32,
}

impl ShiftLattice {
    pub const DEFAULT_COUNT: u32 = 16;

    pub fn new(step: f64, count: u32) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "shift step must be > 0, got {step}"
            )));
        }
        if count == 0 {
            return Err(Error::EmptyLattice);
        }
        Ok(Self { step, count })
    }

    /// `step = family.common_step()`, `count = 16`.
    pub fn default_for(family: &FamilySpec) -> Result<Self> {
        Self::new(family.common_step()?, Self::DEFAULT_COUNT)
    }

    /// Nonzero shifts ordered by Euclidean length, ties broken
    /// lexicographically.
    pub fn shifts(&self, dim: usize) -> Vec<Vec<f64>> {
        let n = self.count as i64;
        let mut idx: Vec<Vec<i64>> = match dim {
            1 => (-n..=n).filter(|&j| j != 0).map(|j| vec![j]).collect(),
            _ => (-n..=n)
                .flat_map(|i| (-n..=n).map(move |j| vec![i, j]))
                .filter(|v| v.iter().any(|&c| c != 0))
                .collect(),
        };
        idx.sort_by_key(|v| (v.iter().map(|c| c * c).sum::<i64>(), v.clone()));
        idx.into_iter()
            .map(|v| v.into_iter().map(|c| c as f64 * self.step).collect())
            .collect()
    }

    /// Radius reported when no scanned shift violates the condition.
    pub fn reach(&self) -> f64 {
        (self.count + 1) as f64 * self.step
    }
}

fn norm(y: &[f64]) -> f64 {
    y.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Search settings shared by the checks.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    /// `None` means [`ShiftLattice::default_for`].
    pub lattice: Option<ShiftLattice>,
    /// Upper bound for tail radii; `None` means the leading-half bound.
    pub r_max: Option<f64>,
    /// Upper bound for levels; `None` means the leading-half bound.
    pub m_max: Option<f64>,
    pub bisection_steps: u32,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            lattice: None,
            r_max: None,
            m_max: None,
            bisection_steps: 8,
        }
    }
}

impl ScanConfig {
    pub fn with_lattice(mut self, lattice: ShiftLattice) -> Self {
        self.lattice = Some(lattice);
        self
    }

    fn lattice_for(&self, family: &FamilySpec) -> Result<ShiftLattice> {
        match self.lattice {
            Some(l) => Ok(l),
            None => ShiftLattice::default_for(family),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConditionId {
    #[serde(rename = "tail")]
    Tail,
    #[serde(rename = "translation")]
    Translation,
    #[serde(rename = "level")]
    Level,
    #[serde(rename = "lp-tail")]
    LpTail,
    #[serde(rename = "lp-translation")]
    LpTranslation,
}

impl ConditionId {
    pub const ALL: [ConditionId; 5] = [
        ConditionId::Tail,
        ConditionId::Translation,
        ConditionId::Level,
        ConditionId::LpTail,
        ConditionId::LpTranslation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConditionId::Tail => "tail",
            ConditionId::Translation => "translation",
            ConditionId::Level => "level",
            ConditionId::LpTail => "lp-tail",
            ConditionId::LpTranslation => "lp-translation",
        }
    }

    /// Whether the condition is one of the three F-norm conditions.
    pub fn is_alpha(self) -> bool {
        matches!(
            self,
            ConditionId::Tail | ConditionId::Translation | ConditionId::Level
        )
    }

    fn clamped(self) -> bool {
        matches!(self, ConditionId::Tail | ConditionId::Translation)
    }

    /// Right-hand side of the strict inequality: `ε^p`, or `ε` for the level.
    pub fn threshold(self, eps: f64, p: f64) -> f64 {
        match self {
            ConditionId::Level => eps,
            _ => eps.powf(p),
        }
    }
}

impl std::fmt::Display for ConditionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Member breaking the condition, with its value at the point `at`
/// (a radius, a level, or a shift vector).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Offender {
    pub index: usize,
    pub value: f64,
    pub at: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundSource {
    User,
    LeadingHalf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanInfo {
    /// Family size `K`.
    pub members: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lattice: Option<ShiftLattice>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub bound_source: Option<BoundSource>,
    /// Number of candidate witnesses evaluated.
    pub candidates: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionEntry {
    pub condition: ConditionId,
    pub eps: f64,
    pub verdict: Verdict,
    /// `R`, `r` or `M` on a pass.
    pub witness: Option<f64>,
    pub offender: Option<Offender>,
    pub scan: ScanInfo,
}

impl ConditionEntry {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

pub const TOTALLY_BOUNDED: &str = "candidate totally bounded";
pub const NOT_TOTALLY_BOUNDED: &str = "not totally bounded";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub label: Option<String>,
    pub p: f64,
    pub members: usize,
    pub entries: Vec<ConditionEntry>,
    /// True iff tail, translation and level pass for every requested ε.
    pub candidate_totally_bounded: bool,
    pub verdict: String,
}

impl ConditionReport {
    pub fn entry(&self, condition: ConditionId, eps: f64) -> Option<&ConditionEntry> {
        self.entries
            .iter()
            .find(|e| e.condition == condition && e.eps == eps)
    }

    /// Whether `condition` passed for every ε in the report.
    pub fn passes(&self, condition: ConditionId) -> bool {
        self.entries
            .iter()
            .filter(|e| e.condition == condition)
            .all(ConditionEntry::passed)
    }
}

/// `(index, value)` of the largest value, lowest index on ties.
fn worst(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        )
}

fn per_member<F>(family: &FamilySpec, f: F) -> Result<Vec<f64>>
where
    F: Fn(&GridFunction) -> Result<f64> + Sync,
{
    family
        .members
        .par_iter()
        .enumerate()
        .map(|(i, m)| f(m).map_err(|e| Error::member(i, e)))
        .collect()
}

/// `∫_{|x|_∞ > R} T(f)` with `T = min(|·|,1)^p` or `|·|^p`.
pub fn tail_integral(f: &GridFunction, radius: f64, p: f64, clamp: bool) -> Result<f64> {
    let t = if clamp {
        Transform::ClampPower(p)
    } else {
        Transform::Power(p)
    };
    f.integrate(t, &Region::OutsideCube(radius))
}

/// Upper bound on `∫ T(τ_y f − f)` over one power-law tail piece starting at
/// distance `edge` from the origin.
fn tail_shift_bound(
    tail: &crate::grid::PowerLaw,
    edge: f64,
    shift: f64,
    p: f64,
    clamp: bool,
) -> f64 {
    let c = tail.coeff.abs();
    let a = tail.exponent;
    let mut k = c * edge.powf(-a);
    if let Some(cap) = tail.cap {
        k = k.min(cap);
    }
    if clamp {
        k = k.min(1.0);
    }
    let e = (a + 1.0) * p;
    2.0 * shift * k.powf(p) + (a * c * shift).powf(p) * edge.powf(1.0 - e) / (e - 1.0)
}

/// `∫ T(τ_y f − f)` with `T = min(|·|,1)^p` or `|·|^p`. Exact for Zero-tail
/// members; for power-law tails the grid part is exact and the tail part is
/// a certified upper bound combined by the triangle inequality.
pub fn translation_integral(f: &GridFunction, y: &[f64], p: f64, clamp: bool) -> Result<f64> {
    let t = if clamp {
        Transform::ClampPower(p)
    } else {
        Transform::Power(p)
    };
    let grid_part = f.without_tail();
    let a = translate(&grid_part, y)?
        .sub(&grid_part)?
        .integrate(t, &Region::All)?;
    let Tail::PowerLaw(tail) = f.tail() else {
        return Ok(a);
    };
    let ax = f.grid().axis(0);
    let s = y[0].abs();
    let mut root = a.powf(1.0 / p);
    if tail.side.right() {
        root += tail_shift_bound(tail, ax.hi(), s, p, clamp).powf(1.0 / p);
    }
    if tail.side.left() {
        root += tail_shift_bound(tail, -ax.lo(), s, p, clamp).powf(1.0 / p);
    }
    Ok(root.powf(p))
}

/// Per-member value of the condition's integrand at `at` (a radius, a
/// level, or a shift vector).
pub fn condition_values(
    family: &FamilySpec,
    condition: ConditionId,
    at: &[f64],
) -> Result<Vec<f64>> {
    let p = family.p();
    match condition {
        ConditionId::Tail | ConditionId::LpTail => {
            per_member(family, |f| tail_integral(f, at[0], p, condition.clamped()))
        }
        ConditionId::Level => per_member(family, |f| Ok(f.superlevel_measure(at[0]))),
        ConditionId::Translation | ConditionId::LpTranslation => per_member(family, |f| {
            translation_integral(f, at, p, condition.clamped())
        }),
    }
}

/// Outcome of a monotone witness search.
struct Scan {
    witness: Option<f64>,
    /// Doubling candidate at which the scan first passed.
    grain: Option<f64>,
    offender: Option<Offender>,
    candidates: usize,
}

/// Doubling from `start` up to `bound`, then bisection between the last
/// failing and the first passing candidate. `eval` returns the worst member.
fn monotone_scan(
    start: f64,
    bound: f64,
    steps: u32,
    threshold: f64,
    eval: impl Fn(f64) -> Result<(usize, f64)>,
) -> Result<Scan> {
    let mut candidates = 0;
    let mut last_fail: Option<(f64, usize, f64)> = None;
    let mut x = start;
    loop {
        let at = x.min(bound);
        let (i, v) = eval(at)?;
        candidates += 1;
        if v < threshold {
            let mut hi = at;
            if let Some((mut lo, _, _)) = last_fail {
                for _ in 0..steps {
                    let mid = 0.5 * (lo + hi);
                    candidates += 1;
                    if eval(mid)?.1 < threshold {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
            }
            return Ok(Scan {
                witness: Some(hi),
                grain: Some(at),
                offender: None,
                candidates,
            });
        }
        last_fail = Some((at, i, v));
        if at >= bound {
            return Ok(Scan {
                witness: None,
                grain: None,
                offender: Some(Offender {
                    index: i,
                    value: v,
                    at: vec![at],
                }),
                candidates,
            });
        }
        x *= 2.0;
    }
}

fn leading_half(family: &FamilySpec) -> FamilySpec {
    family.prefix(family.len().div_ceil(2))
}

/// Radius beyond which every member's tail integral is negligible.
fn radius_extent(family: &FamilySpec, target: f64) -> f64 {
    family
        .members
        .iter()
        .map(|m| {
            let mut r = m.grid().radius();
            if let Tail::PowerLaw(t) = m.tail() {
                r = r.max(2.0 * t.horizon(family.p(), target));
            }
            r
        })
        .fold(family.min_spacing(), f64::max)
}

/// Smallest power of two at or above every member's supremum.
fn level_extent(family: &FamilySpec) -> f64 {
    let sup = family
        .members
        .iter()
        .map(GridFunction::sup_abs)
        .fold(0.0, f64::max);
    let mut m = 2.0;
    while m < sup {
        m *= 2.0;
    }
    m
}

fn radius_search(
    family: &FamilySpec,
    condition: ConditionId,
    threshold: f64,
    bound: f64,
    steps: u32,
) -> Result<Scan> {
    let eval = |r: f64| Ok(worst(&condition_values(family, condition, &[r])?));
    monotone_scan(family.min_spacing(), bound, steps, threshold, eval)
}

fn level_search(family: &FamilySpec, threshold: f64, bound: f64, steps: u32) -> Result<Scan> {
    let eval = |m: f64| Ok(worst(&condition_values(family, ConditionId::Level, &[m])?));
    monotone_scan(2.0, bound, steps, threshold, eval)
}

fn check_positive_eps(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "eps must be > 0, got {eps}"
        )))
    }
}

fn entry_from_scan(
    condition: ConditionId,
    eps: f64,
    scan: Scan,
    members: usize,
    bound: f64,
    source: BoundSource,
) -> ConditionEntry {
    ConditionEntry {
        condition,
        eps,
        verdict: if scan.witness.is_some() {
            Verdict::Pass
        } else {
            Verdict::Fail
        },
        witness: scan.witness,
        offender: scan.offender,
        scan: ScanInfo {
            members,
            lattice: None,
            bound: Some(bound),
            bound_source: Some(source),
            candidates: scan.candidates,
        },
    }
}

fn tail_like(
    family: &FamilySpec,
    condition: ConditionId,
    eps: f64,
    config: &ScanConfig,
) -> Result<ConditionEntry> {
    check_positive_eps(eps)?;
    let threshold = condition.threshold(eps, family.p());
    let steps = config.bisection_steps;
    let (bound, source) = match config.r_max {
        Some(r) => (r, BoundSource::User),
        None => {
            let extent = radius_extent(family, threshold);
            let lead = radius_search(&leading_half(family), condition, threshold, extent, steps)?;
            (lead.grain.unwrap_or(extent), BoundSource::LeadingHalf)
        }
    };
    let scan = radius_search(family, condition, threshold, bound, steps)?;
    Ok(entry_from_scan(
        condition,
        eps,
        scan,
        family.len(),
        bound,
        source,
    ))
}

/// Tail condition: some `R` with `∫_{|x|>R} min(|f|,1)^p < ε^p` for all members.
pub fn check_tail(family: &FamilySpec, eps: f64, config: &ScanConfig) -> Result<ConditionEntry> {
    tail_like(family, ConditionId::Tail, eps, config)
}

/// Level condition: some `M` with `|{|f| > M}| < ε` for all members.
pub fn check_level(family: &FamilySpec, eps: f64, config: &ScanConfig) -> Result<ConditionEntry> {
    check_positive_eps(eps)?;
    let steps = config.bisection_steps;
    let (bound, source) = match config.m_max {
        Some(m) => (m, BoundSource::User),
        None => {
            let extent = level_extent(family);
            let lead = level_search(&leading_half(family), eps, extent, steps)?;
            (lead.grain.unwrap_or(extent), BoundSource::LeadingHalf)
        }
    };
    let scan = level_search(family, eps, bound, steps)?;
    Ok(entry_from_scan(
        ConditionId::Level,
        eps,
        scan,
        family.len(),
        bound,
        source,
    ))
}

fn translation_like(
    family: &FamilySpec,
    condition: ConditionId,
    eps: f64,
    config: &ScanConfig,
) -> Result<ConditionEntry> {
    check_positive_eps(eps)?;
    let lattice = config.lattice_for(family)?;
    let threshold = condition.threshold(eps, family.p());
    let shifts = lattice.shifts(family.dim());
    let smallest = norm(&shifts[0]);
    let mut candidates = 0;
    let mut violation: Option<Offender> = None;
    for y in &shifts {
        let len = norm(y);
        if let Some(v) = &violation {
            if len > norm(&v.at) {
                break;
            }
        }
        candidates += 1;
        let (i, v) = worst(&condition_values(family, condition, y)?);
        if v >= threshold && violation.is_none() {
            violation = Some(Offender {
                index: i,
                value: v,
                at: y.clone(),
            });
        }
    }
    let (verdict, witness, offender) = match violation {
        None => (Verdict::Pass, Some(lattice.reach()), None),
        Some(o) if norm(&o.at) <= smallest => (Verdict::Fail, None, Some(o)),
        Some(o) => (Verdict::Pass, Some(norm(&o.at)), None),
    };
    Ok(ConditionEntry {
        condition,
        eps,
        verdict,
        witness,
        offender,
        scan: ScanInfo {
            members: family.len(),
            lattice: Some(lattice),
            bound: None,
            bound_source: None,
            candidates,
        },
    })
}

/// Translation condition over the scanned lattice: the witness `r` is the
/// length of the shortest violating shift (or the lattice reach), so every
/// scanned `|y| < r` satisfies `∫ min(|τ_y f − f|,1)^p < ε^p`.
pub fn check_translation(
    family: &FamilySpec,
    eps: f64,
    config: &ScanConfig,
) -> Result<ConditionEntry> {
    translation_like(family, ConditionId::Translation, eps, config)
}

/// Classical `L^p` tail and translation conditions. Every member must have a
/// finite `L^p` norm.
pub fn check_kr_lp(
    family: &FamilySpec,
    eps: f64,
    config: &ScanConfig,
) -> Result<[ConditionEntry; 2]> {
    for (i, m) in family.members.iter().enumerate() {
        if !lp_norm(m, family.params).is_finite() {
            return Err(Error::InfiniteLpNorm { index: i });
        }
    }
    Ok([
        tail_like(family, ConditionId::LpTail, eps, config)?,
        translation_like(family, ConditionId::LpTranslation, eps, config)?,
    ])
}

/// All five checks for every ε, in a stable order.
pub fn full_report(
    family: &FamilySpec,
    eps_list: &[f64],
    config: &ScanConfig,
) -> Result<ConditionReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one eps is required".into(),
        ));
    }
    let mut entries = Vec::with_capacity(5 * eps_list.len());
    for &eps in eps_list {
        entries.push(check_tail(family, eps, config)?);
        entries.push(check_translation(family, eps, config)?);
        entries.push(check_level(family, eps, config)?);
        entries.extend(check_kr_lp(family, eps, config)?);
    }
    let ok = entries
        .iter()
        .filter(|e| e.condition.is_alpha())
        .all(ConditionEntry::passed);
    Ok(ConditionReport {
        label: family.label.clone(),
        p: family.p(),
        members: family.len(),
        entries,
        candidate_totally_bounded: ok,
        verdict: if ok {
            TOTALLY_BOUNDED
        } else {
            NOT_TOTALLY_BOUNDED
        }
        .to_string(),
    })
}

/// Recomputes a pass entry from scratch at `eps`: every member must satisfy
/// the strict inequality at the witness (for translations, at every scanned
/// shift shorter than the witness). Fail entries re-verify when the offender
/// still violates.
pub fn reverify(family: &FamilySpec, entry: &ConditionEntry, eps: f64) -> Result<bool> {
    let threshold = entry.condition.threshold(eps, family.p());
    let below = |vals: Vec<f64>| vals.iter().all(|&v| v < threshold);
    match (entry.verdict, entry.condition) {
        (Verdict::Pass, ConditionId::Translation | ConditionId::LpTranslation) => {
            let lattice = entry.scan.lattice.ok_or(Error::EmptyLattice)?;
            let r = entry.witness.unwrap_or(0.0);
            for y in lattice.shifts(family.dim()).iter().filter(|y| norm(y) < r) {
                if !below(condition_values(family, entry.condition, y)?) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        (Verdict::Pass, c) => {
            let w = entry.witness.unwrap_or(f64::NAN);
            Ok(below(condition_values(family, c, &[w])?))
        }
        (Verdict::Fail, c) => {
            let Some(o) = &entry.offender else {
                return Ok(false);
            };
            let vals = condition_values(family, c, &o.at)?;
            Ok(vals[o.index] >= threshold)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{family_f, family_g, family_h};

    fn family(members: Vec<GridFunction>, p: f64) -> FamilySpec {
        FamilySpec::new(members, NormParams::new(p).unwrap()).unwrap()
    }

    #[test]
    fn empty_family_rejected() {
        let err = FamilySpec::new(vec![], NormParams::new(1.0).unwrap()).unwrap_err();
        assert_eq!(err.to_string(), "nonempty family required");
    }

    #[test]
    fn lattice_ordering() {
        let l = ShiftLattice::new(0.5, 2).unwrap();
        assert_eq!(
            l.shifts(1),
            vec![vec![-0.5], vec![0.5], vec![-1.0], vec![1.0]]
        );
        let s2 = l.shifts(2);
        assert_eq!(s2.len(), 24);
        assert_eq!(norm(&s2[0]), 0.5);
        assert!(ShiftLattice::new(0.5, 0).is_err());
    }

    #[test]
    fn zero_family_passes_everything() {
        let fam = family(vec![GridFunction::zero(1)], 1.0);
        let cfg = ScanConfig::default();
        for eps in [0.01, 0.5] {
            let t = check_tail(&fam, eps, &cfg).unwrap();
            assert_eq!(t.witness, Some(1.0));
            assert!(check_translation(&fam, eps, &cfg).unwrap().passed());
            assert!(check_level(&fam, eps, &cfg).unwrap().passed());
        }
    }

    #[test]
    fn bumps_fail_level_only() {
        let fam = family((1..=20).map(|k| family_f(k, 1.0).unwrap()).collect(), 1.0);
        let r = full_report(&fam, &[0.5], &ScanConfig::default()).unwrap();
        assert!(r.passes(ConditionId::Tail));
        assert!(r.passes(ConditionId::Translation));
        let lvl = r.entry(ConditionId::Level, 0.5).unwrap();
        assert_eq!(lvl.verdict, Verdict::Fail);
        let o = lvl.offender.as_ref().unwrap();
        // The leading half passes at M = 16, so k = 17 is the first member over it.
        assert_eq!((o.index, o.value), (16, 1.0));
        assert!(!r.candidate_totally_bounded);
        for e in &r.entries {
            assert!(reverify(&fam, e, 0.5).unwrap(), "{e:?}");
        }
    }

    #[test]
    fn moving_indicators_fail_tail() {
        let fam = family((1..=10).map(|k| family_g(k).unwrap()).collect(), 1.0);
        let cfg = ScanConfig::default();
        let t = check_tail(&fam, 0.5, &cfg).unwrap();
        assert_eq!(t.verdict, Verdict::Fail);
        assert_eq!(t.offender.as_ref().unwrap().value, 1.0);
        let tr = check_translation(&fam, 0.5, &cfg).unwrap();
        assert!(tr.passed());
        // 2|y| < 1/2 for |y| < 1/4; the lattice step is 1/64.
        assert_eq!(tr.witness, Some(0.25));
        assert_eq!(check_level(&fam, 0.5, &cfg).unwrap().witness, Some(2.0));
    }

    #[test]
    fn rademacher_fails_translation() {
        let fam = family((1..=6).map(|k| family_h(k, 7).unwrap()).collect(), 1.0);
        let e = check_translation(&fam, 0.5, &ScanConfig::default()).unwrap();
        assert_eq!(e.verdict, Verdict::Fail);
        assert_eq!(e.offender.as_ref().unwrap().index, 5);
    }

    #[test]
    fn user_bound_overrides_leading_half() {
        let fam = family((1..=10).map(|k| family_g(k).unwrap()).collect(), 1.0);
        let cfg = ScanConfig {
            r_max: Some(64.0),
            ..ScanConfig::default()
        };
        let t = check_tail(&fam, 0.5, &cfg).unwrap();
        assert!(t.passed());
        assert!(t.witness.unwrap() >= 10.5);
        assert_eq!(t.scan.bound_source, Some(BoundSource::User));
    }

    #[test]
    fn witnesses_transfer_to_larger_eps() {
        let fam = family((1..=10).map(|k| family_g(k).unwrap()).collect(), 2.0);
        let e = check_translation(&fam, 0.4, &ScanConfig::default()).unwrap();
        assert!(e.passed());
        for eps in [0.5, 0.9, 2.0] {
            assert!(reverify(&fam, &e, eps).unwrap());
        }
    }

    #[test]
    fn power_tail_translation_bound_dominates_refined_estimate() {
        use crate::grid::{Grid, TailSide};
        let g = Grid::line(0.0, 4.0, 0.25).unwrap();
        let f = GridFunction::new(
            g,
            vec![0.0; 16],
            Tail::power_law(1.0, 1.0, 4.0, TailSide::Right),
        )
        .unwrap();
        // Same function with the tail replaced by cells out to 4096.
        let fine = GridFunction::sample(Grid::line(0.0, 4096.0, 0.25).unwrap(), |x| {
            if x[0] > 4.0 {
                1.0 / x[0]
            } else {
                0.0
            }
        })
        .unwrap();
        let y = [0.5];
        let bound = translation_integral(&f, &y, 2.0, true).unwrap();
        let direct = translation_integral(&fine, &y, 2.0, true).unwrap();
        assert!(bound >= direct, "{bound} < {direct}");
        assert!(bound < 4.0 * direct);
    }

    #[test]
    fn infinite_lp_norm_rejected() {
        use crate::grid::{Grid, TailSide};
        let g = Grid::line(0.0, 1.0, 0.5).unwrap();
        let f = GridFunction::new(
            g,
            vec![0.0; 2],
            Tail::power_law(1.0, 1.0, 1.0, TailSide::Right),
        )
        .unwrap();
        let fam = family(vec![f], 2.0);
        assert!(check_kr_lp(&fam, 0.5, &ScanConfig::default()).is_ok());
        let fam1 = FamilySpec::new(fam.members().to_vec(), NormParams::new(1.0).unwrap());
        // x^-1 is not even in the space for p = 1.
        assert!(fam1.is_err());
    }
}
