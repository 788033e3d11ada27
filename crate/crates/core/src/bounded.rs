//! Families supported in a bounded box `E`: convergence in measure,
//! almost-equiboundedness and almost-equicontinuity certificates, and the
//! cross-checks between equicontinuity and the translation condition.
//!
//! Everything here uses `p = 1` and requires Zero tails. Members are first
//! put on one common grid over the hull of their boxes, which serves as `E`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{
    check_level, check_translation, condition_values, ConditionEntry, ConditionId,
};
use crate::criteria::{FamilySpec, ScanConfig, ShiftLattice};
use crate::error::{Error, Result};
use crate::fnorms::{alpha_converges, NormParams};
use crate::grid::{Grid, GridFunction, Region, Transform};
use crate::nets::greedy_net;

fn require_bounded(f: &GridFunction, index: usize) -> Result<()> {
    if f.tail().is_zero() {
        Ok(())
    } else {
        Err(Error::member(
            index,
            Error::UnboundedSupport("member has a power-law tail".into()),
        ))
    }
}

/// Members resampled onto one grid covering every member's box.
fn align(members: &[GridFunction]) -> Result<(Grid, Vec<Vec<f64>>)> {
    for (i, m) in members.iter().enumerate() {
        require_bounded(m, i)?;
    }
    let mut hull = members[0].scale(0.0);
    for m in &members[1..] {
        hull = hull.add(&m.scale(0.0))?;
    }
    let values = members
        .iter()
        .map(|m| {
            let g = hull.add(m)?;
            debug_assert_eq!(g.grid(), hull.grid());
            Ok(g.dense_values())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((hull.grid().clone(), values))
}

/// `‖f_k − f‖` in measure on a bounded box: `m_k = |{|f_k − f| > eps}|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureConvergence {
    pub eps: f64,
    pub tol: f64,
    pub measures: Vec<f64>,
    /// `m_K < tol`.
    pub converged: bool,
}

pub fn convergence_in_measure(
    seq: &[GridFunction],
    limit: &GridFunction,
    eps: f64,
    tol: f64,
) -> Result<MeasureConvergence> {
    if seq.is_empty() {
        return Err(Error::EmptyFamily);
    }
    require_bounded(limit, seq.len())?;
    let measures = seq
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            require_bounded(f, k)?;
            Ok(f.sub(limit)
                .map_err(|e| Error::member(k, e))?
                .superlevel_measure(eps))
        })
        .collect::<Result<Vec<f64>>>()?;
    let converged = measures.last().is_some_and(|&m| m < tol);
    Ok(MeasureConvergence {
        eps,
        tol,
        measures,
        converged,
    })
}

/// Verdicts of [`convergence_in_measure`] and [`alpha_converges`] (at
/// `p = 1`) side by side.
pub fn convergence_verdicts(
    seq: &[GridFunction],
    limit: &GridFunction,
    eps: f64,
    tol: f64,
) -> Result<(bool, bool)> {
    let m = convergence_in_measure(seq, limit, eps, tol)?;
    let a = alpha_converges(seq, limit, NormParams::new(1.0)?, tol)?;
    Ok((m.converged, a.converged))
}

/// Cells of one member's exceptional set, flattened row-major on the
/// certificate grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSet {
    pub member: usize,
    pub cells: Vec<u64>,
    pub measure: f64,
}

/// Per-member exceptional sets `S_f` or `B_f`, each of measure `< budget`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceptionalSet {
    pub budget: f64,
    pub sets: Vec<CellSet>,
}

impl ExceptionalSet {
    pub fn max_measure(&self) -> f64 {
        self.sets.iter().map(|s| s.measure).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundednessCertificate {
    /// `|f| <= level` off `S_f`.
    pub level: f64,
    pub grid_spacing: Vec<f64>,
    pub exceptional: ExceptionalSet,
}

/// Level condition at `eps`, with `S_f = {|f| > M}` listed per member and
/// re-checked cell by cell.
pub fn almost_equibounded_certificate(
    family: &FamilySpec,
    eps: f64,
) -> Result<BoundednessCertificate> {
    let (grid, values) = align(family.members())?;
    let entry = check_level(family, eps, &ScanConfig::default())?;
    let Some(level) = entry.witness else {
        let o = entry
            .offender
            .expect("failed level check names an offender");
        return Err(Error::LevelConditionFailed {
            level: o.at[0],
            index: o.index,
            measure: o.value,
            bound: eps,
        });
    };
    let cell = grid.cell_measure();
    let sets: Vec<CellSet> = values
        .iter()
        .enumerate()
        .map(|(member, v)| {
            let cells: Vec<u64> = v
                .iter()
                .enumerate()
                .filter(|(_, x)| x.abs() > level)
                .map(|(i, _)| i as u64)
                .collect();
            CellSet {
                member,
                measure: cells.len() as f64 * cell,
                cells,
            }
        })
        .collect();
    for (s, v) in sets.iter().zip(&values) {
        let off_ok = v
            .iter()
            .enumerate()
            .all(|(i, x)| x.abs() <= level || s.cells.binary_search(&(i as u64)).is_ok());
        if s.measure >= eps || !off_ok {
            return Err(Error::InvalidParameter(format!(
                "exceptional set of member {} failed re-verification",
                s.member
            )));
        }
    }
    Ok(BoundednessCertificate {
        level,
        grid_spacing: grid.axes().iter().map(|a| a.spacing).collect(),
        exceptional: ExceptionalSet { budget: eps, sets },
    })
}

/// Euclidean distance between two closed cells whose indices differ by `d`.
fn gap(d: &[i64], h: &[f64]) -> f64 {
    d.iter()
        .zip(h)
        .map(|(&k, &hj)| {
            let g = (k.abs() - 1).max(0) as f64 * hj;
            g * g
        })
        .sum::<f64>()
        .sqrt()
}

/// Nonzero index offsets (one per ± pair) whose cells lie within `delta`.
fn offsets(grid: &Grid, delta: f64) -> Vec<Vec<i64>> {
    let h: Vec<f64> = grid.axes().iter().map(|a| a.spacing).collect();
    let reach: Vec<i64> = h.iter().map(|&hj| (delta / hj).ceil() as i64 + 1).collect();
    let mut out = Vec::new();
    match grid.dim() {
        1 => {
            for d in 1..=reach[0] {
                if gap(&[d], &h) < delta {
                    out.push(vec![d]);
                }
            }
        }
        _ => {
            for d0 in 0..=reach[0] {
                for d1 in -reach[1]..=reach[1] {
                    if (d0 == 0 && d1 <= 0) || gap(&[d0, d1], &h) >= delta {
                        continue;
                    }
                    out.push(vec![d0, d1]);
                }
            }
        }
    }
    out
}

fn neighbour(grid: &Grid, k: u64, d: &[i64]) -> Option<u64> {
    let idx = grid.unflatten(k);
    let mut out = 0u64;
    for (j, a) in grid.axes().iter().enumerate() {
        let c = idx[j] as i64 + d[j];
        if c < 0 || c >= a.cells as i64 {
            return None;
        }
        out = out * a.cells + c as u64;
    }
    Some(out)
}

/// A pair of cells at distance `< delta` whose values differ by `>= eps`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairViolation {
    pub member: usize,
    pub cells: [u64; 2],
    pub jump: f64,
    /// `|B_f|` for the member.
    pub exceptional_measure: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquicontinuityCertificate {
    pub eps: f64,
    pub delta: f64,
    pub pass: bool,
    pub grid_spacing: Vec<f64>,
    pub exceptional: ExceptionalSet,
    /// Set when the certificate fails.
    pub offender: Option<PairViolation>,
    /// Cell pairs examined by the exhaustive re-verification.
    pub pairs_checked: u64,
}

/// `B_f` = cells that see a jump `>= eps` within distance `delta`.
fn oscillation_set(
    grid: &Grid,
    v: &[f64],
    eps: f64,
    offs: &[Vec<i64>],
) -> (Vec<bool>, Option<[u64; 2]>) {
    let mut marked = vec![false; v.len()];
    let mut first = None;
    for k in 0..v.len() as u64 {
        for d in offs {
            if let Some(n) = neighbour(grid, k, d) {
                if (v[k as usize] - v[n as usize]).abs() >= eps {
                    marked[k as usize] = true;
                    marked[n as usize] = true;
                    first.get_or_insert([k, n]);
                }
            }
        }
    }
    (marked, first)
}

/// Every pair of cells outside `B_f` whose closed cells come within
/// `delta` of each other, measured from the cell bounds.
fn pair_scan(grid: &Grid, v: &[f64], excluded: &[bool], eps: f64, delta: f64) -> (bool, u64) {
    let reach: Vec<u64> = grid
        .axes()
        .iter()
        .map(|a| (delta / a.spacing).ceil() as u64 + 1)
        .collect();
    let n = v.len() as u64;
    let mut checked = 0u64;
    for i in 0..n {
        if excluded[i as usize] {
            continue;
        }
        let ii = grid.unflatten(i);
        let (ilo, ihi) = grid.cell_bounds(i);
        for j in i + 1..n {
            let jj = grid.unflatten(j);
            if ii[0] + reach[0] < jj[0] {
                break;
            }
            if grid.dim() == 2 && ii[1].abs_diff(jj[1]) > reach[1] {
                continue;
            }
            if excluded[j as usize] {
                continue;
            }
            let (jlo, jhi) = grid.cell_bounds(j);
            let dist = (0..grid.dim())
                .map(|a| {
                    let g = (jlo[a] - ihi[a]).max(ilo[a] - jhi[a]).max(0.0);
                    g * g
                })
                .sum::<f64>()
                .sqrt();
            if dist >= delta {
                continue;
            }
            checked += 1;
            if (v[i as usize] - v[j as usize]).abs() >= eps {
                return (false, checked);
            }
        }
    }
    (true, checked)
}

/// Oscillation certificate for almost equicontinuity at `(eps, delta)`.
/// Sound but possibly incomplete: a family may admit smaller exceptional
/// sets than the oscillation construction finds.
pub fn almost_equicontinuity_certificate(
    family: &FamilySpec,
    eps: f64,
    delta: f64,
) -> Result<EquicontinuityCertificate> {
    let (grid, values) = align(family.members())?;
    if delta.is_nan() || delta < grid.min_spacing() * (1.0 - 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "delta {delta} is below the grid spacing {}",
            grid.min_spacing()
        )));
    }
    let offs = offsets(&grid, delta);
    let cell = grid.cell_measure();
    let per_member: Vec<(CellSet, Option<[u64; 2]>, bool, u64)> = values
        .par_iter()
        .enumerate()
        .map(|(member, v)| {
            let (marked, first) = oscillation_set(&grid, v, eps, &offs);
            let (ok, checked) = pair_scan(&grid, v, &marked, eps, delta);
            let cells: Vec<u64> = marked
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i as u64))
                .collect();
            let set = CellSet {
                member,
                measure: cells.len() as f64 * cell,
                cells,
            };
            (set, first, ok, checked)
        })
        .collect();
    let mut offender = None;
    let mut pairs_checked = 0;
    let mut sets = Vec::with_capacity(per_member.len());
    for (set, first, ok, checked) in per_member {
        pairs_checked += checked;
        if offender.is_none() && (set.measure >= eps || !ok) {
            let [a, b] = first.unwrap_or([0, 0]);
            let v = &values[set.member];
            offender = Some(PairViolation {
                member: set.member,
                cells: [a, b],
                jump: (v[a as usize] - v[b as usize]).abs(),
                exceptional_measure: set.measure,
            });
        }
        sets.push(set);
    }
    Ok(EquicontinuityCertificate {
        eps,
        delta,
        pass: offender.is_none(),
        grid_spacing: grid.axes().iter().map(|a| a.spacing).collect(),
        exceptional: ExceptionalSet { budget: eps, sets },
        offender,
        pairs_checked,
    })
}

/// `|E △ (E − y)|` for the box `E = [lo, hi]`.
pub fn symmetric_difference_measure(lo: &[f64], hi: &[f64], y: &[f64]) -> f64 {
    let full: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
    let overlap: f64 = lo
        .iter()
        .zip(hi)
        .zip(y)
        .map(|((a, b), yj)| (b - a - yj.abs()).max(0.0))
        .product();
    2.0 * (full - overlap)
}

/// `∫_E min(|f|, 1) dx`.
pub fn f_seminorm(f: &GridFunction, lo: &[f64], hi: &[f64]) -> Result<f64> {
    f.integrate(
        Transform::ClampPower(1.0),
        &Region::Box {
            lo: lo.to_vec(),
            hi: hi.to_vec(),
        },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Implication {
    /// Antecedent observed and consequent confirmed.
    Holds,
    /// Antecedent not observed on the scanned parameters.
    Vacuous,
    /// Antecedent holds but no scanned parameter exhibits the consequent.
    NotObserved,
    /// Antecedent observed, consequent refuted.
    Violated,
}

/// Equicontinuity certificate ⇒ translation condition, with
/// `ε̃ = ε / (4 + |E|)` so that `(3 + |E|) ε̃ < ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForwardCheck {
    pub outcome: Implication,
    pub eps_tilde: f64,
    /// First scanned `delta` whose certificate passes at `ε̃`.
    pub delta: Option<f64>,
    /// `min(delta, r0)` with `|E △ (E − y)| < ε̃` for `|y| < r0`.
    pub r: Option<f64>,
    /// `|E △ (E − y)|` at the longest scanned shift below `r`.
    pub symmetric_difference: Option<f64>,
    /// Largest translation integral over scanned shifts below `r`.
    pub max_translation: Option<f64>,
}

/// Total boundedness in the seminorm ⇒ equicontinuity certificate at
/// `(ε, delta)` for some scanned `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardCheck {
    pub outcome: Implication,
    /// Greedy net size at radius ε in the seminorm.
    pub net_size: usize,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckRow {
    pub eps: f64,
    /// Certificate verdict at `(ε, delta)` for each scanned `delta`.
    pub certificates: Vec<(f64, bool)>,
    pub translation: ConditionEntry,
    pub forward: ForwardCheck,
    pub backward: BackwardCheck,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub box_lo: Vec<f64>,
    pub box_hi: Vec<f64>,
    pub box_measure: f64,
    pub rows: Vec<CrosscheckRow>,
}

pub fn corollary_crosscheck(
    family: &FamilySpec,
    eps_list: &[f64],
    delta_grid: &[f64],
    lattice: Option<ShiftLattice>,
) -> Result<CrosscheckReport> {
    if delta_grid.is_empty() {
        return Err(Error::InvalidParameter("delta grid is empty".into()));
    }
    let fam = FamilySpec::new(family.members().to_vec(), NormParams::new(1.0)?)?;
    let (grid, _) = align(fam.members())?;
    let box_lo: Vec<f64> = grid.axes().iter().map(|a| a.lo()).collect();
    let box_hi: Vec<f64> = grid.axes().iter().map(|a| a.hi()).collect();
    let lens: Vec<f64> = box_lo.iter().zip(&box_hi).map(|(a, b)| b - a).collect();
    let measure: f64 = lens.iter().product();
    // |E △ (E − y)| <= 2 |y| Σ_j Π_{i≠j} len_i.
    let faces: f64 = (0..lens.len())
        .map(|j| {
            lens.iter()
                .enumerate()
                .filter(|&(i, _)| i != j)
                .map(|(_, l)| l)
                .product::<f64>()
        })
        .sum();
    let lattice = match lattice {
        Some(l) => l,
        None => ShiftLattice::default_for(&fam)?,
    };
    let config = ScanConfig::default().with_lattice(lattice);
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let eps_tilde = eps / (4.0 + measure);
        let mut forward = ForwardCheck {
            outcome: Implication::Vacuous,
            eps_tilde,
            delta: None,
            r: None,
            symmetric_difference: None,
            max_translation: None,
        };
        for &delta in delta_grid {
            if almost_equicontinuity_certificate(&fam, eps_tilde, delta)?.pass {
                let r = delta.min(eps_tilde / (2.0 * faces));
                forward.delta = Some(delta);
                forward.r = Some(r);
                let shifts: Vec<Vec<f64>> = lattice
                    .shifts(grid.dim())
                    .into_iter()
                    .filter(|y| y.iter().map(|c| c * c).sum::<f64>().sqrt() < r)
                    .collect();
                if let Some(longest) = shifts.last() {
                    forward.symmetric_difference =
                        Some(symmetric_difference_measure(&box_lo, &box_hi, longest));
                    let mut worst: f64 = 0.0;
                    for y in &shifts {
                        let v = condition_values(&fam, ConditionId::Translation, y)?;
                        worst = v.into_iter().fold(worst, f64::max);
                    }
                    forward.max_translation = Some(worst);
                    forward.outcome = if worst < eps {
                        Implication::Holds
                    } else {
                        Implication::Violated
                    };
                }
                break;
            }
        }
        let mut certificates = Vec::with_capacity(delta_grid.len());
        for &delta in delta_grid {
            certificates.push((
                delta,
                almost_equicontinuity_certificate(&fam, eps, delta)?.pass,
            ));
        }
        let passing = certificates.iter().find(|c| c.1).map(|c| c.0);
        let backward = BackwardCheck {
            // A finite family is always totally bounded; the question is
            // whether some scanned delta certifies equicontinuity.
            outcome: if passing.is_some() {
                Implication::Holds
            } else {
                Implication::NotObserved
            },
            net_size: greedy_net(&fam, eps)?.size(),
            delta: passing,
        };
        rows.push(CrosscheckRow {
            eps,
            certificates,
            translation: check_translation(&fam, eps, &config)?,
            forward,
            backward,
        });
    }
    Ok(CrosscheckReport {
        box_lo,
        box_hi,
        box_measure: measure,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{family_h, rademacher};

    fn fam(members: Vec<GridFunction>) -> FamilySpec {
        FamilySpec::new(members, NormParams::new(1.0).unwrap()).unwrap()
    }

    #[test]
    fn shrinking_constants_converge_in_measure() {
        let seq: Vec<_> = (1..=10)
            .map(|k| GridFunction::constant_on(0.0, 1.0, 0.25, 1.0 / k as f64).unwrap())
            .collect();
        let zero = GridFunction::zero(1);
        let r = convergence_in_measure(&seq, &zero, 0.2, 1e-9).unwrap();
        assert_eq!(&r.measures[5..], &[0.0; 5]);
        assert!(r.converged);
    }

    #[test]
    fn rademacher_does_not_converge_in_measure() {
        let seq: Vec<_> = (1..=6).map(|k| rademacher(k, 7).unwrap()).collect();
        let r = convergence_in_measure(&seq, &GridFunction::zero(1), 0.5, 0.01).unwrap();
        assert!(r.measures.iter().all(|&m| m == 1.0));
        assert!(!r.converged);
    }

    #[test]
    fn rademacher_is_equibounded_not_equicontinuous() {
        let f = fam((1..=6).map(|k| family_h(k, 7).unwrap()).collect());
        let c = almost_equibounded_certificate(&f, 0.5).unwrap();
        assert_eq!(c.level, 2.0);
        assert!(c.exceptional.sets.iter().all(|s| s.cells.is_empty()));
        let e = almost_equicontinuity_certificate(&f, 0.5, 1.0 / 128.0).unwrap();
        assert!(!e.pass);
        let o = e.offender.unwrap();
        assert_eq!(o.jump, 2.0);
    }

    #[test]
    fn constants_have_empty_oscillation_sets() {
        let f = fam([-1.0, -0.3, 0.5, 1.0]
            .iter()
            .map(|&c| GridFunction::constant_on(0.0, 1.0, 1.0 / 16.0, c).unwrap())
            .collect());
        let e = almost_equicontinuity_certificate(&f, 0.1, 0.25).unwrap();
        assert!(e.pass);
        assert!(e.exceptional.sets.iter().all(|s| s.cells.is_empty()));
    }

    #[test]
    fn half_indicator_collar() {
        let h = 1.0 / 64.0;
        let f = fam(vec![GridFunction::on_interval(
            0.0,
            1.0,
            h,
            (0..64).map(|i| if i < 32 { 1.0 } else { 0.0 }).collect(),
        )
        .unwrap()]);
        for m in [1u32, 2, 4] {
            let delta = m as f64 * h;
            let e = almost_equicontinuity_certificate(&f, 0.25, delta).unwrap();
            assert!(e.pass);
            assert_eq!(e.exceptional.sets[0].measure, 2.0 * delta);
        }
    }

    #[test]
    fn delta_below_spacing_rejected() {
        let f = fam(vec![GridFunction::constant_on(0.0, 1.0, 0.25, 1.0).unwrap()]);
        assert!(almost_equicontinuity_certificate(&f, 0.1, 0.1).is_err());
    }

    #[test]
    fn two_dimensional_collar() {
        let g = Grid::rect([0.0, 0.0], [1.0, 1.0], [0.125, 0.125]).unwrap();
        let f = GridFunction::sample(g, |x| if x[0] < 0.5 { 1.0 } else { 0.0 }).unwrap();
        let e = almost_equicontinuity_certificate(&fam(vec![f]), 0.5, 0.125).unwrap();
        // Two columns of eight cells each.
        assert_eq!(e.exceptional.sets[0].cells.len(), 16);
        assert!(e.pass);
    }

    #[test]
    fn symmetric_difference_of_unit_interval() {
        assert_eq!(symmetric_difference_measure(&[0.0], &[1.0], &[0.25]), 0.5);
        assert_eq!(symmetric_difference_measure(&[0.0], &[1.0], &[3.0]), 2.0);
        let sq = symmetric_difference_measure(&[0.0, 0.0], &[1.0, 1.0], &[0.5, 0.5]);
        assert_eq!(sq, 1.5);
    }

    #[test]
    fn seminorm_matches_alpha_norm_at_p1() {
        let f = rademacher(3, 5).unwrap().scale(0.7);
        let a = crate::fnorms::alpha_norm(&f, NormParams::new(1.0).unwrap()).unwrap();
        assert_eq!(f_seminorm(&f, &[0.0], &[1.0]).unwrap(), a);
    }
}
