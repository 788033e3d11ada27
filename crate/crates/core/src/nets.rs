//! ε-nets in the F-norm metric: greedy member-centred nets, covering
//! verification, covering profiles and the truncation-lift construction.
//!
//! Centers are family members (or their truncations), so a net of radius ε
//! here is a net of radius 2ε for arbitrary centers in the ambient space.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{check_level, FamilySpec, ScanConfig};
use crate::error::{Error, Result};
use crate::fnorms::{alpha_distance, lp_distance, NormParams};
use crate::grid::GridFunction;
use crate::operators::truncate;

/// Symmetric matrix of `alpha_distance` between members.
pub fn pairwise_distances(family: &FamilySpec) -> Result<Vec<Vec<f64>>> {
    let n = family.len();
    let params = family.params();
    let members = family.members();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let d: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            alpha_distance(&members[i], &members[j], params).map_err(|e| Error::member(j, e))
        })
        .collect::<Result<_>>()?;
    let mut m = vec![vec![0.0; n]; n];
    for (&(i, j), &v) in pairs.iter().zip(&d) {
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(m)
}

/// One member's place in the truncation-lift chain
/// `d(f, h) <= d(f, f_M) + ‖f_M − h‖_p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftStep {
    /// `‖f − T_M f‖` in the F-norm; below `η/2` by the level condition.
    pub truncation_distance: f64,
    /// `‖T_M f − h‖_p` to the assigned center; below `η/2` by the `L^p` net.
    pub lp_distance: f64,
    /// Sum of the two terms.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftRecord {
    /// Truncation level `M`.
    pub level: f64,
    /// Radius of the `L^p` net on the truncated family, `η/2`.
    pub lp_radius: f64,
    pub chain: Vec<LiftStep>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsNet {
    pub eps: f64,
    pub p: f64,
    /// Member indices; when `truncation_level` is set, center `i` is
    /// `T_M f_{centers[i]}`.
    pub centers: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub truncation_level: Option<f64>,
    /// Member → position in `centers`.
    pub assignment: Vec<usize>,
    /// Member → distance to its center.
    pub distances: Vec<f64>,
    pub max_assigned_distance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lift: Option<LiftRecord>,
}

impl EpsNet {
    pub fn size(&self) -> usize {
        self.centers.len()
    }

    /// `eps − max_assigned_distance`; positive for a valid net.
    pub fn slack(&self) -> f64 {
        self.eps - self.max_assigned_distance
    }

    /// The center function at position `i`.
    pub fn center(&self, family: &FamilySpec, i: usize) -> Result<GridFunction> {
        let &m = self.centers.get(i).ok_or(Error::DanglingIndex {
            index: i,
            len: self.centers.len(),
        })?;
        let f = family.members().get(m).ok_or(Error::DanglingIndex {
            index: m,
            len: family.len(),
        })?;
        match self.truncation_level {
            Some(level) => truncate(f, level),
            None => Ok(f.clone()),
        }
    }
}

/// Greedy cover: the lowest-index uncovered member becomes a center and
/// covers every later uncovered member at distance `< eps`.
fn greedy<D>(
    members: &[GridFunction],
    eps: f64,
    dist: D,
) -> Result<(Vec<usize>, Vec<usize>, Vec<f64>)>
where
    D: Fn(&GridFunction, &GridFunction) -> Result<f64> + Sync,
{
    let n = members.len();
    let mut assigned: Vec<Option<(usize, f64)>> = vec![None; n];
    let mut centers = Vec::new();
    for i in 0..n {
        if assigned[i].is_some() {
            continue;
        }
        let c = centers.len();
        centers.push(i);
        assigned[i] = Some((c, 0.0));
        let open: Vec<usize> = (i + 1..n).filter(|&j| assigned[j].is_none()).collect();
        let d: Vec<f64> = open
            .par_iter()
            .map(|&j| dist(&members[i], &members[j]).map_err(|e| Error::member(j, e)))
            .collect::<Result<_>>()?;
        for (&j, &v) in open.iter().zip(&d) {
            if v < eps {
                assigned[j] = Some((c, v));
            }
        }
    }
    let (assignment, distances) = assigned
        .into_iter()
        .map(|a| a.expect("all members covered"))
        .unzip();
    Ok((centers, assignment, distances))
}

fn check_radius(eps: f64) -> Result<()> {
    if eps.is_finite() && eps > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "net radius must be > 0, got {eps}"
        )))
    }
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

pub fn greedy_net(family: &FamilySpec, eps: f64) -> Result<EpsNet> {
    check_radius(eps)?;
    let params = family.params();
    let (centers, assignment, distances) =
        greedy(family.members(), eps, |a, b| alpha_distance(a, b, params))?;
    Ok(EpsNet {
        eps,
        p: params.p(),
        max_assigned_distance: max_of(&distances),
        centers,
        truncation_level: None,
        assignment,
        distances,
        lift: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoveringCheck {
    pub pass: bool,
    /// `eps − max distance`; negative when some member is uncovered.
    pub worst_slack: f64,
    pub worst_member: usize,
    /// Recomputed member → center distances.
    pub distances: Vec<f64>,
}

/// Recomputes every assigned distance in the F-norm metric.
pub fn verify_covering(family: &FamilySpec, net: &EpsNet) -> Result<CoveringCheck> {
    if net.assignment.len() != family.len() {
        return Err(Error::DanglingIndex {
            index: net.assignment.len(),
            len: family.len(),
        });
    }
    let centers = (0..net.size())
        .map(|i| net.center(family, i))
        .collect::<Result<Vec<_>>>()?;
    let params = family.params();
    let distances: Vec<f64> = family
        .members()
        .par_iter()
        .zip(&net.assignment)
        .enumerate()
        .map(|(j, (f, &c))| {
            let center = centers.get(c).ok_or(Error::DanglingIndex {
                index: c,
                len: centers.len(),
            })?;
            alpha_distance(f, center, params).map_err(|e| Error::member(j, e))
        })
        .collect::<Result<_>>()?;
    let (worst_member, worst) =
        distances
            .iter()
            .copied()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
            );
    Ok(CoveringCheck {
        pass: worst < net.eps,
        worst_slack: net.eps - worst,
        worst_member,
        distances,
    })
}

/// Greedy net sizes `N(eps, K)` over the first `K` members for each `K`.
///
/// Greedy selection only looks backwards, so the net of a prefix is the
/// prefix of the net: one run over the largest `K` serves every entry.
pub fn covering_profile(
    family: &FamilySpec,
    eps: f64,
    ks: &[usize],
) -> Result<Vec<(usize, usize)>> {
    let Some(&kmax) = ks.iter().max() else {
        return Ok(Vec::new());
    };
    if kmax > family.len() || ks.contains(&0) {
        return Err(Error::InvalidParameter(format!(
            "prefix sizes must lie in 1..={}, got {ks:?}",
            family.len()
        )));
    }
    let net = greedy_net(&family.prefix(kmax), eps)?;
    Ok(ks
        .iter()
        .map(|&k| (k, net.centers.iter().filter(|&&c| c < k).count()))
        .collect())
}

/// Truncate at a level `M` where every superlevel set is small, cover the
/// truncated family by an `η/2`-net in `L^p`, and certify the same centers
/// as an `η`-net for the original family in the F-norm.
pub fn truncation_lift_net(family: &FamilySpec, eta: f64) -> Result<EpsNet> {
    check_radius(eta)?;
    let params = family.params();
    let p = params.p();
    let half = eta / 2.0;
    let budget = half.powf(p);
    let level = check_level(family, budget, &ScanConfig::default())?;
    let Some(m) = level.witness else {
        let o = level
            .offender
            .expect("failed level check names an offender");
        return Err(Error::LevelConditionFailed {
            level: o.at[0],
            index: o.index,
            measure: o.value,
            bound: budget,
        });
    };
    let truncated = family
        .members()
        .iter()
        .map(|f| truncate(f, m))
        .collect::<Result<Vec<_>>>()?;
    let lp = NormParams::new(p)?;
    let (centers, assignment, lp_dist) = greedy(&truncated, half, |a, b| lp_distance(a, b, lp))?;
    let chain_and_actual: Vec<(LiftStep, f64)> = family
        .members()
        .par_iter()
        .enumerate()
        .map(|(j, f)| {
            let center = &truncated[centers[assignment[j]]];
            let t = alpha_distance(f, &truncated[j], params)?;
            let actual = alpha_distance(f, center, params)?;
            Ok((
                LiftStep {
                    truncation_distance: t,
                    lp_distance: lp_dist[j],
                    bound: t + lp_dist[j],
                },
                actual,
            ))
        })
        .collect::<Result<_>>()?;
    let (chain, distances): (Vec<_>, Vec<_>) = chain_and_actual.into_iter().unzip();
    Ok(EpsNet {
        eps: eta,
        p,
        max_assigned_distance: max_of(&distances),
        centers,
        truncation_level: Some(m),
        assignment,
        distances,
        lift: Some(LiftRecord {
            level: m,
            lp_radius: half,
            chain,
        }),
    })
}
