//! Generators for the benchmark families: saturating bumps `f_k`, travelling
//! indicators `g_k`, Rademacher functions `h_k`, escaping spikes `u_k` and
//! the truncated inverse `v_k`.
//!
//! A family can also be described by a short generator string such as
//! `f:k=1..100,p=2` or `v:k=1/2/4/8,p=2,h=1/256`; see [`GeneratorSpec`].

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::grid::{snap, Grid, GridFunction, Runs, Tail, TailSide};

/// Spacing used by the indicator-based families.
pub const DEFAULT_SPACING: f64 = 1.0 / 64.0;

/// Right edge of the `v_k` box; the power-law tail takes over from here.
pub const V_ONSET: f64 = 2.0;

fn check_p(p: f64) -> Result<()> {
    if p.is_finite() && p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "p must satisfy 1 <= p < inf, got {p}"
        )))
    }
}

fn check_k(k: u64) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "family index k must be >= 1".into(),
        ));
    }
    Ok(())
}

/// `f_k = k^(1/p) χ_[0,1]`.
pub fn family_f(k: u64, p: f64) -> Result<GridFunction> {
    check_k(k)?;
    check_p(p)?;
    GridFunction::constant_on(0.0, 1.0, DEFAULT_SPACING, (k as f64).powf(1.0 / p))
}

/// `g_k = χ_[k,k+1]`.
pub fn family_g(k: u64) -> Result<GridFunction> {
    check_k(k)?;
    let k = k as f64;
    GridFunction::constant_on(k, k + 1.0, DEFAULT_SPACING, 1.0)
}

/// `r_k(x) = sign(sin(2^k π x))` restricted to `[0,1]`, on the grid of
/// spacing `2^-k_grid`.
pub fn rademacher(k: u32, k_grid: u32) -> Result<GridFunction> {
    if k_grid < k + 1 {
        return Err(Error::InvalidParameter(format!(
            "Rademacher r_{k} needs grid exponent >= {}, got {k_grid}",
            k + 1
        )));
    }
    if k_grid > 40 {
        return Err(Error::InvalidParameter(format!(
            "grid exponent {k_grid} too large"
        )));
    }
    let h = (-(k_grid as f64)).exp2();
    let block = 1u64 << (k_grid - k);
    let mut runs = Runs::new();
    for b in 0..(1u64 << k) {
        runs.push(if b % 2 == 0 { 1.0 } else { -1.0 }, block);
    }
    GridFunction::from_runs(Grid::line(0.0, 1.0, h)?, runs, Tail::Zero)
}

/// `h_k`, the `k`-th Rademacher function on `[0,1]`.
pub fn family_h(k: u32, k_grid: u32) -> Result<GridFunction> {
    rademacher(k, k_grid)
}

/// Step bump used as the limit of the `u_k`: `1/2` on `[0,1/2]`, `1/4` on
/// `[1/2,1]`.
pub fn default_phi() -> GridFunction {
    let n = (0.5 / DEFAULT_SPACING) as usize;
    let mut values = vec![0.5; n];
    values.extend(std::iter::repeat_n(0.25, n));
    GridFunction::on_interval(0.0, 1.0, DEFAULT_SPACING, values).expect("static grid")
}

/// `u_k = φ + k^(1/p) χ_[k, k+1/k]`; the result lives on the common
/// refinement of φ's grid and `1/k`.
pub fn family_u(k: u64, p: f64, phi: &GridFunction) -> Result<GridFunction> {
    check_k(k)?;
    check_p(p)?;
    if phi.dim() != 1 || !phi.tail().is_zero() {
        return Err(Error::InvalidParameter(
            "φ must be a one-dimensional Zero-tail function".into(),
        ));
    }
    if phi.values().iter().any(|r| r.value < 0.0) {
        return Err(Error::InvalidParameter("φ must be nonnegative".into()));
    }
    let kf = k as f64;
    let bump = GridFunction::constant_on(kf, kf + 1.0 / kf, 1.0 / kf, kf.powf(1.0 / p))?;
    phi.add(&bump)
}

/// `x^-1` on the cells of `[lo, V_ONSET]` using the `L^p` mean
/// `((1/h) ∫_cell x^-p)^(1/p)` so that cell integrals of `|·|^p` are exact.
fn inverse_cells(lo_cell: u64, h: f64, p: f64, runs: &mut Runs, cells: u64) {
    for i in lo_cell..cells {
        let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
        let mean = if p == 1.0 {
            (b / a).ln() / h
        } else {
            (a.powf(1.0 - p) - b.powf(1.0 - p)) / ((p - 1.0) * h)
        };
        runs.push(mean.powf(1.0 / p), 1);
    }
}

fn v_grid(h: f64) -> Result<(Grid, u64)> {
    let cells = snap(V_ONSET, h)
        .ok_or_else(|| Error::InvalidParameter(format!("spacing {h} does not divide {V_ONSET}")))?;
    Ok((Grid::line(0.0, V_ONSET, h)?, cells as u64))
}

/// `v_k = x^-1 χ_[1/k, ∞)` on `[0, 2]` with spacing `h` (which must divide
/// `1/k`) and the exact power-law tail beyond 2. Requires `p > 1`.
pub fn family_v(k: u64, p: f64, h: f64) -> Result<GridFunction> {
    check_k(k)?;
    check_p(p)?;
    if p <= 1.0 {
        return Err(Error::InvalidParameter("v_k needs p > 1".into()));
    }
    if k as f64 > 1.0 / h.min(1.0) || snap(1.0 / k as f64, h).is_none() {
        return Err(Error::InvalidParameter(format!(
            "spacing {h} does not divide 1/{k}"
        )));
    }
    let (grid, cells) = v_grid(h)?;
    let first = snap(1.0 / k as f64, h).unwrap() as u64;
    let mut runs = Runs::new();
    runs.push(0.0, first);
    inverse_cells(first, h, p, &mut runs, cells);
    GridFunction::from_runs(
        grid,
        runs,
        Tail::power_law(1.0, 1.0, V_ONSET, TailSide::Right),
    )
}

/// `v = x^-1 χ_(0, ∞)` on the same grid as [`family_v`]. The first cell
/// carries `2/h`; any value `>= 1` has the same clamp there.
pub fn limit_v(p: f64, h: f64) -> Result<GridFunction> {
    check_p(p)?;
    if p <= 1.0 {
        return Err(Error::InvalidParameter("v needs p > 1".into()));
    }
    if h > 1.0 {
        return Err(Error::InvalidParameter(format!("spacing {h} must be <= 1")));
    }
    let (grid, cells) = v_grid(h)?;
    let mut runs = Runs::new();
    runs.push(2.0 / h, 1);
    inverse_cells(1, h, p, &mut runs, cells);
    GridFunction::from_runs(
        grid,
        runs,
        Tail::power_law(1.0, 1.0, V_ONSET, TailSide::Right),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    F,
    G,
    H,
    U,
    V,
}

impl FamilyName {
    pub const ALL: [FamilyName; 5] = [
        FamilyName::F,
        FamilyName::G,
        FamilyName::H,
        FamilyName::U,
        FamilyName::V,
    ];
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyName::F => "f",
            FamilyName::G => "g",
            FamilyName::H => "h",
            FamilyName::U => "u",
            FamilyName::V => "v",
        };
        f.write_str(s)
    }
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "f" => Ok(FamilyName::F),
            "g" => Ok(FamilyName::G),
            "h" => Ok(FamilyName::H),
            "u" => Ok(FamilyName::U),
            "v" => Ok(FamilyName::V),
            other => Err(Error::Format(format!(
                "unknown family '{other}' (expected f, g, h, u or v)"
            ))),
        }
    }
}

/// Parsed generator string `name:key=value,...`.
///
/// Keys: `k` (range `a..b` or list `a/b/c`, default `1..8`), `p`, `K` (grid
/// exponent for `h`, default `max k + 1`) and `h` (spacing for `v`, a decimal
/// or `1/n`, default `1/(4 lcm(k))`).
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub name: FamilyName,
    pub ks: Vec<u64>,
    pub p: Option<f64>,
    pub grid_exponent: Option<u32>,
    pub spacing: Option<f64>,
}

fn parse_ks(s: &str) -> Result<Vec<u64>> {
    let bad = || Error::Format(format!("bad k specification '{s}'"));
    let ks: Vec<u64> = if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b = b.trim();
        let b: u64 = b
            .strip_prefix('=')
            .unwrap_or(b)
            .parse()
            .map_err(|_| bad())?;
        if b < a || b - a >= 1 << 20 {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split('/')
            .map(|t| t.trim().parse::<u64>().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if ks.is_empty() || ks.contains(&0) {
        return Err(Error::Format(format!("k values must be >= 1 in '{s}'")));
    }
    Ok(ks)
}

fn parse_real(key: &str, s: &str) -> Result<f64> {
    let bad = || Error::Format(format!("bad value for {key}: '{s}'"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut spec = GeneratorSpec {
            name: name.parse()?,
            ks: (1..=8).collect(),
            p: None,
            grid_exponent: None,
            spacing: None,
        };
        for item in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Format(format!("expected key=value, got '{item}'")))?;
            match key.trim() {
                "k" => spec.ks = parse_ks(value)?,
                "p" => spec.p = Some(parse_real("p", value)?),
                "K" => {
                    spec.grid_exponent = Some(
                        value
                            .trim()
                            .parse()
                            .map_err(|_| Error::Format(format!("bad value for K: '{value}'")))?,
                    )
                }
                "h" => spec.spacing = Some(parse_real("h", value)?),
                other => return Err(Error::Format(format!("unknown generator key '{other}'"))),
            }
        }
        Ok(spec)
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:k=", self.name)?;
        let contiguous = self.ks.windows(2).all(|w| w[1] == w[0] + 1);
        if contiguous && self.ks.len() > 1 {
            write!(f, "{}..{}", self.ks[0], self.ks[self.ks.len() - 1])?;
        } else {
            let parts: Vec<String> = self.ks.iter().map(u64::to_string).collect();
            write!(f, "{}", parts.join("/"))?;
        }
        if let Some(p) = self.p {
            write!(f, ",p={p}")?;
        }
        if let Some(k) = self.grid_exponent {
            write!(f, ",K={k}")?;
        }
        if let Some(h) = self.spacing {
            write!(f, ",h={h}")?;
        }
        Ok(())
    }
}

impl GeneratorSpec {
    pub fn new(name: FamilyName, ks: impl IntoIterator<Item = u64>) -> Self {
        Self {
            name,
            ks: ks.into_iter().collect(),
            p: None,
            grid_exponent: None,
            spacing: None,
        }
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = Some(p);
        self
    }

    /// Exponent used to build the members: the spec's own `p`, else `default`.
    pub fn p_or(&self, default: f64) -> f64 {
        self.p.unwrap_or(default)
    }

    /// Default `v` spacing `1/(4 lcm(k))`.
    fn v_spacing(&self) -> Result<f64> {
        if let Some(h) = self.spacing {
            return Ok(h);
        }
        let mut l = 1u64;
        for &k in &self.ks {
            l = l / gcd(l, k) * k;
            if l > 1 << 20 {
                return Err(Error::InvalidParameter(
                    "lcm of the k values is too large; pass h explicitly".into(),
                ));
            }
        }
        Ok(1.0 / (4 * l) as f64)
    }

    pub fn build(&self, default_p: f64) -> Result<Vec<GridFunction>> {
        if self.ks.is_empty() {
            return Err(Error::EmptyFamily);
        }
        let p = self.p_or(default_p);
        match self.name {
            FamilyName::F => self.ks.iter().map(|&k| family_f(k, p)).collect(),
            FamilyName::G => self.ks.iter().map(|&k| family_g(k)).collect(),
            FamilyName::H => {
                let kmax = *self.ks.iter().max().unwrap();
                if kmax > 39 {
                    return Err(Error::InvalidParameter(format!(
                        "Rademacher index {kmax} too large"
                    )));
                }
                let grid = self.grid_exponent.unwrap_or(kmax as u32 + 1);
                self.ks.iter().map(|&k| family_h(k as u32, grid)).collect()
            }
            FamilyName::U => {
                let phi = default_phi();
                self.ks.iter().map(|&k| family_u(k, p, &phi)).collect()
            }
            FamilyName::V => {
                let h = self.v_spacing()?;
                self.ks.iter().map(|&k| family_v(k, p, h)).collect()
            }
        }
    }

    /// The natural limit of the family, where it has one (`u -> φ`, `v -> v`).
    pub fn limit(&self, default_p: f64) -> Result<Option<GridFunction>> {
        match self.name {
            FamilyName::U => Ok(Some(default_phi())),
            FamilyName::V => Ok(Some(limit_v(self.p_or(default_p), self.v_spacing()?)?)),
            _ => Ok(None),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fnorms::{alpha_distance, alpha_norm, lp_norm, NormParams};
    use crate::grid::{Region, Transform};

    fn np(p: f64) -> NormParams {
        NormParams::new(p).unwrap()
    }

    #[test]
    fn f_saturates() {
        for p in [1.0, 2.0] {
            for k in [1, 3, 50] {
                let f = family_f(k, p).unwrap();
                assert_eq!(alpha_norm(&f, np(p)).unwrap(), 1.0);
                assert!((lp_norm(&f, np(p)) - (k as f64).powf(1.0 / p)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn g_distance_between_disjoint() {
        let d = alpha_distance(&family_g(2).unwrap(), &family_g(5).unwrap(), np(1.0)).unwrap();
        assert_eq!(d, 2.0);
    }

    #[test]
    fn rademacher_blocks() {
        let r = rademacher(2, 3).unwrap();
        assert_eq!(
            r.dense_values(),
            vec![1.0, 1.0, -1.0, -1.0, 1.0, 1.0, -1.0, -1.0]
        );
        assert!(rademacher(3, 3).is_err());
        let mean = r.integrate(Transform::Power(1.0), &Region::All).unwrap();
        assert_eq!(mean, 1.0);
        let signed: f64 = r.dense_values().iter().sum();
        assert_eq!(signed, 0.0);
    }

    #[test]
    fn rademacher_distances() {
        let a = rademacher(1, 6).unwrap();
        let b = rademacher(4, 6).unwrap();
        assert_eq!(alpha_distance(&a, &b, np(1.0)).unwrap(), 0.5);
    }

    #[test]
    fn u_distance_to_phi() {
        let phi = default_phi();
        for k in [1, 3, 4, 7, 64] {
            let u = family_u(k, 1.0, &phi).unwrap();
            let d = alpha_distance(&u, &phi, np(1.0)).unwrap();
            assert!((d - 1.0 / k as f64).abs() < 1e-12, "k={k}: {d}");
        }
    }

    #[test]
    fn v_norms() {
        let h = 1.0 / 32.0;
        let v = limit_v(2.0, h).unwrap();
        for k in [1, 2, 4, 8] {
            let vk = family_v(k, 2.0, h).unwrap();
            assert!((lp_norm(&vk, np(2.0)).powi(2) - k as f64).abs() < 1e-9 * k as f64);
            let d = alpha_distance(&vk, &v, np(2.0)).unwrap();
            assert!((d * d - 1.0 / k as f64).abs() < 1e-12);
        }
        assert!(family_v(3, 2.0, h).is_err());
        assert!(family_v(2, 1.0, h).is_err());
    }

    #[test]
    fn generator_round_trip() {
        let s: GeneratorSpec = "f:k=1..100,p=2".parse().unwrap();
        assert_eq!(s.ks.len(), 100);
        assert_eq!(s.p, Some(2.0));
        assert_eq!(s.to_string().parse::<GeneratorSpec>().unwrap(), s);
        let v: GeneratorSpec = "v:k=1/2/4,p=2".parse().unwrap();
        assert_eq!(v.v_spacing().unwrap(), 1.0 / 16.0);
        assert_eq!(v.build(1.0).unwrap().len(), 3);
        assert!("q:k=1".parse::<GeneratorSpec>().is_err());
        assert!("f:k=0..3".parse::<GeneratorSpec>().is_err());
        assert!("f:z=3".parse::<GeneratorSpec>().is_err());
    }
}
