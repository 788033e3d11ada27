//! Closed-form power-law behaviour outside the grid box.
//!
//! A one-dimensional [`PowerLaw`] tail models `f(x) = sign(c) * min(|c| |x|^-alpha, cap)`
//! beyond the box edge on one or both sides. Every integral of a catalog
//! transform over a tail piece has a closed form, so tails contribute
//! exactly rather than through sampling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TailSide {
    Right,
    Left,
    Both,
}

impl TailSide {
    pub fn right(self) -> bool {
        matches!(self, TailSide::Right | TailSide::Both)
    }

    pub fn left(self) -> bool {
        matches!(self, TailSide::Left | TailSide::Both)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    /// Signed coefficient; magnitudes use `|coeff|`.
    pub coeff: f64,
    pub exponent: f64,
    /// Radius beyond which the power law is valid. The box must reach it.
    pub onset: f64,
    pub side: TailSide,
    /// Upper bound on the tail magnitude, set by truncation.
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Tail {
    #[default]
    Zero,
    PowerLaw(PowerLaw),
}

impl Tail {
    pub fn power_law(coeff: f64, exponent: f64, onset: f64, side: TailSide) -> Tail {
        Tail::PowerLaw(PowerLaw {
            coeff,
            exponent,
            onset,
            side,
            cap: None,
        })
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Tail::Zero)
    }

    pub fn as_power_law(&self) -> Option<&PowerLaw> {
        match self {
            Tail::Zero => None,
            Tail::PowerLaw(p) => Some(p),
        }
    }

    pub(crate) fn map(&self, scale: f64, cap: Option<f64>) -> Tail {
        match self {
            Tail::Zero => Tail::Zero,
            Tail::PowerLaw(p) => {
                if scale == 0.0 || p.coeff == 0.0 {
                    return Tail::Zero;
                }
                let scaled_cap = p.cap.map(|c| c * scale.abs());
                let cap = match (scaled_cap, cap) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                };
                Tail::PowerLaw(PowerLaw {
                    coeff: p.coeff * scale,
                    cap,
                    ..*p
                })
            }
        }
    }
}

impl PowerLaw {
    pub(crate) fn validate(&self) -> Result<()> {
        let ok = self.coeff.is_finite()
            && self.exponent.is_finite()
            && self.exponent > 0.0
            && self.onset.is_finite()
            && self.onset > 0.0
            && self.cap.is_none_or(|c| c.is_finite() && c > 0.0);
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidTail(format!(
                "need finite coeff, exponent > 0, onset > 0, cap > 0; got {self:?}"
            )))
        }
    }

    /// Tail magnitude at distance `r` from the origin.
    pub fn magnitude(&self, r: f64) -> f64 {
        let v = self.coeff.abs() * r.powf(-self.exponent);
        match self.cap {
            Some(c) => v.min(c),
            None => v,
        }
    }

    /// `int_a^b min(|c| r^-alpha, k)^q dr` over distances `0 < a <= b <= inf`,
    /// where `k` is the effective cap (`self.cap` combined with `clamp`).
    pub fn integral(&self, q: f64, clamp: Option<f64>, a: f64, b: f64) -> Result<f64> {
        if b <= a || self.coeff == 0.0 {
            return Ok(0.0);
        }
        let c = self.coeff.abs();
        let alpha = self.exponent;
        let k = match (self.cap, clamp) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        // Below the crossover radius the integrand is the constant k^q.
        let (flat, from) = match k {
            Some(k) => {
                let cross = (c / k).powf(1.0 / alpha);
                let flat_end = cross.min(b);
                let flat = if flat_end > a {
                    k.powf(q) * (flat_end - a)
                } else {
                    0.0
                };
                (flat, a.max(cross))
            }
            None => (0.0, a),
        };
        if from >= b {
            return Ok(flat);
        }
        let e = alpha * q;
        let cq = c.powf(q);
        let power = if b.is_infinite() {
            if e <= 1.0 {
                return Err(Error::NotIntegrable {
                    coeff: c,
                    exponent: e,
                    from,
                });
            }
            cq * from.powf(1.0 - e) / (e - 1.0)
        } else if (e - 1.0).abs() < 1e-15 {
            cq * (b / from).ln()
        } else {
            cq * (b.powf(1.0 - e) - from.powf(1.0 - e)) / (1.0 - e)
        };
        Ok(flat + power)
    }

    /// Length of `{r in [a, b] : min(|c| r^-alpha, cap) > level}`.
    pub fn measure_above(&self, level: f64, a: f64, b: f64) -> f64 {
        if b <= a || self.coeff == 0.0 {
            return 0.0;
        }
        if let Some(cap) = self.cap {
            if cap <= level {
                return 0.0;
            }
        }
        let limit = (self.coeff.abs() / level).powf(1.0 / self.exponent);
        (limit.min(b) - a).max(0.0)
    }

    /// Radius past which the clamped tail integral `int_R^inf min(|f|,1)^p`
    /// drops below `target`. Used to bound witness searches.
    pub fn horizon(&self, p: f64, target: f64) -> f64 {
        let c = self.coeff.abs();
        if c == 0.0 {
            return self.onset;
        }
        let cross = c.powf(1.0 / self.exponent);
        let e = self.exponent * p;
        if e <= 1.0 {
            return f64::INFINITY;
        }
        let r = (c.powf(p) / ((e - 1.0) * target)).powf(1.0 / (e - 1.0));
        cross.max(r).max(self.onset)
    }
}
