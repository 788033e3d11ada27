//! JSON file formats for functions, families, reports, nets and certificates.
//!
//! A function is written as
//!
//! ```json
//! {"dim": 1, "box": [[0.0, 1.0]], "spacing": [0.25],
//!  "values": {"rle": [[1.0, 4]]},
//!  "tail": {"kind": "zero"}}
//! ```
//!
//! `values` is either a plain row-major array or `{"rle": [[value, count], ...]}`.
//! A power-law tail reads `{"kind": "power_law", "c": 1.0, "alpha": 1.0,
//! "L": 2.0, "side": "right"}` with an optional `"cap"`. A family file is a
//! JSON array of functions. Floats round-trip bit-exactly.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::grid::{Axis, Grid, GridFunction, PowerLaw, Runs, Tail, TailSide};

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum ValuesRepr {
    Dense(Vec<f64>),
    Rle { rle: Vec<(f64, u64)> },
}

fn right() -> TailSide {
    TailSide::Right
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum TailRepr {
    Zero,
    PowerLaw {
        c: f64,
        alpha: f64,
        #[serde(rename = "L")]
        onset: f64,
        #[serde(default = "right")]
        side: TailSide,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cap: Option<f64>,
    },
}

#[derive(Serialize, Deserialize)]
struct FunctionRepr {
    dim: usize,
    #[serde(rename = "box")]
    bounds: Vec<[f64; 2]>,
    spacing: Vec<f64>,
    values: ValuesRepr,
    tail: TailRepr,
}

impl From<&GridFunction> for FunctionRepr {
    fn from(f: &GridFunction) -> Self {
        let axes = f.grid().axes();
        let runs = f.values();
        let values = if 2 * runs.runs().len() < runs.cells() as usize {
            ValuesRepr::Rle {
                rle: runs.iter().map(|r| (r.value, r.len)).collect(),
            }
        } else {
            ValuesRepr::Dense(runs.to_dense())
        };
        let tail = match f.tail() {
            Tail::Zero => TailRepr::Zero,
            Tail::PowerLaw(p) => TailRepr::PowerLaw {
                c: p.coeff,
                alpha: p.exponent,
                onset: p.onset,
                side: p.side,
                cap: p.cap,
            },
        };
        FunctionRepr {
            dim: f.dim(),
            bounds: axes.iter().map(|a| [a.lo(), a.hi()]).collect(),
            spacing: axes.iter().map(|a| a.spacing).collect(),
            values,
            tail,
        }
    }
}

impl TryFrom<FunctionRepr> for GridFunction {
    type Error = Error;

    fn try_from(r: FunctionRepr) -> Result<Self> {
        if r.bounds.len() != r.dim || r.spacing.len() != r.dim {
            return Err(Error::Format(format!(
                "dim is {} but box has {} axes and spacing {}",
                r.dim,
                r.bounds.len(),
                r.spacing.len()
            )));
        }
        let axes = r
            .bounds
            .iter()
            .zip(&r.spacing)
            .map(|(b, &h)| Axis::covering(b[0], b[1], h))
            .collect::<Result<Vec<_>>>()?;
        let grid = Grid::new(axes)?;
        let values = match r.values {
            ValuesRepr::Dense(v) => Runs::from_dense(&v),
            ValuesRepr::Rle { rle } => {
                let mut runs = Runs::new();
                for (v, n) in rle {
                    runs.push(v, n);
                }
                runs
            }
        };
        let tail = match r.tail {
            TailRepr::Zero => Tail::Zero,
            TailRepr::PowerLaw {
                c,
                alpha,
                onset,
                side,
                cap,
            } => Tail::PowerLaw(PowerLaw {
                coeff: c,
                exponent: alpha,
                onset,
                side,
                cap,
            }),
        };
        GridFunction::from_runs(grid, values, tail)
    }
}

impl Serialize for GridFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FunctionRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for GridFunction {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = FunctionRepr::deserialize(d)?;
        GridFunction::try_from(repr).map_err(D::Error::custom)
    }
}

fn format_err(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(format_err)?;
    s.push('\n');
    Ok(s)
}

pub fn function_from_json(text: &str) -> Result<GridFunction> {
    serde_json::from_str(text).map_err(format_err)
}

/// Parses a family file; an empty array is rejected.
pub fn family_from_json(text: &str) -> Result<Vec<GridFunction>> {
    let raw: Vec<serde_json::Value> = serde_json::from_str(text).map_err(format_err)?;
    if raw.is_empty() {
        return Err(Error::EmptyFamily);
    }
    raw.into_iter()
        .enumerate()
        .map(|(i, v)| serde_json::from_value(v).map_err(|e| Error::member(i, format_err(e))))
        .collect()
}

pub fn family_to_json(members: &[GridFunction]) -> Result<String> {
    to_json(members)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{default_phi, family_u, family_v};

    #[test]
    fn round_trip_is_bit_exact() {
        let fs = vec![
            family_u(7, 1.0, &default_phi()).unwrap(),
            family_v(4, 2.0, 1.0 / 16.0).unwrap(),
            GridFunction::zero(1),
            GridFunction::on_interval(-1.0, 0.5, 0.5, vec![0.1, -0.0, 1e-300]).unwrap(),
        ];
        let text = family_to_json(&fs).unwrap();
        let back = family_from_json(&text).unwrap();
        assert_eq!(back, fs);
        for (a, b) in back.iter().zip(&fs) {
            let (da, db) = (a.dense_values(), b.dense_values());
            assert!(da.iter().zip(&db).all(|(x, y)| x.to_bits() == y.to_bits()));
        }
        assert_eq!(family_to_json(&back).unwrap(), text);
    }

    #[test]
    fn reads_hand_written_function() {
        let f = function_from_json(
            r#"{"dim":1,"box":[[0,1]],"spacing":[0.25],"values":{"rle":[[1,4]]},"tail":{"kind":"zero"}}"#,
        )
        .unwrap();
        assert_eq!(f.dense_values(), vec![1.0; 4]);
        let g = function_from_json(
            r#"{"dim":1,"box":[[0,2]],"spacing":[1],"values":[0,0],"tail":{"kind":"power_law","c":1,"alpha":1,"L":2}}"#,
        )
        .unwrap();
        assert_eq!(g.eval(&[4.0]), 0.25);
    }

    #[test]
    fn diagnostics() {
        assert_eq!(family_from_json("[]"), Err(Error::EmptyFamily));
        let e = family_from_json("[\n{\"dim\": 1}\n]")
            .unwrap_err()
            .to_string();
        assert!(e.contains("member 0"), "{e}");
        let e = family_from_json("[{").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let bad =
            r#"[{"dim":1,"box":[[0,1]],"spacing":[0.3],"values":[1],"tail":{"kind":"zero"}}]"#;
        assert!(family_from_json(bad).is_err());
    }
}
