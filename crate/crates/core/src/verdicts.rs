//! Condition verdicts for the five benchmark families at their standard
//! settings, rendered as a markdown table.

use crate::criteria::{full_report, ConditionId, ConditionReport, FamilySpec, ScanConfig};
use crate::error::Result;
use crate::families::{FamilyName, GeneratorSpec};

/// Radius used for every row of the table.
pub const TABLE_EPS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct VerdictRow {
    pub family: FamilyName,
    pub generator: GeneratorSpec,
    pub report: ConditionReport,
    /// Expected tail, translation and level verdicts.
    pub expected: [bool; 3],
}

impl VerdictRow {
    /// Observed verdict per column, in [`ConditionId::ALL`] order.
    pub fn observed(&self) -> [bool; 5] {
        ConditionId::ALL.map(|c| self.report.passes(c))
    }

    pub fn matches_expected(&self) -> bool {
        self.observed()[..3] == self.expected
    }
}

/// Generator and expected verdicts for each family.
pub fn standard_generator(name: FamilyName) -> (GeneratorSpec, [bool; 3]) {
    match name {
        FamilyName::F => (
            GeneratorSpec::new(name, 1..=100).with_p(1.0),
            [true, true, false],
        ),
        FamilyName::G => (
            GeneratorSpec::new(name, 1..=100).with_p(1.0),
            [false, true, true],
        ),
        FamilyName::H => {
            let mut g = GeneratorSpec::new(name, 1..=8).with_p(1.0);
            g.grid_exponent = Some(9);
            (g, [true, false, true])
        }
        FamilyName::U => (
            GeneratorSpec::new(name, 1..=64).with_p(1.0),
            [true, true, true],
        ),
        FamilyName::V => {
            let mut g = GeneratorSpec::new(name, (0..7).map(|j| 1u64 << j)).with_p(2.0);
            g.spacing = Some(1.0 / 256.0);
            (g, [true, true, true])
        }
    }
}

pub fn verdict_row(name: FamilyName) -> Result<VerdictRow> {
    let (generator, expected) = standard_generator(name);
    let family = FamilySpec::from_generator(&generator, 1.0)?;
    let report = full_report(&family, &[TABLE_EPS], &ScanConfig::default())?;
    Ok(VerdictRow {
        family: name,
        generator,
        report,
        expected,
    })
}

pub fn verdict_table() -> Result<Vec<VerdictRow>> {
    FamilyName::ALL.iter().map(|&n| verdict_row(n)).collect()
}

fn mark(b: bool) -> &'static str {
    if b {
        "✓"
    } else {
        "✗"
    }
}

pub fn render_markdown(rows: &[VerdictRow]) -> String {
    let mut out = String::from(
        "| family | (i) tail | (ii) translation | (iii) level | L^p tail | L^p translation | expected (i)(ii)(iii) |\n\
         |---|---|---|---|---|---|---|\n",
    );
    for r in rows {
        let o = r.observed();
        let exp: Vec<&str> = r.expected.iter().map(|&b| mark(b)).collect();
        out.push_str(&format!(
            "| {} `{}` | {} | {} | {} | {} | {} | {} |\n",
            r.family,
            r.generator,
            mark(o[0]),
            mark(o[1]),
            mark(o[2]),
            mark(o[3]),
            mark(o[4]),
            exp.join(" ")
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_parse_back() {
        for n in FamilyName::ALL {
            let (g, _) = standard_generator(n);
            assert_eq!(g.to_string().parse::<GeneratorSpec>().unwrap(), g);
        }
    }
}
