use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use lambdap_core::criteria::{
    full_report, ConditionEntry, ConditionReport, FamilySpec, ScanConfig, ShiftLattice,
};
use lambdap_core::families::GeneratorSpec;
use lambdap_core::io::{family_from_json, family_to_json, to_json};
use lambdap_core::nets::{greedy_net, truncation_lift_net, verify_covering, EpsNet};
use lambdap_core::verdicts::{render_markdown, standard_generator, verdict_table};
use lambdap_core::{alpha_norm, lp_norm, Error, NormParams};

use crate::{Input, Method, Scan};

const DEFAULT_EPS: f64 = 0.5;

fn load(input: &Input) -> Result<FamilySpec> {
    let family = match (&input.family, &input.gen) {
        (Some(path), _) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let members =
                family_from_json(&text).with_context(|| format!("parsing {}", path.display()))?;
            FamilySpec::new(members, NormParams::new(input.p)?)?
                .with_label(path.display().to_string())
        }
        (None, Some(spec)) => {
            let g: GeneratorSpec = spec
                .parse()
                .with_context(|| format!("generator '{spec}'"))?;
            FamilySpec::from_generator(&g, input.p)?
        }
        (None, None) => bail!("either --family or --gen is required"),
    };
    if let Some(path) = &input.emit {
        write_out(path, &family_to_json(family.members())?)?;
    }
    Ok(family)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write_out(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let v = match s.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>()? / b.trim().parse::<f64>()?,
        None => s.trim().parse()?,
    };
    Ok(v)
}

fn scan_config(scan: &Scan) -> Result<ScanConfig> {
    let mut config = ScanConfig {
        r_max: scan.r_max,
        m_max: scan.m_max,
        ..ScanConfig::default()
    };
    if let Some(spec) = &scan.shifts {
        let (step, count) = spec
            .split_once(',')
            .with_context(|| format!("--shifts expects STEP,COUNT, got '{spec}'"))?;
        let step = parse_real(step).with_context(|| format!("--shifts step '{step}'"))?;
        let count: u32 = count
            .trim()
            .parse()
            .with_context(|| format!("--shifts count '{count}'"))?;
        config.lattice = Some(ShiftLattice::new(step, count)?);
    }
    Ok(config)
}

fn eps_list(eps: &[f64]) -> Vec<f64> {
    if eps.is_empty() {
        vec![DEFAULT_EPS]
    } else {
        eps.to_vec()
    }
}

fn fmt_norm(v: f64) -> String {
    if v.is_finite() {
        v.to_string()
    } else {
        "inf".to_string()
    }
}

fn norm_rows(family: &FamilySpec) -> Result<Vec<(f64, f64)>> {
    family
        .members()
        .iter()
        .map(|f| Ok((alpha_norm(f, family.params())?, lp_norm(f, family.params()))))
        .collect()
}

pub fn norm(input: &Input, out: Option<&Path>) -> Result<bool> {
    let family = load(input)?;
    let mut text = String::from("index\talpha_norm\tlp_norm\n");
    for (i, (a, l)) in norm_rows(&family)?.into_iter().enumerate() {
        writeln!(text, "{i}\t{a}\t{}", fmt_norm(l))?;
    }
    emit(out, &text)?;
    Ok(true)
}

fn describe(e: &ConditionEntry) -> String {
    let symbol = match e.condition.name() {
        "translation" | "lp-translation" => "r",
        "level" => "M",
        _ => "R",
    };
    let mut s = format!("eps={:<6} {:<15} ", e.eps, e.condition.name());
    match (&e.witness, &e.offender) {
        (Some(w), _) => write!(s, "pass  {symbol}={w}").unwrap(),
        (None, Some(o)) => write!(
            s,
            "fail  member {} value {} at {:?}",
            o.index, o.value, o.at
        )
        .unwrap(),
        (None, None) => s.push_str("fail"),
    }
    if let Some(l) = e.scan.lattice {
        write!(s, "  [shifts ±j·{} for j <= {}]", l.step, l.count).unwrap();
    }
    if let (Some(b), Some(src)) = (e.scan.bound, e.scan.bound_source) {
        let src = serde_json::to_value(src).unwrap_or_default();
        write!(s, "  [bound {b}, {}]", src.as_str().unwrap_or_default()).unwrap();
    }
    s
}

fn summary(report: &ConditionReport) -> String {
    let mut s = format!(
        "family: {} (K={}, p={})\n",
        report.label.as_deref().unwrap_or("-"),
        report.members,
        report.p
    );
    for e in &report.entries {
        s.push_str(&describe(e));
        s.push('\n');
    }
    writeln!(s, "verdict: {}", report.verdict).unwrap();
    s
}

pub fn check(
    input: &Input,
    eps: &[f64],
    scan: &Scan,
    out: Option<&Path>,
    json: bool,
) -> Result<bool> {
    let family = load(input)?;
    let report = full_report(&family, &eps_list(eps), &scan_config(scan)?)?;
    let body = to_json(&report)?;
    if let Some(path) = out {
        write_out(path, &body)?;
    }
    if json {
        print!("{body}");
    } else {
        print!("{}", summary(&report));
    }
    Ok(report.candidate_totally_bounded)
}

pub fn net(input: &Input, eps: f64, method: Method, out: Option<&Path>) -> Result<bool> {
    let family = load(input)?;
    let net: EpsNet = match method {
        Method::Greedy => greedy_net(&family, eps)?,
        Method::TruncationLift => match truncation_lift_net(&family, eps) {
            Ok(n) => n,
            Err(e @ Error::LevelConditionFailed { .. }) => {
                eprintln!("truncation-lift failed: {e}");
                return Ok(false);
            }
            Err(e) => return Err(e.into()),
        },
    };
    let check = verify_covering(&family, &net)?;
    println!(
        "net size {} for {} members at eps={} (p={})",
        net.size(),
        family.len(),
        net.eps,
        net.p
    );
    if let Some(m) = net.truncation_level {
        println!("truncation level M={m}");
    }
    println!(
        "max assigned distance {}, slack {}, covering verified: {}",
        net.max_assigned_distance,
        check.worst_slack,
        if check.pass { "yes" } else { "no" }
    );
    if let Some(path) = out {
        write_out(path, &to_json(&net)?)?;
    }
    Ok(check.pass)
}

pub fn examples(table: bool, out: Option<&Path>) -> Result<bool> {
    if !table {
        let mut s = String::new();
        for name in lambdap_core::families::FamilyName::ALL {
            let (g, expected) = standard_generator(name);
            let marks: Vec<&str> = expected
                .iter()
                .map(|&b| if b { "pass" } else { "fail" })
                .collect();
            writeln!(
                s,
                "{g}\texpected tail/translation/level: {}",
                marks.join("/")
            )?;
        }
        emit(out, &s)?;
        return Ok(true);
    }
    let rows = verdict_table()?;
    emit(out, &render_markdown(&rows))?;
    Ok(rows.iter().all(|r| r.matches_expected()))
}

pub fn report(input: &Input, eps: &[f64], scan: &Scan, out: Option<&Path>) -> Result<bool> {
    let family = load(input)?;
    let eps = eps_list(eps);
    let report = full_report(&family, &eps, &scan_config(scan)?)?;
    let mut s = String::new();
    writeln!(s, "# {}\n", family.label().unwrap_or("family"))?;
    writeln!(s, "{} members, p = {}\n", family.len(), family.p())?;
    writeln!(
        s,
        "## Norms\n\n| index | alpha_norm | lp_norm |\n|---|---|---|"
    )?;
    for (i, (a, l)) in norm_rows(&family)?.into_iter().enumerate() {
        writeln!(s, "| {i} | {a} | {} |", fmt_norm(l))?;
    }
    writeln!(s, "\n## Conditions\n\n| eps | condition | verdict | witness | offender |\n|---|---|---|---|---|")?;
    for e in &report.entries {
        let verdict = if e.passed() { "pass" } else { "fail" };
        let witness = e.witness.map(|w| w.to_string()).unwrap_or_default();
        let offender = e
            .offender
            .as_ref()
            .map(|o| format!("member {} = {}", o.index, o.value))
            .unwrap_or_default();
        writeln!(
            s,
            "| {} | {} | {verdict} | {witness} | {offender} |",
            e.eps, e.condition
        )?;
    }
    writeln!(
        s,
        "\n## Greedy nets\n\n| eps | size | max distance | verified |\n|---|---|---|---|"
    )?;
    for &r in &eps {
        let net = greedy_net(&family, r)?;
        let ok = verify_covering(&family, &net)?.pass;
        writeln!(
            s,
            "| {r} | {} | {} | {} |",
            net.size(),
            net.max_assigned_distance,
            if ok { "yes" } else { "no" }
        )?;
    }
    writeln!(s, "\nverdict: {}", report.verdict)?;
    emit(out, &s)?;
    Ok(report.candidate_totally_bounded)
}
