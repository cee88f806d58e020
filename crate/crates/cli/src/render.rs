use std::fmt::Write as _;

use gme_core::bloch::CoefficientRecord;
use gme_core::criteria::CriterionReport;
use gme_core::scan::{CurvePoint, ScanResult};
use gme_core::selftest::SelftestReport;

/// Six significant digits, switching to exponent form outside `[1e-4, 1e6)`.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..6).contains(&mag) {
        format!("{:.*}", (5 - mag).max(0) as usize, x)
    } else {
        format!("{x:.5e}")
    }
}

fn opt6(x: Option<f64>) -> String {
    x.map_or_else(|| "none".to_string(), sig6)
}

fn csv_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> csv::Result<()>) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    build(&mut w)?;
    Ok(String::from_utf8(w.into_inner()?)?)
}

pub fn json<T: serde::Serialize>(value: &T) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

pub fn report_text(r: &CriterionReport) -> String {
    let mut out = String::new();
    for rec in &r.records {
        let _ = writeln!(
            out,
            "{:<10} trace_norm={:<12} bound={}{}",
            rec.bipartition.to_string(),
            sig6(rec.trace_norm),
            sig6(rec.bound.value),
            if rec.bound.hypothesis_ok { "" } else { " (inapplicable)" }
        );
    }
    let _ = writeln!(out, "T = {}", sig6(r.t_score));
    let _ = writeln!(out, "K = {}", sig6(r.k_threshold));
    let status = if r.detected {
        "GME detected"
    } else if r.inconclusive {
        "inconclusive"
    } else {
        "not detected"
    };
    let _ = writeln!(out, "verdict: {status}");
    for c in &r.caveats {
        let _ = writeln!(out, "caveat: {c}");
    }
    out
}

pub fn report_csv(r: &CriterionReport) -> anyhow::Result<String> {
    csv_string(|w| {
        w.write_record(["bipartition", "trace_norm", "bound", "applicable"])?;
        for rec in &r.records {
            w.write_record([
                rec.bipartition.to_string(),
                rec.trace_norm.to_string(),
                rec.bound.value.to_string(),
                rec.bound.hypothesis_ok.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn scan_text(results: &[ScanResult]) -> String {
    let mut out = String::new();
    for r in results {
        let _ = write!(
            out,
            "{} [{}] {} {}: threshold {} ({})",
            r.family,
            r.target,
            r.params,
            r.params.placement,
            opt6(r.threshold),
            r.method
        );
        if let Some(note) = &r.note {
            let _ = write!(out, "; {note}");
        }
        out.push('\n');
    }
    out
}

pub fn scan_csv(results: &[ScanResult]) -> anyhow::Result<String> {
    csv_string(|w| {
        w.write_record(["family", "target", "alpha", "beta", "gamma", "placement", "threshold", "method"])?;
        for r in results {
            w.write_record([
                r.family.clone(),
                r.target.to_string(),
                r.params.alpha.to_string(),
                r.params.beta.to_string(),
                r.params.gamma.to_string(),
                r.params.placement.to_string(),
                r.threshold.map_or_else(String::new, |x| x.to_string()),
                r.method.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Curve rows, optionally with the comparison columns `G1`, `G2`.
pub fn curve_csv(points: &[CurvePoint], reference: bool) -> anyhow::Result<String> {
    use gme_core::scan::reference::{g1, g2};
    csv_string(|w| {
        let mut header = vec!["x", "T", "K", "F", "detected"];
        if reference {
            header.extend(["G1", "G2"]);
        }
        w.write_record(&header)?;
        for p in points {
            let mut row = vec![
                p.x.to_string(),
                p.t.to_string(),
                p.k.to_string(),
                p.f.to_string(),
                p.detected.to_string(),
            ];
            if reference {
                row.extend([g1(p.x).to_string(), g2(p.x).to_string()]);
            }
            w.write_record(&row)?;
        }
        Ok(())
    })
}

pub fn curve_text(points: &[CurvePoint], reference: bool) -> String {
    use gme_core::scan::reference::{g1, g2};
    let mut out = String::new();
    for p in points {
        let _ = write!(
            out,
            "x={:<8} T={:<12} K={:<12} F={:<12} {}",
            sig6(p.x),
            sig6(p.t),
            sig6(p.k),
            sig6(p.f),
            if p.detected { "detected" } else { "-" }
        );
        if reference {
            let _ = write!(out, " G1={} G2={}", sig6(g1(p.x)), sig6(g2(p.x)));
        }
        out.push('\n');
    }
    out
}

pub fn selftest_text(r: &SelftestReport) -> String {
    let mut out = String::new();
    for c in &r.checks {
        let _ = write!(
            out,
            "{} {}: cases={} violations={} max_residual={} tol={}",
            if c.passed() { "PASS" } else { "FAIL" },
            c.name,
            c.cases,
            c.violations,
            sig6(c.max_residual),
            sig6(c.tolerance)
        );
        if let Some(note) = &c.note {
            let _ = write!(out, " ({note})");
        }
        out.push('\n');
    }
    let failed = r.checks.iter().filter(|c| !c.passed()).count();
    let _ = writeln!(
        out,
        "{} checks, {} failed (samples={}, seed={})",
        r.checks.len(),
        failed,
        r.samples,
        r.seed
    );
    out
}

pub fn selftest_csv(r: &SelftestReport) -> anyhow::Result<String> {
    csv_string(|w| {
        w.write_record(["check", "cases", "violations", "max_residual", "tolerance"])?;
        for c in &r.checks {
            w.write_record([
                c.name.clone(),
                c.cases.to_string(),
                c.violations.to_string(),
                c.max_residual.to_string(),
                c.tolerance.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn tensor_text(records: &[CoefficientRecord]) -> String {
    let mut out = String::new();
    for r in records {
        let subset: Vec<String> = r.subset.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(
            out,
            "{{{}}} {}: re={} im={}",
            subset.join(","),
            r.indices,
            sig6(r.re),
            sig6(r.im)
        );
    }
    out
}

pub fn tensor_csv(records: &[CoefficientRecord]) -> anyhow::Result<String> {
    csv_string(|w| {
        w.write_record(["subset", "indices", "re", "im"])?;
        for r in records {
            let subset: Vec<String> = r.subset.iter().map(|p| p.to_string()).collect();
            w.write_record([subset.join(" "), r.indices.clone(), r.re.to_string(), r.im.to_string()])?;
        }
        Ok(())
    })
}
