//! `gme-detect`: GME verdicts, noise-threshold scans, coefficient dumps and the
//! oracle self-test.
//!
//! Exit status: 0 when GME is detected (or a scan/dump/self-test succeeds),
//! 1 when it is not detected, inconclusive, or a self-test check fails, and
//! 2 on any input error.

mod args;
mod render;

use std::io::Write;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use gme_core::bloch::decompose;
use gme_core::criteria::{gme_verdict, Bipartition, CriterionParams};
use gme_core::scan::{curve, table, FamilySpec, ScanOptions, ScanTarget};
use gme_core::selftest::{self, SelftestConfig};
use gme_core::states::{from_ket, named_state, DensityMatrix, NamedState, StateDescriptor};

use args::{Cli, Command, FamilyArgs, FamilyName, Format, ScanArgs, SelftestArgs, SourceArgs, TensorArgs, VerdictArgs};

const DETECTED: u8 = 0;
const NOT_DETECTED: u8 = 1;
const INPUT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: cannot configure {threads} worker threads: {e}");
            return ExitCode::from(INPUT_ERROR);
        }
    }
    let outcome = match &cli.command {
        Command::Verdict(a) => cmd_verdict(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Selftest(a) => cmd_selftest(a),
        Command::Tensor(a) => cmd_tensor(a),
    };
    match outcome {
        Ok((text, code)) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(INPUT_ERROR);
            }
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(INPUT_ERROR)
        }
    }
}

fn named(family: FamilyName, f: &FamilyArgs) -> anyhow::Result<(String, NamedState)> {
    let need_n = |what: &str| f.n.with_context(|| format!("--family {what} needs --n"));
    Ok(match family {
        FamilyName::Ghz => {
            let (n, d) = (need_n("ghz")?, f.d.unwrap_or(2));
            (format!("ghz n={n} d={d}"), NamedState::Ghz { n, d })
        }
        FamilyName::W => {
            if f.d.is_some_and(|d| d != 2) {
                bail!("--family w is defined for qubits only");
            }
            let n = need_n("w")?;
            (format!("w n={n}"), NamedState::W { n })
        }
        FamilyName::Paper332 => {
            if f.n.is_some() || f.d.is_some() {
                bail!("--family paper_332 takes no --n or --d");
            }
            ("paper_332".to_string(), NamedState::Example332)
        }
    })
}

fn read_descriptor(path: &std::path::Path) -> anyhow::Result<DensityMatrix> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let rho = StateDescriptor::from_json(&text)?.resolve()?;
    Ok(rho)
}

/// Loads and validates the state named by the source flags.
fn load_state(source: &SourceArgs, f: &FamilyArgs, x: Option<f64>) -> anyhow::Result<DensityMatrix> {
    let rho = match (&source.input, source.family) {
        (Some(path), _) => read_descriptor(path)?,
        (None, Some(fam)) => {
            let (_, state) = named(fam, f)?;
            let pure = from_ket(&named_state(state)?)?;
            match x {
                Some(x) => pure.with_white_noise(x)?,
                None => pure,
            }
        }
        (None, None) => bail!("one of --input or --family is required"),
    };
    rho.validate().into_result()?;
    Ok(rho)
}

fn cmd_verdict(a: &VerdictArgs) -> anyhow::Result<(String, u8)> {
    let rho = load_state(&a.source, &a.family, a.x)?;
    let report = gme_verdict(&rho, &a.params.params()?)?;
    let text = match a.format {
        Format::Json => render::json(&report)?,
        Format::Csv => render::report_csv(&report)?,
        Format::Text => render::report_text(&report),
    };
    Ok((text, if report.detected { DETECTED } else { NOT_DETECTED }))
}

fn parse_row(row: &str, base: &CriterionParams) -> anyhow::Result<CriterionParams> {
    let values = row
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("bad --row {row:?}"))?;
    let [alpha, beta, gamma] = values[..] else {
        bail!("--row {row:?} needs exactly three values ALPHA,BETA,GAMMA");
    };
    Ok(CriterionParams {
        alpha,
        beta,
        gamma,
        ..*base
    })
}

fn cmd_scan(a: &ScanArgs) -> anyhow::Result<(String, u8)> {
    let (label, base) = match (&a.source.input, a.source.family) {
        (Some(path), _) => (path.display().to_string(), read_descriptor(path)?),
        (None, Some(fam)) => {
            let (label, state) = named(fam, &a.family)?;
            (label, from_ket(&named_state(state)?)?)
        }
        (None, None) => bail!("one of --input or --family is required"),
    };
    let family = FamilySpec::new(label, base, a.x_lo, a.x_hi)?;
    let n = family.base().system().parties();
    let target = match &a.split {
        Some(s) => ScanTarget::Split(Bipartition::parse(s, n)?),
        None => ScanTarget::Gme,
    };
    let p = a.params.params()?;

    if let Some(points) = a.curve {
        if !a.rows.is_empty() {
            bail!("--curve takes a single parameter set, not --row");
        }
        let pts = curve(&family, &target, &p, points)?;
        let text = match a.format.unwrap_or(Format::Csv) {
            Format::Csv => render::curve_csv(&pts, a.reference)?,
            Format::Json => render::json(&pts)?,
            Format::Text => render::curve_text(&pts, a.reference),
        };
        return Ok((text, 0));
    }

    let rows = if a.rows.is_empty() {
        vec![p]
    } else {
        a.rows.iter().map(|r| parse_row(r, &p)).collect::<anyhow::Result<Vec<_>>>()?
    };
    let opts = ScanOptions {
        tol: a.tol,
        force_bisection: a.bisect,
    };
    let results = table(&family, &target, &rows, &opts)?;
    let text = match a.format.unwrap_or(Format::Text) {
        Format::Json => render::json(&results)?,
        Format::Csv => render::scan_csv(&results)?,
        Format::Text => render::scan_text(&results),
    };
    Ok((text, 0))
}

fn cmd_selftest(a: &SelftestArgs) -> anyhow::Result<(String, u8)> {
    let report = selftest::run(&SelftestConfig {
        samples: a.samples,
        seed: a.seed,
        dims: a.dims.clone(),
    })?;
    let text = match a.format {
        Format::Json => render::json(&report)?,
        Format::Csv => render::selftest_csv(&report)?,
        Format::Text => render::selftest_text(&report),
    };
    Ok((text, if report.passed() { 0 } else { 1 }))
}

fn cmd_tensor(a: &TensorArgs) -> anyhow::Result<(String, u8)> {
    if !(a.cutoff >= 0.0) {
        bail!("--cutoff must be nonnegative");
    }
    let rho = load_state(&a.source, &a.family, a.x)?;
    let records = decompose(&rho).records(a.cutoff);
    let text = match a.format {
        Format::Json => render::json(&records)?,
        Format::Csv => render::tensor_csv(&records)?,
        Format::Text => render::tensor_text(&records),
    };
    Ok((text, 0))
}
