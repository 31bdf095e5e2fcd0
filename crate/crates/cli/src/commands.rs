use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use spectre_core::cjson::C;
use spectre_core::figures::{map_graphs, spectrum_vs_lambda};
use spectre_core::fourier::{assemble, duality_check, validate_structure};
use spectre_core::interval::{
    branch_matching, dual_functional_check, interval_spectrum, intertwine_check, Polynomial,
};
use spectre_core::inverse::{verify_all, SUITE_GRID};
use spectre_core::linalg::bottleneck_pairing;
use spectre_core::spectral::{
    eigenvalues_dense, eigenvalues_triangular, match_spectra, modulus_then_phase, predicted_spectrum,
};
use spectre_core::{
    AssemblyMethod, IntervalMapContext, IntervalSpectrumReport, MayerSummary, SpectrumReport, TrigPoly,
};

use crate::config::{Format, RunConfig};
use crate::error::CliError;
use crate::output::{complex, emit, num, opt_complex, opt_num};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Figure {
    #[value(name = "map_graphs")]
    MapGraphs,
    #[value(name = "spectrum_vs_lambda")]
    SpectrumVsLambda,
}

fn write(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    emit(cfg.out.as_deref(), text)?;
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

const SPECTRUM_HEADER: &str = "re,im,modulus,matched_prediction_re,matched_prediction_im,error\n";

fn spectrum_line(out: &mut String, value: Complex64, matched: Option<Complex64>) {
    let error = matched.map(|m| (value - m).norm());
    let _ = writeln!(
        out,
        "{},{},{},{}",
        complex(value),
        num(value.norm()),
        opt_complex(matched),
        opt_num(error)
    );
}

#[derive(Serialize)]
struct MatrixFile {
    lambda: C,
    n: usize,
    method: &'static str,
    indices: Vec<i64>,
    #[serde(with = "spectre_core::cjson::vec")]
    diagonal: Vec<Complex64>,
    entries: Vec<Vec<C>>,
}

pub fn matrix(cfg: &RunConfig) -> Result<(), CliError> {
    let param = cfg.param()?;
    let m = assemble(&param, cfg.n, AssemblyMethod::Quadrature, &cfg.quad)?;
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::from("n,l,re,im\n");
            for n in m.indices() {
                for l in m.indices() {
                    let _ = writeln!(out, "{n},{l},{}", complex(m.get(n, l)));
                }
            }
            out
        }
        Format::Json => json(&MatrixFile {
            lambda: C(param.lambda()),
            n: cfg.n,
            method: AssemblyMethod::Quadrature.name(),
            indices: m.indices().collect(),
            diagonal: m.diagonal(),
            entries: m
                .indices()
                .map(|n| m.indices().map(|l| C(m.get(n, l))).collect())
                .collect(),
        })?,
    };
    write(cfg, &text)
}

#[derive(Serialize)]
struct DenseCheck {
    #[serde(with = "spectre_core::cjson::vec")]
    eigenvalues: Vec<Complex64>,
    /// Bottleneck distance to the triangular read-off.
    distance: f64,
    pass: bool,
}

#[derive(Serialize)]
struct SpectrumFile {
    lambda: C,
    n: usize,
    tol: f64,
    report: SpectrumReport,
    dense: DenseCheck,
    pass: bool,
}

pub fn spectrum(cfg: &RunConfig) -> Result<(), CliError> {
    let param = cfg.param()?;
    let m = assemble(&param, cfg.n, AssemblyMethod::Quadrature, &cfg.quad)?;
    let triangular = eigenvalues_triangular(&m)?;
    let mut dense = eigenvalues_dense(&m, f64::INFINITY)?;
    dense.sort_by(modulus_then_phase);
    let distance = bottleneck_pairing(&dense, &triangular).0;
    let prediction = predicted_spectrum(&param, cfg.n as u32)?;
    let report = match_spectra(&triangular, &prediction, cfg.tol);
    let dense = DenseCheck {
        eigenvalues: dense,
        distance,
        pass: distance <= cfg.tol,
    };
    let pass = report.pass && dense.pass;
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::from(SPECTRUM_HEADER);
            for row in report.rows() {
                spectrum_line(&mut out, row.value, row.matched);
            }
            out
        }
        Format::Json => json(&SpectrumFile {
            lambda: C(param.lambda()),
            n: cfg.n,
            tol: cfg.tol,
            pass,
            report: report.clone(),
            dense,
        })?,
    };
    write(cfg, &text)?;
    if !report.pass {
        return Err(CliError::Verification(format!(
            "spectrum: max pairing error {:e} exceeds {:e} or values left unmatched",
            report.max_pair_error, cfg.tol
        )));
    }
    if !pass {
        return Err(CliError::Verification(format!(
            "spectrum: dense eigenvalues differ from the triangular read-off by {distance:e}"
        )));
    }
    Ok(())
}

fn mayer_line(m: &MayerSummary) -> String {
    format!(
        "non-real eigenvalues below modulus 0.4: {} conjugate pairs ({} matching powers of λ), smallest modulus {}, fixed-point multipliers real: {}",
        m.nonreal_pairs,
        m.matched_nonreal_pairs,
        m.smallest_nonreal_modulus.map(num).unwrap_or_else(|| "none".into()),
        m.counterexample
    )
}

pub fn interval(cfg: &RunConfig) -> Result<(), CliError> {
    let param = cfg.param()?;
    let ctx = IntervalMapContext::new(&param);
    let report: IntervalSpectrumReport = interval_spectrum(&ctx, cfg.m, cfg.tol)?;
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::from(SPECTRUM_HEADER);
            let mut used = vec![false; report.pairs.len()];
            for &value in &report.computed {
                let matched = report
                    .pairs
                    .iter()
                    .enumerate()
                    .find(|(i, p)| !used[*i] && p.computed == value)
                    .map(|(i, p)| {
                        used[i] = true;
                        p.predicted
                    });
                spectrum_line(&mut out, value, matched);
            }
            if let Some(m) = &report.mayer {
                let _ = writeln!(out, "# {}", mayer_line(m));
            }
            out
        }
        Format::Json => json(&report)?,
    };
    write(cfg, &text)?;
    if let Some(m) = &report.mayer {
        eprintln!("{}", mayer_line(m));
    }
    if !report.pass {
        return Err(CliError::Verification(format!(
            "interval: top-8 pairing error {:e} exceeds {:e}",
            report.max_error, cfg.tol
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    skipped: bool,
    value: f64,
    tol: f64,
}

#[derive(Serialize)]
struct VerifyBundle {
    lambda: C,
    checks: Vec<Check>,
    pass: bool,
}

fn check(name: &str, value: f64, tol: f64) -> Check {
    Check {
        name: name.into(),
        pass: value < tol,
        skipped: false,
        value,
        tol,
    }
}

fn trig(min_index: i64, coeffs: &[(f64, f64)]) -> TrigPoly {
    TrigPoly::new(min_index, coeffs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let param = cfg.param()?;
    let ctx = IntervalMapContext::new(&param);
    let mut checks = Vec::new();

    let m = assemble(&param, cfg.n, AssemblyMethod::Quadrature, &cfg.quad)?;
    let s = validate_structure(&m, 1e-12);
    checks.push(check("structure", s.max_violation(), 1e-12));

    let f = trig(-1, &[(1.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    let g = TrigPoly::monomial(2);
    let h = trig(-3, &[(0.5, -0.25), (0.0, 1.0), (-1.0, 0.0), (0.3, 0.2), (0.0, 0.0), (0.1, 0.0), (-0.2, 0.7)]);
    let one = TrigPoly::constant(Complex64::new(1.0, 0.0));
    let mut duality: f64 = 0.0;
    for (a, b) in [(&one, &one), (&f, &g), (&h, &f), (&g, &h)] {
        duality = duality.max(duality_check(&param, a, b, &cfg.quad)?);
    }
    checks.push(check("duality", duality, 1e-10));

    let matching = branch_matching(&ctx);
    let worst = matching
        .conditions
        .iter()
        .map(|c| c.residual / c.tol)
        .fold(0.0, f64::max);
    checks.push(Check {
        name: "branch matching (residual / tolerance)".into(),
        pass: matching.pass,
        skipped: false,
        value: worst,
        tol: 1.0,
    });

    let polys = [
        Polynomial::new(vec![0.0, 0.0, 1.0]),
        Polynomial::new(vec![0.0, 1.0, 0.0, 1.0]),
        Polynomial::new(vec![1.0, -0.5, 0.25, 0.0, 2.0]),
    ];
    for order in 0..=1 {
        let mut residual: f64 = 0.0;
        let mut tol = 0.0;
        let mut skipped = true;
        let mut pass = true;
        for p in &polys {
            let r = dual_functional_check(&ctx, p, order)?;
            tol = r.tol;
            if !r.skipped {
                skipped = false;
                residual = residual.max(r.residual);
            }
            pass &= r.pass;
        }
        checks.push(Check {
            name: format!("dual functional order {order}"),
            pass,
            skipped,
            value: residual,
            tol,
        });
    }

    let mut intertwine: f64 = 0.0;
    for p in [&one, &f, &g, &h] {
        intertwine = intertwine.max(intertwine_check(&ctx, p)?);
    }
    checks.push(check("intertwining", intertwine, 1e-9));

    if param.is_real() {
        let suite = verify_all(param.lambda().re, SUITE_GRID)?;
        for r in suite.reports {
            checks.push(Check {
                name: format!("inverse problem {:?}", r.equation),
                pass: r.pass,
                skipped: false,
                value: r.max_residual,
                tol: r.tol,
            });
        }
    } else {
        checks.push(Check {
            name: "inverse problem (real λ only)".into(),
            pass: true,
            skipped: true,
            value: 0.0,
            tol: 0.0,
        });
    }

    let pass = checks.iter().all(|c| c.pass);
    let first_failure = checks.iter().find(|c| !c.pass).map(|c| c.name.clone());
    let text = match cfg.format {
        Format::Json => json(&VerifyBundle {
            lambda: C(param.lambda()),
            pass,
            checks,
        })?,
        Format::Csv => {
            let mut out = String::from("check,pass,skipped,value,tol\n");
            for c in &checks {
                let _ = writeln!(out, "{},{},{},{},{}", c.name, c.pass, c.skipped, num(c.value), num(c.tol));
            }
            out
        }
    };
    write(cfg, &text)?;
    match first_failure {
        Some(name) => Err(CliError::Verification(format!("check '{name}' failed"))),
        None => Ok(()),
    }
}

pub fn figure_data(cfg: &RunConfig, figure: Figure) -> Result<(), CliError> {
    let text = match (figure, cfg.format) {
        (Figure::MapGraphs, Format::Csv) => {
            let mut out = String::from("lambda_re,lambda_im,x,t\n");
            for g in map_graphs()? {
                for (x, t) in g.x.iter().zip(&g.t) {
                    let _ = writeln!(out, "{},{},{}", complex(g.param.lambda()), num(*x), num(*t));
                }
            }
            out
        }
        (Figure::MapGraphs, Format::Json) => json(&map_graphs()?)?,
        (Figure::SpectrumVsLambda, Format::Csv) => {
            let rows = spectrum_vs_lambda(cfg.m)?;
            let mut out = String::from("lambda,nodes");
            let powers = rows.first().map(|r| r.circle.len()).unwrap_or(0);
            for prefix in ["circle", "endpoint", "circle_computed", "endpoint_computed"] {
                for n in 0..powers {
                    let _ = write!(out, ",{prefix}_{n}");
                }
            }
            out.push('\n');
            for r in &rows {
                let _ = write!(out, "{},{}", num(r.lambda), r.nodes);
                for col in [&r.circle, &r.endpoint, &r.circle_computed, &r.endpoint_computed] {
                    for v in col {
                        let _ = write!(out, ",{}", num(*v));
                    }
                }
                out.push('\n');
            }
            out
        }
        (Figure::SpectrumVsLambda, Format::Json) => json(&spectrum_vs_lambda(cfg.m)?)?,
    };
    write(cfg, &text)
}
