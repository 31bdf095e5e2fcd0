use std::path::PathBuf;

use spectre_core::interval::MIN_NODES;
use spectre_core::{BlaschkeParam, QuadratureSpec};

use crate::error::CliError;

pub const MAX_N: usize = 64;
pub const MAX_M: usize = 128;
pub const TOL_RANGE: (f64, f64) = (1e-14, 1e-3);
pub const QUAD_MAX_ENV: &str = "SPECTRE_QUAD_MAX";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub param: Option<BlaschkeParam>,
    pub n: usize,
    pub m: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub quad: QuadratureSpec,
}

impl RunConfig {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        lambda: Option<(f64, f64)>,
        lambda_polar: Option<(f64, f64)>,
        n: usize,
        m: usize,
        tol: f64,
        out: Option<PathBuf>,
        format: Format,
        quad_max: Option<String>,
    ) -> Result<Self, CliError> {
        let param = match (lambda, lambda_polar) {
            (Some(_), Some(_)) => {
                return Err(CliError::Validation("give either --lambda or --lambda-polar, not both".into()))
            }
            (Some((re, im)), None) => Some(BlaschkeParam::from_re_im(re, im)?),
            (None, Some((r, phase))) => Some(BlaschkeParam::from_polar(r, phase)?),
            (None, None) => None,
        };
        if !(1..=MAX_N).contains(&n) {
            return Err(CliError::Validation(format!("--n must be in 1..={MAX_N}, got {n}")));
        }
        if !(MIN_NODES..=MAX_M).contains(&m) {
            return Err(CliError::Validation(format!("--m must be in {MIN_NODES}..={MAX_M}, got {m}")));
        }
        if !(tol >= TOL_RANGE.0 && tol <= TOL_RANGE.1) {
            return Err(CliError::Validation(format!(
                "--tol must be in [{:e}, {:e}], got {tol:e}",
                TOL_RANGE.0, TOL_RANGE.1
            )));
        }
        let mut quad = QuadratureSpec::default();
        if let Some(raw) = quad_max {
            let cap: usize = raw
                .trim()
                .parse()
                .map_err(|_| CliError::Validation(format!("{QUAD_MAX_ENV} must be a point count, got {raw:?}")))?;
            quad = QuadratureSpec::new(quad.min_points.min(cap), quad.target_tol, cap)?;
        }
        Ok(Self {
            param,
            n,
            m,
            tol,
            out,
            format,
            quad,
        })
    }

    pub fn param(&self) -> Result<BlaschkeParam, CliError> {
        self.param
            .ok_or_else(|| CliError::Validation("this command needs --lambda RE IM or --lambda-polar MOD PHASE".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lambda: (f64, f64), n: usize, m: usize, tol: f64, quad: Option<&str>) -> Result<RunConfig, CliError> {
        RunConfig::new(Some(lambda), None, n, m, tol, None, Format::Csv, quad.map(String::from))
    }

    #[test]
    fn bounds_are_enforced() {
        assert!(cfg((0.4, 0.0), 12, 40, 1e-8, None).is_ok());
        assert!(cfg((0.4, 0.0), 64, 128, 1e-14, None).is_ok());
        for bad in [
            cfg((1.0, 0.0), 12, 40, 1e-8, None),
            cfg((0.8, 0.8), 12, 40, 1e-8, None),
            cfg((0.4, 0.0), 0, 40, 1e-8, None),
            cfg((0.4, 0.0), 65, 40, 1e-8, None),
            cfg((0.4, 0.0), 12, 129, 1e-8, None),
            cfg((0.4, 0.0), 12, 40, 1e-2, None),
            cfg((0.4, 0.0), 12, 40, 1e-15, None),
            cfg((0.4, 0.0), 12, 40, f64::NAN, None),
            cfg((0.4, 0.0), 12, 40, 1e-8, Some("lots")),
            cfg((0.4, 0.0), 12, 40, 1e-8, Some("16")),
        ] {
            assert_eq!(bad.unwrap_err().exit_code(), 2);
        }
    }

    #[test]
    fn modulus_message_names_the_bound() {
        let e = cfg((1.0, 0.0), 12, 40, 1e-8, None).unwrap_err();
        assert!(e.to_string().contains("|λ| must be < 1"), "{e}");
    }

    #[test]
    fn quadrature_cap_from_the_environment_value() {
        let c = cfg((0.4, 0.0), 12, 40, 1e-8, Some("128")).unwrap();
        assert_eq!(c.quad.max_points, 128);
        assert_eq!(c.quad.min_points, 128);
        let c = cfg((0.4, 0.0), 12, 40, 1e-8, Some("4096")).unwrap();
        assert_eq!((c.quad.min_points, c.quad.max_points), (256, 4096));
    }

    #[test]
    fn polar_form() {
        let c = RunConfig::new(None, Some((0.5, std::f64::consts::PI)), 4, 40, 1e-8, None, Format::Json, None).unwrap();
        let lam = c.param().unwrap().lambda();
        assert!((lam.re + 0.5).abs() < 1e-15 && lam.im.abs() < 1e-15);
        let both = RunConfig::new(Some((0.1, 0.0)), Some((0.1, 0.0)), 4, 40, 1e-8, None, Format::Json, None);
        assert_eq!(both.unwrap_err().exit_code(), 2);
        let none = RunConfig::new(None, None, 4, 40, 1e-8, None, Format::Json, None).unwrap();
        assert_eq!(none.param().unwrap_err().exit_code(), 2);
    }
}
