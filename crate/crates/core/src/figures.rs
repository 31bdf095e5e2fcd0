//! Plot-ready data: graphs of the interval maps and interval eigenvalue
//! moduli swept over real λ.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blaschke::BlaschkeParam;
use crate::error::Result;
use crate::interval::{collocation_matrix, IntervalMapContext, T_deriv_at_fixed_point, T_eval};

/// Points per map graph.
pub const GRAPH_POINTS: usize = 512;

/// The parameters shown in the map graphs.
pub fn graph_parameters() -> Vec<BlaschkeParam> {
    [
        (-0.7, 0.0),
        (0.4, 0.0),
        (-0.3, -(0.4_f64).sqrt()),
        (0.1, 0.15_f64.sqrt()),
    ]
    .into_iter()
    .map(|(re, im)| BlaschkeParam::from_re_im(re, im).expect("fixed parameters are valid"))
    .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapGraph {
    pub param: BlaschkeParam,
    pub x: Vec<f64>,
    pub t: Vec<f64>,
}

pub fn map_graphs() -> Result<Vec<MapGraph>> {
    graph_parameters()
        .into_iter()
        .map(|param| {
            let ctx = IntervalMapContext::new(&param);
            let x: Vec<f64> = (0..GRAPH_POINTS)
                .map(|j| -1.0 + 2.0 * j as f64 / (GRAPH_POINTS - 1) as f64)
                .collect();
            let t = x.iter().map(|&x| T_eval(&ctx, x)).collect::<Result<_>>()?;
            Ok(MapGraph { param, x, t })
        })
        .collect()
}

/// Number of λ values in the sweep.
pub const SWEEP_POINTS: usize = 199;
/// Powers `0..=SWEEP_POWERS` are reported.
pub const SWEEP_POWERS: usize = 4;
/// Node count floor for the sweep: near |λ| = 1 the branches steepen and 40
/// nodes no longer resolve the leading eigenvalues.
pub const SWEEP_MIN_NODES: usize = 64;

/// The sweep grid `−0.99, −0.98, …, 0.99`.
pub fn sweep_lambdas() -> Vec<f64> {
    (0..SWEEP_POINTS)
        .map(|i| (i as f64 - 99.0) / 100.0)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub nodes: usize,
    /// `|λⁿ|`, `n = 0..=SWEEP_POWERS`.
    pub circle: Vec<f64>,
    /// `|((λ+1)/2)ⁿ|`.
    pub endpoint: Vec<f64>,
    /// Modulus of the computed eigenvalue nearest to each analytic value.
    pub circle_computed: Vec<f64>,
    pub endpoint_computed: Vec<f64>,
}

impl SweepRow {
    pub fn max_deviation(&self) -> f64 {
        self.circle
            .iter()
            .zip(&self.circle_computed)
            .chain(self.endpoint.iter().zip(&self.endpoint_computed))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn nearest_modulus(eigenvalues: &[Complex64], target: f64) -> f64 {
    eigenvalues
        .iter()
        .min_by(|a, b| (*a - target).norm().total_cmp(&(*b - target).norm()))
        .map(|v| v.norm())
        .unwrap_or(f64::NAN)
}

pub fn sweep_row(lambda: f64, nodes: usize) -> Result<SweepRow> {
    let ctx = IntervalMapContext::new(&BlaschkeParam::real(lambda)?);
    let ev = collocation_matrix(&ctx, nodes)?.eigenvalues()?;
    let mu = 1.0 / T_deriv_at_fixed_point(&ctx);
    let circle_values: Vec<f64> = (0..=SWEEP_POWERS).map(|n| lambda.powi(n as i32)).collect();
    let endpoint_values: Vec<f64> = (0..=SWEEP_POWERS).map(|n| mu.powi(n as i32)).collect();
    Ok(SweepRow {
        lambda,
        nodes,
        circle: circle_values.iter().map(|v| v.abs()).collect(),
        endpoint: endpoint_values.iter().map(|v| v.abs()).collect(),
        circle_computed: circle_values.iter().map(|&v| nearest_modulus(&ev, v)).collect(),
        endpoint_computed: endpoint_values.iter().map(|&v| nearest_modulus(&ev, v)).collect(),
    })
}

/// The full sweep with `max(m, SWEEP_MIN_NODES)` nodes, rows in λ order.
pub fn spectrum_vs_lambda(m: usize) -> Result<Vec<SweepRow>> {
    let nodes = m.max(SWEEP_MIN_NODES);
    sweep_lambdas()
        .into_par_iter()
        .map(|lambda| sweep_row(lambda, nodes))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid() {
        let g = sweep_lambdas();
        assert_eq!(g.len(), 199);
        assert_eq!(g[0], -0.99);
        assert_eq!(g[99], 0.0);
        assert_eq!(g[198], 0.99);
    }

    #[test]
    fn doubling_row() {
        let r = sweep_row(0.0, 64).unwrap();
        let expect = [1.0, 0.5, 0.25, 0.125, 0.0625];
        for (a, b) in r.endpoint.iter().zip(expect) {
            assert_eq!(*a, b);
        }
        assert_eq!(r.circle, vec![1.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(r.max_deviation() < 1e-7, "{r:?}");
    }

    #[test]
    fn rows_reproduce_the_curves() {
        for lam in [-0.99, -0.9, -0.45, 0.01, 0.3, 0.9, 0.99] {
            let r = sweep_row(lam, 64).unwrap();
            assert!(r.max_deviation() < 1e-7, "λ={lam} {:e}", r.max_deviation());
        }
    }

    #[test]
    fn map_graphs_fix_the_left_endpoint() {
        let graphs = map_graphs().unwrap();
        assert_eq!(graphs.len(), 4);
        for g in &graphs {
            assert_eq!(g.x.len(), GRAPH_POINTS);
            assert!((g.t[0] + 1.0).abs() < 1e-12);
            assert!(g.t.iter().all(|t| (-1.0..=1.0).contains(t)));
            // two increasing laps: exactly one drop
            let drops = g.t.windows(2).filter(|w| w[1] < w[0]).count();
            assert_eq!(drops, 1);
        }
    }
}
