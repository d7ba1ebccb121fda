use std::collections::BTreeMap;

use serde::Serialize;

use super::{Grads, ParamStore, Rng, RngStream};
use crate::Result;

#[derive(Clone, Debug)]
pub struct GradCheckOptions {
    pub eps: f64,
    pub tolerance: f64,
    /// Check at most this many randomly chosen coordinates per parameter;
    /// `None` checks every trainable coordinate.
    pub max_coords_per_param: Option<usize>,
    pub seed: u64,
}

impl Default for GradCheckOptions {
    fn default() -> Self {
        GradCheckOptions {
            eps: 1e-4,
            tolerance: 1e-3,
            max_coords_per_param: None,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoordReport {
    pub param: String,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct GradCheckReport {
    pub checked: usize,
    pub max_rel_error: f64,
    pub worst: Option<CoordReport>,
    /// Coordinates whose relative error exceeds the tolerance.
    pub failures: Vec<CoordReport>,
    /// Largest relative error per parameter.
    pub per_param: BTreeMap<String, f64>,
    pub tolerance: f64,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(1e-8)
}

/// Compares `analytic` against central differences of `loss`.
///
/// The parameter store is cloned once and each coordinate is perturbed in
/// place and restored. Masked coordinates are never perturbed.
pub fn grad_check<F>(
    mut loss: F,
    params: &ParamStore,
    analytic: &Grads,
    opts: &GradCheckOptions,
) -> Result<GradCheckReport>
where
    F: FnMut(&ParamStore) -> f64,
{
    let mut work = params.clone();
    let mut rng = Rng::stream(opts.seed, RngStream::GradCheck);
    let mut report = GradCheckReport {
        tolerance: opts.tolerance,
        ..Default::default()
    };
    let names: Vec<String> = params.names().map(str::to_string).collect();

    for name in names {
        let param = params.param(&name)?;
        let grad = analytic.get(&name)?;
        let mut coords: Vec<usize> = (0..param.value.len())
            .filter(|&i| param.is_trainable(i))
            .collect();
        if let Some(limit) = opts.max_coords_per_param {
            if coords.len() > limit {
                rng.shuffle(&mut coords);
                coords.truncate(limit);
                coords.sort_unstable();
            }
        }
        let mut worst_here: f64 = 0.0;
        for i in coords {
            let original = work.get(&name)?.data()[i];
            work.get_mut(&name)?.data_mut()[i] = original + opts.eps;
            let plus = loss(&work);
            work.get_mut(&name)?.data_mut()[i] = original - opts.eps;
            let minus = loss(&work);
            work.get_mut(&name)?.data_mut()[i] = original;

            let numeric = (plus - minus) / (2.0 * opts.eps);
            let a = grad.data()[i];
            let rel = relative_error(a, numeric);
            report.checked += 1;
            worst_here = worst_here.max(rel);
            let coord = CoordReport {
                param: name.clone(),
                index: i,
                analytic: a,
                numeric,
                rel_error: rel,
            };
            if rel > report.max_rel_error || report.worst.is_none() {
                report.max_rel_error = report.max_rel_error.max(rel);
                report.worst = Some(coord.clone());
            }
            if rel > opts.tolerance || !rel.is_finite() {
                report.failures.push(coord);
            }
        }
        report.per_param.insert(name, worst_here);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ndcore::Tensor;

    fn single(x: f64) -> ParamStore {
        let mut p = ParamStore::new();
        p.insert("theta", Tensor::vector(vec![x]).unwrap()).unwrap();
        p
    }

    #[test]
    fn quadratic() {
        let p = single(3.0);
        let mut g = Grads::zeros_like(&p);
        g.get_mut("theta").unwrap().data_mut()[0] = 6.0;
        let f = |s: &ParamStore| s.get("theta").unwrap().data()[0].powi(2);
        let report = grad_check(f, &p, &g, &GradCheckOptions::default()).unwrap();
        assert!(report.passed());
        assert!(report.max_rel_error < 1e-8, "{}", report.max_rel_error);
    }

    #[test]
    fn constant_loss_has_zero_gradient() {
        let p = single(-2.0);
        let g = Grads::zeros_like(&p);
        let report =
            grad_check(|_: &ParamStore| 4.2, &p, &g, &GradCheckOptions::default()).unwrap();
        assert!(report.passed());
        let worst = report.worst.unwrap();
        assert!(worst.numeric.abs() < 1e-8);
    }

    #[test]
    fn wrong_gradient_is_flagged() {
        let p = single(3.0);
        let mut g = Grads::zeros_like(&p);
        g.get_mut("theta").unwrap().data_mut()[0] = 5.0;
        let f = |s: &ParamStore| s.get("theta").unwrap().data()[0].powi(2);
        let report = grad_check(f, &p, &g, &GradCheckOptions::default()).unwrap();
        assert!(!report.passed());
        assert_eq!(report.failures.len(), 1);
    }

    #[test]
    fn masked_coordinates_skipped() {
        let mut p = ParamStore::new();
        p.insert("emb", Tensor::zeros(&[2, 2])).unwrap();
        p.freeze_row("emb", 0).unwrap();
        let g = Grads::zeros_like(&p);
        let report =
            grad_check(|_: &ParamStore| 0.0, &p, &g, &GradCheckOptions::default()).unwrap();
        assert_eq!(report.checked, 2);
    }
}
