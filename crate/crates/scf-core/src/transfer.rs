//! Discretized transfer operator of the SCF map.
//!
//! `L f(x) = Σ |h'_{(a,eps)_s}(x)| f(h_{(a,eps)_s}(x))` over the digit
//! alphabet, truncated at partial quotient `a <= K` with the certified
//! tail bound `sup|f| · Σ_{a>K} (2/(2a)^2 + 2/a^2) <= 2.5 sup|f| / K`
//! coming from the branch-derivative estimates. Functions live on a grid
//! with piecewise-linear interpolation; the normalized operator
//! `L̃ g = L(f_mu g)/f_mu` fixes constants and drives the
//! correlation-decay check.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, ScfError};
use crate::natext::density_mu;
use crate::{C0, SQRT3};

/// Node placement for [`DensityGrid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GridSpec {
    /// Equally spaced nodes on `[0, 1]`.
    Uniform { nodes: usize },
    /// Cosine-clustered nodes, denser near 0 and 1 where the invariant
    /// density varies fastest.
    Chebyshev { nodes: usize },
}

impl GridSpec {
    pub fn nodes(self) -> usize {
        match self {
            GridSpec::Uniform { nodes } | GridSpec::Chebyshev { nodes } => nodes,
        }
    }

    fn node_positions(self) -> Vec<f64> {
        let g = self.nodes();
        assert!(g >= 2, "grid needs at least two nodes");
        match self {
            GridSpec::Uniform { .. } => {
                (0..g).map(|i| i as f64 / (g - 1) as f64).collect()
            }
            GridSpec::Chebyshev { .. } => (0..g)
                .map(|i| 0.5 * (1.0 - (std::f64::consts::PI * i as f64 / (g - 1) as f64).cos()))
                .collect(),
        }
    }
}

/// A sampled function on `[0, 1]` with piecewise-linear evaluation.
#[derive(Debug, Clone, Serialize)]
pub struct DensityGrid {
    spec: GridSpec,
    nodes: Vec<f64>,
    pub values: Vec<f64>,
}

impl DensityGrid {
    pub fn from_fn(spec: GridSpec, f: impl Fn(f64) -> f64) -> DensityGrid {
        let nodes = spec.node_positions();
        let values = nodes.iter().map(|&x| f(x)).collect();
        DensityGrid { spec, nodes, values }
    }

    pub fn constant(spec: GridSpec, c: f64) -> DensityGrid {
        DensityGrid::from_fn(spec, |_| c)
    }

    /// Indicator of a union of intervals, cell-averaged so that node
    /// values represent the local mass fraction.
    pub fn indicator(spec: GridSpec, intervals: &[(f64, f64)]) -> DensityGrid {
        let nodes = spec.node_positions();
        let g = nodes.len();
        let values = (0..g)
            .map(|i| {
                let lo = if i == 0 { 0.0 } else { 0.5 * (nodes[i - 1] + nodes[i]) };
                let hi = if i == g - 1 {
                    1.0
                } else {
                    0.5 * (nodes[i] + nodes[i + 1])
                };
                let cell = hi - lo;
                if cell <= 0.0 {
                    return 0.0;
                }
                let covered: f64 = intervals
                    .iter()
                    .map(|&(a, b)| (b.min(hi) - a.max(lo)).max(0.0))
                    .sum();
                covered / cell
            })
            .collect();
        DensityGrid { spec, nodes, values }
    }

    pub fn spec(&self) -> GridSpec {
        self.spec
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let g = self.nodes.len();
        let i = match self.spec {
            GridSpec::Uniform { .. } => {
                ((x * (g - 1) as f64) as usize).min(g - 2)
            }
            GridSpec::Chebyshev { .. } => {
                match self.nodes.binary_search_by(|n| n.total_cmp(&x)) {
                    Ok(i) => i.min(g - 2),
                    Err(i) => i.saturating_sub(1).min(g - 2),
                }
            }
        };
        let (x0, x1) = (self.nodes[i], self.nodes[i + 1]);
        let t = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }

    /// Trapezoid integral over `[0, 1]`.
    pub fn integral(&self) -> f64 {
        self.weighted_integral(|_| 1.0)
    }

    /// Trapezoid integral of `v(x) w(x)`.
    pub fn weighted_integral(&self, w: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.nodes.len() - 1 {
            let f0 = self.values[i] * w(self.nodes[i]);
            let f1 = self.values[i + 1] * w(self.nodes[i + 1]);
            acc += 0.5 * (f0 + f1) * (self.nodes[i + 1] - self.nodes[i]);
        }
        acc
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub fn sup_distance(&self, other: &DensityGrid) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn scale(&mut self, c: f64) {
        for v in &mut self.values {
            *v *= c;
        }
    }
}

/// Truncated branch sum of the transfer operator at one point.
fn transfer_sum_at(f: &DensityGrid, x: f64, cutoff: u64) -> f64 {
    let mut acc = 0.0;
    // ascending term size: large k first
    for k in (2..=cutoff).rev() {
        let k = k as f64;
        let d1 = x + 2.0 * k;
        let d2 = 2.0 * k - x;
        let d3 = (k + 1.0) * x + k;
        let d4 = k * x + (k + 1.0);
        acc += f.eval(1.0 / d1) / (d1 * d1);
        acc += f.eval(1.0 / d2) / (d2 * d2);
        acc += f.eval((k * x + (k - 1.0)) / d3) / (d3 * d3);
        acc += f.eval(((k - 1.0) * x + k) / d4) / (d4 * d4);
    }
    let d = x + 2.0;
    acc + f.eval(1.0 / d) / (d * d)
}

/// Apply the truncated transfer operator; returns the image grid and the
/// certified sup-norm bound on the discarded branch tail.
pub fn apply_l(f: &DensityGrid, cutoff: u64) -> Result<(DensityGrid, f64)> {
    if cutoff < 2 {
        return Err(ScfError::InvalidParameter(format!(
            "branch cutoff must be >= 2, got {cutoff}"
        )));
    }
    let values: Vec<f64> = f
        .nodes
        .par_iter()
        .map(|&x| transfer_sum_at(f, x, cutoff))
        .collect();
    let tail = 2.5 * f.sup_norm() / cutoff as f64;
    Ok((
        DensityGrid {
            spec: f.spec,
            nodes: f.nodes.clone(),
            values,
        },
        tail,
    ))
}

/// The normalized operator `L̃ g = L(f_mu g) / f_mu`; fixes constants.
pub fn apply_normalized(g: &DensityGrid, cutoff: u64) -> Result<(DensityGrid, f64)> {
    let weighted = DensityGrid {
        spec: g.spec,
        nodes: g.nodes.clone(),
        values: g
            .nodes
            .iter()
            .zip(&g.values)
            .map(|(&x, &v)| v * density_mu(x).expect("grid node in [0,1]"))
            .collect(),
    };
    let (image, tail) = apply_l(&weighted, cutoff)?;
    let f_mu_min = C0 / 2.0; // minimum of the invariant density, at x = 1
    let values = image
        .nodes
        .iter()
        .zip(&image.values)
        .map(|(&x, &v)| v / density_mu(x).expect("grid node in [0,1]"))
        .collect();
    Ok((
        DensityGrid {
            spec: g.spec,
            nodes: image.nodes.clone(),
            values,
        },
        tail / f_mu_min,
    ))
}

/// Leading eigenpair report of the discretized operator.
#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub leading_eigenvalue: f64,
    pub second_modulus_estimate: f64,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub tail_bound: f64,
    pub grid: usize,
    pub cutoff: u64,
    pub eigenfunction: Vec<f64>,
    pub eigenfunction_nodes: Vec<f64>,
}

/// Power iteration for the leading eigenpair, with a residual-ratio
/// estimate of the second eigenvalue modulus after deflating the constant
/// direction of the normalized operator.
pub fn leading_eigenpair(grid: usize, cutoff: u64, tol: f64) -> Result<SpectrumReport> {
    if tol <= 0.0 {
        return Err(ScfError::InvalidParameter("tolerance must be positive".into()));
    }
    let spec = GridSpec::Uniform { nodes: grid };
    let mut f = DensityGrid::constant(spec, 1.0);
    let mut residual_history = Vec::new();
    let mut eigenvalue = 0.0;
    let mut tail = 0.0;
    let max_iter = 400;
    let mut converged_at = None;
    for it in 0..max_iter {
        let (mut next, t) = apply_l(&f, cutoff)?;
        tail = t;
        let mass = next.integral();
        eigenvalue = mass;
        next.scale(1.0 / mass);
        let residual = next.sup_distance(&f);
        residual_history.push(residual);
        f = next;
        if residual < tol {
            converged_at = Some(it + 1);
            break;
        }
    }
    let Some(iterations) = converged_at else {
        return Err(ScfError::NoConvergence {
            residual: *residual_history.last().unwrap_or(&f64::NAN),
            iterations: max_iter,
        });
    };

    // second-modulus estimate: iterate the normalized operator on a
    // mean-zero profile and fit the decay ratio of its mu-norm
    let mut w = DensityGrid::from_fn(spec, |x| x - 0.5);
    let mu_mean = |g: &DensityGrid| g.weighted_integral(|x| density_mu(x).unwrap());
    let m = mu_mean(&w);
    for (i, v) in w.values.iter_mut().enumerate() {
        let _ = i;
        *v -= m;
    }
    let mut ratios = Vec::new();
    let mut prev_norm = w
        .values
        .iter()
        .zip(w.nodes.iter())
        .fold(0.0f64, |m, (v, _)| m.max(v.abs()));
    for _ in 0..24 {
        let (mut next, _) = apply_normalized(&w, cutoff)?;
        let m = mu_mean(&next);
        for v in &mut next.values {
            *v -= m;
        }
        let norm = next.values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if norm < 1e-13 || prev_norm < 1e-13 {
            break;
        }
        ratios.push(norm / prev_norm);
        prev_norm = norm;
        w = next;
    }
    let tail_ratios = if ratios.len() > 5 {
        &ratios[ratios.len() - 5..]
    } else {
        &ratios[..]
    };
    let theta_hat = if tail_ratios.is_empty() {
        0.0
    } else {
        let log_mean: f64 =
            tail_ratios.iter().map(|r| r.ln()).sum::<f64>() / tail_ratios.len() as f64;
        log_mean.exp()
    };

    Ok(SpectrumReport {
        leading_eigenvalue: eigenvalue,
        second_modulus_estimate: theta_hat,
        iterations,
        residual: *residual_history.last().unwrap(),
        residual_history,
        tail_bound: tail,
        grid,
        cutoff,
        eigenfunction_nodes: f.nodes.clone(),
        eigenfunction: f.values.clone(),
    })
}

/// `μ{x : a_1(x) > N} = C0 log(1 + 1/(N + (sqrt3 - 1)/2))`, the measure of
/// `S_N = [0, 1/(2N+1)] ∪ [N/(N+1), 1]`.
pub fn superlevel_measure(n: u64) -> Result<f64> {
    if n < 1 {
        return Err(ScfError::InvalidParameter("superlevel index must be >= 1".into()));
    }
    Ok(C0 * (1.0 / (n as f64 + 0.5 * (SQRT3 - 1.0))).ln_1p())
}

/// The superlevel set `S_N` as intervals.
pub fn superlevel_set(n: u64) -> [(f64, f64); 2] {
    let nf = n as f64;
    [(0.0, 1.0 / (2.0 * nf + 1.0)), (nf / (nf + 1.0), 1.0)]
}

/// Deviations `|μ(S_N ∩ T^{-n} U) - μ(S_N) μ(U)|` for `n = 0..=n_max`,
/// estimated by pushing the indicator of `S_N` through the normalized
/// operator and integrating against the indicator of `U` under `μ`.
pub fn correlation_decay(
    n_level: u64,
    u_set: &[(f64, f64)],
    n_max: usize,
    spec: GridSpec,
    cutoff: u64,
) -> Result<Vec<f64>> {
    let s_ind = DensityGrid::indicator(spec, &superlevel_set(n_level));
    let u_ind = DensityGrid::indicator(spec, u_set);
    let mu_weight = |x: f64| density_mu(x).unwrap();
    let mu_s = s_ind.weighted_integral(mu_weight);
    let mu_u = u_ind.weighted_integral(mu_weight);
    let mut w = s_ind;
    let mut deviations = Vec::with_capacity(n_max + 1);
    for _ in 0..=n_max {
        let joint = w.weighted_integral(|x| u_ind.eval(x) * density_mu(x).unwrap());
        deviations.push((joint - mu_s * mu_u).abs());
        let (mut next, _) = apply_normalized(&w, cutoff)?;
        // restore the invariant mass lost to branch truncation
        let mass = next.weighted_integral(mu_weight);
        if mass > 0.0 {
            next.scale(mu_s / mass);
        }
        w = next;
    }
    Ok(deviations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_simpson;

    const SPEC: GridSpec = GridSpec::Uniform { nodes: 512 };

    #[test]
    fn zero_maps_to_zero_and_positivity() {
        let z = DensityGrid::constant(SPEC, 0.0);
        let (img, _) = apply_l(&z, 100).unwrap();
        assert!(img.values.iter().all(|&v| v == 0.0));

        let f = DensityGrid::from_fn(SPEC, |x| 0.3 + x * (1.0 - x));
        let (img, _) = apply_l(&f, 200).unwrap();
        assert!(img.values.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn cutoff_validation() {
        let f = DensityGrid::constant(SPEC, 1.0);
        assert!(apply_l(&f, 1).is_err());
    }

    #[test]
    fn invariant_density_is_fixed() {
        let spec = GridSpec::Uniform { nodes: 2048 };
        let f = DensityGrid::from_fn(spec, |x| density_mu(x).unwrap());
        let (img, tail) = apply_l(&f, 10_000).unwrap();
        let err = img.sup_distance(&f);
        assert!(err < 1e-3, "sup error {err}");
        assert!(err < tail + 1e-5, "error {err} not explained by tail {tail}");
    }

    #[test]
    fn mass_preserved_within_tail() {
        let mut lcg = 4242u64;
        let mut rand01 = move || {
            lcg = lcg.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (lcg >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..20 {
            let (a, b, c) = (rand01(), rand01(), rand01());
            let f = DensityGrid::from_fn(SPEC, |x| 0.1 + a + b * x + c * x * x);
            let (img, tail) = apply_l(&f, 2000).unwrap();
            let before = f.integral();
            let after = img.integral();
            assert!(
                (before - after).abs() < tail + 1e-5,
                "mass drift {} vs tail {}",
                before - after,
                tail
            );
        }
    }

    #[test]
    fn normalized_fixes_constants() {
        let spec = GridSpec::Uniform { nodes: 2048 };
        let one = DensityGrid::constant(spec, 1.0);
        let (img, _) = apply_normalized(&one, 10_000).unwrap();
        let err = img.sup_distance(&one);
        assert!(err < 1e-3, "L̃1 deviates from 1 by {err}");

        let seven = DensityGrid::constant(spec, 7.0);
        let (img7, _) = apply_normalized(&seven, 10_000).unwrap();
        let err7 = img7.sup_distance(&seven);
        assert!(err7 < 7e-3);
    }

    #[test]
    fn normalized_operator_is_mu_adjoint() {
        // ∫ (L̃ g) f_mu = ∫ g f_mu
        let spec = GridSpec::Uniform { nodes: 1024 };
        let g = DensityGrid::from_fn(spec, |x| (3.1 * x).sin() + 1.2);
        let cutoff = 5000u64;
        let (img, _) = apply_normalized(&g, cutoff).unwrap();
        let w = |x: f64| density_mu(x).unwrap();
        let before = g.weighted_integral(w);
        let after = img.weighted_integral(w);
        // the deficit is at most the mu-mass of the discarded cylinders
        let bound = g.sup_norm() * superlevel_measure(cutoff).unwrap() + 1e-5;
        assert!((before - after).abs() < bound, "{before} vs {after}");
    }

    #[test]
    fn superlevel_closed_form() {
        let v = superlevel_measure(1).unwrap();
        assert!((v - 0.834204565).abs() < 1e-8, "mu(S_1) = {v}");
        assert!(superlevel_measure(0).is_err());

        for n in [1u64, 2, 7, 40, 100] {
            let closed = superlevel_measure(n).unwrap();
            let quad: f64 = superlevel_set(n)
                .iter()
                .map(|&(a, b)| adaptive_simpson(|x| density_mu(x).unwrap(), a, b, 1e-13))
                .sum();
            assert!((closed - quad).abs() < 1e-10, "N={n}: {closed} vs {quad}");
        }

        // N·mu(S_N) -> C0
        let big = superlevel_measure(2_000_000).unwrap();
        assert!((2_000_000.0 * big - C0).abs() < 1e-5);
    }

    #[test]
    fn eigenpair_small_grid() {
        let report = leading_eigenpair(512, 2000, 1e-9).unwrap();
        assert!((report.leading_eigenvalue - 1.0).abs() < 3e-3);
        assert!(report.second_modulus_estimate < 1.0);
        assert!(report.second_modulus_estimate > 0.0);
        // eigenfunction close to the invariant density after L1 norm
        let grid = DensityGrid {
            spec: GridSpec::Uniform { nodes: 512 },
            nodes: report.eigenfunction_nodes.clone(),
            values: report.eigenfunction.clone(),
        };
        let target = DensityGrid::from_fn(GridSpec::Uniform { nodes: 512 }, |x| {
            density_mu(x).unwrap()
        });
        assert!(grid.sup_distance(&target) < 5e-3);
    }

    #[test]
    fn chebyshev_grid_interpolation() {
        let spec = GridSpec::Chebyshev { nodes: 257 };
        let f = DensityGrid::from_fn(spec, |x| x * x);
        for &x in &[0.0, 0.1, 0.345, 0.77, 1.0] {
            assert!((f.eval(x) - x * x).abs() < 1e-4);
        }
        let nodes = spec.node_positions();
        assert!(nodes[1] - nodes[0] < 1e-4, "clustered near 0");
    }

    #[test]
    fn correlation_decay_basics() {
        let spec = GridSpec::Uniform { nodes: 1024 };
        // U = full space: deviation identically ~0
        let devs = correlation_decay(2, &[(0.0, 1.0)], 4, spec, 2000).unwrap();
        assert!(devs.iter().all(|&d| d < 1e-5), "{devs:?}");

        // U = S_N at n = 0: mu(S)(1 - mu(S)) up to indicator smearing
        let devs = correlation_decay(2, &superlevel_set(2), 4, spec, 2000).unwrap();
        let mu_s = superlevel_measure(2).unwrap();
        assert!((devs[0] - mu_s * (1.0 - mu_s)).abs() < 3e-3);

        // qualitative geometric decay
        let devs = correlation_decay(2, &[(0.0, 0.5)], 9, spec, 2000).unwrap();
        assert!(devs[3] < devs[0]);
        let late = devs[devs.len() - 1] / devs[devs.len() - 3];
        assert!(late < 1.0, "tail ratio {late}");
    }
}
