//! Browser bindings for the SCF dynamics crate.
//!
//! Three interactive operations back the static demo page in `www/`:
//! digit expansion with convergents, transfer-operator iteration toward
//! the invariant density, and the excursion geometry of a cross-section
//! geodesic in the upper half plane.

use wasm_bindgen::prelude::wasm_bindgen;

use scf_core::convergents::ConvergentState;
use scf_core::geodesic::{point_to_geodesic, ExcursionIter};
use scf_core::natext::{density_mu, NatExtPoint};
use scf_core::scf;
use scf_core::transfer::{apply_l, DensityGrid, GridSpec};
use scf_core::SQRT3;

/// Digit expansion of `x` with the exact convergents, as a JSON object
/// `{digits: [{a, eps, parity, p, q, approx}], terminated}`.
#[wasm_bindgen]
pub fn expand_report(x: f64, depth: u32) -> String {
    let expansion = match scf::expand(&x, depth as usize) {
        Ok(e) => e,
        Err(e) => return format!("{{\"error\":\"{e}\"}}"),
    };
    let mut state = ConvergentState::new();
    let mut rows = Vec::new();
    for &d in &expansion.digits {
        state.accumulate(d);
        let (p, q) = state.convergent();
        let approx = state.matrix().apply(&0.0f64);
        rows.push(format!(
            "{{\"a\":{},\"eps\":{},\"parity\":\"{}\",\"p\":\"{}\",\"q\":\"{}\",\"approx\":{:.15}}}",
            d.a(),
            d.eps(),
            d.parity(),
            p,
            q,
            approx
        ));
    }
    format!(
        "{{\"digits\":[{}],\"terminated\":{}}}",
        rows.join(","),
        expansion.terminated
    )
}

/// The invariant density sampled on a uniform grid.
#[wasm_bindgen]
pub fn invariant_density(points: u32) -> Vec<f64> {
    let g = points.max(2) as usize;
    (0..g)
        .map(|i| density_mu(i as f64 / (g - 1) as f64).unwrap())
        .collect()
}

/// Iterates of the transfer operator from the flat density: `steps + 1`
/// concatenated curves of `grid` values each (the first is the constant 1).
#[wasm_bindgen]
pub fn transfer_iterates(grid: u32, cutoff: u32, steps: u32) -> Vec<f64> {
    let spec = GridSpec::Uniform {
        nodes: grid.clamp(8, 4096) as usize,
    };
    let mut f = DensityGrid::constant(spec, 1.0);
    let mut out = f.values.clone();
    for _ in 0..steps {
        let (mut next, _) = apply_l(&f, cutoff.clamp(2, 100_000) as u64).expect("valid cutoff");
        let mass = next.integral();
        next.scale(1.0 / mass);
        out.extend_from_slice(&next.values);
        f = next;
    }
    out
}

/// Excursion geometry of the orbit starting at `(x, y, +1)`: a JSON array
/// of `{n, a, eps, parity, r, t, h, forward, backward}` where
/// `(forward, backward)` are the geodesic endpoints of the n-th excursion
/// in the upper half plane.
#[wasm_bindgen]
pub fn excursion_geometry(x: f64, y: f64, count: u32) -> String {
    let p = match NatExtPoint::new(x, y, 1) {
        Ok(p) => p,
        Err(e) => return format!("{{\"error\":\"{e}\"}}"),
    };
    let mut rows = Vec::new();
    let mut iter = ExcursionIter::new(p);
    for _ in 0..count {
        let state = iter.state();
        match iter.next() {
            Some(Ok(rec)) => {
                let g = point_to_geodesic(&state);
                rows.push(format!(
                    "{{\"n\":{},\"a\":{},\"eps\":{},\"parity\":\"{}\",\"r\":{:.10},\"t\":{:.10},\"h\":{:.10},\"forward\":{:.12},\"backward\":{:.12}}}",
                    rec.n,
                    rec.digit.a(),
                    rec.digit.eps(),
                    rec.digit.parity(),
                    rec.r,
                    rec.t,
                    rec.h,
                    g.forward,
                    g.backward
                ));
            }
            Some(Err(e)) => {
                rows.push(format!("{{\"stopped\":\"{e}\"}}"));
                break;
            }
            None => break,
        }
    }
    format!("[{}]", rows.join(","))
}

/// Domain constant for the page: `sqrt(3)`.
#[wasm_bindgen]
pub fn sqrt3() -> f64 {
    SQRT3
}
