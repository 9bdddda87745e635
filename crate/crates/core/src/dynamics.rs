//! Transition probabilities, isolation, and sweeps over time and flux.
//!
//! Transition subscripts follow the coupling coefficients: `t_ab` is the
//! probability of the j_ab-mediated transition, read off the evolution
//! operator as |<a|U(t)|b>|^2, and `t_ba` is |<b|U(t)|a>|^2. With this
//! labelling the forward/blocked directions line up with which of j_ab,
//! j_ba interference kills, and isolation t_ab / t_ba peaks at flux -pi/2.

use std::f64::consts::PI;

use serde::Serialize;

use crate::cyclic::{adiabatic_eliminate, build_effective_hamiltonian, build_full_hamiltonian, CyclicAtomParams};
use crate::error::{Error, Result};
use crate::exec;
use crate::operator::{expm, Operator};
use crate::text::float17;

/// Threshold below which the reverse probability is treated as zero and
/// isolation saturates to +infinity (printed as "inf" in CSV).
const ISOLATION_FLOOR: f64 = 1e-300;

/// Which Hamiltonian drives the evolution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Three-level evolution with the explicit reservoir level.
    Full,
    /// Reduced two-level evolution after adiabatic elimination.
    Effective,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Model::Full),
            "effective" => Ok(Model::Effective),
            other => Err(Error::invalid(format!(
                "unknown model '{other}' (expected 'full' or 'effective')"
            ))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Model::Full => "full",
            Model::Effective => "effective",
        })
    }
}

/// Both directed transition probabilities and their ratio at one time.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DynamicsPoint {
    pub t: f64,
    pub t_ab: f64,
    pub t_ba: f64,
    pub isolation: f64,
}

/// One sweep: strictly increasing axis, one point per axis value.
#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub axis_name: String,
    pub axis_values: Vec<f64>,
    pub points: Vec<DynamicsPoint>,
    pub model: Model,
}

fn hamiltonian(p: &CyclicAtomParams, model: Model) -> Result<Operator> {
    match model {
        Model::Full => build_full_hamiltonian(p),
        Model::Effective => adiabatic_eliminate(p).map(|e| build_effective_hamiltonian(&e)),
    }
}

fn point_from(h: &Operator, t: f64) -> Result<DynamicsPoint> {
    let u = expm(h, t)?;
    let t_ab = u.get(0, 1).norm_sqr();
    let t_ba = u.get(1, 0).norm_sqr();
    let isolation = if t_ba > ISOLATION_FLOOR { t_ab / t_ba } else { f64::INFINITY };
    Ok(DynamicsPoint { t, t_ab, t_ba, isolation })
}

/// Directed transition probabilities at time `t` under the selected model.
pub fn transition_probabilities(
    p: &CyclicAtomParams,
    t: f64,
    model: Model,
) -> Result<DynamicsPoint> {
    let h = hamiltonian(p, model)?;
    point_from(&h, t)
}

/// Probabilities on the closed uniform grid t_k = k * t_max / (steps - 1).
pub fn sweep_time(
    p: &CyclicAtomParams,
    t_max: f64,
    steps: usize,
    model: Model,
) -> Result<SweepResult> {
    if steps < 2 {
        return Err(Error::invalid(format!("steps = {steps} must be >= 2")));
    }
    if !(t_max > 0.0) || !t_max.is_finite() {
        return Err(Error::invalid(format!("t_max = {t_max} must be finite and > 0")));
    }
    let h = hamiltonian(p, model)?;
    let ts: Vec<f64> = (0..steps)
        .map(|k| k as f64 * t_max / (steps - 1) as f64)
        .collect();
    let points = collect_points(&ts, |&t| point_from(&h, t))?;
    Ok(SweepResult { axis_name: "t".into(), axis_values: ts, points, model })
}

/// Probabilities at fixed `t` on a closed flux grid spanning [-pi, pi].
///
/// The grid is symmetrized so that its second half is the exact negation of
/// the first; flux-reversal identities then hold to full precision on grid
/// pairs.
pub fn sweep_flux(
    p: &CyclicAtomParams,
    t: f64,
    phi_count: usize,
    model: Model,
) -> Result<SweepResult> {
    if phi_count < 3 {
        return Err(Error::invalid(format!("phi_count = {phi_count} must be >= 3")));
    }
    if !t.is_finite() || t < 0.0 {
        return Err(Error::invalid(format!("t = {t} must be finite and >= 0")));
    }
    let n = phi_count;
    let mut phis = vec![0.0f64; n];
    for j in 0..n {
        phis[j] = -PI + 2.0 * PI * j as f64 / (n - 1) as f64;
    }
    for j in 0..n / 2 {
        phis[n - 1 - j] = -phis[j];
    }
    if n % 2 == 1 {
        phis[n / 2] = 0.0;
    }
    let base = *p;
    let points = collect_points(&phis, |&phi| {
        let h = hamiltonian(&base.with_flux(phi), model)?;
        point_from(&h, t)
    })?;
    Ok(SweepResult { axis_name: "phi".into(), axis_values: phis, points, model })
}

fn collect_points<A, F>(axis: &[A], f: F) -> Result<Vec<DynamicsPoint>>
where
    A: Sync,
    F: Fn(&A) -> Result<DynamicsPoint> + Sync + Send,
{
    exec::map_ordered(axis, f).into_iter().collect()
}

impl SweepResult {
    /// CSV rendering: header `axis,t_ab,t_ba,isolation`, one row per grid
    /// point, 17 significant digits, infinite isolation printed as "inf".
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis,t_ab,t_ba,isolation\n");
        for (axis, point) in self.axis_values.iter().zip(&self.points) {
            out.push_str(&float17(*axis));
            out.push(',');
            out.push_str(&float17(point.t_ab));
            out.push(',');
            out.push_str(&float17(point.t_ba));
            out.push(',');
            out.push_str(&float17(point.isolation));
            out.push('\n');
        }
        out
    }
}
