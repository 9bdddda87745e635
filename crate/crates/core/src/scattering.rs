//! Single-photon scattering between two semi-infinite coupled-resonator
//! waveguides joined by a two-excited-level atom with directional coupling.
//!
//! Each waveguide is a tight-binding chain with cosine dispersion
//! `E = delta_l - 2 xi_l cos k_l`; the shared atom converts photons between
//! the chains. Scattering amplitudes come from the closed-form solution of
//! the boundary equations with a plane-wave ansatz; flows are the
//! group-velocity-normalized probabilities, the conserved flux. The wave
//! number `k` is the primary independent variable; energies are computed on
//! demand.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::cyclic::EffectiveTwoLevel;
use crate::error::{Error, Result};
use crate::exec;
use crate::operator::C64;
use crate::text::float17;

const POLE_FLOOR: f64 = 1e-300;
const EDGE_FLOOR: f64 = 1e-12;

/// Which waveguide carries the incident photon.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Port {
    A,
    B,
}

/// Two semi-infinite chains plus the connecting atom.
///
/// `delta_a`, `delta_b` are the cavity-atom detunings of the chains; the
/// atom's own level shifts live inside [`EffectiveTwoLevel`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaveguideSystem {
    pub xi_a: f64,
    pub xi_b: f64,
    pub delta_a: f64,
    pub delta_b: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub atom: EffectiveTwoLevel,
}

impl WaveguideSystem {
    /// Chains with identical hopping and coupling, resonant with the atom.
    pub fn equal(xi: f64, g: f64, atom: EffectiveTwoLevel) -> Self {
        WaveguideSystem {
            xi_a: xi,
            xi_b: xi,
            delta_a: 0.0,
            delta_b: 0.0,
            g_a: g,
            g_b: g,
            atom,
        }
    }

    /// The fully blocking operating point: one coupling direction dead,
    /// `|j_ba| = 2 gamma`, `g^2 = gamma xi`, everything resonant. At
    /// `k = pi/2` this transmits a → b with unit flow and returns nothing.
    pub fn one_way_optimal(xi: f64, gamma: f64) -> Self {
        let atom = EffectiveTwoLevel {
            delta_a: 0.0,
            delta_b: 0.0,
            gamma_eff_a: gamma,
            gamma_eff_b: gamma,
            j_ab: C64::new(0.0, 0.0),
            j_ba: C64::new(0.0, -2.0 * gamma),
        };
        WaveguideSystem::equal(xi, (gamma * xi).sqrt(), atom)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("xi_a", self.xi_a),
            ("xi_b", self.xi_b),
            ("delta_a", self.delta_a),
            ("delta_b", self.delta_b),
            ("g_a", self.g_a),
            ("g_b", self.g_b),
            ("atom.delta_a", self.atom.delta_a),
            ("atom.delta_b", self.atom.delta_b),
            ("atom.gamma_eff_a", self.atom.gamma_eff_a),
            ("atom.gamma_eff_b", self.atom.gamma_eff_b),
        ] {
            if !value.is_finite() {
                return Err(Error::invalid(format!("{name} = {value} is not finite")));
            }
        }
        if self.xi_a <= 0.0 || self.xi_b <= 0.0 {
            return Err(Error::invalid(format!(
                "hopping rates must be > 0 (xi_a = {}, xi_b = {})",
                self.xi_a, self.xi_b
            )));
        }
        if self.g_a < 0.0 || self.g_b < 0.0 {
            return Err(Error::invalid(format!(
                "couplings must be >= 0 (g_a = {}, g_b = {})",
                self.g_a, self.g_b
            )));
        }
        for z in [self.atom.j_ab, self.atom.j_ba] {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::invalid(format!("non-finite atom coupling {z}")));
            }
        }
        Ok(())
    }
}

/// Incident wave number on one port; strictly inside the band.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScatteringQuery {
    pub k: f64,
    pub incident: Port,
}

impl ScatteringQuery {
    pub fn new(k: f64, incident: Port) -> Result<Self> {
        if !k.is_finite() || k <= 0.0 || k >= PI {
            return Err(Error::invalid(format!(
                "wave number k = {k} must lie strictly inside (0, pi)"
            )));
        }
        Ok(ScatteringQuery { k, incident })
    }
}

/// Full scattering solution at one energy: the four amplitudes, the
/// atom-induced effective couplings and shifts, the denominator, and the
/// recovered atom amplitudes for the queried incidence.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ScatteringResult {
    pub s_aa: C64,
    pub s_ab: C64,
    pub s_ba: C64,
    pub s_bb: C64,
    pub j_prime_ab: C64,
    pub j_prime_ba: C64,
    pub delta_bar_a: C64,
    pub delta_bar_b: C64,
    pub d: C64,
    pub k_a: f64,
    pub k_b: f64,
    pub energy: f64,
    pub atom_a: C64,
    pub atom_b: C64,
}

/// Group-velocity-normalized flows `I_{l'l} = |s_{l'l}|^2 v_{l'} / v_l`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FlowMatrix {
    pub i_aa: f64,
    pub i_ab: f64,
    pub i_ba: f64,
    pub i_bb: f64,
}

/// Half-maximum point of the transmission flow and the resulting width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FwhmResult {
    pub k_half: f64,
    pub delta_k: f64,
    pub eta: f64,
    pub analytic: bool,
}

impl FwhmResult {
    pub fn sin_k_half(&self) -> f64 {
        self.k_half.sin()
    }
}

/// Band energy at wave number `k`: `E = delta - 2 xi cos k`.
pub fn dispersion(k: f64, xi: f64, delta: f64) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 || k >= PI {
        return Err(Error::invalid(format!(
            "wave number k = {k} must lie strictly inside (0, pi)"
        )));
    }
    Ok(delta - 2.0 * xi * k.cos())
}

/// Invert the dispersion: the `k` in (0, pi) with `delta - 2 xi cos k = energy`.
pub fn solve_k(energy: f64, xi: f64, delta: f64) -> Result<f64> {
    if xi <= 0.0 || !xi.is_finite() {
        return Err(Error::invalid(format!("hopping xi = {xi} must be > 0")));
    }
    let cos_k = (delta - energy) / (2.0 * xi);
    if cos_k.abs() > 1.0 {
        return Err(Error::OutOfBand { cos_k });
    }
    Ok(cos_k.acos())
}

/// Closed-form scattering matrix at the energy fixed by the query.
///
/// The returned amplitudes satisfy the boundary equations to round-off; see
/// [`boundary_residuals`].
pub fn scattering_matrix(sys: &WaveguideSystem, q: &ScatteringQuery) -> Result<ScatteringResult> {
    sys.validate()?;
    let (energy, k_a, k_b) = match q.incident {
        Port::A => {
            let e = dispersion(q.k, sys.xi_a, sys.delta_a)?;
            (e, q.k, solve_k(e, sys.xi_b, sys.delta_b)?)
        }
        Port::B => {
            let e = dispersion(q.k, sys.xi_b, sys.delta_b)?;
            (e, solve_k(e, sys.xi_a, sys.delta_a)?, q.k)
        }
    };

    // atom response at this energy
    let fa = C64::new(energy - sys.atom.delta_a, sys.atom.gamma_eff_a);
    let fb = C64::new(energy - sys.atom.delta_b, sys.atom.gamma_eff_b);
    let m = fa * fb - sys.atom.j_ba * sys.atom.j_ab;
    if m.norm() < POLE_FLOOR {
        return Err(Error::Pole { magnitude: m.norm() });
    }
    let gg = sys.g_a * sys.g_b;
    let j_prime_ab = sys.atom.j_ab * gg / m;
    let j_prime_ba = sys.atom.j_ba * gg / m;
    let delta_bar_a = fb * (sys.g_a * sys.g_a) / m;
    let delta_bar_b = fa * (sys.g_b * sys.g_b) / m;

    let ea_plus = sys.xi_a * C64::from_polar(1.0, k_a) + delta_bar_a;
    let ea_minus = sys.xi_a * C64::from_polar(1.0, -k_a) + delta_bar_a;
    let eb_plus = sys.xi_b * C64::from_polar(1.0, k_b) + delta_bar_b;
    let eb_minus = sys.xi_b * C64::from_polar(1.0, -k_b) + delta_bar_b;

    let jj = j_prime_ab * j_prime_ba;
    let d = ea_minus * eb_minus - jj;
    if d.norm() < POLE_FLOOR {
        return Err(Error::Pole { magnitude: d.norm() });
    }

    let two_i = C64::new(0.0, 2.0);
    let s_aa = (jj - ea_plus * eb_minus) / d;
    let s_bb = (jj - ea_minus * eb_plus) / d;
    let s_ba = two_i * j_prime_ba * sys.xi_a * k_a.sin() / d;
    let s_ab = two_i * j_prime_ab * sys.xi_b * k_b.sin() / d;

    // atom amplitudes for the queried incidence, from the atom rows
    let (u_a0, u_b0) = match q.incident {
        Port::A => (C64::new(1.0, 0.0) + s_aa, s_ba),
        Port::B => (s_ab, C64::new(1.0, 0.0) + s_bb),
    };
    let atom_a = (fb * sys.g_a * u_a0 + sys.atom.j_ab * sys.g_b * u_b0) / m;
    let atom_b = (fa * sys.g_b * u_b0 + sys.atom.j_ba * sys.g_a * u_a0) / m;

    Ok(ScatteringResult {
        s_aa,
        s_ab,
        s_ba,
        s_bb,
        j_prime_ab,
        j_prime_ba,
        delta_bar_a,
        delta_bar_b,
        d,
        k_a,
        k_b,
        energy,
        atom_a,
        atom_b,
    })
}

/// Flux-normalized flows for all four port pairs.
pub fn scattering_flows(
    res: &ScatteringResult,
    sys: &WaveguideSystem,
    q: &ScatteringQuery,
) -> Result<FlowMatrix> {
    let k_in = match q.incident {
        Port::A => res.k_a,
        Port::B => res.k_b,
    };
    if (k_in - q.k).abs() > 1e-12 {
        return Err(Error::invalid(format!(
            "query k = {} does not match the solved result (k = {k_in})",
            q.k
        )));
    }
    let sin_a = res.k_a.sin();
    let sin_b = res.k_b.sin();
    if sin_a < EDGE_FLOOR || sin_b < EDGE_FLOOR {
        return Err(Error::BandEdge { sin_k: sin_a.min(sin_b) });
    }
    let v_a = sys.xi_a * sin_a;
    let v_b = sys.xi_b * sin_b;
    Ok(FlowMatrix {
        i_aa: res.s_aa.norm_sqr(),
        i_ab: res.s_ab.norm_sqr() * v_a / v_b,
        i_ba: res.s_ba.norm_sqr() * v_b / v_a,
        i_bb: res.s_bb.norm_sqr(),
    })
}

/// Residual magnitudes of the five stationary boundary equations when the
/// solution is substituted back: the two j = 0 chain equations, the two atom
/// equations, and the worst bulk equation over j in {1, 2} on both chains.
pub fn boundary_residuals(
    sys: &WaveguideSystem,
    q: &ScatteringQuery,
    res: &ScatteringResult,
) -> [f64; 5] {
    let e = res.energy;
    let one = C64::new(1.0, 0.0);

    let (u_a, u_b): (Box<dyn Fn(i64) -> C64>, Box<dyn Fn(i64) -> C64>) = match q.incident {
        Port::A => (
            Box::new(move |j: i64| {
                C64::from_polar(1.0, -res.k_a * j as f64)
                    + res.s_aa * C64::from_polar(1.0, res.k_a * j as f64)
            }),
            Box::new(move |j: i64| res.s_ba * C64::from_polar(1.0, res.k_b * j as f64)),
        ),
        Port::B => (
            Box::new(move |j: i64| res.s_ab * C64::from_polar(1.0, res.k_a * j as f64)),
            Box::new(move |j: i64| {
                C64::from_polar(1.0, -res.k_b * j as f64)
                    + res.s_bb * C64::from_polar(1.0, res.k_b * j as f64)
            }),
        ),
    };

    let r_chain_a =
        (sys.delta_a - e) * u_a(0) - sys.xi_a * u_a(1) + sys.g_a * res.atom_a * one;
    let r_chain_b =
        (sys.delta_b - e) * u_b(0) - sys.xi_b * u_b(1) + sys.g_b * res.atom_b * one;
    let r_atom_a = C64::new(sys.atom.delta_a - e, -sys.atom.gamma_eff_a) * res.atom_a
        + sys.g_a * u_a(0)
        + sys.atom.j_ab * res.atom_b;
    let r_atom_b = C64::new(sys.atom.delta_b - e, -sys.atom.gamma_eff_b) * res.atom_b
        + sys.g_b * u_b(0)
        + sys.atom.j_ba * res.atom_a;

    let mut r_bulk = 0.0f64;
    for j in [1i64, 2] {
        let ra = (sys.delta_a - e) * u_a(j) - sys.xi_a * (u_a(j + 1) + u_a(j - 1));
        let rb = (sys.delta_b - e) * u_b(j) - sys.xi_b * (u_b(j + 1) + u_b(j - 1));
        r_bulk = r_bulk.max(ra.norm()).max(rb.norm());
    }

    [
        r_chain_a.norm(),
        r_chain_b.norm(),
        r_atom_a.norm(),
        r_atom_b.norm(),
        r_bulk,
    ]
}

/// The reverse-coupling magnitude that makes the a → b flow reach one at
/// the band center: `(g^2 + gamma xi)^2 / (2 g^2 xi)`.
pub fn required_jba(g: f64, gamma: f64, xi: f64) -> Result<f64> {
    if !(g > 0.0) || !(xi > 0.0) || !g.is_finite() || !xi.is_finite() || !gamma.is_finite() {
        return Err(Error::invalid(format!(
            "required_jba needs g > 0 and xi > 0 (g = {g}, gamma = {gamma}, xi = {xi})"
        )));
    }
    let g2 = g * g;
    if g2 == gamma * xi {
        // matched-coupling case, algebraically exact
        return Ok(2.0 * gamma);
    }
    let s = g2 + gamma * xi;
    Ok(s * s / (2.0 * g2 * xi))
}

const TWO_SQRT2: f64 = 2.828_427_124_746_190_3; // 2 sqrt(2)

/// Analytic half-maximum of the transmission flow at the one-way operating
/// point, as a function of `eta = xi / gamma`.
///
/// Solves `2(1-eta)eta s^2 + (1 - 2 sqrt 2) s + 1 - 2(1-eta)eta = 0` for
/// `s = sin k_half`, preferring the "+" discriminant branch when it lands in
/// (0, 1] and the other branch otherwise; at `eta = 1` the quadratic
/// degenerates and the exact linear solution is used.
pub fn half_max_k(eta: f64) -> Result<FwhmResult> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::invalid(format!("eta = {eta} must be finite and > 0")));
    }
    let a = 2.0 * (1.0 - eta) * eta;
    let b = 1.0 - TWO_SQRT2;
    let c = 1.0 - a;

    let s = if a.abs() < 1e-12 {
        -c / b
    } else {
        let disc = b * b - 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::NoHalfMax { eta });
        }
        let sq = disc.sqrt();
        let plus = (-b + sq) / (2.0 * a);
        let minus = (-b - sq) / (2.0 * a);
        let in_range = |s: f64| s > 0.0 && s <= 1.0 + 1e-12;
        if in_range(plus) {
            plus
        } else if in_range(minus) {
            minus
        } else {
            return Err(Error::NoHalfMax { eta });
        }
    };
    let s = s.min(1.0);
    let k_half = s.asin();
    Ok(FwhmResult { k_half, delta_k: PI - 2.0 * k_half, eta, analytic: true })
}

/// Numeric cross-check of [`half_max_k`]: bisection of `I_ba(k) = 1/2` over
/// `k` in (0, pi/2) on the same operating point, entirely through the
/// scattering-matrix path.
pub fn half_max_k_numeric(eta: f64) -> Result<FwhmResult> {
    if !eta.is_finite() || eta <= 0.0 {
        return Err(Error::invalid(format!("eta = {eta} must be finite and > 0")));
    }
    let sys = WaveguideSystem::one_way_optimal(eta, 1.0);
    let transmitted = |k: f64| -> Result<f64> {
        let q = ScatteringQuery::new(k, Port::A)?;
        let res = scattering_matrix(&sys, &q)?;
        Ok(scattering_flows(&res, &sys, &q)?.i_ba)
    };

    // small enough to sit far below half maximum, large enough that the far
    // side's cos k_b stays distinguishable from 1
    let mut lo = 1e-6;
    let mut hi = FRAC_PI_2;
    if transmitted(lo)? >= 0.5 {
        return Err(Error::NoHalfMax { eta });
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if transmitted(mid)? < 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let k_half = 0.5 * (lo + hi);
    Ok(FwhmResult { k_half, delta_k: PI - 2.0 * k_half, eta, analytic: false })
}

/// Flows on the open grid k_j = j pi / (k_count + 1), j = 1..k_count,
/// incident from port a. Points where the far side is evanescent or a pole
/// is hit are dropped; band edges never occur on this grid by construction.
pub fn sweep_k(sys: &WaveguideSystem, k_count: usize) -> Result<Vec<(f64, FlowMatrix)>> {
    if k_count < 3 {
        return Err(Error::invalid(format!("k_count = {k_count} must be >= 3")));
    }
    sys.validate()?;
    let ks: Vec<f64> = (1..=k_count)
        .map(|j| j as f64 * PI / (k_count + 1) as f64)
        .collect();
    let system = *sys;
    let rows = exec::map_ordered(&ks, |&k| {
        let q = ScatteringQuery::new(k, Port::A).ok()?;
        let res = scattering_matrix(&system, &q).ok()?;
        let flows = scattering_flows(&res, &system, &q).ok()?;
        Some((k, flows))
    });
    Ok(rows.into_iter().flatten().collect())
}

/// CSV rendering of a flow table: header `k,i_aa,i_ab,i_ba,i_bb`.
pub fn flows_to_csv(rows: &[(f64, FlowMatrix)]) -> String {
    let mut out = String::from("k,i_aa,i_ab,i_ba,i_bb\n");
    for (k, f) in rows {
        out.push_str(&float17(*k));
        out.push(',');
        out.push_str(&float17(f.i_aa));
        out.push(',');
        out.push_str(&float17(f.i_ab));
        out.push(',');
        out.push_str(&float17(f.i_ba));
        out.push(',');
        out.push_str(&float17(f.i_bb));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn plain_atom(gamma: f64, j_ab: C64, j_ba: C64) -> EffectiveTwoLevel {
        EffectiveTwoLevel {
            delta_a: 0.0,
            delta_b: 0.0,
            gamma_eff_a: gamma,
            gamma_eff_b: gamma,
            j_ab,
            j_ba,
        }
    }

    #[test]
    fn dispersion_examples() {
        assert!(dispersion(FRAC_PI_2, 1.0, 0.0).unwrap().abs() < 1e-15);
        assert!((dispersion(PI / 3.0, 1.0, 0.0).unwrap() + 1.0).abs() < 1e-15);
        assert!(dispersion(0.0, 1.0, 0.0).is_err());
        assert!(dispersion(PI, 1.0, 0.0).is_err());
        assert!((solve_k(0.0, 1.0, 0.0).unwrap() - FRAC_PI_2).abs() < 1e-15);
        assert!(matches!(solve_k(5.0, 1.0, 0.0), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn decoupled_chains_reflect_fully() {
        let sys = WaveguideSystem::equal(1.0, 0.0, plain_atom(0.5, c(0.3, 0.0), c(0.3, 0.0)));
        let q = ScatteringQuery::new(1.1, Port::A).unwrap();
        let res = scattering_matrix(&sys, &q).unwrap();
        assert_eq!(res.s_ab, c(0.0, 0.0));
        assert_eq!(res.s_ba, c(0.0, 0.0));
        assert!((res.s_aa.norm() - 1.0).abs() < 1e-12);
        assert!((res.s_bb.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_way_point_transmits_perfectly() {
        let sys = WaveguideSystem::one_way_optimal(0.1, 1.0);
        let q = ScatteringQuery::new(FRAC_PI_2, Port::A).unwrap();
        let res = scattering_matrix(&sys, &q).unwrap();
        assert!((res.s_ba.norm_sqr() - 1.0).abs() < 1e-12);
        assert_eq!(res.s_ab, c(0.0, 0.0));
        let flows = scattering_flows(&res, &sys, &q).unwrap();
        assert!((flows.i_ba - 1.0).abs() < 1e-9);
        assert_eq!(flows.i_ab, 0.0);
        assert!(flows.i_aa < 1e-20);
    }

    #[test]
    fn equal_parameters_make_flows_plain_probabilities() {
        let sys = WaveguideSystem::equal(0.7, 0.4, plain_atom(0.3, c(0.2, 0.1), c(0.5, -0.2)));
        let q = ScatteringQuery::new(0.9, Port::A).unwrap();
        let res = scattering_matrix(&sys, &q).unwrap();
        let flows = scattering_flows(&res, &sys, &q).unwrap();
        assert_eq!(flows.i_ba, res.s_ba.norm_sqr());
        assert_eq!(flows.i_ab, res.s_ab.norm_sqr());
    }

    #[test]
    fn hermitian_atom_conserves_flux() {
        let scale = 0.8;
        let j_ab = scale * c(1.0, 1.0);
        // band b fully covers band a so every query propagates on both sides
        let sys = WaveguideSystem {
            xi_a: 1.3,
            xi_b: 1.5,
            delta_a: 0.1,
            delta_b: -0.2,
            g_a: 0.5,
            g_b: 0.9,
            atom: plain_atom(0.0, j_ab, j_ab.conj()),
        };
        for k in [0.7, 1.2, 2.1, 2.8] {
            let q = ScatteringQuery::new(k, Port::A).unwrap();
            let res = scattering_matrix(&sys, &q).unwrap();
            let flows = scattering_flows(&res, &sys, &q).unwrap();
            assert!((flows.i_aa + flows.i_ba - 1.0).abs() < 1e-10, "k = {k}");

            let qb = ScatteringQuery::new(res.k_b, Port::B).unwrap();
            let res_b = scattering_matrix(&sys, &qb).unwrap();
            let flows_b = scattering_flows(&res_b, &sys, &qb).unwrap();
            assert!((flows_b.i_bb + flows_b.i_ab - 1.0).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn residuals_vanish_for_returned_results() {
        let sys = WaveguideSystem {
            xi_a: 1.1,
            xi_b: 0.8,
            delta_a: 0.3,
            delta_b: -0.1,
            g_a: 0.6,
            g_b: 0.7,
            atom: plain_atom(0.4, c(0.3, -0.5), c(-0.2, 0.8)),
        };
        for (k, port) in [(0.8, Port::A), (1.9, Port::A), (1.2, Port::B)] {
            let q = ScatteringQuery::new(k, port).unwrap();
            let res = scattering_matrix(&sys, &q).unwrap();
            for (i, r) in boundary_residuals(&sys, &q, &res).iter().enumerate() {
                assert!(*r < 1e-10, "equation {i} residual {r} at k = {k}");
            }
        }
    }

    #[test]
    fn evanescent_far_side_is_out_of_band() {
        let atom = plain_atom(0.2, c(0.1, 0.0), c(0.1, 0.0));
        let mut sys = WaveguideSystem::equal(1.0, 0.3, atom);
        sys.delta_b = 5.0;
        let q = ScatteringQuery::new(FRAC_PI_2, Port::A).unwrap();
        assert!(matches!(scattering_matrix(&sys, &q), Err(Error::OutOfBand { .. })));
    }

    #[test]
    fn far_side_band_edge_blocks_flows_only() {
        let atom = plain_atom(0.2, c(0.1, 0.0), c(0.1, 0.0));
        let mut sys = WaveguideSystem::equal(1.0, 0.3, atom);
        sys.delta_b = 2.0; // cos k_b = 1 exactly at E = 0
        let q = ScatteringQuery::new(FRAC_PI_2, Port::A).unwrap();
        let res = scattering_matrix(&sys, &q).unwrap();
        assert!(matches!(
            scattering_flows(&res, &sys, &q),
            Err(Error::BandEdge { .. })
        ));
    }

    #[test]
    fn atom_resonance_is_reported_as_pole() {
        // undamped uncoupled atom exactly on resonance: M = E^2 = 0.
        // delta_a is chosen so E = delta_a - 2 xi cos k vanishes bitwise.
        let k = 1.1f64;
        let atom = plain_atom(0.0, c(0.0, 0.0), c(0.0, 0.0));
        let mut sys = WaveguideSystem::equal(1.0, 0.5, atom);
        sys.delta_a = 2.0 * k.cos();
        sys.delta_b = sys.delta_a;
        let q = ScatteringQuery::new(k, Port::A).unwrap();
        assert!(matches!(scattering_matrix(&sys, &q), Err(Error::Pole { .. })));
    }

    #[test]
    fn required_jba_examples() {
        assert_eq!(required_jba(1.0, 1.0, 1.0).unwrap(), 2.0);
        assert!((required_jba(2.0f64.sqrt(), 1.0, 1.0).unwrap() - 2.25).abs() < 1e-15);
        assert!(required_jba(0.0, 1.0, 1.0).is_err());

        // closed loop: at that coupling the band-center flow reaches one
        let gamma = 1.0;
        let xi = 1.0;
        let g = 2.0f64.sqrt();
        let jba = required_jba(g, gamma, xi).unwrap();
        let atom = plain_atom(gamma, c(0.0, 0.0), c(0.0, -jba));
        let sys = WaveguideSystem::equal(xi, g, atom);
        let q = ScatteringQuery::new(FRAC_PI_2, Port::A).unwrap();
        let res = scattering_matrix(&sys, &q).unwrap();
        let flows = scattering_flows(&res, &sys, &q).unwrap();
        assert!((flows.i_ba - 1.0).abs() < 1e-9, "i_ba = {}", flows.i_ba);
    }

    #[test]
    fn half_max_width_at_optimal_eta() {
        let r = half_max_k(0.5).unwrap();
        let expected = TWO_SQRT2 - 1.0 - 2.0 * (2.0 - 2.0f64.sqrt()).sqrt();
        assert!((r.sin_k_half() - expected).abs() < 1e-12);
        assert!((r.delta_k / PI - 0.81).abs() < 0.005);
        assert!(r.analytic);
        assert!((r.delta_k - (PI - 2.0 * r.k_half)).abs() < 1e-15);
    }

    #[test]
    fn half_max_degenerate_linear_case() {
        let r = half_max_k(1.0).unwrap();
        assert!((r.sin_k_half() - 1.0 / (TWO_SQRT2 - 1.0)).abs() < 1e-12);
        assert!((r.delta_k / PI - 0.6316).abs() < 5e-4);
    }

    #[test]
    fn analytic_and_numeric_half_max_agree() {
        for eta in [0.1, 0.25, 0.5, 1.0, 2.0] {
            let ana = half_max_k(eta).unwrap();
            let num = half_max_k_numeric(eta).unwrap();
            assert!(
                (ana.delta_k - num.delta_k).abs() < 1e-8,
                "eta = {eta}: {} vs {}",
                ana.delta_k,
                num.delta_k
            );
            assert!(!num.analytic);
        }
    }

    #[test]
    fn widest_isolation_band_at_half_ratio() {
        let mut best = (0.0f64, 0.0f64);
        let mut eta = 0.05;
        while eta <= 4.0 + 1e-9 {
            let dk = half_max_k(eta).unwrap().delta_k;
            if dk > best.1 {
                best = (eta, dk);
            }
            eta += 0.01;
        }
        assert!((best.0 - 0.5).abs() <= 0.01 + 1e-9, "argmax eta = {}", best.0);
    }

    #[test]
    fn half_max_rejects_nonpositive_eta() {
        assert!(half_max_k(0.0).is_err());
        assert!(half_max_k(-1.0).is_err());
        assert!(half_max_k(f64::NAN).is_err());
    }

    #[test]
    fn transmission_sweep_matches_band_structure() {
        let sys = WaveguideSystem::one_way_optimal(0.1, 1.0);
        let rows = sweep_k(&sys, 399).unwrap();
        assert_eq!(rows.len(), 399);

        let max_ba = rows.iter().map(|(_, f)| f.i_ba).fold(0.0, f64::max);
        assert!(max_ba >= 0.999, "max i_ba = {max_ba}");
        assert!(rows.iter().all(|(_, f)| f.i_ab == 0.0));

        // flows symmetric under k -> pi - k on the resonant point
        let n = rows.len();
        for j in 0..n / 2 {
            let (_, lo) = rows[j];
            let (_, hi) = rows[n - 1 - j];
            assert!((lo.i_ba - hi.i_ba).abs() < 1e-10);
        }

        assert!(sweep_k(&sys, 2).is_err());
    }

    #[test]
    fn flow_csv_shape() {
        let sys = WaveguideSystem::one_way_optimal(0.5, 1.0);
        let rows = sweep_k(&sys, 3).unwrap();
        let csv = flows_to_csv(&rows);
        assert_eq!(csv.lines().next(), Some("k,i_aa,i_ab,i_ba,i_bb"));
        assert_eq!(csv.lines().count(), 4);
    }
}
