//! Driven cyclic three-level system and its reduction to an effective
//! two-level model.
//!
//! Basis order is (|a>, |b>, |c>) everywhere. All rates, detunings and times
//! are dimensionless, expressed in units of the direct drive rate. The three
//! drive phases enter observables only through their gauge-invariant sum, the
//! synthetic flux; phases are stored individually and the flux is always
//! computed, never stored.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Operator, C64};

const LOOP_TOL: f64 = 1e-12;

/// Drive rates, phases, detunings and decay rates of the cyclic three-level
/// system.
///
/// The detunings must satisfy the closed-loop condition
/// `delta_ab = delta_cb - delta_ca`; it is validated, never repaired.
/// `delta_ca` cancels from the gauge-reduced Hamiltonian and participates
/// only in that constraint.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCyclicAtomParams")]
pub struct CyclicAtomParams {
    pub omega_ab: f64,
    pub omega_cb: f64,
    pub omega_ca: f64,
    pub phi_ab: f64,
    pub phi_cb: f64,
    pub phi_ca: f64,
    pub delta_ab: f64,
    pub delta_cb: f64,
    pub delta_ca: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub gamma_c: f64,
}

/// Wire mirror of [`CyclicAtomParams`]; unknown keys are rejected.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCyclicAtomParams {
    omega_ab: f64,
    omega_cb: f64,
    omega_ca: f64,
    phi_ab: f64,
    phi_cb: f64,
    phi_ca: f64,
    delta_ab: f64,
    delta_cb: f64,
    delta_ca: f64,
    gamma_a: f64,
    gamma_b: f64,
    gamma_c: f64,
}

impl TryFrom<RawCyclicAtomParams> for CyclicAtomParams {
    type Error = Error;

    fn try_from(raw: RawCyclicAtomParams) -> Result<Self> {
        let params = CyclicAtomParams {
            omega_ab: raw.omega_ab,
            omega_cb: raw.omega_cb,
            omega_ca: raw.omega_ca,
            phi_ab: raw.phi_ab,
            phi_cb: raw.phi_cb,
            phi_ca: raw.phi_ca,
            delta_ab: raw.delta_ab,
            delta_cb: raw.delta_cb,
            delta_ca: raw.delta_ca,
            gamma_a: raw.gamma_a,
            gamma_b: raw.gamma_b,
            gamma_c: raw.gamma_c,
        };
        params.validate()?;
        Ok(params)
    }
}

impl Default for CyclicAtomParams {
    /// Canonical strong-damping operating point: fast auxiliary decay
    /// (`gamma_c = 100`), balanced indirect drives (`omega_ca = omega_cb =
    /// 10`), unit direct drive, resonant throughout. The indirect path then
    /// matches the direct drive in magnitude, which is the interesting
    /// interference regime.
    fn default() -> Self {
        CyclicAtomParams {
            omega_ab: 1.0,
            omega_cb: 10.0,
            omega_ca: 10.0,
            phi_ab: 0.0,
            phi_cb: 0.0,
            phi_ca: 0.0,
            delta_ab: 0.0,
            delta_cb: 0.0,
            delta_ca: 0.0,
            gamma_a: 0.1,
            gamma_b: 0.1,
            gamma_c: 100.0,
        }
    }
}

impl CyclicAtomParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("omega_ab", self.omega_ab),
            ("omega_cb", self.omega_cb),
            ("omega_ca", self.omega_ca),
            ("phi_ab", self.phi_ab),
            ("phi_cb", self.phi_cb),
            ("phi_ca", self.phi_ca),
            ("delta_ab", self.delta_ab),
            ("delta_cb", self.delta_cb),
            ("delta_ca", self.delta_ca),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::invalid(format!("{name} = {value} is not finite")));
            }
        }
        for (name, value) in [
            ("omega_ab", self.omega_ab),
            ("omega_cb", self.omega_cb),
            ("omega_ca", self.omega_ca),
            ("gamma_a", self.gamma_a),
            ("gamma_b", self.gamma_b),
            ("gamma_c", self.gamma_c),
        ] {
            if value < 0.0 {
                return Err(Error::invalid(format!("{name} = {value} must be >= 0")));
            }
        }
        let mismatch = (self.delta_ab - (self.delta_cb - self.delta_ca)).abs();
        if mismatch > LOOP_TOL {
            return Err(Error::invalid(format!(
                "closed-loop detuning condition violated: |delta_ab - (delta_cb - delta_ca)| = {mismatch:e}"
            )));
        }
        Ok(())
    }

    /// Gauge-invariant sum of the three drive phases.
    pub fn flux(&self) -> SyntheticFlux {
        SyntheticFlux::new(self.phi_ab + self.phi_cb + self.phi_ca)
    }

    /// Same parameters with the phase triple replaced by `(phi, 0, 0)`,
    /// i.e. total flux `phi`.
    pub fn with_flux(mut self, phi: f64) -> Self {
        self.phi_ab = phi;
        self.phi_cb = 0.0;
        self.phi_ca = 0.0;
        self
    }
}

/// Total drive phase around the cycle, wrapped to (-pi, pi].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SyntheticFlux(f64);

impl SyntheticFlux {
    pub fn new(total: f64) -> Self {
        SyntheticFlux(wrap_angle(total))
    }

    pub fn radians(&self) -> f64 {
        self.0
    }
}

fn wrap_angle(x: f64) -> f64 {
    if x > -PI && x <= PI {
        return x;
    }
    let r = x.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

/// Reduced non-Hermitian two-level model: dressed detunings, broadened decay
/// rates, and the pair of directional coupling coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveTwoLevel {
    pub delta_a: f64,
    pub delta_b: f64,
    pub gamma_eff_a: f64,
    pub gamma_eff_b: f64,
    pub j_ab: C64,
    pub j_ba: C64,
}

/// Gauge-reduced Hamiltonian of the driven cycle in basis (|a>, |b>, |c>):
///
/// ```text
/// [ delta_ab - i gamma_a   omega_ab e^{+i phi}    omega_ca            ]
/// [ omega_ab e^{-i phi}    -i gamma_b             omega_cb            ]
/// [ omega_ca               omega_cb               delta_cb - i gamma_c ]
/// ```
pub fn build_full_hamiltonian(p: &CyclicAtomParams) -> Result<Operator> {
    p.validate()?;
    let phi = p.flux().radians();
    let drive = Complex64::from_polar(p.omega_ab, phi);
    let mut h = Operator::zero(3);
    h.set(0, 0, C64::new(p.delta_ab, -p.gamma_a));
    h.set(1, 1, C64::new(0.0, -p.gamma_b));
    h.set(2, 2, C64::new(p.delta_cb, -p.gamma_c));
    h.set(0, 1, drive);
    h.set(1, 0, Complex64::from_polar(p.omega_ab, -phi));
    h.set(0, 2, C64::new(p.omega_ca, 0.0));
    h.set(2, 0, C64::new(p.omega_ca, 0.0));
    h.set(1, 2, C64::new(p.omega_cb, 0.0));
    h.set(2, 1, C64::new(p.omega_cb, 0.0));
    Ok(h)
}

/// Eliminate the fast-decaying level |c> (its amplitude slaved to A and B),
/// leaving the two-level model with a dissipative coupling channel through
/// the reservoir in parallel with the direct drive.
pub fn adiabatic_eliminate(p: &CyclicAtomParams) -> Result<EffectiveTwoLevel> {
    p.validate()?;
    if p.gamma_c == 0.0 {
        return Err(Error::DivisionDomain(
            "adiabatic elimination requires gamma_c > 0".into(),
        ));
    }
    let den = p.gamma_c * p.gamma_c + p.delta_cb * p.delta_cb;
    let phi = p.flux().radians();
    // reservoir-mediated coupling, common to both directions
    let dissipative =
        C64::new(0.0, 1.0) * p.omega_ca * p.omega_cb * C64::new(p.gamma_c, -p.delta_cb) / den;
    Ok(EffectiveTwoLevel {
        delta_a: p.delta_ab - p.omega_ca * p.omega_ca * p.delta_cb / den,
        delta_b: -p.omega_cb * p.omega_cb * p.delta_cb / den,
        gamma_eff_a: p.gamma_a + p.omega_ca * p.omega_ca * p.gamma_c / den,
        gamma_eff_b: p.gamma_b + p.omega_cb * p.omega_cb * p.gamma_c / den,
        j_ab: Complex64::from_polar(p.omega_ab, phi) - dissipative,
        j_ba: Complex64::from_polar(p.omega_ab, -phi) - dissipative,
    })
}

/// Slaved amplitude of level |c> for instantaneous amplitudes A and B.
pub fn adiabatic_c_amplitude(p: &CyclicAtomParams, a: C64, b: C64) -> Result<C64> {
    p.validate()?;
    if p.gamma_c == 0.0 && p.delta_cb == 0.0 {
        return Err(Error::DivisionDomain(
            "slaved amplitude requires gamma_c > 0 or delta_cb != 0".into(),
        ));
    }
    let mi = C64::new(0.0, -1.0);
    Ok((mi * p.omega_ca * a + mi * p.omega_cb * b) / C64::new(p.gamma_c, p.delta_cb))
}

/// Two-level Hamiltonian in basis (|a>, |b>):
/// `[[delta_a - i Gamma_a, j_ab], [j_ba, delta_b - i Gamma_b]]`.
pub fn build_effective_hamiltonian(e: &EffectiveTwoLevel) -> Operator {
    let mut h = Operator::zero(2);
    h.set(0, 0, C64::new(e.delta_a, -e.gamma_eff_a));
    h.set(1, 1, C64::new(e.delta_b, -e.gamma_eff_b));
    h.set(0, 1, e.j_ab);
    h.set(1, 0, e.j_ba);
    h
}
