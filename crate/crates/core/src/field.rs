//! Photon-statistics models for the excitation operator `B = g a`, their
//! low-order moments, and truncated Fock-space representations used by the
//! master-equation oracle.
//!
//! Every model is treated as exactly resonant with the atomic transition.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::density::DensityMatrix;
use crate::{Error, Result, C64};

const MODULE: &str = "field-statistics";

/// Largest population allowed above the Fock cutoff.
pub const TAIL_TOL: f64 = 1e-8;

const MAX_SUGGESTED_CUTOFF: usize = 4096;

/// Photon-statistics model of a single resonant mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FieldSpec {
    Fock { n: usize },
    Coherent { alpha: C64 },
    Thermal { nbar: f64 },
    /// Parametric-oscillator output with `<a^2> = cosh r sinh r`.
    SqueezedVacuum { r: f64 },
    CustomMoments { moments: FieldMoments },
}

/// First and second moments of `B`. Rates are in units of `gamma_perp`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FieldMoments {
    pub mean_b: C64,
    pub mean_b2: C64,
    pub mean_bdag_b: C64,
    pub mean_bdag: C64,
    pub mean_bdag2: C64,
    /// Coupling `g`; for a single mode `<[B, B^dagger]> = g^2`.
    pub g: f64,
}

impl FieldMoments {
    /// Builds a consistent moment set from `<B>`, `<B^2>` and `<B^dagger B>`.
    pub fn new(mean_b: C64, mean_b2: C64, mean_bdag_b: f64, g: f64) -> Result<Self> {
        let m = FieldMoments {
            mean_b,
            mean_b2,
            mean_bdag_b: C64::new(mean_bdag_b, 0.0),
            mean_bdag: mean_b.conj(),
            mean_bdag2: mean_b2.conj(),
            g,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn vacuum(g: f64) -> Self {
        let z = C64::new(0.0, 0.0);
        FieldMoments { mean_b: z, mean_b2: z, mean_bdag_b: z, mean_bdag: z, mean_bdag2: z, g }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::domain(MODULE, msg.to_string()));
        let fields = [self.mean_b, self.mean_b2, self.mean_bdag_b, self.mean_bdag, self.mean_bdag2];
        if fields.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) || !self.g.is_finite() {
            return bad("moments must be finite");
        }
        if self.g < 0.0 {
            return bad("coupling g must be nonnegative");
        }
        let scale = 1e-12 * (1.0 + self.mean_bdag_b.norm());
        if self.mean_bdag_b.im.abs() > scale || self.mean_bdag_b.re < -scale {
            return bad("<B^dagger B> must be real and nonnegative");
        }
        if (self.mean_bdag - self.mean_b.conj()).norm() > 1e-12 * (1.0 + self.mean_b.norm()) {
            return bad("<B^dagger> must equal conj(<B>)");
        }
        if (self.mean_bdag2 - self.mean_b2.conj()).norm() > 1e-12 * (1.0 + self.mean_b2.norm()) {
            return bad("<B^dagger^2> must equal conj(<B^2>)");
        }
        Ok(())
    }

    /// `<B^dagger B>` as a real number.
    pub fn photon_flux(&self) -> f64 {
        self.mean_bdag_b.re
    }

    /// `<[B, B^dagger]>` for a single-mode coupling.
    pub fn commutator(&self) -> f64 {
        self.g * self.g
    }
}

/// Moments of `B = g a` for the given model.
pub fn moments_of(spec: &FieldSpec, g: f64) -> Result<FieldMoments> {
    spec.validate()?;
    let z = C64::new(0.0, 0.0);
    let g2 = g * g;
    match spec {
        FieldSpec::Fock { n } => FieldMoments::new(z, z, g2 * *n as f64, g),
        FieldSpec::Coherent { alpha } => {
            FieldMoments::new(alpha * g, alpha * alpha * g2, g2 * alpha.norm_sqr(), g)
        }
        FieldSpec::Thermal { nbar } => FieldMoments::new(z, z, g2 * nbar, g),
        FieldSpec::SqueezedVacuum { r } => {
            let (s, c) = (r.sinh(), r.cosh());
            FieldMoments::new(z, C64::new(g2 * c * s, 0.0), g2 * s * s, g)
        }
        FieldSpec::CustomMoments { moments } => Ok(*moments),
    }
}

impl FieldSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            FieldSpec::Thermal { nbar } if !(*nbar >= 0.0 && nbar.is_finite()) => {
                Err(Error::domain(MODULE, format!("thermal occupation {nbar} must be >= 0")))
            }
            FieldSpec::SqueezedVacuum { r } if !r.is_finite() => {
                Err(Error::domain(MODULE, "squeezing parameter must be finite"))
            }
            FieldSpec::Coherent { alpha } if !(alpha.re.is_finite() && alpha.im.is_finite()) => {
                Err(Error::domain(MODULE, "coherent amplitude must be finite"))
            }
            FieldSpec::CustomMoments { moments } => moments.validate(),
            _ => Ok(()),
        }
    }

    /// Population above level `n_max`.
    pub fn tail_population(&self, n_max: usize) -> Result<f64> {
        self.validate()?;
        Ok(match self {
            FieldSpec::Fock { n } => {
                if *n > n_max {
                    1.0
                } else {
                    0.0
                }
            }
            FieldSpec::Thermal { nbar } => (nbar / (1.0 + nbar)).powi(n_max as i32 + 1),
            FieldSpec::Coherent { alpha } => {
                let x = alpha.norm_sqr();
                let mut p = (-x).exp();
                for n in 1..=n_max {
                    p *= x / n as f64;
                }
                let mut tail = 0.0;
                let mut n = n_max + 1;
                loop {
                    p *= x / n as f64;
                    tail += p;
                    if (n as f64) > x && p < 1e-18 * tail.max(1e-300) {
                        break;
                    }
                    if n > n_max + 100_000 {
                        break;
                    }
                    n += 1;
                }
                tail
            }
            FieldSpec::SqueezedVacuum { r } => {
                let amps = squeezed_amplitudes(*r, usize::MAX);
                let mut tail = 0.0;
                for (m, p) in amps {
                    if 2 * m > n_max {
                        tail += p * p;
                    }
                }
                tail
            }
            FieldSpec::CustomMoments { .. } => {
                return Err(Error::domain(MODULE, "custom moments have no Fock representation"))
            }
        })
    }

    /// Smallest cutoff whose tail population is below [`TAIL_TOL`]. Coherences
    /// such as `<a^2>` converge only like the square root of the tail.
    pub fn suggested_cutoff(&self) -> Result<usize> {
        for n_max in 1..=MAX_SUGGESTED_CUTOFF {
            if self.tail_population(n_max)? < TAIL_TOL {
                return Ok(n_max);
            }
        }
        Err(Error::capacity(MODULE, "no Fock cutoff below 4096 meets the tail bound"))
    }
}

/// Normalized squeezed-vacuum amplitudes `(m, c_{2m})`, stopping once the
/// remaining terms are negligible or `2m` passes `limit`.
fn squeezed_amplitudes(r: f64, limit: usize) -> Vec<(usize, f64)> {
    let t = r.tanh();
    let mut c = 1.0 / r.cosh().sqrt();
    let mut out = vec![(0, c)];
    let mut m = 1;
    while 2 * m <= limit {
        let k = (2 * m) as f64;
        c *= t * ((k - 1.0) / k).sqrt();
        out.push((m, c));
        if c * c < 1e-30 && m > 4 {
            break;
        }
        m += 1;
    }
    out
}

/// Density matrix of the model over Fock levels `0..=n_max`, renormalized to
/// unit trace. Fails if more than [`TAIL_TOL`] population lies above the cutoff.
pub fn fock_representation(spec: &FieldSpec, n_max: usize) -> Result<DensityMatrix> {
    if n_max == 0 {
        return Err(Error::domain(MODULE, "Fock cutoff must be positive"));
    }
    let tail = spec.tail_population(n_max)?;
    if tail >= TAIL_TOL {
        let hint = spec.suggested_cutoff().map(|n| format!("; use n_max >= {n}")).unwrap_or_default();
        return Err(Error::capacity(
            MODULE,
            format!("population {tail:.3e} above n_max = {n_max} exceeds {TAIL_TOL:.0e}{hint}"),
        ));
    }
    let dim = n_max + 1;
    let mat = match spec {
        FieldSpec::Fock { n } => {
            let mut m = DMatrix::<C64>::zeros(dim, dim);
            m[(*n, *n)] = C64::new(1.0, 0.0);
            m
        }
        FieldSpec::Thermal { nbar } => {
            let q = nbar / (1.0 + nbar);
            let pops: Vec<f64> = (0..dim).map(|n| q.powi(n as i32) / (1.0 + nbar)).collect();
            diag(&pops)
        }
        FieldSpec::Coherent { alpha } => {
            let mut amps = vec![C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0)];
            for n in 1..dim {
                let prev = amps[n - 1];
                amps.push(prev * alpha / (n as f64).sqrt());
            }
            outer(&amps)
        }
        FieldSpec::SqueezedVacuum { r } => {
            let mut amps = vec![C64::new(0.0, 0.0); dim];
            for (m, c) in squeezed_amplitudes(*r, n_max) {
                amps[2 * m] = C64::new(c, 0.0);
            }
            outer(&amps)
        }
        FieldSpec::CustomMoments { .. } => {
            return Err(Error::domain(MODULE, "custom moments have no Fock representation"))
        }
    };
    let tr = mat.trace().re;
    DensityMatrix::new(vec![dim], mat.unscale(tr))
}

/// Truncated annihilation operator on levels `0..=n_max`.
pub fn annihilation(n_max: usize) -> DMatrix<C64> {
    let dim = n_max + 1;
    let mut a = DMatrix::<C64>::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    a
}

/// Moments of `B = g a` evaluated directly on a Fock-space density matrix.
pub fn moments_from_fock(rho: &DensityMatrix, g: f64) -> Result<FieldMoments> {
    if rho.dims().len() != 1 {
        return Err(Error::domain(MODULE, "expected a single-mode density matrix"));
    }
    let a = annihilation(rho.dim() - 1);
    let mean_a = rho.expectation(&a)?;
    let mean_a2 = rho.expectation(&(&a * &a))?;
    let mean_n = rho.expectation(&(a.adjoint() * &a))?;
    let g2 = g * g;
    Ok(FieldMoments {
        mean_b: mean_a * g,
        mean_b2: mean_a2 * g2,
        mean_bdag_b: mean_n * g2,
        mean_bdag: mean_a.conj() * g,
        mean_bdag2: mean_a2.conj() * g2,
        g,
    })
}

/// Weak-field ratio `N kappa_inf^2 <B^dagger B>` with `kappa_inf = 1/gamma_perp`.
/// The perturbative closed forms require it to be much smaller than one.
pub fn saturation_check(n_atoms: usize, moments: &FieldMoments, gamma_perp: f64) -> Result<f64> {
    if !(gamma_perp > 0.0) {
        return Err(Error::domain(MODULE, "gamma_perp must be positive"));
    }
    Ok(n_atoms as f64 * moments.photon_flux() / (gamma_perp * gamma_perp))
}

fn diag(pops: &[f64]) -> DMatrix<C64> {
    let n = pops.len();
    let mut m = DMatrix::<C64>::zeros(n, n);
    for (i, &p) in pops.iter().enumerate() {
        m[(i, i)] = C64::new(p, 0.0);
    }
    m
}

fn outer(amps: &[C64]) -> DMatrix<C64> {
    let n = amps.len();
    DMatrix::from_fn(n, n, |r, c| amps[r] * amps[c].conj())
}
