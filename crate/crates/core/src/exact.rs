//! Decay-free evolutions of an ensemble coupled to one photon.
//!
//! Two couplings are covered, both with `S = S10`:
//!
//! - single-photon exchange `H = i g (a S - a^dagger S^dagger)`, which rotates
//!   `|1>_f |D_h>` into `|0>_f |D_{h+1}>`;
//! - two-mode mixing `H = i f (a^dagger b S - a b^dagger S^dagger)`, which
//!   rotates `|01>_ab |D_h>` into `|10>_ab |D_{h+1}>`.
//!
//! Each coupled pair forms an invariant two-dimensional block, so operator
//! functions of `S S^dagger` reduce to scalar rotations by
//! `theta_h = t * coupling * sqrt((h + 1)(N - h))`.

use std::f64::consts::FRAC_PI_2;

use crate::symmetric::{binomial, raising_factor, ProductKet, SymmetricKet};
use crate::{Error, Result, C64, PRODUCT_CAP};

const MODULE: &str = "exact-dynamics";

const NORM_TOL: f64 = 1e-12;

/// Two-dimensional photonic basis. Index 0 is `|0>_f` or `|01>_ab`, index 1 is
/// `|1>_f` or `|10>_ab`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldBasis {
    Cavity,
    TwoMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomBasis {
    /// Normalized Dicke kets `h = 0..=N`.
    Symmetric,
    /// `2^N` configurations, site 0 most significant.
    Product,
}

/// Atomic factor for [`AtomFieldKet::product`].
#[derive(Debug, Clone, PartialEq)]
pub enum AtomKet {
    Symmetric(SymmetricKet),
    Product(ProductKet),
}

/// Joint pure state of one photonic qubit and an ensemble. Amplitudes are
/// stored field-major: `amps[f * atom_dim + a]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomFieldKet {
    field: FieldBasis,
    atoms: AtomBasis,
    n_atoms: usize,
    amps: Vec<C64>,
}

fn atom_dim(atoms: AtomBasis, n: usize) -> usize {
    match atoms {
        AtomBasis::Symmetric => n + 1,
        AtomBasis::Product => 1usize << n,
    }
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

impl AtomFieldKet {
    /// Validates size, product cap and unit norm (1e-12).
    pub fn new(field: FieldBasis, atoms: AtomBasis, n_atoms: usize, amps: Vec<C64>) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::domain(MODULE, "an ensemble needs at least one atom"));
        }
        if atoms == AtomBasis::Product && n_atoms > PRODUCT_CAP {
            return Err(Error::capacity(
                MODULE,
                format!("{n_atoms} sites exceed the product-basis cap of {PRODUCT_CAP}"),
            ));
        }
        let need = 2 * atom_dim(atoms, n_atoms);
        if amps.len() != need {
            return Err(Error::domain(MODULE, format!("{} amplitudes given, need {need}", amps.len())));
        }
        let ket = Self { field, atoms, n_atoms, amps };
        let norm = ket.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::invalid_state(MODULE, format!("joint ket norm {norm} is not 1")));
        }
        Ok(ket)
    }

    /// `(field_amps[0] |0> + field_amps[1] |1>) (x) atoms`.
    pub fn product(field: FieldBasis, field_amps: [C64; 2], atoms: &AtomKet) -> Result<Self> {
        let (basis, n, atom_amps) = match atoms {
            AtomKet::Symmetric(k) => (AtomBasis::Symmetric, k.n_atoms(), k.amps()),
            AtomKet::Product(k) => (AtomBasis::Product, k.n_sites(), k.amps()),
        };
        let amps = field_amps.iter().flat_map(|f| atom_amps.iter().map(move |a| f * a)).collect();
        Self::new(field, basis, n, amps)
    }

    pub fn field_basis(&self) -> FieldBasis {
        self.field
    }

    pub fn atom_basis(&self) -> AtomBasis {
        self.atoms
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn atom_dim(&self) -> usize {
        atom_dim(self.atoms, self.n_atoms)
    }

    /// Amplitude of field state `f` times atomic basis state `a`.
    pub fn amp(&self, f: usize, a: usize) -> C64 {
        self.amps[f * self.atom_dim() + a]
    }

    /// Unnormalized atomic component paired with field state `f`.
    pub fn component(&self, f: usize) -> &[C64] {
        let d = self.atom_dim();
        &self.amps[f * d..(f + 1) * d]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &AtomFieldKet) -> Result<C64> {
        self.require_same_space(other)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &AtomFieldKet) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Probability of field state `f`.
    pub fn field_population(&self, f: usize) -> f64 {
        self.component(f).iter().map(|a| a.norm_sqr()).sum()
    }

    /// Same state with each `|D_h>` spread over its product configurations.
    pub fn to_product_atoms(&self) -> Result<Self> {
        if self.atoms == AtomBasis::Product {
            return Ok(self.clone());
        }
        let n = self.n_atoms;
        if n > PRODUCT_CAP {
            return Err(Error::capacity(
                MODULE,
                format!("N = {n} exceeds the product-basis cap of {PRODUCT_CAP} sites"),
            ));
        }
        let weights: Vec<f64> = (0..=n).map(|h| binomial(n, h).sqrt().recip()).collect();
        let amps = (0..2)
            .flat_map(|f| {
                let comp = self.component(f);
                let weights = &weights;
                (0..1usize << n).map(move |idx| {
                    let h = idx.count_ones() as usize;
                    comp[h] * weights[h]
                })
            })
            .collect();
        Ok(Self { field: self.field, atoms: AtomBasis::Product, n_atoms: n, amps })
    }

    fn require_same_space(&self, other: &AtomFieldKet) -> Result<()> {
        if self.field != other.field || self.atoms != other.atoms || self.n_atoms != other.n_atoms {
            return Err(Error::domain(MODULE, "kets live on different spaces"));
        }
        Ok(())
    }

    fn require(&self, field: FieldBasis, atoms: AtomBasis) -> Result<()> {
        if self.field != field || self.atoms != atoms {
            return Err(Error::domain(
                MODULE,
                format!("expected {field:?} field with {atoms:?} atoms, got {:?} with {:?}", self.field, self.atoms),
            ));
        }
        Ok(())
    }
}

fn check_qubit(a: C64, b: C64) -> Result<()> {
    let n2 = a.norm_sqr() + b.norm_sqr();
    if (n2 - 1.0).abs() > NORM_TOL {
        return Err(Error::domain(MODULE, format!("|a|^2 + |b|^2 = {n2} must equal 1")));
    }
    Ok(())
}

/// `(u, w) -> (u cos - w sin, u sin + w cos)`.
fn rotate(u: C64, w: C64, theta: f64) -> (C64, C64) {
    let (s, c) = theta.sin_cos();
    (u * c - w * s, u * s + w * c)
}

/// `c |1>_f |0;N> + e |0>_f |W>` rotated by `theta = g t sqrt(N)`.
pub fn single_photon_rotation(c: C64, e: C64, n: usize, theta: f64) -> Result<AtomFieldKet> {
    check_qubit(c, e)?;
    if n == 0 {
        return Err(Error::domain(MODULE, "an ensemble needs at least one atom"));
    }
    let (c1, e1) = rotate(c, e, theta);
    let mut amps = vec![zero(); 2 * (n + 1)];
    amps[n + 1] = c1;
    amps[1] = e1;
    AtomFieldKet::new(FieldBasis::Cavity, AtomBasis::Symmetric, n, amps)
}

/// Single-photon exchange applied to a state in the span of
/// `|0>|D_0>`, `|1>|D_0>` and `|0>|D_1>`; `theta = g t sqrt(N)`.
pub fn evolve_single_photon(state: &AtomFieldKet, theta: f64) -> Result<AtomFieldKet> {
    state.require(FieldBasis::Cavity, AtomBasis::Symmetric)?;
    let n = state.n_atoms;
    let leak: f64 = (2..=n).map(|h| state.amp(0, h).norm_sqr()).sum::<f64>()
        + (1..=n).map(|h| state.amp(1, h).norm_sqr()).sum::<f64>();
    if leak > NORM_TOL {
        return Err(Error::domain(
            MODULE,
            format!("weight {leak:.3e} outside the single-excitation subspace"),
        ));
    }
    let (c1, e1) = rotate(state.amp(1, 0), state.amp(0, 1), theta);
    let mut amps = vec![zero(); 2 * (n + 1)];
    amps[0] = state.amp(0, 0);
    amps[n + 1] = c1;
    amps[1] = e1;
    AtomFieldKet::new(FieldBasis::Cavity, AtomBasis::Symmetric, n, amps)
}

/// Prefactor multiplying `sin(theta_h) |10>|h+1;N>` for an `|01>|h;N>` input,
/// with unnormalized Dicke kets.
pub fn ladder_up_prefactor(n: usize, h: usize) -> f64 {
    (((h + 1) as f64) / ((n - h) as f64)).sqrt()
}

/// Prefactor multiplying `-sin(theta'_h) |01>|h-1;N>` for an `|10>|h;N>` input,
/// with unnormalized Dicke kets.
pub fn ladder_down_prefactor(n: usize, h: usize) -> f64 {
    (((n - h + 1) as f64) / (h as f64)).sqrt()
}

/// `(alpha |01> + beta |10>) |D_h>` evolved for dimensionless time `tf` under
/// two-mode mixing, via the unnormalized-ket ladder relation.
pub fn dicke_ladder_step(alpha: C64, beta: C64, h: usize, n: usize, tf: f64) -> Result<AtomFieldKet> {
    check_qubit(alpha, beta)?;
    if n == 0 || h > n {
        return Err(Error::domain(MODULE, format!("h = {h} must lie in 0..={n} with N >= 1")));
    }
    let d = n + 1;
    let mut amps = vec![zero(); 2 * d];
    let theta = tf * (((h + 1) * (n - h)) as f64).sqrt();
    let theta_p = tf * ((h * (n - h + 1)) as f64).sqrt();

    amps[h] += alpha * theta.cos();
    if h < n {
        // |h;N> = sqrt(C(N,h)) |D_h>
        let to_norm = (binomial(n, h + 1) / binomial(n, h)).sqrt();
        amps[d + h + 1] += alpha * (ladder_up_prefactor(n, h) * to_norm * theta.sin());
    }
    amps[d + h] += beta * theta_p.cos();
    if h > 0 {
        let to_norm = (binomial(n, h - 1) / binomial(n, h)).sqrt();
        amps[h - 1] -= beta * (ladder_down_prefactor(n, h) * to_norm * theta_p.sin());
    }
    AtomFieldKet::new(FieldBasis::TwoMode, AtomBasis::Symmetric, n, amps)
}

/// Two-mode mixing for dimensionless time `tf` on any single-photon two-mode
/// state with symmetric atoms.
pub fn mode_mixing_evolution(state: &AtomFieldKet, tf: f64) -> Result<AtomFieldKet> {
    state.require(FieldBasis::TwoMode, AtomBasis::Symmetric)?;
    let n = state.n_atoms;
    let d = n + 1;
    let mut amps = state.amps.clone();
    for h in 0..n {
        let theta = tf * raising_factor(n, h);
        let (u, w) = rotate(amps[h], amps[d + h + 1], theta);
        amps[h] = u;
        amps[d + h + 1] = w;
    }
    AtomFieldKet::new(FieldBasis::TwoMode, AtomBasis::Symmetric, n, amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SwapDirection {
    Write,
    Read,
}

/// Quantum-memory transfer between a cavity photon and the ensemble.
///
/// `Write` maps `(alpha |1> + beta |0>) |0;N>` to `|0> (alpha |W> + beta |0;N>)`
/// with `theta = pi/2`. `Read` starts from the written state and completes the
/// cycle with `theta = 3 pi/2`, returning the photon without a sign flip.
pub fn memory_swap(alpha: C64, beta: C64, n: usize, direction: SwapDirection) -> Result<AtomFieldKet> {
    check_qubit(alpha, beta)?;
    if n == 0 {
        return Err(Error::domain(MODULE, "an ensemble needs at least one atom"));
    }
    let mut amps = vec![zero(); 2 * (n + 1)];
    amps[0] = beta;
    let theta = match direction {
        SwapDirection::Write => {
            amps[n + 1] = alpha;
            FRAC_PI_2
        }
        SwapDirection::Read => {
            amps[1] = alpha;
            3.0 * FRAC_PI_2
        }
    };
    let start = AtomFieldKet::new(FieldBasis::Cavity, AtomBasis::Symmetric, n, amps)?;
    evolve_single_photon(&start, theta)
}

/// Atoms at positions `x_p` on a line, illuminated with wavenumber `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialArray {
    positions: Vec<f64>,
    k: f64,
}

impl SpatialArray {
    pub fn new(positions: Vec<f64>, k: f64) -> Result<Self> {
        if positions.is_empty() {
            return Err(Error::domain(MODULE, "an array needs at least one atom"));
        }
        if !k.is_finite() || positions.iter().any(|x| !x.is_finite()) {
            return Err(Error::domain(MODULE, "positions and wavenumber must be finite"));
        }
        Ok(Self { positions, k })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `exp(i k x_p)` per site.
    pub fn phases(&self) -> Vec<C64> {
        self.positions.iter().map(|x| C64::from_polar(1.0, self.k * x)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialArrayState {
    pub ket: ProductKet,
    pub theta_used: f64,
    pub phase_sum: C64,
    pub is_dicke: bool,
}

/// Atomic state written by one photon at `theta = pi/2`:
/// `(1/sqrt(N)) sum_p exp(i k x_p) |0..1_p..0>`.
pub fn spatial_array_state(arr: &SpatialArray) -> Result<SpatialArrayState> {
    let n = arr.len();
    if n > PRODUCT_CAP {
        return Err(Error::capacity(
            MODULE,
            format!("{n} sites exceed the product-basis cap of {PRODUCT_CAP}"),
        ));
    }
    let phases = arr.phases();
    let scale = (n as f64).sqrt().recip();
    let mut amps = vec![zero(); 1usize << n];
    for (p, ph) in phases.iter().enumerate() {
        amps[1usize << (n - 1 - p)] = ph * scale;
    }
    let phase_sum: C64 = phases.iter().sum();
    Ok(SpatialArrayState {
        ket: ProductKet::new(n, amps)?,
        theta_used: FRAC_PI_2,
        phase_sum,
        is_dicke: phase_sum.norm() < 1e-10,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    /// Real generator of two-mode mixing on the field-major `2 (N+1)` space.
    fn mixing_generator(n: usize) -> DMatrix<f64> {
        let d = n + 1;
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        for h in 0..n {
            let f = (((h + 1) * (n - h)) as f64).sqrt();
            // d/dt psi = (a^dag b S - a b^dag S^dag) psi
            m[(d + h + 1, h)] = f;
            m[(h, d + h + 1)] = -f;
        }
        m
    }

    fn dense_evolve(n: usize, tf: f64, amps: &[C64]) -> Vec<C64> {
        let u = (mixing_generator(n) * tf).exp();
        (0..amps.len()).map(|i| (0..amps.len()).map(|j| amps[j] * u[(i, j)]).sum()).collect()
    }

    fn max_diff(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn single_photon_examples() {
        let k = single_photon_rotation(c(1.0), c(0.0), 5, 0.0).unwrap();
        assert_eq!(k.amp(1, 0), c(1.0));

        let k = single_photon_rotation(c(1.0), c(0.0), 7, FRAC_PI_2).unwrap();
        assert!((k.amp(0, 1) - c(1.0)).norm() < 1e-15);
        assert!(k.amp(1, 0).norm() < 1e-15);

        let k = single_photon_rotation(c(1.0), c(0.0), 4, PI / 4.0).unwrap();
        assert!((k.amp(1, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((k.amp(0, 1).re - FRAC_1_SQRT_2).abs() < 1e-15);

        assert!(single_photon_rotation(c(1.0), c(1.0), 4, 0.1).is_err());
    }

    #[test]
    fn evolve_single_photon_rejects_leakage() {
        let mut amps = vec![c(0.0); 8];
        amps[2] = c(1.0);
        let k = AtomFieldKet::new(FieldBasis::Cavity, AtomBasis::Symmetric, 3, amps).unwrap();
        assert!(matches!(evolve_single_photon(&k, 0.3), Err(Error::Domain { .. })));
    }

    #[test]
    fn ladder_step_examples() {
        let k = dicke_ladder_step(c(1.0), c(0.0), 0, 5, FRAC_PI_2 / 5f64.sqrt()).unwrap();
        assert!((k.amp(1, 1) - c(1.0)).norm() < 1e-15);

        // theta'_1 = tf sqrt(2) for N = 2
        let k = dicke_ladder_step(c(0.0), c(1.0), 1, 2, FRAC_PI_2 / 2f64.sqrt()).unwrap();
        assert!((k.amp(0, 0) + c(1.0)).norm() < 1e-15);
        assert!((k.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ladder_prefactors_preserve_norm() {
        for n in 1..=10 {
            for h in 0..=n {
                for tf in [0.1, 0.37, 1.3] {
                    let a = C64::new(0.6, 0.1);
                    let b = C64::new(0.0, (1.0 - a.norm_sqr()).sqrt());
                    let k = dicke_ladder_step(a, b, h, n, tf).unwrap();
                    assert!((k.norm() - 1.0).abs() < 1e-12, "N={n} h={h}");
                }
            }
        }
    }

    #[test]
    fn ladder_step_matches_dense_exponential() {
        let (n, h, tf) = (2, 1, 0.3);
        let (a, b) = (c(0.8), C64::new(0.0, 0.6));
        let k = dicke_ladder_step(a, b, h, n, tf).unwrap();
        let mut amps = vec![c(0.0); 2 * (n + 1)];
        amps[h] = a;
        amps[n + 1 + h] = b;
        assert!(max_diff(k.amps(), &dense_evolve(n, tf, &amps)) < 1e-12);
    }

    #[test]
    fn mode_mixing_matches_dense_exponential() {
        let n = 3;
        let raw: Vec<C64> = (0..8).map(|i| C64::new(0.1 * i as f64 + 0.2, 0.05 * (i as f64 - 3.0))).collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<C64> = raw.iter().map(|a| a / norm).collect();
        let k = AtomFieldKet::new(FieldBasis::TwoMode, AtomBasis::Symmetric, n, amps.clone()).unwrap();
        let out = mode_mixing_evolution(&k, 0.2).unwrap();
        assert!((out.norm() - 1.0).abs() < 1e-12);
        assert!(max_diff(out.amps(), &dense_evolve(n, 0.2, &amps)) < 1e-12);
        assert_eq!(mode_mixing_evolution(&k, 0.0).unwrap(), k);
    }

    #[test]
    fn mode_mixing_reduces_to_ladder_step() {
        for n in 1..=5 {
            for h in 0..=n {
                let mut amps = vec![c(0.0); 2 * (n + 1)];
                amps[h] = c(1.0);
                let k = AtomFieldKet::new(FieldBasis::TwoMode, AtomBasis::Symmetric, n, amps).unwrap();
                let a = mode_mixing_evolution(&k, 0.41).unwrap();
                let b = dicke_ladder_step(c(1.0), c(0.0), h, n, 0.41).unwrap();
                assert!(max_diff(a.amps(), b.amps()) < 1e-14);
            }
        }
    }

    #[test]
    fn mode_mixing_rejects_cavity_field() {
        let k = single_photon_rotation(c(1.0), c(0.0), 2, 0.0).unwrap();
        assert!(mode_mixing_evolution(&k, 0.1).is_err());
    }

    #[test]
    fn memory_round_trip() {
        let (a, b) = (C64::new(0.3, 0.4), C64::new(0.0, -(0.75f64).sqrt()));
        let n = 6;
        let w = memory_swap(a, b, n, SwapDirection::Write).unwrap();
        assert!((w.amp(0, 1) - a).norm() < 1e-15);
        assert!((w.amp(0, 0) - b).norm() < 1e-15);
        assert!(w.field_population(1) < 1e-30);

        let r = memory_swap(a, b, n, SwapDirection::Read).unwrap();
        let mut start = vec![c(0.0); 2 * (n + 1)];
        start[n + 1] = a;
        start[0] = b;
        let start = AtomFieldKet::new(FieldBasis::Cavity, AtomBasis::Symmetric, n, start).unwrap();
        assert!((r.fidelity(&start).unwrap() - 1.0).abs() < 1e-12);

        let idle = memory_swap(c(0.0), c(1.0), n, SwapDirection::Write).unwrap();
        assert_eq!(idle.amp(0, 0), c(1.0));
    }

    #[test]
    fn spatial_examples() {
        let s = spatial_array_state(&SpatialArray::new(vec![0.0, 1.0, 2.5], 0.0).unwrap()).unwrap();
        assert!(!s.is_dicke);
        assert!((s.phase_sum - c(3.0)).norm() < 1e-15);
        let w = crate::symmetric::make_dicke(3, 1).unwrap().expand_to_product().unwrap();
        assert!(max_diff(s.ket.amps(), w.amps()) < 1e-15);

        let s = spatial_array_state(&SpatialArray::new(vec![0.0, PI], 1.0).unwrap()).unwrap();
        assert!(s.is_dicke);
        assert!((s.ket.amps()[0b10] - c(FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((s.ket.amps()[0b01] + c(FRAC_1_SQRT_2)).norm() < 1e-15);

        let s = spatial_array_state(&SpatialArray::new(vec![1.0, 2.0, 3.0, 4.0], PI / 2.0).unwrap()).unwrap();
        assert!(s.is_dicke);

        let big = SpatialArray::new(vec![0.0; PRODUCT_CAP + 1], 1.0).unwrap();
        assert!(matches!(spatial_array_state(&big), Err(Error::Capacity { .. })));
        assert!(SpatialArray::new(vec![], 1.0).is_err());
    }

    #[test]
    fn product_expansion_keeps_norm() {
        let k = dicke_ladder_step(c(0.6), c(0.8), 2, 4, 0.7).unwrap();
        let p = k.to_product_atoms().unwrap();
        assert_eq!(p.atom_dim(), 16);
        assert!((p.norm() - 1.0).abs() < 1e-12);
    }
}
