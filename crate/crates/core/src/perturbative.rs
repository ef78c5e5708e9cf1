//! Second-order perturbative results for ground-state atoms driven by weak
//! light of arbitrary photon statistics.
//!
//! With `kappa(t) = (1 - exp(-gamma_perp t)) / gamma_perp`, the state of any
//! group of `M` atoms is
//!
//! ```text
//! rho_A(M) = |0><0| (1 - M kappa^2 <B^dagger B>)
//!          + kappa   (<B>   |1;M><0| + h.c.)
//!          + kappa^2 (<B^2> |2;M><0| + h.c.)
//!          + kappa^2 <B^dagger B> |1;M><1;M|
//! ```
//!
//! (Dicke kets unnormalized), independent of the ensemble size `N`. The
//! closed form holds for purely radiative decay, `gamma_perp = gamma / 2`.

use nalgebra::{DMatrix, Matrix2};

use crate::density::{DensityMatrix, PptVerdict};
use crate::field::{annihilation, FieldMoments};
use crate::symmetric::DENSITY_QUBIT_CAP;
use crate::{Error, Result, C64};

const MODULE: &str = "perturbative-solver";

/// Ratio above which the weak-field expansion is reported as marginal.
pub const SATURATION_WARN: f64 = 0.1;

/// Relaxation rates in units of `gamma_perp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayParams {
    gamma_down: f64,
    gamma_up: f64,
    kappa_deph: f64,
}

impl DecayParams {
    pub fn new(gamma_down: f64, gamma_up: f64, kappa_deph: f64) -> Result<Self> {
        for (name, v) in [("gamma_down", gamma_down), ("gamma_up", gamma_up), ("kappa_deph", kappa_deph)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::domain(MODULE, format!("{name} = {v} must be finite and >= 0")));
            }
        }
        Ok(Self { gamma_down, gamma_up, kappa_deph })
    }

    /// Pure spontaneous emission at rate `gamma`.
    pub fn radiative(gamma: f64) -> Result<Self> {
        Self::new(gamma, 0.0, 0.0)
    }

    /// Radiative decay with `gamma_perp = 1`, i.e. `gamma = 2`.
    pub fn unit_radiative() -> Self {
        Self { gamma_down: 2.0, gamma_up: 0.0, kappa_deph: 0.0 }
    }

    pub fn gamma_down(&self) -> f64 {
        self.gamma_down
    }

    pub fn gamma_up(&self) -> f64 {
        self.gamma_up
    }

    pub fn kappa_deph(&self) -> f64 {
        self.kappa_deph
    }

    /// Longitudinal rate `gamma_down + gamma_up`.
    pub fn gamma(&self) -> f64 {
        self.gamma_down + self.gamma_up
    }

    /// Transverse rate `gamma / 2 + kappa_deph`.
    pub fn gamma_perp(&self) -> f64 {
        self.gamma() / 2.0 + self.kappa_deph
    }

    pub fn is_purely_radiative(&self) -> bool {
        self.kappa_deph == 0.0
    }
}

/// `kappa(t) = (1 - exp(-gamma_perp t)) / gamma_perp`; `t = inf` gives `1/gamma_perp`.
pub fn kappa(t: f64, gamma_perp: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::domain(MODULE, format!("time {t} must be >= 0")));
    }
    if !(gamma_perp > 0.0) {
        return Err(Error::domain(MODULE, "gamma_perp must be positive"));
    }
    Ok(-(-gamma_perp * t).exp_m1() / gamma_perp)
}

/// Secular coefficient in the printed form
/// `gamma_perp^-1 { gamma^-2 [gamma t + 1 - exp(-gamma t)] - kappa^2 / 2 }`.
///
/// The oracle does not reproduce the atomic-ground field block with this
/// coefficient; see [`cal_k_integrated`].
pub fn cal_k(t: f64, params: &DecayParams) -> Result<f64> {
    let gp = params.gamma_perp();
    let g = params.gamma();
    if !(g > 0.0) {
        return Err(Error::domain(MODULE, "the secular coefficient needs gamma > 0"));
    }
    let k = kappa(t, gp)?;
    Ok(((g * t - (-g * t).exp_m1()) / (g * g) - k * k / 2.0) / gp)
}

/// `(1/2) int_0^t kappa(s)^2 ds`, the coefficient that closes the second-order
/// equations for the field block with all atoms in the ground state.
/// Same `t / (gamma gamma_perp)` asymptote as [`cal_k`] for radiative decay.
pub fn cal_k_integrated(t: f64, params: &DecayParams) -> Result<f64> {
    let gp = params.gamma_perp();
    let k = kappa(t, gp)?;
    // int kappa^2 = (t - 2 kappa + (1 - e^{-2 gp t}) / (2 gp)) / gp^2
    let two = -(-2.0 * gp * t).exp_m1() / (2.0 * gp);
    Ok((t - 2.0 * k + two) / (2.0 * gp * gp))
}

/// Which secular coefficient [`ground_field_block`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SecularForm {
    Printed,
    Integrated,
}

/// Second-order field operator `<0..0| rho |0..0>` (all atoms in the ground
/// state) for an initial field `rho_f` in the Fock basis and `B = g a`.
pub fn ground_field_block(
    n_atoms: usize,
    rho_f: &DensityMatrix,
    g: f64,
    t: f64,
    params: &DecayParams,
    form: SecularForm,
) -> Result<DMatrix<C64>> {
    require_radiative(params)?;
    let k = kappa(t, params.gamma_perp())?;
    let secular = match form {
        SecularForm::Printed => cal_k(t, params)?,
        SecularForm::Integrated => cal_k_integrated(t, params)?,
    };
    let b = annihilation(rho_f.dim() - 1).scale(g);
    let rf = rho_f.matrix();
    let absorb = b.adjoint() * &b * rf;
    let scatter = &b * rf * b.adjoint();
    let n = n_atoms as f64;
    let loss = &absorb + absorb.adjoint() - scatter.scale(2.0);
    Ok(rf - loss.scale(n * params.gamma() * secular) - (&absorb + absorb.adjoint()).scale(0.5 * n * k * k))
}

/// Reduced state of `M` atoms together with its perturbative bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbativeAtomState {
    pub m_atoms: usize,
    pub rho: DensityMatrix,
    /// Weak-field ratio `n kappa(t)^2 <B^dagger B>` with `n` the atom count
    /// the state was built for.
    pub validity: f64,
    pub saturation_warning: bool,
    pub order_note: &'static str,
}

impl PerturbativeAtomState {
    /// `c * validity^2`, the size of the first neglected order.
    pub fn ppt_threshold(&self, c: f64) -> f64 {
        c * self.validity * self.validity
    }

    /// PPT verdict with the default threshold `validity^2`.
    pub fn ppt_verdict(&self, subsystem: usize) -> Result<PptVerdict> {
        self.rho.ppt_verdict(subsystem, self.ppt_threshold(1.0))
    }
}

const ORDER_NOTE: &str = "entries exact to O(kappa^2 <B B>); trace exact";

/// Closed-form reduced state of `M` atoms at time `t` (`f64::INFINITY` for the
/// steady state).
pub fn rho_atoms(
    m: usize,
    moments: &FieldMoments,
    t: f64,
    params: &DecayParams,
) -> Result<PerturbativeAtomState> {
    rho_atoms_in_ensemble(m, m, moments, t, params)
}

/// As [`rho_atoms`] for `M` atoms drawn from an ensemble of `n_total`. The
/// matrix does not depend on `n_total`; only the validity ratio does.
pub fn rho_atoms_in_ensemble(
    n_total: usize,
    m: usize,
    moments: &FieldMoments,
    t: f64,
    params: &DecayParams,
) -> Result<PerturbativeAtomState> {
    if m == 0 || m > n_total {
        return Err(Error::domain(MODULE, format!("group size M = {m} must lie in 1..={n_total}")));
    }
    if m > DENSITY_QUBIT_CAP {
        return Err(Error::capacity(MODULE, format!("M = {m} exceeds {DENSITY_QUBIT_CAP} qubits")));
    }
    moments.validate()?;
    require_radiative(params)?;
    let k = kappa(t, params.gamma_perp())?;
    let x = k * k * moments.photon_flux();
    let validity = n_total as f64 * x;
    if validity > 1.0 {
        return Err(Error::out_of_model(
            MODULE,
            format!("weak-field ratio {validity:.3e} exceeds 1; second order is not valid"),
        ));
    }

    let dim = 1usize << m;
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    let coh1 = moments.mean_b * k;
    let coh2 = moments.mean_b2 * (k * k);
    mat[(0, 0)] = C64::new(1.0 - m as f64 * x, 0.0);
    let singles: Vec<usize> = (0..m).map(|s| 1 << s).collect();
    for &i in &singles {
        mat[(i, 0)] = coh1;
        mat[(0, i)] = coh1.conj();
        for &j in &singles {
            mat[(i, j)] = C64::new(x, 0.0);
        }
    }
    for idx in (0..dim).filter(|i| i.count_ones() == 2) {
        mat[(idx, 0)] = coh2;
        mat[(0, idx)] = coh2.conj();
    }
    Ok(PerturbativeAtomState {
        m_atoms: m,
        rho: DensityMatrix::new(vec![2; m], mat)?,
        validity,
        saturation_warning: validity > SATURATION_WARN,
        order_note: ORDER_NOTE,
    })
}

/// Normally ordered quadrature variance
/// `D_N = <X^2> - <X>^2 - <[B, B^dagger]>` with `X = B^dagger e^{i theta} + h.c.`.
pub fn normally_ordered_variance(moments: &FieldMoments, theta: f64) -> f64 {
    let phase = C64::from_polar(1.0, -2.0 * theta);
    let anomalous = (moments.mean_b2 - moments.mean_b * moments.mean_b) * phase;
    2.0 * anomalous.re + 2.0 * (moments.photon_flux() - moments.mean_b.norm_sqr())
}

/// Covariance of the dipoles `d_k = mu (s01 + s10)` of two atoms,
/// `mu^2 kappa(t)^2 D_N(theta)`.
pub fn dipole_covariance(
    moments: &FieldMoments,
    mu: f64,
    t: f64,
    params: &DecayParams,
    theta: f64,
) -> Result<f64> {
    moments.validate()?;
    require_radiative(params)?;
    let k = kappa(t, params.gamma_perp())?;
    Ok(mu * mu * k * k * normally_ordered_variance(moments, theta))
}

/// Closed-form covariance `<c1 c2> - <c1><c2>` of two single-atom Hermitian
/// observables given the field moments and `kappa`. Exact for observables
/// with vanishing diagonal; otherwise accurate to second order.
pub fn covariance_closed_form(moments: &FieldMoments, k: f64, c1: &Matrix2<C64>, c2: &Matrix2<C64>) -> f64 {
    let anomalous = moments.mean_b2 - moments.mean_b * moments.mean_b;
    let normal = moments.mean_bdag_b - moments.mean_bdag * moments.mean_b;
    let term = anomalous * c1[(0, 1)] * c2[(0, 1)] + normal * c1[(1, 0)] * c2[(0, 1)];
    k * k * 2.0 * term.re
}

/// `<c1 ⊗ c2> - <c1 ⊗ 1><1 ⊗ c2>` evaluated on a two-qubit state.
pub fn two_atom_covariance(rho: &DensityMatrix, c1: &Matrix2<C64>, c2: &Matrix2<C64>) -> Result<f64> {
    if rho.dims() != [2, 2] {
        return Err(Error::domain(MODULE, "expected a two-qubit state"));
    }
    let to_dyn = |m: &Matrix2<C64>| DMatrix::from_fn(2, 2, |r, c| m[(r, c)]);
    let id = DMatrix::<C64>::identity(2, 2);
    let joint = rho.expectation(&to_dyn(c1).kronecker(&to_dyn(c2)))?;
    let first = rho.expectation(&to_dyn(c1).kronecker(&id))?;
    let second = rho.expectation(&id.kronecker(&to_dyn(c2)))?;
    Ok((joint - first * second).re)
}

/// `mu (s01 + s10)` in the `{|0>, |1>}` basis.
pub fn dipole_operator(mu: f64) -> Matrix2<C64> {
    let z = C64::new(0.0, 0.0);
    let m = C64::new(mu, 0.0);
    Matrix2::new(z, m, m, z)
}

/// Closed-form spectrum of the partially transposed steady two-atom state in
/// weak squeezed light: `{0, 1 - 2 sinh^2 r / n_s, +- e^{+-r} sinh r / n_s}`,
/// returned in ascending order.
pub fn squeezed_pt_eigs(r: f64, n_s: f64) -> Result<[f64; 4]> {
    if !(r > 0.0) {
        return Err(Error::domain(MODULE, format!("squeezing r = {r} must be > 0")));
    }
    if !(n_s > 0.0) {
        return Err(Error::domain(MODULE, "saturation parameter n_s must be positive"));
    }
    let s = r.sinh();
    let mut eigs = [
        0.0,
        1.0 - 2.0 * s * s / n_s,
        r.exp() * s / n_s,
        -(-r).exp() * s / n_s,
    ];
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Steady two-atom state in squeezed vacuum with `g = 1/sqrt(n_s)`,
/// `gamma_perp = 1`.
pub fn squeezed_two_atom_state(r: f64, n_s: f64) -> Result<PerturbativeAtomState> {
    if !(n_s > 0.0) {
        return Err(Error::domain(MODULE, "saturation parameter n_s must be positive"));
    }
    let g = n_s.sqrt().recip();
    let moments = crate::field::moments_of(&crate::field::FieldSpec::SqueezedVacuum { r }, g)?;
    rho_atoms(2, &moments, f64::INFINITY, &DecayParams::unit_radiative())
}

/// Exact spectrum of the partially transposed Gaussian-light state
/// `a |00><00| + b (|01> + |10>)(<01| + <10|)`, `a = 1 - 2b`, ascending.
pub fn gaussian_pt_eigs(b: f64) -> [f64; 4] {
    let a = 1.0 - 2.0 * b;
    let root = (a * a / 4.0 + b * b).sqrt();
    let mut eigs = [b, b, a / 2.0 + root, a / 2.0 - root];
    eigs.sort_by(f64::total_cmp);
    eigs
}

fn require_radiative(params: &DecayParams) -> Result<()> {
    if !params.is_purely_radiative() || params.gamma_up() != 0.0 {
        return Err(Error::out_of_model(
            MODULE,
            "closed forms assume purely radiative decay from a ground-state ensemble \
             (gamma_up = 0, kappa_deph = 0)",
        ));
    }
    if !(params.gamma() > 0.0) {
        return Err(Error::domain(MODULE, "gamma must be positive"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{moments_of, FieldSpec};

    const INF: f64 = f64::INFINITY;

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(0.0, 1.0).unwrap(), 0.0);
        assert!((kappa(INF, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((kappa(2f64.ln(), 1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(kappa(-1.0, 1.0), Err(Error::Domain { .. })));
        let ts = [0.0, 0.1, 0.5, 1.0, 3.0, 10.0];
        assert!(ts.windows(2).all(|w| kappa(w[0], 2.0).unwrap() < kappa(w[1], 2.0).unwrap()));
    }

    #[test]
    fn cal_k_examples() {
        let p = DecayParams::unit_radiative();
        assert_eq!(cal_k(0.0, &p).unwrap(), 0.0);
        // (1/4)(2 + 1 - e^-2) - (1 - e^-1)^2 / 2, evaluated by hand.
        let k1 = 1.0 - (-1.0f64).exp();
        let expected = 0.25 * (3.0 - (-2.0f64).exp()) - k1 * k1 / 2.0;
        assert!((cal_k(1.0, &p).unwrap() - expected).abs() < 1e-15);
        assert!((cal_k(1.0, &p).unwrap() - 0.5163780).abs() < 1e-7);
        let slope = cal_k(201.0, &p).unwrap() - cal_k(200.0, &p).unwrap();
        assert!((slope - 0.5).abs() < 1e-12);
        assert!(cal_k(1.0, &DecayParams::new(0.0, 0.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn cal_k_integrated_matches_quadrature() {
        let p = DecayParams::unit_radiative();
        for &t in &[0.0, 0.3, 1.0, 4.0] {
            let n = 20_000;
            let h = t / n as f64;
            // Simpson's rule on kappa(s)^2 / 2.
            let f = |s: f64| kappa(s, 1.0).unwrap().powi(2) / 2.0;
            let mut acc = f(0.0) + f(t);
            for i in 1..n {
                acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
            }
            let quad = acc * h / 3.0;
            assert!((cal_k_integrated(t, &p).unwrap() - quad).abs() < 1e-12, "t={t}");
        }
        let slope = cal_k_integrated(201.0, &p).unwrap() - cal_k_integrated(200.0, &p).unwrap();
        assert!((slope - 0.5).abs() < 1e-12);
    }

    #[test]
    fn vacuum_gives_ground_projector() {
        let st = rho_atoms(3, &FieldMoments::vacuum(0.1), INF, &DecayParams::unit_radiative()).unwrap();
        assert_eq!(st.rho.get(0, 0), C64::new(1.0, 0.0));
        assert_eq!(st.rho.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn trace_is_exact_and_n_independent() {
        let m = moments_of(&FieldSpec::Coherent { alpha: C64::new(0.3, -0.2) }, 0.1).unwrap();
        let p = DecayParams::unit_radiative();
        for mm in 1..=5 {
            let a = rho_atoms_in_ensemble(5, mm, &m, 2.0, &p).unwrap();
            let b = rho_atoms_in_ensemble(50, mm, &m, 2.0, &p).unwrap();
            assert_eq!(a.rho, b.rho);
            assert!(b.validity > a.validity);
            assert!((a.rho.trace() - C64::new(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn squeezed_steady_state_entries() {
        let st = squeezed_two_atom_state(0.1, 100.0).unwrap();
        let r = 0.1f64;
        let x = r.sinh().powi(2) / 100.0;
        let y = r.sinh() * r.cosh() / 100.0;
        assert!((st.rho.get(0, 0).re - (1.0 - 2.0 * x)).abs() < 1e-15);
        assert!((st.rho.get(3, 0).re - y).abs() < 1e-15);
        assert!((st.rho.get(0, 3).re - y).abs() < 1e-15);
        for (i, j) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            assert!((st.rho.get(i, j).re - x).abs() < 1e-15);
        }
        assert!(!st.saturation_warning);
    }

    #[test]
    fn gaussian_reduction() {
        let m = moments_of(&FieldSpec::Thermal { nbar: 0.7 }, 0.1).unwrap();
        let st = rho_atoms(2, &m, INF, &DecayParams::unit_radiative()).unwrap();
        let b: f64 = 0.01 * 0.7;
        let a = 1.0 - 2.0 * b;
        assert!((a + 2.0 * b - 1.0).abs() < 1e-15);
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        expected[(0, 0)] = C64::new(a, 0.0);
        for i in [1, 2] {
            for j in [1, 2] {
                expected[(i, j)] = C64::new(b, 0.0);
            }
        }
        assert!((st.rho.matrix() - expected).norm() < 1e-12);
    }

    #[test]
    fn coherent_field_has_no_dipole_correlation() {
        let m = moments_of(&FieldSpec::Coherent { alpha: C64::new(0.4, 0.3) }, 0.1).unwrap();
        let p = DecayParams::unit_radiative();
        for theta in [0.0, 0.4, 1.3] {
            assert!(dipole_covariance(&m, 1.0, INF, &p, theta).unwrap().abs() < 1e-15);
        }
        let st = rho_atoms(2, &m, INF, &p).unwrap();
        let d = dipole_operator(1.0);
        assert!(two_atom_covariance(&st.rho, &d, &d).unwrap().abs() < 1e-15);
        let vac = dipole_covariance(&FieldMoments::vacuum(1.0), 1.0, INF, &p, 0.0).unwrap();
        assert_eq!(vac, 0.0);
    }

    #[test]
    fn squeezed_quadrature_signs() {
        let m = moments_of(&FieldSpec::SqueezedVacuum { r: 0.1 }, 1.0).unwrap();
        let p = DecayParams::unit_radiative();
        let r = 0.1f64;
        let at0 = dipole_covariance(&m, 1.0, INF, &p, 0.0).unwrap();
        assert!((at0 - 2.0 * r.sinh() * r.exp()).abs() < 1e-14);
        let at90 = dipole_covariance(&m, 1.0, INF, &p, std::f64::consts::FRAC_PI_2).unwrap();
        assert!((at90 + 2.0 * r.sinh() * (-r).exp()).abs() < 1e-14);
        assert!(at90 < 0.0);
    }

    #[test]
    fn squeezed_pt_eig_examples() {
        let e = squeezed_pt_eigs(0.1, 100.0).unwrap();
        assert!((e[0] + 9.063462346100909e-4).abs() < 1e-15);
        let e = squeezed_pt_eigs(1e-9, 100.0).unwrap();
        for (x, y) in e.iter().zip([0.0, 0.0, 0.0, 1.0]) {
            assert!((x - y).abs() < 1e-9);
        }
        let e = squeezed_pt_eigs(0.05, 1000.0).unwrap();
        assert!((e[3] - (1.0 - 2e-3 * 0.05f64.sinh().powi(2))).abs() < 1e-15);
        assert!((e[3] - 0.999995).abs() < 1e-6);
        assert!(squeezed_pt_eigs(0.0, 100.0).is_err());
        assert!(squeezed_pt_eigs(-0.1, 100.0).is_err());
    }

    #[test]
    fn rejects_out_of_model_inputs() {
        let m = moments_of(&FieldSpec::Thermal { nbar: 200.0 }, 0.1).unwrap();
        let p = DecayParams::unit_radiative();
        assert!(matches!(rho_atoms(2, &m, INF, &p), Err(Error::OutOfModel { .. })));
        let deph = DecayParams::new(2.0, 0.0, 0.5).unwrap();
        assert!(!deph.is_purely_radiative());
        assert!((deph.gamma_perp() - 1.5).abs() < 1e-15);
        let small = moments_of(&FieldSpec::Thermal { nbar: 0.1 }, 0.1).unwrap();
        assert!(matches!(rho_atoms(2, &small, INF, &deph), Err(Error::OutOfModel { .. })));
        assert!(rho_atoms(3, &small, INF, &p).is_ok());
        assert!(rho_atoms_in_ensemble(2, 3, &small, INF, &p).is_err());
        assert!(DecayParams::new(-1.0, 0.0, 0.0).is_err());
    }
}
