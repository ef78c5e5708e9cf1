//! Brute-force master-equation integrator on the full space of `N` atoms
//! (`2^N` product states) times a Fock-truncated cavity mode.
//!
//! The generator is
//!
//! ```text
//! d rho / d tau = [theta, rho] + sum_a L_a rho,   theta = g (a S10 - a^dagger S01)
//! ```
//!
//! with per-atom channels: emission `sqrt(gamma_down) s01(a)`, incoherent pump
//! `sqrt(gamma_up) s10(a)` and pure dephasing `sqrt(2 kappa_deph) |1><1|_a`.
//! Individual decay breaks permutation symmetry, so nothing here is
//! restricted to the symmetric subspace.
//!
//! Basis ordering: atoms first (atom 0 most significant), then the field
//! level, i.e. subsystem dimensions `[2, .., 2, n_max + 1]`.

use nalgebra::DMatrix;

use crate::density::{hermitian_eigenvalues, DensityMatrix};
use crate::perturbative::DecayParams;
use crate::{Error, Result, C64};

const MODULE: &str = "lindblad-oracle";

pub const MAX_ATOMS: usize = 6;
pub const DEFAULT_DIM_CAP: usize = 128;

/// Steps between trace / Hermiticity / positivity checks.
pub const CHECK_INTERVAL: usize = 100;
pub const TRACE_TOL: f64 = 1e-8;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_FLOOR: f64 = -1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct JointModel {
    n_atoms: usize,
    n_max: usize,
    g: f64,
    params: DecayParams,
    dim_cap: usize,
}

impl JointModel {
    pub fn new(n_atoms: usize, n_max: usize, g: f64, params: DecayParams) -> Result<Self> {
        Self::with_dim_cap(n_atoms, n_max, g, params, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(
        n_atoms: usize,
        n_max: usize,
        g: f64,
        params: DecayParams,
        dim_cap: usize,
    ) -> Result<Self> {
        if n_atoms == 0 || n_max == 0 {
            return Err(Error::domain(MODULE, "need at least one atom and one photon level"));
        }
        if !(g >= 0.0 && g.is_finite()) {
            return Err(Error::domain(MODULE, format!("coupling g = {g} must be >= 0")));
        }
        if n_atoms > MAX_ATOMS {
            return Err(Error::capacity(MODULE, format!("{n_atoms} atoms exceed the limit of {MAX_ATOMS}")));
        }
        let model = Self { n_atoms, n_max, g, params, dim_cap };
        if model.dim() > dim_cap {
            return Err(Error::capacity(
                MODULE,
                format!("joint dimension {} exceeds the cap of {dim_cap}", model.dim()),
            ));
        }
        Ok(model)
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn params(&self) -> &DecayParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        (1 << self.n_atoms) * (self.n_max + 1)
    }

    pub fn dims(&self) -> Vec<usize> {
        let mut d = vec![2; self.n_atoms];
        d.push(self.n_max + 1);
        d
    }

    /// Flat index of atomic configuration `atom_bits` with `photons` in the mode.
    pub fn index(&self, atom_bits: usize, photons: usize) -> usize {
        atom_bits * (self.n_max + 1) + photons
    }

    fn atom_bit(&self, atom: usize) -> usize {
        1 << (self.n_atoms - 1 - atom)
    }

    /// Largest rate in the generator; bounds the admissible step.
    pub fn max_rate(&self) -> f64 {
        let coherent = self.g * ((self.n_atoms * self.n_max) as f64).sqrt();
        coherent.max(self.params.gamma()).max(2.0 * self.params.kappa_deph())
    }

    pub fn max_step(&self) -> f64 {
        let rate = self.max_rate();
        if rate > 0.0 {
            0.01 / rate
        } else {
            f64::INFINITY
        }
    }

    /// All atoms in the ground state, field in `field`.
    pub fn ground_atoms_with(&self, field: &DensityMatrix) -> Result<DensityMatrix> {
        if field.dims() != [self.n_max + 1] {
            return Err(Error::domain(MODULE, "field state does not match the Fock cutoff"));
        }
        let mut pops = vec![0.0; 1 << self.n_atoms];
        pops[0] = 1.0;
        let atoms = DensityMatrix::from_diagonal(vec![2; self.n_atoms], &pops)?;
        let joint = atoms.kron(field);
        DensityMatrix::new(self.dims(), joint.into_matrix())
    }

    pub fn build_generator(&self) -> Result<Generator> {
        let d = self.dim();
        let nf = self.n_max + 1;
        let mut hamiltonian = Vec::new();
        for bits in 0..1usize << self.n_atoms {
            for atom in 0..self.n_atoms {
                let bit = self.atom_bit(atom);
                if bits & bit != 0 {
                    continue;
                }
                for n in 1..nf {
                    let amp = self.g * (n as f64).sqrt();
                    let lo = self.index(bits, n);
                    let hi = self.index(bits | bit, n - 1);
                    // s10 a: photon absorbed, atom raised.
                    hamiltonian.push((hi, lo, amp));
                    // -s01 a^dagger: atom lowered, photon emitted.
                    hamiltonian.push((lo, hi, -amp));
                }
            }
        }

        let p = &self.params;
        let mut loss = vec![0.0; d];
        let mut jumps = Vec::new();
        for atom in 0..self.n_atoms {
            let bit = self.atom_bit(atom);
            let excited = |i: usize| (i / nf) & bit != 0;
            for (i, l) in loss.iter_mut().enumerate() {
                *l += if excited(i) {
                    p.gamma_down() + 2.0 * p.kappa_deph()
                } else {
                    p.gamma_up()
                };
            }
            let shift = bit * nf;
            if p.gamma_down() > 0.0 {
                let target = (0..d).map(|i| excited(i).then(|| i - shift)).collect();
                jumps.push(Jump { rate: p.gamma_down(), target });
            }
            if p.gamma_up() > 0.0 {
                let target = (0..d).map(|i| (!excited(i)).then(|| i + shift)).collect();
                jumps.push(Jump { rate: p.gamma_up(), target });
            }
            if p.kappa_deph() > 0.0 {
                let target = (0..d).map(|i| excited(i).then_some(i)).collect();
                jumps.push(Jump { rate: 2.0 * p.kappa_deph(), target });
            }
        }
        Ok(Generator { dim: d, hamiltonian, loss, jumps })
    }
}

/// Jump operator mapping each basis state to at most one other, with constant
/// amplitude `sqrt(rate)`.
#[derive(Debug, Clone)]
struct Jump {
    rate: f64,
    target: Vec<Option<usize>>,
}

/// Linear map `rho -> d rho / d tau` on `d x d` matrices.
#[derive(Debug, Clone)]
pub struct Generator {
    dim: usize,
    /// Nonzero entries `(row, col, value)` of the real anti-Hermitian `theta`.
    hamiltonian: Vec<(usize, usize, f64)>,
    /// Diagonal of `sum_k L_k^dagger L_k`.
    loss: Vec<f64>,
    jumps: Vec<Jump>,
}

impl Generator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dense `theta` (mainly for diagnostics and exponentials).
    pub fn hamiltonian_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.hamiltonian {
            m[(r, c)] += v;
        }
        m
    }

    pub fn apply(&self, rho: &DMatrix<C64>) -> DMatrix<C64> {
        let d = self.dim;
        let mut out = DMatrix::<C64>::zeros(d, d);
        for &(k, j, v) in &self.hamiltonian {
            // (theta rho)[k, :] += v rho[j, :];  (rho theta)[:, j] += v rho[:, k]
            for col in 0..d {
                out[(k, col)] += rho[(j, col)] * v;
            }
            for row in 0..d {
                out[(row, j)] -= rho[(row, k)] * v;
            }
        }
        for col in 0..d {
            for row in 0..d {
                out[(row, col)] -= rho[(row, col)] * (0.5 * (self.loss[row] + self.loss[col]));
            }
        }
        for jump in &self.jumps {
            for col in 0..d {
                let Some(tc) = jump.target[col] else { continue };
                for row in 0..d {
                    if let Some(tr) = jump.target[row] {
                        out[(tr, tc)] += rho[(row, col)] * jump.rate;
                    }
                }
            }
        }
        out
    }

    fn rk4_step(&self, rho: &DMatrix<C64>, h: f64) -> DMatrix<C64> {
        let k1 = self.apply(rho);
        let k2 = self.apply(&(rho + &k1 * C64::new(h / 2.0, 0.0)));
        let k3 = self.apply(&(rho + &k2 * C64::new(h / 2.0, 0.0)));
        let k4 = self.apply(&(rho + &k3 * C64::new(h, 0.0)));
        rho + (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4) * C64::new(h / 6.0, 0.0)
    }
}

/// Diagnostics gathered during [`evolve_observed`].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EvolutionReport {
    pub steps: usize,
    pub step: f64,
    pub checks: usize,
    pub max_trace_deviation: f64,
    pub max_hermitian_defect: f64,
    pub min_eigenvalue: f64,
}

/// Integrates from `rho0` to `t_final` with fixed RK4 steps no longer than `dt`.
pub fn evolve(model: &JointModel, rho0: &DensityMatrix, t_final: f64, dt: f64) -> Result<DensityMatrix> {
    evolve_observed(model, rho0, t_final, dt, |_, _| {}).map(|(rho, _)| rho)
}

/// As [`evolve`], calling `observe(t, rho)` at the start and after every step.
pub fn evolve_observed<F>(
    model: &JointModel,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    mut observe: F,
) -> Result<(DensityMatrix, EvolutionReport)>
where
    F: FnMut(f64, &DMatrix<C64>),
{
    if rho0.dims() != model.dims().as_slice() {
        return Err(Error::domain(
            MODULE,
            format!("initial state dims {:?} do not match model dims {:?}", rho0.dims(), model.dims()),
        ));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::domain(MODULE, format!("final time {t_final} must be finite and >= 0")));
    }
    let max_step = model.max_step();
    if !(dt > 0.0) || dt > max_step {
        return Err(Error::domain(
            MODULE,
            format!("step {dt} must be positive and at most 0.01 / max rate = {max_step:.3e}"),
        ));
    }
    let generator = model.build_generator()?;
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps > 0 { t_final / steps as f64 } else { 0.0 };
    let mut report = EvolutionReport { steps, step: h, min_eigenvalue: f64::INFINITY, ..Default::default() };

    let mut rho = rho0.matrix().clone();
    observe(0.0, &rho);
    check(&rho, &mut report)?;
    for s in 1..=steps {
        rho = generator.rk4_step(&rho, h);
        observe(s as f64 * h, &rho);
        if s % CHECK_INTERVAL == 0 || s == steps {
            check(&rho, &mut report)?;
        }
    }
    Ok((DensityMatrix::new(model.dims(), rho)?, report))
}

fn check(rho: &DMatrix<C64>, report: &mut EvolutionReport) -> Result<()> {
    report.checks += 1;
    let trace_dev = (rho.trace() - C64::new(1.0, 0.0)).norm();
    let herm = (rho - rho.adjoint()).camax();
    let min_eig = hermitian_eigenvalues(rho)[0];
    report.max_trace_deviation = report.max_trace_deviation.max(trace_dev);
    report.max_hermitian_defect = report.max_hermitian_defect.max(herm);
    report.min_eigenvalue = report.min_eigenvalue.min(min_eig);
    if trace_dev > TRACE_TOL {
        return Err(Error::invalid_state(MODULE, format!("trace drifted by {trace_dev:.3e}")));
    }
    if herm > HERMITIAN_TOL {
        return Err(Error::invalid_state(MODULE, format!("Hermiticity defect {herm:.3e}")));
    }
    if min_eig < POSITIVITY_FLOOR {
        return Err(Error::invalid_state(MODULE, format!("eigenvalue {min_eig:.3e} below floor")));
    }
    Ok(())
}

/// Traces out the field and every atom not in `keep`.
pub fn reduce_to_atoms(model: &JointModel, rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::domain(MODULE, "keep at least one atom"));
    }
    if let Some(&bad) = keep.iter().find(|&&a| a >= model.n_atoms()) {
        return Err(Error::domain(MODULE, format!("atom index {bad} out of range")));
    }
    rho.partial_trace(keep)
}

/// Field marginal.
pub fn reduce_to_field(model: &JointModel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    rho.partial_trace(&[model.n_atoms()])
}

/// Field operator `<0..0| rho |0..0>` with every atom in the ground state.
pub fn ground_block(model: &JointModel, rho: &DensityMatrix) -> DMatrix<C64> {
    let nf = model.n_max() + 1;
    rho.matrix().view((0, 0), (nf, nf)).into_owned()
}
