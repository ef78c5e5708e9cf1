//! Multipartite density matrices and the separability toolkit: partial
//! trace, partial transpose, Hermitian spectra, PPT verdicts and entropy.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::{Error, Result, C64};

const MODULE: &str = "separability";

/// Tolerance on `rho - rho^dagger` accepted at construction.
pub const HERMITIAN_TOL: f64 = 1e-10;

/// Eigenvalues in `[-ENTROPY_CLAMP, 0]` are treated as exact zeros.
pub const ENTROPY_CLAMP: f64 = 1e-10;

/// Eigenvalues below `-NEGATIVE_EIG_TOL` make a matrix an invalid state.
pub const NEGATIVE_EIG_TOL: f64 = 1e-8;

/// Complex Hermitian matrix over a tensor product of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: DMatrix<C64>,
}

impl DensityMatrix {
    /// Wraps `mat` after checking the subsystem layout and Hermiticity.
    /// The trace is not enforced here; see [`DensityMatrix::check_trace`].
    pub fn new(dims: Vec<usize>, mat: DMatrix<C64>) -> Result<Self> {
        check_dims(&dims)?;
        let total: usize = dims.iter().product();
        if mat.nrows() != total || mat.ncols() != total {
            return Err(Error::domain(
                MODULE,
                format!(
                    "matrix is {}x{} but subsystem dimensions {:?} require {}x{}",
                    mat.nrows(),
                    mat.ncols(),
                    dims,
                    total,
                    total
                ),
            ));
        }
        let asym = hermitian_defect(&mat);
        if asym > HERMITIAN_TOL {
            return Err(Error::invalid_state(
                MODULE,
                format!("matrix is not Hermitian (max |rho - rho^dagger| = {asym:.3e})"),
            ));
        }
        Ok(Self { dims, mat })
    }

    /// `|psi><psi|` for a ket laid out over `dims` (first subsystem most significant).
    pub fn from_pure(dims: Vec<usize>, psi: &[C64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let mat = &v * v.adjoint();
        Self::new(dims, mat)
    }

    /// Diagonal state with the given populations.
    pub fn from_diagonal(dims: Vec<usize>, populations: &[f64]) -> Result<Self> {
        let v: Vec<C64> = populations.iter().map(|&p| C64::new(p, 0.0)).collect();
        Self::new(dims, DMatrix::from_diagonal(&DVector::from_vec(v)))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.mat
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.mat[(row, col)]
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    /// Fails when `|tr(rho) - 1| > tol`.
    pub fn check_trace(&self, tol: f64) -> Result<()> {
        let dev = (self.trace() - C64::new(1.0, 0.0)).norm();
        if dev > tol {
            return Err(Error::invalid_state(
                MODULE,
                format!("trace deviates from 1 by {dev:.3e} (tolerance {tol:.1e})"),
            ));
        }
        Ok(())
    }

    /// Largest entry of `|rho - rho^dagger|`.
    pub fn hermitian_defect(&self) -> f64 {
        hermitian_defect(&self.mat)
    }

    /// Tensor product `self ⊗ other`; subsystem lists are concatenated.
    pub fn kron(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityMatrix { dims, mat: self.mat.kronecker(&other.mat) }
    }

    /// `tr(rho * op)`.
    pub fn expectation(&self, op: &DMatrix<C64>) -> Result<C64> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::domain(MODULE, "operator dimension does not match the state"));
        }
        Ok((&self.mat * op).trace())
    }

    /// Transposes the indices of one subsystem. Entries are only permuted,
    /// so applying it twice reproduces the input bit for bit.
    pub fn partial_transpose(&self, subsystem: usize) -> Result<DensityMatrix> {
        if subsystem >= self.dims.len() {
            return Err(Error::domain(
                MODULE,
                format!(
                    "subsystem index {subsystem} out of range for {} subsystems",
                    self.dims.len()
                ),
            ));
        }
        let n = self.dim();
        let stride: usize = self.dims[subsystem + 1..].iter().product();
        let d = self.dims[subsystem];
        let digit = |idx: usize| (idx / stride) % d;
        let mut out = DMatrix::<C64>::zeros(n, n);
        for col in 0..n {
            let jc = digit(col);
            for row in 0..n {
                let ir = digit(row);
                let new_row = row - ir * stride + jc * stride;
                let new_col = col - jc * stride + ir * stride;
                out[(new_row, new_col)] = self.mat[(row, col)];
            }
        }
        Ok(DensityMatrix { dims: self.dims.clone(), mat: out })
    }

    /// Traces out every subsystem not listed in `keep`. The kept subsystems
    /// appear in ascending index order in the result.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::domain(MODULE, "partial trace needs a nonempty keep set"));
        }
        let mut keep: Vec<usize> = keep.to_vec();
        keep.sort_unstable();
        if keep.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::domain(MODULE, "keep set contains duplicate subsystems"));
        }
        if let Some(&bad) = keep.iter().find(|&&k| k >= self.dims.len()) {
            return Err(Error::domain(
                MODULE,
                format!("subsystem index {bad} out of range for {} subsystems", self.dims.len()),
            ));
        }
        if keep.len() == self.dims.len() {
            return Ok(self.clone());
        }
        let traced: Vec<usize> = (0..self.dims.len()).filter(|i| !keep.contains(i)).collect();
        let strides = strides(&self.dims);
        let kept_dims: Vec<usize> = keep.iter().map(|&k| self.dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let dk: usize = kept_dims.iter().product();
        let dt: usize = traced_dims.iter().product();

        // Full-space offsets of every kept and traced multi-index.
        let offsets = |subs: &[usize], sub_dims: &[usize], count: usize| -> Vec<usize> {
            (0..count)
                .map(|flat| {
                    let digits = unflatten(flat, sub_dims);
                    subs.iter().zip(digits).map(|(&s, dg)| dg * strides[s]).sum()
                })
                .collect()
        };
        let kept_off = offsets(&keep, &kept_dims, dk);
        let traced_off = offsets(&traced, &traced_dims, dt);

        let mut out = DMatrix::<C64>::zeros(dk, dk);
        for c in 0..dk {
            for r in 0..dk {
                let mut acc = C64::new(0.0, 0.0);
                for &e in &traced_off {
                    acc += self.mat[(kept_off[r] + e, kept_off[c] + e)];
                }
                out[(r, c)] = acc;
            }
        }
        Ok(DensityMatrix { dims: kept_dims, mat: out })
    }

    /// Real spectrum in ascending order. The matrix is symmetrized as
    /// `(rho + rho^dagger) / 2` before the eigensolve.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.mat)
    }

    /// Peres–Horodecki test on the bipartition `subsystem | rest`.
    pub fn ppt_verdict(&self, subsystem: usize, threshold: f64) -> Result<PptVerdict> {
        if !(threshold >= 0.0) {
            return Err(Error::domain(MODULE, "PPT threshold must be nonnegative"));
        }
        let pt = self.partial_transpose(subsystem)?;
        let eigenvalues = pt.eigenvalues();
        let min_eigenvalue = eigenvalues[0];
        let verdict = if min_eigenvalue < -threshold {
            Verdict::Inseparable
        } else {
            Verdict::SeparableConsistent
        };
        let a = self.dims[subsystem];
        let b = self.dim() / a;
        let conclusive = matches!((a.min(b), a.max(b)), (2, 2) | (2, 3));
        Ok(PptVerdict { min_eigenvalue, threshold, verdict, conclusive, eigenvalues })
    }

    /// Sum of the magnitudes of the negative partial-transpose eigenvalues.
    pub fn negativity(&self, subsystem: usize) -> Result<f64> {
        let pt = self.partial_transpose(subsystem)?;
        Ok(pt.eigenvalues().iter().filter(|&&l| l < 0.0).map(|l| -l).sum())
    }

    /// `-sum lambda log2 lambda` in bits.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let eigs = self.eigenvalues();
        if let Some(&worst) = eigs.iter().find(|&&l| l < -NEGATIVE_EIG_TOL) {
            return Err(Error::invalid_state(
                MODULE,
                format!("eigenvalue {worst:.3e} is negative; not a density matrix"),
            ));
        }
        Ok(eigs.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum())
    }
}

/// Outcome of a partial-transpose test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Inseparable,
    SeparableConsistent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PptVerdict {
    pub min_eigenvalue: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    /// True for 2x2 and 2x3 bipartitions, where a nonnegative spectrum
    /// implies separability. Elsewhere only negativity is meaningful.
    pub conclusive: bool,
    /// Partial-transpose spectrum, ascending.
    pub eigenvalues: Vec<f64>,
}

impl PptVerdict {
    pub fn is_inseparable(&self) -> bool {
        self.verdict == Verdict::Inseparable
    }
}

/// Ascending eigenvalues of the Hermitian part of `m`.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let n = m.nrows();
    let sym = faer::Mat::<C64>::from_fn(n, n, |r, c| (m[(r, c)] + m[(c, r)].conj()) * 0.5);
    let mut eigs = sym
        .self_adjoint_eigenvalues(faer::Side::Lower)
        .expect("self-adjoint eigensolver converges on finite input");
    eigs.sort_by(f64::total_cmp);
    eigs
}

fn hermitian_defect(m: &DMatrix<C64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for c in 0..n {
        for r in c..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.is_empty() {
        return Err(Error::domain(MODULE, "at least one subsystem is required"));
    }
    if let Some(&d) = dims.iter().find(|&&d| d < 2) {
        return Err(Error::domain(MODULE, format!("subsystem dimension {d} is below 2")));
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for i in (0..dims.len()).rev() {
        digits[i] = flat % dims[i];
        flat /= dims[i];
    }
    digits
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn psi_plus() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(vec![2, 2], &[c(0.0), c(s), c(s), c(0.0)]).unwrap()
    }

    // Independent 4x4 reference: eigenvalues of a real symmetric matrix by
    // characteristic-polynomial-free Jacobi sweeps.
    fn jacobi_eigs(mut a: [[f64; 4]; 4]) -> Vec<f64> {
        for _ in 0..100 {
            for p in 0..4 {
                for q in p + 1..4 {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let cs = 1.0 / (t * t + 1.0).sqrt();
                    let sn = t * cs;
                    for k in 0..4 {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = cs * akp - sn * akq;
                        a[k][q] = sn * akp + cs * akq;
                    }
                    for k in 0..4 {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = cs * apk - sn * aqk;
                        a[q][k] = sn * apk + cs * aqk;
                    }
                }
            }
        }
        let mut e: Vec<f64> = (0..4).map(|i| a[i][i]).collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = DMatrix::<C64>::zeros(2, 2);
        m[(0, 1)] = c(0.5);
        assert!(matches!(
            DensityMatrix::new(vec![2], m),
            Err(Error::InvalidState { .. })
        ));
    }

    #[test]
    fn rejects_mismatched_dims() {
        let m = DMatrix::<C64>::identity(3, 3);
        assert!(DensityMatrix::new(vec![2, 2], m).is_err());
        assert!(DensityMatrix::new(vec![1, 3], DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn bell_state_partial_transpose_min_eigenvalue() {
        let pt = psi_plus().partial_transpose(1).unwrap();
        // Oracle: Jacobi on the explicitly written PT matrix.
        let mut a = [[0.0; 4]; 4];
        for r in 0..4 {
            for col in 0..4 {
                a[r][col] = pt.get(r, col).re;
            }
        }
        let oracle = jacobi_eigs(a);
        assert!((oracle[0] + 0.5).abs() < 1e-12);
        let eigs = pt.eigenvalues();
        for (x, y) in eigs.iter().zip(&oracle) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_transpose_is_positive() {
        let r1 = DensityMatrix::new(
            vec![2],
            DMatrix::from_row_slice(2, 2, &[c(0.7), C64::new(0.1, 0.2), C64::new(0.1, -0.2), c(0.3)]),
        )
        .unwrap();
        let r2 = DensityMatrix::new(
            vec![2],
            DMatrix::from_row_slice(2, 2, &[c(0.4), C64::new(-0.2, 0.1), C64::new(-0.2, -0.1), c(0.6)]),
        )
        .unwrap();
        let rho = r1.kron(&r2);
        let pt = rho.partial_transpose(1).unwrap();
        let expected = r1.kron(&DensityMatrix::new(vec![2], r2.matrix().transpose()).unwrap());
        assert_eq!(pt, expected);
        assert!(pt.eigenvalues()[0] >= -1e-14);
    }

    #[test]
    fn mixed_bell_and_ground_spectrum() {
        let mut m = psi_plus().into_matrix();
        m[(0, 0)] += c(1.0);
        let rho = DensityMatrix::new(vec![2, 2], m.scale(0.5)).unwrap();
        let eigs = rho.partial_transpose(0).unwrap().eigenvalues();
        let r2 = std::f64::consts::SQRT_2;
        let expected = [(1.0 - r2) / 4.0, 0.25, 0.25, (1.0 + r2) / 4.0];
        for (x, y) in eigs.iter().zip(expected) {
            assert!((x - y).abs() < 1e-12, "{eigs:?}");
        }
    }

    #[test]
    fn partial_transpose_index_out_of_range() {
        assert!(matches!(psi_plus().partial_transpose(2), Err(Error::Domain { .. })));
    }

    #[test]
    fn partial_trace_cases() {
        let rho = psi_plus();
        assert_eq!(rho.partial_trace(&[0, 1]).unwrap(), rho);
        let one = rho.partial_trace(&[1]).unwrap();
        assert!((one.get(0, 0) - c(0.5)).norm() < 1e-15);
        assert!((one.get(1, 1) - c(0.5)).norm() < 1e-15);
        assert!(one.get(0, 1).norm() < 1e-15);
        assert!(matches!(rho.partial_trace(&[]), Err(Error::Domain { .. })));
        assert!(rho.partial_trace(&[0, 0]).is_err());
    }

    #[test]
    fn partial_trace_over_mixed_dims() {
        // |0><0| (dim 2) ⊗ diag(0.2, 0.3, 0.5) (dim 3) ⊗ |1><1| (dim 2)
        let a = DensityMatrix::from_diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let b = DensityMatrix::from_diagonal(vec![3], &[0.2, 0.3, 0.5]).unwrap();
        let d = DensityMatrix::from_diagonal(vec![2], &[0.0, 1.0]).unwrap();
        let rho = a.kron(&b).kron(&d);
        assert_eq!(rho.partial_trace(&[1]).unwrap(), b);
        assert_eq!(rho.partial_trace(&[0, 2]).unwrap(), a.kron(&d));
    }

    #[test]
    fn entropy_cases() {
        assert!(psi_plus().von_neumann_entropy().unwrap().abs() < 1e-12);
        let mixed = DensityMatrix::from_diagonal(vec![2], &[0.5, 0.5]).unwrap();
        assert!((mixed.von_neumann_entropy().unwrap() - 1.0).abs() < 1e-12);
        let bad = DensityMatrix::from_diagonal(vec![2], &[1.1, -0.1]).unwrap();
        assert!(matches!(bad.von_neumann_entropy(), Err(Error::InvalidState { .. })));
        let tiny = DensityMatrix::from_diagonal(vec![2], &[1.0 + 1e-11, -1e-11]).unwrap();
        assert!(tiny.von_neumann_entropy().unwrap().abs() < 1e-9);
    }

    #[test]
    fn ppt_verdict_flags() {
        let v = psi_plus().ppt_verdict(0, 1e-12).unwrap();
        assert!(v.is_inseparable());
        assert!(v.conclusive);
        let ground = DensityMatrix::from_diagonal(vec![2, 2], &[1.0, 0.0, 0.0, 0.0]).unwrap();
        let v = ground.ppt_verdict(1, 0.0).unwrap();
        assert_eq!(v.verdict, Verdict::SeparableConsistent);
        assert_eq!(v.min_eigenvalue, 0.0);
        let big = DensityMatrix::from_diagonal(vec![2, 2, 2], &[1.0, 0., 0., 0., 0., 0., 0., 0.]).unwrap();
        assert!(!big.ppt_verdict(0, 0.0).unwrap().conclusive);
        assert!(ground.ppt_verdict(0, -1.0).is_err());
    }
}
