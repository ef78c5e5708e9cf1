//! Symmetric Dicke kets in the normalized basis `|D_h> = |h;N> / sqrt(C(N,h))`,
//! collective ladder operators, product-basis expansion and the reduced
//! states of particle groups drawn from a W state.
//!
//! The unnormalized permutation sum `|h;N>` has squared norm `C(N,h)`. Storing
//! normalized amplitudes keeps the state vector bounded for large `N`; the
//! collective operators then act as
//!
//! ```text
//! S10 |D_h> = sqrt((h+1)(N-h)) |D_{h+1}>
//! S01 |D_h> = sqrt(h(N-h+1))   |D_{h-1}>
//! ```

use nalgebra::DMatrix;

use crate::density::DensityMatrix;
use crate::{Error, Result, C64, PRODUCT_CAP};

const MODULE: &str = "symmetric-algebra";

/// Largest number of qubits for which dense reduced density matrices are built.
pub const DENSITY_QUBIT_CAP: usize = 10;

/// Amplitudes over `h = 0..=N` in the normalized symmetric basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricKet {
    n_atoms: usize,
    amps: Vec<C64>,
}

impl SymmetricKet {
    pub fn new(n_atoms: usize, amps: Vec<C64>) -> Result<Self> {
        if n_atoms == 0 {
            return Err(Error::domain(MODULE, "an ensemble needs at least one atom"));
        }
        if amps.len() != n_atoms + 1 {
            return Err(Error::domain(
                MODULE,
                format!("{} amplitudes given for N = {} (need N + 1)", amps.len(), n_atoms),
            ));
        }
        Ok(Self { n_atoms, amps })
    }

    pub fn zero(n_atoms: usize) -> Result<Self> {
        Self::new(n_atoms, vec![C64::new(0.0, 0.0); n_atoms + 1])
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn amp(&self, h: usize) -> C64 {
        self.amps[h]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.amps.iter().all(|a| *a == C64::new(0.0, 0.0))
    }

    /// Rescaled to unit norm; `None` for the zero ket.
    pub fn normalized(&self) -> Option<SymmetricKet> {
        let n = self.norm();
        (n > 0.0).then(|| SymmetricKet {
            n_atoms: self.n_atoms,
            amps: self.amps.iter().map(|a| a / n).collect(),
        })
    }

    pub fn inner(&self, other: &SymmetricKet) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `S10 |psi>`, left unnormalized. Raising `|D_N>` yields zero.
    pub fn apply_raising(&self) -> SymmetricKet {
        let n = self.n_atoms;
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for h in 0..n {
            out[h + 1] = self.amps[h] * raising_factor(n, h);
        }
        SymmetricKet { n_atoms: n, amps: out }
    }

    /// `S01 |psi>`, left unnormalized. Lowering `|D_0>` yields zero.
    pub fn apply_lowering(&self) -> SymmetricKet {
        let n = self.n_atoms;
        let mut out = vec![C64::new(0.0, 0.0); n + 1];
        for h in 1..=n {
            out[h - 1] = self.amps[h] * lowering_factor(n, h);
        }
        SymmetricKet { n_atoms: n, amps: out }
    }

    /// `<J_z> = <h> - N/2`.
    pub fn jz_expectation(&self) -> f64 {
        let norm2: f64 = self.amps.iter().map(|a| a.norm_sqr()).sum();
        let mean_h: f64 =
            self.amps.iter().enumerate().map(|(h, a)| h as f64 * a.norm_sqr()).sum::<f64>();
        mean_h / norm2 - self.n_atoms as f64 / 2.0
    }

    /// Spreads each `|D_h>` uniformly over its `C(N,h)` product configurations.
    pub fn expand_to_product(&self) -> Result<ProductKet> {
        let n = self.n_atoms;
        if n > PRODUCT_CAP {
            return Err(Error::capacity(
                MODULE,
                format!("N = {n} exceeds the product-basis cap of {PRODUCT_CAP} sites"),
            ));
        }
        let weights: Vec<f64> = (0..=n).map(|h| binomial(n, h).sqrt().recip()).collect();
        let amps = (0..1usize << n)
            .map(|idx| {
                let h = idx.count_ones() as usize;
                self.amps[h] * weights[h]
            })
            .collect();
        Ok(ProductKet { n_sites: n, amps })
    }
}

/// Amplitude of `S10 |D_h> = f |D_{h+1}>`.
pub fn raising_factor(n: usize, h: usize) -> f64 {
    if h >= n {
        0.0
    } else {
        (((h + 1) * (n - h)) as f64).sqrt()
    }
}

/// Amplitude of `S01 |D_h> = f |D_{h-1}>`.
pub fn lowering_factor(n: usize, h: usize) -> f64 {
    if h == 0 || h > n {
        0.0
    } else {
        ((h * (n - h + 1)) as f64).sqrt()
    }
}

/// Normalized Dicke ket with `h` of `N` atoms excited.
pub fn make_dicke(n: usize, h: usize) -> Result<SymmetricKet> {
    if h > n {
        return Err(Error::domain(MODULE, format!("h = {h} out of range 0..={n}")));
    }
    let mut ket = SymmetricKet::zero(n)?;
    ket.amps[h] = C64::new(1.0, 0.0);
    Ok(ket)
}

/// Binomial coefficient as a float (exact for the sizes used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Amplitudes over the `2^n` configurations of `n` two-level sites. Site 0 is
/// the most significant bit of the basis index; bit value 1 means excited.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductKet {
    n_sites: usize,
    amps: Vec<C64>,
}

impl ProductKet {
    /// Validates size, cap and unit norm (1e-12).
    pub fn new(n_sites: usize, amps: Vec<C64>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::domain(MODULE, "a product ket needs at least one site"));
        }
        if n_sites > PRODUCT_CAP {
            return Err(Error::capacity(
                MODULE,
                format!("{n_sites} sites exceed the product-basis cap of {PRODUCT_CAP}"),
            ));
        }
        if amps.len() != 1usize << n_sites {
            return Err(Error::domain(
                MODULE,
                format!("{} amplitudes given for {} sites", amps.len(), n_sites),
            ));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid_state(MODULE, format!("ket norm {norm} is not 1")));
        }
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Basis index of the configuration with the listed sites excited.
    pub fn index_of(&self, excited: &[usize]) -> usize {
        excited.iter().fold(0, |acc, &s| acc | (1 << (self.n_sites - 1 - s)))
    }

    /// `<(1/2) sum_a sigma_z(a)>` with `sigma_z |1> = +|1>`.
    pub fn jz_expectation(&self) -> f64 {
        let n = self.n_sites as f64;
        self.amps
            .iter()
            .enumerate()
            .map(|(idx, a)| a.norm_sqr() * (idx.count_ones() as f64 - n / 2.0))
            .sum()
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        if self.n_sites > DENSITY_QUBIT_CAP {
            return Err(Error::capacity(
                MODULE,
                format!("{} qubits exceed the density-matrix cap of {DENSITY_QUBIT_CAP}", self.n_sites),
            ));
        }
        DensityMatrix::from_pure(vec![2; self.n_sites], &self.amps)
    }
}

/// State of `M` particles taken from the `N`-atom W state:
/// `(1/N) |1;M><1;M| + ((N-M)/N) |0..0><0..0|` with `|1;M>` unnormalized.
pub fn reduced_state_of_w(n: usize, m: usize) -> Result<DensityMatrix> {
    if m == 0 || m > n {
        return Err(Error::domain(MODULE, format!("group size M = {m} must lie in 1..={n}")));
    }
    if m > DENSITY_QUBIT_CAP {
        return Err(Error::capacity(
            MODULE,
            format!("M = {m} exceeds the density-matrix cap of {DENSITY_QUBIT_CAP} qubits"),
        ));
    }
    let dim = 1usize << m;
    let single: Vec<usize> = (0..m).map(|s| 1 << (m - 1 - s)).collect();
    let w = 1.0 / n as f64;
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    for &r in &single {
        for &c in &single {
            mat[(r, c)] = C64::new(w, 0.0);
        }
    }
    mat[(0, 0)] = C64::new((n - m) as f64 * w, 0.0);
    DensityMatrix::new(vec![2; m], mat)
}

/// Binary entropy `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn group_entropy(p: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain(MODULE, format!("p = {p} outside [0, 1]")));
    }
    let term = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    Ok(term(p) + term(1.0 - p))
}
