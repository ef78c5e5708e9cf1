//! Heralded entanglement of atomic ensembles through linear optics.
//!
//! Each ensemble starts in the atom-photon pair `Z = a |0>_f |0> + b |1>_f |W>`.
//! The photons of `n` identical pairs enter a chain of `n - 1` beamsplitters;
//! detecting exactly one photon at output port 1 projects the ensembles onto
//! `eta_n = sum_k q_k |0..W_k..0>` with `q` the first row of the network
//! matrix, at probability `|a^(n-1) b|^2`.
//!
//! Ensembles are treated as qubits `{|0>, |W>}`; the internal atom structure
//! is restored only by [`HierarchicalState::to_product_ket`].

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::density::{DensityMatrix, PptVerdict};
use crate::exact::{AtomBasis, AtomFieldKet, FieldBasis};
use crate::symmetric::{ProductKet, DENSITY_QUBIT_CAP};
use crate::{Error, Result, C64, PRODUCT_CAP};

const MODULE: &str = "projective-schemes";

const TOL: f64 = 1e-12;

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

/// `a |0>_f |0;N> + b |1>_f |W>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsemblePhotonPair {
    a: C64,
    b: C64,
    n_atoms: usize,
}

pub fn make_pair(a: C64, b: C64, n_atoms: usize) -> Result<EnsemblePhotonPair> {
    let n2 = a.norm_sqr() + b.norm_sqr();
    if (n2 - 1.0).abs() > TOL {
        return Err(Error::invalid_state(MODULE, format!("|a|^2 + |b|^2 = {n2} must equal 1")));
    }
    if n_atoms == 0 {
        return Err(Error::domain(MODULE, "an ensemble needs at least one atom"));
    }
    Ok(EnsemblePhotonPair { a, b, n_atoms })
}

impl EnsemblePhotonPair {
    pub fn a(&self) -> C64 {
        self.a
    }

    pub fn b(&self) -> C64 {
        self.b
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    /// Joint photon-ensemble ket in the symmetric atomic basis.
    pub fn ket(&self) -> Result<AtomFieldKet> {
        let d = self.n_atoms + 1;
        let mut amps = vec![zero(); 2 * d];
        amps[0] = self.a;
        amps[d + 1] = self.b;
        AtomFieldKet::new(FieldBasis::Cavity, AtomBasis::Symmetric, self.n_atoms, amps)
    }

    fn same_as(&self, other: &EnsemblePhotonPair) -> bool {
        self.n_atoms == other.n_atoms && (self.a - other.a).norm() <= TOL && (self.b - other.b).norm() <= TOL
    }
}

/// Named beamsplitter chains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// Two ports, `q = (1, 1)/sqrt(2)`.
    Epr,
    /// Three ports, `q = (1, 1, 1)/sqrt(3)`.
    #[serde(alias = "w3")]
    W,
    /// Three ports, `q = (1/sqrt(2), 1/2, 1/2)`.
    AsymmetricW,
}

/// Chain of `n - 1` two-port splitters on the single-photon subspace.
/// Splitter `k` mixes the bus (port 1) with port `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitterNetwork {
    angles: Vec<f64>,
    matrix: DMatrix<f64>,
}

impl SplitterNetwork {
    /// `angles[k-1]` sets `c_k = cos`, `s_k = sin` of splitter `k`.
    pub fn from_angles(angles: &[f64]) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::domain(MODULE, "a network needs at least one splitter"));
        }
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain(MODULE, "splitter angles must be finite"));
        }
        let n = angles.len() + 1;
        let mut u = DMatrix::<f64>::identity(n, n);
        for (k, &phi) in angles.iter().enumerate() {
            let (s, c) = phi.sin_cos();
            let p = k + 1;
            // port p: c |p> + s |bus>; bus: c |bus> - s |p>
            let mut b = DMatrix::<f64>::identity(n, n);
            b[(0, 0)] = c;
            b[(p, p)] = c;
            b[(0, p)] = s;
            b[(p, 0)] = -s;
            u = b * u;
        }
        Ok(Self { angles: angles.to_vec(), matrix: u })
    }

    /// Equal weights `1/sqrt(n)` at the output port.
    pub fn balanced(n_ports: usize) -> Result<Self> {
        if n_ports < 2 {
            return Err(Error::domain(MODULE, format!("{n_ports} ports; need at least 2")));
        }
        let angles: Vec<f64> = (1..n_ports).map(|k| (1.0 / ((k + 1) as f64).sqrt()).asin()).collect();
        Self::from_angles(&angles)
    }

    /// Chain whose heralded coefficients equal the real unit vector `q`.
    pub fn from_target(q: &[f64]) -> Result<Self> {
        if q.len() < 2 {
            return Err(Error::domain(MODULE, "a target needs at least two coefficients"));
        }
        let n2: f64 = q.iter().map(|x| x * x).sum();
        if (n2 - 1.0).abs() > TOL {
            return Err(Error::domain(MODULE, format!("target norm^2 {n2} must equal 1")));
        }
        let mut p = q[0];
        let mut angles = Vec::with_capacity(q.len() - 1);
        for &qk in &q[1..] {
            angles.push(qk.atan2(p));
            p = p.hypot(qk);
        }
        Self::from_angles(&angles)
    }

    pub fn preset(preset: Preset) -> Self {
        let target: Vec<f64> = match preset {
            Preset::Epr => vec![0.5f64.sqrt(); 2],
            Preset::W => vec![(1.0f64 / 3.0).sqrt(); 3],
            Preset::AsymmetricW => vec![0.5f64.sqrt(), 0.5, 0.5],
        };
        Self::from_target(&target).expect("preset targets are normalized")
    }

    pub fn n_ports(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Single-photon transfer matrix, column = input port.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Output amplitudes for a photon entering port 1.
    pub fn t(&self) -> Vec<f64> {
        self.matrix.column(0).iter().copied().collect()
    }

    /// Amplitudes of the inverse map on port 1; these are the heralded `q_k`.
    pub fn tau(&self) -> Vec<f64> {
        self.matrix.row(0).iter().copied().collect()
    }

    pub fn orthogonality_defect(&self) -> f64 {
        let n = self.n_ports();
        (self.matrix.transpose() * &self.matrix - DMatrix::<f64>::identity(n, n)).amax()
    }
}

/// Leaf payload: one ensemble treated as the qubit `{|0;N>, |W>}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Site {
    pub n_atoms: usize,
}

/// Single-excitation state built level by level:
/// `Node = sum_k q_k |0..child_k..0>`.
#[derive(Debug, Clone, PartialEq)]
pub enum HierarchicalState {
    Leaf(Site),
    Node { coeffs: Vec<C64>, children: Vec<HierarchicalState> },
}

impl HierarchicalState {
    pub fn leaf(n_atoms: usize) -> Self {
        HierarchicalState::Leaf(Site { n_atoms })
    }

    /// Validates `sum |q_k|^2 = 1` and matching child counts.
    pub fn node(coeffs: Vec<C64>, children: Vec<HierarchicalState>) -> Result<Self> {
        if coeffs.is_empty() || coeffs.len() != children.len() {
            return Err(Error::domain(
                MODULE,
                format!("{} coefficients for {} children", coeffs.len(), children.len()),
            ));
        }
        let n2: f64 = coeffs.iter().map(|q| q.norm_sqr()).sum();
        if (n2 - 1.0).abs() > TOL {
            return Err(Error::invalid_state(MODULE, format!("node norm^2 {n2} must equal 1")));
        }
        Ok(HierarchicalState::Node { coeffs, children })
    }

    pub fn sites(&self) -> Vec<Site> {
        match self {
            HierarchicalState::Leaf(s) => vec![*s],
            HierarchicalState::Node { children, .. } => children.iter().flat_map(|c| c.sites()).collect(),
        }
    }

    pub fn n_sites(&self) -> usize {
        match self {
            HierarchicalState::Leaf(_) => 1,
            HierarchicalState::Node { children, .. } => children.iter().map(|c| c.n_sites()).sum(),
        }
    }

    /// Amplitude of the excitation sitting on each leaf, in leaf order.
    pub fn flatten(&self) -> Vec<C64> {
        match self {
            HierarchicalState::Leaf(_) => vec![C64::new(1.0, 0.0)],
            HierarchicalState::Node { coeffs, children } => coeffs
                .iter()
                .zip(children)
                .flat_map(|(q, c)| c.flatten().into_iter().map(move |x| q * x))
                .collect(),
        }
    }

    /// One qubit per leaf, leaf 0 most significant.
    pub fn to_site_ket(&self) -> Result<ProductKet> {
        let flat = self.flatten();
        let n = flat.len();
        if n > PRODUCT_CAP {
            return Err(Error::capacity(MODULE, format!("{n} sites exceed the cap of {PRODUCT_CAP}")));
        }
        let mut amps = vec![zero(); 1usize << n];
        for (k, q) in flat.iter().enumerate() {
            amps[1usize << (n - 1 - k)] = *q;
        }
        ProductKet::new(n, amps)
    }

    /// Every atom of every ensemble as its own qubit; each `|W>` is expanded
    /// over its atoms.
    pub fn to_product_ket(&self) -> Result<ProductKet> {
        let sites = self.sites();
        let total: usize = sites.iter().map(|s| s.n_atoms).sum();
        if total > PRODUCT_CAP {
            return Err(Error::capacity(
                MODULE,
                format!("{total} atoms exceed the product-basis cap of {PRODUCT_CAP}"),
            ));
        }
        let flat = self.flatten();
        let mut amps = vec![zero(); 1usize << total];
        let mut offset = 0;
        for (site, q) in sites.iter().zip(&flat) {
            let w = q / (site.n_atoms as f64).sqrt();
            for j in 0..site.n_atoms {
                amps[1usize << (total - 1 - offset - j)] = w;
            }
            offset += site.n_atoms;
        }
        ProductKet::new(total, amps)
    }
}

/// Rotates `q` so that its first nonzero entry is real and positive.
pub fn normalize_global_phase(q: &mut [C64]) {
    if let Some(first) = q.iter().find(|x| x.norm() > TOL).copied() {
        let phase = first.conj() / first.norm();
        for x in q.iter_mut() {
            *x *= phase;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HeraldOutcome {
    pub state: HierarchicalState,
    pub prob: f64,
}

/// Projects `Z^(x)n` sent through `net` onto one photon at output port 1 and
/// vacuum elsewhere.
pub fn herald(pairs: &[EnsemblePhotonPair], net: &SplitterNetwork) -> Result<HeraldOutcome> {
    let n = net.n_ports();
    if pairs.len() != n {
        return Err(Error::domain(MODULE, format!("{} pairs for a {n}-port network", pairs.len())));
    }
    if pairs.iter().any(|p| !p.same_as(&pairs[0])) {
        return Err(Error::domain(MODULE, "heralding requires identical pairs"));
    }
    let p0 = pairs[0];
    let prob = (p0.a.powu(n as u32 - 1) * p0.b).norm_sqr();
    if prob == 0.0 {
        return Err(Error::invalid_state(MODULE, "the heralding event has zero probability"));
    }
    let mut q: Vec<C64> = net.tau().into_iter().map(|x| C64::new(x, 0.0)).collect();
    normalize_global_phase(&mut q);
    let children = vec![HierarchicalState::leaf(p0.n_atoms); n];
    Ok(HeraldOutcome { state: HierarchicalState::node(q, children)?, prob })
}

/// `eta_p(inner)`: `p` identical copies of `inner` joined by `outer`.
pub fn compose(outer: &SplitterNetwork, inner: &HierarchicalState) -> Result<HierarchicalState> {
    let mut q: Vec<C64> = outer.tau().into_iter().map(|x| C64::new(x, 0.0)).collect();
    normalize_global_phase(&mut q);
    HierarchicalState::node(q, vec![inner.clone(); outer.n_ports()])
}

/// The single-input case `p = 1`.
pub fn wrap(inner: &HierarchicalState) -> HierarchicalState {
    HierarchicalState::Node { coeffs: vec![C64::new(1.0, 0.0)], children: vec![inner.clone()] }
}

/// `(1/2)[ |eta,0><eta,0| + |0,eta><0,eta| ]` for two identical schemes whose
/// photon counts are merged. Sites are qubits; the first scheme comes first.
pub fn correlated_counts_mix(eta: &HierarchicalState) -> Result<DensityMatrix> {
    let ket = eta.to_site_ket()?;
    let m = ket.n_sites();
    if 2 * m > DENSITY_QUBIT_CAP {
        return Err(Error::capacity(
            MODULE,
            format!("{} qubits exceed the density cap of {DENSITY_QUBIT_CAP}", 2 * m),
        ));
    }
    let dim = 1usize << (2 * m);
    let mut first = vec![zero(); dim];
    let mut second = vec![zero(); dim];
    for (idx, a) in ket.amps().iter().enumerate() {
        first[idx << m] = *a;
        second[idx] = *a;
    }
    let mut mat = DMatrix::<C64>::zeros(dim, dim);
    for v in [&first, &second] {
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] += v[i] * v[j].conj() * 0.5;
            }
        }
    }
    DensityMatrix::new(vec![2; 2 * m], mat)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstSchemeReport {
    /// `(1/2)[ |eta><eta| + |0..0><0..0| ]`.
    pub reduced: DensityMatrix,
    pub negativity: f64,
    /// Partial transpose on the first site. `conclusive` only when every
    /// ensemble is a single atom; otherwise read the negativity alone.
    pub ppt: PptVerdict,
}

/// Reduced state of the first scheme of [`correlated_counts_mix`].
pub fn first_scheme_report(eta: &HierarchicalState, threshold: f64) -> Result<FirstSchemeReport> {
    let rho = correlated_counts_mix(eta)?;
    let m = eta.n_sites();
    let keep: Vec<usize> = (0..m).collect();
    let reduced = rho.partial_trace(&keep)?;
    let negativity = reduced.negativity(0)?;
    let mut ppt = reduced.ppt_verdict(0, threshold)?;
    if eta.sites().iter().any(|s| s.n_atoms > 1) {
        ppt.conclusive = false;
    }
    Ok(FirstSchemeReport { reduced, negativity, ppt })
}
