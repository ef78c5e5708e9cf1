use std::f64::consts::PI;

use atomlight::density::DensityMatrix;
use atomlight::exact::{dicke_ladder_step, mode_mixing_evolution, single_photon_rotation, AtomBasis, AtomFieldKet, FieldBasis};
use atomlight::field::{fock_representation, moments_of};
use atomlight::oracle::{evolve, reduce_to_atoms, reduce_to_field, JointModel};
use atomlight::perturbative::{
    dipole_covariance, kappa, normally_ordered_variance, rho_atoms, squeezed_pt_eigs, squeezed_two_atom_state,
};
use atomlight::schemes::{herald, make_pair, Preset, SplitterNetwork};
use atomlight::{Result, C64};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::config::{Covariance, Herald, Ladder, OracleCompare, PptSweep, Rabi, ScenarioConfig};
use crate::output::{Csv, ScenarioOutput};

pub fn run(cfg: &ScenarioConfig) -> Result<ScenarioOutput> {
    match cfg {
        ScenarioConfig::PptSweep(p) => ppt_sweep(p),
        ScenarioConfig::Rabi(p) => rabi(p),
        ScenarioConfig::Ladder(p) => ladder(p),
        ScenarioConfig::Herald(p) => herald_scenario(p),
        ScenarioConfig::OracleCompare(p) => oracle_compare(p),
        ScenarioConfig::Covariance(p) => covariance(p),
    }
}

fn pair(z: C64) -> Value {
    json!([z.re, z.im])
}

fn flag(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// Closed-form and numerical partial-transpose minimum of the steady squeezed
/// two-atom state. CSV: `r,min_eig_closed,min_eig_numeric,threshold,inseparable,negativity`.
fn ppt_sweep(p: &PptSweep) -> Result<ScenarioOutput> {
    let points: Vec<[f64; 6]> = p
        .r_values
        .par_iter()
        .map(|&r| {
            let closed = squeezed_pt_eigs(r, p.n_s)?;
            let state = squeezed_two_atom_state(r, p.n_s)?;
            let threshold = state.ppt_threshold(p.threshold_c);
            let verdict = state.rho.ppt_verdict(0, threshold)?;
            let negativity = state.rho.negativity(0)?;
            Ok([r, closed[0], verdict.min_eigenvalue, threshold, flag(verdict.is_inseparable()), negativity])
        })
        .collect::<Result<_>>()?;

    let mut csv = Csv::new(vec!["r", "min_eig_closed", "min_eig_numeric", "threshold", "inseparable", "negativity"]);
    points.iter().for_each(|row| csv.push(row.to_vec()));
    let monotone = points.windows(2).all(|w| w[1][2] < w[0][2]);
    let max_dev = points.iter().map(|row| (row[1] - row[2]).abs()).fold(0.0, f64::max);
    let results = json!({
        "points": points.iter().map(|row| json!({
            "r": row[0],
            "min_eig_closed": row[1],
            "min_eig_numeric": row[2],
            "threshold": row[3],
            "inseparable": row[4] == 1.0,
            "negativity": row[5],
        })).collect::<Vec<_>>(),
        "max_closed_numeric_deviation": max_dev,
        "monotone_decreasing": monotone,
    });
    Ok(ScenarioOutput { results, csv: Some(csv) })
}

/// Single-photon exchange with a symmetric ensemble. CSV:
/// `t,theta,photon_population,atom_population` plus `photon_population_oracle`
/// when the master equation is integrated as well.
fn rabi(p: &Rabi) -> Result<ScenarioOutput> {
    let n = p.n_atoms;
    let omega = p.g * (n as f64).sqrt();
    let times = p.t_grid.values();
    let exact: Vec<[f64; 4]> = times
        .par_iter()
        .map(|&t| {
            let ket = single_photon_rotation(p.photon, p.atoms, n, omega * t)?;
            Ok([t, omega * t, ket.field_population(1), ket.field_population(0)])
        })
        .collect::<Result<_>>()?;

    let oracle = if p.oracle { Some(rabi_oracle(p, &times)?) } else { None };
    let mut header = vec!["t", "theta", "photon_population", "atom_population"];
    if oracle.is_some() {
        header.push("photon_population_oracle");
    }
    let mut csv = Csv::new(header);
    for (i, row) in exact.iter().enumerate() {
        let mut r = row.to_vec();
        if let Some(o) = &oracle {
            r.push(o[i]);
        }
        csv.push(r);
    }

    let period = |scale: f64| if omega > 0.0 { Value::from(scale * PI / omega) } else { Value::Null };
    let mut results = json!({
        "omega": omega,
        "amplitude_period": period(2.0),
        "population_period": period(1.0),
        "samples": times.len(),
    });
    if let Some(o) = &oracle {
        let dev = exact.iter().zip(o).map(|(e, o)| (e[2] - o).abs()).fold(0.0, f64::max);
        results["max_oracle_deviation"] = Value::from(dev);
    }
    Ok(ScenarioOutput { results, csv: Some(csv) })
}

fn rabi_oracle(p: &Rabi, times: &[f64]) -> Result<Vec<f64>> {
    let n = p.n_atoms;
    let model = JointModel::new(n, 1, p.g, p.decay.params()?)?;
    let mut psi = vec![C64::new(0.0, 0.0); model.dim()];
    psi[model.index(0, 1)] = p.photon;
    let w = p.atoms / (n as f64).sqrt();
    for a in 0..n {
        psi[model.index(1 << (n - 1 - a), 0)] = w;
    }
    let mut rho = DensityMatrix::from_pure(model.dims(), &psi)?;
    let mut now = 0.0;
    let mut pops = Vec::with_capacity(times.len());
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            rho = evolve(&model, &rho, span, span.min(model.max_step()))?;
            now = t;
        }
        pops.push(reduce_to_field(&model, &rho)?.get(1, 1).re);
    }
    Ok(pops)
}

/// Two-mode mixing from `(alpha |01> + beta |10>) |D_h>`. CSV:
/// `tf,pop_01,pop_10,pop_up,pop_down,norm_defect`.
fn ladder(p: &Ladder) -> Result<ScenarioOutput> {
    let (n, h) = (p.n_atoms, p.h);
    let d = n + 1;
    let mut amps = vec![C64::new(0.0, 0.0); 2 * d];
    amps[h] = p.alpha;
    amps[d + h] = p.beta;
    let initial = AtomFieldKet::new(FieldBasis::TwoMode, AtomBasis::Symmetric, n, amps)?;

    let rows: Vec<([f64; 6], f64)> = p
        .tf_grid
        .values()
        .par_iter()
        .map(|&tf| {
            let ket = dicke_ladder_step(p.alpha, p.beta, h, n, tf)?;
            let direct = mode_mixing_evolution(&initial, tf)?;
            let dev = ket.amps().iter().zip(direct.amps()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            let up = if h < n { ket.amp(1, h + 1).norm_sqr() } else { 0.0 };
            let down = if h > 0 { ket.amp(0, h - 1).norm_sqr() } else { 0.0 };
            let row = [tf, ket.field_population(0), ket.field_population(1), up, down, (ket.norm() - 1.0).abs()];
            Ok((row, dev))
        })
        .collect::<Result<_>>()?;

    let mut csv = Csv::new(vec!["tf", "pop_01", "pop_10", "pop_up", "pop_down", "norm_defect"]);
    rows.iter().for_each(|(row, _)| csv.push(row.to_vec()));
    let rate = |k: usize, m: usize| ((k * m) as f64).sqrt();
    let results = json!({
        "up_frequency": rate(h + 1, n - h),
        "down_frequency": rate(h, n - h + 1),
        "max_mode_mixing_deviation": rows.iter().map(|(_, d)| *d).fold(0.0, f64::max),
        "samples": rows.len(),
    });
    Ok(ScenarioOutput { results, csv: Some(csv) })
}

fn network(p: &Herald) -> Result<SplitterNetwork> {
    match (&p.preset, &p.angles, &p.target) {
        (_, Some(angles), _) => SplitterNetwork::from_angles(angles),
        (_, _, Some(target)) => SplitterNetwork::from_target(target),
        (preset, _, _) => Ok(SplitterNetwork::preset(preset.unwrap_or(Preset::W))),
    }
}

/// Heralded multi-ensemble state from identical photon pairs.
fn herald_scenario(p: &Herald) -> Result<ScenarioOutput> {
    let net = network(p)?;
    let n_ports = net.n_ports();
    let pairs = vec![make_pair(p.a, p.b, p.n_atoms)?; n_ports];
    let out = herald(&pairs, &net)?;
    let coefficients: Vec<Value> = out.state.flatten().into_iter().map(pair).collect();
    let expected = (p.a.norm_sqr()).powi(n_ports as i32 - 1) * p.b.norm_sqr();
    let results = json!({
        "n_ports": n_ports,
        "n_atoms": p.n_atoms,
        "angles": net.angles(),
        "tau": net.tau(),
        "coefficients": coefficients,
        "prob": out.prob,
        "prob_closed_form": expected,
    });
    Ok(ScenarioOutput { results, csv: None })
}

/// Reduced atomic state from the master equation against the closed form.
/// CSV: `row,col,oracle_re,oracle_im,closed_re,closed_im,abs_diff,outside_tolerance`.
fn oracle_compare(p: &OracleCompare) -> Result<ScenarioOutput> {
    let params = p.decay.params()?;
    let n = p.n_atoms;
    let n_max = match p.n_max {
        Some(m) => m,
        None => p.field.suggested_cutoff()?,
    };
    let closed = rho_atoms(n, &moments_of(&p.field, p.g)?, p.t, &params)?;
    let model = JointModel::new(n, n_max, p.g, params)?;
    let rho0 = model.ground_atoms_with(&fock_representation(&p.field, n_max)?)?;
    let rho = evolve(&model, &rho0, p.t, model.max_step())?;
    let keep: Vec<usize> = (0..n).collect();
    let oracle = reduce_to_atoms(&model, &rho, &keep)?;

    let mut csv = Csv::new(vec![
        "row", "col", "oracle_re", "oracle_im", "closed_re", "closed_im", "abs_diff", "outside_tolerance",
    ]);
    let (mut outside, mut max_diff) = (0usize, 0.0f64);
    for i in 0..oracle.dim() {
        for j in 0..oracle.dim() {
            let (o, c) = (oracle.get(i, j), closed.rho.get(i, j));
            let diff = (o - c).norm();
            let out = diff > (p.rel_tol * c.norm()).max(p.abs_floor);
            outside += usize::from(out);
            max_diff = max_diff.max(diff);
            csv.push(vec![i as f64, j as f64, o.re, o.im, c.re, c.im, diff, flag(out)]);
        }
    }

    let mut results = json!({
        "n_max": n_max,
        "validity": closed.validity,
        "saturation_warning": closed.saturation_warning,
        "max_abs_diff": max_diff,
        "entries_outside_tolerance": outside,
        "entries": oracle.dim() * oracle.dim(),
    });
    if n >= 2 {
        let threshold = closed.ppt_threshold(1.0);
        let o = oracle.ppt_verdict(0, threshold)?;
        let c = closed.rho.ppt_verdict(0, threshold)?;
        results["ppt"] = json!({
            "threshold": threshold,
            "oracle_min_eigenvalue": o.min_eigenvalue,
            "closed_min_eigenvalue": c.min_eigenvalue,
            "oracle_inseparable": o.is_inseparable(),
            "closed_inseparable": c.is_inseparable(),
        });
    }
    Ok(ScenarioOutput { results, csv: Some(csv) })
}

/// Dipole covariance of two atoms. CSV: `t,kappa,covariance`.
fn covariance(p: &Covariance) -> Result<ScenarioOutput> {
    let params = p.decay.params()?;
    let moments = moments_of(&p.field, p.g)?;
    let rows: Vec<[f64; 3]> = p
        .t_grid
        .values()
        .par_iter()
        .map(|&t| {
            Ok([t, kappa(t, params.gamma_perp())?, dipole_covariance(&moments, p.mu, t, &params, p.theta)?])
        })
        .collect::<Result<_>>()?;
    let mut csv = Csv::new(vec!["t", "kappa", "covariance"]);
    rows.iter().for_each(|row| csv.push(row.to_vec()));
    let results = json!({
        "normally_ordered_variance": normally_ordered_variance(&moments, p.theta),
        "steady_state_covariance": dipole_covariance(&moments, p.mu, f64::INFINITY, &params, p.theta)?,
        "samples": rows.len(),
    });
    Ok(ScenarioOutput { results, csv: Some(csv) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppt_sweep_matches_closed_form() {
        let out = ppt_sweep(&PptSweep::default()).unwrap();
        assert_eq!(out.results["monotone_decreasing"], Value::Bool(true));
        assert!(out.results["max_closed_numeric_deviation"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn rabi_oracle_tracks_exact_rotation() {
        let p = Rabi { oracle: true, t_grid: crate::config::Grid { start: 0.0, stop: 1.0, points: 5 }, ..Rabi::default() };
        let out = rabi(&p).unwrap();
        assert!(out.results["max_oracle_deviation"].as_f64().unwrap() < 1e-6);
    }

    #[test]
    fn ladder_agrees_with_mode_mixing() {
        let out = ladder(&Ladder::default()).unwrap();
        assert!(out.results["max_mode_mixing_deviation"].as_f64().unwrap() < 1e-12);
    }

    #[test]
    fn herald_w_preset_is_balanced() {
        let out = herald_scenario(&Herald::default()).unwrap();
        let third = (1.0f64 / 3.0).sqrt();
        for c in out.results["coefficients"].as_array().unwrap() {
            assert!((c[0].as_f64().unwrap() - third).abs() < 1e-12);
            assert!(c[1].as_f64().unwrap().abs() < 1e-12);
        }
        let (p, e) = (out.results["prob"].as_f64().unwrap(), out.results["prob_closed_form"].as_f64().unwrap());
        assert!((p - e).abs() < 1e-12);
    }
}
