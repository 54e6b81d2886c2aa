use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::{linspace, Resolved, RunConfig};
use super::output::{write_json, ClampCount, IntegralRecord, Manifest, Table};
use super::{CliError, Status};
use crate::amplitude::{time_integral_i, time_integral_oracle};
use crate::kinematics::{validate_nonrelativistic, Mass, PhotonCoords, ValidationReport};
use crate::probability::{
    infinite_mass_limit_study, p_m_density_kz, p_m_density_kz_sampled, p_m_k,
    p_m_recoil_density, p_u_density, p_u_k, p_u_total,
};
use crate::quadrature::{GaussianSamples, IntegralEstimate};
use crate::Result;

/// Closed form vs oracle: relative tolerance, and the absolute one inside the
/// `|k_z| a T² < 1e-8` band.
pub const ORACLE_REL_TOL: f64 = 1e-8;
pub const ORACLE_ABS_TOL: f64 = 1e-12;
const ORACLE_BAND: f64 = 1e-8;
const ORACLE_GRID: (usize, usize) = (60, 21);

/// Taylor vs Monte Carlo: allowed deviation in MC standard errors, on a grid of
/// `k` up to `TAYLOR_K_MAX`.
pub const TAYLOR_SIGMAS: f64 = 3.0;
const TAYLOR_GRID: (usize, usize) = (20, 9);
const TAYLOR_K_MAX: f64 = 20.0;

const TOOL: &str = "unruh";
const VERSION: &str = env!("CARGO_PKG_VERSION");

struct Run<'a> {
    cfg: &'a RunConfig,
    res: Resolved,
    out: &'a Path,
    workers: usize,
    started: Instant,
    outputs: Vec<String>,
    integrals: Vec<IntegralRecord>,
    densities: ClampCount,
}

impl<'a> Run<'a> {
    fn new(cfg: &'a RunConfig, res: Resolved, out: &'a Path, workers: usize) -> Self {
        Self {
            cfg,
            res,
            out,
            workers,
            started: Instant::now(),
            outputs: Vec::new(),
            integrals: Vec::new(),
            densities: ClampCount::default(),
        }
    }

    fn density(&mut self, x: f64) -> f64 {
        self.densities.apply(x, self.res.quadrature.abs_tol)
    }

    fn table(&mut self, name: &str, table: &Table) -> std::result::Result<(), CliError> {
        table
            .write(&self.out.join(name))
            .map_err(|e| CliError::Io(format!("{name}: {e}")))?;
        self.outputs.push(name.to_string());
        Ok(())
    }

    fn record(&mut self, quantity: &'static str, at: &[(&'static str, f64)], e: &IntegralEstimate) {
        self.integrals.push(IntegralRecord::new(quantity, at, e));
    }

    /// Writes `manifest.json` and maps the convergence flags to a status.
    fn finish(self, command: &'static str) -> std::result::Result<Status, CliError> {
        let all_converged = self.integrals.iter().all(|r| r.converged);
        let manifest = Manifest {
            tool: TOOL,
            version: VERSION,
            command,
            config: self.cfg,
            workers: self.workers,
            wall_time_s: self.started.elapsed().as_secs_f64(),
            outputs: self.outputs,
            all_converged,
            densities: self.densities,
            integrals: self.integrals,
        };
        write_json(&self.out.join("manifest.json"), &manifest)
            .map_err(|e| CliError::Io(format!("manifest.json: {e}")))?;
        Ok(if all_converged {
            Status::Pass
        } else {
            Status::NotConverged
        })
    }
}

fn grid2(a: &[f64], b: &[f64]) -> Vec<(f64, f64)> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).collect()
}

/// Angle-resolved densities to `spectrum.csv`, angle-integrated spectra to
/// `spectrum_k.csv`, and one `spectrum_k_gap{i}.csv` per entry of `grids.gaps`.
pub fn run_spectrum(
    cfg: &RunConfig,
    res: Resolved,
    out: &Path,
    workers: usize,
) -> std::result::Result<Status, CliError> {
    let mut run = Run::new(cfg, res, out, workers);
    let (det, drive, wp, quad) = (res.detector, res.drive, res.wavepacket, res.quadrature);
    let ks = cfg.grids.k_values();
    let points = grid2(&ks, &cfg.grids.z_values());
    let values = points
        .par_iter()
        .map(|&(k, z)| {
            let u = p_u_density(k, z, &det, &drive)?;
            let m = match det.mass() {
                Mass::Infinite => u,
                Mass::Finite(_) => p_m_density_kz(k, z, &det, &drive, &wp)?,
            };
            Ok((u, m))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("k,z,P_U,P_M,P_U_minus_P_M");
    for (&(k, z), &(u, m)) in points.iter().zip(&values) {
        let (u, m) = (run.density(u), run.density(m));
        table.row(&[Some(k), Some(z), Some(u), Some(m), Some(u - m)]);
    }
    run.table("spectrum.csv", &table)?;

    let mut gaps = vec![det.gap()];
    gaps.extend(&cfg.grids.gaps);
    for (i, &gap) in gaps.iter().enumerate() {
        let d = det.with_gap(gap)?;
        let spectra = ks
            .par_iter()
            .map(|&k| {
                let u = p_u_k(k, &d, &drive, &quad)?;
                let m = match d.mass() {
                    Mass::Infinite => u,
                    Mass::Finite(_) => p_m_k(k, &d, &drive, &wp, &quad)?,
                };
                Ok((u, m))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut table = Table::new("k,P_U_k,P_M_k");
        for (&k, (u, m)) in ks.iter().zip(&spectra) {
            run.record("P_U_k", &[("gap", gap), ("k", k)], u);
            if d.mass().is_finite() {
                run.record("P_M_k", &[("gap", gap), ("k", k)], m);
            }
            let (u, m) = (run.density(u.value), run.density(m.value));
            table.row(&[Some(k), Some(u), Some(m)]);
        }
        let name = if i == 0 {
            "spectrum_k.csv".to_string()
        } else {
            format!("spectrum_k_gap{}.csv", i - 1)
        };
        run.table(&name, &table)?;
    }
    run.finish("spectrum")
}

/// Recoil density on the `(r, ζ)` grid to `recoil.csv`. Needs a finite mass.
pub fn run_recoil(
    cfg: &RunConfig,
    res: Resolved,
    out: &Path,
    workers: usize,
) -> std::result::Result<Status, CliError> {
    if !res.detector.mass().is_finite() {
        return Err(CliError::Config(
            "recoil is undefined for an infinitely heavy detector; set a finite detector.mass".into(),
        ));
    }
    let mut run = Run::new(cfg, res, out, workers);
    let (det, drive, wp, quad) = (res.detector, res.drive, res.wavepacket, res.quadrature);
    let points = grid2(&cfg.grids.r_values(), &cfg.grids.zeta_values());
    let values = points
        .par_iter()
        .map(|&(r, zeta)| p_m_recoil_density(r, zeta, &det, &drive, &wp, &quad))
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new("r,zeta,density,est_error");
    for (&(r, zeta), e) in points.iter().zip(&values) {
        run.record("P_M_recoil", &[("r", r), ("zeta", zeta)], e);
        let density = run.density(e.value);
        table.row(&[Some(r), Some(zeta), Some(density), Some(e.est_error)]);
    }
    run.table("recoil.csv", &table)?;
    run.finish("recoil")
}

/// `max |P_M(k) − P_U(k)|` over the `k` grid for masses `M·γ` to `limit.csv`.
/// Fails with [`Status::CheckFailed`] unless the column strictly decreases.
pub fn run_limit(
    cfg: &RunConfig,
    res: Resolved,
    out: &Path,
    workers: usize,
) -> std::result::Result<Status, CliError> {
    let Mass::Finite(base) = res.detector.mass() else {
        return Err(CliError::Config(
            "the limit study scales a finite detector.mass; got inf".into(),
        ));
    };
    let mut run = Run::new(cfg, res, out, workers);
    let report = infinite_mass_limit_study(
        &cfg.grids.gammas,
        base,
        &res.detector,
        &res.drive,
        &res.wavepacket,
        &cfg.grids.k_values(),
        &res.quadrature,
    )?;
    let mut table = Table::new("gamma,max_abs_dev,rel_dev_at_peak");
    for row in &report.rows {
        table.row(&[Some(row.gamma), Some(row.max_abs_dev), Some(row.rel_dev_at_peak)]);
        let e = IntegralEstimate {
            value: row.max_abs_dev,
            est_error: row.est_error,
            evaluations: 0,
            converged: row.converged,
        };
        run.record("max_abs_dev", &[("gamma", row.gamma), ("mass", row.mass)], &e);
    }
    run.table("limit.csv", &table)?;
    let status = run.finish("limit")?;
    Ok(match status {
        Status::Pass if !report.strictly_decreasing => Status::CheckFailed,
        s => s,
    })
}

#[derive(Debug, Serialize)]
struct OracleCheck {
    pass: bool,
    points: usize,
    max_rel_dev: f64,
    max_abs_dev_in_band: f64,
    rel_tol: f64,
    abs_tol_in_band: f64,
}

#[derive(Debug, Serialize)]
struct TaylorCheck {
    pass: bool,
    skipped: bool,
    points: usize,
    mc_samples: usize,
    max_dev_in_stderr: f64,
    allowed_stderr: f64,
    rejected: usize,
}

#[derive(Debug, Serialize)]
struct ScalingRow {
    accel: f64,
    p_u_total: f64,
    est_error: f64,
    converged: bool,
}

/// Totals against acceleration, reported without a verdict.
#[derive(Debug, Serialize)]
struct Scaling {
    rows: Vec<ScalingRow>,
    /// `R²` of a least-squares line through the origin.
    r2_linear: f64,
    /// Slope of `ln P_U` against `ln a` between the first and last entries.
    log_slope: f64,
}

#[derive(Debug, Serialize)]
struct ValidateReport {
    tool: &'static str,
    version: &'static str,
    pass: bool,
    closed_form_vs_oracle: OracleCheck,
    taylor_vs_monte_carlo: TaylorCheck,
    nonrelativistic_guard: ValidationReport,
    acceleration_scaling: Scaling,
}

fn oracle_check(cfg: &RunConfig, res: &Resolved) -> Result<OracleCheck> {
    let g = &cfg.grids;
    let points = grid2(
        &linspace(g.k_min, g.k_max, ORACLE_GRID.0),
        &linspace(-1.0, 1.0, ORACLE_GRID.1),
    );
    let (det, drive, quad) = (res.detector, res.drive, res.quadrature);
    let devs = points
        .par_iter()
        .map(|&(k, z)| {
            let c = PhotonCoords::new(k, z)?;
            let closed = time_integral_i(&c, &det, &drive)?.value;
            let oracle = time_integral_oracle(det.gap() + k, &c, &drive, &quad)?.value;
            let in_band = (c.kz() * drive.accel()).abs() * drive.duration().powi(2) < ORACLE_BAND;
            let abs = (closed - oracle).norm();
            Ok(if in_band {
                (0.0, abs.max(closed.norm()).max(oracle.norm()))
            } else {
                (abs / oracle.norm(), 0.0)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_rel_dev = devs.iter().fold(0.0f64, |m, d| m.max(d.0));
    let max_abs_dev_in_band = devs.iter().fold(0.0f64, |m, d| m.max(d.1));
    Ok(OracleCheck {
        pass: max_rel_dev <= ORACLE_REL_TOL && max_abs_dev_in_band <= ORACLE_ABS_TOL,
        points: points.len(),
        max_rel_dev,
        max_abs_dev_in_band,
        rel_tol: ORACLE_REL_TOL,
        abs_tol_in_band: ORACLE_ABS_TOL,
    })
}

fn taylor_check(cfg: &RunConfig, res: &Resolved) -> Result<TaylorCheck> {
    let quad = res.quadrature;
    let mut check = TaylorCheck {
        pass: true,
        skipped: !res.detector.mass().is_finite(),
        points: 0,
        mc_samples: quad.mc_samples,
        max_dev_in_stderr: 0.0,
        allowed_stderr: TAYLOR_SIGMAS,
        rejected: 0,
    };
    if check.skipped {
        return Ok(check);
    }
    let k_hi = cfg.grids.k_max.min(TAYLOR_K_MAX).max(cfg.grids.k_min * 2.0);
    let points = grid2(
        &linspace(cfg.grids.k_min, k_hi, TAYLOR_GRID.0),
        &linspace(-1.0, 1.0, TAYLOR_GRID.1),
    );
    let (det, drive, wp) = (res.detector, res.drive, res.wavepacket);
    let samples = GaussianSamples::draw(wp.width(), &quad)?;
    for &(k, z) in &points {
        let mc = p_m_density_kz_sampled(k, z, &det, &drive, &samples)?;
        let taylor = p_m_density_kz(k, z, &det, &drive, &wp)?;
        let dev = (taylor - mc.mean).abs();
        let sigmas = if dev == 0.0 { 0.0 } else { dev / mc.stderr };
        check.max_dev_in_stderr = check.max_dev_in_stderr.max(sigmas);
        check.rejected += mc.rejected;
    }
    check.points = points.len();
    check.pass = check.max_dev_in_stderr <= TAYLOR_SIGMAS && check.rejected == 0;
    Ok(check)
}

fn scaling(cfg: &RunConfig, res: &Resolved) -> Result<Scaling> {
    let rows = cfg
        .grids
        .accels
        .iter()
        .map(|&a| {
            let drive = res.drive.with_accel(a)?;
            let e = p_u_total(&res.detector, &drive, &res.quadrature)?;
            Ok(ScalingRow {
                accel: a,
                p_u_total: e.value,
                est_error: e.est_error,
                converged: e.converged,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let pairs: Vec<(f64, f64)> = rows.iter().map(|r| (r.accel, r.p_u_total)).collect();
    let (first, last) = (pairs[0], pairs[pairs.len() - 1]);
    Ok(Scaling {
        r2_linear: r2_through_origin(&pairs),
        log_slope: (last.1 / first.1).ln() / (last.0 / first.0).ln(),
        rows,
    })
}

/// Coefficient of determination of `y = b x` fitted by least squares, against the
/// mean of `y`.
pub fn r2_through_origin(points: &[(f64, f64)]) -> f64 {
    let sxx: f64 = points.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = points.iter().map(|p| p.0 * p.1).sum();
    let slope = sxy / sxx;
    let mean = points.iter().map(|p| p.1).sum::<f64>() / points.len() as f64;
    let ss_res: f64 = points.iter().map(|p| (p.1 - slope * p.0).powi(2)).sum();
    let ss_tot: f64 = points.iter().map(|p| (p.1 - mean).powi(2)).sum();
    1.0 - ss_res / ss_tot
}

/// Oracle, Monte Carlo and velocity checks to `validate.json`.
pub fn run_validate(
    cfg: &RunConfig,
    res: Resolved,
    out: &Path,
) -> std::result::Result<Status, CliError> {
    let oracle = oracle_check(cfg, &res)?;
    let taylor = taylor_check(cfg, &res)?;
    let guard = validate_nonrelativistic(
        &res.detector,
        &res.drive,
        res.wavepacket.width(),
        res.wavepacket.sigma_guard(),
    );
    let scaling = scaling(cfg, &res)?;
    let converged = scaling.rows.iter().all(|r| r.converged);
    let report = ValidateReport {
        tool: TOOL,
        version: VERSION,
        pass: oracle.pass && taylor.pass && guard.pass,
        closed_form_vs_oracle: oracle,
        taylor_vs_monte_carlo: taylor,
        nonrelativistic_guard: guard,
        acceleration_scaling: scaling,
    };
    write_json(&out.join("validate.json"), &report)
        .map_err(|e| CliError::Io(format!("validate.json: {e}")))?;
    Ok(if !report.pass {
        Status::CheckFailed
    } else if !converged {
        Status::NotConverged
    } else {
        Status::Pass
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r2_of_exact_line_is_one() {
        let pts = [(1.0, 2.0), (2.0, 4.0), (4.0, 8.0)];
        assert!((r2_through_origin(&pts) - 1.0).abs() < 1e-15);
        let quad = [(1.0, 1.0), (2.0, 4.0), (4.0, 16.0), (8.0, 64.0)];
        assert!(r2_through_origin(&quad) < 0.999);
    }

    #[test]
    fn grid2_is_row_major() {
        assert_eq!(grid2(&[1.0, 2.0], &[3.0, 4.0]), vec![(1.0, 3.0), (1.0, 4.0), (2.0, 3.0), (2.0, 4.0)]);
    }
}
