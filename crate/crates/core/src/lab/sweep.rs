//! Cell execution, regime classification and sweep orchestration.
//!
//! Every cell gets its own directory with a config copy, the diagnostics
//! series as CSV, an optional self-similar diagnostics CSV and a flat
//! `report.txt`. A sweep writes an `index.csv` once all cells finished.
//! Cells are independent; failures (including panics) are isolated and
//! recorded as inconclusive entries.

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::lab::config::{fmt_f64, RunSpec, SweepSpec};
use crate::selfsim;
use crate::solver::{self, Classification, RunReport};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

/// Expected regime from the critical exponent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
}

impl Regime {
    pub fn of(k: f64, critic: f64) -> Regime {
        if k < critic - 1e-9 {
            Regime::Subcritical
        } else if k <= critic + 1e-9 {
            Regime::Critical
        } else {
            Regime::Supercritical
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Supercritical => "supercritical",
        }
    }
}

/// Observed classification of a cell.
#[derive(Clone, Debug, PartialEq)]
pub enum CellOutcome {
    GlobalNondecay,
    GlobalDecay,
    BlowUp,
    Inconclusive(String),
}

impl CellOutcome {
    pub fn name(&self) -> &'static str {
        match self {
            CellOutcome::GlobalNondecay => "global_nondecay",
            CellOutcome::GlobalDecay => "global_decay",
            CellOutcome::BlowUp => "blow_up",
            CellOutcome::Inconclusive(_) => "inconclusive",
        }
    }
}

/// One entry of the phase matrix.
#[derive(Clone, Debug)]
pub struct PhaseCell {
    pub p: f64,
    pub k: f64,
    pub regime_expected: Regime,
    pub outcome: CellOutcome,
    pub decay_exponent: Option<f64>,
    pub dir: PathBuf,
}

/// Decay-exponent band classified as `t^{-1/2}`-type decay.
pub const DECAY_BAND: (f64, f64) = (-0.65, -0.35);
/// Band classified as bounded non-decay.
pub const NONDECAY_BAND: (f64, f64) = (-0.1, 0.1);

fn classify(report: &RunReport, exponent: Option<f64>) -> CellOutcome {
    match report.classification {
        Classification::BlowUp | Classification::DtCollapse => CellOutcome::BlowUp,
        Classification::Completed => match exponent {
            Some(e) if e >= DECAY_BAND.0 && e <= DECAY_BAND.1 => CellOutcome::GlobalDecay,
            Some(e) if e > NONDECAY_BAND.0 && e <= NONDECAY_BAND.1 => CellOutcome::GlobalNondecay,
            Some(e) => CellOutcome::Inconclusive(format!("decay exponent {e} outside both bands")),
            None => CellOutcome::Inconclusive("no decay fit available".into()),
        },
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text.as_bytes())?;
    Ok(())
}

/// Diagnostics series CSV (shortest round-trip float formatting).
pub fn series_csv(report: &RunReport) -> String {
    let mut s = String::from("t,sup_norm,l2_norm,mass,energy,boundary_flux\n");
    for r in &report.series {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fmt_f64(r.t),
            fmt_f64(r.sup_norm),
            fmt_f64(r.l2_norm),
            fmt_f64(r.mass),
            fmt_f64(r.energy),
            fmt_f64(r.boundary_flux)
        );
    }
    s
}

/// Outcome of one executed cell.
#[derive(Clone, Debug)]
pub struct CellReport {
    pub outcome: CellOutcome,
    pub decay_exponent: Option<f64>,
    pub report: RunReport,
}

/// Execute one cell and persist its artifacts under `dir`.
pub fn run_cell(spec: &RunSpec, dir: &Path) -> Result<CellReport> {
    std::fs::create_dir_all(dir)?;
    write_file(&dir.join("config.txt"), &spec.to_config_text())?;

    let rc = spec.build()?;
    let report = solver::solve(&rc)?;
    write_file(&dir.join("series.csv"), &series_csv(&report))?;

    let (t_lo, t_hi) = spec
        .fit_window
        .unwrap_or((spec.t_max / 10.0, spec.t_max));
    let decay_exponent = if report.classification == Classification::Completed {
        selfsim::decay_fit_physical(&report.series, t_lo, t_hi).ok()
    } else {
        None
    };
    let outcome = classify(&report, decay_exponent);

    let mut selfsim_lines = None;
    if let Some(ss) = &spec.selfsim {
        if !report.snapshots.is_empty() {
            let t_ref = ss.t_ref_factor * spec.t_max;
            let y_grid = Grid::new(ss.y_half_width, ss.y_n)?;
            let frames =
                selfsim::frames_from_snapshots(&report.snapshots, t_ref, y_grid, &rc.drift, spec.k)?;
            let level = selfsim::largest_admissible_level(&frames, &ss.level_candidates, 1e-3)?;
            let mut csv = String::from(
                "tau,t,lambda,l2v_sq,predicted_l2v_sq,sup_v,eta_integral,dissipation_lhs,dissipation_rhs,margin\n",
            );
            let diag = level
                .map(|a| selfsim::entropy_series(&frames, a))
                .transpose()?;
            for (j, f) in frames.iter().enumerate() {
                let l2sq = f.v.norm_l2().powi(2);
                // predicted from the stored physical snapshot
                let u_l2sq = report.snapshots[j].1.norm_l2().powi(2);
                let predicted = f.t_ref.sqrt() * (-f.tau / 2.0).exp() * u_l2sq;
                let (ei, lhs, rhs, margin) = match &diag {
                    Some(d) => (
                        d[j].eta_integral,
                        d[j].dissipation_lhs,
                        d[j].dissipation_rhs,
                        d[j].margin,
                    ),
                    None => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
                };
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{},{},{},{},{},{}",
                    fmt_f64(f.tau),
                    fmt_f64(f.t_phys),
                    fmt_f64(f.lambda),
                    fmt_f64(l2sq),
                    fmt_f64(predicted),
                    fmt_f64(f.v.norm_sup()),
                    fmt_f64(ei),
                    fmt_f64(lhs),
                    fmt_f64(rhs),
                    fmt_f64(margin)
                );
            }
            let budget = level
                .map(|a| selfsim::entropy_budget(&frames, a))
                .transpose()?;
            let l2_slope = selfsim::l2_decay_fit(&frames).ok();
            write_file(&dir.join("selfsim.csv"), &csv)?;
            selfsim_lines = Some((level, budget, l2_slope));
        }
    }

    let mut rep = String::new();
    let _ = writeln!(rep, "classification = {}", report.classification.name());
    let _ = writeln!(rep, "outcome = {}", outcome.name());
    if let CellOutcome::Inconclusive(reason) = &outcome {
        let _ = writeln!(rep, "reason = {reason}");
    }
    let _ = writeln!(rep, "p = {}", fmt_f64(spec.p));
    let _ = writeln!(rep, "k = {}", fmt_f64(spec.k));
    let _ = writeln!(rep, "critic = {}", fmt_f64(spec.critic()));
    let _ = writeln!(rep, "regime_expected = {}", Regime::of(spec.k, spec.critic()).name());
    let _ = writeln!(rep, "t_final = {}", fmt_f64(report.t_final));
    let _ = writeln!(rep, "steps = {}", report.steps);
    let _ = writeln!(rep, "initial_sup = {}", fmt_f64(report.initial_sup));
    let _ = writeln!(rep, "peak_sup = {}", fmt_f64(report.peak_sup));
    let _ = writeln!(rep, "initial_mass = {}", fmt_f64(report.initial_mass));
    let _ = writeln!(rep, "boundary_flux = {}", fmt_f64(report.cumulative_boundary_flux));
    let _ = writeln!(rep, "clamped_mass = {}", fmt_f64(report.clamped_mass));
    let _ = writeln!(rep, "domain_too_small = {}", report.domain_too_small);
    let _ = writeln!(rep, "backward_euler_steps = {}", report.backward_euler_steps);
    if let Some(e) = decay_exponent {
        let _ = writeln!(rep, "decay_exponent = {}", fmt_f64(e));
    }
    if let Some((level, budget, l2_slope)) = selfsim_lines {
        if let Some(a) = level {
            let _ = writeln!(rep, "selfsim_level = {}", fmt_f64(a));
        }
        if let Some(b) = budget {
            let _ = writeln!(rep, "selfsim_budget = {}", fmt_f64(b));
        }
        if let Some(s) = l2_slope {
            let _ = writeln!(rep, "selfsim_l2_slope = {}", fmt_f64(s));
        }
    }
    write_file(&dir.join("report.txt"), &rep)?;

    Ok(CellReport { outcome, decay_exponent, report })
}

fn cell_dir_name(i: usize, spec: &RunSpec) -> String {
    format!("cell_{:03}_p{}_k{}", i, fmt_f64(spec.p), fmt_f64(spec.k))
}

/// Run all cells of a sweep on a bounded worker pool and write the index.
pub fn run_sweep(sweep: &SweepSpec, out_dir: &Path) -> Result<Vec<PhaseCell>> {
    std::fs::create_dir_all(out_dir)?;
    let specs = sweep.cells();
    let n = specs.len();
    let results: Mutex<Vec<Option<PhaseCell>>> = Mutex::new(vec![None; n]);
    let next = AtomicUsize::new(0);
    let workers = sweep.jobs.min(n.max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= n {
                    break;
                }
                let spec = &specs[i];
                let dir = out_dir.join(cell_dir_name(i, spec));
                let executed = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| {
                    run_cell(spec, &dir)
                }));
                let (outcome, exponent) = match executed {
                    Ok(Ok(cr)) => (cr.outcome, cr.decay_exponent),
                    Ok(Err(e)) => (CellOutcome::Inconclusive(e.to_string()), None),
                    Err(_) => (CellOutcome::Inconclusive("cell panicked".into()), None),
                };
                if matches!(outcome, CellOutcome::Inconclusive(_)) {
                    // leave a minimal record even when the run failed early
                    let _ = std::fs::create_dir_all(&dir);
                    let mut rep = String::new();
                    let _ = writeln!(rep, "outcome = {}", outcome.name());
                    if let CellOutcome::Inconclusive(reason) = &outcome {
                        let _ = writeln!(rep, "reason = {reason}");
                    }
                    let _ = writeln!(rep, "p = {}", fmt_f64(spec.p));
                    let _ = writeln!(rep, "k = {}", fmt_f64(spec.k));
                    let _ = std::fs::write(dir.join("report.txt"), rep);
                }
                let cell = PhaseCell {
                    p: spec.p,
                    k: spec.k,
                    regime_expected: Regime::of(spec.k, spec.critic()),
                    outcome,
                    decay_exponent: exponent,
                    dir: dir.clone(),
                };
                results.lock().unwrap()[i] = Some(cell);
            });
        }
    });

    let cells: Vec<PhaseCell> = results
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|c| c.expect("all cells executed"))
        .collect();

    let mut index = String::from("cell,p,k,regime_expected,classification,decay_exponent,dir\n");
    for (i, c) in cells.iter().enumerate() {
        let _ = writeln!(
            index,
            "{},{},{},{},{},{},{}",
            i,
            fmt_f64(c.p),
            fmt_f64(c.k),
            c.regime_expected.name(),
            c.outcome.name(),
            c.decay_exponent.map(fmt_f64).unwrap_or_default(),
            c.dir.file_name().unwrap().to_string_lossy()
        );
    }
    write_file(&out_dir.join("index.csv"), &index)?;
    Ok(cells)
}

/// Read back a `series.csv` (used by the decay-fit command and the report
/// renderer).
pub fn read_series_csv(path: &Path) -> Result<Vec<solver::DiagRow>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "t,sup_norm,l2_norm,mass,energy,boundary_flux" {
                return Err(Error::Config(format!(
                    "{}: unexpected series header `{line}`",
                    path.display()
                )));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 6 {
            return Err(Error::Config(format!(
                "{} line {}: expected 6 columns",
                path.display(),
                i + 1
            )));
        }
        let f = |j: usize| -> Result<f64> {
            cols[j]
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("{} line {}: {e}", path.display(), i + 1)))
        };
        rows.push(solver::DiagRow {
            t: f(0)?,
            sup_norm: f(1)?,
            l2_norm: f(2)?,
            mass: f(3)?,
            energy: f(4)?,
            boundary_flux: f(5)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lab::config::{DriftChoice, LabConfig, U0Shape};

    fn tiny_spec() -> RunSpec {
        RunSpec {
            case: crate::drift::DriftClass::WeakLp,
            p: 4.0,
            k: 0.5,
            t_max: 0.2,
            seed: 1,
            mass: 1.0,
            u0: U0Shape::Gaussian { width: 0.5, center: 0.0 },
            grid_l: 10.0,
            grid_n: 256,
            drift: DriftChoice::Stationary,
            blowup_factor: 1e3,
            dt_floor: 1e-10,
            dt_max: Some(0.005),
            cfl_number: 0.45,
            theta: 0.5,
            diagnostics_stride: 4,
            scheme: crate::solver::AdvectionScheme::Muscl,
            fit_window: None,
            selfsim: None,
        }
    }

    #[test]
    fn run_cell_writes_artifacts_and_reads_back() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("cell");
        let cr = run_cell(&tiny_spec(), &dir).unwrap();
        assert!(matches!(
            cr.report.classification,
            Classification::Completed
        ));
        let series = read_series_csv(&dir.join("series.csv")).unwrap();
        assert_eq!(series.len(), cr.report.series.len());
        assert!((series[0].mass - cr.report.series[0].mass).abs() < 1e-15);
        let cfg_text = std::fs::read_to_string(dir.join("config.txt")).unwrap();
        let re = RunSpec::from_config(&LabConfig::parse(&cfg_text).unwrap()).unwrap();
        assert_eq!(re.p, 4.0);
    }

    #[test]
    fn run_cell_with_rescaling_diagnostics_writes_selfsim_csv() {
        let tmp = tempfile::tempdir().unwrap();
        let mut spec = tiny_spec();
        spec.t_max = 1.0;
        spec.grid_l = 20.0;
        spec.grid_n = 512;
        spec.dt_max = Some(0.01);
        spec.selfsim = Some(crate::lab::config::SelfsimSpec {
            frames: 8,
            t_ref_factor: 1.05,
            y_half_width: 6.0,
            y_n: 512,
            level_candidates: vec![0.8, 0.4, 0.2],
        });
        let dir = tmp.path().join("cell");
        let cr = run_cell(&spec, &dir).unwrap();
        assert_eq!(cr.report.snapshots.len(), 8);
        let csv = std::fs::read_to_string(dir.join("selfsim.csv")).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "tau,t,lambda,l2v_sq,predicted_l2v_sq,sup_v,eta_integral,dissipation_lhs,dissipation_rhs,margin"
        );
        assert_eq!(lines.count(), 8);
        let report = std::fs::read_to_string(dir.join("report.txt")).unwrap();
        assert!(report.contains("selfsim_level ="), "{report}");
    }

    #[test]
    fn sweep_isolates_invalid_cells() {
        let tmp = tempfile::tempdir().unwrap();
        let text = "
[sweep]
case = weak_lp
p_list = 4
k_list = 0.5, -1
jobs = 2
seed = 3

[run]
t_max = 0.1
u0_width = 0.5

[grid]
half_width = 10
n_cells = 128

[drift]
family = stationary

[solver]
dt_max = 0.005
diagnostics_stride = 1
";
        let sweep = SweepSpec::from_config(&LabConfig::parse(text).unwrap()).unwrap();
        let cells = run_sweep(&sweep, tmp.path()).unwrap();
        assert_eq!(cells.len(), 2);
        let bad: Vec<_> = cells
            .iter()
            .filter(|c| matches!(c.outcome, CellOutcome::Inconclusive(_)))
            .collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].k, -1.0);
        // the good cell has full artifacts, the bad one a reasoned report
        let index = std::fs::read_to_string(tmp.path().join("index.csv")).unwrap();
        assert_eq!(index.lines().count(), 3);
        assert!(index.contains("inconclusive"));
    }

    #[test]
    fn repeated_sweep_is_byte_identical() {
        let text = "
[sweep]
case = weak_lp
p_list = 4
k_list = 0.5
jobs = 2
seed = 11

[run]
t_max = 0.1
u0_width = 0.5

[grid]
half_width = 10
n_cells = 128

[drift]
family = stationary

[solver]
dt_max = 0.005
diagnostics_stride = 1
";
        let sweep = SweepSpec::from_config(&LabConfig::parse(text).unwrap()).unwrap();
        let t1 = tempfile::tempdir().unwrap();
        let t2 = tempfile::tempdir().unwrap();
        run_sweep(&sweep, t1.path()).unwrap();
        run_sweep(&sweep, t2.path()).unwrap();
        let walk = |root: &Path| {
            let mut files: Vec<PathBuf> = Vec::new();
            let mut stack = vec![root.to_path_buf()];
            while let Some(d) = stack.pop() {
                for e in std::fs::read_dir(&d).unwrap() {
                    let p = e.unwrap().path();
                    if p.is_dir() {
                        stack.push(p);
                    } else {
                        files.push(p);
                    }
                }
            }
            files.sort();
            files
        };
        let f1 = walk(t1.path());
        let f2 = walk(t2.path());
        assert_eq!(f1.len(), f2.len());
        for (a, b) in f1.iter().zip(&f2) {
            assert_eq!(
                a.strip_prefix(t1.path()).unwrap(),
                b.strip_prefix(t2.path()).unwrap()
            );
            assert_eq!(
                std::fs::read(a).unwrap(),
                std::fs::read(b).unwrap(),
                "{a:?} differs"
            );
        }
    }
}
