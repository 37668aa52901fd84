//! Heat kernel, discrete convolution and the Duhamel/Picard local solver.
//!
//! The mild-solution operator applied to a trajectory `u` is
//!
//! ```text
//!     Phi[u](t) = G(t) * u0 - int_0^t G_x(t-s) * (b(s) u^{k+1}(s)) ds,
//! ```
//!
//! the fixed points of which solve the drift-diffusion PDE on `[0, t_bar]`.
//! The time integral is evaluated by product integration: on each trajectory
//! interval the kernel factor is integrated exactly using
//!
//! ```text
//!     int_0^eps G_x(sigma, x) dsigma = -sign(x)/2 * erfc(|x| / (2 sqrt(eps))),
//! ```
//!
//! which removes the `(t-s)^{-1/2}`-type kernel-norm singularity at `s = t`
//! from the quadrature entirely (a uniform pointwise rule demonstrably
//! underestimates that boundary layer).

use crate::drift::{DriftClass, DriftSpec};
use crate::error::{Error, Result};
use crate::fit::linear_fit;
use crate::grid::{Field, Grid};
use crate::lorentz::{self, Convention, LorentzIndex};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Heat kernel `G(t,x) = (4 pi t)^{-1/2} exp(-x^2/(4t))`.
pub fn heat_kernel_value(t: f64, x: f64) -> f64 {
    (4.0 * std::f64::consts::PI * t).powf(-0.5) * (-x * x / (4.0 * t)).exp()
}

/// `G_x(t,x) = -x/(2t) G(t,x)`.
pub fn heat_kernel_gradient_value(t: f64, x: f64) -> f64 {
    -x / (2.0 * t) * heat_kernel_value(t, x)
}

/// Kernel sampled at cell centers, with the truncated tail mass reported.
#[derive(Clone, Debug)]
pub struct KernelSample {
    pub t: f64,
    pub values: Field,
    /// `1 - integral of the sample over the grid` (mass lost to truncation).
    pub tail_mass: f64,
}

pub fn heat_kernel(t: f64, grid: Grid) -> Result<KernelSample> {
    if !(t > 0.0) {
        return Err(Error::Numerical(format!("heat kernel needs t > 0, got {t}")));
    }
    let values = Field::from_fn(grid, |x| heat_kernel_value(t, x));
    let tail_mass = 1.0 - values.integral();
    Ok(KernelSample { t, values, tail_mass })
}

pub fn heat_kernel_gradient(t: f64, grid: Grid) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::Numerical(format!("heat kernel needs t > 0, got {t}")));
    }
    Ok(Field::from_fn(grid, |x| heat_kernel_gradient_value(t, x)))
}

/// `int_0^eps G_x(sigma, x) dsigma`, sampled on a grid (zero for eps = 0).
fn kernel_gradient_time_integral(eps: f64, grid: Grid) -> Field {
    if eps <= 0.0 {
        return Field::zeros(grid);
    }
    let scale = 2.0 * eps.sqrt();
    Field::from_fn(grid, |x| -0.5 * x.signum() * libm::erfc(x.abs() / scale))
}

/// Discrete convolution `(f * g)(x) = sum f(y) g(x-y) dx` of two fields with
/// equal spacing; the result lives on the induced symmetric grid of
/// `nf + ng - 1` cells (inputs are treated as zero outside their domains).
pub fn convolve(f: &Field, g: &Field) -> Result<Field> {
    let out_grid = convolution_grid(f, g)?;
    let (a, b) = (f.values(), g.values());
    let dx = f.grid().dx();
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (j, &aj) in a.iter().enumerate() {
        if aj == 0.0 {
            continue;
        }
        for (k, &bk) in b.iter().enumerate() {
            out[j + k] += aj * bk;
        }
    }
    for v in &mut out {
        *v *= dx;
    }
    Field::new(out_grid, out)
}

/// FFT fast path for [`convolve`]; agrees with the direct sum to ~1e-10 but
/// is not bit-identical.
pub fn convolve_fft(f: &Field, g: &Field) -> Result<Field> {
    let out_grid = convolution_grid(f, g)?;
    let n_out = f.len() + g.len() - 1;
    let m = n_out.next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(m);
    let ifft = planner.plan_fft_inverse(m);
    let mut fa: Vec<Complex<f64>> = f
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(m)
        .collect();
    let mut fb: Vec<Complex<f64>> = g
        .values()
        .iter()
        .map(|&v| Complex::new(v, 0.0))
        .chain(std::iter::repeat(Complex::new(0.0, 0.0)))
        .take(m)
        .collect();
    fft.process(&mut fa);
    fft.process(&mut fb);
    let scale = f.grid().dx() / m as f64;
    for (va, vb) in fa.iter_mut().zip(&fb) {
        *va *= vb * scale;
    }
    ifft.process(&mut fa);
    let out = fa[..n_out].iter().map(|c| c.re).collect();
    Field::new(out_grid, out)
}

fn convolution_grid(f: &Field, g: &Field) -> Result<Grid> {
    if !f.grid().same_spacing(&g.grid()) {
        return Err(Error::GridMismatch(
            "convolution requires equal grid spacing".into(),
        ));
    }
    if f.is_empty() || g.is_empty() {
        return Err(Error::GridMismatch("convolution of empty fields".into()));
    }
    let dx = f.grid().dx();
    let n_out = f.len() + g.len() - 1;
    Grid::new(n_out as f64 * dx / 2.0, n_out)
}

fn convolve_auto(f: &Field, g: &Field) -> Result<Field> {
    if f.len() + g.len() > 1024 {
        convolve_fft(f, g)
    } else {
        convolve(f, g)
    }
}

/// Space-time samples of a solution candidate on a uniform time mesh.
#[derive(Clone, Debug)]
pub struct Trajectory {
    grid: Grid,
    times: Vec<f64>,
    states: Vec<Field>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>, states: Vec<Field>) -> Result<Trajectory> {
        if times.len() < 2 || times.len() != states.len() {
            return Err(Error::Numerical(
                "trajectory needs matching times and states, at least two nodes".into(),
            ));
        }
        let grid = states[0].grid();
        if states.iter().any(|s| s.grid() != grid) {
            return Err(Error::GridMismatch("trajectory states on mixed grids".into()));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(Error::Numerical("trajectory times must increase".into()));
        }
        for w in times.windows(2) {
            if ((w[1] - w[0]) - dt).abs() > 1e-9 * dt {
                return Err(Error::Numerical("trajectory time mesh must be uniform".into()));
            }
        }
        Ok(Trajectory { grid, times, states })
    }

    /// Constant-in-time trajectory, the usual Picard starting iterate.
    pub fn constant(u0: &Field, t_bar: f64, n_time: usize) -> Result<Trajectory> {
        if n_time < 2 {
            return Err(Error::Numerical("need at least two time nodes".into()));
        }
        let dt = t_bar / (n_time - 1) as f64;
        let times = (0..n_time).map(|i| i as f64 * dt).collect();
        let states = vec![u0.clone(); n_time];
        Trajectory::new(times, states)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[Field] {
        &self.states
    }

    pub fn last(&self) -> &Field {
        self.states.last().unwrap()
    }

    fn index_of(&self, t: f64) -> Result<usize> {
        let dt = self.times[1] - self.times[0];
        let i = (t / dt).round() as isize;
        if i < 0 || i as usize >= self.times.len() || (t - self.times[i as usize]).abs() > 1e-9 * dt.max(t.abs()) {
            return Err(Error::Numerical(format!(
                "t = {t} is not a node of the trajectory mesh"
            )));
        }
        Ok(i as usize)
    }
}

/// Output of one Duhamel evaluation.
#[derive(Clone, Debug)]
pub struct DuhamelResult {
    pub field: Field,
    /// Set when the trajectory varies so fast between nodes that the
    /// piecewise-constant-in-s product rule is under-resolved.
    pub coarse_mesh: bool,
}

/// `u |u|^k`, the odd extension of the nonlinearity (equal to `u^{k+1}` for
/// the nonnegative states the theory works with).
pub(crate) fn power_k1(u: f64, k: f64) -> f64 {
    u * u.abs().powf(k)
}

/// Apply the mild-solution operator to a trajectory at node time `t`.
pub fn duhamel_apply(traj: &Trajectory, drift: &DriftSpec, k: f64, t: f64) -> Result<DuhamelResult> {
    let grid = traj.grid();
    if grid.n_cells() % 2 == 0 {
        return Err(Error::GridMismatch(
            "Duhamel evaluation needs an odd cell count so convolution output realigns with the grid".into(),
        ));
    }
    let it = traj.index_of(t)?;
    if it == 0 {
        return Ok(DuhamelResult { field: traj.states()[0].clone(), coarse_mesh: false });
    }
    let kernel = heat_kernel(t, grid)?;
    let mut acc = convolve_auto(&kernel.values, &traj.states()[0])?.restricted_to(grid)?;

    // nonlinear source at the trajectory nodes
    let sources: Vec<Field> = traj.times()[..=it]
        .iter()
        .zip(traj.states())
        .map(|(&s, u)| {
            let b = drift.sample(grid, s);
            u.map(|v| power_k1(v, k)).pointwise_mul(&b).unwrap()
        })
        .collect();

    let max_w = sources.iter().map(|w| w.norm_sup()).fold(0.0f64, f64::max);
    let mut coarse = false;
    for j in 0..it {
        let jump = sources[j + 1].sub(&sources[j])?.norm_sup();
        if max_w > 0.0 && jump > 0.25 * max_w {
            coarse = true;
        }
        let k_upper = kernel_gradient_time_integral(t - traj.times()[j], grid);
        let k_lower = kernel_gradient_time_integral(t - traj.times()[j + 1], grid);
        let delta_k = k_upper.sub(&k_lower)?;
        let w_mid = Field::new(
            grid,
            sources[j]
                .values()
                .iter()
                .zip(sources[j + 1].values())
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        )?;
        let term = convolve_auto(&delta_k, &w_mid)?.restricted_to(grid)?;
        acc = acc.sub(&term)?;
    }
    Ok(DuhamelResult { field: acc, coarse_mesh: coarse })
}

/// Configuration of the Picard fixed-point iteration.
#[derive(Clone, Debug)]
pub struct PicardConfig {
    pub t_bar: f64,
    pub n_time: usize,
    pub k: f64,
    /// Selects the contraction norm: `L^{p',1}` for the weak-Lp drift class,
    /// `L^2` for the gradient class.
    pub class: DriftClass,
    pub p: f64,
    /// Sup-norm ball radius; defaults to twice the initial sup.
    pub radius: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

/// Iteration record of a Picard solve.
#[derive(Clone, Debug)]
pub struct PicardState {
    pub iterates: Vec<Trajectory>,
    /// Successive-iterate distances in the contraction norm.
    pub distances: Vec<f64>,
    /// Ratios of consecutive distances.
    pub contraction_estimates: Vec<f64>,
    pub radius: f64,
    pub coarse_mesh: bool,
}

#[derive(Clone, Debug)]
pub struct PicardSolution {
    pub trajectory: Trajectory,
    pub state: PicardState,
}

fn contraction_distance(u: &Field, v: &Field, class: DriftClass, p: f64) -> Result<f64> {
    let diff = u.sub(v)?;
    match class {
        DriftClass::WeakLp => {
            let pp = lorentz::conjugate(p);
            if pp == 1.0 {
                Ok(diff.mass())
            } else {
                lorentz::lorentz_norm(&diff, LorentzIndex::new(pp, 1.0)?, Convention::DoubleStar)
            }
        }
        DriftClass::GradWeakLp => Ok(diff.norm_l2()),
    }
}

/// Fixed-point iteration for the mild solution on `[0, t_bar]`.
///
/// Fails with a structured error when the measured contraction ratio reaches
/// one or an iterate escapes the sup-norm ball (both signal that `t_bar` is
/// too large for the data).
pub fn picard_solve(u0: &Field, drift: &DriftSpec, cfg: &PicardConfig) -> Result<PicardSolution> {
    if !(cfg.t_bar > 0.0) {
        return Err(Error::Numerical("t_bar must be positive".into()));
    }
    if !u0.is_finite() {
        return Err(Error::NonFinite("Picard initial datum".into()));
    }
    let radius = cfg.radius.unwrap_or(2.0 * u0.norm_sup());
    let mut current = Trajectory::constant(u0, cfg.t_bar, cfg.n_time)?;
    let mut iterates = vec![current.clone()];
    let mut distances = Vec::new();
    let mut ratios = Vec::new();
    let mut coarse = false;

    for _ in 0..cfg.max_iter {
        let mut states = Vec::with_capacity(cfg.n_time);
        states.push(u0.clone());
        for i in 1..cfg.n_time {
            let out = duhamel_apply(&current, drift, cfg.k, current.times()[i])?;
            coarse |= out.coarse_mesh;
            states.push(out.field);
        }
        let next = Trajectory::new(current.times().to_vec(), states)?;

        let sup = next
            .states()
            .iter()
            .map(|s| s.norm_sup())
            .fold(0.0f64, f64::max);
        if sup > radius * (1.0 + 1e-9) {
            return Err(Error::NonContractive { ratio: sup / radius, t_bar: cfg.t_bar });
        }

        let mut dist = 0.0f64;
        for (a, b) in next.states().iter().zip(current.states()) {
            dist = dist.max(contraction_distance(a, b, cfg.class, cfg.p)?);
        }
        if let Some(prev) = distances.last() {
            if *prev > 0.0 {
                let ratio = dist / prev;
                ratios.push(ratio);
                if ratio >= 1.0 {
                    return Err(Error::NonContractive { ratio, t_bar: cfg.t_bar });
                }
            }
        }
        distances.push(dist);
        iterates.push(next.clone());
        current = next;
        if dist < cfg.tol {
            return Ok(PicardSolution {
                trajectory: current,
                state: PicardState {
                    iterates,
                    distances,
                    contraction_estimates: ratios,
                    radius,
                    coarse_mesh: coarse,
                },
            });
        }
    }
    Err(Error::Numerical(format!(
        "Picard iteration did not reach tol {} in {} iterations (last distance {:.3e})",
        cfg.tol,
        cfg.max_iter,
        distances.last().copied().unwrap_or(f64::NAN)
    )))
}

/// Log-log fit of `||G_x(t)||_{p,1}` against `t`.
#[derive(Clone, Debug)]
pub struct GradientScalingFit {
    pub slope: f64,
    /// Predicted exponent `1/(2p) - 1`.
    pub expected: f64,
    pub norms: Vec<f64>,
}

/// Fit the decay exponent of the kernel-gradient Lorentz norm over a set of
/// times spanning at least a decade.
pub fn kernel_gradient_scaling(p: f64, times: &[f64], grid: Grid) -> Result<GradientScalingFit> {
    if times.len() < 3 {
        return Err(Error::Numerical("need at least 3 times for the scaling fit".into()));
    }
    if !(p > 1.0) || p.is_infinite() {
        return Err(Error::Exponents(format!(
            "kernel gradient scaling needs finite p > 1, got {p}"
        )));
    }
    let tmin = times.iter().copied().fold(f64::INFINITY, f64::min);
    let tmax = times.iter().copied().fold(0.0f64, f64::max);
    if !(tmin > 0.0) || tmax / tmin < 10.0 * (1.0 - 1e-9) {
        return Err(Error::Numerical("times must be positive and span at least a decade".into()));
    }
    let idx = LorentzIndex::new(p, 1.0)?;
    let mut lt = Vec::with_capacity(times.len());
    let mut ln = Vec::with_capacity(times.len());
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let gx = heat_kernel_gradient(t, grid)?;
        let n = lorentz::lorentz_norm(&gx, idx, Convention::DoubleStar)?;
        norms.push(n);
        lt.push(t.ln());
        ln.push(n.ln());
    }
    let (slope, _) = linear_fit(&lt, &ln);
    Ok(GradientScalingFit { slope, expected: 1.0 / (2.0 * p) - 1.0, norms })
}

/// Exponential-envelope check for `int (1+x^2)|u(t)|` along a trajectory.
#[derive(Clone, Debug)]
pub struct MomentGrowthReport {
    /// Smallest `C` with `w(t) <= w(0) exp(C (1+r^k) t)` at every node.
    pub minimal_c: f64,
    /// `w(t_j) = m(t_j) + E(t_j)` at the trajectory nodes.
    pub weights: Vec<f64>,
}

pub fn moment_growth_check(traj: &Trajectory, k: f64, r: f64) -> Result<MomentGrowthReport> {
    let mut weights = Vec::with_capacity(traj.states().len());
    for state in traj.states() {
        let m = lorentz::MomentSet::of(state)?;
        weights.push(m.mass + m.energy);
    }
    let w0 = weights[0];
    if w0 <= 0.0 {
        return Ok(MomentGrowthReport { minimal_c: 0.0, weights });
    }
    let mut c = 0.0f64;
    for (t, w) in traj.times().iter().zip(&weights).skip(1) {
        if *w > w0 {
            c = c.max((w / w0).ln() / ((1.0 + r.powf(k)) * t));
        }
    }
    Ok(MomentGrowthReport { minimal_c: c, weights })
}
