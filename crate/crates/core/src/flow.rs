//! Adaptive Dormand–Prince 5(4) integration with dense output, event
//! location and variational equations.

use crate::error::{Cr3bpError, Result};
use crate::linalg::{j4, symplectic_defect4};
use nalgebra::{Matrix4, Vector4};

/// Autonomous Hamiltonian on a 4-dimensional phase space with `ż = J∇H`.
pub trait HamiltonianSystem: Sync {
    fn energy(&self, z: &Vector4<f64>) -> Result<f64>;
    fn gradient(&self, z: &Vector4<f64>) -> Result<Vector4<f64>>;
    fn hessian(&self, z: &Vector4<f64>) -> Result<Matrix4<f64>>;

    fn field(&self, z: &Vector4<f64>) -> Result<Vector4<f64>> {
        let g = self.gradient(z)?;
        Ok(Vector4::new(-g[2], -g[3], g[0], g[1]))
    }
}

pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rhs(&self, t: f64, y: &[f64], dy: &mut [f64]) -> Result<()>;
}

/// `ż = J∇H(z)`.
pub struct StateFlow<'a, S: ?Sized>(pub &'a S);

impl<S: HamiltonianSystem + ?Sized> OdeSystem for StateFlow<'_, S> {
    fn dim(&self) -> usize {
        4
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let f = self.0.field(&Vector4::from_column_slice(&y[..4]))?;
        dy[..4].copy_from_slice(f.as_slice());
        Ok(())
    }
}

/// State plus `ψ̇ = J∇²H(z)ψ`; `ψ` stored column-major in `y[4..20]`.
pub struct VariationalFlow<'a, S: ?Sized>(pub &'a S);

impl<S: HamiltonianSystem + ?Sized> OdeSystem for VariationalFlow<'_, S> {
    fn dim(&self) -> usize {
        20
    }

    fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
        let z = Vector4::from_column_slice(&y[..4]);
        let f = self.0.field(&z)?;
        let b = self.0.hessian(&z)?;
        let psi = Matrix4::from_column_slice(&y[4..20]);
        let dpsi = j4() * b * psi;
        dy[..4].copy_from_slice(f.as_slice());
        dy[4..20].copy_from_slice(dpsi.as_slice());
        Ok(())
    }
}

pub fn variational_initial(z0: &Vector4<f64>) -> Vec<f64> {
    let mut y = Vec::with_capacity(20);
    y.extend_from_slice(z0.as_slice());
    y.extend_from_slice(Matrix4::<f64>::identity().as_slice());
    y
}

pub fn split_variational(y: &[f64]) -> (Vector4<f64>, Matrix4<f64>) {
    (
        Vector4::from_column_slice(&y[..4]),
        Matrix4::from_column_slice(&y[4..20]),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
    Both,
}

type EventFn<'a> = dyn Fn(f64, &[f64]) -> f64 + Sync + 'a;

pub struct EventSpec<'a> {
    pub func: Box<EventFn<'a>>,
    pub direction: Direction,
    pub terminal: bool,
}

impl<'a> EventSpec<'a> {
    pub fn new<F>(func: F, direction: Direction, terminal: bool) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Sync + 'a,
    {
        Self {
            func: Box::new(func),
            direction,
            terminal,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EventHit {
    pub index: usize,
    pub t: f64,
    pub y: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Status {
    Completed,
    Terminated(usize),
    Failed(Cr3bpError),
}

/// One accepted step with its quartic dense-output coefficients.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    rcont: [Vec<f64>; 5],
}

impl DenseStep {
    pub fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        let [r1, r2, r3, r4, r5] = &self.rcont;
        (0..r1.len())
            .map(|i| r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i]))))
            .collect()
    }

    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub t: Vec<f64>,
    pub y: Vec<Vec<f64>>,
    pub dense: Vec<DenseStep>,
    pub events: Vec<EventHit>,
    pub status: Status,
    pub n_steps: usize,
}

impl Solution {
    pub fn last(&self) -> (f64, &[f64]) {
        (*self.t.last().unwrap(), self.y.last().unwrap())
    }

    pub fn ok(self) -> Result<Self> {
        match &self.status {
            Status::Failed(e) => Err(e.clone()),
            _ => Ok(self),
        }
    }

    /// Dense interpolation, requires `record_dense`.
    pub fn interpolate(&self, t: f64) -> Option<Vec<f64>> {
        if self.dense.is_empty() {
            return None;
        }
        let forward = self.dense[0].h > 0.0;
        let idx = self
            .dense
            .partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        let idx = idx.min(self.dense.len() - 1);
        Some(self.dense[idx].eval(t))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    pub h_max: f64,
    pub record_steps: bool,
    pub record_dense: bool,
}

impl Default for Integrator {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-14,
            max_steps: 2_000_000,
            h_max: f64::INFINITY,
            record_steps: true,
            record_dense: false,
        }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

struct Workspace {
    k: [Vec<f64>; 7],
    tmp: Vec<f64>,
    y1: Vec<f64>,
    err: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            k: std::array::from_fn(|_| vec![0.0; n]),
            tmp: vec![0.0; n],
            y1: vec![0.0; n],
            err: vec![0.0; n],
        }
    }
}

/// One Dormand–Prince step; `w.k[0]` must hold `f(t, y)` on entry.
#[allow(clippy::needless_range_loop)]
fn dp_step<S: OdeSystem + ?Sized>(
    sys: &S,
    t: f64,
    y: &[f64],
    h: f64,
    w: &mut Workspace,
) -> Result<()> {
    let n = y.len();
    let stages: [(f64, &[f64]); 5] = [
        (C2, &[A21]),
        (C3, &[A31, A32]),
        (C4, &[A41, A42, A43]),
        (C5, &[A51, A52, A53, A54]),
        (1.0, &[A61, A62, A63, A64, A65]),
    ];
    for (s, (c, a)) in stages.iter().enumerate() {
        for i in 0..n {
            let mut acc = 0.0;
            for (j, aj) in a.iter().enumerate() {
                acc += aj * w.k[j][i];
            }
            w.tmp[i] = y[i] + h * acc;
        }
        sys.rhs(t + c * h, &w.tmp, &mut w.k[s + 1])?;
    }
    for i in 0..n {
        w.y1[i] = y[i]
            + h * (A71 * w.k[0][i]
                + A73 * w.k[2][i]
                + A74 * w.k[3][i]
                + A75 * w.k[4][i]
                + A76 * w.k[5][i]);
    }
    sys.rhs(t + h, &w.y1, &mut w.k[6])?;
    for i in 0..n {
        w.err[i] = h
            * (E1 * w.k[0][i]
                + E3 * w.k[2][i]
                + E4 * w.k[3][i]
                + E5 * w.k[4][i]
                + E6 * w.k[5][i]
                + E7 * w.k[6][i]);
    }
    Ok(())
}

fn dense_coeffs(y0: &[f64], y1: &[f64], h: f64, w: &Workspace) -> [Vec<f64>; 5] {
    let n = y0.len();
    let mut r = std::array::from_fn(|_| vec![0.0; n]);
    for i in 0..n {
        let ydiff = y1[i] - y0[i];
        let bspl = h * w.k[0][i] - ydiff;
        r[0][i] = y0[i];
        r[1][i] = ydiff;
        r[2][i] = bspl;
        r[3][i] = ydiff - h * w.k[6][i] - bspl;
        r[4][i] = h
            * (D1 * w.k[0][i]
                + D3 * w.k[2][i]
                + D4 * w.k[3][i]
                + D5 * w.k[4][i]
                + D6 * w.k[5][i]
                + D7 * w.k[6][i]);
    }
    r
}

fn sign_change(prev: f64, cur: f64, dir: Direction) -> bool {
    match dir {
        Direction::Increasing => prev < 0.0 && cur >= 0.0,
        Direction::Decreasing => prev > 0.0 && cur <= 0.0,
        Direction::Both => (prev < 0.0 && cur >= 0.0) || (prev > 0.0 && cur <= 0.0),
    }
}

impl Integrator {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    pub fn dense(mut self) -> Self {
        self.record_dense = true;
        self
    }

    pub fn sparse(mut self) -> Self {
        self.record_steps = false;
        self
    }

    #[allow(clippy::needless_range_loop)]
    fn error_norm(&self, y0: &[f64], w: &Workspace) -> f64 {
        let n = y0.len();
        let mut acc = 0.0;
        for i in 0..n {
            let sc = self.atol + self.rtol * y0[i].abs().max(w.y1[i].abs());
            let e = w.err[i] / sc;
            acc += e * e;
        }
        (acc / n as f64).sqrt()
    }

    /// Exact (single-step) state at `t` starting from the accepted point `(t0, y0)`.
    fn restep<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        t: f64,
    ) -> Result<Vec<f64>> {
        let n = y0.len();
        let mut w = Workspace::new(n);
        if t == t0 {
            return Ok(y0.to_vec());
        }
        sys.rhs(t0, y0, &mut w.k[0])?;
        // split into substeps so the local error stays within the accepted step's
        let h = t - t0;
        dp_step(sys, t0, y0, h, &mut w)?;
        Ok(w.y1.clone())
    }

    pub fn integrate<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        events: &[EventSpec<'_>],
    ) -> Solution {
        let n = sys.dim();
        assert_eq!(y0.len(), n);
        let mut sol = Solution {
            t: vec![t0],
            y: vec![y0.to_vec()],
            dense: Vec::new(),
            events: Vec::new(),
            status: Status::Completed,
            n_steps: 0,
        };
        if t_end == t0 {
            return sol;
        }
        let dir = (t_end - t0).signum();
        let mut w = Workspace::new(n);
        let mut t = t0;
        let mut y = y0.to_vec();
        if let Err(e) = sys.rhs(t, &y, &mut w.k[0]) {
            sol.status = Status::Failed(e);
            return sol;
        }
        let mut g_prev: Vec<f64> = events.iter().map(|e| (e.func)(t, &y)).collect();
        // initial step guess
        let d0 = y.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-5);
        let d1 = w.k[0].iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-5);
        let mut h = (0.01 * d0 / d1)
            .min((t_end - t0).abs())
            .min(self.h_max)
            .max(1e-10)
            * dir;
        let mut last_t = t;
        let mut rejected = false;
        loop {
            if sol.n_steps >= self.max_steps {
                sol.status = Status::Failed(Cr3bpError::Integration {
                    t,
                    reason: "maximum number of steps exceeded".into(),
                });
                break;
            }
            if (t + h - t_end) * dir > 0.0 {
                h = t_end - t;
            }
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                sol.status = Status::Failed(Cr3bpError::Integration {
                    t,
                    reason: "step size underflow".into(),
                });
                break;
            }
            if let Err(e) = dp_step(sys, t, &y, h, &mut w) {
                // treat a failed stage evaluation as a rejected step
                h *= 0.25;
                if h.abs() < 1e-14 * t.abs().max(1.0) {
                    sol.status = Status::Failed(e);
                    break;
                }
                rejected = true;
                continue;
            }
            let err = self.error_norm(&y, &w);
            if !err.is_finite() || err > 1.0 {
                let fac = if err.is_finite() {
                    (0.9 * err.powf(-0.2)).max(0.2)
                } else {
                    0.2
                };
                h *= fac;
                rejected = true;
                continue;
            }
            sol.n_steps += 1;
            let t_new = t + h;
            let y_new = w.y1.clone();
            let dense = dense_coeffs(&y, &y_new, h, &w);
            let step = DenseStep {
                t0: t,
                h,
                rcont: dense,
            };
            // events
            let mut stop: Option<EventHit> = None;
            for (idx, ev) in events.iter().enumerate() {
                let g_new = (ev.func)(t_new, &y_new);
                let g_old = g_prev[idx];
                if g_old != 0.0 && sign_change(g_old, g_new, ev.direction) {
                    let hit = self.locate(sys, ev, &step, &y, g_old, g_new, idx);
                    match hit {
                        Ok(hit) => {
                            if ev.terminal {
                                let better = stop
                                    .as_ref()
                                    .map(|s| (hit.t - s.t) * dir < 0.0)
                                    .unwrap_or(true);
                                if better {
                                    stop = Some(hit);
                                }
                            } else {
                                sol.events.push(hit);
                            }
                        }
                        Err(e) => {
                            sol.status = Status::Failed(e);
                            return sol;
                        }
                    }
                }
                g_prev[idx] = g_new;
            }
            if self.record_dense {
                sol.dense.push(step);
            }
            if let Some(hit) = stop {
                sol.events.retain(|e| (e.t - hit.t) * dir <= 0.0);
                sol.t.push(hit.t);
                sol.y.push(hit.y.clone());
                let idx = hit.index;
                sol.events.push(hit);
                sol.status = Status::Terminated(idx);
                return sol;
            }
            t = t_new;
            y = y_new;
            w.k.swap(0, 6);
            if self.record_steps || t == t_end {
                sol.t.push(t);
                sol.y.push(y.clone());
            }
            if (t - t_end) * dir >= 0.0 || t == last_t {
                break;
            }
            last_t = t;
            let fac = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            let fac = if rejected { fac.min(1.0) } else { fac };
            rejected = false;
            h = (h * fac).abs().min(self.h_max) * dir;
        }
        if !self.record_steps && sol.t.last() != Some(&t) {
            sol.t.push(t);
            sol.y.push(y);
        }
        sol
    }

    #[allow(clippy::too_many_arguments)]
    fn locate<S: OdeSystem + ?Sized>(
        &self,
        sys: &S,
        ev: &EventSpec<'_>,
        step: &DenseStep,
        y0: &[f64],
        g0: f64,
        g1: f64,
        idx: usize,
    ) -> Result<EventHit> {
        let (mut a, mut b) = (step.t0, step.t1());
        let (mut ga, mut _gb) = (g0, g1);
        // bisection on the dense output
        for _ in 0..100 {
            let m = 0.5 * (a + b);
            let gm = (ev.func)(m, &step.eval(m));
            if (gm > 0.0) == (ga > 0.0) && gm != 0.0 {
                a = m;
                ga = gm;
            } else {
                b = m;
                _gb = gm;
            }
            if (b - a).abs() <= 1e-15 * (1.0 + m.abs()) {
                break;
            }
        }
        // secant polish on single-step states from the accepted point
        let g_exact = |t: f64| -> Result<(f64, Vec<f64>)> {
            let y = self.restep(sys, step.t0, y0, t)?;
            Ok(((ev.func)(t, &y), y))
        };
        let mut ta = a;
        let mut tb = b;
        let (mut fa, _) = g_exact(ta)?;
        let (mut fb, mut yb) = g_exact(tb)?;
        for _ in 0..8 {
            if fb == fa || fb == 0.0 {
                break;
            }
            let tn = tb - fb * (tb - ta) / (fb - fa);
            if !tn.is_finite() || (tn - step.t0) * step.h < 0.0 || (tn - step.t1()) * step.h > 0.0 {
                break;
            }
            ta = tb;
            fa = fb;
            tb = tn;
            let r = g_exact(tb)?;
            fb = r.0;
            yb = r.1;
            if (tb - ta).abs() < 1e-15 * (1.0 + tb.abs()) {
                break;
            }
        }
        Ok(EventHit {
            index: idx,
            t: tb,
            y: yb,
        })
    }
}

/// Integrates the state and its variational equations, returning the final
/// state, `ψ(T)` and the full solution.
pub fn integrate_variational<S: HamiltonianSystem + ?Sized>(
    sys: &S,
    z0: &Vector4<f64>,
    t_end: f64,
    integ: &Integrator,
) -> Result<(Vector4<f64>, Matrix4<f64>, Solution)> {
    let vf = VariationalFlow(sys);
    let sol = integ
        .integrate(&vf, 0.0, &variational_initial(z0), t_end, &[])
        .ok()?;
    let (z, psi) = split_variational(sol.last().1);
    Ok((z, psi, sol))
}

/// Flow map `z(t)` of a Hamiltonian system.
pub fn integrate_state<S: HamiltonianSystem + ?Sized>(
    sys: &S,
    z0: &Vector4<f64>,
    t_end: f64,
    integ: &Integrator,
) -> Result<(Vector4<f64>, Solution)> {
    let sol = integ
        .integrate(&StateFlow(sys), 0.0, z0.as_slice(), t_end, &[])
        .ok()?;
    let z = Vector4::from_column_slice(sol.last().1);
    Ok((z, sol))
}

/// Maximum energy deviation along recorded samples.
pub fn energy_drift<S: HamiltonianSystem + ?Sized>(sys: &S, sol: &Solution) -> Result<f64> {
    let e0 = sys.energy(&Vector4::from_column_slice(&sol.y[0][..4]))?;
    let mut m: f64 = 0.0;
    for y in &sol.y {
        m = m.max((sys.energy(&Vector4::from_column_slice(&y[..4]))? - e0).abs());
    }
    Ok(m)
}

/// Largest symplectic defect along recorded variational samples.
pub fn max_symplectic_defect(sol: &Solution) -> f64 {
    sol.y
        .iter()
        .map(|y| symplectic_defect4(&Matrix4::from_column_slice(&y[4..20])))
        .fold(0.0, f64::max)
}

/// Monodromy `ψ(T)` of a closed orbit, checked for closure.
pub fn monodromy<S: HamiltonianSystem + ?Sized>(
    sys: &S,
    z0: &Vector4<f64>,
    period: f64,
    closure_tol: f64,
) -> Result<Matrix4<f64>> {
    let (z1, psi, _) = integrate_variational(sys, z0, period, &Integrator::default().sparse())?;
    let res = (z1 - z0).norm();
    if res > closure_tol {
        return Err(Cr3bpError::Degenerate(format!(
            "orbit not closed: residual {res:.3e}"
        )));
    }
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{lagrange_values, Cr3bp, MassRatio};
    use crate::saddle_center::{LinearH2, SaddleCenterData};

    struct Harmonic;
    impl OdeSystem for Harmonic {
        fn dim(&self) -> usize {
            2
        }
        fn rhs(&self, _t: f64, y: &[f64], dy: &mut [f64]) -> Result<()> {
            dy[0] = y[1];
            dy[1] = -y[0];
            Ok(())
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy_and_events() {
        let integ = Integrator::default().dense();
        let ev = [EventSpec::new(
            |_t, y: &[f64]| y[0],
            Direction::Decreasing,
            false,
        )];
        let sol = integ.integrate(&Harmonic, 0.0, &[0.0, 1.0], 10.0, &ev);
        assert_eq!(sol.status, Status::Completed);
        let (t, y) = sol.last();
        assert_eq!(t, 10.0);
        assert!((y[0] - 10f64.sin()).abs() < 1e-10);
        // sin decreases through zero at π and 3π
        assert_eq!(sol.events.len(), 2);
        assert!((sol.events[0].t - std::f64::consts::PI).abs() < 1e-11);
        assert!((sol.events[1].t - 3.0 * std::f64::consts::PI).abs() < 1e-11);
        let mid = sol.interpolate(2.5).unwrap();
        assert!((mid[0] - 2.5f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn backward_and_terminal() {
        let integ = Integrator::default();
        let ev = [EventSpec::new(
            |_t, y: &[f64]| y[0] + 0.5,
            Direction::Both,
            true,
        )];
        let sol = integ.integrate(&Harmonic, 0.0, &[0.0, 1.0], -5.0, &ev);
        assert_eq!(sol.status, Status::Terminated(0));
        let (t, _) = sol.last();
        assert!((t + std::f64::consts::PI / 6.0).abs() < 1e-11);
    }

    #[test]
    fn equilibrium_stays_put() {
        let m = MassRatio::new(0.3).unwrap();
        let ld = lagrange_values(&m);
        let sys = Cr3bp::new(m);
        let z0 = ld.point(0).to_vec();
        let (z, _) = integrate_state(&sys, &z0, 1.0, &Integrator::default()).unwrap();
        assert!((z - z0).norm() < 1e-10);
    }

    #[test]
    fn linear_flow_matches_closed_form() {
        let scd = SaddleCenterData::new(&MassRatio::new(0.5).unwrap());
        let lin = LinearH2(scd.clone());
        let x0 = Vector4::new(0.1, -0.2, 0.05, 0.3);
        let integ = Integrator::default();
        for t in [1.0, 4.0, 10.0] {
            let (x, _) = integrate_state(&lin, &x0, t, &integ).unwrap();
            let exact = scd.linear_flow(&x0, t);
            let rel = (x - exact).amax() / exact.amax();
            assert!(rel < 1e-9, "t {t}: {rel}");
        }
    }

    #[test]
    fn variational_symplectic_and_reversible() {
        let m = MassRatio::new(0.5).unwrap();
        let sys = Cr3bp::new(m);
        let z0 = Vector4::new(0.3, -0.2, 0.1, 0.35);
        let integ = Integrator::default();
        let (z1, psi, sol) = integrate_variational(&sys, &z0, 5.0, &integ).unwrap();
        assert!(max_symplectic_defect(&sol) < 1e-8);
        assert!(symplectic_defect4(&psi) < 1e-8);
        assert!(energy_drift(&sys, &sol).unwrap() < 1e-10);
        let sol_b = integ.integrate(&StateFlow(&sys), 5.0, z1.as_slice(), 0.0, &[]);
        let zb = Vector4::from_column_slice(sol_b.last().1);
        assert!((zb - z0).norm() < 1e-8);
    }

    #[test]
    fn equilibrium_monodromy_is_matrix_exponential() {
        let m = MassRatio::new(0.4).unwrap();
        let sys = Cr3bp::new(m);
        let z0 = lagrange_values(&m).point(0).to_vec();
        let t = 1.3;
        let psi = monodromy(&sys, &z0, t, 1e-8).unwrap();
        let b = crate::dynamics::hamiltonian_hessian(&m, &z0, crate::dynamics::Frame::Standard)
            .unwrap();
        let exact = (j4() * b * t).exp();
        assert!((psi - exact).amax() / exact.amax() < 1e-9);
        assert!((psi.determinant() - 1.0).abs() < 1e-9);
    }
}
