//! Sparse AND-OR decomposition.
//!
//! The game is split as `v_and = (v + ε)/2 + p`, `v_or = (v + ε)/2 - p` and
//! we minimize `‖T_and v_and‖₁ + ‖T_or v_or‖₁` over the partition `p` and a
//! per-subset error `ε` boxed by `|ε_i| ≤ τ_i`. For any `(p, ε)` the two
//! interaction vectors reproduce `v + ε` exactly, so the mixed reconstruction
//! error on `v` never exceeds `‖ε‖∞`.
//!
//! Two solvers are available. [`Method::PrimalDual`] (the default) runs a
//! diagonally preconditioned primal-dual hybrid gradient iteration on the
//! equivalent problem over the interaction vectors themselves,
//! `min ‖a‖₁ + ‖b‖₁  s.t.  |T_and⁻¹ a + T_or⁻¹ b - v| ≤ τ`, and maps each
//! checkpoint back to a feasible `(p, ε)`. [`Method::Subgradient`] is plain
//! projected subgradient descent on `(p, ε)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::interactions::{max_abs_diff, reconstruct_all, InteractionKind, InteractionVector};
use crate::lattice::{
    apply_t_and_in_place, apply_t_and_transpose_in_place, apply_t_or_in_place, apply_t_or_inverse_in_place,
    apply_t_or_inverse_transpose_in_place, apply_t_or_transpose_in_place, superset_zeta_in_place, zeta_in_place,
    LatticeVector,
};
use crate::table::ValueTable;

/// Iterations between stopping-rule comparisons.
pub const STOP_WINDOW: usize = 100;

/// The solvers keep `|ε_i| ≤ (1 - BOX_SHRINK) τ_i`, so the error bound
/// `|ε_i| < τ_i` stays strict after rounding in the reconstruction.
pub const BOX_SHRINK: f64 = 1e-9;

/// The primal-dual solver maps its iterate to a feasible `(p, ε)` this often.
pub const CHECKPOINT_EVERY: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PrimalDual,
    Subgradient,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepDecay {
    Constant,
    InvSqrt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecomposerConfig {
    pub method: Method,
    pub max_iters: usize,
    /// Subgradient: initial step, default `1e-2 · ‖v‖∞ / 2^{n/2}`.
    /// Primal-dual: primal/dual step balance, default `1e-2 · ‖v‖∞`.
    pub step_size: Option<f64>,
    /// Subgradient only.
    pub step_decay: StepDecay,
    /// Uniform `τ_i = tau_ratio · |v(N) - v(∅)|`.
    pub tau_ratio: f64,
    /// Per-subset bounds replacing the uniform rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau_override: Option<Vec<f64>>,
    /// Subgradient: stop once the best objective improves by less than this
    /// fraction over [`STOP_WINDOW`] iterations. Primal-dual: stop once the
    /// relative duality gap falls below it.
    pub stop_tol: f64,
    pub seed: u64,
}

impl Default for DecomposerConfig {
    fn default() -> Self {
        Self {
            method: Method::PrimalDual,
            max_iters: 20_000,
            step_size: None,
            step_decay: StepDecay::InvSqrt,
            tau_ratio: 0.05,
            tau_override: None,
            stop_tol: 1e-7,
            seed: 0,
        }
    }
}

impl DecomposerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau_ratio >= 0.0 && self.tau_ratio.is_finite()) {
            return Err(Error::InvalidArgument(format!("tau_ratio must be ≥ 0, got {}", self.tau_ratio)));
        }
        if let Some(step) = self.step_size {
            if !(step > 0.0 && step.is_finite()) {
                return Err(Error::InvalidArgument(format!("step_size must be > 0, got {step}")));
            }
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be ≥ 1".into()));
        }
        if self.stop_tol.is_nan() || self.stop_tol < 0.0 {
            return Err(Error::InvalidArgument(format!("stop_tol must be ≥ 0, got {}", self.stop_tol)));
        }
        Ok(())
    }

    /// Per-subset error bounds for `vt`.
    pub fn tau(&self, vt: &ValueTable) -> Result<Vec<f64>> {
        let len = vt.values().len();
        match &self.tau_override {
            Some(t) => {
                if t.len() != len {
                    return Err(Error::LengthMismatch {
                        expected: len,
                        actual: t.len(),
                    });
                }
                if let Some((i, &x)) = t.iter().enumerate().find(|(_, x)| !(x.is_finite() && **x >= 0.0)) {
                    return Err(Error::InvalidArgument(format!("tau_override[{i}] = {x} must be finite and ≥ 0")));
                }
                Ok(t.clone())
            }
            None => Ok(vec![self.tau_ratio * (vt.full_value() - vt.empty_value()).abs(); len]),
        }
    }

    pub fn resolved_step(&self, vt: &ValueTable) -> f64 {
        self.step_size.unwrap_or_else(|| {
            let scale = 1e-2 * vt.values().norm_inf();
            match self.method {
                Method::PrimalDual => scale,
                Method::Subgradient => scale / 2f64.powf(vt.n() as f64 / 2.0),
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionResult {
    pub and_hat: InteractionVector,
    pub or_hat: InteractionVector,
    pub p: LatticeVector,
    pub epsilon: LatticeVector,
    pub tau: Vec<f64>,
    /// `(iteration, objective)` at every evaluated iterate; iteration 0 is the initial point.
    pub objective_trace: Vec<(usize, f64)>,
    pub final_objective: f64,
    /// Best certified lower bound on the optimum (primal-dual only).
    pub dual_bound: Option<f64>,
    pub method: Method,
    /// Iteration at which the returned iterate was evaluated.
    pub best_iteration: usize,
    pub iterations: usize,
    pub stopped_early: bool,
    pub step_size: f64,
}

impl DecompositionResult {
    pub fn epsilon_max(&self) -> f64 {
        self.epsilon.norm_inf()
    }

    pub fn epsilon_l1(&self) -> f64 {
        self.epsilon.norm_l1()
    }

    pub fn tau_max(&self) -> f64 {
        self.tau.iter().fold(0.0, |a, &b| a.max(b))
    }
}

/// The objective and its subgradient for one game, with scratch buffers.
#[derive(Debug, Clone)]
pub struct Objective {
    n: usize,
    v: Vec<f64>,
    tau: Vec<f64>,
    and_buf: Vec<f64>,
    or_buf: Vec<f64>,
}

#[inline]
fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

impl Objective {
    pub fn new(vt: &ValueTable, tau: Vec<f64>) -> Result<Self> {
        let len = vt.values().len();
        if tau.len() != len {
            return Err(Error::LengthMismatch {
                expected: len,
                actual: tau.len(),
            });
        }
        Ok(Self {
            n: vt.n(),
            v: vt.values().as_slice().to_vec(),
            tau,
            and_buf: vec![0.0; len],
            or_buf: vec![0.0; len],
        })
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    fn check(&self, p: &[f64], eps: &[f64]) -> Result<()> {
        for x in [p, eps] {
            if x.len() != self.v.len() {
                return Err(Error::LengthMismatch {
                    expected: self.v.len(),
                    actual: x.len(),
                });
            }
        }
        if let Some((index, (&value, &tau))) = eps
            .iter()
            .zip(&self.tau)
            .enumerate()
            .find(|(_, (e, t))| e.abs() > **t)
        {
            return Err(Error::EpsilonOutOfBounds { index, value, tau });
        }
        Ok(())
    }

    // Fills and_buf / or_buf with the two interaction vectors.
    fn interactions(&mut self, p: &[f64], eps: &[f64]) {
        for i in 0..self.v.len() {
            let half = 0.5 * (self.v[i] + eps[i]);
            self.and_buf[i] = half + p[i];
            self.or_buf[i] = half - p[i];
        }
        apply_t_and_in_place(&mut self.and_buf);
        apply_t_or_in_place(&mut self.or_buf);
    }

    fn l1(&self) -> f64 {
        self.and_buf.iter().map(|x| x.abs()).sum::<f64>() + self.or_buf.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// `‖Î_and‖₁ + ‖Î_or‖₁` at `(p, ε)`.
    pub fn value(&mut self, p: &[f64], eps: &[f64]) -> Result<f64> {
        self.check(p, eps)?;
        self.interactions(p, eps);
        Ok(self.l1())
    }

    /// Objective plus `(g_p, g_ε)`, with `sign(0) = 0`.
    pub fn value_and_subgradient(&mut self, p: &[f64], eps: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
        self.check(p, eps)?;
        let mut g_p = vec![0.0; self.v.len()];
        let mut g_eps = vec![0.0; self.v.len()];
        let f = self.eval_into(p, eps, &mut g_p, &mut g_eps);
        Ok((f, g_p, g_eps))
    }

    fn eval_into(&mut self, p: &[f64], eps: &[f64], g_p: &mut [f64], g_eps: &mut [f64]) -> f64 {
        self.interactions(p, eps);
        let f = self.l1();
        for x in self.and_buf.iter_mut().chain(self.or_buf.iter_mut()) {
            *x = sign(*x);
        }
        apply_t_and_transpose_in_place(&mut self.and_buf);
        apply_t_or_transpose_in_place(&mut self.or_buf);
        for i in 0..self.v.len() {
            let (ga, go) = (self.and_buf[i], self.or_buf[i]);
            g_p[i] = ga - go;
            g_eps[i] = 0.5 * (ga + go);
        }
        f
    }

    /// Interaction vectors at `(p, ε)`.
    pub fn split(&mut self, p: &[f64], eps: &[f64]) -> (InteractionVector, InteractionVector) {
        self.interactions(p, eps);
        (
            InteractionVector::new(InteractionKind::And, LatticeVector::from_parts(self.n, self.and_buf.clone())),
            InteractionVector::new(InteractionKind::Or, LatticeVector::from_parts(self.n, self.or_buf.clone())),
        )
    }
}

pub fn objective(vt: &ValueTable, p: &LatticeVector, epsilon: &LatticeVector, config: &DecomposerConfig) -> Result<f64> {
    Objective::new(vt, config.tau(vt)?)?.value(p.as_slice(), epsilon.as_slice())
}

/// `(g_p, g_ε)` of the objective at `(p, ε)`.
pub fn subgradient(
    vt: &ValueTable,
    p: &LatticeVector,
    epsilon: &LatticeVector,
    config: &DecomposerConfig,
) -> Result<(LatticeVector, LatticeVector)> {
    let (_, g_p, g_eps) = Objective::new(vt, config.tau(vt)?)?.value_and_subgradient(p.as_slice(), epsilon.as_slice())?;
    Ok((LatticeVector::from_parts(vt.n(), g_p), LatticeVector::from_parts(vt.n(), g_eps)))
}

/// Minimizes the objective starting from `p = 0, ε = 0` and returns the best
/// feasible iterate seen. Deterministic for a fixed config and table.
pub fn decompose(vt: &ValueTable, config: &DecomposerConfig) -> Result<DecompositionResult> {
    config.validate()?;
    let tau = config.tau(vt)?;
    let step = config.resolved_step(vt);
    let inner: Vec<f64> = tau.iter().map(|t| t * (1.0 - BOX_SHRINK)).collect();
    let mut obj = Objective::new(vt, inner)?;
    let run = if step == 0.0 {
        // Only the zero game has ‖v‖∞ = 0; p = ε = 0 is optimal there.
        let zeros = vec![0.0; vt.values().len()];
        let f = obj.value(&zeros, &zeros)?;
        Run {
            best: Best { objective: f, iteration: 0, p: zeros.clone(), eps: zeros },
            trace: vec![(0, f)],
            iterations: 0,
            stopped_early: true,
            dual_bound: Some(0.0),
        }
    } else {
        match config.method {
            Method::PrimalDual => primal_dual(&mut obj, config, step),
            Method::Subgradient => projected_subgradient(&mut obj, config, step),
        }
    };
    let n = vt.n();
    let (and_hat, or_hat) = obj.split(&run.best.p, &run.best.eps);
    Ok(DecompositionResult {
        and_hat,
        or_hat,
        p: LatticeVector::from_parts(n, run.best.p),
        epsilon: LatticeVector::from_parts(n, run.best.eps),
        tau,
        objective_trace: run.trace,
        final_objective: run.best.objective,
        dual_bound: run.dual_bound,
        method: config.method,
        best_iteration: run.best.iteration,
        iterations: run.iterations,
        stopped_early: run.stopped_early,
        step_size: step,
    })
}

struct Best {
    objective: f64,
    iteration: usize,
    p: Vec<f64>,
    eps: Vec<f64>,
}

impl Best {
    fn new(len: usize) -> Self {
        Self {
            objective: f64::INFINITY,
            iteration: 0,
            p: vec![0.0; len],
            eps: vec![0.0; len],
        }
    }

    fn offer(&mut self, f: f64, t: usize, p: &[f64], eps: &[f64]) {
        if f < self.objective {
            self.objective = f;
            self.iteration = t;
            self.p.copy_from_slice(p);
            self.eps.copy_from_slice(eps);
        }
    }
}

struct Run {
    best: Best,
    trace: Vec<(usize, f64)>,
    iterations: usize,
    stopped_early: bool,
    dual_bound: Option<f64>,
}

fn projected_subgradient(obj: &mut Objective, config: &DecomposerConfig, step0: f64) -> Run {
    let len = obj.v.len();
    let tau = obj.tau.clone();
    let mut p = vec![0.0; len];
    let mut eps = vec![0.0; len];
    let mut g_p = vec![0.0; len];
    let mut g_eps = vec![0.0; len];
    let mut best = Best::new(len);
    let mut trace = Vec::with_capacity(config.max_iters + 1);
    let mut stopped_early = false;
    let mut iterations = 0;

    for t in 0..=config.max_iters {
        let f = obj.eval_into(&p, &eps, &mut g_p, &mut g_eps);
        trace.push((t, f));
        best.offer(f, t, &p, &eps);
        iterations = t;
        if f == 0.0 || t == config.max_iters {
            break;
        }
        if t >= STOP_WINDOW && t % STOP_WINDOW == 0 {
            let earlier = running_min(&trace[..=t - STOP_WINDOW]);
            if earlier - best.objective <= config.stop_tol * best.objective.abs() {
                stopped_early = true;
                break;
            }
        }
        let step = match config.step_decay {
            StepDecay::Constant => step0,
            StepDecay::InvSqrt => step0 / ((t + 1) as f64).sqrt(),
        };
        for i in 0..len {
            p[i] -= step * g_p[i];
            eps[i] = (eps[i] - step * g_eps[i]).clamp(-tau[i], tau[i]);
        }
    }
    Run {
        best,
        trace,
        iterations,
        stopped_early,
        dual_bound: None,
    }
}

/// Diagonal step sizes from the absolute row and column sums of
/// `K = [T_and⁻¹  T_or⁻¹]`: `(primal_and, primal_or, dual)`.
fn preconditioners(n: usize, balance: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let dim = 1usize << n;
    let mut primal_and = vec![0.0; dim];
    let mut primal_or = vec![0.0; dim];
    let mut dual = vec![0.0; dim];
    for s in 0..dim {
        let k = (s as u32).count_ones() as usize;
        let outside = (1usize << (n - k)) as f64;
        // column S of T_and⁻¹: supersets of S; of T_or⁻¹: sets meeting S (all sets for ∅)
        primal_and[s] = balance / outside;
        primal_or[s] = balance / if s == 0 { dim as f64 } else { dim as f64 - outside };
        // row T: subsets of T, plus b(∅) and the sets meeting T
        let row = (1usize << k) as f64 + if s == 0 { 1.0 } else { 1.0 + dim as f64 - outside };
        dual[s] = 1.0 / (balance * row);
    }
    (primal_and, primal_or, dual)
}

#[inline]
fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

// out = T_and⁻¹ a + T_or⁻¹ b; and_part keeps T_and⁻¹ a.
fn forward(a: &[f64], b: &[f64], and_part: &mut [f64], out: &mut [f64]) {
    and_part.copy_from_slice(a);
    zeta_in_place(and_part);
    out.copy_from_slice(b);
    apply_t_or_inverse_in_place(out);
    for (o, x) in out.iter_mut().zip(and_part.iter()) {
        *o += x;
    }
}

fn adjoint(y: &[f64], ga: &mut [f64], gb: &mut [f64]) {
    ga.copy_from_slice(y);
    superset_zeta_in_place(ga);
    gb.copy_from_slice(y);
    apply_t_or_inverse_transpose_in_place(gb);
}

fn primal_dual(obj: &mut Objective, config: &DecomposerConfig, balance: f64) -> Run {
    let n = obj.n;
    let len = obj.v.len();
    let v = obj.v.clone();
    let tau = obj.tau.clone();
    let (step_a, step_b, step_y) = preconditioners(n, balance);

    // p = 0, ε = 0 corresponds to a = T_and(v/2), b = T_or(v/2).
    let mut a: Vec<f64> = v.iter().map(|x| 0.5 * x).collect();
    let mut b = a.clone();
    apply_t_and_in_place(&mut a);
    apply_t_or_in_place(&mut b);
    let mut a_bar = a.clone();
    let mut b_bar = b.clone();
    let mut y = vec![0.0; len];
    let (mut ga, mut gb) = (vec![0.0; len], vec![0.0; len]);
    let (mut and_part, mut kx) = (vec![0.0; len], vec![0.0; len]);
    let (mut p, mut eps) = (vec![0.0; len], vec![0.0; len]);

    let mut best = Best::new(len);
    let mut trace = Vec::with_capacity(config.max_iters / CHECKPOINT_EVERY + 2);
    let mut dual_bound = f64::NEG_INFINITY;
    let mut stopped_early = false;
    let mut iterations = 0;

    for t in 0..=config.max_iters {
        if t % CHECKPOINT_EVERY == 0 || t == config.max_iters {
            // Feasible (p, ε) whose interaction vectors agree with (a, b) up to the box residual.
            forward(&a, &b, &mut and_part, &mut kx);
            for i in 0..len {
                eps[i] = (kx[i] - v[i]).clamp(-tau[i], tau[i]);
                p[i] = and_part[i] - 0.5 * (v[i] + eps[i]);
            }
            obj.interactions(&p, &eps);
            let f = obj.l1();
            trace.push((t, f));
            best.offer(f, t, &p, &eps);
            iterations = t;
            if t % STOP_WINDOW == 0 || t == config.max_iters {
                dual_bound = dual_bound.max(dual_objective(&y, &v, &tau, &mut ga, &mut gb));
                if best.objective - dual_bound <= config.stop_tol * best.objective.abs() {
                    stopped_early = t < config.max_iters;
                    break;
                }
            }
            if t == config.max_iters {
                break;
            }
        }
        iterations = t + 1;

        // Dual ascent on the box constraint: y ← prox_{σF*}(y + σ K x̄).
        forward(&a_bar, &b_bar, &mut and_part, &mut kx);
        for i in 0..len {
            let u = y[i] + step_y[i] * kx[i];
            let z = (u / step_y[i]).clamp(v[i] - tau[i], v[i] + tau[i]);
            y[i] = u - step_y[i] * z;
        }
        // Primal step with L1 prox, then extrapolate.
        adjoint(&y, &mut ga, &mut gb);
        for i in 0..len {
            let na = soft_threshold(a[i] - step_a[i] * ga[i], step_a[i]);
            let nb = soft_threshold(b[i] - step_b[i] * gb[i], step_b[i]);
            a_bar[i] = 2.0 * na - a[i];
            b_bar[i] = 2.0 * nb - b[i];
            a[i] = na;
            b[i] = nb;
        }
    }
    Run {
        best,
        trace,
        iterations,
        stopped_early,
        dual_bound: Some(dual_bound),
    }
}

/// Lower bound `-Σ_i (y_i v_i + τ_i |y_i|) / s` after rescaling `y` so that
/// `‖Kᵀ y / s‖∞ ≤ 1`.
fn dual_objective(y: &[f64], v: &[f64], tau: &[f64], ga: &mut [f64], gb: &mut [f64]) -> f64 {
    adjoint(y, ga, gb);
    let s = ga.iter().chain(gb.iter()).fold(1.0f64, |m, g| m.max(g.abs()));
    -y.iter()
        .zip(v)
        .zip(tau)
        .map(|((y, v), t)| y * v + t * y.abs())
        .sum::<f64>()
        / s
}

fn running_min(trace: &[(usize, f64)]) -> f64 {
    trace.iter().fold(f64::INFINITY, |m, &(_, f)| m.min(f))
}

/// `max_T |v(T) - (Σ_{S⊆T} Î_and(S) + Î_or(∅) + Σ_{S∩T≠∅} Î_or(S))|`.
pub fn mixed_faithfulness_error(vt: &ValueTable, result: &DecompositionResult) -> Result<f64> {
    mixed_error(vt, &result.and_hat, &result.or_hat)
}

pub fn mixed_error(vt: &ValueTable, and_hat: &InteractionVector, or_hat: &InteractionVector) -> Result<f64> {
    for i in [and_hat, or_hat] {
        if i.n() != vt.n() {
            return Err(Error::DimensionMismatch {
                expected: vt.n(),
                actual: i.n(),
            });
        }
    }
    let a = reconstruct_all(and_hat)?;
    let o = reconstruct_all(or_hat)?;
    let sum: Vec<f64> = a.as_slice().iter().zip(o.as_slice()).map(|(x, y)| x + y).collect();
    Ok(max_abs_diff(vt.values().as_slice(), &sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::{generate_game, SyntheticGameSpec};

    fn game() -> ValueTable {
        ValueTable::from_vec(vec![0.0, 1.0, 2.0, 5.0]).unwrap()
    }

    fn lv(x: Vec<f64>) -> LatticeVector {
        LatticeVector::from_vec(x).unwrap()
    }

    #[test]
    fn objective_examples() {
        let vt = game();
        let cfg = DecomposerConfig::default();
        let zero = lv(vec![0.0; 4]);
        // AND(v/2) = [0, .5, 1, 1], OR(v/2) = [0, 1.5, 2, -1]
        assert_eq!(objective(&vt, &zero, &zero, &cfg).unwrap(), 7.0);
        // p = v/2 puts everything on the AND side.
        let half = lv(vec![0.0, 0.5, 1.0, 2.5]);
        assert_eq!(objective(&vt, &half, &zero, &cfg).unwrap(), 5.0);
    }

    #[test]
    fn epsilon_outside_box_is_rejected() {
        let vt = game();
        let cfg = DecomposerConfig::default();
        // τ = 0.05 · 5 = 0.25
        let p = lv(vec![0.0; 4]);
        let eps = lv(vec![0.0, 0.3, 0.0, 0.0]);
        let err = objective(&vt, &p, &eps, &cfg).unwrap_err();
        assert!(matches!(err, Error::EpsilonOutOfBounds { index: 1, .. }), "{err}");
    }

    #[test]
    fn subgradient_of_zero_game_vanishes() {
        let vt = ValueTable::from_vec(vec![0.0; 8]).unwrap();
        let cfg = DecomposerConfig::default();
        let zero = lv(vec![0.0; 8]);
        let (g_p, g_e) = subgradient(&vt, &zero, &zero, &cfg).unwrap();
        assert!(g_p.as_slice().iter().chain(g_e.as_slice()).all(|&x| x == 0.0));
    }

    #[test]
    fn zero_game_decomposes_to_zero() {
        let vt = ValueTable::from_vec(vec![0.0; 8]).unwrap();
        for method in [Method::PrimalDual, Method::Subgradient] {
            let cfg = DecomposerConfig { method, ..Default::default() };
            let r = decompose(&vt, &cfg).unwrap();
            assert_eq!(r.final_objective, 0.0);
            assert!(r.and_hat.effects.as_slice().iter().all(|&x| x == 0.0));
            assert!(r.or_hat.effects.as_slice().iter().all(|&x| x == 0.0));
        }
    }

    #[test]
    fn preconditioners_match_abs_sums() {
        let n = 4;
        let dim = 1 << n;
        let (pa, pb, d) = preconditioners(n, 1.0);
        let mut rows = vec![0.0; dim];
        for s in 0..dim {
            let mut e = vec![0.0; dim];
            e[s] = 1.0;
            let mut za = e.clone();
            zeta_in_place(&mut za);
            let mut rb = e;
            apply_t_or_inverse_in_place(&mut rb);
            assert_eq!(1.0 / pa[s], za.iter().map(|x| x.abs()).sum::<f64>());
            assert_eq!(1.0 / pb[s], rb.iter().map(|x| x.abs()).sum::<f64>());
            for t in 0..dim {
                rows[t] += za[t].abs() + rb[t].abs();
            }
        }
        for t in 0..dim {
            assert_eq!(1.0 / d[t], rows[t]);
        }
    }

    #[test]
    fn planted_game_within_planted_norm() {
        let spec = SyntheticGameSpec::new(3).and_term([0, 1], 2.0).or_term([1, 2], -3.0);
        let (vt, _) = generate_game(&spec).unwrap();
        let r = decompose(&vt, &DecomposerConfig::default()).unwrap();
        assert!(r.final_objective <= spec.planted_l1() + 1e-9, "{}", r.final_objective);
        assert!(r.epsilon_max() <= r.tau_max());
        assert!(mixed_faithfulness_error(&vt, &r).unwrap() <= r.tau_max() * (1.0 + 1e-9));
        let bound = r.dual_bound.unwrap();
        assert!(bound <= r.final_objective + 1e-9);
    }

    #[test]
    fn subgradient_never_worse_than_start() {
        let vt = game();
        let cfg = DecomposerConfig { method: Method::Subgradient, max_iters: 500, ..Default::default() };
        let r = decompose(&vt, &cfg).unwrap();
        assert!(r.final_objective <= 7.0);
        assert_eq!(r.objective_trace[0], (0, 7.0));
        assert!(r.epsilon_max() <= r.tau_max());
    }

    #[test]
    fn invalid_config() {
        let vt = game();
        for cfg in [
            DecomposerConfig { tau_ratio: -1.0, ..Default::default() },
            DecomposerConfig { step_size: Some(0.0), ..Default::default() },
            DecomposerConfig { max_iters: 0, ..Default::default() },
            DecomposerConfig { tau_override: Some(vec![0.1; 3]), ..Default::default() },
        ] {
            assert!(decompose(&vt, &cfg).is_err());
        }
    }
}
