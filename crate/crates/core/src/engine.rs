//! Phase state and the single-iteration growth step shared by the LP and SDP
//! solvers.
//!
//! One iteration grows every non-tight coordinate along
//! `x_j(Δ) = (x̄_j + D_j)·exp(a_j Δ / c_j) − D_j`, which is the
//! `B_j exp((L_j + a_j Δ)/c_j) − D_j` form with `B_j` fitted at `Δ = 0`, until
//! the first stop event. `a` is the active constraint's coefficient vector
//! (a row for the LP, `A_j ⊗ V` for the SDP) and `b` its right-hand side.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SolverParams;

pub const EXP_GUARD: f64 = 700.0;

/// Closed-form value of a coordinate at dual level `y`.
pub fn growth_value(b: f64, d: f64, load_prev: f64, a: f64, c: f64, y: f64) -> Result<f64> {
    let exponent = (load_prev + a * y) / c;
    if exponent > EXP_GUARD {
        return Err(Error::Overflow { exponent });
    }
    Ok(b * exponent.exp() - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopEvent {
    RowSatisfiedBy2,
    AdviceHit(usize),
    CapReached(usize),
    ObjectiveReached,
}

impl StopEvent {
    fn priority(self) -> u8 {
        match self {
            StopEvent::CapReached(_) => 3,
            StopEvent::AdviceHit(_) => 2,
            StopEvent::ObjectiveReached => 1,
            StopEvent::RowSatisfiedBy2 => 0,
        }
    }
}

/// Per-iteration growth coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationCoeffs {
    pub d: Vec<f64>,
    pub b: Vec<f64>,
    pub x_bar: Vec<f64>,
    pub below_advice: Vec<bool>,
    /// Remaining capacity `b − Σ_{j∈T} a_j`.
    pub capacity: f64,
    /// Whether the advice-feasible branch was used.
    pub advice_branch: bool,
}

impl IterationCoeffs {
    fn active(&self, j: usize, a: &[f64], tight: &[bool]) -> bool {
        !tight[j] && a[j] > 0.0 && self.x_bar[j] + self.d[j] > 0.0
    }
}

/// Variables of the current phase plus the cross-phase best solution.
#[derive(Debug, Clone)]
pub struct PhaseCore {
    pub n: usize,
    pub c: Vec<f64>,
    pub advice: Vec<f64>,
    pub lambda: f64,
    pub boxed: bool,
    /// Phase index, starting at 1 once `alpha` is known.
    pub r: usize,
    pub alpha: f64,
    pub alpha1: f64,
    pub x: Vec<f64>,
    /// Dual load per column in this phase: `Σ a y − z`.
    pub load: Vec<f64>,
    pub z: Vec<f64>,
    pub tight: Vec<bool>,
    pub x_best: Vec<f64>,
    pub iterations: usize,
    pub violations_seen: usize,
}

impl PhaseCore {
    pub fn new(c: Vec<f64>, advice: Vec<f64>, lambda: f64, boxed: bool) -> Self {
        let n = c.len();
        Self {
            n,
            c,
            advice,
            lambda,
            boxed,
            r: 0,
            alpha: 0.0,
            alpha1: 0.0,
            x: vec![0.0; n],
            load: vec![0.0; n],
            z: vec![0.0; n],
            tight: vec![false; n],
            x_best: vec![0.0; n],
            iterations: 0,
            violations_seen: 0,
        }
    }

    pub fn started(&self) -> bool {
        self.r > 0
    }

    /// Creates phase 1 with the given `α(1)`.
    pub fn start(&mut self, alpha1: f64) {
        self.alpha1 = alpha1;
        self.alpha = alpha1;
        self.r = 1;
        self.init_phase();
    }

    fn init_phase(&mut self) {
        let n = self.n as f64;
        for j in 0..self.n {
            self.x[j] = self.advice[j].min(self.alpha / (2.0 * n * self.c[j]));
        }
        self.load.iter_mut().for_each(|v| *v = 0.0);
        self.z.iter_mut().for_each(|v| *v = 0.0);
        self.tight.iter_mut().for_each(|v| *v = false);
        if self.boxed {
            self.refresh_tight();
        }
        self.update_best();
    }

    /// Starts the next phase with doubled `α`.
    pub fn restart(&mut self, max_phase: usize) -> Result<()> {
        if self.r >= max_phase {
            return Err(Error::PhaseRestartLimit { limit: max_phase });
        }
        self.r += 1;
        self.alpha *= 2.0;
        self.init_phase();
        Ok(())
    }

    pub fn cost(&self) -> f64 {
        self.c.iter().zip(&self.x).map(|(c, x)| c * x).sum()
    }

    pub fn best_cost(&self) -> f64 {
        self.c.iter().zip(&self.x_best).map(|(c, x)| c * x).sum()
    }

    pub fn exhausted(&self, params: &SolverParams) -> bool {
        self.cost() >= self.alpha * (1.0 - 2.0 * params.tol_bisect)
    }

    pub fn update_best(&mut self) {
        for (b, &x) in self.x_best.iter_mut().zip(&self.x) {
            if x > *b {
                *b = x;
            }
        }
    }

    /// Moves coordinates at the cap into `T`; returns the newly tight ones.
    pub fn refresh_tight(&mut self) -> Vec<usize> {
        let mut added = Vec::new();
        for j in 0..self.n {
            if !self.tight[j] && self.x[j] >= 1.0 {
                self.x[j] = 1.0;
                self.tight[j] = true;
                added.push(j);
            }
        }
        added
    }

    pub fn all_tight(&self) -> bool {
        self.tight.iter().all(|&t| t)
    }

    /// `max_j load_j / c_j`, floored at 0.
    pub fn dual_scale(&self) -> f64 {
        self.load.iter().zip(&self.c).map(|(l, c)| l / c).fold(0.0, f64::max)
    }

    /// `(b − Σ_T a_j, Σ_{j∉T} a_j)`.
    pub fn capacity(&self, a: &[f64], b: f64) -> (f64, f64) {
        let mut tight_mass = 0.0;
        let mut free_mass = 0.0;
        for j in 0..self.n {
            if self.tight[j] {
                tight_mass += a[j];
            } else {
                free_mass += a[j];
            }
        }
        (b - tight_mass, free_mass)
    }

    /// `Σ_{j∉T} a_j x_j`.
    pub fn free_value(&self, a: &[f64]) -> f64 {
        (0..self.n).filter(|&j| !self.tight[j]).map(|j| a[j] * self.x[j]).sum()
    }

    pub fn compute_coeffs(&self, a: &[f64], b: f64, advice_feasible: bool) -> IterationCoeffs {
        let (capacity, free_mass) = self.capacity(a, b);
        let n = self.n;
        let x_bar = self.x.clone();
        let below_advice: Vec<bool> = (0..n).map(|j| !self.tight[j] && x_bar[j] < self.advice[j]).collect();
        let mut d = vec![0.0; n];
        let mut advice_branch = advice_feasible;
        if advice_feasible {
            let advice_mass: f64 = (0..n).filter(|&j| below_advice[j]).map(|j| a[j] * self.advice[j]).sum();
            for j in 0..n {
                if self.tight[j] {
                    continue;
                }
                let mut dj = self.lambda / free_mass;
                if below_advice[j] {
                    dj += (1.0 - self.lambda) * self.advice[j] / advice_mass;
                }
                d[j] = dj * capacity;
            }
            let mut coeffs = self.finish_coeffs(d.clone(), x_bar.clone(), below_advice.clone(), capacity, true);
            if (0..n).any(|j| coeffs.active(j, a, &self.tight)) {
                return coeffs;
            }
            // no growth direction under the advice branch: fall back
            advice_branch = false;
            coeffs.advice_branch = false;
        }
        for j in 0..n {
            if !self.tight[j] {
                d[j] = capacity / free_mass;
            }
        }
        self.finish_coeffs(d, x_bar, below_advice, capacity, advice_branch)
    }

    fn finish_coeffs(
        &self,
        d: Vec<f64>,
        x_bar: Vec<f64>,
        below_advice: Vec<bool>,
        capacity: f64,
        advice_branch: bool,
    ) -> IterationCoeffs {
        let b = (0..self.n).map(|j| (x_bar[j] + d[j]) / (self.load[j] / self.c[j]).exp()).collect();
        IterationCoeffs { d, b, x_bar, below_advice, capacity, advice_branch }
    }

    fn value_at(&self, coeffs: &IterationCoeffs, a: &[f64], j: usize, delta: f64) -> Result<f64> {
        if self.tight[j] || a[j] == 0.0 {
            return Ok(coeffs.x_bar[j]);
        }
        let exponent = a[j] * delta / self.c[j];
        if exponent > EXP_GUARD {
            return Err(Error::Overflow { exponent });
        }
        Ok((coeffs.x_bar[j] + coeffs.d[j]) * exponent.exp() - coeffs.d[j])
    }

    fn row_gap(&self, coeffs: &IterationCoeffs, a: &[f64], delta: f64) -> Result<f64> {
        let mut s = 0.0;
        for j in 0..self.n {
            if !self.tight[j] && a[j] > 0.0 {
                s += a[j] * self.value_at(coeffs, a, j, delta)?;
            }
        }
        Ok(s - 2.0 * coeffs.capacity)
    }

    fn objective_gap(&self, coeffs: &IterationCoeffs, a: &[f64], delta: f64) -> Result<f64> {
        let mut s = 0.0;
        for j in 0..self.n {
            s += self.c[j] * self.value_at(coeffs, a, j, delta)?;
        }
        Ok(s - self.alpha)
    }

    /// Smallest `Δ >= 0` at which a stop event fires, with its event.
    pub fn find_stop_event(
        &self,
        a: &[f64],
        coeffs: &IterationCoeffs,
        params: &SolverParams,
    ) -> Result<(f64, StopEvent, Vec<(f64, StopEvent)>)> {
        let n = self.n;
        let active: Vec<usize> = (0..n).filter(|&j| coeffs.active(j, a, &self.tight)).collect();
        if active.is_empty() {
            return Err(Error::NoProgress);
        }

        let mut closed_form: Vec<(f64, StopEvent)> = Vec::new();
        for &j in &active {
            let base = coeffs.x_bar[j] + coeffs.d[j];
            let rate = self.c[j] / a[j];
            if self.boxed {
                closed_form.push((rate * ((1.0 + coeffs.d[j]) / base).ln(), StopEvent::CapReached(j)));
            }
            if coeffs.below_advice[j] && !(self.boxed && self.advice[j] >= 1.0) {
                closed_form
                    .push((rate * ((self.advice[j] + coeffs.d[j]) / base).ln(), StopEvent::AdviceHit(j)));
            }
        }
        let window = |delta: f64| delta * (1.0 + 2.0 * params.tol_bisect);
        let cf_min = closed_form.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let limit = if cf_min.is_finite() { Some(window(cf_min)) } else { None };

        let h0 = active.iter().map(|&j| self.c[j] / a[j]).fold(f64::INFINITY, f64::min) * std::f64::consts::LN_2;
        let mut candidates = closed_form;
        if let Some(d) = self.bisect(|t| self.row_gap(coeffs, a, t), h0, limit, params)? {
            candidates.push((d, StopEvent::RowSatisfiedBy2));
        }
        if let Some(d) = self.bisect(|t| self.objective_gap(coeffs, a, t), h0, limit, params)? {
            candidates.push((d, StopEvent::ObjectiveReached));
        }

        let best = candidates.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        if !best.is_finite() {
            return Err(Error::NoProgress);
        }
        let tie = window(best);
        let (delta, event) = candidates
            .iter()
            .filter(|e| e.0 <= tie)
            .max_by(|x, y| x.1.priority().cmp(&y.1.priority()).then(y.0.total_cmp(&x.0)))
            .copied()
            .expect("best candidate lies in its own window");
        let in_window = candidates.into_iter().filter(|e| e.0 <= tie).collect();
        Ok((delta, event, in_window))
    }

    /// Crossing point of a monotone increasing function starting below zero.
    /// Returns `None` if it does not cross before `limit`.
    fn bisect(
        &self,
        f: impl Fn(f64) -> Result<f64>,
        h0: f64,
        limit: Option<f64>,
        params: &SolverParams,
    ) -> Result<Option<f64>> {
        if f(0.0)? >= 0.0 {
            return Ok(Some(0.0));
        }
        let mut lo = 0.0;
        let mut hi = limit.map_or(h0, |l| h0.min(l));
        // grow from h0 rather than probing the limit first: far probes can
        // overflow steep coordinates long after the crossing
        while f(hi)? < 0.0 {
            if limit == Some(hi) {
                return Ok(None);
            }
            lo = hi;
            hi = match limit {
                Some(l) => (hi * 2.0).min(l),
                None => hi * 2.0,
            };
        }
        while hi - lo > params.tol_bisect * hi {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid)? >= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Some(hi))
    }

    /// Runs one growth iteration along `a` and applies it. Returns `(Δ, event,
    /// newly tight columns)`.
    pub fn iterate(
        &mut self,
        a: &[f64],
        coeffs: &IterationCoeffs,
        params: &SolverParams,
    ) -> Result<IterationOutcome> {
        let (delta, event, in_window) = self.find_stop_event(a, coeffs, params)?;
        let mut new_x = Vec::with_capacity(self.n);
        for j in 0..self.n {
            new_x.push(self.value_at(coeffs, a, j, delta)?);
        }
        for j in 0..self.n {
            if self.tight[j] {
                self.z[j] += a[j] * delta;
            } else {
                self.load[j] += a[j] * delta;
                self.x[j] = new_x[j].max(coeffs.x_bar[j]);
            }
        }
        let mut newly_tight = Vec::new();
        for &(_, e) in &in_window {
            match e {
                StopEvent::AdviceHit(j) => self.x[j] = self.advice[j],
                StopEvent::CapReached(j) => {
                    self.x[j] = 1.0;
                    self.tight[j] = true;
                    newly_tight.push(j);
                }
                _ => {}
            }
        }
        if self.boxed {
            for j in 0..self.n {
                if self.x[j] > 1.0 {
                    self.x[j] = 1.0;
                }
            }
            newly_tight.extend(self.refresh_tight());
        }
        self.iterations += 1;
        self.update_best();
        Ok(IterationOutcome { delta, event, newly_tight })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationOutcome {
    pub delta: f64,
    pub event: StopEvent,
    pub newly_tight: Vec<usize>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn growth_value_examples() {
        assert_relative_eq!(growth_value(1.0, 1.0, 0.0, 1.0, 1.0, 2f64.ln()).unwrap(), 1.0, epsilon = 1e-15);
        assert_eq!(growth_value(1.5, 1.0, 0.0, 1.0, 1.0, 0.0).unwrap(), 0.5);
        let at = |y| growth_value(1.5, 1.0, 0.0, 0.0, 1.0, y).unwrap();
        assert_eq!(at(0.0), at(100.0));
        assert!(matches!(growth_value(1.0, 0.0, 0.0, 1.0, 1.0, 701.0), Err(Error::Overflow { .. })));
    }

    #[test]
    fn scalar_phase_one_stops_on_objective() {
        let mut core = PhaseCore::new(vec![1.0], vec![0.0], 0.5, false);
        core.start(1.0);
        let p = SolverParams::default();
        let coeffs = core.compute_coeffs(&[1.0], 1.0, false);
        assert_eq!(coeffs.d, vec![1.0]);
        assert_eq!(coeffs.b, vec![1.0]);
        let (delta, event, _) = core.find_stop_event(&[1.0], &coeffs, &p).unwrap();
        assert_eq!(event, StopEvent::ObjectiveReached);
        assert_relative_eq!(delta, 2f64.ln(), max_relative = 1e-8);
    }

    #[test]
    fn advice_hit_beats_objective_on_tie() {
        let mut core = PhaseCore::new(vec![1.0], vec![1.0], 0.0, false);
        core.start(1.0);
        assert_eq!(core.x, vec![0.5]);
        let p = SolverParams::default();
        let coeffs = core.compute_coeffs(&[1.0], 1.0, true);
        assert_eq!(coeffs.d, vec![1.0]);
        assert_eq!(coeffs.b, vec![1.5]);
        let out = core.iterate(&[1.0], &coeffs, &p).unwrap();
        assert_eq!(out.event, StopEvent::AdviceHit(0));
        assert_relative_eq!(out.delta, (4.0f64 / 3.0).ln(), max_relative = 1e-12);
        assert_eq!(core.x, vec![1.0]);
    }

    #[test]
    fn indicator_off_gives_zero_advice_term() {
        let mut core = PhaseCore::new(vec![1.0], vec![1.0], 0.0, false);
        core.start(4.0);
        assert_eq!(core.x, vec![1.0]);
        let coeffs = core.compute_coeffs(&[1.0], 1.0, true);
        assert_eq!(coeffs.d, vec![0.0]);
        assert!(coeffs.advice_branch);
    }

    #[test]
    fn b_fit_reproduces_start() {
        let mut core = PhaseCore::new(vec![2.0, 3.0], vec![0.3, 0.0], 0.4, false);
        core.start(1.0);
        core.load = vec![0.7, 1.3];
        let a = [0.5, 2.0];
        let coeffs = core.compute_coeffs(&a, 1.0, true);
        for j in 0..2 {
            let v = growth_value(coeffs.b[j], coeffs.d[j], core.load[j], a[j], core.c[j], 0.0).unwrap();
            assert_relative_eq!(v, coeffs.x_bar[j], max_relative = 1e-12);
        }
    }
}
