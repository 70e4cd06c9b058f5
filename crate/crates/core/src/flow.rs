//! The bracket flow `d mu/dt = mu(D., .) + mu(., D.) - D mu(., .)` with
//! `D = diag(0, Ric_mu)`, optionally normalised to `|mu| = 1`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::bracket::Bracket;
use crate::curvature::{ricci_unchecked, sorted_eigenvalues};
use crate::error::{Error, Result};

pub const BLOW_UP_NORM: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowStatus {
    Completed,
    BlowUpDetected,
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowSample {
    pub t: f64,
    pub mu: Bracket,
    /// Sorted descending.
    pub ricci_eigs: Vec<f64>,
    pub norm: f64,
    /// Product of all normalisation factors applied so far (1 if unnormalised).
    pub scale: f64,
    pub soliton_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowTrajectory {
    pub normalized: bool,
    pub samples: Vec<FlowSample>,
    pub status: FlowStatus,
}

impl FlowTrajectory {
    pub fn last(&self) -> &FlowSample {
        self.samples.last().expect("trajectory has at least one sample")
    }

    /// First time from which `soliton_residual < threshold` holds on
    /// `window` consecutive samples.
    pub fn fixed_point_time(&self, threshold: f64, window: usize) -> Option<f64> {
        let mut run = 0;
        for (i, s) in self.samples.iter().enumerate() {
            if s.soliton_residual < threshold {
                run += 1;
                if run >= window {
                    return Some(self.samples[i + 1 - window].t);
                }
            } else {
                run = 0;
            }
        }
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub max_steps: usize,
    /// Spacing of recorded samples.
    pub sample_dt: f64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, h_init: 1e-3, h_min: 1e-13, max_steps: 2_000_000, sample_dt: 0.1 }
    }
}

impl StepControl {
    fn validate(&self) -> Result<()> {
        let ok = self.rtol > 0.0 && self.atol >= 0.0 && self.h_init > 0.0 && self.h_min > 0.0 && self.sample_dt > 0.0;
        if ok && self.max_steps > 0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("step control parameters must be positive".into()))
        }
    }
}

fn diag_ricci(mu: &Bracket) -> DMatrix<f64> {
    let (q, d) = (mu.q(), mu.dim());
    let ric = ricci_unchecked(mu);
    let mut dm = DMatrix::zeros(d, d);
    dm.view_mut((q, q), (mu.n(), mu.n())).copy_from(&ric);
    dm
}

/// `mu(D., .) + mu(., D.) - D mu(., .)` for an arbitrary derivation-like `D`.
pub fn derivation_action(mu: &Bracket, dm: &DMatrix<f64>) -> Vec<f64> {
    let d = mu.dim();
    let c = mu.constants();
    let mut out = vec![0.0; d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let mut s = 0.0;
                for a in 0..d {
                    s += dm[(a, i)] * c[(a * d + j) * d + k];
                    s += dm[(a, j)] * c[(i * d + a) * d + k];
                    s -= dm[(k, a)] * c[(i * d + j) * d + a];
                }
                out[(i * d + j) * d + k] = s;
            }
        }
    }
    out
}

fn rhs_raw(mu: &Bracket) -> Vec<f64> {
    derivation_action(mu, &diag_ricci(mu))
}

pub fn bracket_flow_rhs(mu: &Bracket) -> Result<Bracket> {
    mu.require_member()?;
    Ok(mu.with_constants(rhs_raw(mu)))
}

fn residual_raw(mu: &Bracket) -> f64 {
    let nrm = mu.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    let r = rhs_raw(mu);
    let c = mu.constants();
    let dot: f64 = r.iter().zip(c).map(|(a, b)| a * b).sum();
    let lam = dot / (nrm * nrm);
    let perp: f64 = r.iter().zip(c).map(|(a, b)| (a - lam * b).powi(2)).sum::<f64>().sqrt();
    perp / nrm.powi(3)
}

/// Scale-invariant size of the part of the flow velocity orthogonal to `mu`.
pub fn soliton_residual(mu: &Bracket) -> Result<f64> {
    if mu.norm() == 0.0 {
        return Err(Error::InvalidParameter("soliton residual of the zero bracket".into()));
    }
    mu.require_member()?;
    Ok(residual_raw(mu))
}

fn sample(t: f64, mu: &Bracket, scale: f64) -> FlowSample {
    FlowSample {
        t,
        ricci_eigs: sorted_eigenvalues(&ricci_unchecked(mu)),
        norm: mu.norm(),
        scale,
        soliton_residual: residual_raw(mu),
        mu: mu.clone(),
    }
}

// Dormand-Prince 5(4) tableau (the system is autonomous, so no nodes)
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

/// One step; returns the fifth-order solution and the scaled error norm.
fn dopri_step(mu: &Bracket, h: f64, ctrl: &StepControl) -> (Vec<f64>, f64) {
    let y = mu.constants();
    let len = y.len();
    let mut k: Vec<Vec<f64>> = Vec::with_capacity(7);
    for s in 0..7 {
        if s == 0 {
            k.push(rhs_raw(mu));
            continue;
        }
        let mut ys = y.to_vec();
        for (r, kr) in k.iter().enumerate() {
            let a = A[s][r];
            if a != 0.0 {
                for i in 0..len {
                    ys[i] += h * a * kr[i];
                }
            }
        }
        k.push(rhs_raw(&mu.with_constants(ys)));
    }
    let mut y5 = y.to_vec();
    let mut err = 0.0;
    for i in 0..len {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += B5[s] * k[s][i];
            d4 += B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let sc = ctrl.atol + ctrl.rtol * y[i].abs().max(y5[i].abs());
        let e = h * (d5 - d4) / sc;
        err += e * e;
    }
    (y5, (err / len as f64).sqrt())
}

/// Integrates from `mu0` over `[0, t_end]`.
pub fn integrate(mu0: &Bracket, t_end: f64, normalized: bool, ctrl: &StepControl) -> Result<FlowTrajectory> {
    integrate_from(mu0, 0.0, t_end, normalized, 1.0, ctrl)
}

/// Integrates from `mu0` at time `t0` with accumulated scale `scale0`
/// (resuming a saved trajectory).
pub fn integrate_from(
    mu0: &Bracket,
    t0: f64,
    t_end: f64,
    normalized: bool,
    scale0: f64,
    ctrl: &StepControl,
) -> Result<FlowTrajectory> {
    ctrl.validate()?;
    if !(t_end >= t0) || !t_end.is_finite() {
        return Err(Error::InvalidParameter(format!("t_end must be finite and at least {t0}")));
    }
    mu0.require_member()?;
    let mut mu = mu0.with_constants(mu0.constants().to_vec());
    let mut scale = scale0;
    if normalized {
        let nrm = mu.norm();
        if nrm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalise the zero bracket".into()));
        }
        if (nrm - 1.0).abs() > 0.0 {
            mu = mu.scaled(&(1.0 / nrm));
            scale /= nrm;
        }
    }
    let mut traj = FlowTrajectory { normalized, samples: vec![sample(t0, &mu, scale)], status: FlowStatus::Completed };
    let mut t = t0;
    let mut h = ctrl.h_init.min((t_end - t0).max(ctrl.h_min));
    let mut next_sample = t0 + ctrl.sample_dt;
    let mut steps = 0;
    while t < t_end {
        if steps >= ctrl.max_steps {
            traj.status = FlowStatus::MaxSteps;
            break;
        }
        let target = next_sample.min(t_end);
        let hh = h.min(target - t);
        let (y5, err) = dopri_step(&mu, hh, ctrl);
        steps += 1;
        if err <= 1.0 && y5.iter().all(|x| x.is_finite()) {
            t = if hh == target - t { target } else { t + hh };
            mu = mu.with_constants(y5);
            if normalized {
                let nrm = mu.norm();
                mu = mu.scaled(&(1.0 / nrm));
                scale /= nrm;
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // a step shortened to hit a sample time says nothing about h
            h = if hh < h && fac >= 1.0 { h } else { hh * fac };
            let reached_sample = t >= next_sample || t >= t_end;
            if reached_sample {
                traj.samples.push(sample(t, &mu, scale));
                while next_sample <= t {
                    next_sample += ctrl.sample_dt;
                }
            }
            if !normalized && mu.norm() > BLOW_UP_NORM {
                if !reached_sample {
                    traj.samples.push(sample(t, &mu, scale));
                }
                traj.status = FlowStatus::BlowUpDetected;
                break;
            }
        } else {
            let fac = if err.is_finite() { (0.9 * err.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h = hh * fac;
            if h < ctrl.h_min {
                // The intrinsic time scale of a cubic blow-up is 1/|mu|^2; once
                // it drops below the smallest step the singularity is reached.
                if !normalized && mu.norm_sq() * ctrl.h_min > 1e-4 {
                    traj.samples.push(sample(t, &mu, scale));
                    traj.status = FlowStatus::BlowUpDetected;
                    break;
                }
                return Err(Error::StepUnderflow { t, partial: Box::new(traj) });
            }
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{heisenberg3, mu_ex03};

    #[test]
    fn flat_and_abelian_are_fixed() {
        let flat = mu_ex03(1.0, 1.0, 0.0).unwrap();
        assert!(bracket_flow_rhs(&flat).unwrap().norm() < 1e-15);
        let ab = Bracket::<f64>::zero(0, 3);
        assert_eq!(bracket_flow_rhs(&ab).unwrap().norm(), 0.0);
        let tr = integrate(&flat, 1.0, false, &StepControl::default()).unwrap();
        assert!(tr.samples.iter().all(|s| s.mu.max_abs_diff(&flat) < 1e-15));
    }

    #[test]
    fn rhs_is_minus_derivative_of_action() {
        let mu = heisenberg3();
        let mu = mu.scaled(&(1.0 / mu.norm()));
        let d = diag_ricci(&mu);
        let eps = 1e-6;
        let plus = mu.gl_action(&(&d * eps).exp()).unwrap();
        let minus = mu.gl_action(&(&d * -eps).exp()).unwrap();
        let rhs = bracket_flow_rhs(&mu).unwrap();
        for ((p, m), r) in plus.constants().iter().zip(minus.constants()).zip(rhs.constants()) {
            let fd = (p - m) / (2.0 * eps);
            assert!((fd + r).abs() < 1e-8, "{fd} vs {r}");
        }
    }

    #[test]
    fn round_sphere_is_soliton() {
        assert!(soliton_residual(&mu_ex03(1.0, 1.0, 1.0).unwrap()).unwrap() < 1e-14);
        assert!(soliton_residual(&Bracket::<f64>::zero(0, 3)).is_err());
    }

    #[test]
    fn filiform_is_not_soliton_but_flows_to_one() {
        let fil = Bracket::from_entries(0, 4, &[(0, 1, 2, 1.0), (0, 2, 3, 2.0)]).unwrap();
        let r0 = soliton_residual(&fil).unwrap();
        assert!(r0 > 1e-3);
        let tr = integrate(&fil, 60.0, true, &StepControl::default()).unwrap();
        assert!(tr.last().soliton_residual < 1e-6);
    }

    #[test]
    fn unnormalized_sphere_matches_closed_form() {
        // Ric = a^2/2 I for mu = a mu_{1,1,1}, so a(t) = a0 / sqrt(1 - a0^2 t)
        let mu = mu_ex03(1.0, 1.0, 1.0).unwrap();
        let tr = integrate(&mu, 0.5, false, &StepControl::default()).unwrap();
        assert_eq!(tr.status, FlowStatus::Completed);
        let last = tr.last();
        assert!((last.t - 0.5).abs() < 1e-12);
        assert!((last.norm - 6f64.sqrt() / 0.5f64.sqrt()).abs() < 1e-7);
        let tr = integrate(&mu, 2.0, false, &StepControl::default()).unwrap();
        assert_eq!(tr.status, FlowStatus::BlowUpDetected);
        assert!((tr.last().t - 1.0).abs() < 1e-6, "{}", tr.last().t);
    }

    #[test]
    fn hyperbolic_type_bracket_decays() {
        // Einstein with Ric = -c I shrinks the bracket
        let mu = mu_ex03(1.0, 1.0, -1.0).unwrap();
        let tr = integrate(&mu, 1.0, false, &StepControl::default()).unwrap();
        assert!(tr.last().norm < mu.norm());
    }

    #[test]
    fn times_strictly_increase() {
        let tr = integrate(&mu_ex03(1.0, 0.5, 0.25).unwrap(), 2.0, true, &StepControl::default()).unwrap();
        assert!(tr.samples.windows(2).all(|w| w[1].t > w[0].t));
        assert!(tr.samples.iter().all(|s| (s.norm - 1.0).abs() < 1e-12));
    }
}
