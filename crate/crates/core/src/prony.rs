//! The Prony mapping `PM(A, X) = (m_0, ..., m_{2d-1})`, its Jacobian, the
//! classical Hankel/companion solver, and damped Newton inversion.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fmt::{serialize_f64, serialize_f64_slice};
use crate::signal::{moments_raw, SpikeSignal};

/// Singular values below this fraction of the largest one count as zero.
const RANK_TOL: f64 = 1e-14;
/// Roots whose imaginary part exceeds this fraction of the node scale are rejected.
const IMAG_TOL: f64 = 1e-8;
/// Maximum number of step halvings per Newton iteration.
const MAX_HALVINGS: usize = 30;

/// A point `(m_0, ..., m_{2d-1})` in the codomain of the Prony mapping.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PronyImage {
    #[serde(serialize_with = "serialize_f64_slice")]
    values: Vec<f64>,
}

impl PronyImage {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "a Prony image has even positive length, got {}",
                values.len()
            )));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len() / 2
    }

    /// Coordinates `mu_k = m_k - m0_k` relative to `base`.
    pub fn shifted_from(&self, base: &PronyImage) -> Result<Vec<f64>> {
        if base.values.len() != self.values.len() {
            return Err(Error::Dimension {
                expected: base.values.len(),
                got: self.values.len(),
            });
        }
        Ok(self.values.iter().zip(&base.values).map(|(m, b)| m - b).collect())
    }

    /// This image moved by `eta` along the last coordinate axis.
    pub fn with_last_shift(&self, eta: f64) -> PronyImage {
        let mut values = self.values.clone();
        *values.last_mut().expect("non-empty") += eta;
        PronyImage { values }
    }

    fn distance_inf(&self, other: &[f64]) -> f64 {
        self.values
            .iter()
            .zip(other)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

pub fn prony_forward(signal: &SpikeSignal) -> PronyImage {
    PronyImage {
        values: moments_raw(signal.amplitudes(), signal.nodes(), 2 * signal.dim()),
    }
}

/// Jacobian of the Prony mapping at a base point, columns ordered `(a_1..a_d, x_1..x_d)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PronyJacobian {
    matrix: DMatrix<f64>,
    base_point: SpikeSignal,
}

impl PronyJacobian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn base_point(&self) -> &SpikeSignal {
        &self.base_point
    }

    pub fn determinant(&self) -> f64 {
        self.matrix.determinant()
    }

    /// Applies `J^{-1}` to a moment-space vector.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        solve_checked(&self.matrix, rhs)
    }
}

pub fn prony_jacobian(signal: &SpikeSignal) -> PronyJacobian {
    PronyJacobian {
        matrix: jacobian_raw(signal.amplitudes(), signal.nodes()),
        base_point: signal.clone(),
    }
}

fn jacobian_raw(amplitudes: &[f64], nodes: &[f64]) -> DMatrix<f64> {
    let d = nodes.len();
    let mut j = DMatrix::zeros(2 * d, 2 * d);
    for (col, (&a, &x)) in amplitudes.iter().zip(nodes).enumerate() {
        // power = x^k, prev = x^(k-1)
        let mut prev = 0.0;
        let mut power = 1.0;
        for k in 0..2 * d {
            j[(k, col)] = power;
            j[(k, d + col)] = k as f64 * a * prev;
            prev = power;
            power *= x;
        }
    }
    j
}

fn solve_checked(matrix: &DMatrix<f64>, rhs: &[f64]) -> Result<Vec<f64>> {
    let svd = matrix.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    if !(smin > RANK_TOL * smax) {
        return Err(Error::Conditioning {
            condition: smax / smin,
        });
    }
    let x = svd
        .solve(&DVector::from_column_slice(rhs), 0.0)
        .map_err(|_| Error::Conditioning {
            condition: smax / smin,
        })?;
    Ok(x.iter().copied().collect())
}

/// Empirical conditioning of the Prony mapping at a base point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditioningReport {
    /// `||J^{-1}||`, the reciprocal of the smallest singular value.
    #[serde(serialize_with = "serialize_f64")]
    pub inverse_norm: f64,
    /// `min_{|mu|=1} ||J^{-1} mu||`, the reciprocal of the largest singular value.
    #[serde(serialize_with = "serialize_f64")]
    pub lower_gain: f64,
    /// Norm of the node part of `J^{-1} e_{2d-1}`.
    #[serde(serialize_with = "serialize_f64")]
    pub node_projection_gain: f64,
}

pub fn conditioning(signal: &SpikeSignal) -> Result<ConditioningReport> {
    let d = signal.dim();
    let jac = prony_jacobian(signal);
    let sv = jac.matrix.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smin > RANK_TOL * smax) {
        return Err(Error::Conditioning {
            condition: smax / smin,
        });
    }
    let mut last = vec![0.0; 2 * d];
    last[2 * d - 1] = 1.0;
    let pre = jac.solve(&last)?;
    let node_projection_gain = pre[d..].iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(ConditioningReport {
        inverse_norm: 1.0 / smin,
        lower_gain: 1.0 / smax,
        node_projection_gain,
    })
}

/// First-order prediction `(A0, X0) + J^{-1} mu` of the inverse image of `mu0 + mu`.
pub fn linear_prediction(base: &SpikeSignal, mu: &[f64]) -> Result<Vec<f64>> {
    let step = prony_jacobian(base).solve(mu)?;
    Ok(base.params().iter().zip(step).map(|(p, s)| p + s).collect())
}

/// Classical Prony solve: Hankel system for the Prony polynomial, nodes as
/// companion-matrix eigenvalues, amplitudes from the square Vandermonde
/// system, then one Newton polish on all `2d` equations.
pub fn prony_solve(mu: &PronyImage, d: usize) -> Result<SpikeSignal> {
    if d == 0 {
        return Err(Error::InvalidInput("model order must be positive".into()));
    }
    let m = mu.values();
    if m.len() < 2 * d {
        return Err(Error::Dimension {
            expected: 2 * d,
            got: m.len(),
        });
    }
    let target = &m[..2 * d];

    let hankel = DMatrix::from_fn(d, d, |i, j| m[i + j]);
    let sv = hankel.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    if !(smax > 0.0) || !(smin > RANK_TOL * smax) {
        return Err(Error::ModelOrder {
            order: d,
            reason: format!("Hankel matrix is rank deficient (sigma ratio {:e})", smin / smax),
        });
    }
    let rhs = DVector::from_fn(d, |i, _| -m[i + d]);
    let coeffs = hankel.lu().solve(&rhs).ok_or_else(|| Error::ModelOrder {
        order: d,
        reason: "singular Hankel matrix".into(),
    })?;

    let mut companion = DMatrix::zeros(d, d);
    for i in 0..d {
        if i + 1 < d {
            companion[(i + 1, i)] = 1.0;
        }
        companion[(i, d - 1)] = -coeffs[i];
    }
    let roots = companion.complex_eigenvalues();
    let scale = roots.iter().map(|z| z.norm()).fold(f64::MIN_POSITIVE, f64::max);
    let imag = roots.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > IMAG_TOL * scale {
        return Err(Error::Inconsistent {
            imag,
            tolerance: IMAG_TOL * scale,
        });
    }
    let mut nodes: Vec<f64> = roots.iter().map(|z| z.re).collect();
    nodes.sort_by(f64::total_cmp);

    let vandermonde = DMatrix::from_fn(d, d, |k, j| nodes[j].powi(k as i32));
    let amplitudes = vandermonde
        .lu()
        .solve(&DVector::from_column_slice(&m[..d]))
        .ok_or_else(|| Error::ModelOrder {
            order: d,
            reason: "coincident nodes".into(),
        })?;
    let mut amplitudes: Vec<f64> = amplitudes.iter().copied().collect();

    // Joint Newton polish, kept only if it lowers the residual.
    let before = residual_inf(&amplitudes, &nodes, target);
    let jac = jacobian_raw(&amplitudes, &nodes);
    let forward = moments_raw(&amplitudes, &nodes, 2 * d);
    let neg_res: Vec<f64> = target.iter().zip(&forward).map(|(t, f)| t - f).collect();
    if let Ok(step) = solve_checked(&jac, &neg_res) {
        let a2: Vec<f64> = amplitudes.iter().zip(&step[..d]).map(|(a, s)| a + s).collect();
        let x2: Vec<f64> = nodes.iter().zip(&step[d..]).map(|(x, s)| x + s).collect();
        if residual_inf(&a2, &x2, target) < before {
            amplitudes = a2;
            nodes = x2;
        }
    }
    SpikeSignal::new(amplitudes, nodes)
}

fn residual_inf(amplitudes: &[f64], nodes: &[f64], target: &[f64]) -> f64 {
    moments_raw(amplitudes, nodes, target.len())
        .iter()
        .zip(target)
        .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
}

/// Result of [`newton_invert`].
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonSolution {
    pub signal: SpikeSignal,
    pub iterations: usize,
    /// `||PM(signal) - target||_inf`.
    pub residual: f64,
    /// Residual before the first step and after every accepted step.
    pub history: Vec<f64>,
}

/// Damped Newton iteration for `PM(A, X) = target` started from `initial`.
///
/// Each step halves the Newton increment (at most 30 times) until the
/// residual shows an Armijo-type decrease.
pub fn newton_invert(
    target: &PronyImage,
    initial: &SpikeSignal,
    tol: f64,
    max_iter: usize,
) -> Result<NewtonSolution> {
    let d = initial.dim();
    if target.dim() != d {
        return Err(Error::Dimension {
            expected: 2 * d,
            got: target.values().len(),
        });
    }
    let mut amps = initial.amplitudes().to_vec();
    let mut nodes = initial.nodes().to_vec();
    let mut residual = target.distance_inf(&moments_raw(&amps, &nodes, 2 * d));
    let mut history = vec![residual];

    let mut iterations = 0;
    while residual > tol {
        if iterations == max_iter {
            return Err(no_convergence(&amps, &nodes, residual, iterations));
        }
        let forward = moments_raw(&amps, &nodes, 2 * d);
        let neg_res: Vec<f64> = target.values().iter().zip(&forward).map(|(t, f)| t - f).collect();
        let step = solve_checked(&jacobian_raw(&amps, &nodes), &neg_res)?;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let a2: Vec<f64> = amps.iter().zip(&step[..d]).map(|(a, s)| a + lambda * s).collect();
            let x2: Vec<f64> = nodes.iter().zip(&step[d..]).map(|(x, s)| x + lambda * s).collect();
            let r2 = target.distance_inf(&moments_raw(&a2, &x2, 2 * d));
            if r2.is_finite() && r2 <= (1.0 - 1e-4 * lambda) * residual {
                accepted = Some((a2, x2, r2));
                break;
            }
            lambda *= 0.5;
        }
        let Some((a2, x2, r2)) = accepted else {
            return Err(no_convergence(&amps, &nodes, residual, iterations));
        };
        amps = a2;
        nodes = x2;
        residual = r2;
        history.push(residual);
        iterations += 1;
    }
    Ok(NewtonSolution {
        signal: SpikeSignal::new(amps, nodes)?,
        iterations,
        residual,
        history,
    })
}

fn no_convergence(amps: &[f64], nodes: &[f64], residual: f64, iterations: usize) -> Error {
    match SpikeSignal::new(amps.to_vec(), nodes.to_vec()) {
        Ok(iterate) => Error::NoConvergence {
            iterate: Box::new(iterate),
            residual,
            iterations,
        },
        Err(e) => e,
    }
}
