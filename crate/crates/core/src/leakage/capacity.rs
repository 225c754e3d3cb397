use serde::{Deserialize, Serialize};

use super::TransitionMatrix;
use crate::error::{Error, Result};

pub const BA_DEFAULT_DELTA: f64 = 1e-6;
pub const BA_MAX_ITERATIONS: usize = 100_000;

const Q_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeakageResult {
    /// Capacity estimate in bits.
    pub lambda_max: f64,
    pub iterations: usize,
    /// Input distribution attaining `lambda_max`.
    pub q: Vec<f64>,
    /// `|λ(ℓ+1) − λ(ℓ)|` at the last iteration.
    pub delta: f64,
    pub converged: bool,
    /// `λ(0), λ(1), ...`; not serialized.
    #[serde(skip)]
    pub trace: Vec<f64>,
}

/// `I(S;T)` in bits for input distribution `q` over the rows of `c`.
pub fn mutual_information(c: &TransitionMatrix, q: &[f64]) -> Result<f64> {
    c.validate()?;
    check_distribution(q, c.rows())?;
    let out = output_distribution(c, q);
    let mut total = 0.0;
    for (row, &qi) in c.probs.iter().zip(q) {
        for (&p, &r) in row.iter().zip(&out) {
            if p > 0.0 && qi > 0.0 {
                total += qi * p * (p / r).log2();
            }
        }
    }
    Ok(total)
}

fn check_distribution(q: &[f64], n: usize) -> Result<()> {
    if q.len() != n {
        return Err(Error::Dimension { expected: n, actual: q.len() });
    }
    if q.iter().any(|&x| !(x >= 0.0)) {
        return Err(Error::param("q", "probabilities must be non-negative"));
    }
    let sum: f64 = q.iter().sum();
    if (sum - 1.0).abs() > Q_SUM_TOLERANCE {
        return Err(Error::param("q", format!("sums to {sum}, expected 1")));
    }
    Ok(())
}

fn output_distribution(c: &TransitionMatrix, q: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; c.cols()];
    for (row, &qi) in c.probs.iter().zip(q) {
        for (o, &p) in out.iter_mut().zip(row) {
            *o += qi * p;
        }
    }
    out
}

/// Blahut–Arimoto with the default iteration cap.
pub fn blahut_arimoto(c: &TransitionMatrix, delta: f64) -> Result<LeakageResult> {
    blahut_arimoto_capped(c, delta, BA_MAX_ITERATIONS)
}

/// Alternating maximisation of `J(q, Φ) = Σ q(i) C(j|i) log(Φ(i|j) / q(i))`.
///
/// Starting from uniform `q⁰`, each step sets the backward channel
/// `Φ(i|j) = q(i) C(j|i) / Σ_k q(k) C(j|k)`, then
/// `q'(i) ∝ exp(Σ_j C(j|i) ln Φ(i|j))`, and records `λ = J(q', Φ)`. Since
/// `Σ_j C(j|i) ln Φ(i|j) = ln q(i) + D_i` with `D_i` the divergence of row `i`
/// from the output distribution, this is `q'(i) = q(i) e^{D_i} / Z` and
/// `J(q', Φ) = log Z`, which is what is computed. The sequence `λ(ℓ)` is
/// non-decreasing and iteration stops once it moves by less than `delta`.
pub fn blahut_arimoto_capped(c: &TransitionMatrix, delta: f64, max_iterations: usize) -> Result<LeakageResult> {
    c.validate()?;
    if !(delta > 0.0) {
        return Err(Error::param("delta", "must be positive"));
    }
    if max_iterations == 0 {
        return Err(Error::param("max_iterations", "must be at least 1"));
    }
    let rows = c.rows();
    let mut q = vec![1.0 / rows as f64; rows];
    let mut lambda = mutual_information(c, &q)?;
    let mut trace = vec![lambda];
    let mut weights = vec![0.0; rows];
    let mut step = f64::INFINITY;
    let mut iterations = 0;

    while iterations < max_iterations {
        iterations += 1;
        let out = output_distribution(c, &q);
        for ((w, row), &qi) in weights.iter_mut().zip(&c.probs).zip(&q) {
            let d: f64 = row
                .iter()
                .zip(&out)
                .filter(|(&p, _)| p > 0.0)
                .map(|(&p, &r)| p * (p / r).ln())
                .sum();
            *w = qi * d.exp();
        }
        let z: f64 = weights.iter().sum();
        for (qi, &w) in q.iter_mut().zip(&weights) {
            *qi = w / z;
        }
        let next = z.log2();
        step = (next - lambda).abs();
        lambda = next;
        trace.push(lambda);
        if step < delta {
            break;
        }
    }

    let upper = (rows.min(c.cols()) as f64).log2();
    Ok(LeakageResult {
        lambda_max: lambda.clamp(0.0, upper),
        iterations,
        q,
        delta: step,
        converged: step < delta,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h2(p: f64) -> f64 {
        if p == 0.0 || p == 1.0 {
            0.0
        } else {
            -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
        }
    }

    #[test]
    fn identity_two_by_two_is_one_bit() {
        let c = TransitionMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!((mutual_information(&c, &[0.5, 0.5]).unwrap() - 1.0).abs() < 1e-12);
        let r = blahut_arimoto(&c, 1e-6).unwrap();
        assert!((r.lambda_max - 1.0).abs() < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn uniform_rows_leak_nothing() {
        let c = TransitionMatrix::from_rows(vec![vec![0.25; 4]; 4]).unwrap();
        assert_eq!(mutual_information(&c, &[0.1, 0.2, 0.3, 0.4]).unwrap(), 0.0);
        assert!(blahut_arimoto(&c, 1e-6).unwrap().lambda_max.abs() <= 1e-9);
    }

    #[test]
    fn bsc_mutual_information() {
        let p = 0.11;
        let c = TransitionMatrix::from_rows(vec![vec![1.0 - p, p], vec![p, 1.0 - p]]).unwrap();
        let mi = mutual_information(&c, &[0.5, 0.5]).unwrap();
        assert!((mi - (1.0 - h2(p))).abs() < 1e-12);
        assert!((mi - 0.5001).abs() < 1e-4);
    }

    #[test]
    fn z_channel_capacity() {
        // Z channel with crossover 1/2: capacity log2(5/4).
        let c = TransitionMatrix::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let r = blahut_arimoto(&c, 1e-12).unwrap();
        assert!((r.lambda_max - (1.25f64).log2()).abs() < 1e-6);
        assert!((r.q[1] - 0.4).abs() < 1e-4);
    }

    #[test]
    fn trace_is_monotone() {
        let c = TransitionMatrix::from_weights(vec![
            vec![0.8, 0.2, 0.0, 0.0],
            vec![0.1, 0.7, 0.2, 0.0],
            vec![0.0, 0.6, 0.4, 0.0],
            vec![0.25, 0.2, 0.7, 0.1],
        ])
        .unwrap();
        let r = blahut_arimoto(&c, 1e-10).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        assert!((r.q.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn parameter_errors() {
        let c = TransitionMatrix::from_rows(vec![vec![1.0]]).unwrap();
        assert!(blahut_arimoto(&c, 0.0).is_err());
        assert!(mutual_information(&c, &[0.5]).is_err());
        assert!(mutual_information(&c, &[0.5, 0.5]).is_err());
        let bad = TransitionMatrix { probs: vec![vec![0.3, 0.3]], ..c };
        assert!(blahut_arimoto(&bad, 1e-6).is_err());
    }
}
