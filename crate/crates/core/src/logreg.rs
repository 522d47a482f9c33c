//! L2-regularised binary logistic regression.
//!
//! Minimises `mean log-loss + ‖w‖² / (2·C·n)` (intercept unpenalised) with a
//! damped Newton method. Optional z-scoring of the features is fitted at
//! train time and stored in the model.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{sigmoid, softplus, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    /// Inverse regularisation strength.
    pub c: f64,
    pub max_iter: usize,
    /// Stop once the objective gradient norm falls below this.
    pub tol: f64,
    pub standardize: bool,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig { c: 1.0, max_iter: 1000, tol: 1e-6, standardize: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Standardization<T> {
    pub mean: Vec<T>,
    pub scale: Vec<T>,
}

impl<T: Scalar> Standardization<T> {
    pub fn fit(x: &[Vec<T>]) -> Self {
        let d = x[0].len();
        let n = T::of(x.len() as f64);
        let mut mean = vec![T::zero(); d];
        for row in x {
            for (m, &v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut var = vec![T::zero(); d];
        for row in x {
            for ((s, &v), &m) in var.iter_mut().zip(row).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let scale = var
            .into_iter()
            .map(|s| {
                let sd = (s / n).sqrt();
                if sd > T::zero() && sd.is_finite() {
                    sd
                } else {
                    T::one()
                }
            })
            .collect();
        Standardization { mean, scale }
    }

    pub fn apply(&self, row: &[T]) -> Vec<T> {
        row.iter().zip(&self.mean).zip(&self.scale).map(|((&v, &m), &s)| (v - m) / s).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel<T> {
    pub weights: Vec<T>,
    pub bias: T,
    pub feature_names: Vec<String>,
    pub standardization: Option<Standardization<T>>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Scalar> LogRegModel<T> {
    fn transformed<'a>(&self, row: &'a [T]) -> std::borrow::Cow<'a, [T]> {
        assert_eq!(row.len(), self.weights.len(), "feature count mismatch");
        match &self.standardization {
            Some(s) => std::borrow::Cow::Owned(s.apply(row)),
            None => std::borrow::Cow::Borrowed(row),
        }
    }

    /// Linear score `w·x̃ + b`.
    pub fn decision(&self, row: &[T]) -> T {
        let x = self.transformed(row);
        let mut z = T::zero();
        for (&w, &v) in self.weights.iter().zip(x.iter()) {
            z += w * v;
        }
        z + self.bias
    }

    /// Positive-class probability.
    pub fn probability(&self, row: &[T]) -> T {
        sigmoid(self.decision(row))
    }

    pub fn predict(&self, row: &[T]) -> bool {
        self.decision(row) >= T::zero()
    }

    /// Appends a feature whose weight is zero, so every decision is unchanged.
    pub fn with_zero_feature(&self, name: impl Into<String>) -> Self {
        let mut m = self.clone();
        m.weights.push(T::zero());
        m.feature_names.push(name.into());
        if let Some(s) = &mut m.standardization {
            s.mean.push(T::zero());
            s.scale.push(T::one());
        }
        m
    }
}

/// Objective value and gradient at `(w, b)` for already-transformed rows.
pub fn logreg_objective<T: Scalar>(w: &[T], b: T, x: &[Vec<T>], y: &[bool], c: f64) -> (T, Vec<T>, T) {
    let n = T::of(x.len() as f64);
    let reg = T::one() / (T::of(c) * n);
    let mut loss = T::zero();
    let mut gw = vec![T::zero(); w.len()];
    let mut gb = T::zero();
    for (row, &label) in x.iter().zip(y) {
        let z = row.iter().zip(w).fold(b, |acc, (&v, &wi)| acc + v * wi);
        let t = if label { T::one() } else { T::zero() };
        loss += if label { softplus(-z) } else { softplus(z) };
        let r = sigmoid(z) - t;
        for (g, &v) in gw.iter_mut().zip(row) {
            *g += r * v;
        }
        gb += r;
    }
    let mut wsq = T::zero();
    for (g, &wi) in gw.iter_mut().zip(w) {
        *g = *g / n + reg * wi;
        wsq += wi * wi;
    }
    (loss / n + T::of(0.5) * reg * wsq, gw, gb / n)
}

/// Solves `a · x = b` in place by Gaussian elimination with partial pivoting.
fn solve<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))?;
        if a[piv][col].abs() <= T::epsilon() * T::of(1e-3) {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            let (top, bottom) = a.split_at_mut(row);
            for (x, &v) in bottom[0][col..].iter_mut().zip(&top[col][col..]) {
                *x -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for k in i + 1..n {
            s -= a[i][k] * x[k];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

pub fn train_logreg<T: Scalar>(
    x: &[Vec<T>],
    y: &[bool],
    feature_names: Vec<String>,
    cfg: &LogRegConfig,
) -> Result<LogRegModel<T>> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!("{} rows but {} labels", x.len(), y.len())));
    }
    if x.is_empty() {
        return Err(Error::SingleClass);
    }
    if !(y.iter().any(|&l| l) && y.iter().any(|&l| !l)) {
        return Err(Error::SingleClass);
    }
    let d = x[0].len();
    if x.iter().any(|r| r.len() != d) {
        return Err(Error::invalid("rows have differing feature counts"));
    }
    if feature_names.len() != d {
        return Err(Error::invalid(format!("{} feature names for {d} features", feature_names.len())));
    }
    if x.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::invalid("non-finite feature value"));
    }
    if !(cfg.c > 0.0 && cfg.c.is_finite()) {
        return Err(Error::param("c", "must be positive"));
    }

    let standardization = cfg.standardize.then(|| Standardization::fit(x));
    let xt: Vec<Vec<T>> = match &standardization {
        Some(s) => x.iter().map(|r| s.apply(r)).collect(),
        None => x.to_vec(),
    };
    let n = T::of(x.len() as f64);
    let reg = T::one() / (T::of(cfg.c) * n);
    let tol = T::of(cfg.tol);

    let mut w = vec![T::zero(); d];
    let mut b = T::zero();
    let (mut obj, mut gw, mut gb) = logreg_objective(&w, b, &xt, y, cfg.c);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        let gnorm = (gw.iter().map(|&g| g * g).sum::<T>() + gb * gb).sqrt();
        if gnorm < tol {
            converged = true;
            break;
        }
        iterations += 1;

        // Hessian over (w, b)
        let mut h = vec![vec![T::zero(); d + 1]; d + 1];
        for row in &xt {
            let z = row.iter().zip(&w).fold(b, |acc, (&v, &wi)| acc + v * wi);
            let p = sigmoid(z);
            let s = p * (T::one() - p) / n;
            for i in 0..=d {
                let xi = if i < d { row[i] } else { T::one() };
                for j in i..=d {
                    let xj = if j < d { row[j] } else { T::one() };
                    h[i][j] += s * xi * xj;
                }
            }
        }
        for i in 0..=d {
            let (upper, lower) = h.split_at_mut(i);
            for (j, hj) in upper.iter().enumerate() {
                lower[0][j] = hj[i];
            }
            if i < d {
                h[i][i] += reg;
            }
        }
        let mut rhs: Vec<T> = gw.iter().map(|&g| -g).collect();
        rhs.push(-gb);

        let mut damping = T::zero();
        let step = loop {
            let mut hd = h.clone();
            for (i, row) in hd.iter_mut().enumerate() {
                row[i] += damping;
            }
            if let Some(s) = solve(hd, rhs.clone()) {
                break s;
            }
            damping = if damping == T::zero() { T::of(1e-10) } else { damping * T::of(10.0) };
        };

        let slope: T = step.iter().zip(rhs.iter()).map(|(&s, &r)| -s * r).sum();
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let nw: Vec<T> = w.iter().zip(&step).map(|(&wi, &s)| wi + t * s).collect();
            let nb = b + t * step[d];
            let (nobj, ngw, ngb) = logreg_objective(&nw, nb, &xt, y, cfg.c);
            if nobj <= obj + T::of(1e-4) * t * slope {
                w = nw;
                b = nb;
                obj = nobj;
                gw = ngw;
                gb = ngb;
                accepted = true;
                break;
            }
            t *= T::of(0.5);
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        let gnorm = (gw.iter().map(|&g| g * g).sum::<T>() + gb * gb).sqrt();
        converged = gnorm < tol;
    }
    Ok(LogRegModel { weights: w, bias: b, feature_names, standardization, iterations, converged })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(d: usize) -> Vec<String> {
        (0..d).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn separable_two_points() {
        let x = vec![vec![-1.0f64], vec![1.0]];
        let y = vec![false, true];
        let m = train_logreg(&x, &y, names(1), &LogRegConfig::default()).unwrap();
        assert!(m.converged);
        assert!(!m.predict(&x[0]) && m.predict(&x[1]));
    }

    #[test]
    fn symmetric_labels_give_zero_weight() {
        let x = vec![vec![0.3f64], vec![0.3], vec![-2.0], vec![-2.0], vec![5.0], vec![5.0]];
        let y = vec![true, false, true, false, true, false];
        let m = train_logreg(&x, &y, names(1), &LogRegConfig::default()).unwrap();
        assert!(m.weights[0].abs() < 1e-6);
    }

    #[test]
    fn single_class_rejected() {
        let x = vec![vec![1.0f64], vec![2.0]];
        assert!(matches!(train_logreg(&x, &[true, true], names(1), &LogRegConfig::default()), Err(Error::SingleClass)));
    }

    #[test]
    fn standardization_off_passes_features_through() {
        let x = vec![vec![1.0f64, 10.0], vec![2.0, -3.0], vec![0.5, 4.0]];
        let y = vec![true, false, true];
        let cfg = LogRegConfig { standardize: false, ..Default::default() };
        let m = train_logreg(&x, &y, names(2), &cfg).unwrap();
        assert!(m.standardization.is_none());
        let direct = m.weights[0] * x[1][0] + m.weights[1] * x[1][1] + m.bias;
        assert_eq!(m.decision(&x[1]), direct);
    }

    #[test]
    fn zero_feature_preserves_decisions() {
        let x = vec![vec![1.0f64], vec![2.0], vec![0.5], vec![3.0]];
        let y = vec![true, false, true, false];
        let m = train_logreg(&x, &y, names(1), &LogRegConfig::default()).unwrap();
        let m2 = m.with_zero_feature("norm");
        for (row, extra) in x.iter().zip([7.0, -1.0, 1e9, 0.0]) {
            let aug = vec![row[0], extra];
            assert_eq!(m.decision(row).to_bits(), m2.decision(&aug).to_bits());
        }
    }
}
