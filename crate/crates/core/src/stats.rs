//! Small descriptive statistics used by the diagnostics.

use crate::scalar::Scalar;

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    if xs.is_empty() {
        return T::nan();
    }
    xs.iter().copied().sum::<T>() / T::of(xs.len() as f64)
}

/// Population standard deviation.
pub fn std_dev<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    let var = xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::of(xs.len() as f64);
    var.sqrt()
}

/// Pearson correlation. `NaN` when either series is constant or shorter than 2.
pub fn pearson<T: Scalar>(xs: &[T], ys: &[T]) -> T {
    assert_eq!(xs.len(), ys.len(), "pearson needs paired samples");
    if xs.len() < 2 {
        return T::nan();
    }
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxy, mut sxx, mut syy) = (T::zero(), T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - mx;
        let dy = y - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let r = sxy / (sxx * syy).sqrt();
    if r.is_nan() {
        return r;
    }
    // rounding can push a perfect fit a hair past ±1
    r.max(-T::one()).min(T::one())
}

/// Ordinary least squares of `ys` on `xs`: returns `(slope, intercept)`.
pub fn ols<T: Scalar>(xs: &[T], ys: &[T]) -> (T, T) {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_line() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x + 1.0).collect();
        assert_eq!(pearson(&xs, &ys), 1.0);
        let (s, b) = ols(&xs, &ys);
        assert!((s - 2.0).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
        let neg: Vec<f64> = xs.iter().map(|x| -x).collect();
        assert_eq!(pearson(&xs, &neg), -1.0);
    }

    #[test]
    fn constant_series_is_nan() {
        assert!(pearson(&[1.0f64, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_nan());
        assert!(pearson(&[1.0f64], &[1.0]).is_nan());
    }

    #[test]
    fn std_dev_of_known_set() {
        assert!((std_dev(&[2.0f64, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0]) - 2.0).abs() < 1e-12);
    }
}
