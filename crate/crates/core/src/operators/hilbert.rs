use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::Error;

/// A function `Σ h_i 1_{(a_i, b_i)}(x)` on the time slab `t0 < t < t1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub t: (f64, f64),
    pub pieces: Vec<((f64, f64), f64)>,
}

/// `H 1_{(a,b)}(x) = (1/π) ln(|x − a| / |x − b|)`.
pub fn hilbert_interval(a: f64, b: f64, x: f64) -> Result<f64, Error> {
    if x == a || x == b {
        return Err(Error::Singular);
    }
    Ok(((x - a).abs() / (x - b).abs()).ln() / PI)
}

/// The horizontal Hilbert transform of a piecewise constant slab function at
/// `(t, x)`, exactly.
pub fn hilbert_piecewise(slabs: &[Slab], t: f64, x: f64) -> Result<f64, Error> {
    let mut acc = 0.0;
    for s in slabs.iter().filter(|s| s.t.0 < t && t < s.t.1) {
        for &((a, b), h) in &s.pieces {
            acc += h * hilbert_interval(a, b, x)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_interval_at_two() {
        assert!((hilbert_interval(0.0, 1.0, 2.0).unwrap() - 2f64.ln() / PI).abs() < 1e-15);
    }

    #[test]
    fn antisymmetric_about_center() {
        for x in [0.3, 0.99, 1.7, 5.0] {
            let a = hilbert_interval(-1.0, 1.0, x).unwrap();
            let b = hilbert_interval(-1.0, 1.0, -x).unwrap();
            assert!((a + b).abs() < 1e-15);
        }
    }

    #[test]
    fn endpoints_are_singular() {
        assert!(matches!(
            hilbert_interval(0.0, 1.0, 1.0),
            Err(Error::Singular)
        ));
    }

    #[test]
    fn only_active_slabs_contribute() {
        let slabs = vec![
            Slab {
                t: (0.0, 0.5),
                pieces: vec![((0.0, 1.0), 2.0)],
            },
            Slab {
                t: (0.5, 1.0),
                pieces: vec![((0.0, 1.0), 3.0)],
            },
        ];
        let v = hilbert_piecewise(&slabs, 0.25, 2.0).unwrap();
        assert!((v - 2.0 * 2f64.ln() / PI).abs() < 1e-15);
        assert_eq!(hilbert_piecewise(&slabs, 2.0, 2.0).unwrap(), 0.0);
    }
}
