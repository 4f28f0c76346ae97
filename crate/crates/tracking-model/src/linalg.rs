//! 4×4 helpers: the model never needs anything bigger.

pub type Mat4 = [[f64; 4]; 4];

pub fn mat_vec(m: &Mat4, v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

/// I_2 ⊗ block.
pub fn kron_eye2(block: [[f64; 2]; 2]) -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for b in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                m[2 * b + i][2 * b + j] = block[i][j];
            }
        }
    }
    m
}

pub fn scale(m: &Mat4, s: f64) -> Mat4 {
    let mut out = *m;
    out.iter_mut().flatten().for_each(|x| *x *= s);
    out
}

/// Lower-triangular L with L Lᵀ = m for symmetric positive semi-definite m.
/// Zero pivots give zero columns. Returns `None` when m is not symmetric or
/// not PSD.
pub fn psd_cholesky(m: &Mat4) -> Option<Mat4> {
    let norm = m.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
    let tol = 1e-12 * norm.max(1.0);
    for i in 0..4 {
        for j in 0..i {
            if (m[i][j] - m[j][i]).abs() > tol {
                return None;
            }
        }
    }
    let mut l = [[0.0; 4]; 4];
    for j in 0..4 {
        let d = m[j][j] - (0..j).map(|p| l[j][p] * l[j][p]).sum::<f64>();
        if d < -tol {
            return None;
        }
        if d <= tol {
            for i in j + 1..4 {
                let r = m[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
                if r.abs() > tol {
                    return None;
                }
            }
            continue;
        }
        let djj = d.sqrt();
        l[j][j] = djj;
        for i in j + 1..4 {
            let r = m[i][j] - (0..j).map(|p| l[i][p] * l[j][p]).sum::<f64>();
            l[i][j] = r / djj;
        }
    }
    Some(l)
}

/// log N(r; 0, L Lᵀ). Directions with a zero pivot act as point masses:
/// a nonzero residual there has density zero.
pub fn gaussian_logpdf_chol(residual: &[f64; 4], l: &Mat4) -> f64 {
    const LN_2PI: f64 = 1.837_877_066_409_345_5;
    let mut z = [0.0; 4];
    let mut quad = 0.0;
    let mut log_det = 0.0;
    let mut dims = 0.0;
    for i in 0..4 {
        let r = residual[i] - (0..i).map(|p| l[i][p] * z[p]).sum::<f64>();
        if l[i][i] == 0.0 {
            if r.abs() > 1e-12 {
                return f64::NEG_INFINITY;
            }
            continue;
        }
        z[i] = r / l[i][i];
        quad += z[i] * z[i];
        log_det += l[i][i].ln();
        dims += 1.0;
    }
    -0.5 * quad - log_det - 0.5 * dims * LN_2PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_reconstructs() {
        let q = scale(&kron_eye2([[1.0 / 3.0, 0.5], [0.5, 1.0]]), 10.0);
        let l = psd_cholesky(&q).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let v: f64 = (0..4).map(|p| l[i][p] * l[j][p]).sum();
                assert!((v - q[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_and_indefinite() {
        assert_eq!(psd_cholesky(&[[0.0; 4]; 4]), Some([[0.0; 4]; 4]));
        let mut bad = kron_eye2([[1.0, 2.0], [2.0, 1.0]]);
        assert!(psd_cholesky(&bad).is_none());
        bad = kron_eye2([[1.0, 0.5], [0.4, 1.0]]);
        assert!(psd_cholesky(&bad).is_none());
    }

    #[test]
    fn logpdf_matches_diagonal_closed_form() {
        let cov = kron_eye2([[4.0, 0.0], [0.0, 0.25]]);
        let l = psd_cholesky(&cov).unwrap();
        let r = [1.0, -0.5, 2.0, 0.1];
        let expected: f64 = r
            .iter()
            .zip([4.0, 0.25, 4.0, 0.25])
            .map(|(x, v)| -0.5 * x * x / v - 0.5 * (2.0 * std::f64::consts::PI * v).ln())
            .sum();
        assert!((gaussian_logpdf_chol(&r, &l) - expected).abs() < 1e-12);
    }
}
