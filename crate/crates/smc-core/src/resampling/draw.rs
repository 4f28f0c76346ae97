use rand::Rng;

/// Inverse-CDF categorical draw over slot order from one uniform.
/// `weights` must be normalized.
pub fn categorical<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (j, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            cum += w;
            last_positive = j;
            if u < cum {
                return j;
            }
        }
    }
    // u landed in the rounding gap above the final cumulative sum
    last_positive
}

/// `k` distinct slots out of `0..n`, drawn one at a time uniformly among the
/// slots not yet chosen (probability 1/(n-j) at draw j). The pool is reset
/// before drawing so the result depends only on the stream.
pub fn subset<'a, R: Rng + ?Sized>(
    pool: &'a mut Vec<usize>,
    n: usize,
    k: usize,
    rng: &mut R,
) -> &'a [usize] {
    debug_assert!(k <= n);
    pool.clear();
    pool.extend(0..n);
    for j in 0..k {
        let r = rng.random_range(j..n);
        pool.swap(j, r);
    }
    &pool[..k]
}
