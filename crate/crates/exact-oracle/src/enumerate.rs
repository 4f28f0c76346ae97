//! Exhaustive enumeration of the output law of each resampling scheme.
//!
//! Given the frozen previous particles, every scheme produces a random tuple
//! (x^1, ..., x^N) of states. For Multinomial, Independent, NonSequential
//! and ResampleMove the outputs are independent given the SIS support, so
//! their law is a mixture of product measures. SemiIndependent carries the
//! support from one output to the next and is enumerated by dynamic
//! programming over (current support, outputs so far).

use std::collections::BTreeMap;

use smc_core::ResamplingScheme;

use crate::hmm::DiscreteHmm;
use crate::sum::CompensatedSum;
use crate::OracleError;

pub const MAX_PARTICLES: usize = 3;
pub const MAX_STATES: usize = 3;
pub const MAX_MOVES: usize = 16;

/// Exact mean and variance of (1/N) Σ φ(x^i).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMoments {
    pub mean: f64,
    pub variance: f64,
}

/// Probability of every output tuple, sorted by tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLaw {
    outcomes: Vec<(f64, Vec<usize>)>,
}

impl ExactLaw {
    fn from_map(map: BTreeMap<Vec<usize>, CompensatedSum>) -> Self {
        Self {
            outcomes: map
                .into_iter()
                .map(|(tuple, p)| (p.value(), tuple))
                .filter(|(p, _)| *p > 0.0)
                .collect(),
        }
    }

    pub fn outcomes(&self) -> &[(f64, Vec<usize>)] {
        &self.outcomes
    }

    pub fn probability(&self, tuple: &[usize]) -> f64 {
        self.outcomes
            .binary_search_by(|(_, t)| t.as_slice().cmp(tuple))
            .map_or(0.0, |i| self.outcomes[i].0)
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|(p, _)| *p).collect::<CompensatedSum>().value()
    }

    /// Largest |P(tuple) - P'(tuple)| over all tuples.
    pub fn max_abs_difference(&self, other: &ExactLaw) -> f64 {
        let mut diff = 0.0f64;
        for (p, t) in &self.outcomes {
            diff = diff.max((p - other.probability(t)).abs());
        }
        for (p, t) in &other.outcomes {
            diff = diff.max((p - self.probability(t)).abs());
        }
        diff
    }

    pub fn moments(&self, phi: &[f64]) -> ExactMoments {
        let theta = |t: &[usize]| t.iter().map(|&x| phi[x]).sum::<f64>() / t.len() as f64;
        let mean = self
            .outcomes
            .iter()
            .map(|(p, t)| p * theta(t))
            .collect::<CompensatedSum>()
            .value();
        let variance = self
            .outcomes
            .iter()
            .map(|(p, t)| p * (theta(t) - mean).powi(2))
            .collect::<CompensatedSum>()
            .value();
        ExactMoments { mean, variance }
    }
}

fn guard(model: &DiscreteHmm, scheme: ResamplingScheme) -> Result<(), OracleError> {
    let n = model.num_particles();
    let too_large = |what: &'static str, value: usize, bound: usize| {
        Err(OracleError::TooLarge { what, value, bound })
    };
    if n > MAX_PARTICLES {
        return too_large("particle count N", n, MAX_PARTICLES);
    }
    if model.num_states() > MAX_STATES {
        return too_large("state count S", model.num_states(), MAX_STATES);
    }
    match scheme {
        ResamplingScheme::SemiIndependent(k) | ResamplingScheme::NonSequential(k) if k > n => {
            too_large("rejuvenation count k", k, n)
        }
        ResamplingScheme::ResampleMove(k) if k > MAX_MOVES => too_large("MH move count k", k, MAX_MOVES),
        _ => Ok(()),
    }
}

/// All length-`len` tuples over `0..s` in lexicographic order.
fn tuples(s: usize, len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(len)];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..s).map(move |x| {
                    let mut t = t.clone();
                    t.push(x);
                    t
                })
            })
            .collect();
    }
    out
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// SIS supports with their probabilities Π_j q(s_j | a_j).
fn initial_supports(model: &DiscreteHmm) -> Vec<(f64, Vec<usize>)> {
    let anc = model.ancestors();
    tuples(model.num_states(), model.num_particles())
        .into_iter()
        .map(|t| {
            let p = t.iter().zip(anc).map(|(&s, &a)| model.proposal(a, s)).product();
            (p, t)
        })
        .filter(|(p, _)| *p > 0.0)
        .collect()
}

/// Supports reachable from `base` by redrawing a uniformly chosen k-subset.
/// Subsets are enumerated unordered, each with probability 1/C(N, k).
fn rejuvenations(model: &DiscreteHmm, base: &[usize], k: usize) -> Vec<(f64, Vec<usize>)> {
    let anc = model.ancestors();
    let subsets = combinations(base.len(), k);
    let subset_p = 1.0 / subsets.len() as f64;
    let mut out = Vec::new();
    for subset in &subsets {
        for values in tuples(model.num_states(), k) {
            let mut p = subset_p;
            let mut support = base.to_vec();
            for (&j, &v) in subset.iter().zip(&values) {
                p *= model.proposal(anc[j], v);
                support[j] = v;
            }
            if p > 0.0 {
                out.push((p, support));
            }
        }
    }
    out
}

fn support_weights(model: &DiscreteHmm, support: &[usize], generation: usize) -> Result<Vec<f64>, OracleError> {
    let raw: Vec<f64> = support
        .iter()
        .enumerate()
        .map(|(j, &s)| model.slot_weight(j, s))
        .collect();
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(OracleError::Degenerate { generation });
    }
    Ok(raw.iter().map(|w| w / total).collect())
}

/// Law of one categorical draw from `support`, as a vector over states.
fn draw_marginal(model: &DiscreteHmm, support: &[usize], generation: usize) -> Result<Vec<f64>, OracleError> {
    let mut m = vec![0.0; model.num_states()];
    for (w, &s) in support_weights(model, support, generation)?.iter().zip(support) {
        m[s] += w;
    }
    Ok(m)
}

fn add_product(acc: &mut BTreeMap<Vec<usize>, CompensatedSum>, p: f64, marginals: &[Vec<f64>]) {
    let s = marginals[0].len();
    for t in tuples(s, marginals.len()) {
        let q: f64 = t.iter().zip(marginals).map(|(&x, m)| m[x]).product();
        if q > 0.0 {
            acc.entry(t).or_default().add(p * q);
        }
    }
}

/// Independent-MH kernel for particles whose ancestor sits in state `a`.
fn mh_kernel(model: &DiscreteHmm, a: usize) -> Vec<Vec<f64>> {
    let s = model.num_states();
    let r: Vec<f64> = (0..s).map(|x| model.importance_ratio(a, x)).collect();
    let accept = |from: usize, to: usize| {
        if r[to] == 0.0 {
            0.0
        } else if r[from] == 0.0 || r[to] >= r[from] {
            1.0
        } else {
            r[to] / r[from]
        }
    };
    (0..s)
        .map(|from| {
            let mut row: Vec<f64> = (0..s).map(|to| model.proposal(a, to) * accept(from, to)).collect();
            row[from] = model.proposal(a, from)
                + (0..s)
                    .filter(|&to| to != from)
                    .map(|to| model.proposal(a, to) * (1.0 - accept(from, to)))
                    .sum::<f64>();
            row
        })
        .collect()
}

fn step_distribution(kernel: &[Vec<f64>], start: usize, steps: usize) -> Vec<f64> {
    let s = kernel.len();
    let mut d = vec![0.0; s];
    d[start] = 1.0;
    for _ in 0..steps {
        let mut next = vec![0.0; s];
        for (from, p) in d.iter().enumerate() {
            for (to, k) in kernel[from].iter().enumerate() {
                next[to] += p * k;
            }
        }
        d = next;
    }
    d
}

/// Exact law of the output tuple of `scheme` on `model`.
pub fn enumerate_law(model: &DiscreteHmm, scheme: ResamplingScheme) -> Result<ExactLaw, OracleError> {
    guard(model, scheme)?;
    let n = model.num_particles();
    let mut acc = BTreeMap::new();
    match scheme {
        ResamplingScheme::Multinomial => {
            for (p, support) in initial_supports(model) {
                let m = draw_marginal(model, &support, 0)?;
                add_product(&mut acc, p, &vec![m; n]);
            }
        }
        ResamplingScheme::Independent => {
            let mut compound = vec![0.0; model.num_states()];
            for (p, support) in initial_supports(model) {
                for (c, m) in compound.iter_mut().zip(draw_marginal(model, &support, 0)?) {
                    *c += p * m;
                }
            }
            add_product(&mut acc, 1.0, &vec![compound; n]);
        }
        ResamplingScheme::NonSequential(k) => {
            for (p, support) in initial_supports(model) {
                let first = draw_marginal(model, &support, 0)?;
                let mut later = vec![0.0; model.num_states()];
                for (pr, rejuvenated) in rejuvenations(model, &support, k) {
                    for (l, m) in later.iter_mut().zip(draw_marginal(model, &rejuvenated, 1)?) {
                        *l += pr * m;
                    }
                }
                let mut marginals = vec![later; n];
                marginals[0] = first;
                add_product(&mut acc, p, &marginals);
            }
        }
        ResamplingScheme::ResampleMove(k) => {
            let kernels: Vec<Vec<Vec<f64>>> = (0..model.num_states()).map(|a| mh_kernel(model, a)).collect();
            for (p, support) in initial_supports(model) {
                let w = support_weights(model, &support, 0)?;
                let mut m = vec![0.0; model.num_states()];
                for (j, wj) in w.iter().enumerate() {
                    let kernel = &kernels[model.ancestors()[j]];
                    for (x, d) in step_distribution(kernel, support[j], k).into_iter().enumerate() {
                        m[x] += wj * d;
                    }
                }
                add_product(&mut acc, p, &vec![m; n]);
            }
        }
        ResamplingScheme::SemiIndependent(k) => {
            type Key = (Vec<usize>, Vec<usize>);
            let mut states: BTreeMap<Key, CompensatedSum> = BTreeMap::new();
            for (p, support) in initial_supports(model) {
                states.entry((support, Vec::new())).or_default().add(p);
            }
            for i in 0..n {
                let mut next: BTreeMap<Key, CompensatedSum> = BTreeMap::new();
                for ((support, outputs), p) in states {
                    let p = p.value();
                    let w = support_weights(model, &support, i)?;
                    for (j, wj) in w.iter().enumerate().filter(|(_, w)| **w > 0.0) {
                        let mut outs = outputs.clone();
                        outs.push(support[j]);
                        if i + 1 < n {
                            for (pr, rejuvenated) in rejuvenations(model, &support, k) {
                                next.entry((rejuvenated, outs.clone()))
                                    .or_default()
                                    .add(p * wj * pr);
                            }
                        } else {
                            next.entry((Vec::new(), outs)).or_default().add(p * wj);
                        }
                    }
                }
                states = next;
            }
            for ((_, outputs), p) in states {
                acc.entry(outputs).or_default().add(p.value());
            }
        }
    }
    Ok(ExactLaw::from_map(acc))
}

/// Exact conditional mean and variance of the post-resampling estimate of φ
/// (given as one value per state).
pub fn enumerate_scheme(
    model: &DiscreteHmm,
    scheme: ResamplingScheme,
    phi: &[f64],
) -> Result<ExactMoments, OracleError> {
    if phi.len() != model.num_states() {
        return Err(OracleError::InvalidModel(format!(
            "test function has {} values for {} states",
            phi.len(),
            model.num_states()
        )));
    }
    Ok(enumerate_law(model, scheme)?.moments(phi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinatorics() {
        assert_eq!(tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(3, 2), vec![vec![0, 1], vec![0, 2], vec![1, 2]]);
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn kernel_rows_are_stochastic_and_keep_target() {
        let m = DiscreteHmm::random(3, 2, &mut smc_core::substream(1, &[]));
        for a in 0..3 {
            let k = mh_kernel(&m, a);
            let target: Vec<f64> = (0..3).map(|x| m.transition(a, x) * m.likelihood(x)).collect();
            let z: f64 = target.iter().sum();
            for (from, row) in k.iter().enumerate() {
                assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-14, "row {from}");
            }
            for to in 0..3 {
                let moved: f64 = (0..3).map(|from| target[from] / z * k[from][to]).sum();
                assert!((moved - target[to] / z).abs() < 1e-14);
            }
        }
    }
}
