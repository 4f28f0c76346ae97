//! Exact checks of the unbiasedness and variance-ordering properties.

use serde::Serialize;
use smc_core::ResamplingScheme;

use crate::enumerate::{enumerate_law, ExactLaw};
use crate::hmm::DiscreteHmm;
use crate::OracleError;

/// Slack for comparisons between exactly enumerated quantities; covers
/// floating-point rounding only.
pub const EXACT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Serialize)]
pub struct SchemeMoments {
    pub scheme: String,
    pub n: usize,
    pub k: Option<usize>,
    pub mean: f64,
    pub variance: f64,
    pub total_probability: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    /// Short statement, e.g. `var(sr(2)) <= var(sr(1))`.
    pub claim: String,
    /// Which property family the claim belongs to.
    pub property: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PropositionReport {
    pub n: usize,
    pub num_states: usize,
    pub moments: Vec<SchemeMoments>,
    pub verdicts: Vec<Verdict>,
}

impl PropositionReport {
    pub fn all_hold(&self) -> bool {
        self.verdicts.iter().all(|v| v.holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| !v.holds)
    }

    pub fn verdicts_for<'a>(&'a self, property: &'a str) -> impl Iterator<Item = &'a Verdict> + 'a {
        self.verdicts.iter().filter(move |v| v.property == property)
    }
}

struct Enumerated {
    scheme: ResamplingScheme,
    law: ExactLaw,
    mean: f64,
    variance: f64,
}

fn le(property: &'static str, lhs_name: String, lhs: f64, rhs_name: String, rhs: f64) -> Verdict {
    Verdict {
        claim: format!("{lhs_name} <= {rhs_name}"),
        property,
        lhs,
        rhs,
        holds: lhs <= rhs + EXACT_TOLERANCE,
    }
}

fn eq(property: &'static str, claim: String, lhs: f64, rhs: f64) -> Verdict {
    Verdict {
        claim,
        property,
        lhs,
        rhs,
        holds: (lhs - rhs).abs() <= EXACT_TOLERANCE,
    }
}

/// Enumerates Multinomial, Independent, SR(k) and NSSR(k) for every
/// 0 <= k <= N and checks every equality and inequality between them.
///
/// Property tags: `probability_mass`, `mean_equality`, `sandwich_sr`,
/// `monotone_sr`, `sandwich_nssr`, `monotone_nssr`, `sr_below_nssr`,
/// `reduction`.
pub fn check_propositions(model: &DiscreteHmm, phi: &[f64]) -> Result<PropositionReport, OracleError> {
    let n = model.num_particles();
    let mut schemes = vec![ResamplingScheme::Multinomial, ResamplingScheme::Independent];
    schemes.extend((0..=n).map(ResamplingScheme::SemiIndependent));
    schemes.extend((0..=n).map(ResamplingScheme::NonSequential));

    let mut enumerated = Vec::with_capacity(schemes.len());
    for scheme in schemes {
        let law = enumerate_law(model, scheme)?;
        let m = law.moments(phi);
        enumerated.push(Enumerated {
            scheme,
            law,
            mean: m.mean,
            variance: m.variance,
        });
    }
    let get = |s: ResamplingScheme| enumerated.iter().find(|e| e.scheme == s).expect("enumerated");
    let sir = get(ResamplingScheme::Multinomial);
    let isir = get(ResamplingScheme::Independent);
    let var_name = |s: ResamplingScheme| format!("var({s})");

    let mut verdicts = Vec::new();
    for e in &enumerated {
        verdicts.push(eq(
            "probability_mass",
            format!("sum P({}) = 1", e.scheme),
            e.law.total_probability(),
            1.0,
        ));
        verdicts.push(eq(
            "mean_equality",
            format!("mean({}) = mean(sir)", e.scheme),
            e.mean,
            sir.mean,
        ));
    }

    for (family, sandwich, monotone) in [
        (ResamplingScheme::SemiIndependent as fn(usize) -> ResamplingScheme, "sandwich_sr", "monotone_sr"),
        (ResamplingScheme::NonSequential, "sandwich_nssr", "monotone_nssr"),
    ] {
        for k in 0..=n {
            let e = get(family(k));
            verdicts.push(le(sandwich, var_name(isir.scheme), isir.variance, var_name(e.scheme), e.variance));
            verdicts.push(le(sandwich, var_name(e.scheme), e.variance, var_name(sir.scheme), sir.variance));
            if k > 0 {
                let prev = get(family(k - 1));
                verdicts.push(le(monotone, var_name(e.scheme), e.variance, var_name(prev.scheme), prev.variance));
            }
        }
    }

    for k in 0..=n {
        let sr = get(ResamplingScheme::SemiIndependent(k));
        let nssr = get(ResamplingScheme::NonSequential(k));
        verdicts.push(le("sr_below_nssr", var_name(sr.scheme), sr.variance, var_name(nssr.scheme), nssr.variance));
    }

    for (a, b) in [
        (ResamplingScheme::SemiIndependent(0), sir),
        (ResamplingScheme::NonSequential(0), sir),
        (ResamplingScheme::SemiIndependent(n), isir),
        (ResamplingScheme::NonSequential(n), isir),
    ] {
        let a = get(a);
        verdicts.push(eq(
            "reduction",
            format!("law({}) = law({})", a.scheme, b.scheme),
            a.law.max_abs_difference(&b.law),
            0.0,
        ));
    }

    Ok(PropositionReport {
        n,
        num_states: model.num_states(),
        moments: enumerated
            .iter()
            .map(|e| SchemeMoments {
                scheme: e.scheme.to_string(),
                n,
                k: e.scheme.k(),
                mean: e.mean,
                variance: e.variance,
                total_probability: e.law.total_probability(),
            })
            .collect(),
        verdicts,
    })
}
