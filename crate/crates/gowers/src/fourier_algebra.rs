//! Certificates for the `A(d)` algebra: sums of cubic convolutions with an
//! explicit cost (the sum over terms of products of vertex `L^{2^{d-1}}`
//! norms). The certificate value dominates the `U(d)` dual norm of the
//! materialized function, and certificates multiply: a product of two
//! certified functions has a certificate of at most the product of the
//! values.
//!
//! At `d = 2` a second, spectrally tight term shape is available: a
//! conjugate pair of characters carried as a real cosine atom. A sum of
//! such atoms certifies exactly the Wiener norm `sum_xi |fhat(xi)|`.

use crate::error::{Error, Result};
use crate::group::{GroupFunction, GroupSpec};
use crate::norms::{cubic_convolution, gowers_norm, GowersMethod};
use crate::spectral::{character_value, dft};
use crate::numeric;
use serde::Serialize;

/// Default cap on how many terms a product expansion may produce.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// One term of an `A(d)` certificate.
#[derive(Clone, Debug, Serialize)]
pub enum AdTerm {
    /// A cubic convolution `E_t prod_{eps != 0} fs[eps-1](x + eps . t)`;
    /// costs `prod ||fs[eps]||_{2^{d-1}}`.
    Product(Vec<GroupFunction>),
    /// A conjugate pair of characters (only at `d = 2`), materializing to
    /// `2 amplitude cos(theta_x + phase)` where `theta_x` is the phase of
    /// the character `frequency` (one copy, `amplitude cos`, when the
    /// frequency is self-conjugate); costs `2 amplitude` (resp.
    /// `amplitude`).
    CharacterPair { frequency: usize, amplitude: f64, phase: f64 },
}

/// A sum of certified terms on a fixed group and cube dimension.
#[derive(Clone, Debug, Serialize)]
pub struct AdDecomposition {
    group: GroupSpec,
    d: usize,
    terms: Vec<AdTerm>,
}

impl AdDecomposition {
    pub fn new(group: GroupSpec, d: usize, terms: Vec<AdTerm>) -> Result<Self> {
        if d == 0 || d > crate::cube::MAX_CUBE_D {
            return Err(Error::InvalidInput(format!("unsupported cube dimension {d}")));
        }
        for term in &terms {
            match term {
                AdTerm::Product(fs) => {
                    if fs.len() != (1 << d) - 1 {
                        return Err(Error::InvalidInput(format!(
                            "product term needs 2^d - 1 = {} functions, got {}",
                            (1 << d) - 1,
                            fs.len()
                        )));
                    }
                    for f in fs {
                        if f.group() != &group {
                            return Err(Error::DomainMismatch(
                                "term function on a different group".into(),
                            ));
                        }
                    }
                }
                AdTerm::CharacterPair { frequency, amplitude, phase } => {
                    if d != 2 {
                        return Err(Error::InvalidInput(
                            "character-pair terms are only available at d = 2".into(),
                        ));
                    }
                    if *frequency >= group.order() {
                        return Err(Error::InvalidInput("frequency out of range".into()));
                    }
                    if !amplitude.is_finite() || *amplitude < 0.0 || !phase.is_finite() {
                        return Err(Error::InvalidInput(
                            "character-pair amplitude/phase invalid".into(),
                        ));
                    }
                }
            }
        }
        Ok(Self { group, d, terms })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn terms(&self) -> &[AdTerm] {
        &self.terms
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn term_value(&self, term: &AdTerm) -> Result<f64> {
        match term {
            AdTerm::Product(fs) => {
                let p = (1u64 << (self.d - 1)) as f64;
                let mut v = 1.0;
                for f in fs {
                    v *= f.lp_norm(p)?;
                }
                Ok(v)
            }
            AdTerm::CharacterPair { frequency, amplitude, .. } => {
                let kappa = if self.group.neg(*frequency) == *frequency { 1.0 } else { 2.0 };
                Ok(kappa * amplitude)
            }
        }
    }

    /// The certificate value: the summed cost of all terms. Dominates the
    /// `U(d)` dual norm of the materialization.
    pub fn value(&self) -> Result<f64> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            terms.push(self.term_value(term)?);
        }
        Ok(numeric::sum(terms))
    }

    fn materialize_term(&self, term: &AdTerm) -> Result<GroupFunction> {
        match term {
            AdTerm::Product(fs) => cubic_convolution(fs),
            AdTerm::CharacterPair { frequency, amplitude, phase } => {
                let kappa = if self.group.neg(*frequency) == *frequency { 1.0 } else { 2.0 };
                GroupFunction::from_fn(self.group.clone(), |x| {
                    let theta = character_value(&self.group, *frequency, x).arg();
                    kappa * amplitude * (theta + phase).cos()
                })
            }
        }
    }

    /// Evaluates the certified function.
    pub fn materialize(&self) -> Result<GroupFunction> {
        let mut out = GroupFunction::constant(self.group.clone(), 0.0)?;
        for term in &self.terms {
            out = out.add(&self.materialize_term(term)?)?;
        }
        Ok(out)
    }
}

/// The spectrally tight `A(2)` certificate of `g`: one cosine atom per
/// conjugate pair of frequencies. Its value equals the Wiener norm
/// `sum_xi |ghat(xi)|` and its materialization reproduces `g`.
pub fn a2_certificate(g: &GroupFunction) -> Result<AdDecomposition> {
    let group = g.group().clone();
    let spec = dft(g);
    let mut terms = Vec::new();
    for xi in group.elements() {
        let neg = group.neg(xi);
        if neg < xi {
            continue; // the smaller index represents the pair
        }
        let c = spec.get(xi);
        if xi == neg {
            // self-conjugate character: real coefficient, phase 0 or pi
            if c.re != 0.0 {
                terms.push(AdTerm::CharacterPair {
                    frequency: xi,
                    amplitude: c.re.abs(),
                    phase: if c.re >= 0.0 { 0.0 } else { std::f64::consts::PI },
                });
            }
        } else if c.norm() != 0.0 {
            terms.push(AdTerm::CharacterPair {
                frequency: xi,
                amplitude: c.norm(),
                phase: c.arg(),
            });
        }
    }
    AdDecomposition::new(group, 2, terms)
}

/// Multiplies two certificates on the same group and dimension.
///
/// For pure product-term certificates the expansion averages over an
/// auxiliary shift `u` in `Z^d` (each term pair expands into `N^d` terms);
/// the resulting value never exceeds `value(a) * value(b)`. When a
/// character-pair term is involved (`d = 2` only) the product is
/// re-certified spectrally, which is again dominated by the product of
/// values since the Wiener norm is submultiplicative.
pub fn ad_product(
    a: &AdDecomposition,
    b: &AdDecomposition,
    term_cap: usize,
) -> Result<AdDecomposition> {
    if a.group != b.group || a.d != b.d {
        return Err(Error::DomainMismatch(
            "certificates on different groups or dimensions".into(),
        ));
    }
    let has_pairs = a
        .terms
        .iter()
        .chain(&b.terms)
        .any(|t| matches!(t, AdTerm::CharacterPair { .. }));
    if has_pairs {
        return a2_certificate(&a.materialize()?.mul(&b.materialize()?)?);
    }
    let group = &a.group;
    let d = a.d;
    let n = group.order();
    let shifts = n.pow(d as u32);
    let total = a
        .terms
        .len()
        .checked_mul(b.terms.len())
        .and_then(|x| x.checked_mul(shifts))
        .ok_or_else(|| Error::ResourceGuard("product term count overflow".into()))?;
    if total > term_cap {
        return Err(Error::ResourceGuard(format!(
            "product would produce {total} terms, cap is {term_cap}"
        )));
    }
    let weight = 1.0 / shifts as f64;
    let mut terms = Vec::with_capacity(total);
    for ta in &a.terms {
        let fa = match ta {
            AdTerm::Product(fs) => fs,
            AdTerm::CharacterPair { .. } => unreachable!(),
        };
        for tb in &b.terms {
            let fb = match tb {
                AdTerm::Product(fs) => fs,
                AdTerm::CharacterPair { .. } => unreachable!(),
            };
            let mut u = vec![0usize; d];
            loop {
                let mut fs = Vec::with_capacity((1 << d) - 1);
                for eps in 1..1u32 << d {
                    let shift = crate::cube::vertex_dot(group, eps, &u);
                    let mut h = fa[eps as usize - 1].mul(&fb[eps as usize - 1].translate(shift)?)?;
                    if eps == 1 {
                        h = h.scale(weight);
                    }
                    fs.push(h);
                }
                terms.push(AdTerm::Product(fs));
                if !crate::cube::advance(&mut u, n) {
                    break;
                }
            }
        }
    }
    AdDecomposition::new(group.clone(), d, terms)
}

/// Both sides of the pairing bound
/// `|<materialize(dec); h>| <= value(dec) ||h||_{U(d)}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PairingBoundCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl PairingBoundCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// Checks that the certificate value dominates the pairing against any test
/// function in the `U(d)` unit ball.
pub fn ad_pairing_bound_check(
    dec: &AdDecomposition,
    h: &GroupFunction,
) -> Result<PairingBoundCheck> {
    let lhs = dec.materialize()?.inner(h)?.abs();
    let rhs = dec.value()? * gowers_norm(h, dec.d, GowersMethod::Inductive)?;
    Ok(PairingBoundCheck { lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::a2_norm;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand_fn(group: &GroupSpec, rng: &mut ChaCha8Rng) -> GroupFunction {
        GroupFunction::from_values(
            group.clone(),
            (0..group.order()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        )
        .unwrap()
    }

    fn rand_product(group: &GroupSpec, d: usize, rng: &mut ChaCha8Rng) -> AdDecomposition {
        let fs: Vec<GroupFunction> = (0..(1 << d) - 1).map(|_| rand_fn(group, rng)).collect();
        AdDecomposition::new(group.clone(), d, vec![AdTerm::Product(fs)]).unwrap()
    }

    #[test]
    fn a2_certificate_is_exact_and_tight() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for orders in [vec![8], vec![2, 3]] {
            let group = GroupSpec::new(orders).unwrap();
            for _ in 0..5 {
                let g = rand_fn(&group, &mut rng);
                let cert = a2_certificate(&g).unwrap();
                let back = cert.materialize().unwrap();
                for (a, b) in back.values().iter().zip(g.values()) {
                    assert!((a - b).abs() < 1e-11);
                }
                assert!((cert.value().unwrap() - a2_norm(&g)).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn delta_certificate_value() {
        let group = GroupSpec::cyclic(4).unwrap();
        let delta =
            GroupFunction::from_values(group, vec![1.0, 0.0, 0.0, 0.0]).unwrap();
        let cert = a2_certificate(&delta).unwrap();
        assert!((cert.value().unwrap() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn product_is_pointwise_and_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let group = GroupSpec::cyclic(4).unwrap();
        for d in 1..=2usize {
            for _ in 0..5 {
                let a = rand_product(&group, d, &mut rng);
                let b = rand_product(&group, d, &mut rng);
                let ab = ad_product(&a, &b, DEFAULT_TERM_CAP).unwrap();
                let expected = a.materialize().unwrap().mul(&b.materialize().unwrap()).unwrap();
                let got = ab.materialize().unwrap();
                for (x, y) in got.values().iter().zip(expected.values()) {
                    assert!((x - y).abs() < 1e-11);
                }
                let va = a.value().unwrap();
                let vb = b.value().unwrap();
                assert!(ab.value().unwrap() <= va * vb + 1e-8);
            }
        }
    }

    #[test]
    fn product_with_character_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let group = GroupSpec::cyclic(8).unwrap();
        let a = a2_certificate(&rand_fn(&group, &mut rng)).unwrap();
        let b = rand_product(&group, 2, &mut rng);
        let ab = ad_product(&a, &b, DEFAULT_TERM_CAP).unwrap();
        let expected = a.materialize().unwrap().mul(&b.materialize().unwrap()).unwrap();
        let got = ab.materialize().unwrap();
        for (x, y) in got.values().iter().zip(expected.values()) {
            assert!((x - y).abs() < 1e-10);
        }
        assert!(ab.value().unwrap() <= a.value().unwrap() * b.value().unwrap() + 1e-8);
    }

    #[test]
    fn product_is_associative_on_materializations() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let group = GroupSpec::cyclic(3).unwrap();
        let a = rand_product(&group, 2, &mut rng);
        let b = rand_product(&group, 2, &mut rng);
        let c = rand_product(&group, 2, &mut rng);
        let left = ad_product(&ad_product(&a, &b, DEFAULT_TERM_CAP).unwrap(), &c, DEFAULT_TERM_CAP)
            .unwrap();
        let right =
            ad_product(&a, &ad_product(&b, &c, DEFAULT_TERM_CAP).unwrap(), DEFAULT_TERM_CAP)
                .unwrap();
        let lm = left.materialize().unwrap();
        let rm = right.materialize().unwrap();
        for (x, y) in lm.values().iter().zip(rm.values()) {
            assert!((x - y).abs() < 1e-9);
        }
        let bound =
            a.value().unwrap() * b.value().unwrap() * c.value().unwrap() + 1e-8;
        assert!(left.value().unwrap() <= bound);
        assert!(right.value().unwrap() <= bound);
    }

    #[test]
    fn pairing_bound_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let group = GroupSpec::cyclic(6).unwrap();
        for d in 1..=2usize {
            for _ in 0..5 {
                let dec = rand_product(&group, d, &mut rng);
                let h = rand_fn(&group, &mut rng);
                let check = ad_pairing_bound_check(&dec, &h).unwrap();
                assert!(check.holds(1e-10), "d={d}: {} > {}", check.lhs, check.rhs);
            }
        }
        // spectral certificates at d = 2
        let g = rand_fn(&group, &mut rng);
        let dec = a2_certificate(&g).unwrap();
        let h = rand_fn(&group, &mut rng);
        let check = ad_pairing_bound_check(&dec, &h).unwrap();
        assert!(check.holds(1e-10));
    }

    #[test]
    fn term_cap_guard() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        let group = GroupSpec::cyclic(4).unwrap();
        let a = rand_product(&group, 2, &mut rng);
        let b = rand_product(&group, 2, &mut rng);
        assert!(matches!(ad_product(&a, &b, 8), Err(Error::ResourceGuard(_))));
    }
}
