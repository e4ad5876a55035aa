//! Gowers uniformity norms `U(d)`, dual functions, and cubic convolutions.
//!
//! Two independent evaluation routes are kept side by side: the closed
//! formula (a full cube-integral enumeration) and the inductive recursion
//! `||f||_{U(d)}^{2^d} = E_t ||f . f_t||_{U(d-1)}^{2^{d-1}}` with base case
//! `||f||_{U(1)} = |E f|`. They serve as oracles for one another.

use crate::cube::{self, cube_integral};
use crate::error::{Error, Result};
use crate::group::{GroupFunction, GroupSpec};
use crate::numeric::CompensatedSum;
use serde::Serialize;

/// Evaluation route for the `U(d)` norm.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GowersMethod {
    /// Full enumeration of the closed product formula, `O(N^{d+1} 2^d)`.
    ClosedFormula,
    /// The recursion over difference functions, `O(N^d)` up to constants.
    Inductive,
}

fn clamp_power(pow: f64, scale: f64) -> Result<f64> {
    let tol = 1e-12 * scale.max(1.0);
    if pow < -tol {
        return Err(Error::Numerical(format!(
            "U(d) power came out negative beyond tolerance: {pow}"
        )));
    }
    Ok(pow.max(0.0))
}

/// `||f||_{U(d)}^{2^d}`, clamped to `[0, inf)`.
pub fn gowers_norm_pow(f: &GroupFunction, d: usize, method: GowersMethod) -> Result<f64> {
    cube::check_cube_guard(f.group(), d)?;
    let pow = match method {
        GowersMethod::ClosedFormula => {
            let fs = vec![f.clone(); 1 << d];
            cube_integral(&fs)?
        }
        GowersMethod::Inductive => inductive_pow(f, d)?,
    };
    let sup = f.lp_norm(f64::INFINITY)?;
    clamp_power(pow, sup.powi(1 << d))
}

fn inductive_pow(f: &GroupFunction, d: usize) -> Result<f64> {
    if d == 1 {
        let m = f.mean();
        return Ok(m * m);
    }
    let group = f.group();
    let n = group.order();
    let mut acc = CompensatedSum::new();
    for t in 0..n {
        let diff = f.mul(&f.translate(t)?)?;
        acc.add(inductive_pow(&diff, d - 1)?);
    }
    Ok(acc.value() / n as f64)
}

/// The Gowers uniformity norm `||f||_{U(d)}`.
pub fn gowers_norm(f: &GroupFunction, d: usize, method: GowersMethod) -> Result<f64> {
    let pow = gowers_norm_pow(f, d, method)?;
    Ok(pow.powf(1.0 / (1u64 << d) as f64))
}

/// Cubic convolution of `2^d - 1` functions, one per nonzero vertex of the
/// `d`-cube (`fs[eps - 1]` sits at vertex `eps`):
/// `C(x) = E_t prod_{eps != 0} fs[eps - 1](x + eps . t)`.
pub fn cubic_convolution(fs: &[GroupFunction]) -> Result<GroupFunction> {
    let k = fs.len() + 1;
    if !k.is_power_of_two() || k < 2 {
        return Err(Error::InvalidInput(format!(
            "cubic convolution needs 2^d - 1 functions, got {}",
            fs.len()
        )));
    }
    let d = k.trailing_zeros() as usize;
    let group = fs[0].group().clone();
    for f in fs {
        if f.group() != &group {
            return Err(Error::DomainMismatch("vertex functions on different groups".into()));
        }
    }
    cube::check_cube_guard(&group, d)?;
    let n = group.order();
    let table = group.add_table();
    let mut t = vec![0; d];
    let mut acc: Vec<CompensatedSum> = vec![CompensatedSum::new(); n];
    let mut shifts = vec![0usize; k];
    loop {
        for eps in 1..k {
            shifts[eps] = cube::vertex_dot(&group, eps as u32, &t) * n;
        }
        for (x, slot) in acc.iter_mut().enumerate() {
            let mut prod = 1.0;
            for (i, f) in fs.iter().enumerate() {
                prod *= f.get(table[shifts[i + 1] + x]);
                if prod == 0.0 {
                    break;
                }
            }
            slot.add(prod);
        }
        if !cube::advance(&mut t, n) {
            break;
        }
    }
    let scale = 1.0 / n.pow(d as u32) as f64;
    GroupFunction::from_values(group, acc.iter().map(|a| a.value() * scale).collect())
}

/// Dual function `D_d f(x) = E_t prod_{eps != 0} f(x + eps . t)`, so that
/// `<D_d f ; f> = ||f||_{U(d)}^{2^d}`.
pub fn dual_function(f: &GroupFunction, d: usize) -> Result<GroupFunction> {
    cube::check_cube_guard(f.group(), d)?;
    cubic_convolution(&vec![f.clone(); (1 << d) - 1])
}

/// Both sides of the box Cauchy-Schwarz inequality
/// `|integral of prod fs| <= prod ||fs[eps]||_{U(d)}`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CsgCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl CsgCheck {
    pub fn holds(&self, tol: f64) -> bool {
        self.lhs <= self.rhs + tol
    }
}

/// Evaluates the box Cauchy-Schwarz inequality for a full vertex family of
/// `2^d` functions.
pub fn csg_check(fs: &[GroupFunction]) -> Result<CsgCheck> {
    if !fs.len().is_power_of_two() || fs.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need 2^d vertex functions, got {}",
            fs.len()
        )));
    }
    let d = fs.len().trailing_zeros() as usize;
    let lhs = cube_integral(fs)?.abs();
    let mut rhs = 1.0;
    for f in fs {
        rhs *= gowers_norm(f, d, GowersMethod::ClosedFormula)?;
    }
    Ok(CsgCheck { lhs, rhs })
}

/// One row of the elementary-bounds report at a given `d`.
#[derive(Clone, Debug, Serialize)]
pub struct ElementaryBoundsRow {
    pub d: usize,
    /// `||f||_{U(d)}`.
    pub u_norm: f64,
    /// `||f||_{2^{d-1}}`.
    pub lp_upper: f64,
    /// `sup |D_d f|`.
    pub dual_sup: f64,
    /// `||f||_{2^{d-1}}^{2^d - 1}`, the proven bound on `dual_sup`.
    pub dual_sup_bound: f64,
    /// `||f||_{2^d/(d+1)}`, the conjectured sharp upper bound on `u_norm`.
    pub sharp_lp: f64,
    /// `||f||_{(2^d-1)/d}^{2^d - 1}`, the conjectured sharp bound on
    /// `dual_sup`.
    pub sharp_dual_bound: f64,
    /// `u_norm <= lp_upper` (proven; checked with slack `1e-10`).
    pub u_le_lp: bool,
    /// `||f||_{U(d)} >= ||f||_{U(d-1)}` (proven; vacuous at `d = 1`).
    pub monotone: bool,
    /// `dual_sup <= dual_sup_bound` (proven).
    pub dual_le_bound: bool,
    /// `u_norm <= sharp_lp` (empirical observation, not asserted).
    pub sharp_u_holds: bool,
    /// `dual_sup <= sharp_dual_bound` (empirical observation, not asserted).
    pub sharp_dual_holds: bool,
}

/// Tabulates the elementary norm inequalities for `d = 1..=d_max`.
///
/// The `u_le_lp`, `monotone`, and `dual_le_bound` columns are proven
/// inequalities; `sharp_*` columns report the conjecturally sharp variants
/// and are informational only.
pub fn elementary_bounds_report(
    f: &GroupFunction,
    d_max: usize,
) -> Result<Vec<ElementaryBoundsRow>> {
    const SLACK: f64 = 1e-10;
    let mut rows = Vec::new();
    let mut prev_u = 0.0;
    for d in 1..=d_max {
        let u_norm = gowers_norm(f, d, GowersMethod::Inductive)?;
        let lp_upper = f.lp_norm((1u64 << (d - 1)) as f64)?;
        let dual = dual_function(f, d)?;
        let dual_sup = dual.lp_norm(f64::INFINITY)?;
        let pow = ((1u64 << d) - 1) as f64;
        let dual_sup_bound = lp_upper.powf(pow);
        let sharp_lp = f.lp_norm((1u64 << d) as f64 / (d as f64 + 1.0))?;
        let sharp_dual_bound = f.lp_norm(pow / d as f64)?.powf(pow);
        rows.push(ElementaryBoundsRow {
            d,
            u_norm,
            lp_upper,
            dual_sup,
            dual_sup_bound,
            sharp_lp,
            sharp_dual_bound,
            u_le_lp: u_norm <= lp_upper + SLACK,
            monotone: d == 1 || prev_u <= u_norm + SLACK,
            dual_le_bound: dual_sup <= dual_sup_bound + SLACK,
            sharp_u_holds: u_norm <= sharp_lp + SLACK,
            sharp_dual_holds: dual_sup <= sharp_dual_bound + SLACK,
        });
        prev_u = u_norm;
    }
    Ok(rows)
}

/// Seeded random test function with values in `[-1, 1]`.
#[cfg(test)]
pub(crate) fn random_unit_range_fn(
    group: &GroupSpec,
    rng: &mut impl rand::Rng,
) -> GroupFunction {
    GroupFunction::from_values(
        group.clone(),
        (0..group.order()).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    )
    .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn z4_delta() -> GroupFunction {
        GroupFunction::from_values(GroupSpec::cyclic(4).unwrap(), vec![1.0, 0.0, 0.0, 0.0])
            .unwrap()
    }

    #[test]
    fn u1_is_absolute_mean() {
        let f = GroupFunction::from_values(
            GroupSpec::cyclic(4).unwrap(),
            vec![1.0, -2.0, 0.5, -0.5],
        )
        .unwrap();
        for method in [GowersMethod::ClosedFormula, GowersMethod::Inductive] {
            let u1 = gowers_norm(&f, 1, method).unwrap();
            assert!((u1 - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn u2_delta_reference_value() {
        let f = z4_delta();
        let expected = 0.25f64.sqrt().sqrt() * 0.5; // (1/64)^{1/4} = 2^{-3/2}
        for method in [GowersMethod::ClosedFormula, GowersMethod::Inductive] {
            let u2 = gowers_norm(&f, 2, method).unwrap();
            assert!((u2 - expected).abs() < 1e-14, "{u2} vs {expected}");
        }
    }

    #[test]
    fn u2_of_cosine() {
        let n = 8;
        let group = GroupSpec::cyclic(n).unwrap();
        let f = GroupFunction::from_fn(group, |x| (2.0 * PI * x as f64 / n as f64).cos())
            .unwrap();
        let expected = 0.125f64.powf(0.25);
        let u2 = gowers_norm(&f, 2, GowersMethod::ClosedFormula).unwrap();
        assert!((u2 - expected).abs() < 1e-12);
    }

    #[test]
    fn closed_and_inductive_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for orders in [vec![5], vec![8], vec![2, 2, 2]] {
            let group = GroupSpec::new(orders).unwrap();
            for _ in 0..5 {
                let f = random_unit_range_fn(&group, &mut rng);
                for d in 1..=3 {
                    let a = gowers_norm(&f, d, GowersMethod::ClosedFormula).unwrap();
                    let b = gowers_norm(&f, d, GowersMethod::Inductive).unwrap();
                    assert!(
                        (a - b).abs() <= 1e-10 * (1.0 + a),
                        "d={d}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn dual_function_delta_reference_value() {
        let f = z4_delta();
        let dual = dual_function(&f, 2).unwrap();
        assert_eq!(dual.values(), &[1.0 / 16.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn dual_pairing_recovers_norm_power() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let group = GroupSpec::cyclic(6).unwrap();
        for _ in 0..10 {
            let f = random_unit_range_fn(&group, &mut rng);
            for d in 1..=3 {
                let dual = dual_function(&f, d).unwrap();
                let pairing = dual.inner(&f).unwrap();
                let pow = gowers_norm_pow(&f, d, GowersMethod::ClosedFormula).unwrap();
                assert!((pairing - pow).abs() < 1e-12, "d={d}: {pairing} vs {pow}");
            }
        }
    }

    #[test]
    fn box_cauchy_schwarz_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let group = GroupSpec::cyclic(7).unwrap();
        for d in 1..=3usize {
            for _ in 0..10 {
                let fs: Vec<GroupFunction> =
                    (0..1 << d).map(|_| random_unit_range_fn(&group, &mut rng)).collect();
                let check = csg_check(&fs).unwrap();
                assert!(check.holds(1e-10), "d={d}: {} > {}", check.lhs, check.rhs);
            }
        }
    }

    #[test]
    fn cubic_convolution_sup_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let group = GroupSpec::cyclic(6).unwrap();
        for d in 2..=3usize {
            for _ in 0..10 {
                let fs: Vec<GroupFunction> = (0..(1 << d) - 1)
                    .map(|_| random_unit_range_fn(&group, &mut rng))
                    .collect();
                let conv = cubic_convolution(&fs).unwrap();
                let sup = conv.lp_norm(f64::INFINITY).unwrap();
                let mut bound = 1.0;
                for f in &fs {
                    bound *= f.lp_norm((1u64 << (d - 1)) as f64).unwrap();
                }
                assert!(sup <= bound + 1e-10, "d={d}: {sup} > {bound}");
            }
        }
    }

    #[test]
    fn norm_axioms_and_monotonicity() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let group = GroupSpec::cyclic(8).unwrap();
        for _ in 0..10 {
            let f = random_unit_range_fn(&group, &mut rng);
            let g = random_unit_range_fn(&group, &mut rng);
            for d in 2..=3usize {
                let uf = gowers_norm(&f, d, GowersMethod::Inductive).unwrap();
                let ug = gowers_norm(&g, d, GowersMethod::Inductive).unwrap();
                let usum =
                    gowers_norm(&f.add(&g).unwrap(), d, GowersMethod::Inductive).unwrap();
                assert!(usum <= uf + ug + 1e-10, "triangle failed");
                let uscaled =
                    gowers_norm(&f.scale(-2.5), d, GowersMethod::Inductive).unwrap();
                assert!((uscaled - 2.5 * uf).abs() < 1e-10, "homogeneity failed");
                let ut = gowers_norm(&f.translate(3).unwrap(), d, GowersMethod::Inductive)
                    .unwrap();
                assert!((ut - uf).abs() < 1e-11, "translation invariance failed");
            }
            let report = elementary_bounds_report(&f, 3).unwrap();
            for row in &report {
                assert!(row.u_le_lp, "U({}) <= L^{{2^{{d-1}}}} failed", row.d);
                assert!(row.monotone, "U({}) monotonicity failed", row.d);
                assert!(row.dual_le_bound, "dual sup bound failed at d={}", row.d);
            }
        }
    }
}
