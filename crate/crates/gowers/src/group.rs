//! Finite abelian groups `Z = Z_{N1} x ... x Z_{Nk}` and real-valued
//! functions on them.
//!
//! Elements are flat indices `0..N` (with `N = N1*...*Nk`) in row-major
//! mixed-radix order: the index of `(x1, ..., xk)` is
//! `x1*N2*...*Nk + ... + xk`.

use crate::error::{Error, Result};
use crate::numeric::{self, CompensatedSum};
use serde::{Deserialize, Serialize};

/// A group element, as a flat index into `0..N`.
pub type GroupElement = usize;

/// Largest supported group order.
pub const MAX_GROUP_ORDER: usize = 1 << 20;

/// A finite abelian group given by its cyclic factor orders.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSpec {
    orders: Vec<usize>,
    #[serde(skip)]
    strides: Vec<usize>,
    #[serde(skip)]
    order: usize,
}

impl GroupSpec {
    /// Builds a group from cyclic factor orders, all `>= 1`.
    pub fn new(orders: Vec<usize>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidInput("group needs at least one factor".into()));
        }
        if orders.iter().any(|&n| n == 0) {
            return Err(Error::InvalidInput("cyclic factor orders must be >= 1".into()));
        }
        let mut order: usize = 1;
        for &n in &orders {
            order = order
                .checked_mul(n)
                .filter(|&o| o <= MAX_GROUP_ORDER)
                .ok_or_else(|| {
                    Error::ResourceGuard(format!("group order exceeds {MAX_GROUP_ORDER}"))
                })?;
        }
        let mut spec = Self { orders, strides: Vec::new(), order };
        spec.rebuild_cache();
        Ok(spec)
    }

    /// The cyclic group `Z_n`.
    pub fn cyclic(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    fn rebuild_cache(&mut self) {
        let k = self.orders.len();
        let mut strides = vec![1usize; k];
        for i in (0..k.saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.orders[i + 1];
        }
        self.order = self.orders.iter().product();
        self.strides = strides;
    }

    /// Cyclic factor orders.
    pub fn orders(&self) -> &[usize] {
        &self.orders
    }

    /// Total number of elements `N`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Decomposes a flat index into per-factor coordinates.
    pub fn to_tuple(&self, a: GroupElement) -> Vec<usize> {
        debug_assert!(a < self.order);
        self.orders
            .iter()
            .zip(&self.strides)
            .map(|(&n, &s)| (a / s) % n)
            .collect()
    }

    /// Flat index of per-factor coordinates (each reduced mod its order).
    pub fn from_tuple(&self, coords: &[usize]) -> Result<GroupElement> {
        if coords.len() != self.orders.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} coordinates, got {}",
                self.orders.len(),
                coords.len()
            )));
        }
        let mut a = 0;
        for ((&c, &n), &s) in coords.iter().zip(&self.orders).zip(&self.strides) {
            a += (c % n) * s;
        }
        Ok(a)
    }

    /// Group addition on flat indices.
    #[inline]
    pub fn add(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        debug_assert!(a < self.order && b < self.order);
        let mut out = 0;
        for (&n, &s) in self.orders.iter().zip(&self.strides) {
            let xa = (a / s) % n;
            let xb = (b / s) % n;
            let mut x = xa + xb;
            if x >= n {
                x -= n;
            }
            out += x * s;
        }
        out
    }

    /// Group negation on flat indices.
    #[inline]
    pub fn neg(&self, a: GroupElement) -> GroupElement {
        debug_assert!(a < self.order);
        let mut out = 0;
        for (&n, &s) in self.orders.iter().zip(&self.strides) {
            let xa = (a / s) % n;
            let x = if xa == 0 { 0 } else { n - xa };
            out += x * s;
        }
        out
    }

    /// `a - b`.
    #[inline]
    pub fn sub(&self, a: GroupElement, b: GroupElement) -> GroupElement {
        self.add(a, self.neg(b))
    }

    /// Scalar multiple `m * a` (repeated addition, `m` reduced per factor).
    pub fn scale(&self, m: usize, a: GroupElement) -> GroupElement {
        let mut out = 0;
        for (&n, &s) in self.orders.iter().zip(&self.strides) {
            let xa = (a / s) % n;
            out += (xa * (m % n)) % n * s;
        }
        out
    }

    /// Iterator over all elements in canonical order.
    pub fn elements(&self) -> std::ops::Range<GroupElement> {
        0..self.order
    }

    /// Flat `N x N` addition table, `table[a * N + b] = a + b`.
    ///
    /// Used to keep the inner loops of cube enumerations cheap.
    pub fn add_table(&self) -> Vec<GroupElement> {
        let n = self.order;
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = self.add(a, b);
            }
        }
        table
    }
}

#[derive(Serialize, Deserialize)]
struct GroupFunctionRaw {
    orders: Vec<usize>,
    values: Vec<f64>,
}

/// A real-valued function on a finite abelian group, stored densely in
/// canonical element order. Immutable after construction; every pointwise
/// operation returns a new function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GroupFunctionRaw", into = "GroupFunctionRaw")]
pub struct GroupFunction {
    group: GroupSpec,
    values: Vec<f64>,
}

impl TryFrom<GroupFunctionRaw> for GroupFunction {
    type Error = Error;
    fn try_from(raw: GroupFunctionRaw) -> Result<Self> {
        GroupFunction::from_values(GroupSpec::new(raw.orders)?, raw.values)
    }
}

impl From<GroupFunction> for GroupFunctionRaw {
    fn from(f: GroupFunction) -> Self {
        GroupFunctionRaw { orders: f.group.orders.clone(), values: f.values }
    }
}

impl GroupFunction {
    /// Wraps a dense value vector; every value must be finite.
    pub fn from_values(group: GroupSpec, values: Vec<f64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::InvalidInput(format!(
                "expected {} values for group of order {}, got {}",
                group.order(),
                group.order(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("function values must be finite".into()));
        }
        Ok(Self { group, values })
    }

    /// Builds a function by evaluating a closure on every element.
    pub fn from_fn(group: GroupSpec, f: impl Fn(GroupElement) -> f64) -> Result<Self> {
        let values = group.elements().map(f).collect();
        Self::from_values(group, values)
    }

    /// The constant function `c`.
    pub fn constant(group: GroupSpec, c: f64) -> Result<Self> {
        let n = group.order();
        Self::from_values(group, vec![c; n])
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: GroupElement) -> f64 {
        self.values[x]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn check_same_group(&self, other: &GroupFunction) -> Result<()> {
        if self.group != other.group {
            return Err(Error::DomainMismatch(format!(
                "functions live on different groups: {:?} vs {:?}",
                self.group.orders, other.group.orders
            )));
        }
        Ok(())
    }

    /// `E_x f(x)`.
    pub fn mean(&self) -> f64 {
        numeric::mean(&self.values)
    }

    /// Normalized `L^p` norm `(E_x |f(x)|^p)^{1/p}`; `p = inf` gives the sup.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidInput(format!("L^p exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        if p == 1.0 {
            return Ok(numeric::mean(&self.values.iter().map(|v| v.abs()).collect::<Vec<_>>()));
        }
        let mut acc = CompensatedSum::new();
        for v in &self.values {
            acc.add(v.abs().powf(p));
        }
        Ok((acc.value() / self.values.len() as f64).powf(1.0 / p))
    }

    /// Normalized inner product `E_x f(x) g(x)`.
    pub fn inner(&self, other: &GroupFunction) -> Result<f64> {
        self.check_same_group(other)?;
        let mut acc = CompensatedSum::new();
        for (a, b) in self.values.iter().zip(&other.values) {
            acc.add(a * b);
        }
        Ok(acc.value() / self.values.len() as f64)
    }

    /// Translate `f_t(x) = f(x + t)`.
    pub fn translate(&self, t: GroupElement) -> Result<GroupFunction> {
        if t >= self.group.order() {
            return Err(Error::InvalidInput(format!(
                "translation {t} out of range for group of order {}",
                self.group.order()
            )));
        }
        let values = self
            .group
            .elements()
            .map(|x| self.values[self.group.add(x, t)])
            .collect();
        Ok(Self { group: self.group.clone(), values })
    }

    /// Pointwise sum.
    pub fn add(&self, other: &GroupFunction) -> Result<GroupFunction> {
        self.check_same_group(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
        Ok(Self { group: self.group.clone(), values })
    }

    /// Pointwise difference.
    pub fn sub(&self, other: &GroupFunction) -> Result<GroupFunction> {
        self.check_same_group(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { group: self.group.clone(), values })
    }

    /// Pointwise product.
    pub fn mul(&self, other: &GroupFunction) -> Result<GroupFunction> {
        self.check_same_group(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { group: self.group.clone(), values })
    }

    /// Scalar multiple.
    pub fn scale(&self, c: f64) -> GroupFunction {
        let values = self.values.iter().map(|v| c * v).collect();
        Self { group: self.group.clone(), values }
    }

    /// Sign-preserving pointwise power `sign(f) |f|^p`.
    pub fn signed_pow(&self, p: f64) -> GroupFunction {
        let values = self
            .values
            .iter()
            .map(|&v| if v == 0.0 { 0.0 } else { v.signum() * v.abs().powf(p) })
            .collect();
        Self { group: self.group.clone(), values }
    }

    /// Apply a pointwise map.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<GroupFunction> {
        Self::from_values(self.group.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    /// CSV rendering with an `index,value` header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,value\n");
        for (i, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{i},{v:?}\n"));
        }
        out
    }

    /// Parses the CSV form produced by [`GroupFunction::to_csv`]; the group
    /// is supplied out of band.
    pub fn from_csv(group: GroupSpec, text: &str) -> Result<Self> {
        let mut values = vec![f64::NAN; group.order()];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("index")) {
                continue;
            }
            let (idx, val) = line.split_once(',').ok_or_else(|| {
                Error::InvalidInput(format!("csv line {}: expected `index,value`", lineno + 1))
            })?;
            let idx: usize = idx.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("csv line {}: bad index", lineno + 1))
            })?;
            let val: f64 = val.trim().parse().map_err(|_| {
                Error::InvalidInput(format!("csv line {}: bad value", lineno + 1))
            })?;
            if idx >= values.len() {
                return Err(Error::InvalidInput(format!(
                    "csv index {idx} out of range for group of order {}",
                    values.len()
                )));
            }
            values[idx] = val;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidInput("csv does not cover every index".into()));
        }
        Self::from_values(group, values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn z4_delta() -> GroupFunction {
        GroupFunction::from_values(GroupSpec::cyclic(4).unwrap(), vec![1.0, 0.0, 0.0, 0.0])
            .unwrap()
    }

    #[test]
    fn mixed_radix_arithmetic() {
        let g = GroupSpec::new(vec![2, 3]).unwrap();
        assert_eq!(g.order(), 6);
        // (1,2) + (1,2) = (0,1)
        let a = g.from_tuple(&[1, 2]).unwrap();
        assert_eq!(g.to_tuple(g.add(a, a)), vec![0, 1]);
        assert_eq!(g.add(a, g.neg(a)), 0);
    }

    #[test]
    fn lp_norm_reference_values() {
        let ones =
            GroupFunction::constant(GroupSpec::cyclic(4).unwrap(), 1.0).unwrap();
        assert_eq!(ones.lp_norm(2.0).unwrap(), 1.0);
        let f = z4_delta();
        assert_eq!(f.lp_norm(1.0).unwrap(), 0.25);
        assert_eq!(f.lp_norm(2.0).unwrap(), 0.5);
        assert_eq!(f.lp_norm(f64::INFINITY).unwrap(), 1.0);
        assert!(f.lp_norm(0.5).is_err());
    }

    #[test]
    fn translate_reference_values() {
        let f = z4_delta();
        assert_eq!(f.translate(1).unwrap().values(), &[0.0, 0.0, 0.0, 1.0]);
        let g = GroupFunction::from_values(
            GroupSpec::cyclic(4).unwrap(),
            vec![1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let shifted = g.translate(1).unwrap().translate(1).unwrap();
        assert_eq!(shifted.values(), &[3.0, 4.0, 1.0, 2.0]);
    }

    #[test]
    fn inner_reference_values() {
        let group = GroupSpec::cyclic(2).unwrap();
        let f = GroupFunction::from_values(group.clone(), vec![1.0, -1.0]).unwrap();
        let g = GroupFunction::from_values(group, vec![1.0, 1.0]).unwrap();
        assert_eq!(f.inner(&g).unwrap(), 0.0);
        let a = z4_delta();
        let b = a.translate(1).unwrap();
        assert_eq!(a.inner(&b).unwrap(), 0.0);
    }

    #[test]
    fn csv_and_json_round_trip() {
        let f = GroupFunction::from_values(
            GroupSpec::new(vec![2, 2]).unwrap(),
            vec![0.125, -1.5, 3.0, 0.0],
        )
        .unwrap();
        let back =
            GroupFunction::from_csv(f.group().clone(), &f.to_csv()).unwrap();
        assert_eq!(back, f);
        let json = serde_json::to_string(&f).unwrap();
        let back: GroupFunction = serde_json::from_str(&json).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(GroupSpec::new(vec![]).is_err());
        assert!(GroupSpec::new(vec![4, 0]).is_err());
        assert!(GroupFunction::from_values(
            GroupSpec::cyclic(3).unwrap(),
            vec![1.0, f64::NAN, 0.0]
        )
        .is_err());
        assert!(GroupFunction::from_values(GroupSpec::cyclic(3).unwrap(), vec![1.0]).is_err());
    }

    fn arb_fn(n: usize) -> impl Strategy<Value = GroupFunction> {
        prop::collection::vec(-4.0f64..4.0, n).prop_map(move |values| {
            GroupFunction::from_values(GroupSpec::cyclic(n).unwrap(), values).unwrap()
        })
    }

    proptest! {
        #[test]
        fn lp_homogeneity(f in arb_fn(6), c in -3.0f64..3.0, p in 1.0f64..6.0) {
            let lhs = f.scale(c).lp_norm(p).unwrap();
            let rhs = c.abs() * f.lp_norm(p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs));
        }

        #[test]
        fn lp_triangle(f in arb_fn(6), g in arb_fn(6), p in 1.0f64..6.0) {
            let lhs = f.add(&g).unwrap().lp_norm(p).unwrap();
            let rhs = f.lp_norm(p).unwrap() + g.lp_norm(p).unwrap();
            prop_assert!(lhs <= rhs + 1e-10);
        }

        #[test]
        fn lp_monotone_in_p(f in arb_fn(8), p in 1.0f64..4.0, q in 0.0f64..4.0) {
            let lo = f.lp_norm(p).unwrap();
            let hi = f.lp_norm(p + q).unwrap();
            prop_assert!(lo <= hi + 1e-10);
        }

        #[test]
        fn holder_inequality(f in arb_fn(8), g in arb_fn(8)) {
            let lhs = f.inner(&g).unwrap().abs();
            let rhs = f.lp_norm(2.0).unwrap() * g.lp_norm(2.0).unwrap();
            prop_assert!(lhs <= rhs + 1e-10);
        }

        #[test]
        fn translation_isometry(f in arb_fn(8), t in 0usize..8, p in 1.0f64..5.0) {
            let lhs = f.translate(t).unwrap().lp_norm(p).unwrap();
            let rhs = f.lp_norm(p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }
}
