//! Discrete cube geometry over a finite abelian group `Z`.
//!
//! A `d`-cube configuration is parametrized by `(x, t1, ..., td)` in
//! `Z^{d+1}`; the vertex indexed by a bit pattern `eps` in `{0,1}^d` sits at
//! `x + eps . t = x + sum_{i: eps_i = 1} t_i`. Bit `i` of the pattern
//! corresponds to direction `t_{i+1}` (bit 0 <-> `t1`).
//!
//! The cube measure is the pushforward of the uniform measure on the
//! parameter space, so integrals against it are plain averages over all
//! `N^{d+1}` parameter tuples.

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupFunction, GroupSpec};
use crate::numeric::CompensatedSum;

/// Largest supported cube dimension.
pub const MAX_CUBE_D: usize = 4;
/// Largest supported parameter-space size `N^{d+1}`.
pub const MAX_CUBE_POINTS: usize = 1 << 26;

/// Checks the resource guard for full `d`-cube enumerations over `group`.
pub fn check_cube_guard(group: &GroupSpec, d: usize) -> Result<()> {
    if d == 0 || d > MAX_CUBE_D {
        return Err(Error::ResourceGuard(format!(
            "cube dimension d = {d} outside supported range 1..={MAX_CUBE_D}"
        )));
    }
    let n = group.order();
    let mut points: usize = 1;
    for _ in 0..=d {
        points = points
            .checked_mul(n)
            .filter(|&p| p <= MAX_CUBE_POINTS)
            .ok_or_else(|| {
                Error::ResourceGuard(format!(
                    "parameter space N^(d+1) = {n}^{} exceeds {MAX_CUBE_POINTS}",
                    d + 1
                ))
            })?;
    }
    Ok(())
}

/// `eps . t` for a vertex bit pattern.
#[inline]
pub fn vertex_dot(group: &GroupSpec, eps: u32, t: &[GroupElement]) -> GroupElement {
    let mut acc = 0;
    for (i, &ti) in t.iter().enumerate() {
        if eps >> i & 1 == 1 {
            acc = group.add(acc, ti);
        }
    }
    acc
}

/// Coordinate `x + eps . t` of the vertex `eps` of the cube `(x, t)`.
pub fn vertex_coordinate(
    group: &GroupSpec,
    x: GroupElement,
    t: &[GroupElement],
    eps: u32,
) -> Result<GroupElement> {
    if t.is_empty() || eps >> t.len() != 0 {
        return Err(Error::InvalidInput(format!(
            "vertex pattern {eps:b} does not fit dimension {}",
            t.len()
        )));
    }
    Ok(group.add(x, vertex_dot(group, eps, t)))
}

/// A symmetry of the discrete `d`-cube: a coordinate permutation combined
/// with reflections. It acts on vertex patterns by
/// `sigma(eps)_i = eps_{perm[i]} xor flip_i` and on parametrizations so that
/// vertex coordinates are intertwined:
/// `coord(p, sigma(eps)) = coord(sigma . p, eps)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeIsometry {
    d: usize,
    perm: Vec<usize>,
    flip: u32,
}

impl CubeIsometry {
    pub fn new(perm: Vec<usize>, flip: u32) -> Result<Self> {
        let d = perm.len();
        if d == 0 || d > MAX_CUBE_D {
            return Err(Error::InvalidInput(format!("isometry dimension {d} unsupported")));
        }
        let mut seen = vec![false; d];
        for &p in &perm {
            if p >= d || seen[p] {
                return Err(Error::InvalidInput("perm is not a permutation".into()));
            }
            seen[p] = true;
        }
        if flip >> d != 0 {
            return Err(Error::InvalidInput("flip mask has bits beyond dimension".into()));
        }
        Ok(Self { d, perm, flip })
    }

    pub fn identity(d: usize) -> Result<Self> {
        Self::new((0..d).collect(), 0)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Action on vertex patterns.
    pub fn apply_vertex(&self, eps: u32) -> u32 {
        let mut out = 0;
        for i in 0..self.d {
            let bit = (eps >> self.perm[i] & 1) ^ (self.flip >> i & 1);
            out |= bit << i;
        }
        out
    }

    /// Action on cube parametrizations `(x, t)`.
    pub fn apply_point(
        &self,
        group: &GroupSpec,
        x: GroupElement,
        t: &[GroupElement],
    ) -> Result<(GroupElement, Vec<GroupElement>)> {
        if t.len() != self.d {
            return Err(Error::DomainMismatch(format!(
                "isometry of dimension {} applied to {}-cube",
                self.d,
                t.len()
            )));
        }
        let mut x2 = x;
        for i in 0..self.d {
            if self.flip >> i & 1 == 1 {
                x2 = group.add(x2, t[i]);
            }
        }
        let mut inv = vec![0usize; self.d];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        let t2 = (0..self.d)
            .map(|j| {
                let i = inv[j];
                if self.flip >> i & 1 == 1 {
                    group.neg(t[i])
                } else {
                    t[i]
                }
            })
            .collect();
        Ok((x2, t2))
    }
}

/// The image of a cube parametrization under an isometry, together with the
/// relabeled vertex coordinates.
pub fn cube_symmetry_orbit(
    group: &GroupSpec,
    x: GroupElement,
    t: &[GroupElement],
    sigma: &CubeIsometry,
) -> Result<(GroupElement, Vec<GroupElement>)> {
    sigma.apply_point(group, x, t)
}

/// A real function on the `d`-cube parameter space `Z^{d+1}`, stored densely
/// with index `((x * N + t1) * N + t2) * ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeFunction {
    group: GroupSpec,
    d: usize,
    values: Vec<f64>,
}

impl CubeFunction {
    pub fn from_values(group: GroupSpec, d: usize, values: Vec<f64>) -> Result<Self> {
        check_cube_guard(&group, d)?;
        let expected = group.order().pow(d as u32 + 1);
        if values.len() != expected {
            return Err(Error::InvalidInput(format!(
                "expected {expected} cube values, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("cube values must be finite".into()));
        }
        Ok(Self { group, d, values })
    }

    /// Evaluates a closure on every parameter tuple `(x, t)` in canonical
    /// order.
    pub fn from_fn(
        group: GroupSpec,
        d: usize,
        f: impl Fn(GroupElement, &[GroupElement]) -> f64,
    ) -> Result<Self> {
        check_cube_guard(&group, d)?;
        let n = group.order();
        let mut values = Vec::with_capacity(n.pow(d as u32 + 1));
        let mut t = vec![0; d];
        for x in 0..n {
            loop {
                values.push(f(x, &t));
                if !advance(&mut t, n) {
                    break;
                }
            }
        }
        Self::from_values(group, d, values)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn index(&self, x: GroupElement, t: &[GroupElement]) -> usize {
        debug_assert_eq!(t.len(), self.d);
        let n = self.group.order();
        let mut idx = x;
        for &ti in t {
            idx = idx * n + ti;
        }
        idx
    }

    #[inline]
    pub fn get(&self, x: GroupElement, t: &[GroupElement]) -> f64 {
        self.values[self.index(x, t)]
    }

    /// Integral against the cube measure (the average over parameters).
    pub fn integral(&self) -> f64 {
        crate::numeric::mean(&self.values)
    }

    /// `L^p` norm with respect to the cube measure.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidInput(format!("L^p exponent must be >= 1, got {p}")));
        }
        if p.is_infinite() {
            return Ok(self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())));
        }
        let mut acc = CompensatedSum::new();
        for v in &self.values {
            acc.add(v.abs().powf(p));
        }
        Ok((acc.value() / self.values.len() as f64).powf(1.0 / p))
    }

    fn check_same_domain(&self, other: &CubeFunction) -> Result<()> {
        if self.group != other.group || self.d != other.d {
            return Err(Error::DomainMismatch("cube functions on different domains".into()));
        }
        Ok(())
    }

    pub fn sub(&self, other: &CubeFunction) -> Result<CubeFunction> {
        self.check_same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect();
        Ok(Self { group: self.group.clone(), d: self.d, values })
    }

    pub fn mul(&self, other: &CubeFunction) -> Result<CubeFunction> {
        self.check_same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
        Ok(Self { group: self.group.clone(), d: self.d, values })
    }

    pub fn scale(&self, c: f64) -> CubeFunction {
        let values = self.values.iter().map(|v| c * v).collect();
        Self { group: self.group.clone(), d: self.d, values }
    }
}

/// Odometer step over `len(t)` digits in base `n`; returns false on wrap.
pub(crate) fn advance(t: &mut [GroupElement], n: usize) -> bool {
    for digit in t.iter_mut().rev() {
        *digit += 1;
        if *digit < n {
            return true;
        }
        *digit = 0;
    }
    false
}

/// `integral over (x, t) of prod_{eps in {0,1}^d} fs[eps](x + eps . t)`.
///
/// `fs` must have length `2^d` and is indexed by the vertex bit pattern.
pub fn cube_integral(fs: &[GroupFunction]) -> Result<f64> {
    let k = fs.len();
    if k == 0 || !k.is_power_of_two() {
        return Err(Error::InvalidInput(format!(
            "need 2^d vertex functions, got {k}"
        )));
    }
    let d = k.trailing_zeros() as usize;
    if d == 0 {
        return Ok(fs[0].mean());
    }
    let group = fs[0].group().clone();
    for f in fs {
        if f.group() != &group {
            return Err(Error::DomainMismatch("vertex functions on different groups".into()));
        }
    }
    check_cube_guard(&group, d)?;
    let n = group.order();
    let table = group.add_table();
    let mut t = vec![0; d];
    let mut acc = CompensatedSum::new();
    let mut shifts = vec![0usize; k];
    loop {
        for (eps, s) in shifts.iter_mut().enumerate() {
            *s = vertex_dot(&group, eps as u32, &t) * n;
        }
        for x in 0..n {
            let mut prod = 1.0;
            for (eps, f) in fs.iter().enumerate() {
                prod *= f.get(table[shifts[eps] + x]);
                if prod == 0.0 {
                    break;
                }
            }
            acc.add(prod);
        }
        if !advance(&mut t, n) {
            break;
        }
    }
    Ok(acc.value() / n.pow(d as u32 + 1) as f64)
}
