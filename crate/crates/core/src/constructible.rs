//! Torus-invariant constructible functions and their push-forward.
//!
//! A function is determined by its value on each orbit `O(σ)`. Euler
//! characteristics are compactly supported ones: a torus of positive
//! dimension counts zero, a fixed point counts one.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::chow::require_same_fan;
use crate::fan::{Cone, Fan, OrbitFiber, ToricMorphism};
use crate::{Error, Result};

/// An integer value per orbit; orbits not listed have value zero.
#[derive(Clone, Debug)]
pub struct ConstructibleFunction {
    fan: Arc<Fan>,
    values: BTreeMap<Cone, BigInt>,
}

impl PartialEq for ConstructibleFunction {
    fn eq(&self, other: &Self) -> bool {
        crate::chow::same_fan(&self.fan, &other.fan) && self.values == other.values
    }
}

impl Eq for ConstructibleFunction {}

impl ConstructibleFunction {
    pub fn zero(fan: Arc<Fan>) -> Self {
        ConstructibleFunction { fan, values: BTreeMap::new() }
    }

    pub fn constant(fan: Arc<Fan>, value: BigInt) -> Self {
        Self::from_fn(fan, |_| value.clone())
    }

    /// `φ(O(σ)) = f(σ)` for every cone.
    pub fn from_fn(fan: Arc<Fan>, mut f: impl FnMut(&Cone) -> BigInt) -> Self {
        let mut out = Self::zero(fan.clone());
        for cone in fan.cones() {
            out.set(cone.clone(), f(cone));
        }
        out
    }

    pub fn from_values(fan: Arc<Fan>, values: impl IntoIterator<Item = (Cone, BigInt)>) -> Result<Self> {
        let mut out = Self::zero(fan);
        for (cone, v) in values {
            out.fan.require_cone(&cone)?;
            let current = out.value(&cone);
            out.set(cone, current + v);
        }
        Ok(out)
    }

    /// `1_{V(σ)}`: one on every orbit whose cone contains `σ`.
    pub fn indicator_of_orbit_closure(fan: Arc<Fan>, sigma: &Cone) -> Result<Self> {
        fan.require_cone(sigma)?;
        Ok(Self::from_fn(fan, |c| if c.contains(sigma) { BigInt::one() } else { BigInt::zero() }))
    }

    /// `1_{O(σ)}`.
    pub fn indicator_of_orbit(fan: Arc<Fan>, sigma: &Cone) -> Result<Self> {
        fan.require_cone(sigma)?;
        let mut out = Self::zero(fan);
        out.set(sigma.clone(), BigInt::one());
        Ok(out)
    }

    pub fn fan(&self) -> &Arc<Fan> {
        &self.fan
    }

    pub fn value(&self, cone: &Cone) -> BigInt {
        self.values.get(cone).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, cone: Cone, value: BigInt) {
        match self.values.entry(cone) {
            Entry::Occupied(slot) if value.is_zero() => {
                slot.remove();
            }
            Entry::Occupied(mut slot) => {
                *slot.get_mut() = value;
            }
            Entry::Vacant(slot) => {
                if !value.is_zero() {
                    slot.insert(value);
                }
            }
        }
    }

    /// Orbits with nonzero value, in graded order.
    pub fn support(&self) -> impl Iterator<Item = (&Cone, &BigInt)> {
        self.values.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    fn combine(&self, other: &Self, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> Result<Self> {
        require_same_fan(&self.fan, &other.fan)?;
        Ok(Self::from_fn(self.fan.clone(), |c| op(&self.value(c), &other.value(c))))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    /// Pointwise maximum; for indicators, the indicator of the union.
    pub fn max(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.max(b).clone())
    }

    /// Pointwise minimum; for indicators, the indicator of the intersection.
    pub fn min(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a.min(b).clone())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a * b)
    }

    pub fn scaled(&self, factor: &BigInt) -> Self {
        Self::from_fn(self.fan.clone(), |c| self.value(c) * factor)
    }
}

impl fmt::Display for ConstructibleFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.values.is_empty() {
            return f.write_str("0");
        }
        for (i, (cone, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{v}*1_O({cone})")?;
        }
        Ok(())
    }
}

/// `χ(φ) = Σ_σ φ(O(σ)) χ_c(O(σ))`, i.e. the sum of the values at fixed points.
pub fn euler_characteristic(phi: &ConstructibleFunction) -> Result<BigInt> {
    let fan = &phi.fan;
    if !fan.is_complete() {
        return Err(Error::NotComplete(fan.name().to_string()));
    }
    Ok(phi.support().filter(|(c, _)| c.dim() == fan.dim()).map(|(_, v)| v).sum())
}

/// `f_*φ`: the value at a point of `O(τ)` is the Euler characteristic of
/// `φ` restricted to the fiber.
///
/// The fiber of `O(σ') -> O(τ)` is a finite set when the orbit map is a
/// finite torus cover, and a disjoint union of positive-dimensional tori
/// (χ_c = 0) otherwise. An orbit mapping finitely onto a proper subtorus
/// would give a function that is not torus-invariant and is rejected.
pub fn pushforward_function(m: &ToricMorphism, phi: &ConstructibleFunction) -> Result<ConstructibleFunction> {
    require_same_fan(m.source(), &phi.fan)?;
    if !m.source().is_complete() {
        return Err(Error::NotComplete(m.source().name().to_string()));
    }
    m.require_compatible()?;
    let mut out = ConstructibleFunction::zero(m.target().clone());
    for (cone, value) in phi.support() {
        let orbit = m.orbit_map(cone)?;
        match orbit.fiber {
            OrbitFiber::Finite(d) => {
                let current = out.value(&orbit.target);
                out.set(orbit.target, current + value * d);
            }
            OrbitFiber::PositiveDimensional => {}
            OrbitFiber::NonDominant => return Err(Error::NonInvariantImage(cone.clone())),
        }
    }
    Ok(out)
}
