//! Finite-generator real Grassmann algebra: anticommuting generators,
//! graded multiplication, parity, and the body projection.
//!
//! A value is a linear combination of monomials `xi_{i1} ^ ... ^ xi_{ik}`
//! with strictly increasing indices; monomials are stored as bitmasks over
//! the generator set `{1..L}`, which makes the canonical form automatic.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ring::Ring;

/// Z2 degree. Closed under addition mod 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity of a product / bracket of parities: addition mod 2.
    pub fn plus(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn of_len(len: u32) -> Parity {
        if len % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Parity::Even => "even",
            Parity::Odd => "odd",
        }
    }
}

/// Homogeneity report for a Grassmann number: zero counts as even.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParityClass {
    Homogeneous(Parity),
    Mixed,
}

/// Element of the Grassmann algebra on `gens` generators, with coefficients
/// in `C` (exact rationals in the analysis path, `f64` in simulation).
///
/// Invariants: every stored coefficient is nonzero, every monomial bitmask
/// fits below bit `gens`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrassmannNumber<C: Ring> {
    gens: u32,
    terms: BTreeMap<u64, C>,
}

/// Sign of reordering the concatenation of two disjoint index sets into
/// increasing order; `None` when the sets overlap (the product vanishes).
fn merge_sign(a: u64, b: u64) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    // Count inversions: pairs (i in a, j in b) with i > j.
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(inversions % 2 == 1)
}

impl<C: Ring> GrassmannNumber<C> {
    /// The zero element. Carries no generator budget of its own; it embeds
    /// into any session's algebra.
    pub fn zero() -> Self {
        GrassmannNumber { gens: 0, terms: BTreeMap::new() }
    }

    pub fn scalar(gens: u32, value: C) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(0u64, value);
        }
        GrassmannNumber { gens, terms }
    }

    pub fn one(gens: u32) -> Self {
        Self::scalar(gens, C::one())
    }

    /// Generator `xi_index`, 1-based.
    pub fn generator(gens: u32, index: u32) -> Result<Self> {
        if index == 0 || index > gens {
            return Err(Error::GeneratorOutOfRange { index, count: gens });
        }
        let mut terms = BTreeMap::new();
        terms.insert(1u64 << (index - 1), C::one());
        Ok(GrassmannNumber { gens, terms })
    }

    /// Build from (indices, coefficient) pairs; indices 1-based, must be
    /// strictly increasing within each monomial.
    pub fn from_terms(gens: u32, entries: &[(&[u32], C)]) -> Result<Self> {
        let mut out = Self::scalar(gens, C::zero());
        for (indices, coeff) in entries {
            let mut mask = 0u64;
            let mut prev = 0u32;
            for &i in *indices {
                if i == 0 || i > gens {
                    return Err(Error::GeneratorOutOfRange { index: i, count: gens });
                }
                if i <= prev {
                    return Err(Error::Precondition(
                        "monomial indices must be strictly increasing".into(),
                    ));
                }
                prev = i;
                mask |= 1u64 << (i - 1);
            }
            out.add_term(mask, coeff.clone());
        }
        Ok(out)
    }

    pub fn num_generators(&self) -> u32 {
        self.gens
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &C)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, mask: u64) -> C {
        self.terms.get(&mask).cloned().unwrap_or_else(C::zero)
    }

    fn add_term(&mut self, mask: u64, coeff: C) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mask);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    /// Coefficient of the empty monomial.
    pub fn body(&self) -> C {
        self.coeff(0)
    }

    /// The nilpotent remainder after removing the body.
    pub fn soul(&self) -> Self {
        let mut s = self.clone();
        s.terms.remove(&0);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Even / Odd when every monomial length has the same parity; zero is
    /// even by convention.
    pub fn parity(&self) -> ParityClass {
        let mut seen: Option<Parity> = None;
        for (&mask, _) in &self.terms {
            let p = Parity::of_len(mask.count_ones());
            match seen {
                None => seen = Some(p),
                Some(q) if q == p => {}
                Some(_) => return ParityClass::Mixed,
            }
        }
        ParityClass::Homogeneous(seen.unwrap_or(Parity::Even))
    }

    pub fn is_homogeneous(&self, parity: Parity) -> bool {
        self.parity() == ParityClass::Homogeneous(parity) || self.is_zero()
    }

    /// Internal sum; generator budgets unify to the larger one.
    pub fn plus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.gens = out.gens.max(other.gens);
        for (&mask, c) in &other.terms {
            out.add_term(mask, c.clone());
        }
        out
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }

    pub fn negate(&self) -> Self {
        GrassmannNumber {
            gens: self.gens,
            terms: self.terms.iter().map(|(k, v)| (*k, v.neg())).collect(),
        }
    }

    /// Internal graded product; generator budgets unify to the larger one.
    pub fn times(&self, other: &Self) -> Self {
        let mut out = GrassmannNumber {
            gens: self.gens.max(other.gens),
            terms: BTreeMap::new(),
        };
        for (&ka, ca) in &self.terms {
            for (&kb, cb) in &other.terms {
                if let Some(flip) = merge_sign(ka, kb) {
                    let c = ca.mul(cb);
                    out.add_term(ka | kb, if flip { c.neg() } else { c });
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut out = GrassmannNumber { gens: self.gens, terms: BTreeMap::new() };
        for (&mask, v) in &self.terms {
            out.add_term(mask, v.mul(c));
        }
        out
    }

    /// Sum of coefficient magnitudes; a cheap norm for scaling decisions.
    pub fn coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).sum()
    }

    /// Inverse when the body is invertible: with `x = b(1 + s/b)` and `s`
    /// nilpotent, `x^{-1} = b^{-1} sum_k (-s/b)^k`, a finite sum.
    pub fn inverse(&self) -> Option<Self> {
        let b_inv = self.body().try_inv()?;
        let gens = self.gens;
        // t = -soul/b; series 1 + t + t^2 + ... terminates by nilpotency.
        let t = self.soul().negate().scale(&b_inv);
        let mut acc = Self::scalar(gens, C::one());
        let mut power = Self::scalar(gens, C::one());
        loop {
            power = power.times(&t);
            if power.is_zero() {
                break;
            }
            acc = acc.plus(&power);
        }
        Some(acc.scale(&b_inv))
    }
}

impl GrassmannNumber<f64> {
    /// True when every coefficient is finite.
    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.is_finite())
    }
}

impl<C: Ring> Ring for GrassmannNumber<C> {
    fn zero() -> Self {
        GrassmannNumber::zero()
    }
    fn one() -> Self {
        GrassmannNumber::scalar(0, C::one())
    }
    fn add(&self, other: &Self) -> Self {
        self.plus(other)
    }
    fn sub(&self, other: &Self) -> Self {
        self.minus(other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.times(other)
    }
    fn neg(&self) -> Self {
        self.negate()
    }
    fn is_zero(&self) -> bool {
        GrassmannNumber::is_zero(self)
    }
    fn try_inv(&self) -> Option<Self> {
        self.inverse()
    }
    fn abs_f64(&self) -> f64 {
        self.coeff_norm()
    }
}

/// Graded product with the spec'd same-generator-count contract.
pub fn g_mul<C: Ring>(a: &GrassmannNumber<C>, b: &GrassmannNumber<C>) -> Result<GrassmannNumber<C>> {
    check_same_gens(a, b)?;
    Ok(a.times(b))
}

/// Coefficient-wise sum with the spec'd same-generator-count contract.
pub fn g_add<C: Ring>(a: &GrassmannNumber<C>, b: &GrassmannNumber<C>) -> Result<GrassmannNumber<C>> {
    check_same_gens(a, b)?;
    Ok(a.plus(b))
}

fn check_same_gens<C: Ring>(a: &GrassmannNumber<C>, b: &GrassmannNumber<C>) -> Result<()> {
    if a.gens != b.gens {
        return Err(Error::GeneratorCountMismatch { left: a.gens, right: b.gens });
    }
    Ok(())
}

/// Point of the (m|n)-superspace: m even coordinates, n odd coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SuperPoint<C: Ring> {
    even: Vec<GrassmannNumber<C>>,
    odd: Vec<GrassmannNumber<C>>,
}

impl<C: Ring> SuperPoint<C> {
    pub fn new(even: Vec<GrassmannNumber<C>>, odd: Vec<GrassmannNumber<C>>) -> Result<Self> {
        for (i, x) in even.iter().enumerate() {
            if !x.is_homogeneous(Parity::Even) {
                return Err(Error::Parity(format!("even coordinate {i} is not even")));
            }
        }
        for (j, t) in odd.iter().enumerate() {
            if !t.is_homogeneous(Parity::Odd) {
                return Err(Error::Parity(format!("odd coordinate {j} is not odd")));
            }
        }
        Ok(SuperPoint { even, odd })
    }

    pub fn even_coords(&self) -> &[GrassmannNumber<C>] {
        &self.even
    }

    pub fn odd_coords(&self) -> &[GrassmannNumber<C>] {
        &self.odd
    }

    /// The body projection to ordinary Euclidean space: body of each even
    /// coordinate; odd coordinates are discarded.
    pub fn body_point(&self) -> Vec<C> {
        self.even.iter().map(|x| x.body()).collect()
    }
}

impl<C: Ring> std::fmt::Display for GrassmannNumber<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&mask, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "{c:?}")?;
            } else {
                let mut names = Vec::new();
                let mut rest = mask;
                while rest != 0 {
                    let i = rest.trailing_zeros();
                    names.push(format!("x{}", i + 1));
                    rest &= rest - 1;
                }
                if c == &C::one() {
                    write!(f, "{}", names.join("^"))?;
                } else {
                    write!(f, "{c:?}*{}", names.join("^"))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{rat, rint, Rat};
    use proptest::prelude::*;

    fn xi(gens: u32, i: u32) -> GrassmannNumber<Rat> {
        GrassmannNumber::generator(gens, i).unwrap()
    }

    #[test]
    fn generator_squares_to_zero() {
        let x1 = xi(4, 1);
        assert!(g_mul(&x1, &x1).unwrap().is_zero());
    }

    #[test]
    fn generators_anticommute() {
        let x1 = xi(4, 1);
        let x2 = xi(4, 2);
        let ab = g_mul(&x1, &x2).unwrap();
        let ba = g_mul(&x2, &x1).unwrap();
        assert_eq!(ab, ba.negate());
        assert_eq!(ab.coeff(0b11), rint(1));
    }

    #[test]
    fn nilpotency_cancels_cross_terms() {
        let one = GrassmannNumber::scalar(4, rint(1));
        let x1 = xi(4, 1);
        let a = one.plus(&x1);
        let b = one.minus(&x1);
        assert_eq!(g_mul(&a, &b).unwrap(), one);
    }

    #[test]
    fn addition_examples() {
        let x1 = xi(4, 1);
        let zero = GrassmannNumber::scalar(4, rint(0));
        assert_eq!(g_add(&x1, &zero).unwrap(), x1);

        let x1x2 = g_mul(&xi(4, 1), &xi(4, 2)).unwrap();
        let a = GrassmannNumber::scalar(4, rint(2)).plus(&x1x2);
        let b = GrassmannNumber::scalar(4, rint(-2));
        assert_eq!(g_add(&a, &b).unwrap(), x1x2);

        let two_x1 = x1.scale(&rint(2));
        assert_eq!(g_add(&x1, &x1).unwrap(), two_x1);
    }

    #[test]
    fn mismatched_generator_count_errors() {
        let a = xi(3, 1);
        let b = xi(4, 1);
        assert!(matches!(
            g_mul(&a, &b),
            Err(Error::GeneratorCountMismatch { left: 3, right: 4 })
        ));
        assert!(g_add(&a, &b).is_err());
    }

    #[test]
    fn body_reads_empty_key() {
        let x1x2 = g_mul(&xi(4, 1), &xi(4, 2)).unwrap();
        let a = GrassmannNumber::scalar(4, rint(3)).plus(&x1x2.scale(&rint(2)));
        assert_eq!(a.body(), rint(3));
        assert_eq!(xi(4, 1).body(), rint(0));
    }

    #[test]
    fn body_is_multiplicative_on_example() {
        let a = GrassmannNumber::scalar(4, rint(1)).plus(&xi(4, 1));
        let b = GrassmannNumber::scalar(4, rint(2)).plus(&xi(4, 2));
        let prod = g_mul(&a, &b).unwrap();
        assert_eq!(prod.body(), rint(2));
        assert_eq!(prod.body(), a.body() * b.body());
    }

    #[test]
    fn parity_classification() {
        let x1x2 = g_mul(&xi(4, 1), &xi(4, 2)).unwrap();
        assert_eq!(x1x2.parity(), ParityClass::Homogeneous(Parity::Even));

        let x1x2x3 = g_mul(&x1x2, &xi(4, 3)).unwrap();
        let odd_mix = xi(4, 1).plus(&x1x2x3);
        assert_eq!(odd_mix.parity(), ParityClass::Homogeneous(Parity::Odd));

        let mixed = GrassmannNumber::scalar(4, rint(1)).plus(&xi(4, 1));
        assert_eq!(mixed.parity(), ParityClass::Mixed);

        assert_eq!(
            GrassmannNumber::<Rat>::zero().parity(),
            ParityClass::Homogeneous(Parity::Even)
        );
    }

    #[test]
    fn super_point_body() {
        let x1x2 = g_mul(&xi(4, 1), &xi(4, 2)).unwrap();
        let p = SuperPoint::new(
            vec![
                GrassmannNumber::scalar(4, rint(3)).plus(&x1x2),
                GrassmannNumber::scalar(4, rint(1)),
            ],
            vec![xi(4, 1)],
        )
        .unwrap();
        assert_eq!(p.body_point(), vec![rint(3), rint(1)]);

        let all_soul = SuperPoint::new(vec![x1x2.clone(), x1x2], vec![]).unwrap();
        assert_eq!(all_soul.body_point(), vec![rint(0), rint(0)]);

        let scalar_only =
            SuperPoint::new(vec![GrassmannNumber::scalar(4, rint(5))], vec![]).unwrap();
        assert_eq!(scalar_only.body_point(), vec![rint(5)]);
    }

    #[test]
    fn super_point_rejects_wrong_parity() {
        assert!(SuperPoint::new(vec![xi(4, 1)], vec![]).is_err());
        assert!(SuperPoint::new(vec![], vec![GrassmannNumber::scalar(4, rint(1))]).is_err());
    }

    #[test]
    fn products_longer_than_generator_count_vanish() {
        let mut acc = GrassmannNumber::scalar(3, rint(1));
        for i in 1..=3 {
            acc = g_mul(&acc, &xi(3, i)).unwrap();
        }
        assert!(!acc.is_zero());
        // One more factor must collide with an existing index.
        for i in 1..=3 {
            assert!(g_mul(&acc, &xi(3, i)).unwrap().is_zero());
        }
    }

    #[test]
    fn inverse_of_body_invertible() {
        let x1x2 = g_mul(&xi(4, 1), &xi(4, 2)).unwrap();
        let a = GrassmannNumber::scalar(4, rat(1, 2))
            .plus(&xi(4, 1).scale(&rint(3)))
            .plus(&x1x2);
        let inv = a.inverse().unwrap();
        assert_eq!(a.times(&inv), GrassmannNumber::scalar(4, rint(1)));
        assert!(xi(4, 1).inverse().is_none());
    }

    /// Exhaustive monomials for small generator counts.
    fn all_monomials(gens: u32) -> Vec<GrassmannNumber<Rat>> {
        (0u64..(1 << gens))
            .map(|mask| {
                let mut terms = BTreeMap::new();
                terms.insert(mask, rint(1));
                let mut g = GrassmannNumber::scalar(gens, rint(0));
                for (k, v) in terms {
                    g.add_term(k, v);
                }
                g
            })
            .collect()
    }

    #[test]
    fn supercommutativity_exhaustive_l4() {
        for a in all_monomials(4) {
            for b in all_monomials(4) {
                let (pa, pb) = (a.parity(), b.parity());
                let (ParityClass::Homogeneous(pa), ParityClass::Homogeneous(pb)) = (pa, pb) else {
                    unreachable!()
                };
                let ab = a.times(&b);
                let ba = b.times(&a);
                let expected = if pa == Parity::Odd && pb == Parity::Odd {
                    ba.negate()
                } else {
                    ba
                };
                assert_eq!(ab, expected, "a={a} b={b}");
            }
        }
    }

    fn arb_grassmann() -> impl Strategy<Value = GrassmannNumber<Rat>> {
        proptest::collection::vec((0u64..16, -4i64..=4), 0..5).prop_map(|pairs| {
            let mut g = GrassmannNumber::scalar(4, rint(0));
            for (mask, c) in pairs {
                g.add_term(mask, rint(c));
            }
            g
        })
    }

    proptest! {
        #[test]
        fn body_is_algebra_homomorphism(a in arb_grassmann(), b in arb_grassmann()) {
            prop_assert_eq!(a.times(&b).body(), a.body() * b.body());
            prop_assert_eq!(a.plus(&b).body(), a.body() + b.body());
        }

        #[test]
        fn multiplication_is_associative(
            a in arb_grassmann(),
            b in arb_grassmann(),
            c in arb_grassmann(),
        ) {
            prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        }

        #[test]
        fn multiplication_distributes(
            a in arb_grassmann(),
            b in arb_grassmann(),
            c in arb_grassmann(),
        ) {
            prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        }
    }
}
