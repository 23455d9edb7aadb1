//! Finite field arithmetic for GF(p^m).
//!
//! A [`FieldSpec`] fixes a concrete representation of GF(p^m): elements are
//! dense coefficient vectors over GF(p) reduced modulo a canonical monic
//! primitive polynomial, chosen as the lexicographically least one (comparing
//! coefficients from the highest degree down to the constant term). Because
//! the modulus is primitive, the class of the indeterminate x generates the
//! multiplicative group when m > 1; for prime fields the generator is the
//! least primitive root mod p. Discrete-log and antilog tables are built once
//! at construction, so multiplication, inversion and discrete logs are table
//! lookups.
//!
//! Field size is guarded: p^m must not exceed 2^20, which keeps every table
//! comfortably in memory and covers all supported geometries.

use crate::error::{Error, Result};

/// Largest supported field size (p^m).
pub const MAX_FIELD_SIZE: u64 = 1 << 20;

/// An element of GF(p^m): `coeffs[i]` is the coefficient of x^i, so the
/// vector is constant-term first and has length exactly m.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldElement {
    coeffs: Vec<u32>,
}

impl FieldElement {
    /// Coefficient vector, constant term first.
    #[must_use]
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    /// True for the additive identity.
    #[must_use]
    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// A concrete GF(p^m) with its canonical modulus, generator, and log tables.
#[derive(Clone, Debug)]
pub struct FieldSpec {
    p: u64,
    m: u32,
    q: u64,
    /// Monic modulus, constant term first, length m + 1.
    modulus: Vec<u32>,
    /// Canonical generator of the multiplicative group.
    primitive: FieldElement,
    /// antilog[k] = value encoding of primitive^k, for k in [0, q-1).
    antilog: Vec<u32>,
    /// dlog[value] = k with primitive^k = value; dlog[0] is a sentinel.
    dlog: Vec<u32>,
}

const DLOG_SENTINEL: u32 = u32::MAX;

impl FieldSpec {
    /// Builds GF(p^m).
    ///
    /// The modulus is the lexicographically least monic primitive polynomial
    /// of degree m over GF(p); the generator is the class of x for m > 1 and
    /// the least primitive root mod p for m = 1.
    pub fn new(p: u64, m: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidDegree);
        }
        let q = checked_pow(p, m)
            .filter(|&q| q <= MAX_FIELD_SIZE)
            .ok_or(Error::GuardExceeded {
                what: "field size p^m",
                limit: MAX_FIELD_SIZE,
                actual: u64::MAX,
            })?;

        let (modulus, primitive_coeffs) = if m == 1 {
            // Degree-1 moduli are x + c with root p - c; the least primitive
            // root is the generator, the least viable c fixes the modulus.
            let factors = prime_factors(p - 1);
            let root = (1..p)
                .find(|&g| has_order(g, p - 1, p, &factors))
                .ok_or_else(|| Error::Internal(format!("no primitive root mod {p}")))?;
            let c = (0..p)
                .find(|&c| !(p - c).is_multiple_of(p) && has_order((p - c) % p, p - 1, p, &factors))
                .ok_or_else(|| Error::Internal(format!("no primitive degree-1 poly mod {p}")))?;
            (vec![c as u32, 1], vec![root as u32])
        } else {
            let modulus = least_primitive_polynomial(p, m, q)?;
            let mut x = vec![0u32; m as usize];
            x[1] = 1;
            (modulus, x)
        };

        let mut spec = FieldSpec {
            p,
            m,
            q,
            modulus,
            primitive: FieldElement {
                coeffs: primitive_coeffs,
            },
            antilog: Vec::new(),
            dlog: Vec::new(),
        };
        spec.build_log_tables()?;
        Ok(spec)
    }

    fn build_log_tables(&mut self) -> Result<()> {
        let q = self.q as usize;
        self.antilog = Vec::with_capacity(q - 1);
        self.dlog = vec![DLOG_SENTINEL; q];
        let mut acc = self.one();
        for k in 0..(q - 1) {
            let v = self.value(&acc) as u32;
            if self.dlog[v as usize] != DLOG_SENTINEL {
                return Err(Error::Internal(format!(
                    "generator of GF({}) repeats at exponent {k}",
                    self.q
                )));
            }
            self.antilog.push(v);
            self.dlog[v as usize] = k as u32;
            acc = self.mul(&acc, &self.primitive.clone());
        }
        if !self.is_one(&acc) {
            return Err(Error::Internal(format!(
                "generator of GF({}) does not have order q - 1",
                self.q
            )));
        }
        Ok(())
    }

    /// Field characteristic.
    #[must_use]
    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree over the prime field.
    #[must_use]
    pub fn m(&self) -> u32 {
        self.m
    }

    /// Field size p^m.
    #[must_use]
    pub fn q(&self) -> u64 {
        self.q
    }

    /// Modulus polynomial, constant term first, monic of degree m.
    #[must_use]
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Canonical generator of the multiplicative group.
    #[must_use]
    pub fn generator(&self) -> &FieldElement {
        &self.primitive
    }

    /// The additive identity.
    #[must_use]
    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.m as usize],
        }
    }

    /// The multiplicative identity.
    #[must_use]
    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.m as usize];
        coeffs[0] = 1;
        FieldElement { coeffs }
    }

    fn is_one(&self, a: &FieldElement) -> bool {
        a.coeffs[0] == 1 && a.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// Builds an element from its coefficient vector (constant term first).
    pub fn element(&self, coeffs: &[u64]) -> Result<FieldElement> {
        if coeffs.len() != self.m as usize {
            return Err(Error::WrongElementSize {
                expected: self.m,
                got: coeffs.len(),
            });
        }
        let mut out = Vec::with_capacity(coeffs.len());
        for &c in coeffs {
            if c >= self.p {
                return Err(Error::InvalidCoefficient {
                    value: c,
                    p: self.p,
                });
            }
            out.push(c as u32);
        }
        Ok(FieldElement { coeffs: out })
    }

    /// Integer encoding of an element: sum of coeffs[i] * p^i. This is a
    /// bijection onto [0, q) with 0 and 1 mapping to themselves.
    #[must_use]
    pub fn value(&self, a: &FieldElement) -> u64 {
        debug_assert_eq!(a.coeffs.len(), self.m as usize);
        let mut v = 0u64;
        for &c in a.coeffs.iter().rev() {
            v = v * self.p + u64::from(c);
        }
        v
    }

    /// Inverse of [`FieldSpec::value`].
    pub fn element_from_value(&self, value: u64) -> Result<FieldElement> {
        if value >= self.q {
            return Err(Error::ValueOutOfRange { value, q: self.q });
        }
        let mut coeffs = vec![0u32; self.m as usize];
        let mut v = value;
        for c in coeffs.iter_mut() {
            *c = (v % self.p) as u32;
            v /= self.p;
        }
        Ok(FieldElement { coeffs })
    }

    fn check(&self, a: &FieldElement) {
        assert_eq!(
            a.coeffs.len(),
            self.m as usize,
            "element does not belong to GF({}^{})",
            self.p,
            self.m
        );
    }

    /// Sum of two elements.
    #[must_use]
    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let coeffs = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(&x, &y)| ((u64::from(x) + u64::from(y)) % self.p) as u32)
            .collect();
        FieldElement { coeffs }
    }

    /// Additive inverse.
    #[must_use]
    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        self.check(a);
        let coeffs = a
            .coeffs
            .iter()
            .map(|&x| {
                if x == 0 {
                    0
                } else {
                    (self.p - u64::from(x)) as u32
                }
            })
            .collect();
        FieldElement { coeffs }
    }

    /// Difference a - b.
    #[must_use]
    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    /// Product of two elements (polynomial product reduced by the modulus).
    #[must_use]
    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.check(a);
        self.check(b);
        let m = self.m as usize;
        // Schoolbook product, then reduction by the monic modulus.
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                prod[i + j] = (prod[i + j] + u64::from(x) * u64::from(y)) % self.p;
            }
        }
        reduce_in_place(&mut prod, &self.modulus, self.p);
        let coeffs = (0..m).map(|i| prod[i] as u32).collect();
        FieldElement { coeffs }
    }

    /// Multiplicative inverse; zero has none.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        self.check(a);
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = self.dlog(a)?;
        let ord = self.q - 1;
        Ok(self.exp((ord - k % ord) % ord))
    }

    /// a^k using the log tables (0^0 = 1).
    #[must_use]
    pub fn pow(&self, a: &FieldElement, k: u64) -> FieldElement {
        self.check(a);
        if a.is_zero() {
            return if k == 0 { self.one() } else { self.zero() };
        }
        let base = u64::from(self.dlog[self.value(a) as usize]);
        let ord = self.q - 1;
        self.exp(base * (k % ord) % ord)
    }

    /// generator^k.
    #[must_use]
    pub fn exp(&self, k: u64) -> FieldElement {
        let idx = (k % (self.q - 1)) as usize;
        self.element_from_value(u64::from(self.antilog[idx]))
            .expect("antilog table holds valid values")
    }

    /// Discrete log base the canonical generator; zero has none.
    pub fn dlog(&self, a: &FieldElement) -> Result<u64> {
        self.check(a);
        if a.is_zero() {
            return Err(Error::DlogOfZero);
        }
        Ok(u64::from(self.dlog[self.value(a) as usize]))
    }

    /// Total order key: 0 sorts first, the rest by discrete log. This is the
    /// element order used when enumerating geometry coordinates.
    #[must_use]
    pub fn order_key_of_value(&self, value: u64) -> u64 {
        debug_assert!(value < self.q);
        if value == 0 {
            0
        } else {
            u64::from(self.dlog[value as usize]) + 1
        }
    }

    /// All element values sorted by [`FieldSpec::order_key_of_value`]:
    /// zero first, then generator powers in exponent order.
    #[must_use]
    pub fn values_in_order(&self) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.q as usize);
        out.push(0);
        out.extend(self.antilog.iter().map(|&v| u64::from(v)));
        out
    }

    // --- value-encoded arithmetic (convenience for table builders) ---------

    /// Sum of two elements given and returned as value encodings.
    #[must_use]
    pub fn add_values(&self, a: u64, b: u64) -> u64 {
        if self.m == 1 {
            return (a + b) % self.p;
        }
        let (ea, eb) = (
            self.element_from_value(a).expect("value in range"),
            self.element_from_value(b).expect("value in range"),
        );
        self.value(&self.add(&ea, &eb))
    }

    /// Product of two elements given and returned as value encodings.
    #[must_use]
    pub fn mul_values(&self, a: u64, b: u64) -> u64 {
        if a == 0 || b == 0 {
            return 0;
        }
        let ord = self.q - 1;
        let k = (u64::from(self.dlog[a as usize]) + u64::from(self.dlog[b as usize])) % ord;
        u64::from(self.antilog[k as usize])
    }

    /// Additive inverse on value encodings.
    #[must_use]
    pub fn neg_value(&self, a: u64) -> u64 {
        let ea = self.element_from_value(a).expect("value in range");
        self.value(&self.neg(&ea))
    }

    /// Multiplicative inverse on value encodings; zero has none.
    pub fn inv_value(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let ord = self.q - 1;
        let k = u64::from(self.dlog[a as usize]);
        Ok(u64::from(self.antilog[((ord - k) % ord) as usize]))
    }

    /// Discrete log on value encodings; zero has none.
    pub fn dlog_value(&self, a: u64) -> Result<u64> {
        if a == 0 {
            return Err(Error::DlogOfZero);
        }
        Ok(u64::from(self.dlog[a as usize]))
    }

    /// generator^k as a value encoding.
    #[must_use]
    pub fn exp_value(&self, k: u64) -> u64 {
        u64::from(self.antilog[(k % (self.q - 1)) as usize])
    }
}

/// Reduces a polynomial (constant term first) by a monic modulus, in place.
fn reduce_in_place(poly: &mut [u64], modulus: &[u32], p: u64) {
    let m = modulus.len() - 1;
    for i in (m..poly.len()).rev() {
        let lead = poly[i];
        if lead == 0 {
            continue;
        }
        poly[i] = 0;
        // poly -= lead * x^(i-m) * modulus  (modulus is monic)
        for (j, &c) in modulus.iter().enumerate().take(m) {
            if c != 0 {
                let idx = i - m + j;
                let sub = (lead * u64::from(c)) % p;
                poly[idx] = (poly[idx] + p * p - sub) % p;
            }
        }
    }
}

/// Finds the lexicographically least monic primitive polynomial of degree m
/// over GF(p), comparing coefficients from highest degree to constant term.
fn least_primitive_polynomial(p: u64, m: u32, q: u64) -> Result<Vec<u32>> {
    let m = m as usize;
    let factors = prime_factors(q - 1);
    // Candidate index i encodes the coefficient vector below the leading 1:
    // digit j of i in base p is the coefficient of x^j, so increasing i walks
    // candidates in lexicographic order from the highest degree down.
    for i in 0..q {
        let mut coeffs = vec![0u32; m + 1];
        let mut v = i;
        for c in coeffs.iter_mut().take(m) {
            *c = (v % p) as u32;
            v /= p;
        }
        coeffs[m] = 1;
        if coeffs[0] == 0 {
            continue; // x divides the candidate, so x is not a unit
        }
        if x_has_order(&coeffs, p, q - 1, &factors) {
            return Ok(coeffs);
        }
    }
    Err(Error::Internal(format!(
        "no primitive polynomial of degree {m} over GF({p})"
    )))
}

/// True when the class of x modulo `modulus` has multiplicative order exactly
/// `e` (given the distinct prime factors of e). Such a modulus is necessarily
/// irreducible and primitive.
fn x_has_order(modulus: &[u32], p: u64, e: u64, factors: &[u64]) -> bool {
    if !poly_is_one(&poly_pow_x(e, modulus, p)) {
        return false;
    }
    factors
        .iter()
        .all(|&f| !poly_is_one(&poly_pow_x(e / f, modulus, p)))
}

fn poly_is_one(poly: &[u64]) -> bool {
    poly[0] == 1 && poly[1..].iter().all(|&c| c == 0)
}

/// x^k modulo a monic modulus over GF(p), by square and multiply.
fn poly_pow_x(k: u64, modulus: &[u32], p: u64) -> Vec<u64> {
    let m = modulus.len() - 1;
    let mut result = vec![0u64; m];
    result[0] = 1;
    if m == 1 {
        // x reduces to a constant immediately.
        let x0 = (p - u64::from(modulus[0])) % p;
        let mut base = x0;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result[0] = result[0] * base % p;
            }
            base = base * base % p;
            k >>= 1;
        }
        return result;
    }
    let mut base = vec![0u64; m];
    base[1] = 1;
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            result = poly_mul_mod(&result, &base, modulus, p);
        }
        base = poly_mul_mod(&base, &base, modulus, p);
        k >>= 1;
    }
    result
}

fn poly_mul_mod(a: &[u64], b: &[u64], modulus: &[u32], p: u64) -> Vec<u64> {
    let m = modulus.len() - 1;
    let mut prod = vec![0u64; 2 * m - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    reduce_in_place(&mut prod, modulus, p);
    prod.truncate(m);
    prod
}

fn has_order(g: u64, e: u64, p: u64, factors: &[u64]) -> bool {
    if mod_pow(g, e, p) != 1 {
        return false;
    }
    factors.iter().all(|&f| mod_pow(g, e / f, p) != 1)
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    if modulus == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Trial-division primality test; inputs stay far below the range where this
/// would be slow.
#[must_use]
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Distinct prime factors in increasing order.
#[must_use]
pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Writes n = p^m with p prime, if possible.
pub fn factor_prime_power(n: u64) -> Result<(u64, u32)> {
    if n < 2 {
        return Err(Error::NotAPrimePower(n));
    }
    let factors = prime_factors(n);
    if factors.len() != 1 {
        return Err(Error::NotAPrimePower(n));
    }
    let p = factors[0];
    let mut m = 0u32;
    let mut v = n;
    while v > 1 {
        v /= p;
        m += 1;
    }
    Ok((p, m))
}

fn checked_pow(p: u64, m: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..m {
        acc = acc.checked_mul(p)?;
        if acc > MAX_FIELD_SIZE {
            return None;
        }
    }
    Some(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(p: u64, m: u32) -> FieldSpec {
        FieldSpec::new(p, m).expect("field builds")
    }

    #[test]
    fn gf2_is_the_two_element_field() {
        let f = field(2, 1);
        assert_eq!(f.q(), 2);
        assert_eq!(f.modulus(), &[1, 1], "modulus is x + 1");
        assert_eq!(f.value(f.generator()), 1, "generator of GF(2)* is 1");
        assert_eq!(f.value(&f.add(&f.one(), &f.one())), 0);
    }

    #[test]
    fn gf4_uses_the_unique_irreducible_quadratic() {
        let f = field(2, 2);
        assert_eq!(f.modulus(), &[1, 1, 1], "x^2 + x + 1");
        // x * x = x + 1 under that modulus.
        let x = f.element(&[0, 1]).unwrap();
        let x_plus_1 = f.element(&[1, 1]).unwrap();
        assert_eq!(f.mul(&x, &x), x_plus_1);
        assert_eq!(f.dlog(&x_plus_1).unwrap(), 2);
        assert_eq!(f.inv(&x).unwrap(), x_plus_1, "x * (x+1) = x^2 + x = 1");
    }

    #[test]
    fn gf5_prime_field_arithmetic() {
        let f = field(5, 1);
        let e = |v: u64| f.element_from_value(v).unwrap();
        assert_eq!(f.value(&f.mul(&e(2), &e(4))), 3);
        assert_eq!(f.value(&f.inv(&e(2)).unwrap()), 3);
        assert_eq!(f.value(f.generator()), 2, "least primitive root mod 5");
    }

    #[test]
    fn gf8_and_gf9_canonical_moduli() {
        assert_eq!(field(2, 3).modulus(), &[1, 1, 0, 1], "x^3 + x + 1");
        assert_eq!(field(3, 2).modulus(), &[2, 1, 1], "x^2 + x + 2");
    }

    #[test]
    fn gf27_generator_has_order_26() {
        let f = field(3, 3);
        // Independent oracle: multiply out powers of the generator until the
        // identity reappears.
        let g = f.generator().clone();
        let mut acc = g.clone();
        let mut order = 1;
        while f.value(&acc) != 1 {
            acc = f.mul(&acc, &g);
            order += 1;
            assert!(order <= 26, "order must divide 26");
        }
        assert_eq!(order, 26);
    }

    #[test]
    fn field_axioms_hold_exhaustively_on_small_fields() {
        for (p, m) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
            let f = field(p, m);
            let q = f.q();
            let els: Vec<FieldElement> = (0..q).map(|v| f.element_from_value(v).unwrap()).collect();
            for a in &els {
                assert_eq!(f.add(a, &f.zero()), *a, "additive identity");
                assert_eq!(f.mul(a, &f.one()), *a, "multiplicative identity");
                assert!(f.add(a, &f.neg(a)).is_zero(), "additive inverse");
                if !a.is_zero() {
                    let b = f.inv(a).unwrap();
                    assert_eq!(f.value(&f.mul(a, &b)), 1, "multiplicative inverse");
                }
                for b in &els {
                    assert_eq!(f.add(a, b), f.add(b, a), "commutative +");
                    assert_eq!(f.mul(a, b), f.mul(b, a), "commutative *");
                    for c in &els {
                        assert_eq!(
                            f.add(&f.add(a, b), c),
                            f.add(a, &f.add(b, c)),
                            "associative +"
                        );
                        assert_eq!(
                            f.mul(&f.mul(a, b), c),
                            f.mul(a, &f.mul(b, c)),
                            "associative *"
                        );
                        assert_eq!(
                            f.mul(a, &f.add(b, c)),
                            f.add(&f.mul(a, b), &f.mul(a, c)),
                            "distributive"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn log_tables_invert_each_other() {
        for (p, m) in [(2, 4), (13, 1), (5, 2)] {
            let f = field(p, m);
            for k in 0..(f.q() - 1) {
                assert_eq!(f.dlog(&f.exp(k)).unwrap(), k);
            }
            // Every nonzero value appears in the antilog table.
            let mut seen: Vec<u64> = f.values_in_order();
            seen.sort_unstable();
            let expected: Vec<u64> = (0..f.q()).collect();
            assert_eq!(seen, expected);
        }
    }

    #[test]
    fn value_encoding_round_trips() {
        let f = field(3, 3);
        for v in 0..f.q() {
            let e = f.element_from_value(v).unwrap();
            assert_eq!(f.value(&e), v);
        }
        assert_eq!(f.value(&f.zero()), 0);
        assert_eq!(f.value(&f.one()), 1);
    }

    #[test]
    fn value_arithmetic_matches_element_arithmetic() {
        let f = field(2, 3);
        for a in 0..f.q() {
            for b in 0..f.q() {
                let (ea, eb) = (
                    f.element_from_value(a).unwrap(),
                    f.element_from_value(b).unwrap(),
                );
                assert_eq!(f.add_values(a, b), f.value(&f.add(&ea, &eb)));
                assert_eq!(f.mul_values(a, b), f.value(&f.mul(&ea, &eb)));
            }
            if a != 0 {
                let ea = f.element_from_value(a).unwrap();
                assert_eq!(f.inv_value(a).unwrap(), f.value(&f.inv(&ea).unwrap()));
            }
        }
    }

    #[test]
    fn moduli_are_irreducible_by_trial_division() {
        // Oracle: a reducible monic polynomial of degree m has a monic factor
        // of degree between 1 and m/2; divide by all of them.
        fn poly_divides(div: &[u64], poly: &[u32], p: u64) -> bool {
            let mut rem: Vec<u64> = poly.iter().map(|&c| u64::from(c)).collect();
            let d = div.len() - 1;
            for i in (d..rem.len()).rev() {
                let lead = rem[i];
                if lead == 0 {
                    continue;
                }
                // div is monic, subtract lead * x^(i-d) * div
                for (j, &c) in div.iter().enumerate() {
                    let idx = i - d + j;
                    rem[idx] = (rem[idx] + p * p - (lead * c) % p) % p;
                }
            }
            rem.iter().all(|&c| c == 0)
        }

        for (p, m) in [(2u64, 3u32), (3, 2), (2, 4), (3, 3), (5, 2)] {
            let f = field(p, m);
            let m = m as usize;
            for deg in 1..=(m / 2) {
                // All monic polynomials of this degree.
                for idx in 0..p.pow(deg as u32) {
                    let mut div = vec![0u64; deg + 1];
                    let mut v = idx;
                    for c in div.iter_mut().take(deg) {
                        *c = v % p;
                        v /= p;
                    }
                    div[deg] = 1;
                    assert!(
                        !poly_divides(&div, f.modulus(), p),
                        "modulus of GF({p}^{m}) has a degree-{deg} factor"
                    );
                }
            }
        }
    }

    #[test]
    fn build_rejects_bad_parameters() {
        assert!(matches!(FieldSpec::new(4, 1), Err(Error::NotPrime(4))));
        assert!(matches!(FieldSpec::new(6, 2), Err(Error::NotPrime(6))));
        assert!(matches!(FieldSpec::new(2, 0), Err(Error::InvalidDegree)));
        assert!(matches!(
            FieldSpec::new(2, 21),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(FieldSpec::new(2, 20).is_ok(), "2^20 is exactly the limit");
    }

    #[test]
    fn zero_has_no_inverse_or_log() {
        let f = field(7, 1);
        assert!(matches!(f.inv(&f.zero()), Err(Error::DivisionByZero)));
        assert!(matches!(f.dlog(&f.zero()), Err(Error::DlogOfZero)));
        assert!(matches!(f.inv_value(0), Err(Error::DivisionByZero)));
    }

    #[test]
    fn element_construction_validates() {
        let f = field(3, 2);
        assert!(matches!(
            f.element(&[1]),
            Err(Error::WrongElementSize { .. })
        ));
        assert!(matches!(
            f.element(&[3, 0]),
            Err(Error::InvalidCoefficient { .. })
        ));
        assert!(matches!(
            f.element_from_value(9),
            Err(Error::ValueOutOfRange { .. })
        ));
    }

    #[test]
    fn prime_power_factoring() {
        assert_eq!(factor_prime_power(8).unwrap(), (2, 3));
        assert_eq!(factor_prime_power(25).unwrap(), (5, 2));
        assert_eq!(factor_prime_power(7).unwrap(), (7, 1));
        assert!(factor_prime_power(12).is_err());
        assert!(factor_prime_power(1).is_err());
    }

    #[test]
    fn element_order_follows_discrete_log() {
        let f = field(2, 4);
        let order: Vec<u64> = f.values_in_order();
        assert_eq!(order[0], 0, "zero sorts first");
        assert_eq!(order[1], 1, "generator^0 = 1 sorts second");
        for (i, &v) in order.iter().enumerate().skip(1) {
            assert_eq!(f.order_key_of_value(v), i as u64);
        }
    }
}
