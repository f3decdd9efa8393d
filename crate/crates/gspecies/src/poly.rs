//! Multivariate integer polynomials, subtraction-free rational functions in
//! canonical form, and the tropical semifield.

use crate::error::{GspError, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Exp = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntPoly {
    nvars: usize,
    terms: BTreeMap<Exp, BigInt>,
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(&default_names(self.nvars)))
    }
}

pub fn default_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("z{i}")).collect()
}

impl IntPoly {
    pub fn zero(nvars: usize) -> Self {
        IntPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, BigInt::one())
    }

    pub fn constant(nvars: usize, c: BigInt) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(e, BigInt::one())
    }

    pub fn monomial(exp: Exp, c: BigInt) -> Self {
        let nvars = exp.len();
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exp, c);
        }
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exp, BigInt)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exp, BigInt> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_term().is_one()
    }

    pub fn add_term(&mut self, e: Exp, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: &[u32]) -> BigInt {
        self.terms.get(e).cloned().unwrap_or_default()
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&vec![0; self.nvars])
    }

    pub fn add(&self, o: &IntPoly) -> IntPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &IntPoly) -> IntPoly {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.add_term(e.clone(), -c.clone());
        }
        r
    }

    pub fn neg(&self) -> IntPoly {
        IntPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, s: &BigInt) -> IntPoly {
        let mut r = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            r.add_term(e.clone(), c * s);
        }
        r
    }

    pub fn mul(&self, o: &IntPoly) -> IntPoly {
        assert_eq!(self.nvars, o.nvars);
        let mut r = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Exp = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                r.add_term(e, c1 * c2);
            }
        }
        r
    }

    pub fn pow(&self, n: u32) -> IntPoly {
        let mut r = Self::one(self.nvars);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn mul_monomial(&self, e: &[u32]) -> IntPoly {
        IntPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(x, c)| (x.iter().zip(e).map(|(a, b)| a + b).collect(), c.clone())).collect(),
        }
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn is_subtraction_free(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    pub fn content(&self) -> BigInt {
        self.terms.values().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Evaluate at integer points.
    pub fn eval_i64(&self, x: &[i64]) -> BigInt {
        let mut s = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                t *= BigInt::from(*xi).pow(k);
            }
            s += t;
        }
        s
    }

    /// Monomials that are maximal for divisibility.
    pub fn maximal_monomials(&self) -> Vec<(Exp, BigInt)> {
        let exps: Vec<&Exp> = self.terms.keys().collect();
        self.terms
            .iter()
            .filter(|(e, _)| !exps.iter().any(|f| *f != *e && f.iter().zip(e.iter()).all(|(a, b)| a >= b)))
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect()
    }

    /// Ring morphism substituting variable `i` by the polynomial `subs[i]`.
    pub fn substitute(&self, subs: &[IntPoly]) -> IntPoly {
        assert_eq!(subs.len(), self.nvars);
        let target = subs.first().map_or(0, |p| p.nvars);
        let mut r = IntPoly::zero(target);
        for (e, c) in &self.terms {
            let mut t = IntPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&subs[i].pow(k));
                }
            }
            r = r.add(&t);
        }
        r
    }

    /// Specialization collapsing groups of variables: variable `i` maps to `map[i]`.
    pub fn collapse(&self, map: &[usize], target_nvars: usize) -> IntPoly {
        let mut r = IntPoly::zero(target_nvars);
        for (e, c) in &self.terms {
            let mut f = vec![0u32; target_nvars];
            for (i, &k) in e.iter().enumerate() {
                f[map[i]] += k;
            }
            r.add_term(f, c.clone());
        }
        r
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut parts = Vec::new();
        let mut keys: Vec<&Exp> = self.terms.keys().collect();
        keys.sort_by_key(|e| (e.iter().sum::<u32>(), std::cmp::Reverse((*e).clone())));
        for e in keys {
            let c = &self.terms[e];
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(i, &k)| if k == 1 { names[i].clone() } else { format!("{}^{}", names[i], k) })
                .collect();
            let body = if mono.is_empty() {
                c.to_string()
            } else if c.is_one() {
                mono.join("*")
            } else if *c == -BigInt::one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", c, mono.join("*"))
            };
            parts.push(body);
        }
        parts.join(" + ").replace("+ -", "- ")
    }

    // ---- recursive gcd machinery ----

    fn main_var(&self) -> Option<usize> {
        (0..self.nvars).rev().find(|&v| self.degree_in(v) > 0)
    }

    /// Coefficients in variable `v`: degree -> polynomial free of `v`.
    fn coeffs_in(&self, v: usize) -> BTreeMap<u32, IntPoly> {
        let mut out: BTreeMap<u32, IntPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut f = e.clone();
            let d = f[v];
            f[v] = 0;
            out.entry(d).or_insert_with(|| IntPoly::zero(self.nvars)).add_term(f, c.clone());
        }
        out
    }

    fn lead_in(&self, v: usize) -> IntPoly {
        self.coeffs_in(v).into_iter().next_back().map(|(_, p)| p).unwrap_or_else(|| IntPoly::zero(self.nvars))
    }

    fn var_pow(&self, v: usize, k: u32) -> Exp {
        let mut e = vec![0; self.nvars];
        e[v] = k;
        e
    }

    /// Exact division; `None` if `o` does not divide `self`.
    pub fn div_exact(&self, o: &IntPoly) -> Option<IntPoly> {
        assert!(!o.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(self.clone());
        }
        let v = match (self.main_var(), o.main_var()) {
            (a, b) => a.into_iter().chain(b).max(),
        };
        let Some(v) = v else {
            let (a, b) = (self.constant_term(), o.constant_term());
            let (qq, r) = a.div_rem(&b);
            return if r.is_zero() { Some(IntPoly::constant(self.nvars, qq)) } else { None };
        };
        let db = o.degree_in(v);
        if db == 0 {
            let mut r = IntPoly::zero(self.nvars);
            for (d, c) in self.coeffs_in(v) {
                let qc = c.div_exact(o)?;
                r = r.add(&qc.mul_monomial(&self.var_pow(v, d)));
            }
            return Some(r);
        }
        let lb = o.lead_in(v);
        let mut rem = self.clone();
        let mut quot = IntPoly::zero(self.nvars);
        while !rem.is_zero() {
            let dr = rem.degree_in(v);
            if dr < db {
                return None;
            }
            let lr = rem.lead_in(v);
            let t = lr.div_exact(&lb)?.mul_monomial(&self.var_pow(v, dr - db));
            rem = rem.sub(&t.mul(o));
            quot = quot.add(&t);
        }
        Some(quot)
    }

    fn content_in(&self, v: usize) -> IntPoly {
        let mut g = IntPoly::zero(self.nvars);
        for (_, c) in self.coeffs_in(v) {
            g = gcd(&g, &c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    fn prem(&self, b: &IntPoly, v: usize) -> IntPoly {
        let db = b.degree_in(v);
        let lb = b.lead_in(v);
        let mut r = self.clone();
        let mut e = (self.degree_in(v) + 1).saturating_sub(db);
        while !r.is_zero() && r.degree_in(v) >= db {
            let t = r.lead_in(v).mul_monomial(&self.var_pow(v, r.degree_in(v) - db));
            r = lb.mul(&r).sub(&t.mul(b));
            e = e.saturating_sub(1);
        }
        lb.pow(e).mul(&r)
    }

    /// Normalise the sign so that the largest exponent has a positive coefficient.
    pub fn normalize_sign(&self) -> IntPoly {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }
}

/// Greatest common divisor in Z[x_1..x_n], normalised with positive leading coefficient.
pub fn gcd(a: &IntPoly, b: &IntPoly) -> IntPoly {
    if a.is_zero() {
        return b.normalize_sign();
    }
    if b.is_zero() {
        return a.normalize_sign();
    }
    let v = a.main_var().into_iter().chain(b.main_var()).max();
    let Some(v) = v else {
        return IntPoly::constant(a.nvars, a.constant_term().gcd(&b.constant_term()));
    };
    let ca = if a.degree_in(v) > 0 { a.content_in(v) } else { a.clone() };
    let cb = if b.degree_in(v) > 0 { b.content_in(v) } else { b.clone() };
    let gc = gcd(&ca, &cb);
    if a.degree_in(v) == 0 || b.degree_in(v) == 0 {
        // one side is free of v, so the gcd divides its content chain
        return gc.normalize_sign();
    }
    let mut r0 = a.div_exact(&ca).expect("content divides");
    let mut r1 = b.div_exact(&cb).expect("content divides");
    if r0.degree_in(v) < r1.degree_in(v) {
        std::mem::swap(&mut r0, &mut r1);
    }
    while !r1.is_zero() {
        let r = r0.prem(&r1, v);
        r0 = r1;
        r1 = if r.is_zero() {
            r
        } else if r.degree_in(v) == 0 {
            IntPoly::zero(a.nvars)
                .add(&IntPoly::one(a.nvars))
                .mul(&IntPoly::one(a.nvars))
        } else {
            let c = r.content_in(v);
            r.div_exact(&c).expect("content divides")
        };
        if r1.is_one() {
            r0 = r1.clone();
            break;
        }
    }
    let prim = if r0.degree_in(v) == 0 { IntPoly::one(a.nvars) } else { r0.div_exact(&r0.content_in(v)).unwrap() };
    gc.mul(&prim).normalize_sign()
}

/// Element of the semifield of subtraction-free rational functions, kept as a
/// reduced fraction of integer polynomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SFRational {
    num: IntPoly,
    den: IntPoly,
}

impl fmt::Debug for SFRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?})/({:?})", self.num, self.den)
    }
}

impl SFRational {
    pub fn new(num: IntPoly, den: IntPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        let g = gcd(&num, &den);
        let mut n = num.div_exact(&g).expect("gcd divides numerator");
        let mut d = den.div_exact(&g).expect("gcd divides denominator");
        if d.terms.iter().next_back().is_some_and(|(_, c)| c.is_negative()) {
            n = n.neg();
            d = d.neg();
        }
        SFRational { num: n, den: d }
    }

    pub fn from_poly(p: IntPoly) -> Self {
        let n = p.nvars;
        SFRational { num: p, den: IntPoly::one(n) }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(IntPoly::one(nvars))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(IntPoly::var(nvars, i))
    }

    pub fn num(&self) -> &IntPoly {
        &self.num
    }

    pub fn den(&self) -> &IntPoly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars
    }

    pub fn mul(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn div(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den), self.den.mul(&o.num))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Self {
        Self::new(self.den.clone(), self.num.clone())
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = SFRational { num: self.num.pow(n.unsigned_abs() as u32), den: self.den.pow(n.unsigned_abs() as u32) };
        let p = Self::new(p.num, p.den);
        if n < 0 {
            p.inv()
        } else {
            p
        }
    }

    pub fn one_plus(&self) -> Self {
        Self::new(self.num.add(&self.den), self.den.clone())
    }

    pub fn is_subtraction_free(&self) -> bool {
        self.num.is_subtraction_free() && self.den.is_subtraction_free()
    }

    /// The polynomial this element equals, if the reduced denominator is 1.
    pub fn as_polynomial(&self) -> Option<IntPoly> {
        if self.den.is_one() {
            Some(self.num.clone())
        } else {
            None
        }
    }

    /// Evaluate a polynomial at rational-function arguments.
    pub fn eval_poly(p: &IntPoly, args: &[SFRational]) -> SFRational {
        assert_eq!(args.len(), p.nvars());
        let n = args.first().map_or(0, |a| a.nvars());
        let mut acc = SFRational { num: IntPoly::zero(n), den: IntPoly::one(n) };
        for (e, c) in p.terms() {
            let mut t = SFRational::from_poly(IntPoly::constant(n, c.clone()));
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&args[i].powi(k as i64));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Ring morphism collapsing variables through `map`.
    pub fn collapse(&self, map: &[usize], target_nvars: usize) -> Self {
        Self::new(self.num.collapse(map, target_nvars), self.den.collapse(map, target_nvars))
    }
}

/// Element of the tropical semifield: exponent vector, product = sum, sum = componentwise min.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tropical(pub Vec<i64>);

impl Tropical {
    pub fn one(n: usize) -> Self {
        Tropical(vec![0; n])
    }

    pub fn mul(&self, o: &Tropical) -> Tropical {
        Tropical(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn add(&self, o: &Tropical) -> Tropical {
        Tropical(self.0.iter().zip(&o.0).map(|(a, b)| *a.min(b)).collect())
    }

    pub fn pow(&self, k: i64) -> Tropical {
        Tropical(self.0.iter().map(|a| a * k).collect())
    }

    /// Evaluate a subtraction-free polynomial; positive integer coefficients are
    /// tropically idempotent.
    pub fn eval(p: &IntPoly, args: &[Tropical]) -> Result<Tropical> {
        if !p.is_subtraction_free() {
            return Err(GspError::NotSubtractionFree);
        }
        let n = args.first().map_or(0, |a| a.0.len());
        let mut acc: Option<Tropical> = None;
        for e in p.terms().keys() {
            let mut t = Tropical::one(n);
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&args[i].pow(k as i64));
                }
            }
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&t),
            });
        }
        acc.ok_or_else(|| GspError::Invalid("tropical evaluation of the zero polynomial".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, terms: &[(&[u32], i64)]) -> IntPoly {
        IntPoly::from_terms(n, terms.iter().map(|(e, c)| (e.to_vec(), BigInt::from(*c))))
    }

    #[test]
    fn gcd_of_products_recovers_common_factor() {
        let x = IntPoly::var(2, 0);
        let y = IntPoly::var(2, 1);
        let one = IntPoly::one(2);
        let f = x.add(&one); // 1 + x
        let g = x.add(&y); // x + y
        let h = y.add(&one).pow(2); // (1+y)^2
        let a = f.mul(&g).mul(&h);
        let b = f.mul(&h).mul(&y);
        assert_eq!(gcd(&a, &b), f.mul(&h));
    }

    #[test]
    fn gcd_with_integer_content() {
        let a = p(1, &[(&[0], 6), (&[1], 6)]);
        let b = p(1, &[(&[0], 4), (&[2], -4)]);
        assert_eq!(gcd(&a, &b), p(1, &[(&[0], 2), (&[1], 2)]));
    }

    #[test]
    fn exact_division() {
        let a = p(2, &[(&[2, 0], 1), (&[0, 2], -1)]);
        let b = p(2, &[(&[1, 0], 1), (&[0, 1], 1)]);
        assert_eq!(a.div_exact(&b), Some(p(2, &[(&[1, 0], 1), (&[0, 1], -1)])));
        assert_eq!(b.div_exact(&a), None);
    }

    #[test]
    fn sfrational_canonical_form() {
        let x = SFRational::var(1, 0);
        let r = x.one_plus().mul(&x).div(&x.one_plus());
        assert_eq!(r, x);
        assert_eq!(x.powi(-1).powi(-1), x);
    }

    #[test]
    fn tropical_min_plus() {
        let f = p(1, &[(&[0], 1), (&[1], 1)]);
        let t = Tropical::eval(&f, &[Tropical(vec![-1])]).unwrap();
        assert_eq!(t, Tropical(vec![-1]));
        let neg = p(1, &[(&[0], 1), (&[1], -1)]);
        assert_eq!(Tropical::eval(&neg, &[Tropical(vec![1])]), Err(GspError::NotSubtractionFree));
    }

    #[test]
    fn maximal_monomial_detection() {
        let f = p(3, &[(&[0, 0, 0], 1), (&[0, 0, 1], 1), (&[0, 1, 1], 1), (&[1, 1, 1], 1)]);
        assert_eq!(f.maximal_monomials(), vec![(vec![1, 1, 1], BigInt::one())]);
    }
}
