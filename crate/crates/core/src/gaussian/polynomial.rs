use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::map::ModeLabel;

// (mode, creators, annihilators) per mode of a normal-ordered monomial.
type OrderKey = Vec<(usize, usize, usize)>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ladder {
    Create,
    Annihilate,
}

impl Ladder {
    pub fn flipped(self) -> Ladder {
        match self {
            Ladder::Create => Ladder::Annihilate,
            Ladder::Annihilate => Ladder::Create,
        }
    }
}

pub type Factor = (ModeLabel, Ladder);

/// One weighted operator product. Factor order is significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Monomial {
    pub coeff: Complex64,
    pub factors: Vec<Factor>,
}

impl Monomial {
    pub fn degree(&self) -> usize {
        self.factors.len()
    }
}

/// A sum of ordered monomials in creation and annihilation operators.
///
/// Nothing is reordered implicitly; [`OperatorPolynomial::normal_ordered`]
/// produces the canonical normal-ordered form on request.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorPolynomial {
    terms: Vec<Monomial>,
}

const PRUNE: f64 = 1e-300;

impl OperatorPolynomial {
    pub fn zero() -> Self {
        OperatorPolynomial { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::constant(Complex64::new(1.0, 0.0))
    }

    pub fn constant(c: Complex64) -> Self {
        Self::monomial(c, Vec::new())
    }

    pub fn monomial(coeff: Complex64, factors: Vec<Factor>) -> Self {
        OperatorPolynomial {
            terms: vec![Monomial { coeff, factors }],
        }
    }

    pub fn create(mode: ModeLabel) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), vec![(mode, Ladder::Create)])
    }

    pub fn annihilate(mode: ModeLabel) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), vec![(mode, Ladder::Annihilate)])
    }

    /// `a^dagger a` on `mode`.
    pub fn number(mode: ModeLabel) -> Self {
        Self::create(mode) * Self::annihilate(mode)
    }

    /// `a^dagger^p a^q` on `mode`.
    pub fn normal_power(mode: ModeLabel, p: usize, q: usize) -> Self {
        let mut factors = vec![(mode, Ladder::Create); p];
        factors.extend(std::iter::repeat_n((mode, Ladder::Annihilate), q));
        Self::monomial(Complex64::new(1.0, 0.0), factors)
    }

    /// Position quadrature `(a + a^dagger)/sqrt 2`.
    pub fn position(mode: ModeLabel) -> Self {
        (Self::annihilate(mode) + Self::create(mode)) * Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)
    }

    /// Momentum quadrature `i(a^dagger - a)/sqrt 2`.
    pub fn momentum(mode: ModeLabel) -> Self {
        (Self::create(mode) - Self::annihilate(mode)) * Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn degree(&self) -> usize {
        self.terms.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest mode index referenced by any factor.
    pub fn max_mode(&self) -> Option<usize> {
        self.terms.iter().flat_map(|t| t.factors.iter().map(|(m, _)| m.0)).max()
    }

    pub fn is_zero(&self) -> bool {
        self.normal_ordered().terms.is_empty()
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::identity();
        for _ in 0..n {
            out = out * self.clone();
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        OperatorPolynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff * c,
                    factors: t.factors.clone(),
                })
                .collect(),
        }
    }

    pub fn adjoint(&self) -> Self {
        OperatorPolynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Monomial {
                    coeff: t.coeff.conj(),
                    factors: t.factors.iter().rev().map(|&(m, l)| (m, l.flipped())).collect(),
                })
                .collect(),
        }
    }

    /// Canonical normal-ordered form: per monomial, modes ascending, each as
    /// `a^dagger^p a^q`; like terms merged and zeros dropped.
    pub fn normal_ordered(&self) -> Self {
        let mut acc: BTreeMap<OrderKey, Complex64> = BTreeMap::new();
        for term in &self.terms {
            let mut by_mode: BTreeMap<usize, Vec<Ladder>> = BTreeMap::new();
            for &(mode, ladder) in &term.factors {
                by_mode.entry(mode.0).or_default().push(ladder);
            }
            let mut partial: Vec<(OrderKey, f64)> = vec![(Vec::new(), 1.0)];
            for (mode, seq) in by_mode {
                let single = single_mode_normal_order(&seq);
                let mut next = Vec::with_capacity(partial.len() * single.len());
                for (key, w) in &partial {
                    for &((p, q), c) in &single {
                        let mut k = key.clone();
                        if p + q > 0 {
                            k.push((mode, p, q));
                        }
                        next.push((k, w * c));
                    }
                }
                partial = next;
            }
            for (key, w) in partial {
                *acc.entry(key).or_insert(Complex64::new(0.0, 0.0)) += term.coeff * w;
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm() > PRUNE)
            .map(|(key, coeff)| {
                let mut factors = Vec::new();
                for (mode, p, q) in key {
                    factors.extend(std::iter::repeat_n((ModeLabel(mode), Ladder::Create), p));
                    factors.extend(std::iter::repeat_n((ModeLabel(mode), Ladder::Annihilate), q));
                }
                Monomial { coeff, factors }
            })
            .collect();
        OperatorPolynomial { terms }
    }

    /// Equality as operators, judged on normal-ordered forms.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let diff = (self.clone() - other.clone()).normal_ordered();
        diff.terms.iter().all(|t| t.coeff.norm() <= tol)
    }
}

/// Normal orders a word in one mode's ladder operators using `[a, a^dagger] = 1`.
/// Returns `((p, q), weight)` pairs for `a^dagger^p a^q`.
fn single_mode_normal_order(seq: &[Ladder]) -> Vec<((usize, usize), f64)> {
    let mut state: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    state.insert((0, 0), 1.0);
    for &ladder in seq {
        let mut next: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for ((p, q), c) in state {
            match ladder {
                Ladder::Annihilate => *next.entry((p, q + 1)).or_insert(0.0) += c,
                Ladder::Create => {
                    // a^q a^dagger = a^dagger a^q + q a^(q-1)
                    *next.entry((p + 1, q)).or_insert(0.0) += c;
                    if q > 0 {
                        *next.entry((p, q - 1)).or_insert(0.0) += c * q as f64;
                    }
                }
            }
        }
        state = next;
    }
    state.into_iter().collect()
}

impl Add for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn add(mut self, rhs: OperatorPolynomial) -> OperatorPolynomial {
        self.terms.extend(rhs.terms);
        self
    }
}

impl Neg for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn neg(self) -> OperatorPolynomial {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Sub for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn sub(self, rhs: OperatorPolynomial) -> OperatorPolynomial {
        self + (-rhs)
    }
}

impl Mul for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: OperatorPolynomial) -> OperatorPolynomial {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let coeff = a.coeff * b.coeff;
                if coeff.norm() <= PRUNE {
                    continue;
                }
                let mut factors = a.factors.clone();
                factors.extend_from_slice(&b.factors);
                terms.push(Monomial { coeff, factors });
            }
        }
        OperatorPolynomial { terms }
    }
}

impl Mul<Complex64> for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: Complex64) -> OperatorPolynomial {
        self.scale(rhs)
    }
}

impl Mul<f64> for OperatorPolynomial {
    type Output = OperatorPolynomial;
    fn mul(self, rhs: f64) -> OperatorPolynomial {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const A: ModeLabel = ModeLabel(0);

    #[test]
    fn commutator_is_one() {
        let a = OperatorPolynomial::annihilate(A);
        let ad = OperatorPolynomial::create(A);
        let comm = a.clone() * ad.clone() - ad * a;
        assert!(comm.approx_eq(&OperatorPolynomial::identity(), 0.0));
    }

    #[test]
    fn normal_order_of_a2_ad2() {
        // a^2 a^dagger^2 = a^dagger^2 a^2 + 4 a^dagger a + 2
        let a = OperatorPolynomial::annihilate(A);
        let ad = OperatorPolynomial::create(A);
        let lhs = a.pow(2) * ad.pow(2);
        let rhs = OperatorPolynomial::normal_power(A, 2, 2)
            + OperatorPolynomial::number(A) * 4.0
            + OperatorPolynomial::identity() * 2.0;
        assert!(lhs.approx_eq(&rhs, 1e-15));
    }

    #[test]
    fn different_modes_commute() {
        let x = OperatorPolynomial::annihilate(ModeLabel(0)) * OperatorPolynomial::create(ModeLabel(1));
        let y = OperatorPolynomial::create(ModeLabel(1)) * OperatorPolynomial::annihilate(ModeLabel(0));
        assert!(x.approx_eq(&y, 0.0));
    }

    #[test]
    fn adjoint_reverses_and_flips() {
        let p = OperatorPolynomial::monomial(
            Complex64::new(1.0, 2.0),
            vec![(A, Ladder::Create), (ModeLabel(1), Ladder::Annihilate)],
        );
        let adj = p.adjoint();
        assert_eq!(adj.terms()[0].coeff, Complex64::new(1.0, -2.0));
        assert_eq!(
            adj.terms()[0].factors,
            vec![(ModeLabel(1), Ladder::Create), (A, Ladder::Annihilate)]
        );
    }
}
